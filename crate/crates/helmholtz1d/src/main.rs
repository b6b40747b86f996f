use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use helmholtz1d::experiment_harness::{
    add_noise, emit_csv, parse_config, run_scenario, DEFAULT_DALPHA,
};
use helmholtz1d::fixtures::Fixture;
use helmholtz1d::forward_model::{boundary_data, forward_solve, ComplexFrequency};
use helmholtz1d::grid_core::{
    l2_distance_sq, m_constant, make_grid, FrequencyGrid, FREQ_SPACING_MAX,
};
use helmholtz1d::spectral_inverse::{
    fourier_from_boundary, reconstruct_bandlimited, truncation_tail,
};
use helmholtz1d::stability_analysis::{
    bound_rhs, epsilon_sq, lemma21_ratios, lemma24_diagnostic, mu_lower, tail_ratio,
};
use helmholtz1d::Result;

const REPORT_NODES: usize = 2049;

fn parse_fixture(s: &str) -> std::result::Result<Fixture, String> {
    Fixture::from_id(s).map_err(|e| e.to_string())
}

fn parse_positive(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a positive finite number, got {s}"))
    }
}

fn parse_above_one(s: &str) -> std::result::Result<f64, String> {
    let v = parse_positive(s)?;
    if v > 1.0 {
        Ok(v)
    } else {
        Err(format!("band limit must exceed 1, got {s}"))
    }
}

fn parse_spacing(s: &str) -> std::result::Result<f64, String> {
    let v = parse_positive(s)?;
    if v <= FREQ_SPACING_MAX {
        Ok(v)
    } else {
        Err(format!("spacing must be at most {FREQ_SPACING_MAX}, got {s}"))
    }
}

fn parse_nonnegative(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v >= 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a nonnegative finite number, got {s}"))
    }
}

fn parse_odd_nodes(s: &str) -> std::result::Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v >= 3 && v % 2 == 1 {
        Ok(v)
    } else {
        Err(format!("node count must be odd and at least 3, got {s}"))
    }
}

#[derive(Parser)]
#[command(name = "helmholtz1d", version, about = "1D wave field lab: forward solves, endpoint data, band-limited source recovery")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample the radiating field of a fixture source on its own grid
    Forward {
        #[arg(long, value_parser = parse_fixture)]
        fixture: Fixture,
        #[arg(long, value_parser = parse_positive)]
        k: f64,
        #[arg(long, default_value_t = REPORT_NODES, value_parser = parse_odd_nodes)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tabulate the endpoint field over a uniform frequency band
    Boundary {
        #[arg(long, value_parser = parse_fixture)]
        fixture: Fixture,
        #[arg(long, value_parser = parse_positive)]
        kmax: f64,
        #[arg(long, value_parser = parse_spacing)]
        dalpha: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover the source from (optionally noisy) endpoint data
    Reconstruct {
        #[arg(long, value_parser = parse_fixture)]
        fixture: Fixture,
        #[arg(long, value_parser = parse_above_one)]
        kmax: f64,
        #[arg(long, default_value_t = 0.0, value_parser = parse_nonnegative)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every scenario stanza in a config file, one CSV row per (scenario, K)
    Scan {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Emit the stability diagnostic tables for one fixture
    Diagnose {
        #[arg(long, value_parser = parse_fixture)]
        fixture: Fixture,
        #[arg(long)]
        out: PathBuf,
    },
}

fn create_out(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run_forward(fixture: Fixture, k: f64, n: usize, out: &Path) -> Result<()> {
    let grid = make_grid(n)?;
    let f = fixture.sample(&grid);
    let kc = ComplexFrequency::real(k)?;
    let u = forward_solve(&f, kc, grid.nodes());
    let mut w = create_out(out)?;
    writeln!(w, "x,u_re,u_im")?;
    for (x, v) in grid.nodes().iter().zip(&u) {
        writeln!(w, "{:.12e},{:.12e},{:.12e}", x, v.re, v.im)?;
    }
    w.flush()?;
    eprintln!("forward {} k={k}: {n} samples -> {}", fixture.id(), out.display());
    Ok(())
}

fn run_boundary(fixture: Fixture, kmax: f64, dalpha: f64, out: &Path) -> Result<()> {
    let grid = make_grid(REPORT_NODES)?;
    let f = fixture.sample(&grid);
    let freqs = FrequencyGrid::uniform(kmax, dalpha)?;
    let data = boundary_data(&f, &freqs);
    let mut w = create_out(out)?;
    writeln!(w, "alpha,u_left_re,u_left_im,u_right_re,u_right_im")?;
    for i in 0..freqs.len() {
        let l = data.u_left()[i];
        let r = data.u_right()[i];
        writeln!(
            w,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            freqs.alphas()[i],
            l.re,
            l.im,
            r.re,
            r.im
        )?;
    }
    w.flush()?;
    eprintln!(
        "boundary {} kmax={kmax}: {} frequencies -> {}",
        fixture.id(),
        freqs.len(),
        out.display()
    );
    Ok(())
}

fn run_reconstruct(fixture: Fixture, kmax: f64, noise: f64, seed: u64, out: &Path) -> Result<()> {
    let grid = make_grid(REPORT_NODES)?;
    let f = fixture.sample(&grid);
    let freqs = FrequencyGrid::uniform(kmax, DEFAULT_DALPHA)?;
    let clean = boundary_data(&f, &freqs);
    let data = add_noise(&clean, noise, seed);
    let eps = epsilon_sq(&data);
    let bound = bound_rhs(eps, kmax, m_constant(&f))?;
    let rec = reconstruct_bandlimited(&fourier_from_boundary(&data), &grid)?;
    let err = l2_distance_sq(&rec.f_rec, &f).sqrt();
    let mut w = create_out(out)?;
    writeln!(w, "x,f_true,f_rec_re,f_rec_im")?;
    for j in 0..grid.n_nodes() {
        writeln!(
            w,
            "{:.12e},{:.12e},{:.12e},{:.12e}",
            grid.nodes()[j],
            f.values()[j].re,
            rec.f_rec.values()[j].re,
            rec.f_rec.values()[j].im
        )?;
    }
    writeln!(w, "# l2_error={err:.12e},bound_rhs={bound:.12e}")?;
    w.flush()?;
    eprintln!(
        "reconstruct {} kmax={kmax} noise={noise}: l2_error={err:.6e} bound_rhs={bound:.6e} -> {}",
        fixture.id(),
        out.display()
    );
    Ok(())
}

fn run_scan(config: &Path, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(config)?;
    let scenarios = parse_config(&text)?;
    let mut rows = Vec::new();
    for s in &scenarios {
        rows.extend(run_scenario(s)?);
    }
    emit_csv(&rows, out)?;
    eprintln!(
        "scan {}: {} scenarios, {} rows -> {}",
        config.display(),
        scenarios.len(),
        rows.len(),
        out.display()
    );
    Ok(())
}

fn run_diagnose(fixture: Fixture, out: &Path) -> Result<()> {
    let grid = make_grid(REPORT_NODES)?;
    let f = fixture.sample(&grid);
    let mut w = create_out(out)?;

    writeln!(w, "# section=lemma21_ratios")?;
    writeln!(w, "k_re,k_im,i1,i2,ratio1,ratio2")?;
    for radius in [5.0, 15.0, 30.0, 50.0] {
        for angle in [-0.6, -0.3, 0.0, 0.3, 0.6] {
            let k = ComplexFrequency::new(radius * f64::cos(angle), radius * f64::sin(angle))?;
            let s = lemma21_ratios(&f, k)?;
            writeln!(
                w,
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                s.k.re(),
                s.k.im(),
                s.i1,
                s.i2,
                s.ratio1,
                s.ratio2
            )?;
        }
    }

    writeln!(w, "# section=mu_lower")?;
    writeln!(w, "k,k_ref,mu")?;
    let k_ref = 10.0;
    for k in 1..=50 {
        let k = k as f64;
        writeln!(w, "{:.12e},{:.12e},{:.12e}", k, k_ref, mu_lower(k, k_ref)?)?;
    }

    writeln!(w, "# section=tail_ratio")?;
    writeln!(w, "k,tail,ratio")?;
    for k in [5.0, 10.0, 20.0, 40.0, 80.0] {
        writeln!(
            w,
            "{:.12e},{:.12e},{:.12e}",
            k,
            truncation_tail(&f, k),
            tail_ratio(&f, k)?
        )?;
    }

    writeln!(w, "# section=lemma24")?;
    writeln!(w, "alpha,lhs_left,lhs_right,rhs_left,rhs_right")?;
    for alpha in [0.5, 1.0, 2.0, 4.0] {
        let (lhs_left, lhs_right, rhs_left, rhs_right) = lemma24_diagnostic(&f, alpha);
        writeln!(
            w,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            alpha, lhs_left, lhs_right, rhs_left, rhs_right
        )?;
    }

    w.flush()?;
    eprintln!("diagnose {}: 4 sections -> {}", fixture.id(), out.display());
    Ok(())
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Forward { fixture, k, n, out } => run_forward(fixture, k, n, &out),
        Cmd::Boundary {
            fixture,
            kmax,
            dalpha,
            out,
        } => run_boundary(fixture, kmax, dalpha, &out),
        Cmd::Reconstruct {
            fixture,
            kmax,
            noise,
            seed,
            out,
        } => run_reconstruct(fixture, kmax, noise, seed, &out),
        Cmd::Scan { config, out } => run_scan(&config, &out),
        Cmd::Diagnose { fixture, out } => run_diagnose(fixture, &out),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.cmd) {
        eprintln!("error: {e}");
        std::process::exit(3);
    }
}
