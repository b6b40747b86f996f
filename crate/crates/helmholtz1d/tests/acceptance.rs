//! End-to-end checks for the whole pipeline, one test per criterion. Each
//! prints a single PASS/FAIL line; run with --nocapture to see them all.

use std::time::Instant;

use num_complex::Complex64;

use helmholtz1d::experiment_harness::{parse_config, run_scenario, run_scenario_with, Scenario};
use helmholtz1d::fixtures::Fixture;
use helmholtz1d::forward_model::{boundary_data, forward_solve, ode_residual, ComplexFrequency};
use helmholtz1d::grid_core::{integrate, l2_distance_sq, l2_norm_sq, make_grid, FrequencyGrid, Grid, SourceFunction};
use helmholtz1d::rng::SplitMix64;
use helmholtz1d::spectral_inverse::{
    fourier_from_boundary, reconstruct_bandlimited, truncation_tail, TailSteps,
};
use helmholtz1d::stability_analysis::{
    bound_rhs, epsilon_sq, high_freq_step_bound, lemma21_ratios, mu_lower, split_frequency,
    tail_ratio, tail_ratio_with, weighted_i_ratio,
};
use helmholtz1d::Error;

const NONZERO: [Fixture; 5] = [
    Fixture::ConstantPatch,
    Fixture::TriangleHat,
    Fixture::SmoothBump,
    Fixture::TwoBumps,
    Fixture::OddBump,
];

fn recon_error(f: &SourceFunction, grid: &Grid, k_max: f64) -> f64 {
    let freqs = FrequencyGrid::uniform(k_max, 0.05).unwrap();
    let data = boundary_data(f, &freqs);
    let rec = reconstruct_bandlimited(&fourier_from_boundary(&data), grid).unwrap();
    l2_distance_sq(&rec.f_rec, f).sqrt()
}

#[test]
fn c01_forward_residuals_converge() {
    let start = Instant::now();
    let k = ComplexFrequency::real(5.0).unwrap();
    let grid = make_grid(2049).unwrap();
    let f = Fixture::SmoothBump.sample(&grid);
    let f_max = f.values().iter().map(|v| v.norm()).fold(0.0f64, f64::max);

    // residuals sampled on a check grid; the order comes from doubling it up
    // to the target resolution (finer stencils hit the roundoff floor)
    let measure = |n_check: usize| -> (f64, f64) {
        let (interior, bc) = ode_residual(&f, k, n_check);
        let pts: Vec<f64> = (0..n_check)
            .map(|j| -1.0 + 2.0 * j as f64 / (n_check - 1) as f64)
            .collect();
        let u_max = forward_solve(&f, k, &pts)
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max);
        (interior / f_max, bc / u_max)
    };

    let (int1, bc1) = measure(2049);
    let (int2, bc2) = measure(4097);
    let order_int = (int1 / int2).log2();
    let order_bc = (bc1 / bc2).log2();
    let elapsed = start.elapsed().as_secs_f64();

    let pass = int2 <= 1e-3 && bc2 <= 1e-3 && order_int >= 1.9 && order_bc >= 1.9 && elapsed <= 5.0;
    println!(
        "c01 forward-residuals: {} (interior {int2:.3e} order {order_int:.2}, boundary {bc2:.3e} order {order_bc:.2}, {elapsed:.2} s)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(int2 <= 1e-3 && bc2 <= 1e-3, "residuals {int2:e} {bc2:e}");
    assert!(order_int >= 1.9, "interior order {order_int}");
    assert!(order_bc >= 1.9, "boundary order {order_bc}");
    assert!(elapsed <= 5.0, "took {elapsed} s");
}

#[test]
fn c02_band_energy_matches_source_norm() {
    let grid = make_grid(2049).unwrap();
    let mut worst = 0.0f64;
    for fixture in [Fixture::SmoothBump, Fixture::TriangleHat] {
        let f = fixture.sample(&grid);
        let freqs = FrequencyGrid::uniform(200.0, 0.05).unwrap();
        let eps = epsilon_sq(&boundary_data(&f, &freqs));
        let total = eps + truncation_tail(&f, 200.0);
        let target = std::f64::consts::FRAC_PI_2 * l2_norm_sq(&f);
        let rel = (total - target).abs() / target;
        worst = worst.max(rel);
    }
    let pass = worst <= 1e-2;
    println!(
        "c02 band-energy-identity: {} (worst relative defect {worst:.3e})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "defect {worst:e}");
}

#[test]
fn c03_spectrum_matches_direct_quadrature() {
    let grid = make_grid(2049).unwrap();
    let mut worst = 0.0f64;
    for fixture in Fixture::ALL {
        let f = fixture.sample(&grid);
        let freqs = FrequencyGrid::uniform(20.0, 0.05).unwrap();
        let sd = fourier_from_boundary(&boundary_data(&f, &freqs));
        for (&xi, &fh) in sd.xi().iter().zip(sd.fhat()) {
            let vals: Vec<Complex64> = grid
                .nodes()
                .iter()
                .zip(f.values())
                .map(|(&y, &v)| v * Complex64::cis(-xi * y))
                .collect();
            let direct = integrate(&vals, &grid).unwrap();
            worst = worst.max((fh - direct).norm());
        }
    }
    let pass = worst <= 1e-9;
    println!(
        "c03 spectral-inversion-identity: {} (worst absolute defect {worst:.3e})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "defect {worst:e}");
}

#[test]
fn c04_error_decreases_with_band_limit() {
    let grid = make_grid(2049).unwrap();
    let ladder = [5.0, 10.0, 20.0, 40.0, 80.0];

    let mut strict = true;
    let mut hat_ratios = Vec::new();
    for fixture in NONZERO {
        let f = fixture.sample(&grid);
        let errs: Vec<f64> = ladder.iter().map(|&k| recon_error(&f, &grid, k)).collect();
        for w in errs.windows(2) {
            strict &= w[1] < w[0];
        }
        if fixture == Fixture::TriangleHat {
            hat_ratios = errs.windows(2).map(|w| w[1] / w[0]).collect();
        }
    }
    let in_window = hat_ratios.iter().all(|&r| (0.4..=0.75).contains(&r));
    let pass = strict && in_window;
    println!(
        "c04 increasing-stability: {} (strict decrease {strict}, hat ratios {:?} against window [0.40, 0.75])",
        if pass { "PASS" } else { "FAIL" },
        hat_ratios.iter().map(|r| (r * 1e4).round() / 1e4).collect::<Vec<_>>()
    );
    assert!(strict, "error not strictly decreasing in the band limit");
    assert!(
        in_window,
        "hat consecutive error ratios {hat_ratios:?} leave [0.4, 0.75]"
    );
}

#[test]
fn c05_tail_ratio_stays_bounded() {
    let grid = make_grid(2049).unwrap();
    let f = Fixture::TriangleHat.sample(&grid);
    let ks = [5.0, 10.0, 20.0, 40.0, 80.0];
    let ratios: Vec<f64> = ks.iter().map(|&k| tail_ratio(&f, k).unwrap()).collect();
    let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
    let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
    let fine = TailSteps {
        fine: 0.125,
        coarse: 0.5,
        switch_at: 2000.0,
    };
    let max_fine = ks
        .iter()
        .map(|&k| tail_ratio_with(&f, k, &fine).unwrap())
        .fold(f64::MIN, f64::max);
    let drift = (max_fine - max).abs() / max;
    let pass = max.is_finite() && max / min <= 10.0 && drift <= 1e-2;
    println!(
        "c05 tail-ratio-spread: {} (max/min {:.3}, refinement drift {drift:.3e})",
        if pass { "PASS" } else { "FAIL" },
        max / min
    );
    assert!(max.is_finite());
    assert!(max / min <= 10.0, "spread {}", max / min);
    assert!(drift <= 1e-2, "drift {drift:e}");
}

#[test]
fn c06_harmonic_measure_reference_points() {
    let exact_half = mu_lower(1.0, 2.0).unwrap() == 0.5;
    let v = mu_lower(4.0, 1.0).unwrap();
    let reference = (v - 1.0 / (std::f64::consts::PI * 255.0f64.sqrt())).abs() <= 1e-12;
    let branch = std::f64::consts::SQRT_2.sqrt() * 2.0;
    let mut monotone = true;
    let mut prev = f64::INFINITY;
    for j in 0..100 {
        let k = branch * (1.0 + 1e-9) + j as f64 * 0.2;
        let m = mu_lower(k, 2.0).unwrap();
        monotone &= m <= prev;
        prev = m;
    }
    let pass = exact_half && reference && monotone;
    println!(
        "c06 harmonic-measure-floor: {} (exact half {exact_half}, reference point {reference}, monotone {monotone})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn c07_split_frequency_reference_and_gate() {
    let a = split_frequency(2.0, 1e4).unwrap();
    let ref_ok = (a - 2.0f64.powf(2.0 / 3.0) * 10.0).abs() <= 1e-12;
    let plain_ok = split_frequency(100.0, 1.0).unwrap() == 100.0;

    let mut rng = SplitMix64::new(777);
    let mut gate_ok = true;
    for _ in 0..1000 {
        let k = 1.0 + 99.0 * rng.next_uniform();
        let e = 10.0f64.powf(-2.0 + 8.0 * rng.next_uniform());
        let gate = e > 0.0 && std::f64::consts::SQRT_2.sqrt() * k.powf(1.0 / 3.0) < e.powf(0.25);
        let want = if gate { k.powf(2.0 / 3.0) * e.powf(0.25) } else { k };
        gate_ok &= split_frequency(k, e).unwrap() == want;
    }
    gate_ok &= split_frequency(7.0, 0.0).unwrap() == 7.0;
    let pass = ref_ok && plain_ok && gate_ok;
    println!(
        "c07 split-frequency: {} (reference {ref_ok}, plain branch {plain_ok}, gate replay {gate_ok})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn c08_bound_assembly_is_monotone() {
    let v = bound_rhs((-32.0f64).exp(), 8.0, 1.0).unwrap();
    let ref_ok = (v - ((-32.0f64).exp() + 1.0 / 9.0)).abs() <= 1e-12;

    // eps^2 = e^{-2E} couples the two axes the way a shrinking data level does
    let ks: Vec<f64> = (0..50)
        .map(|i| 1.05 * (100.0f64 / 1.05).powf(i as f64 / 49.0))
        .collect();
    let es: Vec<f64> = (0..50)
        .map(|i| 0.5 * (1e6f64 / 0.5).powf(i as f64 / 49.0))
        .collect();
    let eps_of = |e: f64| (-2.0 * e).exp();

    let mut monotone_k = true;
    let mut monotone_e = true;
    let mut high_freq_ok = true;
    for &e in &es {
        let eps = eps_of(e);
        let mut prev = f64::INFINITY;
        for &k in &ks {
            let b = bound_rhs(eps, k, 1.0).unwrap();
            if eps > 0.0 {
                monotone_k &= b < prev;
            } else {
                monotone_k &= b <= prev;
            }
            prev = b;
        }
    }
    for &k in &ks {
        let mut prev = f64::INFINITY;
        for &e in &es {
            let b = bound_rhs(eps_of(e), k, 1.0).unwrap();
            // strictly decreasing until the data level degenerates to the
            // floating-point floor, flat afterwards
            if eps_of(e) >= 1e-300 {
                monotone_e &= b < prev;
            } else {
                monotone_e &= b <= prev;
            }
            prev = b;

            if let Ok(hf) = high_freq_step_bound(k, e, 1.0) {
                high_freq_ok &= hf >= 1.0 / (k * k * e.powf(1.5));
            }
        }
    }
    let pass = ref_ok && monotone_k && monotone_e && high_freq_ok;
    println!(
        "c08 bound-assembly: {} (reference {ref_ok}, monotone in K {monotone_k}, monotone in E {monotone_e}, step floor {high_freq_ok})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn c09_scan_constant_survives_refinement() {
    let cfg_path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default_scan.cfg");
    let text = std::fs::read_to_string(cfg_path).unwrap();
    let scenarios = parse_config(&text).unwrap();

    let start = Instant::now();
    let mut rows = Vec::new();
    for s in &scenarios {
        rows.extend(run_scenario(s).unwrap());
    }
    let elapsed = start.elapsed().as_secs_f64();
    let c_fit = rows.iter().map(|r| r.ratio).fold(0.0f64, f64::max);

    let mut c_ref = 0.0f64;
    for s in &scenarios {
        let refined = Scenario {
            n_nodes: 4097,
            ..s.clone()
        };
        for r in run_scenario_with(&refined, 0.025).unwrap() {
            c_ref = c_ref.max(r.ratio);
        }
    }
    let drift = (c_ref - c_fit).abs() / c_fit;
    let pass = c_fit.is_finite() && c_fit > 0.0 && drift <= 0.10 && elapsed <= 120.0;
    println!(
        "c09 fitted-constant: {} (C_fit {c_fit:.6e}, refined {c_ref:.6e}, drift {:.3}%, suite {elapsed:.1} s)",
        if pass { "PASS" } else { "FAIL" },
        drift * 100.0
    );
    assert!(c_fit.is_finite() && c_fit > 0.0);
    assert!(drift <= 0.10, "drift {drift}");
    assert!(elapsed <= 120.0, "suite took {elapsed} s");
}

#[test]
fn c10_sector_diagnostics_stay_finite() {
    let grid = make_grid(2049).unwrap();
    let mut finite = true;
    let mut decay = true;
    for fixture in NONZERO {
        let f = fixture.sample(&grid);
        for radius in [5.0, 15.0, 30.0, 50.0] {
            for angle in [-0.6, -0.3, 0.0, 0.3, 0.6] {
                let k =
                    ComplexFrequency::new(radius * f64::cos(angle), radius * f64::sin(angle))
                        .unwrap();
                let s = lemma21_ratios(&f, k).unwrap();
                finite &= s.i1.is_finite()
                    && s.i2.is_finite()
                    && s.ratio1.is_finite()
                    && s.ratio2.is_finite();
            }
        }
        let near = weighted_i_ratio(&f, ComplexFrequency::real(5.0).unwrap()).unwrap();
        let far = weighted_i_ratio(&f, ComplexFrequency::real(50.0).unwrap()).unwrap();
        decay &= far < near;
    }
    let zero = Fixture::Zero.sample(&grid);
    let zero_rejected = matches!(
        lemma21_ratios(&zero, ComplexFrequency::real(5.0).unwrap()),
        Err(Error::ZeroSource)
    );
    let pass = finite && decay && zero_rejected;
    println!(
        "c10 sector-diagnostics: {} (finite {finite}, damped decay {decay}, zero source rejected {zero_rejected})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass);
}

#[test]
fn c11_scan_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("two.cfg");
    std::fs::write(
        &cfg,
        "name = first\nfixture = smooth_bump\nn_nodes = 257\nK_ladder = 5, 10\nnoise_level = 1e-3\nseed = 41\n\n\
         name = second\nfixture = odd_bump\nn_nodes = 257\nK_ladder = 5, 10\nnoise_level = 1e-3\nseed = 42\n",
    )
    .unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_helmholtz1d"))
            .args(["scan", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    let lines = a.iter().filter(|&&c| c == b'\n').count();
    let pass = a == b && lines == 5;
    println!(
        "c11 scan-determinism: {} (byte identical {}, {} data rows)",
        if pass { "PASS" } else { "FAIL" },
        a == b,
        lines - 1
    );
    assert!(pass);
}
