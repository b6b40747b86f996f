//! Batch experiment runner: scenarios in, one CSV row per (scenario, K) out.
//! Everything is seeded, so two runs of the same config are byte-identical.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::forward_model::{boundary_data, BoundaryDataset};
use crate::grid_core::{l2_distance_sq, m_constant, make_grid, FrequencyGrid};
use crate::rng::SplitMix64;
use crate::spectral_inverse::{
    fourier_from_boundary, reconstruct_bandlimited, TailTable, TAIL_STEPS_DEFAULT,
};
use crate::stability_analysis::{bound_rhs, epsilon_sq, split_frequency};

pub const DEFAULT_DALPHA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub fixture: String,
    pub n_nodes: usize,
    pub k_ladder: Vec<f64>,
    pub noise_level: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub scenario: String,
    pub k_max: f64,
    pub epsilon_sq: f64,
    pub neg_log_eps: f64,
    pub m_bound: f64,
    pub k_star: f64,
    pub bound_rhs: f64,
    pub recon_error_sq: f64,
    pub tail: f64,
    pub ratio: f64,
}

/// Complex Gaussian noise on the endpoint products, scaled relative to the
/// largest product magnitude in the dataset. delta = 0 returns a bitwise
/// identical copy; the field values are re-derived from the noisy products.
pub fn add_noise(data: &BoundaryDataset, delta: f64, seed: u64) -> BoundaryDataset {
    assert!(delta >= 0.0, "noise level must be nonnegative, got {delta}");
    if delta == 0.0 {
        return data.clone();
    }
    let peak = data
        .alpha_u_left()
        .iter()
        .chain(data.alpha_u_right())
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    let sigma = delta * peak;
    let mut rng = SplitMix64::new(seed);
    let mut left = data.alpha_u_left().to_vec();
    let mut right = data.alpha_u_right().to_vec();
    for i in 0..left.len() {
        let (a, b) = rng.next_gaussian_pair();
        left[i] += sigma * Complex64::new(a, b);
        let (c, d) = rng.next_gaussian_pair();
        right[i] += sigma * Complex64::new(c, d);
    }
    BoundaryDataset::from_products(data.freqs().clone(), left, right).unwrap()
}

fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::BadLadder);
    }
    for (i, &k) in ladder.iter().enumerate() {
        if !(k > 1.0) || !k.is_finite() {
            return Err(Error::BadLadder);
        }
        if i > 0 && !(k > ladder[i - 1]) {
            return Err(Error::BadLadder);
        }
    }
    Ok(())
}

pub fn run_scenario(s: &Scenario) -> Result<Vec<ScanRow>> {
    run_scenario_with(s, DEFAULT_DALPHA)
}

/// Same pipeline with an explicit frequency spacing, for refinement studies.
pub fn run_scenario_with(s: &Scenario, dalpha: f64) -> Result<Vec<ScanRow>> {
    let fixture = Fixture::from_id(&s.fixture)?;
    validate_ladder(&s.k_ladder)?;
    let grid = make_grid(s.n_nodes)?;
    let f = fixture.sample(&grid);
    let m = m_constant(&f);
    let table = TailTable::build(&f, &TAIL_STEPS_DEFAULT);
    let mut seeder = SplitMix64::new(s.seed);
    let mut rows = Vec::with_capacity(s.k_ladder.len());
    for &k_max in &s.k_ladder {
        let sub_seed = seeder.next_u64();
        let freqs = FrequencyGrid::uniform(k_max, dalpha)?;
        let clean = boundary_data(&f, &freqs);
        let clean_eps = epsilon_sq(&clean);
        let data = add_noise(&clean, s.noise_level, sub_seed);
        let eps = epsilon_sq(&data);
        if s.noise_level > 0.0 && clean_eps > 0.0 && eps > 2.0 * clean_eps {
            eprintln!(
                "scenario {} K={k_max}: noise dominates the data level \
                 (eps_sq {eps:.3e} vs clean {clean_eps:.3e})",
                s.name
            );
        }
        let neg_log_eps = -0.5 * eps.max(1e-300).ln();
        let k_star = split_frequency(k_max, neg_log_eps)?;
        let bound = bound_rhs(eps, k_max, m)?;
        let sd = fourier_from_boundary(&data);
        let rec = reconstruct_bandlimited(&sd, &grid)?;
        let err_sq = l2_distance_sq(&rec.f_rec, &f);
        let ratio = if bound > 0.0 {
            err_sq / bound
        } else {
            eprintln!(
                "scenario {} K={k_max}: degenerate zero bound, ratio set to 0",
                s.name
            );
            0.0
        };
        rows.push(ScanRow {
            scenario: s.name.clone(),
            k_max,
            epsilon_sq: eps,
            neg_log_eps,
            m_bound: m,
            k_star,
            bound_rhs: bound,
            recon_error_sq: err_sq,
            tail: table.certified(k_max),
            ratio,
        });
    }
    Ok(rows)
}

pub const SCAN_CSV_HEADER: &str =
    "scenario,K,epsilon_sq,E,M,k_star,bound_rhs,recon_error_sq,tail,ratio";

pub fn emit_csv(rows: &[ScanRow], path: &Path) -> Result<()> {
    assert!(!rows.is_empty(), "refusing to write an empty scan");
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    writeln!(out, "{SCAN_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            r.scenario,
            r.k_max,
            r.epsilon_sq,
            r.neg_log_eps,
            r.m_bound,
            r.k_star,
            r.bound_rhs,
            r.recon_error_sq,
            r.tail,
            r.ratio
        )?;
    }
    out.flush()?;
    Ok(())
}

/// Key = value stanzas separated by blank lines; '#' lines are comments.
/// Every stanza needs exactly the six scenario keys.
pub fn parse_config(text: &str) -> Result<Vec<Scenario>> {
    let mut stanzas: Vec<Vec<&str>> = Vec::new();
    let mut cur: Vec<&str> = Vec::new();
    for raw in text.lines() {
        let line = raw.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !cur.is_empty() {
                stanzas.push(std::mem::take(&mut cur));
            }
            continue;
        }
        cur.push(line);
    }
    if !cur.is_empty() {
        stanzas.push(cur);
    }
    if stanzas.is_empty() {
        return Err(Error::Config {
            stanza: 0,
            message: "no scenario stanzas found".to_string(),
        });
    }

    let mut scenarios = Vec::with_capacity(stanzas.len());
    for (idx, lines) in stanzas.iter().enumerate() {
        let stanza = idx + 1;
        let fail = |message: String| Error::Config { stanza, message };
        let mut name: Option<String> = None;
        let mut fixture: Option<String> = None;
        let mut n_nodes: Option<usize> = None;
        let mut k_ladder: Option<Vec<f64>> = None;
        let mut noise_level: Option<f64> = None;
        let mut seed: Option<u64> = None;
        for line in lines {
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| fail(format!("expected key = value, got '{line}'")))?;
            let key = key.trim();
            let value = value.trim();
            let dup = |k: &str| fail(format!("duplicate key '{k}'"));
            match key {
                "name" => {
                    if name.replace(value.to_string()).is_some() {
                        return Err(dup(key));
                    }
                }
                "fixture" => {
                    if fixture.replace(value.to_string()).is_some() {
                        return Err(dup(key));
                    }
                }
                "n_nodes" => {
                    let v: usize = value
                        .parse()
                        .map_err(|_| fail(format!("bad n_nodes '{value}'")))?;
                    if n_nodes.replace(v).is_some() {
                        return Err(dup(key));
                    }
                }
                "K_ladder" => {
                    let mut ladder = Vec::new();
                    for part in value.split(',') {
                        let v: f64 = part
                            .trim()
                            .parse()
                            .map_err(|_| fail(format!("bad K_ladder entry '{part}'")))?;
                        ladder.push(v);
                    }
                    if k_ladder.replace(ladder).is_some() {
                        return Err(dup(key));
                    }
                }
                "noise_level" => {
                    let v: f64 = value
                        .parse()
                        .map_err(|_| fail(format!("bad noise_level '{value}'")))?;
                    if noise_level.replace(v).is_some() {
                        return Err(dup(key));
                    }
                }
                "seed" => {
                    let v: u64 = value
                        .parse()
                        .map_err(|_| fail(format!("bad seed '{value}'")))?;
                    if seed.replace(v).is_some() {
                        return Err(dup(key));
                    }
                }
                _ => return Err(fail(format!("unknown key '{key}'"))),
            }
        }
        let name = name.ok_or_else(|| fail("missing key 'name'".into()))?;
        let fixture = fixture.ok_or_else(|| fail("missing key 'fixture'".into()))?;
        let n_nodes = n_nodes.ok_or_else(|| fail("missing key 'n_nodes'".into()))?;
        let k_ladder = k_ladder.ok_or_else(|| fail("missing key 'K_ladder'".into()))?;
        let noise_level = noise_level.ok_or_else(|| fail("missing key 'noise_level'".into()))?;
        let seed = seed.ok_or_else(|| fail("missing key 'seed'".into()))?;

        if name.is_empty() || name.contains(',') {
            return Err(fail(format!("scenario name '{name}' must be nonempty, no commas")));
        }
        Fixture::from_id(&fixture).map_err(|e| fail(e.to_string()))?;
        if n_nodes < 3 || n_nodes % 2 == 0 {
            return Err(fail(format!("n_nodes must be odd and >= 3, got {n_nodes}")));
        }
        validate_ladder(&k_ladder).map_err(|e| fail(e.to_string()))?;
        if !(noise_level >= 0.0) || !noise_level.is_finite() {
            return Err(fail(format!("noise_level must be finite and >= 0, got {noise_level}")));
        }
        scenarios.push(Scenario {
            name,
            fixture,
            n_nodes,
            k_ladder,
            noise_level,
            seed,
        });
    }
    Ok(scenarios)
}
