//! Data-level functionals, the split frequency, the assembled stability
//! bound, and the sector diagnostics behind it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward_model::{BoundaryDataset, ComplexFrequency, HalfSplit};
use crate::grid_core::{h1_norm_sq, l2_norm_sq, m_constant, SourceFunction};
use crate::spectral_inverse::{truncation_tail, TailSteps, TailTable, TAIL_STEPS_DEFAULT};

/// Frequency-weighted energy of one endpoint's data on alphas[0..=upto]:
/// trapezoid over the samples plus a nonnegative linear closure of the
/// missing sliver [0, alpha_1].
fn side_energy(g: &dyn Fn(usize) -> f64, alphas: &[f64], upto: usize) -> f64 {
    let mut acc = 0.0;
    for i in 0..upto {
        acc += (g(i) + g(i + 1)) * (alphas[i + 1] - alphas[i]) / 2.0;
    }
    let g0 = g(0);
    let g1 = if alphas.len() > 1 { g(1) } else { g0 };
    let gz = (2.0 * g0 - g1).max(0.0);
    acc + alphas[0] * (gz + g0) / 2.0
}

fn i_pair(data: &BoundaryDataset, upto: usize) -> (f64, f64) {
    let alphas = data.freqs().alphas();
    let gl = |i: usize| data.alpha_u_left()[i].norm_sqr();
    let gr = |i: usize| data.alpha_u_right()[i].norm_sqr();
    (
        side_energy(&gl, alphas, upto),
        side_energy(&gr, alphas, upto),
    )
}

/// Squared data level: integral over the full band of
/// alpha^2 (|u(-1)|^2 + |u(1)|^2).
pub fn epsilon_sq(data: &BoundaryDataset) -> f64 {
    let (a, b) = i_pair(data, data.freqs().len() - 1);
    a + b
}

/// The two endpoint energies integrated only up to k <= K_max.
pub fn i1_i2(data: &BoundaryDataset, k: f64) -> Result<(f64, f64)> {
    let k_max = data.k_max();
    if !(k > 0.0) || k > k_max + 1e-12 {
        return Err(Error::OutsideBand { k, k_max });
    }
    let alphas = data.freqs().alphas();
    let upto = alphas.partition_point(|&a| a <= k + 1e-12);
    if upto == 0 {
        // k below the first sample: integrate the linear closure on [0, k]
        let gl = |i: usize| data.alpha_u_left()[i].norm_sqr();
        let gr = |i: usize| data.alpha_u_right()[i].norm_sqr();
        let part = |g: &dyn Fn(usize) -> f64| {
            let g0 = g(0);
            let g1 = if alphas.len() > 1 { g(1) } else { g0 };
            let gz = (2.0 * g0 - g1).max(0.0);
            let gk = gz + (g0 - gz) * k / alphas[0];
            k * (gz + gk) / 2.0
        };
        return Ok((part(&gl), part(&gr)));
    }
    Ok(i_pair(data, upto - 1))
}

/// Endpoint energies for a wave number anywhere in the sector, computed from
/// the source itself: I_j(k) = k * integral over s in [0,1] of |inner_j(ks)|^2
/// with the half-interval inner integrals. Trapezoid in s with n_s nodes.
pub fn i_complex(
    f: &SourceFunction,
    k: ComplexFrequency,
    n_s: usize,
) -> (Complex64, Complex64) {
    assert!(n_s >= 33, "need at least 33 quadrature nodes in s, got {n_s}");
    let half = HalfSplit::new(f);
    let kc = k.as_complex();
    let denom = (n_s - 1) as f64;
    let mut acc1 = 0.0;
    let mut acc2 = 0.0;
    for idx in 0..n_s {
        let s = idx as f64 / denom;
        let w = if idx == 0 || idx == n_s - 1 { 0.5 } else { 1.0 };
        let (in1, in2) = half.inners(kc * s);
        acc1 += w * in1.norm_sqr();
        acc2 += w * in2.norm_sqr();
    }
    let ds = 1.0 / denom;
    (kc * (acc1 * ds), kc * (acc2 * ds))
}

/// One sector sample: endpoint energies at k and their size relative to the
/// growth envelope |k| ||f||^2 e^{2 |Im k|}.
#[derive(Debug, Clone, Copy)]
pub struct SectorSample {
    pub k: ComplexFrequency,
    pub i1: f64,
    pub i2: f64,
    pub ratio1: f64,
    pub ratio2: f64,
}

pub fn lemma21_ratios(f: &SourceFunction, k: ComplexFrequency) -> Result<SectorSample> {
    let l2 = l2_norm_sq(f);
    if l2 == 0.0 {
        return Err(Error::ZeroSource);
    }
    let (c1, c2) = i_complex(f, k, 513);
    let denom = k.as_complex().norm() * l2 * (2.0 * k.im().abs()).exp();
    let i1 = c1.norm();
    let i2 = c2.norm();
    Ok(SectorSample {
        k,
        i1,
        i2,
        ratio1: i1 / denom,
        ratio2: i2 / denom,
    })
}

/// Larger of the two endpoint energies damped by e^{-2k}, normalized by the
/// squared a-priori constant.
pub fn weighted_i_ratio(f: &SourceFunction, k: ComplexFrequency) -> Result<f64> {
    if l2_norm_sq(f) == 0.0 {
        return Err(Error::ZeroSource);
    }
    let m = m_constant(f);
    let damp = (-2.0 * k.as_complex()).exp();
    let (c1, c2) = i_complex(f, k, 513);
    Ok((c1 * damp).norm().max((c2 * damp).norm()) / (m * m))
}

/// Lower bound for the harmonic-measure factor: 1/2 up to the branch point
/// 2^{1/4} K, then (1/pi) ((k/K)^4 - 1)^{-1/2}.
pub fn mu_lower(k: f64, k_ref: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonPositive {
            name: "k",
            value: k,
        });
    }
    if !(k_ref > 0.0) {
        return Err(Error::NonPositive {
            name: "k_ref",
            value: k_ref,
        });
    }
    let branch = std::f64::consts::SQRT_2.sqrt() * k_ref;
    if k <= branch {
        Ok(0.5)
    } else {
        let r = k / k_ref;
        Ok(1.0 / (std::f64::consts::PI * (r.powi(4) - 1.0).sqrt()))
    }
}

/// Frequency splitting the low band from the high band: K^{2/3} E^{1/4} when
/// the data exponent E is large enough for that to exceed K, otherwise K.
pub fn split_frequency(k_max: f64, e_exponent: f64) -> Result<f64> {
    if !(k_max > 1.0) {
        return Err(Error::CutoffNotAboveOne(k_max));
    }
    let quarter = e_exponent.powf(0.25);
    if e_exponent > 0.0 && std::f64::consts::SQRT_2.sqrt() * k_max.powf(1.0 / 3.0) < quarter {
        Ok(k_max.powf(2.0 / 3.0) * quarter)
    } else {
        Ok(k_max)
    }
}

/// Right-hand side of the stability estimate with unit constant: the data
/// term plus M^2 / (1 + K^{2/3} E^{1/4}), E = -(1/2) ln eps_sq clamped to
/// [0, -ln(1e-300)/2]. eps_sq = 0 collapses the bound to 0; callers treat
/// that as the degenerate noise-free-zero case.
pub fn bound_rhs(eps_sq: f64, k_max: f64, m_bound: f64) -> Result<f64> {
    if eps_sq < 0.0 {
        return Err(Error::NegativeDataLevel(eps_sq));
    }
    if !(k_max > 1.0) {
        return Err(Error::CutoffNotAboveOne(k_max));
    }
    if m_bound < 1.0 {
        return Err(Error::BoundBelowOne(m_bound));
    }
    if eps_sq == 0.0 {
        return Ok(0.0);
    }
    let e = (-0.5 * eps_sq.max(1e-300).ln()).max(0.0);
    Ok(eps_sq + m_bound * m_bound / (1.0 + k_max.powf(2.0 / 3.0) * e.powf(0.25)))
}

/// High-frequency behavior of one resolution step of the bound:
/// M^2 / (K^2 E^{3/2} (1 - (5 pi / 2) E^{-1/4})^3), valid only deep in the
/// regime where E^{1/4} dominates both 4 pi and 2^{1/4} K^{1/3}.
pub fn high_freq_step_bound(k_max: f64, e_exponent: f64, m_bound: f64) -> Result<f64> {
    if !(k_max > 1.0) {
        return Err(Error::CutoffNotAboveOne(k_max));
    }
    if m_bound < 1.0 {
        return Err(Error::BoundBelowOne(m_bound));
    }
    let quarter = if e_exponent > 0.0 {
        e_exponent.powf(0.25)
    } else {
        0.0
    };
    if quarter <= 4.0 * std::f64::consts::PI {
        return Err(Error::BranchUnavailable(
            "data exponent too small for the high-frequency expansion",
        ));
    }
    if std::f64::consts::SQRT_2.sqrt() * k_max.powf(1.0 / 3.0) >= quarter {
        return Err(Error::BranchUnavailable(
            "cutoff too large relative to the data exponent",
        ));
    }
    let correction = 1.0 - 2.5 * std::f64::consts::PI / quarter;
    Ok(m_bound * m_bound
        / (k_max * k_max * e_exponent.powf(1.5) * correction.powi(3)))
}

/// Certified spectral tail rescaled by k and the squared H1 norm.
pub fn tail_ratio(f: &SourceFunction, k: f64) -> Result<f64> {
    tail_ratio_with(f, k, &TAIL_STEPS_DEFAULT)
}

pub fn tail_ratio_with(f: &SourceFunction, k: f64, steps: &TailSteps) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::NonPositive {
            name: "k",
            value: k,
        });
    }
    let h1 = h1_norm_sq(f);
    if h1 == 0.0 {
        return Err(Error::ZeroSource);
    }
    Ok(TailTable::build(f, steps).certified(k) * k / h1)
}

/// Diagonal-ray diagnostic: squared endpoint products at k = (1+i) alpha
/// against the squared exponential moments of the two half-sources.
pub fn lemma24_diagnostic(f: &SourceFunction, alpha: f64) -> (f64, f64, f64, f64) {
    assert!(alpha > 0.0, "alpha must be positive, got {alpha}");
    let k = ComplexFrequency::diagonal(alpha).unwrap();
    let u = crate::forward_model::forward_solve(f, k, &[-1.0, 1.0]);
    let a2 = alpha * alpha;
    let lhs_left = a2 * u[0].norm_sqr();
    let lhs_right = a2 * u[1].norm_sqr();

    let half = HalfSplit::new(f);
    let wl: Vec<Complex64> = half
        .left_nodes
        .iter()
        .zip(&half.left_vals)
        .map(|(&y, &v)| (2.0 * alpha * y).exp() * v)
        .collect();
    let wr: Vec<Complex64> = half
        .right_nodes
        .iter()
        .zip(&half.right_vals)
        .map(|(&y, &v)| (2.0 * alpha * y).exp() * v)
        .collect();
    let rhs_left = crate::grid_core::uniform_quad(&wl, half.h).norm_sqr();
    let rhs_right = crate::grid_core::uniform_quad(&wr, half.h).norm_sqr();
    (lhs_left, lhs_right, rhs_left, rhs_right)
}

/// Everything the stability estimate needs about one dataset, in one place.
#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub epsilon_sq: f64,
    pub neg_log_eps: f64,
    pub m_bound: f64,
    pub k_max: f64,
    pub k_star: f64,
    pub bound_rhs_unit_c: f64,
    pub tail_at_kstar: f64,
    pub i_at_kstar: f64,
    pub recon_error_sq: Option<f64>,
}

pub fn assemble_report(
    f: &SourceFunction,
    data: &BoundaryDataset,
    recon_error_sq: Option<f64>,
) -> Result<StabilityReport> {
    let k_max = data.k_max();
    let eps = epsilon_sq(data);
    let neg_log_eps = -0.5 * eps.max(1e-300).ln();
    let m = m_constant(f);
    let k_star = split_frequency(k_max, neg_log_eps)?;
    let bound = bound_rhs(eps, k_max, m)?;
    let tail = truncation_tail(f, k_star);
    let (c1, c2) = i_complex(f, ComplexFrequency::real(k_star)?, 513);
    Ok(StabilityReport {
        epsilon_sq: eps,
        neg_log_eps,
        m_bound: m,
        k_max,
        k_star,
        bound_rhs_unit_c: bound,
        tail_at_kstar: tail,
        i_at_kstar: (c1 + c2).re,
        recon_error_sq,
    })
}
