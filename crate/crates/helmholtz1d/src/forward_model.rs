//! Forward map from a compactly supported source to its outgoing wave field,
//! plus the two-endpoint measurement pipeline used by the inverse side.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_core::{integrate, uniform_quad, FrequencyGrid, Grid, SourceFunction};

/// Wave number in the sector |Im k| < Re k. The closed diagonal Im k = Re k
/// is reachable only through `diagonal`, which some diagnostics require.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexFrequency {
    re: f64,
    im: f64,
}

impl ComplexFrequency {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if im.abs() < re {
            Ok(ComplexFrequency { re, im })
        } else {
            Err(Error::OutsideSector { re, im })
        }
    }

    pub fn real(k: f64) -> Result<Self> {
        Self::new(k, 0.0)
    }

    /// k = alpha (1 + i), the 45-degree ray; alpha must be positive.
    pub fn diagonal(alpha: f64) -> Result<Self> {
        if alpha > 0.0 {
            Ok(ComplexFrequency {
                re: alpha,
                im: alpha,
            })
        } else {
            Err(Error::NonPositive {
                name: "alpha",
                value: alpha,
            })
        }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Outgoing kernel (i/2) e^{ik|x-y|} / k.
pub fn green(k: ComplexFrequency, x: f64, y: f64) -> Complex64 {
    let kc = k.as_complex();
    Complex64::i() / (2.0 * kc) * (Complex64::i() * kc * (x - y).abs()).exp()
}

/// Cumulative integral of uniformly sampled values: out[j] holds the integral
/// from the first node to node j. Third-degree interpolatory rules per panel,
/// so the result is exact for cubics.
fn cum_cubic(g: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = g.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return c;
    }
    if n == 2 {
        c[1] = (g[0] + g[1]) * (h / 2.0);
        return c;
    }
    if n == 3 {
        c[1] = (5.0 * g[0] + 8.0 * g[1] - g[2]) * (h / 12.0);
        c[2] = c[1] + (-g[0] + 8.0 * g[1] + 5.0 * g[2]) * (h / 12.0);
        return c;
    }
    let q = h / 24.0;
    c[1] = (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]) * q;
    for j in 1..n - 2 {
        c[j + 1] = c[j] + (-g[j - 1] + 13.0 * g[j] + 13.0 * g[j + 1] - g[j + 2]) * q;
    }
    c[n - 1] = c[n - 2] + (g[n - 4] - 5.0 * g[n - 3] + 19.0 * g[n - 2] + 9.0 * g[n - 1]) * q;
    c
}

/// Cubic Lagrange interpolation of grid samples at an arbitrary point, using
/// the four nodes around it (clamped at the ends; quadratic when n = 3).
pub(crate) fn cubic_interp(values: &[Complex64], grid: &Grid, x: f64) -> Complex64 {
    let n = grid.n_nodes();
    let nodes = grid.nodes();
    let h = grid.spacing();
    if n == 3 {
        let t = (x + 1.0) / h;
        let l0 = (t - 1.0) * (t - 2.0) / 2.0;
        let l1 = t * (2.0 - t);
        let l2 = t * (t - 1.0) / 2.0;
        return l0 * values[0] + l1 * values[1] + l2 * values[2];
    }
    let j = (((x + 1.0) / h).floor().max(0.0) as usize).min(n - 2);
    let i0 = (j.max(1) - 1).min(n - 4);
    let t = (x - nodes[i0]) / h;
    let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    l0 * values[i0] + l1 * values[i0 + 1] + l2 * values[i0 + 2] + l3 * values[i0 + 3]
}

/// Precomputed state for evaluating u = (i/2k) [e^{ikx} L(x) + e^{-ikx} R(x)],
/// where L and R integrate e^{-iky} f and e^{+iky} f up to and beyond x. The
/// kernel kink at y = x never crosses a quadrature panel this way.
struct FieldEvaluator<'a> {
    f: &'a SourceFunction,
    kc: Complex64,
    g_minus: Vec<Complex64>,
    g_plus: Vec<Complex64>,
    cum_minus: Vec<Complex64>,
    cum_plus: Vec<Complex64>,
}

impl<'a> FieldEvaluator<'a> {
    fn new(f: &'a SourceFunction, k: ComplexFrequency) -> Self {
        let kc = k.as_complex();
        let nodes = f.grid().nodes();
        let g_minus: Vec<Complex64> = nodes
            .iter()
            .zip(f.values())
            .map(|(&y, &v)| (-Complex64::i() * kc * y).exp() * v)
            .collect();
        let g_plus: Vec<Complex64> = nodes
            .iter()
            .zip(f.values())
            .map(|(&y, &v)| (Complex64::i() * kc * y).exp() * v)
            .collect();
        let h = f.grid().spacing();
        let cum_minus = cum_cubic(&g_minus, h);
        let cum_plus = cum_cubic(&g_plus, h);
        FieldEvaluator {
            f,
            kc,
            g_minus,
            g_plus,
            cum_minus,
            cum_plus,
        }
    }

    /// Plain Simpson against the kernel; only valid when the kink at y = x
    /// sits at an interval endpoint, i.e. x = -1 or x = 1.
    fn eval_at_endpoint(&self, x: f64) -> Complex64 {
        let vals: Vec<Complex64> = self
            .f
            .grid()
            .nodes()
            .iter()
            .zip(self.f.values())
            .map(|(&y, &v)| (Complex64::i() * self.kc * (x - y).abs()).exp() * v)
            .collect();
        let integral = integrate(&vals, self.f.grid()).unwrap();
        Complex64::i() / (2.0 * self.kc) * integral
    }

    fn eval(&self, x: f64) -> Complex64 {
        debug_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&x));
        if (x - 1.0).abs() <= 1e-14 {
            return self.eval_at_endpoint(1.0);
        }
        if (x + 1.0).abs() <= 1e-14 {
            return self.eval_at_endpoint(-1.0);
        }
        let grid = self.f.grid();
        let n = grid.n_nodes();
        let h = grid.spacing();
        let nodes = grid.nodes();
        let j = (((x + 1.0) / h).floor().max(0.0) as usize).min(n - 2);
        let t = (x - nodes[j]) / h;

        let (left, right) = if t.abs() < 1e-14 {
            (self.cum_minus[j], self.cum_plus[n - 1] - self.cum_plus[j])
        } else {
            // partial panel [nodes[j], x] by a 3-point rule on interpolated samples
            let w = x - nodes[j];
            let xm = nodes[j] + 0.5 * w;
            let l = self.cum_minus[j]
                + (self.g_minus[j]
                    + 4.0 * cubic_interp(&self.g_minus, grid, xm)
                    + cubic_interp(&self.g_minus, grid, x))
                    * (w / 6.0);
            // and [x, nodes[j+1]] for the right-going part
            let w2 = nodes[j + 1] - x;
            let xm2 = x + 0.5 * w2;
            let r = (self.cum_plus[n - 1] - self.cum_plus[j + 1])
                + (cubic_interp(&self.g_plus, grid, x)
                    + 4.0 * cubic_interp(&self.g_plus, grid, xm2)
                    + self.g_plus[j + 1])
                    * (w2 / 6.0);
            (l, r)
        };

        let eikx = (Complex64::i() * self.kc * x).exp();
        Complex64::i() / (2.0 * self.kc) * (eikx * left + right / eikx)
    }
}

/// Field radiated by the source, evaluated at the given points in [-1, 1].
/// Positivity of Re k is carried by the `ComplexFrequency` invariant.
pub fn forward_solve(f: &SourceFunction, k: ComplexFrequency, eval_points: &[f64]) -> Vec<Complex64> {
    let ev = FieldEvaluator::new(f, k);
    eval_points.iter().map(|&x| ev.eval(x)).collect()
}

/// Two-endpoint measurements over a frequency grid. Both the field values and
/// the frequency-scaled products alpha * u are stored; the inverse pipeline
/// consumes the products, so they are kept exact rather than re-multiplied.
#[derive(Debug, Clone)]
pub struct BoundaryDataset {
    freqs: FrequencyGrid,
    u_left: Vec<Complex64>,
    u_right: Vec<Complex64>,
    alpha_u_left: Vec<Complex64>,
    alpha_u_right: Vec<Complex64>,
}

impl BoundaryDataset {
    /// Build from the products alpha * u; field values follow by division, so
    /// the product/value consistency invariant holds bit for bit.
    pub fn from_products(
        freqs: FrequencyGrid,
        alpha_u_left: Vec<Complex64>,
        alpha_u_right: Vec<Complex64>,
    ) -> Result<Self> {
        if alpha_u_left.len() != freqs.len() {
            return Err(Error::LengthMismatch {
                got: alpha_u_left.len(),
                want: freqs.len(),
            });
        }
        if alpha_u_right.len() != freqs.len() {
            return Err(Error::LengthMismatch {
                got: alpha_u_right.len(),
                want: freqs.len(),
            });
        }
        let u_left = alpha_u_left
            .iter()
            .zip(freqs.alphas())
            .map(|(p, &a)| p / a)
            .collect();
        let u_right = alpha_u_right
            .iter()
            .zip(freqs.alphas())
            .map(|(p, &a)| p / a)
            .collect();
        Ok(BoundaryDataset {
            freqs,
            u_left,
            u_right,
            alpha_u_left,
            alpha_u_right,
        })
    }

    pub fn freqs(&self) -> &FrequencyGrid {
        &self.freqs
    }

    pub fn k_max(&self) -> f64 {
        self.freqs.k_max()
    }

    pub fn u_left(&self) -> &[Complex64] {
        &self.u_left
    }

    pub fn u_right(&self) -> &[Complex64] {
        &self.u_right
    }

    pub fn alpha_u_left(&self) -> &[Complex64] {
        &self.alpha_u_left
    }

    pub fn alpha_u_right(&self) -> &[Complex64] {
        &self.alpha_u_right
    }
}

/// Measurements at both endpoints across the frequency grid. At x = 1 the
/// product is alpha u = (i/2) integral of e^{i alpha (1-y)} f(y), at x = -1
/// the kernel is e^{i alpha (1+y)}; both reduce to weighted transforms of f,
/// evaluated with Simpson weights and a rotation recurrence in alpha.
pub fn boundary_data(f: &SourceFunction, freqs: &FrequencyGrid) -> BoundaryDataset {
    let grid = f.grid();
    let n = grid.n_nodes();
    let h = grid.spacing();
    let m = freqs.len();
    let alphas = freqs.alphas();
    let step = freqs.k_max() / m as f64;
    let a1 = alphas[0];

    let mut acc_right = vec![Complex64::new(0.0, 0.0); m];
    let mut acc_left = vec![Complex64::new(0.0, 0.0); m];
    for (j, (&y, &v)) in grid.nodes().iter().zip(f.values()).enumerate() {
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        let w = if j == 0 || j == n - 1 {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let wv = w * v;
        let zr = 1.0 - y;
        let zl = 1.0 + y;
        let mut ph_r = Complex64::cis(a1 * zr);
        let mut ph_l = Complex64::cis(a1 * zl);
        let rot_r = Complex64::cis(step * zr);
        let rot_l = Complex64::cis(step * zl);
        for i in 0..m {
            acc_right[i] += wv * ph_r;
            acc_left[i] += wv * ph_l;
            ph_r *= rot_r;
            ph_l *= rot_l;
        }
    }
    let scale = Complex64::i() * (0.5 * h / 3.0);
    let products_right: Vec<Complex64> = acc_right.into_iter().map(|z| z * scale).collect();
    let products_left: Vec<Complex64> = acc_left.into_iter().map(|z| z * scale).collect();
    BoundaryDataset::from_products(freqs.clone(), products_left, products_right).unwrap()
}

/// Source split at the origin: f1 carries the nodes with x > 0, f2 the rest.
/// The node at x = 0 itself goes to f2.
#[derive(Debug, Clone)]
pub struct SplitSource {
    pub f1: SourceFunction,
    pub f2: SourceFunction,
}

pub fn split_source(f: &SourceFunction) -> SplitSource {
    let grid = f.grid();
    let zero = Complex64::new(0.0, 0.0);
    let mut v1 = vec![zero; grid.n_nodes()];
    let mut v2 = vec![zero; grid.n_nodes()];
    for (j, (&x, &v)) in grid.nodes().iter().zip(f.values()).enumerate() {
        if x > 0.0 {
            v1[j] = v;
        } else {
            v2[j] = v;
        }
    }
    let (a, b) = f.support();
    let f1 = SourceFunction::new(grid.clone(), v1, (a.max(0.0), b.max(0.0))).unwrap();
    let f2 = SourceFunction::new(grid.clone(), v2, (a.min(0.0), b.min(0.0))).unwrap();
    SplitSource { f1, f2 }
}

/// Residual check for the field: max interior defect of u'' + k^2 u + f on a
/// fresh evaluation grid, and the worse of the two radiation defects
/// u'(1) - i k u(1), u'(-1) + i k u(-1). Second-order inside, fourth-order
/// one-sided stencils at the ends.
pub fn ode_residual(f: &SourceFunction, k: ComplexFrequency, n_check: usize) -> (f64, f64) {
    assert!(n_check >= 5, "need at least 5 check nodes, got {n_check}");
    let denom = (n_check - 1) as f64;
    let xs: Vec<f64> = (0..n_check).map(|j| (2 * j) as f64 / denom - 1.0).collect();
    let hc = 2.0 / denom;
    let u = forward_solve(f, k, &xs);
    let k2 = k.as_complex() * k.as_complex();

    let mut interior: f64 = 0.0;
    for j in 1..n_check - 1 {
        let d2 = (u[j - 1] - 2.0 * u[j] + u[j + 1]) / (hc * hc);
        let fx = cubic_interp(f.values(), f.grid(), xs[j]);
        interior = interior.max((d2 + k2 * u[j] + fx).norm());
    }

    let ik = Complex64::i() * k.as_complex();
    let du_l =
        (-25.0 * u[0] + 48.0 * u[1] - 36.0 * u[2] + 16.0 * u[3] - 3.0 * u[4]) / (12.0 * hc);
    let mlast = n_check - 1;
    let du_r = (25.0 * u[mlast] - 48.0 * u[mlast - 1] + 36.0 * u[mlast - 2]
        - 16.0 * u[mlast - 3]
        + 3.0 * u[mlast - 4])
        / (12.0 * hc);
    let bc_l = (du_l + ik * u[0]).norm();
    let bc_r = (du_r - ik * u[mlast]).norm();
    (interior, bc_l.max(bc_r))
}

/// The two half-interval profiles with their sub-grids, shared by the scaled
/// inner integrals below and by the sector diagnostics.
pub(crate) struct HalfSplit {
    pub(crate) left_nodes: Vec<f64>,
    pub(crate) left_vals: Vec<Complex64>,
    pub(crate) right_nodes: Vec<f64>,
    pub(crate) right_vals: Vec<Complex64>,
    pub(crate) h: f64,
}

impl HalfSplit {
    pub(crate) fn new(f: &SourceFunction) -> HalfSplit {
        let split = split_source(f);
        let mid = f.grid().mid_index();
        let nodes = f.grid().nodes();
        HalfSplit {
            left_nodes: nodes[..=mid].to_vec(),
            left_vals: split.f2.values()[..=mid].to_vec(),
            right_nodes: nodes[mid..].to_vec(),
            right_vals: split.f1.values()[mid..].to_vec(),
            h: f.grid().spacing(),
        }
    }

    /// (1/2) integral over [0,1] of e^{i ks (1-y)} f1 and, over [-1,0], of
    /// e^{i ks (-1-y)} f2, for a scaled wave number ks.
    pub(crate) fn inners(&self, ks: Complex64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let vals1: Vec<Complex64> = self
            .right_nodes
            .iter()
            .zip(&self.right_vals)
            .map(|(&y, &v)| (i * ks * (1.0 - y)).exp() * v)
            .collect();
        let vals2: Vec<Complex64> = self
            .left_nodes
            .iter()
            .zip(&self.left_vals)
            .map(|(&y, &v)| (i * ks * (-1.0 - y)).exp() * v)
            .collect();
        (
            0.5 * uniform_quad(&vals1, self.h),
            0.5 * uniform_quad(&vals2, self.h),
        )
    }
}

/// Half-interval inner integrals at scaled wave numbers k*s, one pair per
/// entry of s_values. Each s must lie in (0, 1].
pub fn boundary_data_complex(
    f: &SourceFunction,
    k: ComplexFrequency,
    s_values: &[f64],
) -> Vec<(Complex64, Complex64)> {
    let half = HalfSplit::new(f);
    let kc = k.as_complex();
    s_values
        .iter()
        .map(|&s| {
            assert!(s > 0.0 && s <= 1.0, "scale parameter {s} outside (0, 1]");
            half.inners(kc * s)
        })
        .collect()
}
