//! Uniform spatial grid on [-1, 1], sampled sources, frequency grids, and the
//! quadrature / norm helpers everything else is built on.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const FREQ_SPACING_MAX: f64 = std::f64::consts::PI / 8.0;

/// Uniform grid with an odd number of nodes so a node sits exactly at 0 and
/// composite Simpson applies without a leftover panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_nodes: usize,
    nodes: Vec<f64>,
    spacing: f64,
}

pub fn make_grid(n_nodes: usize) -> Result<Grid> {
    if n_nodes < 3 || n_nodes % 2 == 0 {
        return Err(Error::BadGridSize(n_nodes));
    }
    let denom = (n_nodes - 1) as f64;
    // 2j/(n-1) - 1 lands exactly on -1, 0, 1
    let nodes: Vec<f64> = (0..n_nodes).map(|j| (2 * j) as f64 / denom - 1.0).collect();
    Ok(Grid {
        n_nodes,
        nodes,
        spacing: 2.0 / denom,
    })
}

impl Grid {
    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the middle node (x = 0).
    pub fn mid_index(&self) -> usize {
        (self.n_nodes - 1) / 2
    }
}

/// Composite Simpson over the whole grid.
pub fn integrate(values: &[Complex64], grid: &Grid) -> Result<Complex64> {
    if values.len() != grid.n_nodes {
        return Err(Error::LengthMismatch {
            got: values.len(),
            want: grid.n_nodes,
        });
    }
    let n = grid.n_nodes;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, v) in values.iter().enumerate() {
        let w = if j == 0 || j == n - 1 {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * v;
    }
    Ok(acc * (grid.spacing / 3.0))
}

fn simpson_real(grid: &Grid, g: impl Fn(usize) -> f64) -> f64 {
    let n = grid.n_nodes;
    let mut acc = 0.0;
    for j in 0..n {
        let w = if j == 0 || j == n - 1 {
            1.0
        } else if j % 2 == 1 {
            4.0
        } else {
            2.0
        };
        acc += w * g(j);
    }
    acc * (grid.spacing / 3.0)
}

/// Simpson-type rule for a uniform sub-grid of any length. Odd counts get
/// plain composite Simpson; even counts >= 4 get Simpson plus a trailing 3/8
/// block; two nodes degrade to the trapezoid.
pub(crate) fn uniform_quad(values: &[Complex64], h: f64) -> Complex64 {
    let m = values.len();
    match m {
        0 | 1 => Complex64::new(0.0, 0.0),
        2 => (values[0] + values[1]) * (h / 2.0),
        _ if m % 2 == 1 => {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, v) in values.iter().enumerate() {
                let w = if j == 0 || j == m - 1 {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                acc += w * v;
            }
            acc * (h / 3.0)
        }
        _ => {
            // even >= 4: Simpson over the first m-3 nodes (empty when m == 4),
            // 3/8 rule over the last four
            let head = &values[..m - 3];
            let mut acc = Complex64::new(0.0, 0.0);
            if head.len() >= 3 {
                let mut s = Complex64::new(0.0, 0.0);
                for (j, v) in head.iter().enumerate() {
                    let w = if j == 0 || j == head.len() - 1 {
                        1.0
                    } else if j % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
                    s += w * v;
                }
                acc = s * (h / 3.0);
            }
            let tail = &values[m - 4..];
            acc + (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]) * (3.0 * h / 8.0)
        }
    }
}

/// Complex-valued source sampled on a grid, with its support interval kept
/// alongside. Nodes strictly outside the support are forced to zero.
#[derive(Debug, Clone)]
pub struct SourceFunction {
    grid: Grid,
    values: Vec<Complex64>,
    support: (f64, f64),
}

impl SourceFunction {
    pub fn new(grid: Grid, mut values: Vec<Complex64>, support: (f64, f64)) -> Result<Self> {
        if values.len() != grid.n_nodes {
            return Err(Error::LengthMismatch {
                got: values.len(),
                want: grid.n_nodes,
            });
        }
        let (a, b) = support;
        if !(a <= b) || a < -1.0 || b > 1.0 {
            return Err(Error::BadSupport { a, b });
        }
        for (x, v) in grid.nodes.iter().zip(values.iter_mut()) {
            if *x < a || *x > b {
                *v = Complex64::new(0.0, 0.0);
            }
        }
        Ok(SourceFunction {
            grid,
            values,
            support,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }
}

pub fn l2_norm_sq(f: &SourceFunction) -> f64 {
    simpson_real(&f.grid, |j| f.values[j].norm_sqr())
}

/// Squared H1 norm: L2 part plus the L2 norm of a finite-difference
/// derivative (centered inside, one-sided second order at the ends).
pub fn h1_norm_sq(f: &SourceFunction) -> f64 {
    l2_norm_sq(f) + h1_deriv_sq(f)
}

pub(crate) fn h1_deriv_sq(f: &SourceFunction) -> f64 {
    let d = fd_derivative(&f.values, f.grid.spacing);
    simpson_real(&f.grid, |j| d[j].norm_sqr())
}

pub(crate) fn fd_derivative(v: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = v.len();
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    let two_h = 2.0 * h;
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / two_h;
    for j in 1..n - 1 {
        d[j] = (v[j + 1] - v[j - 1]) / two_h;
    }
    d[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / two_h;
    d
}

/// Max of the squared H1 norm and 1; the a-priori constant used by the
/// stability bounds, which require a value >= 1.
pub fn m_constant(f: &SourceFunction) -> f64 {
    h1_norm_sq(f).max(1.0)
}

/// Squared L2 distance between two sources sampled on grids of equal size.
pub fn l2_distance_sq(a: &SourceFunction, b: &SourceFunction) -> f64 {
    assert_eq!(
        a.grid.n_nodes, b.grid.n_nodes,
        "sources live on different grids"
    );
    simpson_real(&a.grid, |j| (a.values[j] - b.values[j]).norm_sqr())
}

/// Strictly increasing positive frequencies ending exactly at k_max, with
/// spacing capped at pi/8 so the data resolves the band.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid {
    alphas: Vec<f64>,
    k_max: f64,
}

impl FrequencyGrid {
    pub fn uniform(k_max: f64, dalpha: f64) -> Result<Self> {
        if !(k_max > 0.0) {
            return Err(Error::NonPositive {
                name: "k_max",
                value: k_max,
            });
        }
        if !(dalpha > 0.0 && dalpha <= FREQ_SPACING_MAX) {
            return Err(Error::BadSpacing(dalpha));
        }
        let m = (k_max / dalpha).round().max(1.0) as usize;
        let step = k_max / m as f64;
        if step > FREQ_SPACING_MAX {
            return Err(Error::BadSpacing(step));
        }
        let mut alphas: Vec<f64> = (1..=m).map(|j| j as f64 * step).collect();
        // pin the endpoint against accumulated rounding
        *alphas.last_mut().unwrap() = k_max;
        Ok(FrequencyGrid { alphas, k_max })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn len(&self) -> usize {
        self.alphas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alphas.is_empty()
    }
}
