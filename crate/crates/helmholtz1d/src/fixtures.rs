//! The source profiles used by tests, experiments, and the CLI. All are real
//! valued and supported strictly inside (-1, 1).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid_core::{Grid, SourceFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fixture {
    Zero,
    ConstantPatch,
    TriangleHat,
    SmoothBump,
    TwoBumps,
    OddBump,
}

/// C-infinity bump centered at c with half-width w, zero outside |x-c| < w.
fn bump(x: f64, c: f64, w: f64) -> f64 {
    let t = (x - c) / w;
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

impl Fixture {
    pub const ALL: [Fixture; 6] = [
        Fixture::Zero,
        Fixture::ConstantPatch,
        Fixture::TriangleHat,
        Fixture::SmoothBump,
        Fixture::TwoBumps,
        Fixture::OddBump,
    ];

    pub fn from_id(id: &str) -> Result<Fixture> {
        match id {
            "zero" => Ok(Fixture::Zero),
            "constant_patch" => Ok(Fixture::ConstantPatch),
            "triangle_hat" => Ok(Fixture::TriangleHat),
            "smooth_bump" => Ok(Fixture::SmoothBump),
            "two_bumps" => Ok(Fixture::TwoBumps),
            "odd_bump" => Ok(Fixture::OddBump),
            _ => Err(Error::UnknownFixture(id.to_string())),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            Fixture::Zero => "zero",
            Fixture::ConstantPatch => "constant_patch",
            Fixture::TriangleHat => "triangle_hat",
            Fixture::SmoothBump => "smooth_bump",
            Fixture::TwoBumps => "two_bumps",
            Fixture::OddBump => "odd_bump",
        }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Fixture::Zero => (-0.5, 0.5),
            Fixture::ConstantPatch => (-0.25, 0.5),
            Fixture::TriangleHat => (-0.5, 0.5),
            Fixture::SmoothBump => (-0.5, 0.5),
            Fixture::TwoBumps => (-0.7, 0.7),
            Fixture::OddBump => (-0.65, 0.65),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Fixture::Zero => 0.0,
            Fixture::ConstantPatch => {
                if (-0.25..=0.5).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
            Fixture::TriangleHat => (1.0 - x.abs() / 0.5).max(0.0),
            Fixture::SmoothBump => bump(x, 0.0, 0.5),
            Fixture::TwoBumps => bump(x, -0.45, 0.25) + 0.7 * bump(x, 0.40, 0.30),
            Fixture::OddBump => bump(x, 0.35, 0.30) - bump(x, -0.35, 0.30),
        }
    }

    pub fn sample(&self, grid: &Grid) -> SourceFunction {
        let values: Vec<Complex64> = grid
            .nodes()
            .iter()
            .map(|&x| Complex64::new(self.eval(x), 0.0))
            .collect();
        // support is valid by construction, so new() cannot fail here
        SourceFunction::new(grid.clone(), values, self.support()).unwrap()
    }
}
