//! Scattering of runway plane waves off the attached tree.
//!
//! In an eigenstate of energy `E`, the ratio `Y = (upper amplitude) /
//! (lower amplitude)` across any tree edge obeys `Y = -1 / (E + Y' + Y'')`
//! where `Y'`, `Y''` belong to the two edges above. Folding this from the
//! leaves down gives `y(E)` on the root → runway edge, and with it the
//! transmission amplitude
//!
//! ```text
//! T(E) = 2i sinθ / (2i sinθ + y(E)),   E = -2 cos θ,   θ ∈ (0, π)
//! ```
//!
//! At `E → 0⁺` the recursion only ever sees `Y = 0` and `Y = -∞`, and acts as
//! a NAND gate on them, so `T(0)` is 1 or 0 according to the tree's value.
//!
//! Every `Y` is carried as a projective pair so exact and near poles stay
//! finite.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nand::{eval_nand, TreeInput};

/// `Y = num / den`, kept with `max(|num|, |den|) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveValue {
    num: f64,
    den: f64,
}

impl ProjectiveValue {
    pub const ZERO: ProjectiveValue = ProjectiveValue { num: 0.0, den: 1.0 };
    pub const POLE: ProjectiveValue = ProjectiveValue {
        num: -1.0,
        den: 0.0,
    };

    pub fn new(num: f64, den: f64) -> Result<Self> {
        let scale = num.abs().max(den.abs());
        if scale == 0.0 || !num.is_finite() || !den.is_finite() {
            return Err(Error::DegenerateProjective);
        }
        Ok(ProjectiveValue {
            num: num / scale,
            den: den / scale,
        })
    }

    pub fn num(&self) -> f64 {
        self.num
    }

    pub fn den(&self) -> f64 {
        self.den
    }

    /// `num / den`; infinite at a pole.
    pub fn value(&self) -> f64 {
        self.num / self.den
    }

    pub fn abs(&self) -> f64 {
        (self.num / self.den).abs()
    }

    pub fn is_pole(&self) -> bool {
        self.den == 0.0
    }

    /// Whether `self` and `other` are the same projective point, up to a
    /// relative tolerance on the cross product.
    pub fn approx_eq(&self, other: &ProjectiveValue, rel: f64) -> bool {
        (self.num * other.den - self.den * other.num).abs() <= rel
    }

    pub fn neg(&self) -> ProjectiveValue {
        ProjectiveValue {
            num: -self.num,
            den: self.den,
        }
    }
}

/// Edge value at E → 0⁺: `Zero` is logical 1, `Pole` (Y = -∞) is logical 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SymbolicY {
    Zero,
    Pole,
}

impl SymbolicY {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            SymbolicY::Zero
        } else {
            SymbolicY::Pole
        }
    }

    pub fn logical(self) -> bool {
        self == SymbolicY::Zero
    }

    /// The recursion at E = 0: only two zeros above produce a pole.
    pub fn combine(self, other: SymbolicY) -> SymbolicY {
        match (self, other) {
            (SymbolicY::Zero, SymbolicY::Zero) => SymbolicY::Pole,
            _ => SymbolicY::Zero,
        }
    }
}

fn check_band(energy: f64) -> Result<()> {
    if energy.is_finite() && energy.abs() < 2.0 {
        Ok(())
    } else {
        Err(Error::EnergyOutOfBand(energy))
    }
}

/// Y on a leaf's downward edge: `E/(1-E²)` with the extra node attached,
/// `-1/E` without.
pub fn leaf_y(bit: bool, energy: f64) -> Result<ProjectiveValue> {
    check_band(energy)?;
    if bit {
        ProjectiveValue::new(energy, 1.0 - energy * energy)
    } else {
        ProjectiveValue::new(-1.0, energy)
    }
}

/// `Y = -1 / (E + Y1 + Y2)` in projective form.
pub fn combine_y(y1: ProjectiveValue, y2: ProjectiveValue, energy: f64) -> Result<ProjectiveValue> {
    if y1.den == 0.0 && y2.den == 0.0 && y1.num.signum() == y2.num.signum() {
        // two like-signed poles: the sum is infinite
        return Ok(ProjectiveValue::ZERO);
    }
    let q12 = y1.den * y2.den;
    ProjectiveValue::new(-q12, energy * q12 + y1.num * y2.den + y2.num * y1.den)
}

/// `y(E)` on the edge from the tree root down to runway node 0.
pub fn y_bottom(input: &TreeInput, energy: f64) -> Result<ProjectiveValue> {
    let mut level = input
        .bits()
        .iter()
        .map(|&b| leaf_y(b, energy))
        .collect::<Result<Vec<_>>>()?;
    while level.len() > 1 {
        level = level
            .chunks_exact(2)
            .map(|pair| combine_y(pair[0], pair[1], energy))
            .collect::<Result<Vec<_>>>()?;
    }
    Ok(level[0])
}

/// The exact E = 0 recursion.
pub fn y_at_zero(input: &TreeInput) -> SymbolicY {
    let mut level: Vec<SymbolicY> = input
        .bits()
        .iter()
        .map(|&b| SymbolicY::from_bit(b))
        .collect();
    while level.len() > 1 {
        level = level.chunks_exact(2).map(|p| p[0].combine(p[1])).collect();
    }
    level[0]
}

/// Transmission and reflection amplitudes, with `1 + R = T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transmission {
    pub t: Complex64,
    pub r: Complex64,
}

/// `sin θ` for `E = -2 cos θ`, `θ ∈ (0, π)`.
pub fn sin_theta(energy: f64) -> f64 {
    (1.0 - energy * energy / 4.0).sqrt()
}

pub fn transmission(energy: f64, y: ProjectiveValue) -> Result<Transmission> {
    check_band(energy)?;
    let numer = Complex64::new(0.0, 2.0 * sin_theta(energy) * y.den);
    let denom = numer + y.num;
    if denom.norm() == 0.0 {
        return Err(Error::SingularTransmission(energy));
    }
    let t = numer / denom;
    Ok(Transmission { t, r: t - 1.0 })
}

/// Full description of one scattering energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringPoint {
    pub energy: f64,
    pub theta: f64,
    pub y: ProjectiveValue,
    pub t: Complex64,
    pub r: Complex64,
}

pub fn scatter(input: &TreeInput, energy: f64) -> Result<ScatteringPoint> {
    let y = y_bottom(input, energy)?;
    let Transmission { t, r } = transmission(energy, y)?;
    Ok(ScatteringPoint {
        energy,
        theta: (-energy / 2.0).acos(),
        y,
        t,
        r,
    })
}

/// Upper end of the energy window on which the near-zero bounds hold,
/// `1/(16√N)`.
pub fn scan_window(n_leaves: usize) -> f64 {
    1.0 / (16.0 * (n_leaves as f64).sqrt())
}

/// `points` logarithmically spaced energies strictly inside `(lo, hi)`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (1..=points)
        .map(|k| (a + (b - a) * k as f64 / (points + 1) as f64).exp())
        .collect()
}

/// One energy of a bound scan.
///
/// `t_dev` is `|T(E) - T(0)|`: `|T|` on a reflecting tree, `|T - 1|` on a
/// transmitting one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub energy: f64,
    pub abs_y: f64,
    pub t_dev: f64,
    pub bound_y: f64,
    pub bound_t: f64,
    pub pass: bool,
}

impl BoundRow {
    /// Smallest relative slack of the two inequalities; negative on violation.
    pub fn margin(&self, nand: bool) -> f64 {
        let y_slack = if nand {
            1.0 - self.abs_y / self.bound_y
        } else {
            1.0 - self.bound_y / self.abs_y
        };
        y_slack.min(1.0 - self.t_dev / self.bound_t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n_leaves: usize,
    pub nand: bool,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    pub fn min_margin(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.margin(self.nand))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Checks the near-zero-energy bounds at every grid energy, for
/// `0 < E < 1/(16√N)`:
///
/// * value 0 (reflect): `|y| > 1/(4√N E)` and `|T| < 8√N E`,
/// * value 1 (transmit): `|y| < 4√N E` and `|T - 1| < 3√N E`.
pub fn scan_bounds(input: &TreeInput, grid: &[f64]) -> Result<BoundReport> {
    let n_leaves = input.len();
    let root_n = (n_leaves as f64).sqrt();
    let limit = scan_window(n_leaves);
    let nand = eval_nand(input);
    let rows = grid
        .iter()
        .map(|&energy| {
            if !(energy > 0.0 && energy < limit) {
                return Err(Error::OutsideScanWindow { energy, limit });
            }
            let y = y_bottom(input, energy)?;
            let Transmission { t, .. } = transmission(energy, y)?;
            let abs_y = y.abs();
            let row = if nand {
                let (bound_y, bound_t) = (4.0 * root_n * energy, 3.0 * root_n * energy);
                let t_dev = (t - 1.0).norm();
                BoundRow {
                    energy,
                    abs_y,
                    t_dev,
                    bound_y,
                    bound_t,
                    pass: abs_y < bound_y && t_dev < bound_t,
                }
            } else {
                let (bound_y, bound_t) = (1.0 / (4.0 * root_n * energy), 8.0 * root_n * energy);
                let t_dev = t.norm();
                BoundRow {
                    energy,
                    abs_y,
                    t_dev,
                    bound_y,
                    bound_t,
                    pass: abs_y > bound_y && t_dev < bound_t,
                }
            };
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        n_leaves,
        nand,
        rows,
    })
}
