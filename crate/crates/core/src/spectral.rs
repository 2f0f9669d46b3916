//! Momentum spectrum of the initial packet and the estimates built on it.
//!
//! Writing `θ = φ + π/2`, so `E = 2 sin φ`, the packet overlaps the incoming
//! part of each scattering state through
//!
//! ```text
//! A(φ) = L^{-1/2} Σ_{r=0}^{L-1} e^{irφ},   B(φ) = L^{-1/2} Σ_{r=0}^{L-1} (-1)^r e^{-irφ} = A(π - φ).
//! ```
//!
//! `|A|²` is a Fejér kernel of unit mean; its mass outside `|φ| < ε` is below
//! `π/(Lε)`, which is what makes a long packet effectively monochromatic.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::lattice::DenseEigen;
use crate::quadrature::integrate_pieces;

/// Quadrature tolerance for the spectral integrals.
pub const QUAD_TOL: f64 = 1e-12;

fn wrap_phase(phi: f64) -> f64 {
    let w = (phi + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// `sin(Lφ/2) / sin(φ/2)` with `φ` already wrapped to `(-π, π]`.
fn dirichlet(packet_len: usize, phi: f64) -> f64 {
    if phi == 0.0 {
        packet_len as f64
    } else {
        (packet_len as f64 * phi / 2.0).sin() / (phi / 2.0).sin()
    }
}

/// `A(φ)` in closed form, valid for any real `φ`.
pub fn amplitude_a(packet_len: usize, phi: f64) -> Complex64 {
    let phi = wrap_phase(phi);
    let l = packet_len as f64;
    Complex64::from_polar(dirichlet(packet_len, phi) / l.sqrt(), (l - 1.0) * phi / 2.0)
}

/// `|A(φ)|² = sin²(Lφ/2) / (L sin²(φ/2))`.
pub fn amplitude_a_sq(packet_len: usize, phi: f64) -> f64 {
    let d = dirichlet(packet_len, wrap_phase(phi));
    d * d / packet_len as f64
}

/// `(A(φ), B(φ))` for `φ ∈ [-π, π]`. At `φ = ±π` the pole of the quotient
/// form of `B` is removable and the limit is returned.
pub fn packet_spectrum(packet_len: usize, phi: f64) -> Result<(Complex64, Complex64)> {
    if packet_len == 0 {
        return Err(Error::InvalidConfig(
            "packet length must be positive".into(),
        ));
    }
    if !(-PI..=PI).contains(&phi) {
        return Err(Error::InvalidConfig(format!("phase {phi} outside [-π, π]")));
    }
    Ok((
        amplitude_a(packet_len, phi),
        amplitude_a(packet_len, PI - phi),
    ))
}

/// Lobe boundaries `2πk/L` of `|A|²` inside `(lo, hi)`, with the endpoints.
fn lobe_breakpoints(packet_len: usize, lo: f64, hi: f64) -> Vec<f64> {
    let step = 2.0 * PI / packet_len as f64;
    let mut pts = vec![lo];
    let first = (lo / step).floor() as i64 + 1;
    let mut k = first;
    while (k as f64) * step < hi {
        pts.push(k as f64 * step);
        k += 1;
    }
    pts.push(hi);
    pts
}

/// `∫_{-π}^{π} |A|² dφ/2π`, which equals 1.
pub fn parseval_integral(packet_len: usize) -> Result<f64> {
    let pts = lobe_breakpoints(packet_len, -PI, PI);
    Ok(integrate_pieces(|p| amplitude_a_sq(packet_len, p), &pts, QUAD_TOL)? / (2.0 * PI))
}

/// Packet weight outside the window: `∫_{ε≤|φ|≤π} |A|² dφ/2π`.
pub fn tail_mass(packet_len: usize, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < PI) {
        return Err(Error::InvalidConfig(format!(
            "window half-width {eps} outside (0, π)"
        )));
    }
    let pts = lobe_breakpoints(packet_len, eps, PI);
    Ok(integrate_pieces(|p| amplitude_a_sq(packet_len, p), &pts, QUAD_TOL)? / PI)
}

/// `π/(Lε)`, the analytic ceiling on [`tail_mass`].
pub fn tail_bound(packet_len: usize, eps: f64) -> f64 {
    PI / (packet_len as f64 * eps)
}

/// `1/(L cos²(ε/2))`, the ceiling on `|B(φ)|²` for `|φ| < ε`.
pub fn b_bound(packet_len: usize, eps: f64) -> f64 {
    let c = (eps / 2.0).cos();
    1.0 / (packet_len as f64 * c * c)
}

/// Largest `|B(φ)|²` on `points` evenly spaced phases strictly inside
/// `(-ε, ε)`.
pub fn max_b_sq(packet_len: usize, eps: f64, points: usize) -> f64 {
    (1..=points)
        .map(|k| -eps + 2.0 * eps * k as f64 / (points + 1) as f64)
        .map(|phi| amplitude_a(packet_len, PI - phi).norm_sqr())
        .fold(0.0, f64::max)
}

/// Sampled `A`, `B` on a uniform grid over `[-π, π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumProfile {
    pub packet_len: usize,
    pub phis: Vec<f64>,
    pub a: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

impl SpectrumProfile {
    pub fn sample(packet_len: usize, points: usize) -> Result<Self> {
        let phis: Vec<f64> = (0..points)
            .map(|k| -PI + 2.0 * PI * k as f64 / points as f64)
            .collect();
        let (a, b) = phis
            .iter()
            .map(|&phi| packet_spectrum(packet_len, phi))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Ok(SpectrumProfile {
            packet_len,
            phis,
            a,
            b,
        })
    }

    /// Grid mean of `|A|²`. With at least `L` points this is the periodic
    /// trapezoid rule on a trigonometric polynomial of degree `L - 1`, so it
    /// equals the exact integral.
    pub fn mean_a_sq(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.a.len() as f64
    }
}

/// Energy cutoff for a phase window `|φ| < ε`: `2 sin ε`, or the whole band
/// once `ε ≥ π/2`.
pub fn window_cutoff(eps: f64) -> f64 {
    2.0 * eps.min(PI / 2.0).sin()
}

/// Weight of `psi0` on eigenstates inside the energy window of `|φ| < ε`:
/// `Σ_{|λ_i| < 2 sin ε} |⟨v_i|ψ0⟩|²`. For `ε ≥ π/2` the window is the closed
/// band `|λ| ≤ 2`.
pub fn window_weight(eig: &DenseEigen, psi0: &StateVector, eps: f64) -> Result<f64> {
    if psi0.dim() != eig.dim() {
        return Err(Error::DimensionMismatch {
            expected: eig.dim(),
            got: psi0.dim(),
        });
    }
    let cutoff = window_cutoff(eps);
    let inside = |lambda: f64| {
        if eps >= PI / 2.0 {
            lambda.abs() <= cutoff
        } else {
            lambda.abs() < cutoff
        }
    };
    let overlaps = eig.project(psi0);
    Ok(eig
        .values
        .iter()
        .zip(overlaps)
        .filter(|(&l, _)| inside(l))
        .map(|(_, c)| c.norm_sqr())
        .sum())
}

/// The three error scales `1/√(Lε)`, `D√(ε/L)`, `(ε/L)^{1/4}`.
pub fn error_terms(packet_len: f64, eps: f64, d: f64) -> [f64; 3] {
    [
        1.0 / (packet_len * eps).sqrt(),
        d * (eps / packet_len).sqrt(),
        (eps / packet_len).powf(0.25),
    ]
}

/// Largest of [`error_terms`]: the expected size of `|P₊ - |T(0)|²|`.
pub fn error_budget(packet_len: f64, eps: f64, d: f64) -> f64 {
    error_terms(packet_len, eps, d)
        .into_iter()
        .fold(0.0, f64::max)
}

/// `ε = 1/(16√N)` and `D = 8√N`, the window and slope bound that make the
/// budget depend on γ alone.
pub fn standard_window(n_leaves: usize) -> (f64, f64) {
    let root_n = (n_leaves as f64).sqrt();
    (1.0 / (16.0 * root_n), 8.0 * root_n)
}

/// `L ε³`, which has to stay small for the packet to move rigidly.
pub fn cubic_smallness(packet_len: f64, eps: f64) -> f64 {
    packet_len * eps.powi(3)
}

/// One spectral check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub packet_len: usize,
    pub eps: f64,
    pub quantity: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Parseval, tail and `|B|²` checks over every `(L, ε)` pair.
pub fn diagnostics(
    lengths: &[usize],
    epss: &[f64],
    grid_points: usize,
) -> Result<Vec<DiagnosticRow>> {
    let mut rows = Vec::new();
    for &l in lengths {
        let parseval = parseval_integral(l)?;
        rows.push(DiagnosticRow {
            packet_len: l,
            eps: f64::NAN,
            quantity: "parseval_error".into(),
            value: (parseval - 1.0).abs(),
            bound: 1e-10,
            pass: (parseval - 1.0).abs() < 1e-10,
        });
        for &eps in epss {
            let tail = tail_mass(l, eps)?;
            let bound = tail_bound(l, eps);
            rows.push(DiagnosticRow {
                packet_len: l,
                eps,
                quantity: "tail_mass".into(),
                value: tail,
                bound,
                pass: tail < bound,
            });
            let b = max_b_sq(l, eps, grid_points);
            let bound = b_bound(l, eps);
            rows.push(DiagnosticRow {
                packet_len: l,
                eps,
                quantity: "max_b_sq".into(),
                value: b,
                bound,
                pass: b < bound,
            });
        }
    }
    Ok(rows)
}
