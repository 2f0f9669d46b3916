//! `exp(-iHt)` applied to a state.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::error::{Error, Result};
use crate::lattice::{DenseEigen, HamiltonianGraph};

/// Spectral radius bound used to scale `H` into `[-1, 1]`: the largest node
/// degree in the tree + runway family.
pub const SPECTRAL_BOUND: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Propagator {
    #[serde(rename = "cheb")]
    Chebyshev,
    #[serde(rename = "exact")]
    Exact,
}

impl fmt::Display for Propagator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Propagator::Chebyshev => "cheb",
            Propagator::Exact => "exact",
        })
    }
}

impl FromStr for Propagator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cheb" | "chebyshev" => Ok(Propagator::Chebyshev),
            "exact" => Ok(Propagator::Exact),
            other => Err(Error::InvalidConfig(format!(
                "unknown propagator {other:?}"
            ))),
        }
    }
}

/// `J_0(x), …, J_{n_max}(x)` by Miller's downward recurrence, normalized with
/// `J_0 + 2 Σ J_{2k} = 1`. Requires `x ≥ 0`.
pub fn bessel_j_sequence(x: f64, n_max: usize) -> Vec<f64> {
    assert!(x >= 0.0 && x.is_finite());
    let mut out = vec![0.0; n_max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let reach = n_max.max(x.ceil() as usize);
    let start = reach + 32 + (40.0 * reach as f64).sqrt() as usize;
    let mut vals = vec![0.0; start + 2];
    vals[start] = 1e-300;
    for k in (1..=start).rev() {
        vals[k - 1] = 2.0 * k as f64 / x * vals[k] - vals[k + 1];
        if vals[k - 1].abs() > 1e250 {
            vals.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    let norm = vals[0] + 2.0 * vals.iter().skip(2).step_by(2).sum::<f64>();
    for (o, v) in out.iter_mut().zip(&vals) {
        *o = v / norm;
    }
    out
}

/// Expansion coefficients of `exp(-i x s)` in Chebyshev polynomials `T_k(s)`,
/// truncated once the remaining coefficient mass drops below `tol`.
pub fn chebyshev_coefficients(x: f64, tol: f64) -> Result<Vec<Complex64>> {
    let budget = (1.5 * x.abs()).ceil() as usize + 100;
    let j = bessel_j_sequence(x.abs(), budget);
    let mag = |k: usize| if k == 0 { j[0].abs() } else { 2.0 * j[k].abs() };
    if mag(budget) > tol {
        return Err(Error::NoConvergence(budget));
    }
    // smallest K with Σ_{k>K} |a_k| < tol, scanning back from the budget
    let mut tail = 0.0;
    let mut keep = budget;
    for k in (0..=budget).rev() {
        if tail + mag(k) >= tol {
            keep = k;
            break;
        }
        tail += mag(k);
    }
    // exp(-i x cos θ) = Σ ε_k (-i)^k J_k(x) cos kθ
    let unit = if x >= 0.0 {
        Complex64::new(0.0, -1.0)
    } else {
        Complex64::new(0.0, 1.0)
    };
    let mut phase = Complex64::new(1.0, 0.0);
    let coeffs = (0..=keep)
        .map(|k| {
            let c = phase * if k == 0 { j[0] } else { 2.0 * j[k] };
            phase *= unit;
            c
        })
        .collect();
    Ok(coeffs)
}

/// Chebyshev propagation: `Σ_k a_k T_k(H/ρ) ψ` with `ρ` = [`SPECTRAL_BOUND`]
/// (or the graph's larger degree, if any).
pub fn evolve_cheb(
    h: &HamiltonianGraph,
    psi: &StateVector,
    t: f64,
    tol: f64,
) -> Result<StateVector> {
    if psi.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: psi.dim(),
        });
    }
    if tol.is_nan() || tol < 1e-14 {
        return Err(Error::InvalidConfig(format!(
            "Chebyshev tolerance {tol} below 1e-14"
        )));
    }
    if t == 0.0 {
        return Ok(psi.clone());
    }
    let rho = SPECTRAL_BOUND.max(h.max_degree() as f64);
    let coeffs = chebyshev_coefficients(rho * t, tol)?;
    let matrix = h.matrix();
    let dim = h.dim();
    let zero = Complex64::new(0.0, 0.0);

    let mut prev = psi.amplitudes().to_vec();
    let mut acc: Vec<Complex64> = prev.iter().map(|&a| a * coeffs[0]).collect();
    if coeffs.len() == 1 {
        return Ok(StateVector::from_amplitudes(acc));
    }
    let mut cur = vec![zero; dim];
    matrix.matvec_into(&prev, &mut cur);
    cur.iter_mut().for_each(|c| *c /= rho);
    acc.iter_mut()
        .zip(&cur)
        .for_each(|(a, &c)| *a += c * coeffs[1]);

    let mut next = vec![zero; dim];
    for &coef in &coeffs[2..] {
        matrix.matvec_into(&cur, &mut next);
        for i in 0..dim {
            next[i] = 2.0 * next[i] / rho - prev[i];
            acc[i] += next[i] * coef;
        }
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(StateVector::from_amplitudes(acc))
}

/// `Σ_i e^{-iλ_i t} ⟨v_i|ψ⟩ v_i`.
pub fn evolve_exact(eig: &DenseEigen, psi: &StateVector, t: f64) -> Result<StateVector> {
    if psi.dim() != eig.dim() {
        return Err(Error::DimensionMismatch {
            expected: eig.dim(),
            got: psi.dim(),
        });
    }
    let overlaps = eig.project(psi);
    let mut out = vec![Complex64::new(0.0, 0.0); eig.dim()];
    for (i, (&lambda, &c)) in eig.values.iter().zip(&overlaps).enumerate() {
        let w = c * Complex64::from_polar(1.0, -lambda * t);
        for (o, &v) in out.iter_mut().zip(eig.vectors.column(i).iter()) {
            *o += w * v;
        }
    }
    Ok(StateVector::from_amplitudes(out))
}
