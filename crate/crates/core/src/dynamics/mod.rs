//! Wave-packet dynamics and the end-to-end evaluation algorithm.
//!
//! The packet is `i^r / √L` on runway sites `-L+1..=0`, a right mover centred
//! on energy 0. After evolving for `t = L/2` under the full Hamiltonian, the
//! probability on runway sites `1..=M` approximates `|T(0)|²`, which is 1 when
//! the tree evaluates to 1 and 0 otherwise.

mod propagator;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use propagator::{
    bessel_j_sequence, chebyshev_coefficients, evolve_cheb, evolve_exact, Propagator,
    SPECTRAL_BOUND,
};

use crate::error::{Error, Result};
use crate::lattice::{build_full, dense_eig, HamiltonianGraph, IndexMap};
use crate::nand::TreeInput;
use crate::scattering::y_at_zero;

/// Complex amplitudes over the flat node indices of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zeros(dim: usize) -> Self {
        StateVector {
            amps: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = StateVector::zeros(dim);
        v.amps[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Self {
        StateVector { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `‖self - other‖`.
    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Probability mass on a range of flat indices.
    pub fn mass(&self, range: std::ops::Range<usize>) -> f64 {
        self.amps[range].iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `i^r` without rounding error.
pub fn i_pow(r: i64) -> Complex64 {
    match r.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `i^r / √L` on runway sites `-L+1..=0`, zero elsewhere.
pub fn initial_packet(packet_len: usize, index: &IndexMap) -> Result<StateVector> {
    let half_len = index.half_len().ok_or(Error::NoRunway)?;
    if packet_len == 0 {
        return Err(Error::InvalidConfig(
            "packet length must be positive".into(),
        ));
    }
    if packet_len > half_len {
        return Err(Error::PacketTooLong {
            packet_len,
            half_len,
        });
    }
    let mut psi = StateVector::zeros(index.dim());
    let scale = 1.0 / (packet_len as f64).sqrt();
    for r in -(packet_len as i64) + 1..=0 {
        psi.amps[index.runway(r).expect("site on runway")] = i_pow(r) * scale;
    }
    Ok(psi)
}

/// `(⟨H⟩, ⟨H²⟩)` in the state `psi`.
pub fn energy_moments(h: &HamiltonianGraph, psi: &StateVector) -> Result<(f64, f64)> {
    let hpsi = h.apply(psi)?;
    Ok((psi.inner(&hpsi).re, hpsi.norm_sqr()))
}

/// Probability on runway sites `1..=M`.
pub fn prob_right(psi: &StateVector, index: &IndexMap) -> f64 {
    psi.mass(index.right_runway())
}

/// Probability on runway sites `r ≤ 0` plus the tree and extra nodes.
pub fn prob_left_and_tree(psi: &StateVector, index: &IndexMap) -> f64 {
    let right = index.right_runway();
    psi.mass(0..right.start) + psi.mass(right.end..psi.dim())
}

/// `sin(πu)/(πu)`, exact at integers.
fn sinc_pi(u: f64) -> f64 {
    if u == 0.0 {
        1.0
    } else if u.fract() == 0.0 {
        0.0
    } else {
        (PI * u).sin() / (PI * u)
    }
}

/// L2 distance on sites `r > 0` between `ψ(t)` and the translated initial
/// packet `T0 · ψ0` moved right by `2t`.
///
/// The translated packet is the band-limited continuation of `ψ0`'s envelope:
/// with `ψ0(s) = i^s f(s)`, the reference at `r` is
/// `T0 · i^r · Σ_s f(s) sinc(r - 2t - s)`, which reduces to an exact shift when
/// `2t` is an integer.
pub fn translation_residual(
    psi_t: &StateVector,
    psi0: &StateVector,
    index: &IndexMap,
    t0: Complex64,
    t: f64,
) -> Result<f64> {
    let half_len = index.half_len().ok_or(Error::NoRunway)?;
    for psi in [psi_t, psi0] {
        if psi.dim() != index.dim() {
            return Err(Error::DimensionMismatch {
                expected: index.dim(),
                got: psi.dim(),
            });
        }
    }
    let m = half_len as i64;
    let envelope: Vec<(i64, Complex64)> = (-m..=m)
        .filter_map(|s| {
            let a = psi0.amps[index.runway(s).unwrap()];
            (a.norm_sqr() > 0.0).then(|| (s, a * i_pow(-s)))
        })
        .collect();
    let shift = 2.0 * t;
    let sum_sq: f64 = (1..=m)
        .map(|r| {
            let reference: Complex64 = envelope
                .iter()
                .map(|&(s, f)| f * sinc_pi(r as f64 - shift - s as f64))
                .sum();
            (psi_t.amps[index.runway(r).unwrap()] - t0 * i_pow(r) * reference).norm_sqr()
        })
        .sum();
    Ok(sum_sq.sqrt())
}

/// Parameters of one run of the algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub gamma: f64,
    /// Packet length `L`.
    pub packet_len: usize,
    /// Runway half-length `M`.
    pub half_len: usize,
    pub t_run: f64,
    pub propagator: Propagator,
    pub tolerance: f64,
    /// Decide 1 when the right-runway probability reaches this value.
    pub threshold: f64,
}

impl RunConfig {
    pub const DEFAULT_M_FACTOR: usize = 3;
    pub const DEFAULT_TOLERANCE: f64 = 1e-12;
    pub const DEFAULT_THRESHOLD: f64 = 0.5;
    pub const MIN_PACKET_LEN: usize = 4;

    /// `L = γ√N` rounded to the nearest even integer (at least 4),
    /// `M = 3L`, `t_run = L/2`, Chebyshev propagation.
    pub fn new(n_leaves: usize, gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gamma must be ≥ 1, got {gamma}"
            )));
        }
        let packet_len = Self::packet_len_for(n_leaves, gamma);
        Ok(RunConfig {
            gamma,
            packet_len,
            half_len: Self::DEFAULT_M_FACTOR * packet_len,
            t_run: packet_len as f64 / 2.0,
            propagator: Propagator::Chebyshev,
            tolerance: Self::DEFAULT_TOLERANCE,
            threshold: Self::DEFAULT_THRESHOLD,
        })
    }

    pub fn packet_len_for(n_leaves: usize, gamma: f64) -> usize {
        let even = 2.0 * (gamma * (n_leaves as f64).sqrt() / 2.0).round();
        (even as usize).max(Self::MIN_PACKET_LEN)
    }

    pub fn with_m_factor(self, factor: usize) -> Result<Self> {
        self.with_half_len(factor * self.packet_len)
    }

    pub fn with_half_len(mut self, half_len: usize) -> Result<Self> {
        self.half_len = half_len;
        self.validate()?;
        Ok(self)
    }

    pub fn with_propagator(mut self, propagator: Propagator) -> Self {
        self.propagator = propagator;
        self
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        self.tolerance = tolerance;
        self.validate()?;
        Ok(self)
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        self.threshold = threshold;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.gamma.is_nan() || self.gamma < 1.0 {
            return bad(format!("gamma must be ≥ 1, got {}", self.gamma));
        }
        if self.packet_len < Self::MIN_PACKET_LEN {
            return bad(format!(
                "packet length {} below {}",
                self.packet_len,
                Self::MIN_PACKET_LEN
            ));
        }
        if self.half_len < 3 * self.packet_len {
            return bad(format!(
                "runway half-length {} below 3L = {}",
                self.half_len,
                3 * self.packet_len
            ));
        }
        if !(self.t_run >= 0.0 && self.t_run.is_finite()) {
            return bad(format!("run time {} invalid", self.t_run));
        }
        if !(self.tolerance >= 1e-14 && self.tolerance < 1.0) {
            return bad(format!("tolerance {} outside [1e-14, 1)", self.tolerance));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!("threshold {} outside (0, 1)", self.threshold));
        }
        Ok(())
    }
}

mod bit {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(*b as u8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!(
                "expected 0 or 1, got {other}"
            ))),
        }
    }
}

/// Output of [`run_algorithm`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub input: TreeInput,
    #[serde(with = "bit")]
    pub decision: bool,
    pub p_right: f64,
    /// `|T(0)|²` from the exact E = 0 recursion: 1 or 0.
    pub analytic_t0_sq: f64,
    pub dim: usize,
    pub config: RunConfig,
}

/// States from one evolution, kept for diagnostics.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub graph: HamiltonianGraph,
    pub psi0: StateVector,
    pub psi_t: StateVector,
}

pub fn evolve(
    graph: &HamiltonianGraph,
    psi: &StateVector,
    t: f64,
    config: &RunConfig,
) -> Result<StateVector> {
    match config.propagator {
        Propagator::Chebyshev => evolve_cheb(graph, psi, t, config.tolerance),
        Propagator::Exact => evolve_exact(&dense_eig(graph)?, psi, t),
    }
}

pub fn simulate(input: &TreeInput, config: &RunConfig) -> Result<Simulation> {
    config.validate()?;
    let graph = build_full(input, config.half_len)?;
    let psi0 = initial_packet(config.packet_len, graph.index_map())?;
    let psi_t = evolve(&graph, &psi0, config.t_run, config)?;
    Ok(Simulation { graph, psi0, psi_t })
}

/// Build `H_O + H_D`, send the packet, wait `t_run`, and read the right
/// runway.
pub fn run_algorithm(input: &TreeInput, config: &RunConfig) -> Result<Verdict> {
    let sim = simulate(input, config)?;
    let p_right = prob_right(&sim.psi_t, sim.graph.index_map());
    Ok(Verdict {
        input: input.clone(),
        decision: p_right >= config.threshold,
        p_right,
        analytic_t0_sq: if y_at_zero(input).logical() { 1.0 } else { 0.0 },
        dim: sim.graph.dim(),
        config: *config,
    })
}
