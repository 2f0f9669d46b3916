use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty leaf string")]
    EmptyInput,
    #[error("illegal character {ch:?} at position {pos}; expected '0' or '1'")]
    IllegalCharacter { ch: char, pos: usize },
    #[error("leaf count {0} is not a power of two")]
    NonPowerOfTwo(usize),
    #[error("declared depth {declared} does not match {leaves} leaves")]
    DepthMismatch { declared: u32, leaves: usize },
    #[error("parity input needs a power-of-two length of at least 2, got {0}")]
    InvalidParityLength(usize),
    #[error("projective value (0, 0) produced by the Y recursion")]
    DegenerateProjective,
    #[error("energy {0} is outside the open band (-2, 2)")]
    EnergyOutOfBand(f64),
    #[error("energy {energy} is outside the scan window (0, {limit})")]
    OutsideScanWindow { energy: f64, limit: f64 },
    #[error("transmission denominator vanished at E = {0}")]
    SingularTransmission(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("index maps differ")]
    IndexMapMismatch,
    #[error("node {0} has no slot in the target index map")]
    MissingNode(String),
    #[error("dense eigensolver cap exceeded: dim {dim} > {cap}")]
    EigenCapExceeded { dim: usize, cap: usize },
    #[error("Chebyshev expansion did not converge within {0} terms")]
    NoConvergence(usize),
    #[error("packet length {packet_len} exceeds runway half-length {half_len}")]
    PacketTooLong { packet_len: usize, half_len: usize },
    #[error("graph has no runway")]
    NoRunway,
    #[error("quadrature did not reach tolerance {0}")]
    QuadratureFailed(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
