use std::path::PathBuf;

/// Crate-wide error type.
///
/// Computation pathologies (EP divergence, cavity failures) are kept distinct
/// from I/O and argument errors so the CLI can map them to different exit
/// codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cell index {cell} out of range for a lattice with {n_cells} cells")]
    InvalidCell { cell: usize, n_cells: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid lattice: {reason}")]
    BadLattice { reason: String },

    #[error("invalid thresholds: need r_f < 0.5 < r_o, got r_o = {r_o}, r_f = {r_f}")]
    BadThresholds { r_o: f64, r_f: f64 },

    #[error("invalid kernel config: {reason}")]
    BadKernel { reason: String },

    #[error("sample count {requested} exceeds the {available} cells of the lattice")]
    SampleCountExceedsCells { requested: usize, available: usize },

    #[error("dense covariance backend refused: {cells} cells exceeds the {limit}-cell limit")]
    DenseCapacityExceeded { cells: usize, limit: usize },

    #[error("non-finite filter state after updating cell {cell}")]
    NonFiniteState { cell: usize },

    #[error("map difference undefined: reference mean vector has zero norm")]
    UndefinedMetric,

    #[error(
        "moment matching did not contract the cavity variance \
         (matched {sigma2_hat} vs cavity {sigma2_cav})"
    )]
    NonContractingMoments { sigma2_hat: f64, sigma2_cav: f64 },

    #[error("negative cavity variance at site {site}")]
    NegativeCavityVariance { site: usize },

    #[error("EP diverged after {sweeps} sweeps: per-sweep change grew three sweeps in a row")]
    EpDiverged { sweeps: usize },

    #[error("EP pathological: {skipped} of {total} site updates skipped within one sweep")]
    EpPathological { skipped: usize, total: usize },

    #[error("the EP oracle requires the dense covariance backend")]
    OracleRequiresDense,

    #[error("ray origin {origin:?} lies outside the lattice")]
    OriginOutsideLattice { origin: [f64; 3] },

    #[error("invalid pose: {reason}")]
    BadPose { reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("checkpoint: {reason}")]
    Checkpoint { reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
