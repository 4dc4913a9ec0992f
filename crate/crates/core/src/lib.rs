//! Correlation-aware occupancy mapping.
//!
//! Classical occupancy grids treat every cell as an independent Bernoulli
//! variable. This crate instead maintains a *jointly Gaussian* latent field
//! over the whole lattice and folds probit (sign-observation) measurements
//! into it one at a time by moment matching — each update is a closed-form
//! mean shift plus a symmetric rank-one covariance correction, so evidence in
//! one cell propagates to its neighbours through the prior correlation.
//!
//! The crate contains:
//!
//! - [`grid`]: lattice geometry, the latent-map state, and ternary
//!   (occupied / free / unknown) classification;
//! - [`stats`]: numerically careful standard-normal primitives;
//! - [`kernel`]: prior covariance construction (dense and truncated-sparse
//!   backends);
//! - [`filter`]: the sequential Gaussian occupancy filter;
//! - [`ep`]: a full expectation-propagation solver used as the reference the
//!   filter is validated against;
//! - [`logodds`]: the classical independent-cell log-odds baseline;
//! - [`sim2d`]: the 2-D sampling experiment harness and its metrics;
//! - [`ray`] and [`cloud`]: voxel ray traversal and the pose-stamped
//!   point-cloud pipeline that turns lidar scans into measurements;
//! - [`io`]: CSV / PLY / checkpoint formats shared by the CLI.

pub mod cloud;
pub mod ep;
pub mod error;
pub mod filter;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod logodds;
pub mod map;
pub mod ray;
pub mod sim2d;
pub mod stats;

pub use cloud::{
    build_map_3d, default_scan_kernel, extract_measurements, room_sweep, CellObservationLedger,
    CellStatus, Extraction, Map3dStats, Pose, ScanFrame, SensorConfig, WallBox,
};
pub use ep::{ep_run, ep_single_sweep, EpOptions, EpReport, EpState};
pub use error::{Error, Result};
pub use filter::{ogf_process, ogf_update, UpdateDiagnostics};
pub use grid::{classify, GridLattice, Label, Measurement, TernaryMap, Thresholds};
pub use io::{
    load_checkpoint, load_ground_truth, load_scan_frames, read_measurement_log, read_poses,
    read_scans, save_checkpoint, save_ground_truth, write_logodds_csv, write_measurement_log,
    write_occupied_ply, write_poses, write_scans, write_stats_json, write_ternary_csv, TimedScan,
};
pub use kernel::{build_prior, kernel_eval, Backend, KernelConfig};
pub use logodds::{logodds_classify, logodds_update, LogOddsMap};
pub use map::{Cov, LatentMap, DENSE_CELL_LIMIT, VARIANCE_FLOOR};
pub use ray::ray_traverse;
pub use sim2d::{
    accuracy, map_difference, run_experiment, sample_without_repetition, ExperimentConfig,
    ExperimentResults, ExperimentRow, GroundTruthMap,
};
