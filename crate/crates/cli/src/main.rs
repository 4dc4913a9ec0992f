//! `ogf` — reproducible runs of the occupancy-mapping toolkit.
//!
//! Three subcommands: `sim2d` runs the sampled-measurement experiment matrix
//! on a 2-D ground-truth map, `compare` puts the filter, a single EP sweep,
//! and converged EP side by side on one batch, and `map3d` builds a 3-D map
//! from pose and scan files.
//!
//! Every run writes a `run.json` capturing the resolved flags and the library
//! version. All value outputs are deterministic functions of that metadata;
//! only the wall-clock columns of the sim2d results CSV vary between runs.
//!
//! Exit codes: 0 success, 1 computation pathology (EP divergence),
//! 2 I/O or argument error.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ogf::{
    accuracy, build_map_3d, build_prior, classify, ep_run, ep_single_sweep, load_ground_truth,
    load_scan_frames, logodds_classify, logodds_update, map_difference, ogf_process,
    run_experiment, sample_without_repetition, save_checkpoint, write_logodds_csv,
    write_occupied_ply, write_stats_json, write_ternary_csv, Backend, EpOptions, Error,
    ExperimentConfig, GridLattice, GroundTruthMap, KernelConfig, LatentMap, LogOddsMap, ScanFrame,
    SensorConfig, Thresholds,
};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ogf", version, about = "Correlation-aware occupancy mapping runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the 2-D sampling experiment matrix and export the final maps
    Sim2d(Sim2dArgs),
    /// Compare the filter against one EP sweep and converged EP on one batch
    Compare(CompareArgs),
    /// Build a 3-D map from pose and scan CSV files
    Map3d(Map3dArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum BackendArg {
    Dense,
    Sparse,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Dense => Backend::Dense,
            BackendArg::Sparse => Backend::Sparse,
        }
    }
}

#[derive(Args, Serialize)]
struct Sim2dArgs {
    /// Ground-truth map file (`#` occupied, `.` free); defaults to the
    /// built-in 25×25 lab map
    #[arg(long)]
    map: Option<PathBuf>,
    /// Sample counts to evaluate, comma separated
    #[arg(long, value_delimiter = ',', num_args = 1..,
          default_values_t = [30, 60, 90, 120, 150, 180, 210, 240, 270, 300])]
    samples: Vec<usize>,
    /// Trials per sample count (trial k draws with seed + k)
    #[arg(long, default_value_t = 1)]
    trials: usize,
    /// Base RNG seed for sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Kernel standard deviation in cell units
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Occupied threshold on the per-cell probability
    #[arg(long, default_value_t = 0.65)]
    ro: f64,
    /// Free threshold on the per-cell probability
    #[arg(long, default_value_t = 0.35)]
    rf: f64,
    /// Kernel truncation radius in cell units (default: untruncated)
    #[arg(long)]
    cutoff_radius: Option<f64>,
    /// Covariance storage backend (sparse requires --cutoff-radius)
    #[arg(long, value_enum, default_value_t = BackendArg::Dense)]
    backend: BackendArg,
    /// EP convergence tolerance on site-parameter change
    #[arg(long, default_value_t = 1e-6)]
    ep_tol: f64,
    /// EP sweep budget
    #[arg(long, default_value_t = 100)]
    ep_max_sweeps: usize,
    /// Output directory
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct CompareArgs {
    /// Ground-truth map file; defaults to the built-in 25×25 lab map
    #[arg(long)]
    map: Option<PathBuf>,
    /// Number of samples in the batch
    #[arg(long, default_value_t = 300)]
    samples: usize,
    /// RNG seed for sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Kernel standard deviation in cell units
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Occupied threshold on the per-cell probability
    #[arg(long, default_value_t = 0.65)]
    ro: f64,
    /// Free threshold on the per-cell probability
    #[arg(long, default_value_t = 0.35)]
    rf: f64,
    /// Kernel truncation radius in cell units (default: untruncated)
    #[arg(long)]
    cutoff_radius: Option<f64>,
    /// Covariance storage backend for the filter (EP always runs dense)
    #[arg(long, value_enum, default_value_t = BackendArg::Dense)]
    backend: BackendArg,
    /// EP convergence tolerance on site-parameter change
    #[arg(long, default_value_t = 1e-6)]
    ep_tol: f64,
    /// EP sweep budget
    #[arg(long, default_value_t = 100)]
    ep_max_sweeps: usize,
    /// Output directory
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct Map3dArgs {
    /// Pose file: CSV `t,x,y,z,qw,qx,qy,qz`
    #[arg(long)]
    poses: PathBuf,
    /// Scan file: CSV `t,x,y,z`, sensor-frame points grouped by time
    #[arg(long)]
    scans: PathBuf,
    /// Lattice cell size in meters; the lattice itself is fitted to the data
    #[arg(long, default_value_t = 0.2)]
    resolution: f64,
    /// Kernel standard deviation in meters (default: half the resolution)
    #[arg(long)]
    sigma: Option<f64>,
    /// Occupied threshold on the per-cell probability
    #[arg(long, default_value_t = 0.65)]
    ro: f64,
    /// Free threshold on the per-cell probability
    #[arg(long, default_value_t = 0.35)]
    rf: f64,
    /// Kernel truncation radius in meters (default: three times the resolution)
    #[arg(long)]
    cutoff_radius: Option<f64>,
    /// Covariance storage backend
    #[arg(long, value_enum, default_value_t = BackendArg::Sparse)]
    backend: BackendArg,
    /// Output directory
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sim2d(args) => cmd_sim2d(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Map3d(args) => cmd_map3d(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code: u8 = match e {
                Error::EpDiverged { .. } | Error::EpPathological { .. } => 1,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

/// Writes `run.json`: the subcommand, the library version, and every flag at
/// its resolved value. Identical metadata implies identical value outputs.
fn write_run_json(out: &Path, command: &str, args: &impl Serialize) -> Result<(), Error> {
    #[derive(Serialize)]
    struct RunMeta<'a, A: Serialize> {
        command: &'a str,
        version: &'a str,
        #[serde(flatten)]
        args: &'a A,
    }
    let meta = RunMeta { command, version: env!("CARGO_PKG_VERSION"), args };
    let path = out.join("run.json");
    let mut text = serde_json::to_string_pretty(&meta)
        .map_err(|e| Error::Checkpoint { reason: format!("run metadata: {e}") })?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::Io { path, source: e })
}

fn load_map(path: &Option<PathBuf>) -> Result<GroundTruthMap, Error> {
    match path {
        Some(p) => load_ground_truth(p),
        None => Ok(GroundTruthMap::bundled()),
    }
}

fn kernel_for(sigma: f64, cutoff_radius: Option<f64>) -> Result<KernelConfig, Error> {
    KernelConfig::new(sigma, cutoff_radius)
}

fn cmd_sim2d(args: &Sim2dArgs) -> Result<(), Error> {
    let out = &args.out;
    std::fs::create_dir_all(out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
    write_run_json(out, "sim2d", args)?;

    let gt = load_map(&args.map)?;
    let cfg = ExperimentConfig {
        sample_counts: args.samples.clone(),
        seed: args.seed,
        sigma: args.sigma,
        cutoff_radius: args.cutoff_radius,
        backend: args.backend.into(),
        thresholds: Thresholds::new(args.ro, args.rf)?,
        trials: args.trials,
        ep: EpOptions { tol: args.ep_tol, max_sweeps: args.ep_max_sweeps },
    };
    let results = run_experiment(&cfg, &gt)?;

    let csv_path = out.join("results.csv");
    let file = File::create(&csv_path)
        .map_err(|e| Error::Io { path: csv_path.clone(), source: e })?;
    results.write_csv(BufWriter::new(file))?;

    // final maps: one more run at the largest sample count with the base seed
    let &n_final = args.samples.iter().max().expect("at least one sample count");
    let lattice = gt.lattice();
    let kernel = kernel_for(cfg.sigma, cfg.cutoff_radius)?;
    let prior = build_prior(&lattice, &kernel, cfg.backend)?;
    let batch = sample_without_repetition(&gt, n_final, cfg.seed)?;

    let mut filtered = prior.clone();
    ogf_process(&mut filtered, &batch)?;
    let tern_ogf = classify(&filtered, &cfg.thresholds);
    write_ternary_csv(out.join("map_ogf.csv"), &filtered, &tern_ogf)?;

    let ep_prior = match cfg.backend {
        Backend::Dense => prior,
        Backend::Sparse => build_prior(&lattice, &kernel, Backend::Dense)?,
    };
    let (ep_state, ep_report) = ep_run(&ep_prior, &batch, &cfg.ep)?;
    let tern_ep = classify(ep_state.posterior(), &cfg.thresholds);
    write_ternary_csv(out.join("map_ep.csv"), ep_state.posterior(), &tern_ep)?;

    let mut base = LogOddsMap::new(lattice.clone());
    for meas in &batch {
        logodds_update(&mut base, meas)?;
    }
    let tern_base = logodds_classify(&base, &cfg.thresholds);
    write_logodds_csv(out.join("map_baseline.csv"), &base, &tern_base)?;

    println!(
        "ran {} experiment rows on a {}×{} map ({} cells)",
        results.rows.len(),
        gt.rows(),
        gt.cols(),
        gt.n_cells()
    );
    println!(
        "final maps at {n_final} samples (seed {}): accuracy filter {:.4}, EP {:.4} ({} sweeps), baseline {:.4}",
        cfg.seed,
        accuracy(&tern_ogf, &gt)?,
        accuracy(&tern_ep, &gt)?,
        ep_report.sweeps,
        accuracy(&tern_base, &gt)?,
    );
    println!(
        "wrote results.csv, map_ogf.csv, map_ep.csv, map_baseline.csv, run.json to {}",
        out.display()
    );
    Ok(())
}

fn cmd_compare(args: &CompareArgs) -> Result<(), Error> {
    let out = &args.out;
    std::fs::create_dir_all(out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
    write_run_json(out, "compare", args)?;

    let gt = load_map(&args.map)?;
    let lattice = gt.lattice();
    let thresholds = Thresholds::new(args.ro, args.rf)?;
    let kernel = kernel_for(args.sigma, args.cutoff_radius)?;
    let prior = build_prior(&lattice, &kernel, args.backend.into())?;
    let ep_prior = match args.backend {
        BackendArg::Dense => prior.clone(),
        BackendArg::Sparse => build_prior(&lattice, &kernel, Backend::Dense)?,
    };
    let batch = sample_without_repetition(&gt, args.samples, args.seed)?;

    let mut filtered = prior;
    ogf_process(&mut filtered, &batch)?;

    let swept = ep_single_sweep(&ep_prior, &batch)?;
    let max_delta = max_abs_delta(&filtered, &swept);
    let mapdiff_sweep = mean_distance(&filtered, &swept)?;

    let opts = EpOptions { tol: args.ep_tol, max_sweeps: args.ep_max_sweeps };
    let (ep_state, report) = ep_run(&ep_prior, &batch, &opts)?;
    let mapdiff_converged = mean_distance(&filtered, ep_state.posterior())?;

    let acc_ogf = accuracy(&classify(&filtered, &thresholds), &gt)?;
    let acc_sweep = accuracy(&classify(&swept, &thresholds), &gt)?;
    let acc_converged = accuracy(&classify(ep_state.posterior(), &thresholds), &gt)?;

    println!("filter vs one-sweep EP: max entrywise delta {max_delta:.3e}");
    println!(
        "filter vs converged EP: mean distance {mapdiff_converged:.6} after {} sweeps{}",
        report.sweeps,
        if report.converged { "" } else { " (no convergence within budget)" }
    );
    println!("accuracy: filter {acc_ogf:.4}, one-sweep EP {acc_sweep:.4}, converged EP {acc_converged:.4}");

    let csv_path = out.join("compare.csv");
    let text = format!(
        "n,seed,max_delta_sweep,mapdiff_sweep,mapdiff_converged,acc_ogf,acc_sweep,acc_converged,ep_sweeps,ep_converged\n\
         {},{},{max_delta},{mapdiff_sweep},{mapdiff_converged},{acc_ogf},{acc_sweep},{acc_converged},{},{}\n",
        args.samples, args.seed, report.sweeps, report.converged,
    );
    std::fs::write(&csv_path, text).map_err(|e| Error::Io { path: csv_path, source: e })?;
    println!("wrote compare.csv, run.json to {}", out.display());
    Ok(())
}

fn cmd_map3d(args: &Map3dArgs) -> Result<(), Error> {
    let out = &args.out;
    std::fs::create_dir_all(out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
    write_run_json(out, "map3d", args)?;

    let frames = load_scan_frames(&args.poses, &args.scans)?;
    let lattice = fit_lattice(&frames, args.resolution)?;
    let sigma = args.sigma.unwrap_or(0.5 * args.resolution);
    let cutoff = args.cutoff_radius.unwrap_or(3.0 * args.resolution);
    let kernel = KernelConfig::truncated(sigma, cutoff)?;
    let thresholds = Thresholds::new(args.ro, args.rf)?;
    let sensor = SensorConfig::default();

    let (map, ternary, stats) = build_map_3d(
        &frames,
        &lattice,
        &kernel,
        args.backend.into(),
        &thresholds,
        &sensor,
    )?;

    write_ternary_csv(out.join("map.csv"), &map, &ternary)?;
    write_occupied_ply(out.join("occupied.ply"), &map, &ternary)?;
    save_checkpoint(out.join("checkpoint.ogf1"), &map)?;
    write_stats_json(out.join("stats.json"), &stats)?;

    let [dx, dy, dz] = [lattice.dims()[0], lattice.dims()[1], lattice.dims()[2]];
    println!(
        "lattice {dx}×{dy}×{dz} at {} ({} cells); {} measurements taken, {} dropped",
        args.resolution,
        lattice.n_cells(),
        stats.measurements_taken,
        stats.dropped
    );
    println!(
        "cells: {} occupied, {} free, {} unknown",
        stats.occupied_cells, stats.free_cells, stats.unknown_cells
    );
    println!(
        "wrote map.csv, occupied.ply, checkpoint.ogf1, stats.json, run.json to {}",
        out.display()
    );
    Ok(())
}

/// Smallest axis-aligned lattice that contains every sensor position and
/// every finite scan return, padded by one cell on each side.
fn fit_lattice(frames: &[ScanFrame], resolution: f64) -> Result<GridLattice, Error> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::BadLattice { reason: format!("resolution {resolution} must be > 0") });
    }
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    let mut include = |p: [f64; 3]| {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    };
    for frame in frames {
        include(frame.pose.position);
        for &p in &frame.points {
            if p.iter().all(|v| v.is_finite()) {
                include(frame.pose.transform(p));
            }
        }
    }
    if lo.iter().any(|v| !v.is_finite()) {
        return Err(Error::BadLattice {
            reason: "no finite scan data to fit a lattice to".into(),
        });
    }
    let mut dims = [0usize; 3];
    let mut origin = [0.0f64; 3];
    for a in 0..3 {
        origin[a] = lo[a] - resolution;
        // cells own (center − res/2, center + res/2]; one extra cell pads the
        // upper side the same way the origin shift pads the lower side
        dims[a] = ((hi[a] - origin[a]) / resolution + 0.5).ceil() as usize + 1;
    }
    GridLattice::new(&dims, resolution, &origin)
}

fn max_abs_delta(a: &LatentMap, b: &LatentMap) -> f64 {
    let dm = (a.mean() - b.mean()).amax();
    let dc = (a.cov().to_dense() - b.cov().to_dense()).amax();
    dm.max(dc)
}

fn mean_distance(a: &LatentMap, b: &LatentMap) -> Result<f64, Error> {
    let (am, bm) = (a.mean().as_slice(), b.mean().as_slice());
    if am == bm {
        return Ok(0.0);
    }
    map_difference(am, bm)
}
