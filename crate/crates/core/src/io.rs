//! File formats: map exports, measurement logs, filter checkpoints, and the
//! pose/scan inputs of the 3-D pipeline.
//!
//! Everything here is line-oriented text (CSV, JSON, ASCII grids, ASCII PLY)
//! except the filter checkpoint, which is a little-endian binary dump tagged
//! with the magic string `OGF1`. Floating-point values in the text formats
//! are written with Rust's shortest round-trip representation, so a write →
//! read cycle reproduces every number bitwise and identical inputs produce
//! byte-identical files.
//!
//! Checkpoint layout (all integers and floats little-endian):
//!
//! ```text
//! magic      4 bytes   "OGF1"
//! backend    u8        0 = dense, 1 = sparse
//! ndims      u8        1..=3
//! dims       ndims × u64
//! resolution f64
//! origin     ndims × f64
//! n          u64       product of dims, written for self-checking
//! mean       n × f64
//! dense:     n × n × f64, column-major
//! sparse:    per cell: u64 entry count, then the sorted neighbor indices
//!            (u32 each), then the matching covariance values (f64 each)
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::cloud::{Map3dStats, Pose, ScanFrame};
use crate::error::{Error, Result};
use crate::grid::{GridLattice, Label, Measurement, TernaryMap};
use crate::logodds::LogOddsMap;
use crate::map::{Cov, LatentMap, SparseCov};
use crate::sim2d::GroundTruthMap;

/// Magic string identifying a filter checkpoint file.
pub const CHECKPOINT_MAGIC: &[u8; 4] = b"OGF1";

const TERNARY_HEADER: &str = "cx,cy,cz,state,mean,variance";
const LOG_HEADER: &str = "t,cell,y";
const POSES_HEADER: &str = "t,x,y,z,qw,qx,qy,qz";
const SCANS_HEADER: &str = "t,x,y,z";

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.to_path_buf(), source }
}

fn parse_err(path: &Path, line: usize, reason: impl Into<String>) -> Error {
    Error::Parse { path: path.to_path_buf(), line, reason: reason.into() }
}

fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| io_err(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Splits a headed CSV file into `(line_number, fields)` records.
///
/// The first line must equal `header` exactly; every data line must have the
/// same number of comma-separated fields as the header. Blank lines are
/// skipped so trailing newlines are harmless.
fn csv_records<'a>(
    path: &Path,
    text: &'a str,
    header: &str,
) -> Result<Vec<(usize, Vec<&'a str>)>> {
    let ncols = header.split(',').count();
    let mut records = Vec::new();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, first)) if first.trim() == header => {}
        Some((_, first)) => {
            return Err(parse_err(
                path,
                1,
                format!("expected header {header:?}, got {:?}", first.trim()),
            ))
        }
        None => return Err(parse_err(path, 1, format!("empty file, expected header {header:?}"))),
    }
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != ncols {
            return Err(parse_err(
                path,
                idx + 1,
                format!("expected {ncols} fields, got {}", fields.len()),
            ));
        }
        records.push((idx + 1, fields));
    }
    Ok(records)
}

fn field<T: FromStr>(path: &Path, line: usize, name: &str, raw: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse()
        .map_err(|e| parse_err(path, line, format!("bad {name} {raw:?}: {e}")))
}

// ---------------------------------------------------------------------------
// Map exports
// ---------------------------------------------------------------------------

/// Writes the full map as CSV: `cx,cy,cz,state,mean,variance`, one row per
/// cell in linear-index order. Axes the lattice does not have are written
/// as 0.
pub fn write_ternary_csv(
    path: impl AsRef<Path>,
    map: &LatentMap,
    ternary: &TernaryMap,
) -> Result<()> {
    let path = path.as_ref();
    if ternary.len() != map.n_cells() {
        return Err(Error::LengthMismatch { left: ternary.len(), right: map.n_cells() });
    }
    let mut out = String::new();
    out.push_str(TERNARY_HEADER);
    out.push('\n');
    for i in 0..map.n_cells() {
        let [cx, cy, cz] = map.lattice().cell_coords(i);
        let state = ternary.states[i];
        let mean = map.mean()[i];
        let variance = map.variance(i);
        out.push_str(&format!("{cx},{cy},{cz},{state},{mean},{variance}\n"));
    }
    write_bytes(path, out.as_bytes())
}

/// Writes a log-odds map in the same CSV schema as [`write_ternary_csv`].
///
/// The `mean` column carries the cell's log-odds (its continuous state); the
/// `variance` column is 0 for every cell, because the baseline tracks no
/// uncertainty.
pub fn write_logodds_csv(
    path: impl AsRef<Path>,
    map: &LogOddsMap,
    ternary: &TernaryMap,
) -> Result<()> {
    let path = path.as_ref();
    if ternary.len() != map.lattice().n_cells() {
        return Err(Error::LengthMismatch {
            left: ternary.len(),
            right: map.lattice().n_cells(),
        });
    }
    let mut out = String::new();
    out.push_str(TERNARY_HEADER);
    out.push('\n');
    for (i, &l) in map.logodds().iter().enumerate() {
        let [cx, cy, cz] = map.lattice().cell_coords(i);
        let state = ternary.states[i];
        out.push_str(&format!("{cx},{cy},{cz},{state},{l},0\n"));
    }
    write_bytes(path, out.as_bytes())
}

/// Writes the occupied cells as an ASCII PLY point cloud, one vertex per
/// occupied cell center.
pub fn write_occupied_ply(
    path: impl AsRef<Path>,
    map: &LatentMap,
    ternary: &TernaryMap,
) -> Result<()> {
    let path = path.as_ref();
    if ternary.len() != map.n_cells() {
        return Err(Error::LengthMismatch { left: ternary.len(), right: map.n_cells() });
    }
    let occupied: Vec<usize> = (0..map.n_cells()).filter(|&i| ternary.states[i] == 1).collect();
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    out.push_str(&format!("element vertex {}\n", occupied.len()));
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    out.push_str("end_header\n");
    for i in occupied {
        let [x, y, z] = map.lattice().cell_to_world(i);
        out.push_str(&format!("{x} {y} {z}\n"));
    }
    write_bytes(path, out.as_bytes())
}

// ---------------------------------------------------------------------------
// Measurement logs
// ---------------------------------------------------------------------------

/// Writes a measurement sequence as CSV: `t,cell,y` with y ∈ {1, -1}.
pub fn write_measurement_log(path: impl AsRef<Path>, log: &[Measurement]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(LOG_HEADER);
    out.push('\n');
    for m in log {
        let y = match m.label {
            Label::Occupied => 1,
            Label::Free => -1,
        };
        out.push_str(&format!("{},{},{}\n", m.time, m.cell, y));
    }
    write_bytes(path, out.as_bytes())
}

/// Reads a `t,cell,y` measurement log. Cell indices are not bounds-checked
/// here; the filter validates them against its lattice when processing.
pub fn read_measurement_log(path: impl AsRef<Path>) -> Result<Vec<Measurement>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut log = Vec::new();
    for (line, fields) in csv_records(path, &text, LOG_HEADER)? {
        let time: u64 = field(path, line, "t", fields[0])?;
        let cell: usize = field(path, line, "cell", fields[1])?;
        let y: i8 = field(path, line, "y", fields[2])?;
        let label = Label::from_sign(y)
            .ok_or_else(|| parse_err(path, line, format!("y must be 1 or -1, got {y}")))?;
        log.push(Measurement::new(cell, label, time));
    }
    Ok(log)
}

// ---------------------------------------------------------------------------
// Filter checkpoints
// ---------------------------------------------------------------------------

struct BinWriter<'p, W> {
    w: W,
    path: &'p Path,
}

impl<'p, W: Write> BinWriter<'p, W> {
    fn bytes(&mut self, b: &[u8]) -> Result<()> {
        self.w.write_all(b).map_err(|e| io_err(self.path, e))
    }

    fn u8(&mut self, v: u8) -> Result<()> {
        self.bytes(&[v])
    }

    fn u32(&mut self, v: u32) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    fn u64(&mut self, v: u64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    fn f64(&mut self, v: f64) -> Result<()> {
        self.bytes(&v.to_le_bytes())
    }

    fn finish(mut self) -> Result<()> {
        self.w.flush().map_err(|e| io_err(self.path, e))
    }
}

struct BinReader<'p, R> {
    r: R,
    path: &'p Path,
}

impl<'p, R: Read> BinReader<'p, R> {
    fn bytes<const K: usize>(&mut self) -> Result<[u8; K]> {
        let mut b = [0u8; K];
        self.r.read_exact(&mut b).map_err(|e| io_err(self.path, e))?;
        Ok(b)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes()?))
    }
}

fn checkpoint_err(reason: impl Into<String>) -> Error {
    Error::Checkpoint { reason: reason.into() }
}

/// Saves the full filter state (lattice, mean, covariance) so processing can
/// resume later. Loading reproduces the state bitwise.
pub fn save_checkpoint(path: impl AsRef<Path>, map: &LatentMap) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BinWriter { w: BufWriter::new(file), path };
    w.bytes(CHECKPOINT_MAGIC)?;
    let lattice = map.lattice();
    w.u8(match map.cov() {
        Cov::Dense(_) => 0,
        Cov::Sparse(_) => 1,
    })?;
    w.u8(lattice.ndims() as u8)?;
    for &d in lattice.dims() {
        w.u64(d as u64)?;
    }
    w.f64(lattice.resolution())?;
    for &o in lattice.origin() {
        w.f64(o)?;
    }
    let n = map.n_cells();
    w.u64(n as u64)?;
    for i in 0..n {
        w.f64(map.mean()[i])?;
    }
    match map.cov() {
        Cov::Dense(m) => {
            for &v in m.as_slice() {
                w.f64(v)?;
            }
        }
        Cov::Sparse(s) => {
            for i in 0..n {
                let pattern = &s.pattern()[i];
                w.u64(pattern.len() as u64)?;
                for &j in pattern {
                    w.u32(j)?;
                }
                for &v in &s.values()[i] {
                    w.f64(v)?;
                }
            }
        }
    }
    w.finish()
}

/// Loads a checkpoint written by [`save_checkpoint`].
pub fn load_checkpoint(path: impl AsRef<Path>) -> Result<LatentMap> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = BinReader { r: BufReader::new(file), path };
    let magic: [u8; 4] = r.bytes()?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(checkpoint_err(format!("bad magic {magic:?}, expected {CHECKPOINT_MAGIC:?}")));
    }
    let backend = r.u8()?;
    let ndims = r.u8()? as usize;
    if !(1..=3).contains(&ndims) {
        return Err(checkpoint_err(format!("lattice has {ndims} axes, expected 1-3")));
    }
    let mut dims = Vec::with_capacity(ndims);
    for _ in 0..ndims {
        dims.push(r.u64()? as usize);
    }
    let resolution = r.f64()?;
    let mut origin = Vec::with_capacity(ndims);
    for _ in 0..ndims {
        origin.push(r.f64()?);
    }
    let lattice = GridLattice::new(&dims, resolution, &origin)?;
    let n = r.u64()? as usize;
    if n != lattice.n_cells() {
        return Err(checkpoint_err(format!(
            "cell count {n} does not match lattice dims {dims:?}"
        )));
    }
    let mut mean = Vec::with_capacity(n);
    for _ in 0..n {
        mean.push(r.f64()?);
    }
    let cov = match backend {
        0 => {
            let mut entries = Vec::with_capacity(n * n);
            for _ in 0..n * n {
                entries.push(r.f64()?);
            }
            Cov::Dense(DMatrix::from_column_slice(n, n, &entries))
        }
        1 => {
            let mut pattern = Vec::with_capacity(n);
            let mut values = Vec::with_capacity(n);
            for i in 0..n {
                let len = r.u64()? as usize;
                let mut idx = Vec::with_capacity(len);
                for _ in 0..len {
                    idx.push(r.u32()?);
                }
                let mut vals = Vec::with_capacity(len);
                for _ in 0..len {
                    vals.push(r.f64()?);
                }
                if !idx.windows(2).all(|w| w[0] < w[1]) {
                    return Err(checkpoint_err(format!("cell {i}: neighbor list not sorted")));
                }
                if idx.last().is_some_and(|&j| j as usize >= n) {
                    return Err(checkpoint_err(format!("cell {i}: neighbor index out of range")));
                }
                if idx.binary_search(&(i as u32)).is_err() {
                    return Err(checkpoint_err(format!("cell {i}: pattern misses the cell itself")));
                }
                pattern.push(idx);
                values.push(vals);
            }
            for i in 0..n {
                for &j in &pattern[i] {
                    if pattern[j as usize].binary_search(&(i as u32)).is_err() {
                        return Err(checkpoint_err(format!(
                            "asymmetric pattern: cell {i} lists {j} but not vice versa"
                        )));
                    }
                }
            }
            Cov::Sparse(SparseCov::new(pattern, values))
        }
        other => return Err(checkpoint_err(format!("unknown backend tag {other}"))),
    };
    LatentMap::from_parts(lattice, DVector::from_vec(mean), cov)
}

// ---------------------------------------------------------------------------
// Ground-truth grids
// ---------------------------------------------------------------------------

/// Reads an ASCII ground-truth grid (`#` occupied, `.` free).
pub fn load_ground_truth(path: impl AsRef<Path>) -> Result<GroundTruthMap> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    GroundTruthMap::parse_named(&text, path)
}

/// Writes a ground-truth grid in the same ASCII format [`load_ground_truth`]
/// reads.
pub fn save_ground_truth(path: impl AsRef<Path>, map: &GroundTruthMap) -> Result<()> {
    write_bytes(path.as_ref(), map.render().as_bytes())
}

// ---------------------------------------------------------------------------
// Poses and scans
// ---------------------------------------------------------------------------

/// One scan's worth of sensor-frame returns, before a pose is attached.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedScan {
    pub time: f64,
    pub points: Vec<[f64; 3]>,
}

/// Reads a pose trajectory: CSV `t,x,y,z,qw,qx,qy,qz`. Each row must be a
/// valid pose (finite, quaternion normalized).
pub fn read_poses(path: impl AsRef<Path>) -> Result<Vec<Pose>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut poses = Vec::new();
    for (line, f) in csv_records(path, &text, POSES_HEADER)? {
        let t: f64 = field(path, line, "t", f[0])?;
        let x: f64 = field(path, line, "x", f[1])?;
        let y: f64 = field(path, line, "y", f[2])?;
        let z: f64 = field(path, line, "z", f[3])?;
        let qw: f64 = field(path, line, "qw", f[4])?;
        let qx: f64 = field(path, line, "qx", f[5])?;
        let qy: f64 = field(path, line, "qy", f[6])?;
        let qz: f64 = field(path, line, "qz", f[7])?;
        let pose = Pose::new(t, [x, y, z], [qw, qx, qy, qz])
            .map_err(|e| parse_err(path, line, e.to_string()))?;
        poses.push(pose);
    }
    Ok(poses)
}

/// Writes a pose trajectory in the format [`read_poses`] reads.
pub fn write_poses(path: impl AsRef<Path>, poses: &[Pose]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(POSES_HEADER);
    out.push('\n');
    for p in poses {
        let [x, y, z] = p.position;
        let [qw, qx, qy, qz] = p.orientation;
        out.push_str(&format!("{},{x},{y},{z},{qw},{qx},{qy},{qz}\n", p.time));
    }
    write_bytes(path, out.as_bytes())
}

/// Reads scan returns: CSV `t,x,y,z` with rows grouped by scan time, groups
/// in ascending order. Consecutive rows sharing a `t` form one scan.
pub fn read_scans(path: impl AsRef<Path>) -> Result<Vec<TimedScan>> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let mut scans: Vec<TimedScan> = Vec::new();
    for (line, f) in csv_records(path, &text, SCANS_HEADER)? {
        let t: f64 = field(path, line, "t", f[0])?;
        if !t.is_finite() {
            return Err(parse_err(path, line, format!("scan time {t} is not finite")));
        }
        let x: f64 = field(path, line, "x", f[1])?;
        let y: f64 = field(path, line, "y", f[2])?;
        let z: f64 = field(path, line, "z", f[3])?;
        match scans.last_mut() {
            Some(scan) if scan.time == t => scan.points.push([x, y, z]),
            Some(scan) if scan.time > t => {
                return Err(parse_err(
                    path,
                    line,
                    format!("scan times must ascend: {t} after {}", scan.time),
                ))
            }
            _ => scans.push(TimedScan { time: t, points: vec![[x, y, z]] }),
        }
    }
    Ok(scans)
}

/// Writes scan frames in the format [`read_scans`] reads, stamping every
/// point of a frame with the frame's pose time.
pub fn write_scans(path: impl AsRef<Path>, frames: &[ScanFrame]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    out.push_str(SCANS_HEADER);
    out.push('\n');
    for frame in frames {
        for [x, y, z] in &frame.points {
            out.push_str(&format!("{},{x},{y},{z}\n", frame.pose.time));
        }
    }
    write_bytes(path, out.as_bytes())
}

/// Reads poses and scans and attaches to each scan the pose stamped nearest
/// its scan time (ties go to the earlier pose). There is no interpolation;
/// a scan is rigidly attached to one pose.
pub fn load_scan_frames(
    poses_path: impl AsRef<Path>,
    scans_path: impl AsRef<Path>,
) -> Result<Vec<ScanFrame>> {
    let poses_path = poses_path.as_ref();
    let mut poses = read_poses(poses_path)?;
    let scans = read_scans(scans_path)?;
    if poses.is_empty() && !scans.is_empty() {
        return Err(parse_err(poses_path, 1, "no pose rows to attach scans to"));
    }
    poses.sort_by(|a, b| a.time.total_cmp(&b.time));
    let frames = scans
        .into_iter()
        .map(|scan| {
            let at = poses.partition_point(|p| p.time < scan.time);
            let after = poses.get(at);
            let before = at.checked_sub(1).map(|i| &poses[i]);
            let pose = match (before, after) {
                (Some(b), Some(a)) if (scan.time - b.time) <= (a.time - scan.time) => b,
                (_, Some(a)) => a,
                (Some(b), None) => b,
                (None, None) => unreachable!("poses checked non-empty"),
            };
            ScanFrame { pose: *pose, points: scan.points }
        })
        .collect();
    Ok(frames)
}

// ---------------------------------------------------------------------------
// Run statistics
// ---------------------------------------------------------------------------

/// Writes the 3-D pipeline summary as pretty-printed JSON.
pub fn write_stats_json(path: impl AsRef<Path>, stats: &Map3dStats) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = serde_json::to_vec_pretty(stats)
        .map_err(|e| checkpoint_err(format!("stats json: {e}")))?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}
