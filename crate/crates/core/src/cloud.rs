//! Pose-stamped point clouds → per-cell measurements → 3-D occupancy map.
//!
//! Each scan return is cast as a ray from the sensor position to the world
//! endpoint: every traversed cell before the endpoint is a free candidate
//! (y = −1), the endpoint cell an occupied candidate (y = +1). Returns beyond
//! the max range or outside the lattice contribute free candidates along the
//! clipped ray only. A [`CellObservationLedger`] then downsamples candidates
//! to at most one measurement per cell, with one exception: a cell measured
//! free may later be re-measured occupied (an occupied return is trusted over
//! an earlier pass-through), after which the cell is closed for good.
//!
//! Scan processing is strictly sequential — the filter is order-dependent —
//! and rays within a scan are processed in point order, so a scan sequence
//! maps to exactly one measurement stream.

use nalgebra::{Quaternion, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filter::ogf_process;
use crate::grid::{classify, GridLattice, Label, Measurement, TernaryMap, Thresholds};
use crate::kernel::{build_prior, Backend, KernelConfig};
use crate::map::LatentMap;
use crate::ray::ray_traverse;

/// A stamped sensor pose: position and orientation of the sensor frame in
/// world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub time: f64,
    /// Sensor position in meters.
    pub position: [f64; 3],
    /// Unit quaternion (w, x, y, z) rotating sensor-frame vectors into the
    /// world frame.
    pub orientation: [f64; 4],
}

impl Pose {
    /// Validates that the quaternion norm is within 1e-6 of one and that all
    /// components are finite.
    pub fn new(time: f64, position: [f64; 3], orientation: [f64; 4]) -> Result<Self> {
        if !time.is_finite()
            || position.iter().any(|v| !v.is_finite())
            || orientation.iter().any(|v| !v.is_finite())
        {
            return Err(Error::BadPose { reason: "non-finite component".into() });
        }
        let norm = orientation.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::BadPose {
                reason: format!("quaternion norm {norm} deviates from 1 by more than 1e-6"),
            });
        }
        Ok(Pose { time, position, orientation })
    }

    /// Identity orientation at the given position.
    pub fn stationary(time: f64, position: [f64; 3]) -> Self {
        Pose { time, position, orientation: [1.0, 0.0, 0.0, 0.0] }
    }

    /// Maps a sensor-frame point to world coordinates.
    pub fn transform(&self, p_sensor: [f64; 3]) -> [f64; 3] {
        let [w, x, y, z] = self.orientation;
        let q = UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z));
        let v = q.transform_vector(&Vector3::new(p_sensor[0], p_sensor[1], p_sensor[2]));
        [
            self.position[0] + v.x,
            self.position[1] + v.y,
            self.position[2] + v.z,
        ]
    }
}

/// One lidar scan: a pose plus the returns in the sensor frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanFrame {
    pub pose: Pose,
    pub points: Vec<[f64; 3]>,
}

/// Measurement history of a single cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellStatus {
    NeverMeasured,
    MeasuredFree,
    MeasuredOccupied,
}

/// Per-cell downsampling filter: at most one measurement per cell, except
/// that a free cell may be promoted to occupied once. Occupied is absorbing.
#[derive(Debug, Clone)]
pub struct CellObservationLedger {
    status: Vec<CellStatus>,
}

impl CellObservationLedger {
    pub fn new(n_cells: usize) -> Self {
        CellObservationLedger { status: vec![CellStatus::NeverMeasured; n_cells] }
    }

    pub fn status(&self, cell: usize) -> CellStatus {
        self.status[cell]
    }

    /// Applies the priority rule to a candidate: returns whether the
    /// measurement should be taken, updating the cell's status if so.
    pub fn admit(&mut self, cell: usize, label: Label) -> bool {
        use CellStatus::*;
        let next = match (self.status[cell], label) {
            (NeverMeasured, Label::Free) => MeasuredFree,
            (NeverMeasured, Label::Occupied) | (MeasuredFree, Label::Occupied) => MeasuredOccupied,
            _ => return false,
        };
        self.status[cell] = next;
        true
    }
}

/// Sensor trust limits for measurement extraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorConfig {
    /// Returns farther than this (sensor-frame distance, meters) are treated
    /// as misses: the ray is clipped here and contributes only free evidence.
    pub max_range: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig { max_range: 100.0 }
    }
}

/// Measurements taken from one scan, plus the candidates the ledger dropped.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub measurements: Vec<Measurement>,
    pub dropped: usize,
}

/// Converts one scan into ledger-filtered measurements.
///
/// Occupied candidates take priority over free ones *within the scan* too:
/// rays are traversed first, and a cell any ray ends in this scan never takes
/// a same-scan pass-through free candidate. Without this a beam grazing a
/// wall cell on its way to a neighbor would feed the filter a free
/// measurement that the later hit can only partially cancel, leaving the cell
/// unknown.
///
/// Measurements are stamped `time_base, time_base + 1, …` in emission order
/// (candidates resolved in point order, cells in traversal order). The sensor
/// position must lie inside the lattice; endpoints may lie anywhere
/// (clipped). Non-finite points are skipped and counted as dropped.
pub fn extract_measurements(
    frame: &ScanFrame,
    lattice: &GridLattice,
    ledger: &mut CellObservationLedger,
    sensor: &SensorConfig,
    time_base: u64,
) -> Result<Extraction> {
    assert_eq!(lattice.ndims(), 3, "the scan pipeline needs a 3-axis lattice");
    let origin = frame.pose.position;
    let mut out = Extraction { measurements: Vec::new(), dropped: 0 };

    let mut rays: Vec<(Vec<usize>, bool)> = Vec::with_capacity(frame.points.len());
    let mut hit_cells = std::collections::HashSet::new();
    for &p in &frame.points {
        if p.iter().any(|v| !v.is_finite()) {
            out.dropped += 1;
            continue;
        }
        let range = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
        let in_range = range <= sensor.max_range;
        let p_clipped = if in_range || range == 0.0 {
            p
        } else {
            let s = sensor.max_range / range;
            [p[0] * s, p[1] * s, p[2] * s]
        };
        let endpoint = frame.pose.transform(p_clipped);
        let cells = ray_traverse(lattice, &origin, &endpoint)?;
        // the return itself is evidence of occupancy only if it is trusted
        // (within range) and its cell lies inside the lattice
        let hit = in_range && lattice.world_to_cell(&endpoint) == cells.last().copied();
        if hit {
            hit_cells.insert(*cells.last().expect("traversal is never empty"));
        }
        rays.push((cells, hit));
    }

    let mut t = time_base;
    for (cells, hit) in &rays {
        for (k, &cell) in cells.iter().enumerate() {
            let label =
                if *hit && k + 1 == cells.len() { Label::Occupied } else { Label::Free };
            let suppressed = label == Label::Free && hit_cells.contains(&cell);
            if !suppressed && ledger.admit(cell, label) {
                out.measurements.push(Measurement::new(cell, label, t));
                t += 1;
            } else {
                out.dropped += 1;
            }
        }
    }
    Ok(out)
}

/// Cell and measurement tallies for one mapping run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Map3dStats {
    pub measurements_taken: usize,
    pub dropped: usize,
    pub occupied_cells: usize,
    pub free_cells: usize,
    pub unknown_cells: usize,
}

/// Folds a scan sequence (processed in pose-time order) into a map.
pub fn build_map_3d(
    scans: &[ScanFrame],
    lattice: &GridLattice,
    kernel: &KernelConfig,
    backend: Backend,
    thresholds: &Thresholds,
    sensor: &SensorConfig,
) -> Result<(LatentMap, TernaryMap, Map3dStats)> {
    let mut order: Vec<usize> = (0..scans.len()).collect();
    order.sort_by(|&a, &b| scans[a].pose.time.total_cmp(&scans[b].pose.time));

    let mut map = build_prior(lattice, kernel, backend)?;
    let mut ledger = CellObservationLedger::new(lattice.n_cells());
    let mut taken = 0usize;
    let mut dropped = 0usize;
    for &s in &order {
        let ex = extract_measurements(&scans[s], lattice, &mut ledger, sensor, taken as u64)?;
        ogf_process(&mut map, &ex.measurements)?;
        taken += ex.measurements.len();
        dropped += ex.dropped;
    }
    let ternary = classify(&map, thresholds);
    let (occupied_cells, free_cells, unknown_cells) = ternary.counts();
    let stats = Map3dStats {
        measurements_taken: taken,
        dropped,
        occupied_cells,
        free_cells,
        unknown_cells,
    };
    Ok((map, ternary, stats))
}

/// Kernel matching the 3-D defaults: standard deviation of half a cell and a
/// truncation radius of three cells, so each sparse update touches a 7×7×7
/// neighborhood.
pub fn default_scan_kernel(resolution: f64) -> Result<KernelConfig> {
    KernelConfig::truncated(0.5 * resolution, 3.0 * resolution)
}

/// Axis-aligned rectangular room for synthetic scenes: the four values are
/// the world coordinates of the wall-cell *center* planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallBox {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
}

impl WallBox {
    /// Range from `sensor` along the horizontal direction `(dx, dy)` to the
    /// first wall-center plane (the sensor must be between the walls).
    fn range(&self, sensor: [f64; 3], dx: f64, dy: f64) -> f64 {
        let tx = if dx > 0.0 {
            (self.xmax - sensor[0]) / dx
        } else if dx < 0.0 {
            (self.xmin - sensor[0]) / dx
        } else {
            f64::INFINITY
        };
        let ty = if dy > 0.0 {
            (self.ymax - sensor[1]) / dy
        } else if dy < 0.0 {
            (self.ymin - sensor[1]) / dy
        } else {
            f64::INFINITY
        };
        tx.min(ty)
    }

    /// Linear indices of the wall-ring cells at one z layer (cells whose
    /// centers lie on a wall plane within the ring's extent).
    pub fn wall_cells(&self, lattice: &GridLattice, z_layer: usize) -> Vec<usize> {
        let tol = 0.25 * lattice.resolution();
        let mut out = Vec::new();
        for c in 0..lattice.n_cells() {
            let coords = lattice.cell_coords(c);
            if coords[2] != z_layer {
                continue;
            }
            let p = lattice.cell_to_world(c);
            let on_x = (p[0] - self.xmin).abs() < tol || (p[0] - self.xmax).abs() < tol;
            let on_y = (p[1] - self.ymin).abs() < tol || (p[1] - self.ymax).abs() < tol;
            let in_x = p[0] > self.xmin - tol && p[0] < self.xmax + tol;
            let in_y = p[1] > self.ymin - tol && p[1] < self.ymax + tol;
            if (on_x && in_y) || (on_y && in_x) {
                out.push(c);
            }
        }
        out
    }
}

/// Simulates one horizontal lidar sweep from inside a [`WallBox`]: `beams`
/// equally spaced azimuths (offset half a step so no beam is exactly
/// axis-aligned), each returning at the first wall-center plane it reaches.
///
/// The pose has identity orientation, so sensor-frame points are world
/// offsets. Useful as a synthetic scene with exactly known geometry.
pub fn room_sweep(time: f64, sensor: [f64; 3], walls: &WallBox, beams: usize) -> ScanFrame {
    let mut points = Vec::with_capacity(beams);
    for k in 0..beams {
        let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / beams as f64;
        let (dy, dx) = theta.sin_cos();
        let r = walls.range(sensor, dx, dy);
        points.push([r * dx, r * dy, 0.0]);
    }
    ScanFrame { pose: Pose::stationary(time, sensor), points }
}
