//! Classical independent-cell log-odds occupancy grid — the baseline mapper.
//!
//! Each cell carries its own Bernoulli belief in log-odds form; observations
//! add a fixed hit or miss increment, clamped to keep cells revisable. There
//! is no coupling between cells, which is exactly the modeling gap the
//! latent-field filter closes: under noise-free, non-repeated sampling this
//! baseline can never say anything about an unmeasured cell.

use crate::error::{Error, Result};
use crate::grid::{GridLattice, Measurement, TernaryMap, Thresholds};

/// Per-cell independent log-odds state.
#[derive(Debug, Clone)]
pub struct LogOddsMap {
    lattice: GridLattice,
    logodds: Vec<f64>,
    l_hit: f64,
    l_miss: f64,
    l_min: f64,
    l_max: f64,
}

impl LogOddsMap {
    /// A fresh map at uniform 0.5 occupancy with the default increments
    /// p(hit) = 0.7, p(miss) = 0.4 and clamps ±3.5.
    pub fn new(lattice: GridLattice) -> Self {
        let n = lattice.n_cells();
        LogOddsMap {
            lattice,
            logodds: vec![0.0; n],
            l_hit: (0.7f64 / 0.3).ln(),
            l_miss: (0.4f64 / 0.6).ln(),
            l_min: -3.5,
            l_max: 3.5,
        }
    }

    /// Overrides the observation model constants; bounds must satisfy
    /// l_min < 0 < l_max, increments must push in the right direction.
    pub fn with_model(mut self, l_hit: f64, l_miss: f64, l_min: f64, l_max: f64) -> Self {
        assert!(l_hit > 0.0 && l_miss < 0.0, "increments must move toward their label");
        assert!(l_min < 0.0 && l_max > 0.0, "clamps must bracket the prior");
        self.l_hit = l_hit;
        self.l_miss = l_miss;
        self.l_min = l_min;
        self.l_max = l_max;
        self
    }

    pub fn lattice(&self) -> &GridLattice {
        &self.lattice
    }

    pub fn logodds(&self) -> &[f64] {
        &self.logodds
    }

    /// Occupancy probability of one cell, p = 1/(1+exp(−l)).
    pub fn probability(&self, cell: usize) -> f64 {
        1.0 / (1.0 + (-self.logodds[cell]).exp())
    }
}

/// Adds one observation's increment to its cell, clamped.
pub fn logodds_update(map: &mut LogOddsMap, meas: &Measurement) -> Result<()> {
    let n = map.logodds.len();
    if meas.cell >= n {
        return Err(Error::InvalidCell { cell: meas.cell, n_cells: n });
    }
    let delta = if meas.label.sign() > 0.0 { map.l_hit } else { map.l_miss };
    let l = &mut map.logodds[meas.cell];
    *l = (*l + delta).clamp(map.l_min, map.l_max);
    Ok(())
}

/// Thresholds each cell's occupancy probability into occupied/free/unknown.
pub fn logodds_classify(map: &LogOddsMap, th: &Thresholds) -> TernaryMap {
    let states = (0..map.logodds.len())
        .map(|c| {
            let p = map.probability(c);
            if p > th.r_o {
                1
            } else if p < th.r_f {
                -1
            } else {
                0
            }
        })
        .collect();
    TernaryMap { states }
}
