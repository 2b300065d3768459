//! Residual-based servo fault detection.
//!
//! Each servo has an onboard replica driven with the same command. The
//! residual `r = |y_model - y_measured|` must exceed the threshold for N
//! consecutive samples before the (latched) flag is raised.

use serde::{Deserialize, Serialize};

use crate::actuation::ServoModel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultConfig {
    pub threshold_rad: f64,
    pub consecutive_samples: u32,
}

impl Default for FaultConfig {
    fn default() -> Self {
        Self {
            threshold_rad: 0.02,
            consecutive_samples: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultFlag {
    pub servo: usize,
    pub t: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaultMonitor {
    config: FaultConfig,
    replicas: [ServoModel; 4],
    counts: [u32; 4],
    residuals: [f64; 4],
    flag: Option<FaultFlag>,
}

impl FaultMonitor {
    pub fn new(config: FaultConfig, servo: ServoModel) -> Self {
        assert!(config.threshold_rad > 0.0, "fault threshold must be positive");
        Self {
            config,
            replicas: [servo; 4],
            counts: [0; 4],
            residuals: [0.0; 4],
            flag: None,
        }
    }

    pub fn residuals(&self) -> [f64; 4] {
        self.residuals
    }

    pub fn replica_outputs(&self) -> [f64; 4] {
        self.replicas.map(|r| r.output())
    }

    pub fn replica(&self, i: usize) -> &ServoModel {
        &self.replicas[i]
    }

    pub fn flag(&self) -> Option<FaultFlag> {
        self.flag
    }

    /// Advances the replicas under `commanded` and compares with the
    /// measured deflections after the same interval. Returns the latched flag.
    pub fn update(&mut self, t: f64, commanded: [f64; 4], measured: [f64; 4], dt: f64) -> Option<FaultFlag> {
        for i in 0..4 {
            let y = self.replicas[i].step(commanded[i], dt);
            let r = (y - measured[i]).abs();
            self.residuals[i] = r;
            self.counts[i] = if r > self.config.threshold_rad {
                self.counts[i] + 1
            } else {
                0
            };
            if self.flag.is_none() && self.counts[i] >= self.config.consecutive_samples {
                self.flag = Some(FaultFlag { servo: i, t, residual: r });
            }
        }
        self.flag
    }
}
