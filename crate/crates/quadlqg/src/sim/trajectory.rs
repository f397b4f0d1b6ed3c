use std::io::{self, Write};

use nalgebra::Vector4;
use serde::{Deserialize, Serialize};

use crate::dynamics::{InputVector, StateVector};

/// Schema tag written into trajectory CSV headers.
pub const TRAJECTORY_CSV_SCHEMA: &str = "trajectory-v1";

/// Time-indexed record of a closed-loop rollout. True states, estimates, and
/// applied controls are stored absolutely; estimation and control errors are
/// recomputed exactly from the stored series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub time: Vec<f64>,
    pub states: Vec<StateVector>,
    pub estimates: Vec<StateVector>,
    pub controls: Vec<InputVector>,
    /// Per-rotor thrusts realizing each applied control [N].
    pub rotor_thrusts: Vec<Vector4<f64>>,
    pub saturated: Vec<bool>,
    /// Hold reference (the hover equilibrium state).
    pub reference: StateVector,
    /// Equilibrium input the controller offsets from.
    pub input_reference: InputVector,
    /// Nominal horizon of the run [s]; the series end early on divergence.
    pub horizon: f64,
    pub diverged: bool,
    pub divergence_time: Option<f64>,
    /// Trapezoid of ‖ε̂_ξ‖ accumulated during the run.
    pub(crate) online_position_integral: f64,
    /// Trapezoid of ‖ε̂_η‖ accumulated during the run.
    pub(crate) online_attitude_integral: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    /// e(t_i) = x(t_i) − x̂(t_i).
    pub fn estimation_error(&self, i: usize) -> StateVector {
        self.states[i] - self.estimates[i]
    }

    /// ε̂(t_i) = x̂(t_i) − x_ref.
    pub fn control_error(&self, i: usize) -> StateVector {
        self.estimates[i] - self.reference
    }

    /// x(t_i) − x_ref; the true-state counterpart of [`Self::control_error`].
    pub fn tracking_error(&self, i: usize) -> StateVector {
        self.states[i] - self.reference
    }

    pub fn csv_header() -> String {
        let mut cols: Vec<String> = vec!["t".into()];
        let fields = [
            "pos_x", "pos_y", "pos_z", "vel_x", "vel_y", "vel_z", "roll", "pitch", "yaw",
            "rate_p", "rate_q", "rate_r",
        ];
        cols.extend(fields.iter().map(|f| f.to_string()));
        cols.extend(fields.iter().map(|f| format!("est_{f}")));
        cols.extend(["u_thrust", "u_roll", "u_pitch", "u_yaw"].map(String::from));
        cols.extend((1..=4).map(|i| format!("rotor{i}_thrust")));
        cols.push("saturated".into());
        cols.join(",")
    }

    /// Writes the rollout as CSV. The header carries the schema tag and, when
    /// given, a timestamp line; everything below it is deterministic.
    pub fn write_csv<W: Write>(&self, out: &mut W, timestamp: Option<&str>) -> io::Result<()> {
        writeln!(out, "# schema: {TRAJECTORY_CSV_SCHEMA}")?;
        if let Some(ts) = timestamp {
            writeln!(out, "# generated: {ts}")?;
        }
        writeln!(out, "# diverged: {}", self.diverged)?;
        writeln!(out, "{}", Self::csv_header())?;
        for i in 0..self.len() {
            let mut row = String::with_capacity(512);
            row.push_str(&format!("{}", self.time[i]));
            for v in self.states[i].iter() {
                row.push_str(&format!(",{v}"));
            }
            for v in self.estimates[i].iter() {
                row.push_str(&format!(",{v}"));
            }
            for v in self.controls[i].iter() {
                row.push_str(&format!(",{v}"));
            }
            for v in self.rotor_thrusts[i].iter() {
                row.push_str(&format!(",{v}"));
            }
            row.push_str(if self.saturated[i] { ",1" } else { ",0" });
            writeln!(out, "{row}")?;
        }
        Ok(())
    }
}

/// Trapezoid quadrature over a uniformly gridded series, accumulated in index
/// order so online and offline evaluations agree bit for bit.
pub(crate) fn trapezoid(values: &[f64], dt: f64) -> f64 {
    let mut acc = 0.0;
    for k in 0..values.len().saturating_sub(1) {
        acc += 0.5 * (values[k] + values[k + 1]) * dt;
    }
    acc
}
