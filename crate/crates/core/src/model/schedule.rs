use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Cardiac phase. Valves switch instantaneously between the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// Relaxed heart, inflow valve open, outflow valve closed.
    Diastole,
    /// Contracted heart, outflow valve open, inflow valve closed.
    Systole,
}

impl Phase {
    pub fn other(self) -> Phase {
        match self {
            Phase::Diastole => Phase::Systole,
            Phase::Systole => Phase::Diastole,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Diastole => "diastole",
            Phase::Systole => "systole",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Periodic phase schedule. Each cycle starts with diastole on
/// `[0, t_diastole_end)` followed by systole on `[t_diastole_end, period)`.
/// Times are in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSchedule<T> {
    pub period: T,
    pub t_diastole_end: T,
}

impl<T: Scalar> PhaseSchedule<T> {
    /// Builds a schedule from a heart rate (beats/min) and the fraction of
    /// each cycle spent in diastole.
    pub fn from_heart_rate(heart_rate: T, diastole_fraction: T) -> Self {
        let period = T::one() / heart_rate;
        Self {
            period,
            t_diastole_end: diastole_fraction * period,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.period > T::zero()
            && self.t_diastole_end > T::zero()
            && self.t_diastole_end < self.period
    }

    /// Phase at time `t >= 0`.
    pub fn phase_at(&self, t: T) -> Phase {
        if t % self.period < self.t_diastole_end {
            Phase::Diastole
        } else {
            Phase::Systole
        }
    }

    /// Length of one phase interval.
    pub fn duration(&self, phase: Phase) -> T {
        match phase {
            Phase::Diastole => self.t_diastole_end,
            Phase::Systole => self.period - self.t_diastole_end,
        }
    }

    /// The two phase intervals of one cycle, as offsets from the cycle start.
    pub fn intervals(&self) -> [(Phase, T, T); 2] {
        [
            (Phase::Diastole, T::zero(), self.t_diastole_end),
            (Phase::Systole, self.t_diastole_end, self.period),
        ]
    }
}
