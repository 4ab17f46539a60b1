//! Spatial domains, their heart couplings, and the two circulation layouts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{HeartCoupling, Phase, SpatialProfile};
use crate::pde::conductivity::{conductivity, conductivity_dp};
use crate::scalar::Scalar;

/// Sign convention for the dynamic boundary equation at a right-hand end.
///
/// `Printed` uses `C·B' = q·P_x` at whichever end is dynamic. At a right
/// end this makes `∫C·P − C_heart·B` the conserved quantity.
/// `VolumeConserving` uses `C·B' = −q·P_x` at a right end, so heart plus
/// vessel volume is conserved at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum FluxSign {
    #[default]
    Printed,
    VolumeConserving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Left,
    Right,
}

/// Which end a heart chamber attaches to in one phase, and its
/// volume–pressure line `V = v0 + compliance·B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeartEnd<T> {
    pub end: End,
    pub compliance: T,
    pub v0: T,
}

#[derive(Debug, Clone, Serialize)]
pub struct Domain<T> {
    pub name: String,
    pub x: Vec<T>,
    pub c: Vec<T>,
    pub a0: Vec<T>,
    pub n: Vec<T>,
    pub mu: T,
    /// Trapezoid weights (half cells at the ends).
    pub weights: Vec<T>,
    pub systole: HeartEnd<T>,
    pub diastole: HeartEnd<T>,
    pub flux_sign: FluxSign,
}

impl<T: Scalar> Domain<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        x: Vec<T>,
        c: Vec<T>,
        a0: Vec<T>,
        n: Vec<T>,
        mu: T,
        systole: HeartEnd<T>,
        diastole: HeartEnd<T>,
        flux_sign: FluxSign,
    ) -> Result<Self> {
        let m = x.len();
        if m < 3 || c.len() != m || a0.len() != m || n.len() != m {
            return Err(Error::InvalidInput("domain needs at least 3 nodes and equal-length fields".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("domain grid must be strictly increasing".into()));
        }
        for h in [&systole, &diastole] {
            if !(h.compliance >= T::zero()) || !h.v0.is_finite() {
                return Err(Error::InvalidInput("heart compliance must be non-negative".into()));
            }
        }
        let mut weights = vec![T::zero(); m];
        for i in 0..m - 1 {
            let half = (x[i + 1] - x[i]) * T::lit(0.5);
            weights[i] = weights[i] + half;
            weights[i + 1] = weights[i + 1] + half;
        }
        Ok(Self {
            name: name.into(),
            x,
            c,
            a0,
            n,
            mu,
            weights,
            systole,
            diastole,
            flux_sign,
        })
    }

    /// Nodes `range` of a profile as a domain.
    pub fn from_profile(
        name: impl Into<String>,
        profile: &SpatialProfile<T>,
        range: std::ops::RangeInclusive<usize>,
        systole: HeartEnd<T>,
        diastole: HeartEnd<T>,
        flux_sign: FluxSign,
    ) -> Result<Self> {
        let take = |v: &[T]| v[range.clone()].to_vec();
        Self::new(
            name,
            take(&profile.x),
            take(&profile.c),
            take(&profile.a0),
            take(&profile.n),
            profile.mu,
            systole,
            diastole,
            flux_sign,
        )
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn length(&self) -> T {
        self.x[self.len() - 1] - self.x[0]
    }

    pub fn heart(&self, phase: Phase) -> HeartEnd<T> {
        match phase {
            Phase::Systole => self.systole,
            Phase::Diastole => self.diastole,
        }
    }

    pub fn end_index(&self, end: End) -> usize {
        match end {
            End::Left => 0,
            End::Right => self.len() - 1,
        }
    }

    /// Node index holding the boundary unknown `B` in `phase`.
    pub fn dynamic_index(&self, phase: Phase) -> usize {
        self.end_index(self.heart(phase).end)
    }

    /// Sign multiplying the heart compliance in the dynamic-end balance.
    pub fn sigma(&self, phase: Phase) -> T {
        match (self.heart(phase).end, self.flux_sign) {
            (End::Right, FluxSign::Printed) => -T::one(),
            _ => T::one(),
        }
    }

    pub fn q(&self, i: usize, p: T) -> T {
        conductivity(self.c[i], self.a0[i], self.n[i], self.mu, p)
    }

    pub fn q_dp(&self, i: usize, p: T) -> T {
        conductivity_dp(self.c[i], self.a0[i], self.n[i], self.mu, p)
    }

    /// `‖C‖₁` by the trapezoid rule.
    pub fn c_norm1(&self) -> T {
        self.weights.iter().zip(&self.c).map(|(&w, &c)| w * c.abs()).sum()
    }

    /// `Σ w·(A0 + C·P)`.
    pub fn vessel_volume(&self, p: &[T]) -> T {
        (0..self.len())
            .map(|i| self.weights[i] * (self.a0[i] + self.c[i] * p[i]))
            .sum()
    }

    pub fn heart_volume(&self, p: &[T], phase: Phase) -> T {
        let h = self.heart(phase);
        h.v0 + h.compliance * p[self.dynamic_index(phase)]
    }

    /// Heart plus vessel volume.
    pub fn total_volume(&self, p: &[T], phase: Phase) -> T {
        self.vessel_volume(p) + self.heart_volume(p, phase)
    }

    /// `Σ w·C·P + σ·C_heart·B`, which the scheme conserves within a phase.
    pub fn invariant(&self, p: &[T], phase: Phase) -> T {
        let weighted: T = (0..self.len()).map(|i| self.weights[i] * self.c[i] * p[i]).sum();
        weighted + self.sigma(phase) * self.heart(phase).compliance * p[self.dynamic_index(phase)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Normal,
    Fontan,
}

#[derive(Debug, Clone, Serialize)]
pub struct Topology<T> {
    pub kind: TopologyKind,
    pub domains: Vec<Domain<T>>,
}

impl<T: Scalar> Topology<T> {
    /// Single loop on `(0, L_l)`: systolic heart at `x = 0`, diastolic at `x = L_l`.
    pub fn fontan(profile: &SpatialProfile<T>, coupling: &HeartCoupling<T>, flux_sign: FluxSign) -> Result<Self> {
        coupling.validate(false).into_result()?;
        let last = profile.len() - 1;
        let d = Domain::from_profile(
            "fontan",
            profile,
            0..=last,
            HeartEnd { end: End::Left, compliance: coupling.c_ls, v0: coupling.v_ls0 },
            HeartEnd { end: End::Right, compliance: coupling.c_ld, v0: coupling.v_ld0 },
            flux_sign,
        )?;
        Ok(Self { kind: TopologyKind::Fontan, domains: vec![d] })
    }

    /// Systemic `(0, L_r)` with the left heart and pulmonary `(L_r, L_l)`
    /// with the right heart. `L_r` must be a grid node; it is shared by
    /// both domains.
    pub fn normal(profile: &SpatialProfile<T>, coupling: &HeartCoupling<T>, flux_sign: FluxSign) -> Result<Self> {
        coupling.validate(true).into_result()?;
        let tol = profile.l_l * T::lit(1e-9);
        let ir = profile
            .node_at(profile.l_r, tol)
            .ok_or_else(|| Error::InvalidInput(format!("L_r = {} is not a grid node", profile.l_r)))?;
        let last = profile.len() - 1;
        let systemic = Domain::from_profile(
            "systemic",
            profile,
            0..=ir,
            HeartEnd { end: End::Left, compliance: coupling.c_ls, v0: coupling.v_ls0 },
            HeartEnd { end: End::Right, compliance: coupling.c_ld, v0: coupling.v_ld0 },
            flux_sign,
        )?;
        let pulmonary = Domain::from_profile(
            "pulmonary",
            profile,
            ir..=last,
            HeartEnd { end: End::Left, compliance: coupling.c_rs, v0: coupling.v_rs0 },
            HeartEnd { end: End::Right, compliance: coupling.c_rd, v0: coupling.v_rd0 },
            flux_sign,
        )?;
        Ok(Self { kind: TopologyKind::Normal, domains: vec![systemic, pulmonary] })
    }
}
