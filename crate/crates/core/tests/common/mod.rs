#![allow(dead_code)]

use std::f64::consts::PI;

use fontan_core::model::Phase;
use fontan_core::pde::{Domain, End, FluxSign, Forcing, HeartEnd, StepOptions, Stepper};

/// Manufactured solution `P* = 1 + 0.3t + 0.5(1+t)·sin(πx/2L)` on `[0, L]`
/// with a dynamic end at `x = 0` and no flux at `x = L`. `P*` is linear in
/// `t`, so backward Euler adds no temporal error to it.
pub struct Manufactured {
    pub l: f64,
    pub mu: f64,
    pub c_heart: f64,
}

impl Default for Manufactured {
    fn default() -> Self {
        Self { l: 1.0, mu: 0.05, c_heart: 0.02 }
    }
}

impl Manufactured {
    fn k(&self) -> f64 {
        PI / (2.0 * self.l)
    }
    fn c(&self, x: f64) -> f64 {
        0.01 * (1.0 + 0.5 * x)
    }
    fn a0(&self, x: f64) -> f64 {
        0.5 + 0.2 * x
    }
    fn n(&self, x: f64) -> f64 {
        1.0 + x
    }
    pub fn exact(&self, x: f64, t: f64) -> f64 {
        1.0 + 0.3 * t + 0.5 * (1.0 + t) * (self.k() * x).sin()
    }
    fn p_t(&self, x: f64) -> f64 {
        0.3 + 0.5 * (self.k() * x).sin()
    }
    fn p_x(&self, x: f64, t: f64) -> f64 {
        0.5 * (1.0 + t) * self.k() * (self.k() * x).cos()
    }
    fn p_xx(&self, x: f64, t: f64) -> f64 {
        -0.5 * (1.0 + t) * self.k() * self.k() * (self.k() * x).sin()
    }
    fn q(&self, x: f64, t: f64) -> f64 {
        let a = self.a0(x) + self.c(x) * self.exact(x, t);
        self.n(x) * a * a / (8.0 * PI * self.mu)
    }
    fn q_x(&self, x: f64, t: f64) -> f64 {
        let p = self.exact(x, t);
        let a = self.a0(x) + self.c(x) * p;
        let a_x = 0.2 + 0.005 * p + self.c(x) * self.p_x(x, t);
        (a * a + 2.0 * self.n(x) * a * a_x) / (8.0 * PI * self.mu)
    }

    pub fn domain(&self, nodes: usize) -> Domain<f64> {
        let x: Vec<f64> = (0..nodes).map(|i| self.l * i as f64 / (nodes - 1) as f64).collect();
        Domain::new(
            "manufactured",
            x.clone(),
            x.iter().map(|&v| self.c(v)).collect(),
            x.iter().map(|&v| self.a0(v)).collect(),
            x.iter().map(|&v| self.n(v)).collect(),
            self.mu,
            HeartEnd { end: End::Left, compliance: self.c_heart, v0: 0.0 },
            HeartEnd { end: End::Right, compliance: self.c_heart, v0: 0.0 },
            FluxSign::VolumeConserving,
        )
        .unwrap()
    }

    /// Max nodal error at `t_end` after stepping from the exact field.
    pub fn error(&self, nodes: usize, dt: f64, t_end: f64) -> f64 {
        let d = self.domain(nodes);
        let mut p: Vec<f64> = d.x.iter().map(|&x| self.exact(x, 0.0)).collect();
        let mut stepper = Stepper::new(nodes, StepOptions::default());
        let steps = (t_end / dt).round() as usize;
        for s in 1..=steps {
            stepper
                .step(&d, &mut p, s as f64 * dt, dt, Phase::Systole, self)
                .unwrap();
        }
        let t = steps as f64 * dt;
        d.x.iter()
            .zip(&p)
            .map(|(&x, &v)| (v - self.exact(x, t)).abs())
            .fold(0.0, f64::max)
    }
}

impl Forcing<f64> for Manufactured {
    fn interior(&self, x: f64, t: f64) -> f64 {
        let flux_x = self.q_x(x, t) * self.p_x(x, t) + self.q(x, t) * self.p_xx(x, t);
        self.c(x) * self.p_t(x) - flux_x
    }

    fn boundary(&self, t: f64) -> f64 {
        self.c_heart * self.p_t(0.0) - self.q(0.0, t) * self.p_x(0.0, t)
    }
}

/// Smooth profile on `[0, 1]` with `‖C‖₁` well below the heart compliances.
pub fn gentle_profile(nodes: usize) -> fontan_core::model::SpatialProfile<f64> {
    fontan_core::model::SpatialProfile::from_fn(nodes, 1.0, 0.5, 0.04, |x| {
        (0.002 * (1.0 + 0.5 * (2.0 * PI * x).sin()), 0.5 + 0.1 * x, 1.0 + x)
    })
    .unwrap()
}

pub fn gentle_field(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| 10.0 + 5.0 * (PI * v).cos()).collect()
}
