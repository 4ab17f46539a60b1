use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PhaseSchedule;
use crate::scalar::Scalar;

/// Constants of the lumped single-loop circulation.
///
/// Volumes in L, compliances in L/mmHg, resistances in mmHg·min/L,
/// heart rate in beats/min. Field names on the wire match the usual
/// symbols (`Va0`, `Ca`, `Rp`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct ParameterSet<T> {
    #[serde(rename = "Va0")]
    pub va0: T,
    #[serde(rename = "Vv0")]
    pub vv0: T,
    #[serde(rename = "Vd0")]
    pub vd0: T,
    /// Basal systolic heart volume; negative values are allowed.
    #[serde(rename = "Vs0")]
    pub vs0: T,
    #[serde(rename = "Ca")]
    pub ca: T,
    #[serde(rename = "Cv")]
    pub cv: T,
    #[serde(rename = "Cd")]
    pub cd: T,
    #[serde(rename = "Cs")]
    pub cs: T,
    #[serde(rename = "Ra")]
    pub ra: T,
    #[serde(rename = "Rc")]
    pub rc: T,
    #[serde(rename = "Rp")]
    pub rp: T,
    #[serde(rename = "VT")]
    pub vt: T,
    #[serde(default = "default_heart_rate")]
    pub heart_rate: T,
    #[serde(default = "default_diastole_fraction")]
    pub diastole_fraction: T,
}

fn zero<T: Scalar>() -> T {
    T::zero()
}

fn default_heart_rate<T: Scalar>() -> T {
    T::lit(60.0)
}

fn default_diastole_fraction<T: Scalar>() -> T {
    T::lit(0.7)
}

impl<T: Scalar> ParameterSet<T> {
    /// Reference adult Fontan values at 60 beats/min with a 70 % diastole.
    pub fn reference() -> Self {
        Self {
            va0: T::lit(1.0),
            vv0: T::lit(2.5),
            vd0: T::lit(0.0),
            vs0: T::lit(-0.5),
            ca: T::lit(0.00125),
            cv: T::lit(0.0625),
            cd: T::lit(0.01),
            cs: T::lit(0.005),
            ra: T::lit(0.5),
            rc: T::lit(17.0),
            rp: T::lit(2.9),
            vt: T::lit(5.0),
            heart_rate: default_heart_rate(),
            diastole_fraction: default_diastole_fraction(),
        }
    }

    pub fn with_rp(mut self, rp: T) -> Self {
        self.rp = rp;
        self
    }

    pub fn with_heart_rate(mut self, heart_rate: T) -> Self {
        self.heart_rate = heart_rate;
        self
    }

    pub fn schedule(&self) -> PhaseSchedule<T> {
        PhaseSchedule::from_heart_rate(self.heart_rate, self.diastole_fraction)
    }

    /// Lists every violated invariant. Never fails.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for (name, v) in [
            ("Ca", self.ca),
            ("Cv", self.cv),
            ("Cd", self.cd),
            ("Cs", self.cs),
            ("Ra", self.ra),
            ("Rc", self.rc),
            ("Rp", self.rp),
            ("VT", self.vt),
            ("heart_rate", self.heart_rate),
        ] {
            report.require(v > T::zero(), name, "must be positive");
        }
        for (name, v) in [
            ("Va0", self.va0),
            ("Vv0", self.vv0),
            ("Vd0", self.vd0),
            ("Vs0", self.vs0),
        ] {
            report.require(v.is_finite(), name, "must be finite");
        }
        report.require(
            self.diastole_fraction > T::zero() && self.diastole_fraction < T::one(),
            "diastole_fraction",
            "must lie strictly between 0 and 1",
        );
        report
    }
}

/// Heart compliances and basal volumes for the PDE models.
///
/// `l`/`r` are the left/right heart, `s`/`d` systole/diastole. The single
/// Fontan heart uses the left-heart fields; right-heart fields default to 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct HeartCoupling<T> {
    #[serde(rename = "C_ls")]
    pub c_ls: T,
    #[serde(rename = "C_ld")]
    pub c_ld: T,
    #[serde(rename = "C_rs", default = "zero")]
    pub c_rs: T,
    #[serde(rename = "C_rd", default = "zero")]
    pub c_rd: T,
    #[serde(rename = "V_ls0", default = "zero")]
    pub v_ls0: T,
    #[serde(rename = "V_ld0", default = "zero")]
    pub v_ld0: T,
    #[serde(rename = "V_rs0", default = "zero")]
    pub v_rs0: T,
    #[serde(rename = "V_rd0", default = "zero")]
    pub v_rd0: T,
}

impl<T: Scalar> HeartCoupling<T> {
    /// Single-heart coupling for the Fontan loop.
    pub fn fontan(c_systole: T, c_diastole: T, v0_systole: T, v0_diastole: T) -> Self {
        Self {
            c_ls: c_systole,
            c_ld: c_diastole,
            c_rs: T::zero(),
            c_rd: T::zero(),
            v_ls0: v0_systole,
            v_ld0: v0_diastole,
            v_rs0: T::zero(),
            v_rd0: T::zero(),
        }
    }

    /// Same coupling on both hearts and in both phases.
    pub fn uniform(c: T, v0: T) -> Self {
        Self {
            c_ls: c,
            c_ld: c,
            c_rs: c,
            c_rd: c,
            v_ls0: v0,
            v_ld0: v0,
            v_rs0: v0,
            v_rd0: v0,
        }
    }

    /// Checks the left heart and, when `two_hearts` is set, the right heart.
    pub fn validate(&self, two_hearts: bool) -> ValidationReport {
        let mut report = ValidationReport::default();
        report.require(self.c_ld > T::zero(), "C_ld", "must be positive");
        report.require(self.c_ls >= T::zero(), "C_ls", "must be non-negative");
        report.require(
            self.v_ls0.is_finite() && self.v_ld0.is_finite(),
            "V_ls0/V_ld0",
            "must be finite",
        );
        if two_hearts {
            report.require(self.c_rd > T::zero(), "C_rd", "must be positive");
            report.require(self.c_rs >= T::zero(), "C_rs", "must be non-negative");
            report.require(
                self.v_rs0.is_finite() && self.v_rd0.is_finite(),
                "V_rs0/V_rd0",
                "must be finite",
            );
        }
        report
    }
}

/// One violated invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

/// Outcome of a validation pass; empty iff every invariant holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn require(&mut self, ok: bool, field: &str, requirement: &str) {
        if !ok {
            self.violations.push(Violation {
                field: field.to_string(),
                message: format!("{field} {requirement}"),
            });
        }
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    /// `Ok` when valid, otherwise an [`Error::InvalidInput`] with the summary.
    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidInput(self.summary()))
        }
    }

    /// Violations joined into one line.
    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| v.message.as_str())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_set_is_valid() {
        let p = ParameterSet::<f64>::reference();
        assert!(p.validate().is_valid(), "{:?}", p.validate());
        assert!(p.vs0 < 0.0);
    }

    #[test]
    fn zero_compliance_is_reported() {
        let mut p = ParameterSet::<f64>::reference();
        p.ca = 0.0;
        let r = p.validate();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].message, "Ca must be positive");
    }

    #[test]
    fn diastole_fraction_out_of_range() {
        let mut p = ParameterSet::<f64>::reference();
        p.diastole_fraction = 1.2;
        let r = p.validate();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].field, "diastole_fraction");
    }

    #[test]
    fn every_violation_listed_and_validate_is_pure() {
        let mut p = ParameterSet::<f64>::reference();
        p.ra = -1.0;
        p.rc = f64::NAN;
        p.heart_rate = 0.0;
        let first = p.validate();
        assert_eq!(first.violations.len(), 3);
        assert_eq!(first, p.validate());
    }

    #[test]
    fn json_field_names_round_trip() {
        let p = ParameterSet::<f64>::reference();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"Va0\"") && text.contains("\"VT\""));
        let back: ParameterSet<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn heart_rate_and_fraction_default() {
        let json = r#"{"Va0":1.0,"Vv0":2.5,"Vd0":0,"Vs0":-0.5,"Ca":0.00125,"Cv":0.0625,
            "Cd":0.01,"Cs":0.005,"Ra":0.5,"Rc":17,"Rp":2.9,"VT":5.0}"#;
        let p: ParameterSet<f64> = serde_json::from_str(json).unwrap();
        assert_eq!(p, ParameterSet::reference());
    }

    #[test]
    fn coupling_checks() {
        let ok = HeartCoupling::<f64>::fontan(0.005, 0.01, -0.5, 0.0);
        assert!(ok.validate(false).is_valid());
        // The right heart is unused in the single-loop case.
        assert!(!ok.validate(true).is_valid());
        let mut bad = ok;
        bad.c_ld = 0.0;
        bad.c_ls = -1.0;
        assert_eq!(bad.validate(false).violations.len(), 2);
    }
}
