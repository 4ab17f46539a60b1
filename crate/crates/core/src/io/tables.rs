//! CSV renderings of run outputs.
//!
//! Numbers use the shortest decimal that round-trips. Leading `#` lines
//! carry units.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::ode::{OdeState, SweepPoint};
use crate::pde::{BoundarySample, Snapshot};
use crate::scalar::Scalar;

/// Shortest round-trip decimal for `v`.
pub fn num<T: Debug>(v: T) -> String {
    format!("{v:?}")
}

fn table(comments: &[&str], header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for c in comments {
        out.extend_from_slice(format!("# {c}\n").as_bytes());
    }
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Parse {
        path: "<csv output>".into(),
        message: e.to_string(),
    };
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Parse {
        path: "<csv output>".into(),
        message: e.to_string(),
    })
}

pub fn trajectory_csv<T: Scalar>(states: &[OdeState<T>]) -> Result<Vec<u8>> {
    table(
        &["t: min; pressures: mmHg; volumes: L; flows: L/min", "switch instants appear twice, once per phase"],
        &["t", "phase", "Pa", "PA", "Pv", "Ppv", "Ph", "Va", "Vv", "Vh", "Qa", "Qc", "Qp"],
        states.iter().map(|s| {
            vec![
                num(s.t),
                s.phase.to_string(),
                num(s.pa),
                num(s.pa_root),
                num(s.pv),
                num(s.ppv),
                num(s.ph),
                num(s.va),
                num(s.vv),
                num(s.vh),
                num(s.qa),
                num(s.qc),
                num(s.qp),
            ]
        }),
    )
}

pub fn pv_loop_csv<T: Scalar>(pairs: &[(T, T)]) -> Result<Vec<u8>> {
    table(
        &["Vh: L; Ph: mmHg"],
        &["Vh", "Ph"],
        pairs.iter().map(|&(v, p)| vec![num(v), num(p)]),
    )
}

pub fn sweep_csv<T: Scalar>(points: &[SweepPoint<T>]) -> Result<Vec<u8>> {
    table(
        &["Rp: mmHg min/L; HR: beats/min; cardiac_output: L/min"],
        &["Rp", "HR", "cardiac_output", "converged"],
        points.iter().map(|p| {
            vec![num(p.rp), num(p.heart_rate), num(p.cardiac_output), p.converged.to_string()]
        }),
    )
}

pub fn snapshot_csv<T: Scalar>(x: &[T], snapshot: &Snapshot<T>) -> Result<Vec<u8>> {
    let when = format!("t={} min; phase={}", num(snapshot.t), snapshot.phase);
    table(
        &[&when, "x: length units of the profile; P: mmHg"],
        &["x", "P"],
        x.iter().zip(&snapshot.p).map(|(&x, &p)| vec![num(x), num(p)]),
    )
}

pub fn boundary_csv<T: Scalar>(samples: &[&BoundarySample<T>]) -> Result<Vec<u8>> {
    table(
        &["t: min; B: mmHg; heart_volume: L"],
        &["t", "B", "phase", "heart_volume"],
        samples
            .iter()
            .map(|s| vec![num(s.t), num(s.b), s.phase.to_string(), num(s.heart_volume)]),
    )
}
