//! The four subcommands. Each builds a complete artifact set in memory;
//! nothing touches the output directory until the run has succeeded.

use fontan_core::analysis::eigen::diffusion_scales;
use fontan_core::analysis::{bounds_check, conserved_m, eigen_lambda, energy_trace};
use fontan_core::io::{self, ArtifactSet};
use fontan_core::model::{Phase, PhaseSchedule, SpatialProfile};
use fontan_core::ode::{inflection_estimate, rp_grid, simulate, strictly_decreasing, sweep_rp, OdeOptions, SweepPoint};
use fontan_core::pde::{fontan_mimic, mimic_initial, run_periodic, PdeOptions, PdeRun, Record, StepOptions, Topology, TopologyKind};
use fontan_core::{Error, Result};
use serde_json::{json, Value};

use crate::config::{Loaded, PdeSection};

const DEFAULT_MIMIC_NODES: usize = 401;

fn ode_options(l: &Loaded) -> OdeOptions<f64> {
    let s = &l.raw.ode;
    let d = OdeOptions::<f64>::default();
    let mut o = OdeOptions {
        cycles: s.cycles.or(d.cycles),
        tol: s.tol.unwrap_or(d.tol),
        max_cycles: s.max_cycles.unwrap_or(d.max_cycles),
        initial_pa: s.initial_pa.unwrap_or(d.initial_pa),
        initial_pv: s.initial_pv.unwrap_or(d.initial_pv),
        samples_per_cycle: s.samples_per_cycle.unwrap_or(d.samples_per_cycle),
        empty_heart_guard: s.empty_heart_guard.unwrap_or(d.empty_heart_guard),
        ..d
    };
    o.rk.rtol = s.rtol.unwrap_or(d.rk.rtol);
    o.rk.atol = s.atol.unwrap_or(d.rk.atol);
    o
}

fn check_ode_options(o: &OdeOptions<f64>) -> Result<()> {
    if !(o.tol > 0.0 && o.rk.rtol > 0.0 && o.rk.atol > 0.0) {
        return Err(Error::InvalidInput("ode tolerances must be positive".into()));
    }
    if o.max_cycles == 0 || o.cycles == Some(0) {
        return Err(Error::InvalidInput("ode cycle counts must be positive".into()));
    }
    Ok(())
}

pub fn ode_run(l: &Loaded) -> Result<ArtifactSet> {
    let params = l.params()?;
    let opts = ode_options(l);
    check_ode_options(&opts)?;
    let run = simulate(&params, &opts)?;
    let mut set = ArtifactSet::new();
    let o = &run.observables;
    set.add_json(
        "summary.json",
        &json!({
            "command": "ode-run",
            "params": params,
            "stroke_volume": o.stroke_volume,
            "cardiac_output": o.cardiac_output,
            "pa_min": o.pa_min,
            "pa_max": o.pa_max,
            "pa_root_min": o.pa_root_min,
            "pa_root_max": o.pa_root_max,
            "ppv_min": o.ppv_min,
            "ppv_max": o.ppv_max,
            "vh_min": o.vh_min,
            "vh_max": o.vh_max,
            "ejection_truncated": o.ejection_truncated,
            "cycles_run": run.cycles_run,
            "converged": run.converged,
            "residual": run.residual,
            "max_volume_error": run.max_volume_error,
        }),
    )?;
    set.add("trajectory.csv", io::trajectory_csv(&run.trajectory)?);
    set.add("pv_loop.csv", io::pv_loop_csv(&o.pv_loop)?);
    Ok(set)
}

fn sweep_grid(l: &Loaded) -> Result<(Vec<f64>, Vec<f64>)> {
    let s = l
        .raw
        .sweep
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("ode-sweep needs a `sweep` section".into()))?;
    let rps = match (&s.rp, s.rp_start, s.rp_stop, s.rp_step) {
        (Some(v), None, None, None) => v.clone(),
        (None, Some(a), Some(b), Some(h)) => rp_grid(a, b, h)?,
        _ => {
            return Err(Error::InvalidInput(
                "sweep needs either `rp` or all of `rp_start`, `rp_stop`, `rp_step`".into(),
            ))
        }
    };
    let sorted = |v: &[f64]| !v.is_empty() && v.windows(2).all(|w| w[0] < w[1]) && v.iter().all(|x| x.is_finite());
    if !sorted(&rps) || !sorted(&s.heart_rates) {
        return Err(Error::InvalidInput("sweep grids must be non-empty, finite and strictly increasing".into()));
    }
    Ok((rps, s.heart_rates.clone()))
}

pub fn ode_sweep(l: &Loaded) -> Result<ArtifactSet> {
    let params = l.params()?;
    let opts = ode_options(l);
    check_ode_options(&opts)?;
    let (rps, hrs) = sweep_grid(l)?;
    let points = sweep_rp(&params, &hrs, &rps, &opts)?;
    let per_rate: Vec<Value> = hrs
        .iter()
        .map(|&hr| {
            let row: Vec<&SweepPoint<f64>> = points.iter().filter(|p| p.heart_rate == hr).collect();
            let x: Vec<f64> = row.iter().map(|p| p.rp).collect();
            let co: Vec<f64> = row.iter().map(|p| p.cardiac_output).collect();
            let failed: Vec<Value> = row
                .iter()
                .filter(|p| p.error.is_some())
                .map(|p| json!({"rp": p.rp, "error": p.error}))
                .collect();
            json!({
                "heart_rate": hr,
                "strictly_decreasing": strictly_decreasing(&co),
                "inflection_rp": inflection_estimate(&x, &co),
                "failed": failed,
            })
        })
        .collect();
    let mut set = ArtifactSet::new();
    set.add_json(
        "summary.json",
        &json!({"command": "ode-sweep", "params": params, "points": points.len(), "heart_rates": per_rate}),
    )?;
    set.add("sweep.csv", io::sweep_csv(&points)?);
    Ok(set)
}

struct PdeSetup {
    topology: Topology<f64>,
    profile: SpatialProfile<f64>,
    initial: Vec<Vec<f64>>,
    options: PdeOptions<f64>,
    schedule: PhaseSchedule<f64>,
    slack: f64,
}

fn pde_setup(l: &Loaded, analysis: bool) -> Result<PdeSetup> {
    let s: &PdeSection = l
        .raw
        .pde
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("pde commands need a `pde` section".into()))?;
    let params = l.params()?;
    let file_profile = l.profile()?;
    let mimic = file_profile.is_none();
    let (profile, coupling) = match file_profile {
        Some(p) => {
            let c = s
                .coupling
                .ok_or_else(|| Error::InvalidInput("a profile file needs a `coupling` section".into()))?;
            (p, c)
        }
        None => {
            if s.topology == TopologyKind::Normal {
                return Err(Error::InvalidInput("the normal topology needs a profile file".into()));
            }
            let (p, c) = fontan_mimic(&params, s.mimic_nodes.unwrap_or(DEFAULT_MIMIC_NODES))?;
            (p, s.coupling.unwrap_or(c))
        }
    };
    let topology = match s.topology {
        TopologyKind::Fontan => Topology::fontan(&profile, &coupling, s.flux_sign)?,
        TopologyKind::Normal => Topology::normal(&profile, &coupling, s.flux_sign)?,
    };
    let d = PdeOptions::<f64>::default();
    let options = PdeOptions {
        steps_per_cycle: s.steps_per_cycle.unwrap_or(d.steps_per_cycle),
        tol: s.tol.unwrap_or(d.tol),
        max_cycles: s.max_cycles.unwrap_or(d.max_cycles),
        cycles: s.cycles,
        epsilon_fraction: s.epsilon_fraction.unwrap_or(d.epsilon_fraction),
        switch_mode: s.switch_mode,
        step: StepOptions::default(),
        record: Record::FinalCycle,
        snapshot_every: s.snapshot_every.unwrap_or(if analysis { 10 } else { 0 }),
    };
    if !(options.tol > 0.0) || options.steps_per_cycle < 2 || options.max_cycles == 0 || options.cycles == Some(0) {
        return Err(Error::InvalidInput("pde tolerances, step and cycle counts must be positive".into()));
    }
    let initial = match (s.initial_pressure, mimic) {
        (Some(p0), _) => topology.domains.iter().map(|d| vec![p0; d.len()]).collect(),
        (None, true) => {
            let ode = simulate(&params, &OdeOptions { samples_per_cycle: 20, ..OdeOptions::default() })?;
            let s0 = ode.trajectory[0];
            vec![mimic_initial(&profile, s0.pa, s0.pv, s0.ppv)]
        }
        (None, false) => return Err(Error::InvalidInput("a profile file needs `initial_pressure`".into())),
    };
    Ok(PdeSetup {
        topology,
        profile,
        initial,
        options,
        schedule: params.schedule(),
        slack: s.bounds_slack.unwrap_or(1e-6),
    })
}

fn pde_summary(run: &PdeRun<f64>, topology: &Topology<f64>) -> Value {
    json!({
        "cycles_run": run.cycles_run,
        "converged": run.converged,
        "residual": run.residual,
        "dt": run.dt,
        "domains": topology.domains.iter().map(|d| d.name.clone()).collect::<Vec<_>>(),
        "heart_volume_swing": run.heart_volume_swing,
        "volume_drift": run.volume_drift(),
        "max_phase_volume_drift": run.max_volume_drift(),
        "max_phase_invariant_drift": run.max_invariant_drift(),
        "min_pressure": run.min_pressure(),
        "hypotheses": run.hypotheses,
        "switches": run.switches.len(),
    })
}

fn add_fields(set: &mut ArtifactSet, run: &PdeRun<f64>, topology: &Topology<f64>) -> Result<()> {
    let many = topology.domains.len() > 1;
    for (k, d) in topology.domains.iter().enumerate() {
        let tag = if many { format!("_{}", d.name) } else { String::new() };
        for (i, s) in run.snapshots_of(k).enumerate() {
            set.add(format!("snapshot{tag}_{i:03}.csv"), io::snapshot_csv(&d.x, s)?);
        }
        let samples: Vec<_> = run.boundary.iter().filter(|b| b.domain == k).collect();
        set.add(format!("boundary{tag}.csv"), io::boundary_csv(&samples)?);
    }
    Ok(())
}

pub fn pde_run(l: &Loaded) -> Result<ArtifactSet> {
    let setup = pde_setup(l, false)?;
    let run = run_periodic(&setup.topology, &setup.schedule, &setup.initial, &setup.options)?;
    let mut set = ArtifactSet::new();
    let mut summary = pde_summary(&run, &setup.topology);
    summary["command"] = json!("pde-run");
    set.add_json("summary.json", &summary)?;
    set.add("profile.csv", setup.profile.to_csv_string().into_bytes());
    add_fields(&mut set, &run, &setup.topology)?;
    Ok(set)
}

const EIGEN_BRANCHES: usize = 4;

fn eigen_table(topology: &Topology<f64>, run: &PdeRun<f64>) -> Vec<Value> {
    let mut rows = Vec::new();
    for (k, d) in topology.domains.iter().enumerate() {
        let (k1, d1, k2, d2) = diffusion_scales(d, &run.final_state.p[k]);
        for phase in [Phase::Diastole, Phase::Systole] {
            let c_heart = d.heart(phase).compliance;
            for (scale, kk, dd) in [("lower", k1, d1), ("upper", k2, d2)] {
                for branch in 0..EIGEN_BRANCHES {
                    let row = match eigen_lambda(phase, dd, kk, c_heart, d.length(), branch) {
                        Ok(e) => json!({"domain": d.name, "scale": scale, "k": kk, "d": dd, "pair": e}),
                        Err(e) => json!({"domain": d.name, "scale": scale, "phase": phase, "branch": branch, "error": e.to_string()}),
                    };
                    rows.push(row);
                }
            }
        }
    }
    rows
}

pub fn analyze(l: &Loaded) -> Result<ArtifactSet> {
    let setup = pde_setup(l, true)?;
    let run = run_periodic(&setup.topology, &setup.schedule, &setup.initial, &setup.options)?;
    let mut domains = Vec::new();
    for (k, d) in setup.topology.domains.iter().enumerate() {
        let snaps: Vec<_> = run.snapshots_of(k).collect();
        let trace = energy_trace(d, &snaps);
        let m: Vec<f64> = snaps.iter().map(|s| conserved_m(d, &s.p, s.phase)).collect();
        let m_min = m.iter().copied().fold(f64::INFINITY, f64::min);
        let m_max = m.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let owned: Vec<_> = snaps.into_iter().cloned().collect();
        let bounds = bounds_check(&owned, setup.slack);
        domains.push(json!({
            "domain": d.name,
            "hypotheses": run.hypotheses[k],
            "conserved_m": {"min": m_min, "max": m_max},
            "energy": {
                "constants": trace.constants,
                "t_star": trace.t_star,
                "checked_pairs": trace.checked_pairs,
                "violations": trace.violations,
            },
            "bounds": bounds,
        }));
    }
    let mut set = ArtifactSet::new();
    let mut summary = pde_summary(&run, &setup.topology);
    summary["command"] = json!("analyze");
    set.add_json("summary.json", &summary)?;
    set.add_json(
        "analysis.json",
        &json!({"domains": domains, "eigen": eigen_table(&setup.topology, &run)}),
    )?;
    add_fields(&mut set, &run, &setup.topology)?;
    Ok(set)
}

