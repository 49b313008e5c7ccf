use std::io::Write;

use serde_json::{json, Value};

use hardball::dynamics::{
    run_ensemble, simulate_trajectory, state_energy, write_trajectory_csv, ProcessKind, ReflectionAudit, SimParams, Simulator, State,
    TrajectoryOptions,
};
use hardball::estimators::{
    anneal, cluster_hitting, hitting_time_packing, sample_invariant, survival_curve, tv_against_law, validate_anneal_schedule, Binning,
    ClusterHittingConfig, InvariantSampling, MeanEstimate,
};
use hardball::formulas::{
    gap_table, poincare_bounds, prophit_bound, psi_exp_moment, schedule, sigma_hat_mean, tricomi_u, write_gap_csv, RadialDensity,
    DEFAULT_WINDOW,
};
use hardball::geometry::{energy_excess, BallSystem, ReducedConfiguration};

use crate::config::{process_kind, Config, HitConfig, InitConfig};
use crate::error::CliError;
use crate::output::OutputDir;

pub struct Outcome {
    pub passed: bool,
    pub report: Value,
}

pub struct Context<'a> {
    pub config: Option<&'a Config>,
    pub params: Option<SimParams>,
    pub replicates: Option<usize>,
}

impl Context<'_> {
    fn config(&self) -> Result<&Config, CliError> {
        self.config.ok_or_else(|| CliError::Usage("this command needs --config".into()))
    }

    fn params(&self) -> Result<SimParams, CliError> {
        self.params.ok_or_else(|| CliError::Usage("this command needs --config".into()))
    }

    fn section<T>(&self, s: &Option<T>, name: &str) -> Result<(), CliError> {
        s.as_ref().map(|_| ()).ok_or_else(|| CliError::Usage(format!("config has no [{name}] section")))
    }
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

/// Builds and validates the initial state so configuration mistakes exit as usage errors.
fn initial_state(kind: ProcessKind, init: &InitConfig, p: &SimParams) -> Result<State, CliError> {
    let state = init.build(kind, p).map_err(usage)?;
    Simulator::new(kind, state.clone(), *p, 0).map_err(usage)?;
    Ok(state)
}

fn audit_json(a: &ReflectionAudit) -> Value {
    json!({ "clean": a.is_clean(), "detail": a })
}

pub fn simulate(ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cfg = ctx.config()?;
    ctx.section(&cfg.simulate, "simulate")?;
    let s = cfg.simulate.as_ref().unwrap();
    let p = ctx.params()?;
    let kind = process_kind(&s.process, s.c).map_err(usage)?;
    let init = initial_state(kind, &s.init, &p)?;
    let reps = ctx.replicates.unwrap_or(s.replicates);
    let trajs = run_ensemble(reps, |i| {
        let opts = TrajectoryOptions {
            stride: s.stride,
            index: i,
            cluster_radius: s.cluster_radius,
        };
        simulate_trajectory(kind, init.clone(), &p, &opts)
    })?;
    let mut audit = ReflectionAudit::default();
    let mut finals = Vec::new();
    for (k, t) in trajs.iter().enumerate() {
        let mut w = out.raw_csv(&format!("trajectory_{k}.csv"))?;
        write_trajectory_csv(&mut w, t, Some(out.comment()))?;
        w.flush()?;
        audit.merge(&t.audit);
        finals.push(t.energies.last().copied().flatten());
    }
    Ok(Outcome {
        passed: audit.is_clean(),
        report: json!({
            "replicates": reps,
            "final_energies": finals,
            "audit": audit_json(&audit),
        }),
    })
}

pub fn invariant(ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cfg = ctx.config()?;
    ctx.section(&cfg.invariant, "invariant")?;
    let s = cfg.invariant.as_ref().unwrap();
    let p = ctx.params()?;
    let kind = process_kind(&s.process, s.c).map_err(usage)?;
    let init = initial_state(kind, &s.init, &p)?;
    let sampling = InvariantSampling {
        burn_in: s.burn_in,
        n_samples: s.n_samples,
        stride: s.stride,
        chains: ctx.replicates.unwrap_or(s.chains),
    };
    let set = sample_invariant(kind, &init, &p, &sampling)?;
    let mut w = out.csv("samples.csv")?;
    writeln!(w, "index,value,energy")?;
    for (k, st) in set.states.iter().enumerate() {
        let value = match st {
            State::Scalar(v) => *v,
            _ => f64::NAN,
        };
        let energy = state_energy(&kind, st).unwrap_or(f64::NAN);
        writeln!(w, "{k},{value},{energy}")?;
    }
    w.flush()?;

    let mut report = json!({ "samples": set.states.len(), "audit": audit_json(&set.audit) });
    let energies = set.energies();
    if !energies.is_empty() {
        report["mean_energy"] = json!(MeanEstimate::from_samples(&energies)?);
    }
    let values = set.scalars();
    match kind {
        ProcessKind::Radial | ProcessKind::Affine if !values.is_empty() => {
            let nu = RadialDensity::new(p.a, p.d, p.r)?;
            let r2 = p.r * p.r / 4.0;
            let binning = Binning::pooled(&[&values], s.bins)?;
            let (tv, exact_mean) = if kind == ProcessKind::Radial {
                (tv_against_law(&values, &binning, |lo, hi| nu.probability(lo, hi))?, nu.expect(|x| x)?)
            } else {
                let to_rho = |z: f64| (z.max(0.0) + r2).sqrt();
                (
                    tv_against_law(&values, &binning, |lo, hi| nu.probability(to_rho(lo), to_rho(hi)))?,
                    nu.expect(|x| x * x - r2)?,
                )
            };
            report["tv_to_stationary"] = json!(tv);
            report["mean"] = json!(MeanEstimate::from_samples(&values)?);
            report["stationary_mean"] = json!(exact_mean);
        }
        ProcessKind::Reduced if p.n == 3 => {
            let close = set
                .states
                .iter()
                .filter_map(State::as_reduced)
                .map(energy_excess)
                .collect::<Result<Vec<_>, _>>()?
                .iter()
                .filter(|e| **e <= s.eta)
                .count();
            report["fraction_excess_le_eta"] = json!(close as f64 / set.states.len() as f64);
            report["eta"] = json!(s.eta);
        }
        _ => {}
    }
    Ok(Outcome {
        passed: set.audit.is_clean(),
        report,
    })
}

pub fn hit(ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cfg = ctx.config()?;
    ctx.section(&cfg.hit, "hit")?;
    let p = ctx.params()?;
    match cfg.hit.as_ref().unwrap() {
        HitConfig::Packing { init, replicates, grid, conf } => {
            initial_state(ProcessKind::Radial, &InitConfig::Scalar { value: *init }, &p)?;
            let reps = ctx.replicates.unwrap_or(*replicates);
            let (samples, audit) = hitting_time_packing(&p, *init, reps, p.t_max)?;
            write_hitting_csv(out, &samples)?;
            let curve = survival_curve(&samples, grid, *conf)?;
            let mut w = out.csv("survival.csv")?;
            writeln!(w, "t,survivors,n,estimate,upper,bound")?;
            let mut holds = true;
            let mut rows = Vec::new();
            for pt in &curve {
                let bound = prophit_bound(pt.t, p.a, p.d, p.r, init * init)?;
                holds &= pt.upper <= bound;
                writeln!(w, "{},{},{},{},{},{}", pt.t, pt.survivors, pt.n, pt.estimate, pt.upper, bound)?;
                rows.push(json!({ "t": pt.t, "estimate": pt.estimate, "upper": pt.upper, "bound": bound }));
            }
            w.flush()?;
            Ok(Outcome {
                passed: holds && audit.is_clean(),
                report: json!({
                    "target": "packing",
                    "replicates": reps,
                    "censored": samples.iter().filter(|s| s.censored).count(),
                    "survival": rows,
                    "bound_holds": holds,
                    "audit": audit_json(&audit),
                }),
            })
        }
        HitConfig::Cluster {
            init,
            cluster_radius,
            lambda,
            replicates,
            grid,
            conf,
        } => {
            let state = initial_state(ProcessKind::Reduced, init, &p)?;
            let reduced: &ReducedConfiguration = state.as_reduced().unwrap();
            let reps = ctx.replicates.unwrap_or(*replicates);
            let hc = ClusterHittingConfig {
                cluster_radius: *cluster_radius,
                lambda: *lambda,
                n_rep: reps,
                t_max: p.t_max,
                grid: grid.clone(),
            };
            let (samples, report) = cluster_hitting(&p, reduced, &hc)?;
            write_hitting_csv(out, &samples)?;
            let upper = report.weighted_energy_at_hit.upper(*conf);
            let mut holds = upper <= report.v_init;
            let mut w = out.csv("surviving_energy.csv")?;
            writeln!(w, "t,mean,se,upper,bound")?;
            for s in &report.surviving_energy {
                let u = s.estimate.upper(*conf);
                holds &= u <= s.bound;
                writeln!(w, "{},{},{},{},{}", s.t, s.estimate.mean, s.estimate.se, u, s.bound)?;
            }
            w.flush()?;
            Ok(Outcome {
                passed: holds && report.audit.is_clean(),
                report: json!({
                    "target": "cluster",
                    "replicates": reps,
                    "weighted_energy_upper": upper,
                    "bound_holds": holds,
                    "moments": report,
                }),
            })
        }
    }
}

fn write_hitting_csv(out: &mut OutputDir, samples: &[hardball::estimators::HittingSample]) -> Result<(), CliError> {
    let mut w = out.csv("hitting.csv")?;
    writeln!(w, "replica,time,censored")?;
    for (k, s) in samples.iter().enumerate() {
        writeln!(w, "{k},{},{}", s.time, u8::from(s.censored))?;
    }
    w.flush()?;
    Ok(())
}

pub fn gap(ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cfg = ctx.config()?;
    ctx.section(&cfg.gap, "gap")?;
    let g = cfg.gap.as_ref().unwrap();
    let p = ctx.params()?;
    let window = g.window.unwrap_or(DEFAULT_WINDOW);
    let rows = gap_table(&g.a, p.d, p.r, window)?;
    let mut w = out.csv("gap.csv")?;
    write_gap_csv(&mut w, &rows)?;
    w.flush()?;
    let worst = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    Ok(Outcome {
        passed: worst < 1e-8,
        report: json!({ "rows": rows, "max_residual": worst, "window": window }),
    })
}

pub fn anneal_cmd(ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let cfg = ctx.config()?;
    ctx.section(&cfg.anneal, "anneal")?;
    let s = cfg.anneal.as_ref().unwrap();
    let p = ctx.params()?;
    validate_anneal_schedule(&s.schedule, &p).map_err(usage)?;
    let first = p.with_a(s.schedule[0].a);
    let init = initial_state(ProcessKind::Reduced, &s.init, &first)?;
    let reps = ctx.replicates.unwrap_or(s.replicates);
    let finals = run_ensemble(reps, |i| anneal(ProcessKind::Reduced, init.clone(), &p, &s.schedule, i))?;
    let mut audit = ReflectionAudit::default();
    let mut w = out.csv("anneal.csv")?;
    writeln!(w, "replica,energy,excess,half_distance")?;
    let mut close = 0;
    for (k, (st, a)) in finals.iter().enumerate() {
        audit.merge(a);
        let c = st.as_reduced().unwrap();
        let excess = energy_excess(c).unwrap_or(f64::NAN);
        let energy = state_energy(&ProcessKind::Reduced, st).unwrap();
        let half = if c.count() == 2 { c.distance_sq(0, 1).sqrt() / 2.0 } else { f64::NAN };
        let hit = if c.count() == 2 {
            half - p.r / 2.0 <= s.contact_fraction * p.r
        } else {
            excess <= s.eta
        };
        close += usize::from(hit);
        writeln!(w, "{k},{energy},{excess},{half}")?;
    }
    w.flush()?;
    Ok(Outcome {
        passed: audit.is_clean(),
        report: json!({
            "replicates": reps,
            "fraction_near_packing": close as f64 / reps as f64,
            "criterion": if p.n == 2 { format!("half distance within {} r of r/2", s.contact_fraction) } else { format!("energy excess <= {}", s.eta) },
            "audit": audit_json(&audit),
        }),
    })
}

/// Closed-form reproductions plus an optional audited short run.
pub fn verify(ctx: &Context, out: &mut OutputDir) -> Result<Outcome, CliError> {
    let mut checks = Vec::new();
    let mut record = |name: &str, ok: bool, detail: Value| checks.push(json!({ "check": name, "pass": ok, "detail": detail }));

    let pb = poincare_bounds(1.0, 2, 1.0)?;
    record("poincare_bounds(1,2,1)", pb.lower == 0.125 && pb.upper == 0.375, json!(pb));
    let psi0 = psi_exp_moment(0.0, 1.0, 0.1, 0.2)?;
    record("psi at lambda 0", (psi0 - 1.0).abs() < 1e-12, json!(psi0));
    let h = 1e-5;
    let fd = (psi_exp_moment(h, 1.0, 0.1, 0.2)? - psi_exp_moment(-h, 1.0, 0.1, 0.2)?) / (2.0 * h);
    let mean = sigma_hat_mean(1.0, 0.2)?;
    record("sigma_hat_mean vs psi derivative", (fd - mean).abs() < 1e-7, json!({ "mean": mean, "finite_difference": fd }));
    let sch = schedule(1.0, 2)?;
    record("schedule(1,2) admissible", sch.admissible, json!(sch));
    let u = tricomi_u(1.0, 2.0, 2.0)?;
    record("U(1,2,2) = 1/2", (u - 0.5).abs() < 1e-10, json!(u));

    let v = ctx.config.and_then(|c| c.verify.clone()).unwrap_or_default();
    if let (Some(process), Some(init)) = (&v.process, &v.init) {
        let p = ctx.params()?;
        let kind = process_kind(process, v.c).map_err(usage)?;
        let state = init.build(kind, &p).map_err(usage)?;
        let reps = ctx.replicates.unwrap_or(v.replicates);
        let audits = run_ensemble(reps, |i| {
            let mut sim = Simulator::new(kind, state.clone(), p, i)?;
            sim.run_until(|_| false)?;
            Ok(*sim.audit())
        })?;
        let mut audit = ReflectionAudit::default();
        audits.iter().for_each(|a| audit.merge(a));
        record("reflection contract", audit.is_clean(), audit_json(&audit));
    }
    let passed = checks.iter().all(|c| c["pass"] == json!(true));
    let mut w = out.csv("verify.csv")?;
    writeln!(w, "check,pass")?;
    for c in &checks {
        writeln!(w, "\"{}\",{}", c["check"].as_str().unwrap(), u8::from(c["pass"] == json!(true)))?;
    }
    w.flush()?;
    Ok(Outcome {
        passed,
        report: json!({ "checks": checks }),
    })
}
