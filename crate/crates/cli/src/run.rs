//! Single runs and sweeps: integrate, then write the CSV outputs and a
//! manifest from which the run can be reproduced.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use wsi_core::diagnostics::{check_velocity_bound, BoundMode, EnergyReport};
use wsi_core::spectral::Spectral;
use wsi_core::{stable_dt, step, BousSolver, CoupledModel, FluidState, SolidState, SvSolver};

use crate::config::{RunConfig, SolverKind};

pub const BUILD_ID: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub build: String,
    pub status: Status,
    pub error: Option<String>,
    /// Start time of the step that failed.
    pub failing_time: Option<f64>,
    pub final_time: f64,
    pub steps: usize,
    pub outputs: usize,
    pub wall_time_s: f64,
    pub config: toml::Table,
}

/// Samples taken at every output time.
#[derive(Debug, Default)]
struct Trace {
    fluids: Vec<FluidState>,
    solids: Vec<SolidState>,
}

struct Failure {
    time: f64,
    error: wsi_core::Error,
}

fn model(config: &RunConfig) -> wsi_core::Result<Box<dyn CoupledModel>> {
    let problem = config.problem()?;
    Ok(match config.solver {
        SolverKind::Sv => Box::new(SvSolver::new(problem)?),
        SolverKind::Bous => Box::new(BousSolver::new(problem, config.closure)?),
    })
}

/// Same landing rule as `wsi_core::integrate`, but keeps the time of a failing step.
fn simulate(model: &dyn CoupledModel, config: &RunConfig, trace: &mut Trace) -> (usize, Option<Failure>) {
    let grid = model.problem().grid;
    let fluid = match FluidState::new(config.initial.zeta(&grid), vec![0.0; grid.n], 0.0) {
        Ok(f) => f,
        Err(error) => return (0, Some(Failure { time: 0.0, error })),
    };
    let mut solid = SolidState::initial(config.v0);
    let mut fluid = fluid;
    let mut steps = 0;
    let fail = |time, error| Some(Failure { time, error });
    match model.tendency(&fluid, &solid) {
        Ok(t) => solid.a_s = t.accel,
        Err(e) => return (0, fail(0.0, e)),
    }
    trace.fluids.push(fluid.clone());
    trace.solids.push(solid);
    let horizon = config.effective_horizon();
    let tiny = 1e-12 * horizon.max(1.0);
    let mut next = 1usize;
    while fluid.time < horizon - tiny {
        let target = (next as f64 * config.output_interval).min(horizon);
        let dt = match stable_dt(model, &fluid, &solid) {
            Ok(dt) => dt.min(target - fluid.time),
            Err(e) => return (steps, fail(fluid.time, e)),
        };
        match step(model, &fluid, &solid, dt) {
            Ok((f, s)) => {
                fluid = f;
                solid = s;
                steps += 1;
            }
            Err(e) => return (steps, fail(fluid.time, e)),
        }
        if fluid.time >= target - tiny {
            fluid.time = target;
            trace.fluids.push(fluid.clone());
            trace.solids.push(solid);
            next += 1;
        }
    }
    (steps, None)
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(csv::Writer::from_writer(BufWriter::new(file)))
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_outputs(model: &dyn CoupledModel, config: &RunConfig, trace: &Trace, out: &Path) -> Result<()> {
    let pb = model.problem();
    let nodes = pb.grid.nodes();

    let mut w = csv_writer(&out.join("snapshots.csv"))?;
    w.write_record(["t", "x", "zeta", "vbar"])?;
    for f in &trace.fluids {
        for (i, x) in nodes.iter().enumerate() {
            w.write_record([fmt(f.time), fmt(*x), fmt(f.zeta[i]), fmt(f.vbar[i])])?;
        }
    }
    w.flush()?;

    let mut w = csv_writer(&out.join("solid.csv"))?;
    w.write_record(["t", "X_S", "Xdot_S", "Xddot_S"])?;
    for (f, s) in trace.fluids.iter().zip(&trace.solids) {
        w.write_record([fmt(f.time), fmt(s.x_s), fmt(s.v_s), fmt(s.a_s)])?;
    }
    w.flush()?;

    let spectral = Spectral::new(&pb.grid);
    let mode = match config.solver {
        SolverKind::Sv => BoundMode::SaintVenant,
        SolverKind::Bous => BoundMode::Boussinesq { c0: config.c0 },
    };
    let margins = if trace.fluids.is_empty() {
        Vec::new()
    } else {
        check_velocity_bound(pb, &spectral, &trace.fluids, &trace.solids, mode)?.margins
    };
    let mut w = csv_writer(&out.join("energy.csv"))?;
    w.write_record([
        "t", "E_B", "mass", "l2_zeta", "l2_v", "xs0", "xs1", "X_S", "Xdot_S", "v_bound_margin",
    ])?;
    for ((f, s), margin) in trace.fluids.iter().zip(&trace.solids).zip(&margins) {
        let r = EnergyReport::sample(pb, &spectral, f, s)?;
        w.write_record(
            [r.t, r.e_b, r.mass, r.l2_zeta, r.l2_v, r.xs0, r.xs1, r.x_s, r.v_s, *margin].map(fmt),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Runs one configuration into `out`; a solver failure is recorded in the
/// manifest and reported as `Status::Failed` rather than as an `Err`.
pub fn run(config: &RunConfig, out: &Path) -> Result<Manifest> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let start = Instant::now();
    let model = model(config).context("building the solver")?;
    let mut trace = Trace::default();
    let (steps, failure) = simulate(model.as_ref(), config, &mut trace);
    write_outputs(model.as_ref(), config, &trace, out)?;
    let manifest = Manifest {
        build: BUILD_ID.to_string(),
        status: if failure.is_some() { Status::Failed } else { Status::Ok },
        error: failure.as_ref().map(|f| f.error.to_string()),
        failing_time: failure.as_ref().map(|f| f.time),
        final_time: trace.fluids.last().map_or(0.0, |f| f.time),
        steps,
        outputs: trace.fluids.len(),
        wall_time_s: start.elapsed().as_secs_f64(),
        config: config.to_table(),
    };
    let path = out.join("manifest.json");
    let mut file = BufWriter::new(File::create(&path).with_context(|| format!("creating {}", path.display()))?);
    serde_json::to_writer_pretty(&mut file, &manifest)?;
    writeln!(file)?;
    file.flush()?;
    Ok(manifest)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub index: usize,
    pub dir: PathBuf,
    pub status: Status,
    pub error: Option<String>,
}

/// Runs every configuration on a pool of `workers` threads, each into its
/// own `run_NNN` directory, and writes `sweep.csv` listing the outcomes.
pub fn sweep(configs: &[RunConfig], axes: &[&str], out: &Path, workers: usize) -> Result<Vec<SweepEntry>> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build()?;
    let entries: Vec<SweepEntry> = pool.install(|| {
        configs
            .par_iter()
            .enumerate()
            .map(|(index, config)| {
                let dir = out.join(format!("run_{index:03}"));
                let (status, error) = match run(config, &dir) {
                    Ok(m) => (m.status, m.error),
                    Err(e) => (Status::Failed, Some(format!("{e:#}"))),
                };
                SweepEntry {
                    index,
                    dir,
                    status,
                    error,
                }
            })
            .collect()
    });

    let mut w = csv_writer(&out.join("sweep.csv"))?;
    let mut header = vec!["index".to_string(), "dir".to_string()];
    header.extend(axes.iter().map(|a| a.to_string()));
    header.extend(["status".to_string(), "error".to_string()]);
    w.write_record(&header)?;
    for (entry, config) in entries.iter().zip(configs) {
        let table = config.to_table();
        let mut row = vec![entry.index.to_string(), entry.dir.display().to_string()];
        row.extend(axes.iter().map(|a| table.get(*a).map_or(String::new(), |v| v.to_string())));
        row.push(serde_json::to_value(entry.status)?.as_str().unwrap_or_default().to_string());
        row.push(entry.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(entries)
}
