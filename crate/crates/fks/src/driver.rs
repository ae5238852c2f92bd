//! Time loops, convergence studies and benchmarks.

use std::path::PathBuf;

use anyhow::{bail, Context};
use fks_core::problems::{
    init_vortex_2d, vortex_errors, ErrorReport, MeshError, Problem, ProblemSpec,
};
use fks_core::{MomentField, Scheme, Solver, SolverConfig};

use crate::config::RunConfig;
use crate::output;
use crate::timing::{Stopwatch, TimingRecord};

/// How the time step is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    /// The scheme's CFL rule with the configured factor, re-evaluated every cycle.
    Cfl,
    /// A fixed step.
    Fixed(f64),
}

/// State and cost of a finished time loop.
#[derive(Debug)]
pub struct Simulation {
    pub solver: Solver,
    pub cycles: usize,
    pub timing: TimingRecord,
}

/// When a time loop ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stop {
    /// At this time; the last step is shortened to land on it.
    Time(f64),
    /// After this many cycles.
    Cycles(usize),
}

/// Advances `solver` until `stop`. `observe` runs after every cycle and is
/// excluded from the timing.
pub fn simulate(
    mut solver: Solver,
    config: &SolverConfig,
    stop: Stop,
    rule: StepRule,
    mut observe: impl FnMut(usize, &Solver) -> anyhow::Result<()>,
) -> anyhow::Result<Simulation> {
    let cells = solver.space().len();
    let dofs = cells * solver.dofs_per_cell();
    let mut clock = Stopwatch::default();
    let mut t = 0.0;
    let mut cycles = 0;
    let (t_final, max_cycles) = match stop {
        Stop::Time(t) => (t, usize::MAX),
        Stop::Cycles(n) => (f64::INFINITY, n),
    };
    while cycles < max_cycles && (t_final == f64::INFINITY || t_final - t > 1e-12 * t_final) {
        clock.start();
        let mut dt = match rule {
            StepRule::Cfl => solver
                .timestep(config.cfl)
                .with_context(|| format!("time step at t = {t}"))?,
            StepRule::Fixed(dt) => dt,
        };
        if t + dt > t_final {
            dt = t_final - t;
        }
        solver
            .step(dt, config.tau)
            .with_context(|| format!("cycle {} at t = {t}", cycles + 1))?;
        clock.stop();
        t += dt;
        cycles += 1;
        observe(cycles, &solver)?;
    }
    Ok(Simulation {
        solver,
        cycles,
        timing: TimingRecord {
            cells,
            dofs,
            cycles,
            wall: clock.seconds(),
        },
    })
}

/// Files and diagnostics of a finished run.
#[derive(Debug)]
pub struct RunOutcome {
    pub cycles: usize,
    pub timing: TimingRecord,
    /// Relative L1 and L-infinity density errors, for problems with an exact solution.
    pub errors: Option<(f64, f64)>,
    pub snapshots: Vec<PathBuf>,
    pub moments: MomentField,
}

/// Runs one configuration and writes the manifest, snapshots, timing and
/// (where available) error tables into the output directory.
pub fn run(cfg: &RunConfig) -> anyhow::Result<RunOutcome> {
    let spec = cfg.problem_spec();
    let config = cfg.solver_config();
    let dir = cfg.output_dir.clone();
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    output::write_atomic(&dir.join("manifest.txt"), &cfg.manifest())
        .with_context(|| format!("writing to {}", dir.display()))?;
    let solver = Solver::for_problem(&spec, &config)?;
    let grid = solver.space().clone();
    let gamma = config.gamma;
    let mut snapshots = Vec::new();
    if cfg.output_every > 0 {
        snapshots.push(output::write_snapshot(
            &dir,
            0,
            solver.moments(),
            &grid,
            gamma,
        )?);
    }
    let every = cfg.output_every;
    let rule = cfg.dt.map_or(StepRule::Cfl, StepRule::Fixed);
    let sim = simulate(
        solver,
        &config,
        Stop::Time(spec.t_final),
        rule,
        |cycle, s| {
            if every > 0 && cycle % every == 0 {
                snapshots.push(output::write_snapshot(
                    &dir,
                    cycle,
                    s.moments(),
                    &grid,
                    gamma,
                )?);
            }
            Ok(())
        },
    )?;
    if every == 0 || sim.cycles % every != 0 {
        snapshots.push(output::write_snapshot(
            &dir,
            sim.cycles,
            sim.solver.moments(),
            &grid,
            gamma,
        )?);
    }
    let rows = [(
        spec.name().to_string(),
        cfg.scheme.name().to_string(),
        sim.timing,
    )];
    output::write_atomic(&dir.join("timing.csv"), &output::timing_csv(&rows))?;
    let errors = match spec.vortex() {
        Some(p) => {
            let e = vortex_errors(sim.solver.moments(), &grid, p, sim.solver.time())?;
            let mut report = ErrorReport::default();
            report.push(MeshError {
                cells: spec.cells,
                l1: e.0,
                linf: e.1,
            });
            output::write_atomic(
                &dir.join("errors.csv"),
                &output::errors_csv(cfg.scheme.name(), &report),
            )?;
            Some(e)
        }
        None => None,
    };
    Ok(RunOutcome {
        cycles: sim.cycles,
        timing: sim.timing,
        errors,
        snapshots,
        moments: sim.solver.moments().clone(),
    })
}

/// Time-step policy of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StudyStep {
    /// CFL rule on every mesh.
    Cfl,
    /// `dt = dt0 (M0 / M)^2`, with `dt0` the initial CFL step on the coarsest
    /// mesh `M0`, so time error decays like the square of the mesh size.
    Quadratic,
}

/// Vortex convergence study parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub scheme: Scheme,
    pub meshes: Vec<usize>,
    pub velocity_nodes: usize,
    pub velocity_bound: f64,
    pub tau: f64,
    pub t_final: f64,
    pub cfl: f64,
    pub step: StudyStep,
}

impl StudyConfig {
    pub fn new(scheme: Scheme, meshes: Vec<usize>) -> Self {
        let base = init_vortex_2d(25);
        StudyConfig {
            scheme,
            meshes,
            velocity_nodes: base.velocity_nodes,
            velocity_bound: base.velocity_bound,
            tau: base.tau,
            t_final: base.t_final,
            cfl: 0.5,
            step: StudyStep::Quadratic,
        }
    }

    pub fn spec(&self, m: usize) -> ProblemSpec {
        let mut spec = init_vortex_2d(m);
        spec.velocity_nodes = self.velocity_nodes;
        spec.velocity_bound = self.velocity_bound;
        spec.tau = self.tau;
        spec.t_final = self.t_final;
        spec
    }
}

/// Errors and costs of a convergence study.
#[derive(Debug, Clone)]
pub struct StudyResult {
    pub report: ErrorReport,
    pub timings: Vec<TimingRecord>,
}

/// Runs the vortex on every mesh and measures density errors at the final time.
pub fn convergence_study(study: &StudyConfig) -> anyhow::Result<StudyResult> {
    if study.meshes.is_empty() {
        bail!("no meshes given");
    }
    let mut meshes = study.meshes.clone();
    meshes.sort_unstable();
    let mut report = ErrorReport::default();
    let mut timings = Vec::new();
    let mut base: Option<(usize, f64)> = None;
    for &m in &meshes {
        let spec = study.spec(m);
        let config = SolverConfig {
            cfl: study.cfl,
            ..SolverConfig::for_problem(&spec, study.scheme)
        };
        let solver = Solver::for_problem(&spec, &config).with_context(|| format!("mesh {m}"))?;
        let rule = match study.step {
            StudyStep::Cfl => StepRule::Cfl,
            StudyStep::Quadratic => {
                let (m0, dt0) = *base.get_or_insert((m, solver.timestep(study.cfl)?));
                let r = m0 as f64 / m as f64;
                StepRule::Fixed(dt0 * r * r)
            }
        };
        let sim = simulate(solver, &config, Stop::Time(spec.t_final), rule, |_, _| {
            Ok(())
        })
        .with_context(|| format!("mesh {m}"))?;
        let grid = sim.solver.space();
        let (l1, linf) = vortex_errors(
            sim.solver.moments(),
            grid,
            spec.vortex().expect("vortex"),
            sim.solver.time(),
        )?;
        report.push(MeshError { cells: m, l1, linf });
        timings.push(sim.timing);
    }
    Ok(StudyResult { report, timings })
}

/// One row of a benchmark.
#[derive(Debug, Clone, Copy)]
pub struct BenchRow {
    pub scheme: Scheme,
    pub cells: usize,
    pub timing: TimingRecord,
}

/// Times `cycles` steps of each scheme on each mesh of `problem`.
pub fn bench(
    problem: Problem,
    schemes: &[Scheme],
    meshes: &[usize],
    cycles: usize,
) -> anyhow::Result<Vec<BenchRow>> {
    if cycles == 0 {
        bail!("cycle count must be positive");
    }
    let mut rows = Vec::new();
    for &m in meshes {
        let mut spec = problem.spec();
        spec.cells = m;
        for &scheme in schemes {
            let config = SolverConfig::for_problem(&spec, scheme);
            let solver = Solver::for_problem(&spec, &config)?;
            let sim = simulate(
                solver,
                &config,
                Stop::Cycles(cycles),
                StepRule::Cfl,
                |_, _| Ok(()),
            )?;
            rows.push(BenchRow {
                scheme,
                cells: m,
                timing: sim.timing,
            });
        }
    }
    Ok(rows)
}

/// Per-cycle cost of HOFKS over FKS for every mesh where both were timed.
pub fn cost_ratios(rows: &[BenchRow]) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for h in rows.iter().filter(|r| r.scheme == Scheme::Hofks) {
        if let Some(f) = rows
            .iter()
            .find(|r| r.scheme == Scheme::Fks && r.cells == h.cells)
        {
            out.push((
                h.cells,
                h.timing.time_per_cycle() / f.timing.time_per_cycle(),
            ));
        }
    }
    out
}
