//! Experiment orchestration: each pipeline fills an in-memory [`Sink`],
//! which is written to a staging directory and promoted with one rename.

use crate::config::*;
use crate::error::{CliError, Result, TaskContext};
use crate::manifest::*;
use randopt::graphopt::{
    exact_optimum_with_cap, first_moment_curve, greedy_clique_in_order, greedy_independent_set,
    greedy_independent_set_in_order, karp_greedy_clique, crossing_point, MomentCurve, SubsetKind,
};
use randopt::instances::{gen_er_graph, gen_gaussian_tensor, gen_ksat, gen_sparse_graph, make_interpolation_path};
use randopt::ksat::{density_sweep, first_moment_crossing, sat_crossing, sat_moment_curve, to_dimacs, SweepSolver};
use randopt::ogp::{
    cluster_solutions_with_floor, detect_gap, interpolation_overlap_experiment, karp_stability_profile,
    overlap_histogram, planted_gap_suite, sample_near_optima, InterpConfig, Model, Objective, SamplerConfig,
};
use randopt::parisi::{
    convergence_table, minimize_functional, minimize_paired, MixtureSpec, OptimizerConfig, ParamClass, PdeGrid,
};
use randopt::spin::{brute_force_ground_state, guided_walk, metropolis_chain, BetaSchedule, WalkConfig, WalkError};
use randopt::{Instance, RngStream};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Output files and provenance collected by a pipeline.
#[derive(Default)]
pub(crate) struct Sink {
    files: BTreeMap<String, Vec<u8>>,
    instances: Vec<InstanceRecord>,
    tasks: Vec<TaskSeed>,
}

impl Sink {
    fn csv<S: Serialize>(&mut self, name: &str, rows: &[S]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in rows {
            w.serialize(r)
                .map_err(|e| CliError::Integrity(format!("serializing {name}: {e}")))?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Integrity(format!("serializing {name}: {e}")))?;
        self.files.insert(name.to_string(), bytes);
        Ok(())
    }

    fn json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)
            .map_err(|e| CliError::Integrity(format!("serializing {name}: {e}")))?;
        bytes.push(b'\n');
        self.files.insert(name.to_string(), bytes);
        Ok(())
    }

    fn bytes(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.insert(name.to_string(), bytes);
    }

    fn instance(&mut self, task: &str, inst: &Instance) {
        let o = inst.origin();
        self.instances.push(InstanceRecord {
            task: task.to_string(),
            seed: o.seed,
            label: o.label.clone(),
            content_hash: inst.content_hash(),
        });
    }

    fn task(&mut self, task: &str, stream: &RngStream) {
        self.tasks.push(TaskSeed {
            task: task.to_string(),
            seed: stream.seed,
            label: stream.label.clone(),
        });
    }
}

/// Runs `exp` from `config` and writes its outputs to `out`.
///
/// Outputs are staged next to `out` and promoted by renaming, so `out`
/// never holds a partial run. An existing `out` is replaced only if it is
/// a previous run directory (it contains a manifest) or empty.
pub fn run_experiment(config: &ExperimentConfig, exp: Experiment, out: &Path) -> Result<RunManifest> {
    let config = config.clone().with_section(exp).restricted_to(exp);
    config.validate(exp)?;
    check_target(out)?;
    let jobs = config
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::config("jobs", e.to_string()))?;
    let started = Instant::now();
    let mut sink = Sink::default();
    pool.install(|| match exp {
        Experiment::Gen => run_gen(&config, &mut sink),
        Experiment::Graphopt => run_graphopt(&config, &mut sink),
        Experiment::Spin => run_spin(&config, &mut sink),
        Experiment::Parisi => run_parisi(&config, &mut sink),
        Experiment::Ksat => run_ksat(&config, &mut sink),
        Experiment::Ogp => run_ogp(&config, &mut sink),
    })?;
    let elapsed = started.elapsed();

    // placement and thread count do not affect results, so they are left
    // out of the echo and replays elsewhere or with other `jobs` match
    let mut echo = config.clone();
    echo.out = None;
    echo.jobs = None;
    sink.bytes(CONFIG_FILE, echo.to_toml_string().into_bytes());
    let manifest = RunManifest {
        tool: "randopt".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        experiment: exp.name().into(),
        config: serde_json::to_value(&echo).expect("config serializes"),
        instances: std::mem::take(&mut sink.instances),
        tasks: std::mem::take(&mut sink.tasks),
        outputs: sink.files.iter().map(|(k, v)| (k.clone(), sha256_hex(v))).collect(),
    };
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    manifest_bytes.push(b'\n');

    let staging = staging_dir(out);
    if staging.exists() {
        std::fs::remove_dir_all(&staging).map_err(CliError::io(format!("clearing {}", staging.display())))?;
    }
    let write = || -> Result<()> {
        for (name, bytes) in &sink.files {
            let path = staging.join(name);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent).map_err(CliError::io(format!("creating {}", parent.display())))?;
            }
            std::fs::write(&path, bytes).map_err(CliError::io(format!("writing {}", path.display())))?;
        }
        std::fs::write(staging.join(MANIFEST_FILE), &manifest_bytes)
            .map_err(CliError::io("writing manifest"))?;
        std::fs::write(
            staging.join(WALL_CLOCK_FILE),
            format!("seconds = {:.3}\njobs = {jobs}\n", elapsed.as_secs_f64()),
        )
        .map_err(CliError::io("writing wall clock"))?;
        Ok(())
    };
    std::fs::create_dir_all(&staging).map_err(CliError::io(format!("creating {}", staging.display())))?;
    if let Err(e) = write() {
        let _ = std::fs::remove_dir_all(&staging);
        return Err(e);
    }
    if out.exists() {
        std::fs::remove_dir_all(out).map_err(CliError::io(format!("replacing {}", out.display())))?;
    }
    std::fs::rename(&staging, out).map_err(CliError::io(format!("promoting run to {}", out.display())))?;
    Ok(manifest)
}

fn check_target(out: &Path) -> Result<()> {
    if !out.exists() {
        return Ok(());
    }
    if !out.is_dir() {
        return Err(CliError::config("out", format!("{} exists and is not a directory", out.display())));
    }
    let empty = std::fs::read_dir(out)
        .map_err(CliError::io(format!("reading {}", out.display())))?
        .next()
        .is_none();
    if empty || out.join(MANIFEST_FILE).exists() {
        Ok(())
    } else {
        Err(CliError::config(
            "out",
            format!("{} is a nonempty directory without a run manifest", out.display()),
        ))
    }
}

fn staging_dir(out: &Path) -> PathBuf {
    let name = out.file_name().map_or("run".into(), |n| n.to_string_lossy().into_owned());
    out.with_file_name(format!(".{name}.staging-{}", std::process::id()))
}

fn gen_instance(g: &GenConfig, stream: &RngStream) -> randopt::Result<Instance> {
    Ok(match g.kind {
        GenKind::Graph => Instance::Graph(gen_er_graph(g.n, g.edge_prob, stream)?),
        GenKind::SparseGraph => Instance::Graph(gen_sparse_graph(g.n, g.avg_degree, stream)?),
        GenKind::Tensor => Instance::Tensor(gen_gaussian_tensor(g.n, g.p, stream)?),
        GenKind::Ksat => {
            let m = (g.density * g.n as f64).round() as usize;
            Instance::KSat(gen_ksat(g.n, m, g.k, stream)?)
        }
    })
}

fn run_gen(c: &ExperimentConfig, sink: &mut Sink) -> Result<()> {
    let g = c.gen.as_ref().expect("validated");
    let kind = serde_json::to_value(g.kind).expect("kind serializes");
    let kind = kind.as_str().expect("unit variant");
    for i in 0..g.count {
        let task = format!("instance_{i}");
        let stream = RngStream::new(c.seed, format!("gen/{kind}/{i}"));
        let inst = gen_instance(g, &stream).task(|| task.clone())?;
        sink.bytes(&format!("{task}.bin"), inst.to_bytes());
        sink.json(&format!("{task}.json"), &inst.sidecar())?;
        if let (Instance::KSat(f), true) = (&inst, g.dimacs) {
            sink.bytes(&format!("{task}.cnf"), to_dimacs(f).into_bytes());
        }
        sink.task(&task, &stream);
        sink.instance(&task, &inst);
    }
    Ok(())
}

#[derive(Serialize)]
struct GraphoptRow {
    seed_index: usize,
    n: usize,
    edges: usize,
    greedy_size: Option<usize>,
    greedy_valid: Option<bool>,
    greedy_maximal: Option<bool>,
    exact_size: Option<usize>,
    instance_hash: String,
}

#[derive(Serialize)]
struct MomentRow {
    x: usize,
    log2_expected_count: f64,
}

fn run_graphopt(c: &ExperimentConfig, sink: &mut Sink) -> Result<()> {
    let g = c.graphopt.as_ref().expect("validated");
    let results = (0..g.seeds)
        .into_par_iter()
        .map(|s| -> Result<(GraphoptRow, Instance, RngStream)> {
            let task = format!("seed_{s}");
            let stream = RngStream::new(c.seed, format!("graphopt/{s}"));
            let graph = match g.avg_degree {
                Some(d) => gen_sparse_graph(g.n, d, &stream.child("graph")),
                None => gen_er_graph(g.n, g.edge_prob, &stream.child("graph")),
            }
            .task(|| task.clone())?;
            let greedy = g.greedy.then(|| {
                let order: Vec<usize> = (0..g.n).collect();
                match (g.kind, g.fixed_order) {
                    (SubsetKind::Clique, true) => greedy_clique_in_order(&graph, &order),
                    (SubsetKind::Clique, false) => karp_greedy_clique(&graph, &stream.child("greedy")),
                    (SubsetKind::IndependentSet, true) => greedy_independent_set_in_order(&graph, &order),
                    (SubsetKind::IndependentSet, false) => greedy_independent_set(&graph, &stream.child("greedy")),
                }
            });
            let exact = if g.exact {
                Some(exact_optimum_with_cap(&graph, g.kind, g.exact_cap).task(|| task.clone())?)
            } else {
                None
            };
            let inst = Instance::Graph(graph);
            let graph = inst.as_graph().expect("graph");
            let row = GraphoptRow {
                seed_index: s,
                n: g.n,
                edges: graph.edge_count(),
                greedy_size: greedy.as_ref().map(|x| x.size()),
                greedy_valid: greedy.as_ref().map(|x| x.verify(graph)),
                greedy_maximal: greedy.as_ref().map(|x| x.is_maximal(graph)),
                exact_size: exact.as_ref().map(|x| x.size()),
                instance_hash: inst.content_hash(),
            };
            Ok((row, inst, stream))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(results.len());
    for (row, inst, stream) in results {
        let task = format!("seed_{}", row.seed_index);
        sink.task(&task, &stream);
        sink.instance(&task, &inst);
        rows.push(row);
    }
    sink.csv("graphopt.csv", &rows)?;
    if g.moment_curve && g.avg_degree.is_none() && g.edge_prob > 0.0 {
        let curve = match g.kind {
            SubsetKind::Clique => first_moment_curve(g.n, g.edge_prob),
            SubsetKind::IndependentSet => MomentCurve::for_independent_sets(g.n, g.edge_prob),
        };
        if let Ok(curve) = curve {
            let rows: Vec<MomentRow> = curve
                .points
                .iter()
                .map(|&(x, y)| MomentRow {
                    x,
                    log2_expected_count: y,
                })
                .collect();
            sink.csv("moment_curve.csv", &rows)?;
            sink.json(
                "moment_summary.json",
                &serde_json::json!({
                    "n": g.n,
                    "edge_prob": g.edge_prob,
                    "crossing_point": crossing_point(&curve),
                    "two_log2_n": 2.0 * (g.n as f64).log2(),
                }),
            )?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SpinRow {
    seed_index: usize,
    n: usize,
    p: usize,
    method: &'static str,
    status: &'static str,
    energy: Option<f64>,
    ground_energy: Option<f64>,
    ratio: Option<f64>,
    steps: Option<usize>,
    kicks: Option<usize>,
    acceptance_rate: Option<f64>,
    configuration: Option<String>,
    instance_hash: String,
}

fn run_spin(c: &ExperimentConfig, sink: &mut Sink) -> Result<()> {
    let sc = c.spin.as_ref().expect("validated");
    let results = (0..sc.seeds)
        .into_par_iter()
        .map(|s| -> Result<(SpinRow, Option<String>, Instance, RngStream)> {
            let task = format!("seed_{s}");
            let stream = RngStream::new(c.seed, format!("spin/{s}"));
            let j = gen_gaussian_tensor(sc.n, sc.p, &stream.child("tensor")).task(|| task.clone())?;
            let ground = if sc.method == SpinMethod::Ground || sc.compare_ground {
                Some(brute_force_ground_state(&j).task(|| task.clone())?)
            } else {
                None
            };
            let mut row = SpinRow {
                seed_index: s,
                n: sc.n,
                p: sc.p,
                method: "",
                status: "ok",
                energy: None,
                ground_energy: ground.as_ref().map(|g| g.1),
                ratio: None,
                steps: None,
                kicks: None,
                acceptance_rate: None,
                configuration: None,
                instance_hash: String::new(),
            };
            let mut trajectory = None;
            match sc.method {
                SpinMethod::Ground => {
                    let (cfg, e) = ground.clone().expect("computed");
                    row.method = "ground";
                    row.energy = Some(e);
                    row.configuration = Some(cfg.to_bits().to_bit_string());
                }
                SpinMethod::Metropolis => {
                    row.method = "metropolis";
                    let schedule = BetaSchedule::Linear {
                        start: sc.beta_start,
                        end: sc.beta_end,
                    };
                    let chain = metropolis_chain(&j, schedule, sc.sweeps, &stream.child("chain")).task(|| task.clone())?;
                    row.energy = Some(chain.best_energy);
                    row.acceptance_rate = Some(chain.acceptance_rate);
                    row.configuration = Some(chain.best.to_bits().to_bit_string());
                }
                SpinMethod::Walk => {
                    row.method = "walk";
                    let wc = WalkConfig {
                        step: sc.step,
                        max_steps: sc.max_steps,
                        orthogonalize: sc.orthogonalize,
                    };
                    match guided_walk(&j, wc, &stream.child("walk")) {
                        Ok(w) => {
                            row.energy = Some(w.energy);
                            row.steps = Some(w.point.steps);
                            row.kicks = Some(w.trajectory.kicks);
                            row.configuration = Some(w.config.to_bits().to_bit_string());
                            trajectory = Some(w.trajectory.to_csv());
                        }
                        Err(WalkError::Stalled { point, trajectory: t, .. }) => {
                            row.status = "stalled";
                            row.steps = Some(point.steps);
                            row.kicks = Some(t.kicks);
                            trajectory = Some(t.to_csv());
                        }
                        Err(WalkError::Invalid(e)) => return Err(CliError::Task { task, source: e }),
                    }
                }
            }
            if let (Some(e), Some(g)) = (row.energy, row.ground_energy) {
                row.ratio = Some(e / g);
            }
            let inst = Instance::Tensor(j);
            row.instance_hash = inst.content_hash();
            Ok((row, trajectory, inst, stream))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for (row, trajectory, inst, stream) in results {
        let task = format!("seed_{}", row.seed_index);
        if let (true, Some(t)) = (sc.trajectories, trajectory) {
            sink.bytes(&format!("trajectories/{task}.csv"), t.into_bytes());
        }
        sink.task(&task, &stream);
        sink.instance(&task, &inst);
        rows.push(row);
    }
    sink.csv("spin.csv", &rows)
}

#[derive(Serialize)]
struct LadderRow {
    class: String,
    atoms: usize,
    value: f64,
    converged: bool,
}

#[derive(Serialize)]
struct EvalRow {
    class: String,
    atoms: usize,
    start: usize,
    value: f64,
}

#[derive(Serialize)]
struct ConvergenceRow {
    class: String,
    spacing: f64,
    value: f64,
}

fn run_parisi(c: &ExperimentConfig, sink: &mut Sink) -> Result<()> {
    let pc = c.parisi.as_ref().expect("validated");
    let spec = match (&pc.coefficients, pc.monomial) {
        (Some(cs), _) => MixtureSpec::from_coefficients(cs.clone()),
        (None, true) => MixtureSpec::monomial(pc.p),
        (None, false) => MixtureSpec::pure(pc.p),
    }
    .map_err(|e| CliError::config("parisi.coefficients", e.to_string()))?
    .with_penalty(pc.penalty);
    let grid = PdeGrid {
        spacing: pc.spacing,
        max_half_width: pc.max_half_width,
    };
    let oc = OptimizerConfig {
        starts: pc.starts,
        seed: c.seed,
        max_evals: pc.max_evals,
        tolerance: pc.tolerance,
        m_max: pc.m_max,
        grid,
        warm_start: None,
    };
    sink.tasks.push(TaskSeed {
        task: "optimizer".into(),
        seed: c.seed,
        label: "parisi/optimizer".into(),
    });
    let task = || "parisi".to_string();
    let minima = match pc.class {
        ParisiClass::U => {
            let m = minimize_functional(&spec, ParamClass::U, pc.k, &oc).task(task)?;
            sink.json("parisi.json", &m)?;
            vec![m]
        }
        ParisiClass::L => {
            let class = ParamClass::L {
                tv_budget: pc.tv_budget.unwrap_or(pc.m_max),
            };
            let m = minimize_functional(&spec, class, pc.k, &oc).task(task)?;
            sink.json("parisi.json", &m)?;
            vec![m]
        }
        ParisiClass::Paired => {
            let pm = minimize_paired(&spec, pc.k, &oc).task(task)?;
            sink.json("parisi.json", &pm)?;
            vec![pm.u, pm.l]
        }
    };
    let mut ladder = Vec::new();
    let mut evals = Vec::new();
    let mut conv = Vec::new();
    for m in &minima {
        let class = m.order.class().name().to_string();
        for s in &m.trace.ladder {
            ladder.push(LadderRow {
                class: class.clone(),
                atoms: s.atoms,
                value: s.value,
                converged: s.converged,
            });
        }
        for e in &m.trace.evaluations {
            evals.push(EvalRow {
                class: class.clone(),
                atoms: e.atoms,
                start: e.start,
                value: e.value,
            });
        }
        if pc.convergence_levels > 0 {
            for (spacing, value) in convergence_table(&m.order, &spec, &grid, pc.convergence_levels).task(task)? {
                conv.push(ConvergenceRow {
                    class: class.clone(),
                    spacing,
                    value,
                });
            }
        }
    }
    sink.csv("parisi_ladder.csv", &ladder)?;
    sink.csv("parisi_evaluations.csv", &evals)?;
    if !conv.is_empty() {
        sink.csv("parisi_convergence.csv", &conv)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SatMomentRow {
    density: f64,
    m: usize,
    ln_expected_solutions: f64,
}

fn run_ksat(c: &ExperimentConfig, sink: &mut Sink) -> Result<()> {
    let kc = c.ksat.as_ref().expect("validated");
    let grid = kc.densities.values();
    let solver = match kc.solver {
        KsatSolver::Dpll => SweepSolver::Dpll {
            node_budget: kc.node_budget,
        },
        KsatSolver::Walksat => SweepSolver::WalkSat {
            max_flips: kc.max_flips,
            noise: kc.noise,
        },
    };
    let task = || "ksat sweep".to_string();
    let points = density_sweep(kc.n, kc.k, &grid, kc.trials, c.seed, solver).task(task)?;
    sink.csv("sat_curve.csv", &points)?;
    let curve = sat_moment_curve(kc.n, kc.k, &grid).task(task)?;
    let rows: Vec<SatMomentRow> = curve
        .points
        .iter()
        .map(|&(density, m, y)| SatMomentRow {
            density,
            m,
            ln_expected_solutions: y,
        })
        .collect();
    sink.csv("moment_curve.csv", &rows)?;
    sink.json(
        "ksat_summary.json",
        &serde_json::json!({
            "n": kc.n,
            "k": kc.k,
            "grid_points": grid.len(),
            "trials": kc.trials,
            "sat_crossing": sat_crossing(&points),
            "first_moment_crossing": first_moment_crossing(kc.k).task(task)?,
        }),
    )?;
    // instances are regenerated from the sweep's streams for provenance
    let root = RngStream::new(c.seed, "ksat/sweep");
    for (i, &d) in grid.iter().enumerate() {
        let m = (d * kc.n as f64).round() as usize;
        let at = root.child(format!("c{i}"));
        sink.task(&format!("c{i}"), &at);
        for t in 0..kc.trials {
            let stream = at.child(format!("t{t}"));
            let f = gen_ksat(kc.n, m, kc.k, &stream).task(task)?;
            if kc.dimacs && t == 0 {
                sink.bytes(&format!("instances/c{i}_t0.cnf"), to_dimacs(&f).into_bytes());
            }
            sink.instance(&format!("c{i}/t{t}"), &Instance::KSat(f));
        }
    }
    Ok(())
}

fn ogp_instance(o: &OgpConfig, stream: &RngStream) -> randopt::Result<Instance> {
    Ok(match o.model {
        OgpModel::Spin => Instance::Tensor(gen_gaussian_tensor(o.n, o.p, stream)?),
        OgpModel::Clique | OgpModel::IndependentSet => Instance::Graph(gen_er_graph(o.n, o.edge_prob, stream)?),
        OgpModel::Ksat => {
            let m = (o.density * o.n as f64).round() as usize;
            Instance::KSat(gen_ksat(o.n, m, o.k, stream)?)
        }
    })
}

fn objective(o: &OgpConfig) -> Objective {
    match o.model {
        OgpModel::Spin => Objective::Energy,
        OgpModel::Clique => Objective::Clique,
        OgpModel::IndependentSet => Objective::IndependentSet,
        OgpModel::Ksat => Objective::SatisfiedClauses,
    }
}

/// The configured level, or a fraction of the exact optimum.
fn resolve_level(o: &OgpConfig, inst: &Instance) -> randopt::Result<f64> {
    if let Some(l) = o.level {
        return Ok(l);
    }
    Ok(match inst {
        Instance::Tensor(j) => o.level_fraction.unwrap_or(0.9) * brute_force_ground_state(j)?.1,
        Instance::Graph(g) => {
            let kind = match o.model {
                OgpModel::IndependentSet => SubsetKind::IndependentSet,
                _ => SubsetKind::Clique,
            };
            (o.level_fraction.unwrap_or(0.9) * exact_optimum_with_cap(g, kind, g.n().max(1))?.size() as f64).ceil()
        }
        Instance::KSat(f) => (o.level_fraction.unwrap_or(1.0) * f.m() as f64).ceil(),
    })
}

fn sampler(o: &OgpConfig) -> SamplerConfig {
    match o.sampler {
        SamplerChoice::Exhaustive => SamplerConfig::Exhaustive,
        SamplerChoice::Annealed => SamplerConfig::Annealed(o.anneal),
    }
}

#[derive(Serialize)]
struct PlantedRow {
    index: usize,
    planted_lo: Option<f64>,
    planted_hi: Option<f64>,
    noise_mass: f64,
    present: bool,
    nu1: Option<f64>,
    nu2: Option<f64>,
    mass_in_gap: f64,
    correct: bool,
}

#[derive(Serialize)]
struct HistogramRow {
    instance: usize,
    instance_hash: String,
    level: f64,
    solutions: usize,
    attempts: usize,
    budget_exhausted: bool,
    violations: usize,
    gap_present: Option<bool>,
    nu1: Option<f64>,
    nu2: Option<f64>,
    mass_in_gap: Option<f64>,
}

#[derive(Serialize)]
struct BinRow {
    lo: f64,
    hi: f64,
    mass: f64,
}

#[derive(Serialize)]
struct ClusterRow {
    instance: usize,
    instance_hash: String,
    level: f64,
    solutions: usize,
    violations: usize,
    components: usize,
    largest: usize,
    separation: Option<usize>,
    separation_fraction: Option<f64>,
    outlier_mass: f64,
}

#[derive(Serialize)]
struct InterpRow {
    instance: usize,
    tuple: usize,
    a: usize,
    b: usize,
    position_a: usize,
    position_b: usize,
    value: f64,
}

#[derive(Serialize)]
struct StabilityRow {
    instance: usize,
    instance_hash: String,
    steps: usize,
    recorded: usize,
    max_distance: usize,
    mean_distance: f64,
}

fn run_ogp(c: &ExperimentConfig, sink: &mut Sink) -> Result<()> {
    let o = c.ogp.as_ref().expect("validated");
    if o.probe == OgpProbe::Planted {
        let stream = RngStream::new(c.seed, "ogp/planted");
        let rep = planted_gap_suite(&o.planted, &stream).task(|| "planted suite".into())?;
        sink.task("planted", &stream);
        let rows: Vec<PlantedRow> = rep
            .cases
            .iter()
            .map(|k| PlantedRow {
                index: k.index,
                planted_lo: k.planted.map(|p| p.0),
                planted_hi: k.planted.map(|p| p.1),
                noise_mass: k.noise_mass,
                present: k.report.present,
                nu1: k.report.nu1,
                nu2: k.report.nu2,
                mass_in_gap: k.report.mass_in_gap,
                correct: k.correct,
            })
            .collect();
        sink.csv("planted.csv", &rows)?;
        return sink.json(
            "planted_summary.json",
            &serde_json::json!({
                "cases": rep.cases.len(),
                "correct": rep.correct,
                "accuracy": rep.accuracy,
                "config": rep.config,
            }),
        );
    }

    let model_name = serde_json::to_value(o.model).expect("serializes");
    let model_name = model_name.as_str().expect("unit variant");
    let mut hist_rows = Vec::new();
    let mut cluster_rows = Vec::new();
    let mut interp_rows = Vec::new();
    let mut stability_rows = Vec::new();
    for i in 0..o.instances {
        let task = format!("instance_{i}");
        let stream = RngStream::new(c.seed, format!("ogp/{model_name}/{i}"));
        let inst = ogp_instance(o, &stream.child("instance")).task(|| task.clone())?;
        sink.task(&task, &stream);
        sink.instance(&task, &inst);
        let hash = inst.content_hash();
        match o.probe {
            OgpProbe::Planted => unreachable!("handled above"),
            OgpProbe::Histogram | OgpProbe::Cluster => {
                let level = resolve_level(o, &inst).task(|| task.clone())?;
                let model = Model::new(inst, objective(o)).task(|| task.clone())?;
                let set = sample_near_optima(&model, level, o.count, sampler(o), &stream.child("sampler"))
                    .task(|| task.clone())?;
                let violations = set.violations(&model).task(|| task.clone())?;
                if o.probe == OgpProbe::Histogram {
                    let metric = o.metric.unwrap_or_else(|| model.default_metric());
                    let mut row = HistogramRow {
                        instance: i,
                        instance_hash: hash,
                        level,
                        solutions: set.len(),
                        attempts: set.attempts,
                        budget_exhausted: set.budget_exhausted,
                        violations,
                        gap_present: None,
                        nu1: None,
                        nu2: None,
                        mass_in_gap: None,
                    };
                    if set.len() >= 2 {
                        let hist = overlap_histogram(&set, metric, o.bins).task(|| task.clone())?;
                        let gap = detect_gap(&hist, o.min_width, o.mass_ceiling);
                        row.gap_present = Some(gap.present);
                        row.nu1 = gap.nu1;
                        row.nu2 = gap.nu2;
                        row.mass_in_gap = Some(gap.mass_in_gap);
                        let bins: Vec<BinRow> = hist
                            .masses
                            .iter()
                            .zip(hist.edges.windows(2))
                            .map(|(&mass, e)| BinRow { lo: e[0], hi: e[1], mass })
                            .collect();
                        sink.csv(&format!("histograms/{task}.csv"), &bins)?;
                    }
                    hist_rows.push(row);
                } else {
                    let rep = cluster_solutions_with_floor(&set.solutions, o.radius, o.size_floor)
                        .task(|| task.clone())?;
                    let sizes: Vec<BinRowSize> = rep
                        .components
                        .iter()
                        .enumerate()
                        .map(|(component, &size)| BinRowSize { component, size })
                        .collect();
                    sink.csv(&format!("clusters/{task}.csv"), &sizes)?;
                    cluster_rows.push(ClusterRow {
                        instance: i,
                        instance_hash: hash,
                        level,
                        solutions: set.len(),
                        violations,
                        components: rep.components.len(),
                        largest: rep.components.iter().copied().max().unwrap_or(0),
                        separation: rep.separation,
                        separation_fraction: rep.separation_fraction(),
                        outlier_mass: rep.outlier_mass,
                    });
                }
            }
            OgpProbe::Interpolation => {
                let path = make_interpolation_path(inst, &stream.child("path"));
                let t = path.len();
                let positions: Vec<usize> = o.positions.iter().map(|f| (f * t as f64).round() as usize).collect();
                // a relative level must be reachable at every position
                let mut level = f64::INFINITY;
                for inst in path.instances_at(&positions).task(|| task.clone())? {
                    level = level.min(resolve_level(o, &inst).task(|| task.clone())?);
                }
                let cfg = InterpConfig {
                    positions: positions.clone(),
                    tuples: o.tuples,
                    level,
                    objective: objective(o),
                    sampler: sampler(o),
                    metric: o.metric,
                    shared_seed: o.shared_seed,
                };
                let rep = interpolation_overlap_experiment(&path, &cfg, &stream.child("samples"))
                    .task(|| task.clone())?;
                for s in &rep.samples {
                    for a in 0..s.m {
                        for b in a + 1..s.m {
                            interp_rows.push(InterpRow {
                                instance: i,
                                tuple: s.tuple,
                                a,
                                b,
                                position_a: positions[a],
                                position_b: positions[b],
                                value: s.matrix[a][b],
                            });
                        }
                    }
                }
                sink.json(&format!("interpolation/{task}.json"), &rep)?;
            }
            OgpProbe::Stability => {
                let path = make_interpolation_path(inst, &stream.child("path"));
                let prof = karp_stability_profile(&path, o.stride, &stream.child("karp")).task(|| task.clone())?;
                sink.bytes(&format!("stability/{task}.csv"), prof.to_csv().into_bytes());
                stability_rows.push(StabilityRow {
                    instance: i,
                    instance_hash: hash,
                    steps: path.len(),
                    recorded: prof.positions.len(),
                    max_distance: prof.max_distance,
                    mean_distance: prof.mean_distance,
                });
            }
        }
    }
    match o.probe {
        OgpProbe::Histogram => sink.csv("ogp_histograms.csv", &hist_rows),
        OgpProbe::Cluster => sink.csv("ogp_clusters.csv", &cluster_rows),
        OgpProbe::Interpolation => sink.csv("ogp_interpolation.csv", &interp_rows),
        OgpProbe::Stability => sink.csv("ogp_stability.csv", &stability_rows),
        OgpProbe::Planted => unreachable!("handled above"),
    }
}

#[derive(Serialize)]
struct BinRowSize {
    component: usize,
    size: usize,
}
