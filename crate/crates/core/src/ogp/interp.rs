use super::{sample_near_optima, Metric, Model, Objective, SamplerConfig, SamplerKind};
use crate::bits::BitConfig;
use crate::error::{Error, Result};
use crate::graphopt::karp_greedy_clique;
use crate::instances::{Instance, InterpolationPath};
use crate::rng::RngStream;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpConfig {
    /// Path positions `ℓ_1 <= … <= ℓ_M`.
    pub positions: Vec<usize>,
    /// Number of independent `M`-tuples.
    pub tuples: usize,
    pub level: f64,
    pub objective: Objective,
    pub sampler: SamplerConfig,
    /// Defaults to the model's natural metric.
    pub metric: Option<Metric>,
    /// Use one random stream for every position of a tuple, so a
    /// deterministic sampler sees identical randomness along the path.
    pub shared_seed: bool,
}

/// Pairwise metric values of one `M`-tuple of near-optima.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiOverlapSample {
    pub tuple: usize,
    pub m: usize,
    pub positions: Vec<usize>,
    pub matrix: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub tuple: usize,
    pub position: usize,
    pub message: String,
}

/// Metric between the samples at `t = 0` and `t = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointSummary {
    pub values: Vec<f64>,
    pub mean: f64,
    pub sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub metric: Metric,
    pub positions: Vec<usize>,
    pub path_len: usize,
    pub instance_hashes: Vec<String>,
    pub samples: Vec<MultiOverlapSample>,
    pub failures: Vec<SampleFailure>,
    /// Entrywise mean of the matrices over complete tuples.
    pub mean_matrix: Vec<Vec<f64>>,
    /// Present when the positions are exactly `(0, T)`.
    pub endpoint: Option<EndpointSummary>,
}

fn draw_one(model: &Model, config: &InterpConfig, rng: &RngStream) -> Result<Option<BitConfig>> {
    let set = sample_near_optima(model, config.level, 1, config.sampler, rng)?;
    Ok(match set.sampler {
        SamplerKind::Exhaustive if !set.is_empty() => {
            let i = rng.child("pick").rng().random_range(0..set.len());
            Some(set.solutions[i].clone())
        }
        _ => set.solutions.into_iter().next(),
    })
}

/// Samples one near-optimum at each path position for each tuple and
/// records the pairwise metric matrix. A failed draw is reported and its
/// tuple left out of the matrices.
pub fn interpolation_overlap_experiment(
    path: &InterpolationPath,
    config: &InterpConfig,
    rng: &RngStream,
) -> Result<InterpolationReport> {
    let m = config.positions.len();
    if m < 2 {
        return Err(Error::param("need at least two path positions"));
    }
    if config.tuples == 0 {
        return Err(Error::param("need at least one tuple"));
    }
    let models = path
        .instances_at(&config.positions)?
        .into_iter()
        .map(|inst| Model::new(inst, config.objective))
        .collect::<Result<Vec<_>>>()?;
    let metric = config.metric.unwrap_or_else(|| models[0].default_metric());
    let per_tuple = (0..config.tuples)
        .into_par_iter()
        .map(|t| -> Result<(Vec<Option<BitConfig>>, Vec<SampleFailure>)> {
            let mut picks = Vec::with_capacity(m);
            let mut failures = Vec::new();
            for (i, model) in models.iter().enumerate() {
                let stream = if config.shared_seed {
                    rng.child(format!("tuple{t}"))
                } else {
                    rng.child(format!("tuple{t}/pos{i}"))
                };
                let pick = draw_one(model, config, &stream)?;
                if pick.is_none() {
                    failures.push(SampleFailure {
                        tuple: t,
                        position: config.positions[i],
                        message: format!("no configuration reached level {}", config.level),
                    });
                }
                picks.push(pick);
            }
            Ok((picks, failures))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut samples = Vec::new();
    let mut failures = Vec::new();
    for (t, (picks, fails)) in per_tuple.into_iter().enumerate() {
        failures.extend(fails);
        let Some(picks) = picks.into_iter().collect::<Option<Vec<_>>>() else {
            continue;
        };
        let matrix = (0..m)
            .map(|a| {
                (0..m)
                    .map(|b| if a == b { metric.self_value() } else { metric.eval(&picks[a], &picks[b]) })
                    .collect()
            })
            .collect();
        samples.push(MultiOverlapSample {
            tuple: t,
            m,
            positions: config.positions.clone(),
            matrix,
        });
    }
    let mut mean_matrix = vec![vec![0.0; m]; m];
    if !samples.is_empty() {
        for s in &samples {
            for (row, srow) in mean_matrix.iter_mut().zip(&s.matrix) {
                for (x, y) in row.iter_mut().zip(srow) {
                    *x += y;
                }
            }
        }
        let k = samples.len() as f64;
        mean_matrix.iter_mut().flatten().for_each(|x| *x /= k);
    }
    let endpoint = (config.positions == [0, path.len()] && !samples.is_empty()).then(|| {
        let values: Vec<f64> = samples.iter().map(|s| s.matrix[0][1]).collect();
        let k = values.len() as f64;
        let mean = values.iter().sum::<f64>() / k;
        let sd = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
        } else {
            0.0
        };
        EndpointSummary { values, mean, sd }
    });
    Ok(InterpolationReport {
        metric,
        positions: config.positions.clone(),
        path_len: path.len(),
        instance_hashes: models.iter().map(|m| m.instance().content_hash()).collect(),
        samples,
        failures,
        mean_matrix,
        endpoint,
    })
}

/// Karp's greedy clique run with one fixed scan order along a graph path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityProfile {
    pub positions: Vec<usize>,
    pub sizes: Vec<usize>,
    /// Hamming distance between outputs at consecutive recorded positions.
    pub distances: Vec<usize>,
    pub max_distance: usize,
    pub mean_distance: f64,
}

impl StabilityProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("position,size,distance_from_previous\n");
        for (i, (p, k)) in self.positions.iter().zip(&self.sizes).enumerate() {
            let d = if i == 0 { String::new() } else { self.distances[i - 1].to_string() };
            s.push_str(&format!("{p},{k},{d}\n"));
        }
        s
    }
}

/// Records the greedy output every `stride` steps (and at `T`).
pub fn karp_stability_profile(path: &InterpolationPath, stride: usize, rng: &RngStream) -> Result<StabilityProfile> {
    if stride == 0 {
        return Err(Error::param("stride must be >= 1"));
    }
    let Instance::Graph(_) = path.base() else {
        return Err(Error::param("stability profile needs a graph path"));
    };
    let mut inst = path.base().clone();
    let run = |inst: &Instance| {
        let g = inst.as_graph().expect("graph path");
        BitConfig::from_members(g.n(), karp_greedy_clique(g, rng).members())
    };
    let mut positions = vec![0];
    let mut outs = vec![run(&inst)];
    for step in 1..=path.len() {
        path.apply_step(&mut inst, step);
        if step % stride == 0 || step == path.len() {
            positions.push(step);
            outs.push(run(&inst));
        }
    }
    let distances: Vec<usize> = outs.windows(2).map(|w| w[0].hamming(&w[1])).collect();
    Ok(StabilityProfile {
        sizes: outs.iter().map(BitConfig::count_ones).collect(),
        max_distance: distances.iter().copied().max().unwrap_or(0),
        mean_distance: if distances.is_empty() {
            0.0
        } else {
            distances.iter().sum::<usize>() as f64 / distances.len() as f64
        },
        positions,
        distances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{gen_er_graph, gen_gaussian_tensor, make_interpolation_path};
    use crate::ogp::AnnealConfig;

    fn clique_config(positions: Vec<usize>, tuples: usize, level: f64) -> InterpConfig {
        InterpConfig {
            positions,
            tuples,
            level,
            objective: Objective::Clique,
            sampler: SamplerConfig::Annealed(AnnealConfig::default()),
            metric: None,
            shared_seed: true,
        }
    }

    #[test]
    fn same_position_shared_seed_gives_unit_overlap() {
        let g = gen_er_graph(60, 0.5, &RngStream::new(1, "g")).unwrap();
        let path = make_interpolation_path(Instance::Graph(g), &RngStream::new(1, "p"));
        let rep = interpolation_overlap_experiment(&path, &clique_config(vec![0, 0], 5, 3.0), &RngStream::new(2, "x")).unwrap();
        assert_eq!(rep.samples.len(), 5);
        for s in &rep.samples {
            assert_eq!(s.matrix, vec![vec![1.0, 1.0], vec![1.0, 1.0]]);
        }
        assert!(rep.endpoint.is_none());
    }

    #[test]
    fn matrices_are_symmetric_with_unit_diagonal() {
        let j = gen_gaussian_tensor(16, 2, &RngStream::new(3, "t")).unwrap();
        let path = make_interpolation_path(Instance::Tensor(j), &RngStream::new(3, "p"));
        let t = path.len();
        let cfg = InterpConfig {
            positions: vec![0, t / 4, t / 2, t],
            tuples: 4,
            level: 0.3,
            objective: Objective::Energy,
            sampler: SamplerConfig::Exhaustive,
            metric: None,
            shared_seed: false,
        };
        let rep = interpolation_overlap_experiment(&path, &cfg, &RngStream::new(0, "x")).unwrap();
        assert_eq!(rep.instance_hashes.len(), 4);
        for s in &rep.samples {
            for a in 0..4 {
                assert_eq!(s.matrix[a][a], 1.0);
                for b in 0..4 {
                    assert_eq!(s.matrix[a][b], s.matrix[b][a]);
                    assert!((-1.0..=1.0).contains(&s.matrix[a][b]));
                }
            }
        }
        assert_eq!(rep.samples.len(), 4);
        assert!(rep.failures.is_empty());
    }

    #[test]
    fn failures_are_reported() {
        let g = gen_er_graph(40, 0.5, &RngStream::new(1, "g")).unwrap();
        let path = make_interpolation_path(Instance::Graph(g), &RngStream::new(1, "p"));
        let mut cfg = clique_config(vec![0, path.len()], 3, 30.0);
        cfg.sampler = SamplerConfig::Annealed(AnnealConfig {
            max_attempts: 2,
            ..AnnealConfig::default()
        });
        let rep = interpolation_overlap_experiment(&path, &cfg, &RngStream::new(0, "x")).unwrap();
        assert!(rep.samples.is_empty());
        assert_eq!(rep.failures.len(), 6);
        assert!(rep.endpoint.is_none());
    }

    #[test]
    fn stability_profile_endpoints() {
        let g = gen_er_graph(30, 0.5, &RngStream::new(5, "g")).unwrap();
        let path = make_interpolation_path(Instance::Graph(g.clone()), &RngStream::new(5, "p"));
        let rng = RngStream::new(5, "karp");
        let prof = karp_stability_profile(&path, 1, &rng).unwrap();
        assert_eq!(prof.positions.len(), path.len() + 1);
        assert_eq!(prof.sizes[0], karp_greedy_clique(&g, &rng).size());
        // one edge changes per step, so consecutive outputs usually agree
        assert!(prof.mean_distance < 1.0);
        let coarse = karp_stability_profile(&path, 100, &rng).unwrap();
        assert_eq!(*coarse.positions.last().unwrap(), path.len());
        assert_eq!(coarse.sizes.last(), prof.sizes.last());
        assert!(coarse.to_csv().lines().count() == coarse.positions.len() + 1);
    }
}
