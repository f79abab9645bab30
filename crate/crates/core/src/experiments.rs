//! Seeded random instances and the loop-count convergence study.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::SANDWICH_SLACK;
use crate::error::{ExperimentError, OptimizeError};
use crate::matrix::Matrix;
use crate::optimize::{optimize, Objective, OptimizeOptions};
use crate::oracle::{oracle_extremes, OracleOptions, DEFAULT_LIMIT_N};

/// Loop count the published runs never exceeded; a soft expectation only.
pub const EXPECTED_MAX_LOOPS: usize = 3;

pub const CSV_HEADER: [&str; 8] = [
    "dim",
    "instance",
    "direction",
    "loops",
    "rho",
    "mean_row_sum",
    "runtime_seconds",
    "seed",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryDistribution {
    /// Integers drawn uniformly from `lo..=hi`.
    UniformInt { lo: u32, hi: u32 },
    /// Reals drawn uniformly from `[lo, hi)`.
    UniformReal { lo: f64, hi: f64 },
}

impl Default for EntryDistribution {
    fn default() -> Self {
        EntryDistribution::UniformInt { lo: 1, hi: 9 }
    }
}

impl EntryDistribution {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        match *self {
            EntryDistribution::UniformInt { lo, hi } if lo > hi => Err(ExperimentError::Config(
                format!("uniform_int bounds reversed: {lo} > {hi}"),
            )),
            EntryDistribution::UniformReal { lo, hi }
                if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) =>
            {
                Err(ExperimentError::Config(format!(
                    "uniform_real needs finite 0 <= lo < hi, got ({lo}, {hi})"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Whether every draw is strictly positive.
    pub fn strictly_positive(&self) -> bool {
        match *self {
            EntryDistribution::UniformInt { lo, .. } => lo > 0,
            EntryDistribution::UniformReal { lo, .. } => lo > 0.0,
        }
    }
}

impl fmt::Display for EntryDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntryDistribution::UniformInt { lo, hi } => write!(f, "uniform_int({lo},{hi})"),
            EntryDistribution::UniformReal { lo, hi } => write!(f, "uniform_real({lo},{hi})"),
        }
    }
}

impl FromStr for EntryDistribution {
    type Err = String;

    /// Parses `uniform_int(lo,hi)` or `uniform_real(lo,hi)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| format!("expected name(lo,hi), got {s:?}"))?;
        let args = rest
            .strip_suffix(')')
            .ok_or_else(|| format!("missing ')' in {s:?}"))?;
        let (lo, hi) = args
            .split_once(',')
            .ok_or_else(|| format!("expected two bounds in {s:?}"))?;
        let dist = match name.trim() {
            "uniform_int" => EntryDistribution::UniformInt {
                lo: lo
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad lower bound: {e}"))?,
                hi: hi
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad upper bound: {e}"))?,
            },
            "uniform_real" => EntryDistribution::UniformReal {
                lo: lo
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad lower bound: {e}"))?,
                hi: hi
                    .trim()
                    .parse()
                    .map_err(|e| format!("bad upper bound: {e}"))?,
            },
            other => return Err(format!("unknown distribution {other:?}")),
        };
        dist.validate().map_err(|e| e.to_string())?;
        Ok(dist)
    }
}

/// Generator for one `(seed, dim, instance)` triple.
///
/// ChaCha is counter based: the stream id selects an independent substream,
/// so instances can be generated in any order or in parallel.
pub fn instance_rng(seed: u64, dim: usize, instance: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((dim as u64) << 32) | instance as u64);
    rng
}

pub fn random_matrix<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
    dist: &EntryDistribution,
) -> Result<Matrix, ExperimentError> {
    if n == 0 {
        return Err(ExperimentError::Config(
            "dimension must be at least 1".into(),
        ));
    }
    dist.validate()?;
    let data: Vec<f64> = match *dist {
        EntryDistribution::UniformInt { lo, hi } => {
            (0..n * n).map(|_| rng.gen_range(lo..=hi) as f64).collect()
        }
        EntryDistribution::UniformReal { lo, hi } => {
            (0..n * n).map(|_| rng.gen_range(lo..hi)).collect()
        }
    };
    Ok(Matrix::from_vec(n, data).expect("draws are finite and nonnegative"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Directions {
    Max,
    Min,
    Both,
}

impl Directions {
    pub fn objectives(self) -> &'static [Objective] {
        match self {
            Directions::Max => &[Objective::Max],
            Directions::Min => &[Objective::Min],
            Directions::Both => &[Objective::Max, Objective::Min],
        }
    }
}

impl FromStr for Directions {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "max" => Ok(Directions::Max),
            "min" => Ok(Directions::Min),
            "both" => Ok(Directions::Both),
            other => Err(format!(
                "unknown direction {other:?} (expected max, min or both)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dims: Vec<usize>,
    pub instances_per_dim: usize,
    pub seed: u64,
    pub distribution: EntryDistribution,
    pub directions: Directions,
    pub optimize: OptimizeOptions,
    /// Cross-check each run against exhaustive enumeration when `dim <= limit_n`.
    pub oracle_check: bool,
    pub limit_n: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dims: (5..=200).step_by(5).collect(),
            instances_per_dim: 50,
            seed: 0,
            distribution: EntryDistribution::default(),
            directions: Directions::Both,
            optimize: OptimizeOptions::default(),
            oracle_check: false,
            limit_n: DEFAULT_LIMIT_N,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.dims.is_empty() {
            return Err(ExperimentError::Config("no dimensions given".into()));
        }
        if let Some(d) = self.dims.iter().find(|&&d| d < 2) {
            return Err(ExperimentError::Config(format!("dimension {d} is below 2")));
        }
        if self.instances_per_dim == 0 {
            return Err(ExperimentError::Config(
                "instances per dimension must be positive".into(),
            ));
        }
        self.distribution.validate()?;
        if let EntryDistribution::UniformInt { lo: 0, .. } = self.distribution {
            if !self.optimize.unsafe_accept {
                return Err(ExperimentError::Config(
                    "uniform_int with lo = 0 yields zero entries; the optimizers need lo > 0"
                        .into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub dim: usize,
    pub instance: usize,
    pub direction: Objective,
    /// `None` when the solver failed outright.
    pub loops: Option<usize>,
    pub rho: Option<f64>,
    pub mean_row_sum: f64,
    pub runtime_seconds: f64,
    /// Solver failure or loop-limit note.
    pub error: Option<String>,
    /// Agreement with the exhaustive oracle, when checked.
    pub oracle_match: Option<bool>,
    /// Whether `rho` lies on the correct side of the mean row sum.
    pub sandwich_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimStats {
    pub dim: usize,
    pub mean_loops: f64,
    pub max_loops_observed: usize,
    pub mean_runtime: f64,
    pub instance_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoopStats {
    pub per_dim: Vec<DimStats>,
    pub max_loops_observed: usize,
    pub records: Vec<InstanceRecord>,
    pub seed: u64,
}

impl LoopStats {
    /// Observation worth reporting: some run needed more loops than expected.
    pub fn exceeds_expectation(&self) -> bool {
        self.max_loops_observed > EXPECTED_MAX_LOOPS
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceRecord> {
        self.records.iter().filter(|r| r.error.is_some())
    }

    pub fn oracle_summary(&self) -> Option<(usize, usize)> {
        let checked: Vec<bool> = self.records.iter().filter_map(|r| r.oracle_match).collect();
        (!checked.is_empty()).then(|| (checked.iter().filter(|&&m| m).count(), checked.len()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), ExperimentError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.records {
            w.write_record([
                r.dim.to_string(),
                r.instance.to_string(),
                r.direction.to_string(),
                r.loops.map(|l| l.to_string()).unwrap_or_default(),
                r.rho.map(|v| format!("{v:?}")).unwrap_or_default(),
                format!("{:?}", r.mean_row_sum),
                format!("{:?}", r.runtime_seconds),
                self.seed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn run_convergence_experiment(cfg: &ExperimentConfig) -> Result<LoopStats, ExperimentError> {
    run_convergence_experiment_with(cfg, |dim, instance| {
        let mut rng = instance_rng(cfg.seed, dim, instance);
        random_matrix(dim, &mut rng, &cfg.distribution)
    })
}

/// Same sweep with a caller-supplied instance generator.
pub fn run_convergence_experiment_with<G>(
    cfg: &ExperimentConfig,
    generate: G,
) -> Result<LoopStats, ExperimentError>
where
    G: Fn(usize, usize) -> Result<Matrix, ExperimentError> + Sync,
{
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = cfg
        .dims
        .iter()
        .flat_map(|&d| (0..cfg.instances_per_dim).map(move |i| (d, i)))
        .collect();
    let per_job: Vec<Vec<InstanceRecord>> = jobs
        .par_iter()
        .map(|&(dim, instance)| {
            let a = generate(dim, instance)?;
            Ok(run_instance(cfg, dim, instance, &a))
        })
        .collect::<Result<_, ExperimentError>>()?;
    let records: Vec<InstanceRecord> = per_job.into_iter().flatten().collect();

    let per_dim = cfg
        .dims
        .iter()
        .map(|&dim| {
            let rows: Vec<&InstanceRecord> = records.iter().filter(|r| r.dim == dim).collect();
            let loops: Vec<usize> = rows.iter().filter_map(|r| r.loops).collect();
            DimStats {
                dim,
                mean_loops: loops.iter().sum::<usize>() as f64 / loops.len().max(1) as f64,
                max_loops_observed: loops.iter().copied().max().unwrap_or(0),
                mean_runtime: rows.iter().map(|r| r.runtime_seconds).sum::<f64>()
                    / rows.len().max(1) as f64,
                instance_count: cfg.instances_per_dim,
            }
        })
        .collect::<Vec<_>>();
    Ok(LoopStats {
        max_loops_observed: per_dim
            .iter()
            .map(|d| d.max_loops_observed)
            .max()
            .unwrap_or(0),
        per_dim,
        records,
        seed: cfg.seed,
    })
}

fn run_instance(
    cfg: &ExperimentConfig,
    dim: usize,
    instance: usize,
    a: &Matrix,
) -> Vec<InstanceRecord> {
    let mean = a.mean_row_sum();
    let oracle = (cfg.oracle_check && dim <= cfg.limit_n).then(|| {
        oracle_extremes(
            a,
            &OracleOptions {
                perron: cfg.optimize.perron,
                limit_n: cfg.limit_n,
            },
        )
    });
    cfg.directions
        .objectives()
        .iter()
        .map(|&objective| {
            let start = Instant::now();
            let outcome = optimize(a, objective, &cfg.optimize);
            let runtime_seconds = start.elapsed().as_secs_f64();
            let (loops, rho, error) = match outcome {
                Ok(r) => (Some(r.trace.loop_count), Some(r.rho), None),
                Err(OptimizeError::LoopLimitExceeded { best, .. }) => (
                    Some(best.trace.loop_count),
                    Some(best.rho),
                    Some("loop limit reached".to_string()),
                ),
                Err(e) => (None, None, Some(e.to_string())),
            };
            let sandwich_ok = rho.is_some_and(|rho| match objective {
                Objective::Max => mean <= rho + SANDWICH_SLACK,
                Objective::Min => rho - SANDWICH_SLACK <= mean,
            });
            let oracle_match = match (&oracle, rho) {
                (Some(Ok(rep)), Some(rho)) => Some(match objective {
                    Objective::Max => (rho - rep.max_rho).abs() <= 1e-9,
                    Objective::Min => (rho - rep.min_rho).abs() <= 1e-9,
                }),
                (Some(_), _) => Some(false),
                (None, _) => None,
            };
            InstanceRecord {
                dim,
                instance,
                direction: objective,
                loops,
                rho,
                mean_row_sum: mean,
                runtime_seconds,
                error,
                oracle_match,
                sandwich_ok,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_deterministic() {
        let d = EntryDistribution::default();
        let a = random_matrix(6, &mut instance_rng(7, 6, 3), &d).unwrap();
        let b = random_matrix(6, &mut instance_rng(7, 6, 3), &d).unwrap();
        let c = random_matrix(6, &mut instance_rng(7, 6, 4), &d).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a
            .as_slice()
            .iter()
            .all(|&v| (1.0..=9.0).contains(&v) && v.fract() == 0.0));
    }

    #[test]
    fn real_distribution_positivity_flag() {
        let d: EntryDistribution = "uniform_real(0,1)".parse().unwrap();
        assert!(!d.strictly_positive());
        let m = random_matrix(5, &mut instance_rng(1, 5, 0), &d).unwrap();
        assert!(m.as_slice().iter().all(|&v| (0.0..1.0).contains(&v)));
        let d: EntryDistribution = "uniform_int(1, 9)".parse().unwrap();
        assert!(d.strictly_positive());
        assert!("uniform_int(9,1)".parse::<EntryDistribution>().is_err());
        assert!("uniform_real(-1,1)".parse::<EntryDistribution>().is_err());
        assert!("gauss(0,1)".parse::<EntryDistribution>().is_err());
        assert_eq!(d.to_string(), "uniform_int(1,9)");
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig {
            dims: vec![],
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        cfg.dims = vec![1];
        assert!(cfg.validate().is_err());
        cfg.dims = vec![3];
        cfg.distribution = EntryDistribution::UniformInt { lo: 0, hi: 3 };
        assert!(cfg.validate().is_err());
        cfg.distribution = EntryDistribution::default();
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn fixture_hook_constant_rows() {
        let cfg = ExperimentConfig {
            dims: vec![2],
            instances_per_dim: 1,
            ..Default::default()
        };
        let stats = run_convergence_experiment_with(&cfg, |_, _| {
            Ok(Matrix::from_rows(vec![vec![3., 3.], vec![5., 5.]]).unwrap())
        })
        .unwrap();
        assert!(stats.records.iter().all(|r| r.loops == Some(1)));
        assert_eq!(stats.max_loops_observed, 1);
    }

    #[test]
    fn csv_layout() {
        let cfg = ExperimentConfig {
            dims: vec![3],
            instances_per_dim: 2,
            seed: 11,
            ..Default::default()
        };
        let stats = run_convergence_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        stats.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "dim,instance,direction,loops,rho,mean_row_sum,runtime_seconds,seed"
        );
        assert_eq!(lines.count(), 4);
        assert!(text.contains("\n3,1,min,"));
    }
}
