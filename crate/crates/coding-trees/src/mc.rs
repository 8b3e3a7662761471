//! Parallel Monte Carlo driver with deterministic seeding.
//!
//! Sample `i` of evaluation point `p` always draws from the ChaCha stream
//! keyed by `(seed, p, i)`, so estimates do not depend on thread count or
//! scheduling. Samples are processed in fixed chunks of 1024; chunk
//! statistics are merged pairwise in index order (a balanced binary
//! reduction), which pins the floating-point reassociation as well — the
//! reported mean and second moment are bit-identical for any `threads`.
//!
//! Failed samples (exhausted budgets, non-finite terminal values) abort the
//! run with a diagnostic by default, since silently dropping them would bias
//! the estimator; opt out with `strict_failures = false` to count and
//! exclude them instead.

use rayon::prelude::*;

use crate::codes::Code;
use crate::fdb::FdbError;
use crate::rng::sample_rng;
use crate::tree::{sample_h, ProblemSpec, SampleOutcome};

/// Samples per work unit; fixed so the merge tree does not depend on the
/// thread count.
const CHUNK: u64 = 1024;

/// Streaming count/mean/variance/min/max with failure counters.
/// Merging is exact parallel combination (Chan's update); the empty
/// statistic is the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunStatistics {
    pub count: u64,
    pub failed: u64,
    pub total_nodes: u64,
    mean: f64,
    m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for RunStatistics {
    fn default() -> Self {
        Self::empty()
    }
}

impl RunStatistics {
    pub fn empty() -> Self {
        RunStatistics {
            count: 0,
            failed: 0,
            total_nodes: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
        self.min = self.min.min(value);
        self.max = self.max.max(value);
    }

    pub fn push_outcome(&mut self, outcome: &SampleOutcome) {
        self.total_nodes += outcome.nodes;
        if outcome.is_failed() {
            self.failed += 1;
        } else {
            self.push(outcome.value);
        }
    }

    pub fn merge(&self, other: &RunStatistics) -> RunStatistics {
        if self.count == 0 {
            let mut out = *other;
            out.failed += self.failed;
            out.total_nodes += self.total_nodes;
            return out;
        }
        if other.count == 0 {
            let mut out = *self;
            out.failed += other.failed;
            out.total_nodes += other.total_nodes;
            return out;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * (other.count as f64 / count as f64);
        let m2 = self.m2
            + other.m2
            + delta * delta * (self.count as f64 * other.count as f64 / count as f64);
        RunStatistics {
            count,
            failed: self.failed + other.failed,
            total_nodes: self.total_nodes + other.total_nodes,
            mean,
            m2,
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }

    /// Raw second central moment accumulator, exposed for bit-invariance
    /// checks.
    pub fn m2_raw(&self) -> f64 {
        self.m2
    }
}

/// First failed sample of a run, in deterministic (point, sample) order.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureDiagnostic {
    pub point: usize,
    pub sample: u64,
    pub value: f64,
    pub budget_exceeded: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RunError {
    #[error(
        "sample {sample} of point {point} failed ({cause}: value {value}, {nodes} nodes); \
         rerun with strict_failures = false to count and skip such samples",
        cause = if .0.budget_exceeded { "budget exhausted" } else { "non-finite value" },
        sample = .0.sample, point = .0.point, value = .0.value, nodes = .0.nodes
    )]
    SampleFailed(FailureDiagnostic),
    #[error(transparent)]
    Fdb(#[from] FdbError),
}

/// Runs `samples` evaluations of `sampler(point, sample_index)` for each of
/// `points` points on a rayon pool with `threads` workers (0 = default),
/// with the deterministic chunking and merge order described above.
pub fn run_samples<F>(
    points: usize,
    samples: u64,
    threads: usize,
    strict: bool,
    sampler: F,
) -> Result<Vec<RunStatistics>, RunError>
where
    F: Fn(usize, u64) -> SampleOutcome + Sync,
{
    let body = || -> Result<Vec<RunStatistics>, RunError> {
        let mut out = Vec::with_capacity(points);
        for point in 0..points {
            let chunks = samples.div_ceil(CHUNK);
            let partial: Vec<(RunStatistics, Option<FailureDiagnostic>)> = (0..chunks)
                .into_par_iter()
                .map(|chunk| {
                    let lo = chunk * CHUNK;
                    let hi = ((chunk + 1) * CHUNK).min(samples);
                    let mut stats = RunStatistics::empty();
                    let mut first_failure = None;
                    for i in lo..hi {
                        let outcome = sampler(point, i);
                        if outcome.is_failed() && first_failure.is_none() {
                            first_failure = Some(FailureDiagnostic {
                                point,
                                sample: i,
                                value: outcome.value,
                                budget_exceeded: outcome.budget_exceeded,
                                nodes: outcome.nodes,
                            });
                        }
                        stats.push_outcome(&outcome);
                    }
                    (stats, first_failure)
                })
                .collect();
            if strict {
                if let Some(diag) = partial.iter().find_map(|(_, f)| f.clone()) {
                    return Err(RunError::SampleFailed(diag));
                }
            }
            let stats: Vec<RunStatistics> = partial.into_iter().map(|(s, _)| s).collect();
            out.push(reduce_pairwise(stats));
        }
        Ok(out)
    };

    if threads == 0 {
        body()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to build thread pool");
        pool.install(body)
    }
}

/// Balanced binary reduction in index order; the merge tree is a function of
/// the chunk count only.
fn reduce_pairwise(mut stats: Vec<RunStatistics>) -> RunStatistics {
    if stats.is_empty() {
        return RunStatistics::empty();
    }
    while stats.len() > 1 {
        stats = stats
            .chunks(2)
            .map(|pair| {
                if pair.len() == 2 {
                    pair[0].merge(&pair[1])
                } else {
                    pair[0]
                }
            })
            .collect();
    }
    stats[0]
}

/// A full estimation request for the 1-D engine.
#[derive(Debug)]
pub struct RunConfig {
    pub spec: ProblemSpec,
    /// Code on the first branch; `Identity` estimates the solution itself.
    pub code: Code,
    /// Points `(t, x)` to evaluate at.
    pub eval_points: Vec<(f64, f64)>,
    pub samples: u64,
    pub seed: u64,
    /// Worker threads; 0 uses the rayon default.
    pub threads: usize,
    /// Independent repetitions for error tables.
    pub runs: u32,
    pub strict_failures: bool,
}

impl RunConfig {
    pub fn new(spec: ProblemSpec, eval_points: Vec<(f64, f64)>, samples: u64, seed: u64) -> Self {
        RunConfig {
            spec,
            code: Code::Identity,
            eval_points,
            samples,
            seed,
            threads: 0,
            runs: 5,
            strict_failures: true,
        }
    }
}

/// One estimate per evaluation point.
pub fn run_estimate(config: &RunConfig) -> Result<Vec<RunStatistics>, RunError> {
    run_repetition(config, 0)
}

/// Repetition `rep` draws the sample index range
/// `[rep * samples, (rep+1) * samples)` of each point stream, so repetitions
/// are independent and individually reproducible.
pub fn run_repetition(config: &RunConfig, rep: u32) -> Result<Vec<RunStatistics>, RunError> {
    let spec = &config.spec;
    let code = &config.code;
    let offset = rep as u64 * config.samples;
    run_samples(
        config.eval_points.len(),
        config.samples,
        config.threads,
        config.strict_failures,
        |point, i| {
            let (t, x) = config.eval_points[point];
            let mut rng = sample_rng(config.seed, point as u32, offset + i);
            sample_h(spec, t, x, code, &mut rng)
        },
    )
}

/// Relative-error summary across independent repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// Mean of the per-run estimates.
    pub mean: f64,
    /// Sample standard deviation of the per-run estimates.
    pub sd: f64,
    pub mean_rel_l1: f64,
    pub sd_rel_l1: f64,
    /// True when `exact == 0` forced absolute instead of relative errors.
    pub absolute: bool,
}

/// Summarizes per-repetition estimates against a reference value.
pub fn error_report(estimates: &[f64], exact: f64) -> ErrorReport {
    assert!(!estimates.is_empty());
    let n = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / n;
    let sd = if estimates.len() < 2 {
        0.0
    } else {
        (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    let absolute = exact == 0.0;
    let scale = if absolute { 1.0 } else { exact.abs() };
    let errs: Vec<f64> = estimates.iter().map(|e| (e - exact).abs() / scale).collect();
    let mean_rel_l1 = errs.iter().sum::<f64>() / n;
    let sd_rel_l1 = if errs.len() < 2 {
        0.0
    } else {
        (errs.iter().map(|e| (e - mean_rel_l1).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    ErrorReport {
        mean,
        sd,
        mean_rel_l1,
        sd_rel_l1,
        absolute,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse, Var};

    fn trivial_config(samples: u64) -> RunConfig {
        let spec = ProblemSpec::new(
            parse("0", &[Var::Z(0)]).unwrap(),
            parse("1", &[Var::X]).unwrap(),
            0,
            0.0,
            0.4,
        );
        RunConfig::new(spec, vec![(0.0, 0.0)], samples, 17)
    }

    #[test]
    fn merge_identity_and_hand_arithmetic() {
        let mut s = RunStatistics::empty();
        s.push(3.0);
        let merged = RunStatistics::empty().merge(&s);
        assert_eq!(merged, s);

        let mut a = RunStatistics::empty();
        a.push(3.0);
        let mut b = RunStatistics::empty();
        b.push(5.0);
        let m = a.merge(&b);
        assert_eq!(m.count, 2);
        assert_eq!(m.mean(), 4.0);
        assert_eq!(m.variance(), 2.0);
        assert_eq!(m.min, 3.0);
        assert_eq!(m.max, 5.0);
    }

    #[test]
    fn random_split_merge_matches_single_pass() {
        use rand::Rng;
        let mut rng = crate::rng::sample_rng(4, 0, 0);
        let values: Vec<f64> = (0..10_000).map(|_| rng.gen::<f64>() * 10.0 - 5.0).collect();

        let mut single = RunStatistics::empty();
        for &v in &values {
            single.push(v);
        }

        // random partition into segments, then pairwise merges
        let mut segments = Vec::new();
        let mut start = 0usize;
        while start < values.len() {
            let len = 1 + (rng.gen::<u64>() % 700) as usize;
            let end = (start + len).min(values.len());
            let mut s = RunStatistics::empty();
            for &v in &values[start..end] {
                s.push(v);
            }
            segments.push(s);
            start = end;
        }
        let merged = reduce_pairwise(segments);

        assert_eq!(merged.count, single.count);
        assert!((merged.mean() - single.mean()).abs() <= 1e-12 * single.mean().abs().max(1.0));
        assert!((merged.variance() - single.variance()).abs() <= 1e-12 * single.variance());
    }

    #[test]
    fn trivial_benchmark_mean_is_one() {
        let config = trivial_config(100_000);
        let stats = run_estimate(&config).unwrap();
        let s = &stats[0];
        assert_eq!(s.failed, 0);
        assert!((s.mean() - 1.0).abs() < 3.0 * s.std_error(), "mean {}", s.mean());
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let mut config = trivial_config(20_000);
        config.threads = 1;
        let one = run_estimate(&config).unwrap();
        config.threads = 8;
        let eight = run_estimate(&config).unwrap();
        assert_eq!(one[0].mean().to_bits(), eight[0].mean().to_bits());
        assert_eq!(one[0].m2_raw().to_bits(), eight[0].m2_raw().to_bits());
        assert_eq!(one, eight);
    }

    #[test]
    fn standard_error_halves_when_samples_quadruple() {
        let base = run_estimate(&trivial_config(25_000)).unwrap()[0].std_error();
        let quad = run_estimate(&trivial_config(100_000)).unwrap()[0].std_error();
        let ratio = base / quad;
        assert!((ratio - 2.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn repetitions_are_disjoint_and_reproducible() {
        let config = trivial_config(4_000);
        let a0 = run_repetition(&config, 0).unwrap();
        let a1 = run_repetition(&config, 1).unwrap();
        assert_ne!(a0[0].mean().to_bits(), a1[0].mean().to_bits());
        let b0 = run_repetition(&config, 0).unwrap();
        assert_eq!(a0, b0);
    }

    #[test]
    fn strict_mode_aborts_on_failure_with_diagnostic() {
        // log(z0) at the jet of phi = x is log(x): negative endpoints give
        // NaN terminal values on branching samples
        let spec = ProblemSpec::new(
            parse("log(z0)", &[Var::Z(0)]).unwrap(),
            parse("x", &[Var::X]).unwrap(),
            0,
            0.0,
            1.5,
        );
        let mut config = RunConfig::new(spec, vec![(0.0, -10.0)], 50_000, 3);
        let err = run_estimate(&config).unwrap_err();
        match err {
            RunError::SampleFailed(diag) => {
                assert!(!diag.budget_exceeded);
                assert!(!diag.value.is_finite());
            }
            other => panic!("unexpected error {other:?}"),
        }
        // non-strict counts and excludes
        config.strict_failures = false;
        let stats = run_estimate(&config).unwrap();
        assert!(stats[0].failed > 0);
        assert_eq!(stats[0].count + stats[0].failed, 50_000);
    }

    #[test]
    fn error_report_examples() {
        let r = error_report(&[1.0, 1.0], 1.0);
        assert_eq!(r.mean_rel_l1, 0.0);
        assert_eq!(r.sd_rel_l1, 0.0);

        let r = error_report(&[0.9, 1.1], 1.0);
        assert!((r.mean_rel_l1 - 0.1).abs() < 1e-15);
        assert!(r.sd_rel_l1 < 1e-15);
        assert!((r.mean - 1.0).abs() < 1e-15);

        let r = error_report(&[0.1, -0.1], 0.0);
        assert!(r.absolute);
        assert!((r.mean_rel_l1 - 0.1).abs() < 1e-15);
    }
}
