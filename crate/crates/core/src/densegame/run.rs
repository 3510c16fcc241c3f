use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{build_game_states, theorem1_bound, Decoder, GameConfig};
use crate::error::{Error, Result};
use crate::exclusion::{verify_povm, Label, Povm};
use crate::matop::Tolerance;
use crate::quantum::choi_rank;
use crate::scalar::Real;

const BORN_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeRow {
    pub outcome: usize,
    pub label: Label,
    pub excluded: Vec<usize>,
    /// Times this outcome was observed.
    pub hits: u64,
    pub failures: u64,
    /// Largest `tr[T_a rho_x]` over the excluded `x`. Zero up to rounding when the decoder is sound.
    pub max_excluded_probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameReport {
    pub d: usize,
    pub n: usize,
    pub choi_rank_used: usize,
    pub theorem1_k: usize,
    /// Smallest excluded set over outcomes that can occur.
    pub achieved_k: usize,
    pub failures: u64,
    pub trials_run: u64,
    pub seed: u64,
    /// Max of `max_excluded_probability` over all outcomes.
    pub certificate: f64,
    /// No failures, and the certificate is below the zero threshold.
    pub conclusive: bool,
    pub per_outcome_excluded: Vec<OutcomeRow>,
}

#[derive(Clone)]
struct Tally {
    failures: u64,
    hits: Vec<u64>,
    misses: Vec<u64>,
}

impl Tally {
    fn new(m: usize) -> Self {
        Self {
            failures: 0,
            hits: vec![0; m],
            misses: vec![0; m],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.failures += other.failures;
        for (a, b) in self.hits.iter_mut().zip(other.hits) {
            *a += b;
        }
        for (a, b) in self.misses.iter_mut().zip(other.misses) {
            *a += b;
        }
        self
    }
}

fn weighted(weights: &[f64]) -> Result<WeightedIndex<f64>> {
    WeightedIndex::new(weights).map_err(|e| Error::Unsupported(format!("sampling weights: {e}")))
}

/// Plays `cfg.trials` rounds. Trial `t` draws from a ChaCha8 stream seeded by
/// `cfg.seed` with stream id `t`, so the result does not depend on how trials
/// are spread over threads.
pub fn run_game<T: Real>(
    cfg: &GameConfig<T>,
    povm: &Povm<T>,
    decoder: &Decoder,
    tol: &Tolerance<T>,
) -> Result<GameReport> {
    let pv = verify_povm(povm, tol);
    if !pv.valid {
        return Err(Error::InvalidPovm {
            min_eigenvalue: pv.min_eigenvalue.to_f64().unwrap_or(f64::NAN),
            residual: pv.completeness_residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    let m = povm.len();
    if decoder.len() < m {
        return Err(Error::DecoderGap(decoder.len()));
    }
    let n = cfg.n();
    if let Some(&bad) = decoder.sets().iter().flatten().find(|&&x| x >= n) {
        return Err(Error::Unsupported(format!("decoder names label {bad}, but N = {n}")));
    }
    let ens = build_game_states(cfg, tol)?;
    if povm.dim() != ens.dim() {
        return Err(Error::DimensionMismatch {
            expected: ens.dim(),
            found: povm.dim(),
        });
    }

    // born[x][a] = tr[T_a rho_x]
    let mut born = Vec::with_capacity(n);
    for (x, state) in ens.states().iter().enumerate() {
        let row: Vec<f64> = povm
            .effects()
            .iter()
            .map(|e| e.trace_product(state.matrix()).to_f64().unwrap_or(f64::NAN))
            .collect();
        let sum: f64 = row.iter().sum();
        if sum.is_nan() || (sum - 1.0).abs() > BORN_SLACK {
            return Err(Error::BornNormalization { label: x, sum });
        }
        born.push(row.into_iter().map(|p| p.max(0.0) / sum).collect::<Vec<_>>());
    }
    let priors: Vec<f64> = cfg.priors().iter().map(|p| p.to_f64().unwrap_or(f64::NAN)).collect();
    let prior_dist = weighted(&priors)?;
    let outcome_dist = born.iter().map(|row| weighted(row)).collect::<Result<Vec<_>>>()?;

    let seed = cfg.seed;
    let tally = (0..cfg.trials)
        .into_par_iter()
        .fold(
            || Tally::new(m),
            |mut t, trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                let x = prior_dist.sample(&mut rng);
                let a = outcome_dist[x].sample(&mut rng);
                t.hits[a] += 1;
                if decoder.sets()[a].contains(&x) {
                    t.failures += 1;
                    t.misses[a] += 1;
                }
                t
            },
        )
        .reduce(|| Tally::new(m), Tally::merge);

    let zero = tol.trace_zero.to_f64().unwrap_or(0.0);
    let rows: Vec<OutcomeRow> = (0..m)
        .map(|a| OutcomeRow {
            outcome: a,
            label: povm.labels()[a].clone(),
            excluded: decoder.sets()[a].clone(),
            hits: tally.hits[a],
            failures: tally.misses[a],
            max_excluded_probability: decoder.sets()[a].iter().map(|&x| born[x][a]).fold(0.0, f64::max),
        })
        .collect();
    let reachable = |a: usize| (0..n).map(|x| priors[x] * born[x][a]).sum::<f64>() > zero;
    let achieved_k = (0..m)
        .filter(|&a| reachable(a))
        .map(|a| decoder.sets()[a].len())
        .min()
        .unwrap_or(0);
    let certificate = rows.iter().map(|r| r.max_excluded_probability).fold(0.0, f64::max);
    let r_c = choi_rank(cfg.choi(), tol)?;
    Ok(GameReport {
        d: cfg.d(),
        n,
        choi_rank_used: r_c,
        theorem1_k: theorem1_bound(n, cfg.d(), r_c)?,
        achieved_k,
        failures: tally.failures,
        trials_run: cfg.trials,
        seed,
        certificate,
        conclusive: tally.failures == 0 && certificate <= zero,
        per_outcome_excluded: rows,
    })
}

pub const CSV_HEADER: &str = "config_hash,d,p,N,r_c,theorem1_k,achieved_k,failures,trials,seed";

/// One CSV line (no trailing newline) in [`CSV_HEADER`] order. `p` is left blank when unknown.
pub fn csv_row(report: &GameReport, config_hash: &str, p: Option<f64>) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        config_hash,
        report.d,
        p.map(|v| v.to_string()).unwrap_or_default(),
        report.n,
        report.choi_rank_used,
        report.theorem1_k,
        report.achieved_k,
        report.failures,
        report.trials_run,
        report.seed
    )
}
