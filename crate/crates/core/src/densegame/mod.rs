//! Entanglement-assisted exclusion game: Alice encodes one of `N` labels on
//! her half of `|Phi+>`, sends it through a noisy channel, and Bob measures
//! both halves to rule labels out. The Choi rank of the channel caps how many
//! labels can be excluded with certainty.

mod run;

pub use run::{csv_row, run_game, GameReport, OutcomeRow, CSV_HEADER};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exclusion::{exclusion_table, ExclusionEnsemble, Povm};
use crate::majorization::{spectrum, supp_count};
use crate::matop::{tensor, ComplexMatrix, HermitianMatrix, Tolerance};
use crate::quantum::{
    apply_kraus, bell_state, choi_rank, choi_to_kraus, kraus_to_choi, make_dephasing, max_entangled, weyl,
    ChoiState, DensityMatrix, KrausChannel, WeylIndex,
};
use crate::exclusion::lemma1_max_k;
use crate::scalar::{cr, Real};

/// How Alice acts on her half before sending it.
#[derive(Debug, Clone, PartialEq)]
pub enum Encoding<T: Real> {
    Unitary(ComplexMatrix<T>),
    Unital(KrausChannel<T>),
}

impl<T: Real> Encoding<T> {
    fn dim(&self) -> (usize, usize) {
        match self {
            Self::Unitary(u) => (u.rows(), u.cols()),
            Self::Unital(e) => (e.d_in(), e.d_out()),
        }
    }
}

/// The noisy link, given either way.
#[derive(Debug, Clone, PartialEq)]
pub enum GameChannel<T: Real> {
    Kraus(KrausChannel<T>),
    Choi(ChoiState<T>),
}

#[derive(Debug, Clone)]
pub struct GameConfig<T: Real> {
    d: usize,
    channel: GameChannel<T>,
    choi: ChoiState<T>,
    encodings: Vec<Encoding<T>>,
    priors: Vec<T>,
    pub trials: u64,
    pub seed: u64,
}

impl<T: Real> GameConfig<T> {
    /// Validates dimensions, encodings, priors and (for a Choi channel) CPTP.
    /// Priors default to uniform.
    pub fn new(
        d: usize,
        channel: GameChannel<T>,
        encodings: Vec<Encoding<T>>,
        priors: Option<Vec<T>>,
        trials: u64,
        seed: u64,
        tol: &Tolerance<T>,
    ) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        let n = encodings.len();
        if n < 2 {
            return Err(Error::EnsembleTooSmall(n));
        }
        let choi = match &channel {
            GameChannel::Kraus(k) => {
                if (k.d_in(), k.d_out()) != (d, d) {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: if k.d_in() != d { k.d_in() } else { k.d_out() },
                    });
                }
                kraus_to_choi(k)?
            }
            GameChannel::Choi(j) => {
                if j.d() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: j.d() });
                }
                j.require_cptp(tol)?;
                j.clone()
            }
        };
        for e in &encodings {
            let (rows, cols) = e.dim();
            if (rows, cols) != (d, d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: if rows != d { rows } else { cols },
                });
            }
            match e {
                Encoding::Unitary(u) => {
                    if !u.is_unitary(T::unitary_slack()) {
                        return Err(Error::NotUnitary {
                            residual: u.unitarity_residual().to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
                Encoding::Unital(ch) => {
                    if !ch.is_unital() {
                        return Err(Error::NotUnital {
                            residual: ch.unitality_residual().to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
            }
        }
        let priors = match priors {
            Some(p) => {
                // ExclusionEnsemble owns the prior checks; reuse them on a stand-in ensemble.
                let stand_in = vec![DensityMatrix::maximally_mixed(1); n];
                ExclusionEnsemble::new(stand_in, Some(p.clone()), tol)?;
                p
            }
            None => vec![T::one() / T::from_count(n); n],
        };
        Ok(Self {
            d,
            channel,
            choi,
            encodings,
            priors,
            trials,
            seed,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.encodings.len()
    }

    pub fn channel(&self) -> &GameChannel<T> {
        &self.channel
    }

    pub fn choi(&self) -> &ChoiState<T> {
        &self.choi
    }

    pub fn encodings(&self) -> &[Encoding<T>] {
        &self.encodings
    }

    pub fn priors(&self) -> &[T] {
        &self.priors
    }

    /// Kraus form of the channel, derived from the Choi state if needed.
    pub fn kraus(&self, tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
        match &self.channel {
            GameChannel::Kraus(k) => Ok(k.clone()),
            GameChannel::Choi(j) => choi_to_kraus(j, tol),
        }
    }
}

/// The `N` states Bob holds, `(I (x) U_x^t) J (I (x) U_x^t)^dag`, or
/// `(I (x) E_x^T)(J)` for a unital encoding whose Kraus operators are transposed.
pub fn build_game_states<T: Real>(cfg: &GameConfig<T>, tol: &Tolerance<T>) -> Result<ExclusionEnsemble<T>> {
    let d = cfg.d;
    let j = cfg.choi.matrix();
    let eye = ComplexMatrix::identity(d);
    let states = cfg
        .encodings
        .iter()
        .map(|e| {
            let m = match e {
                Encoding::Unitary(u) => j.conjugate_by(&tensor(&eye, &u.transpose())),
                Encoding::Unital(ch) => ch.transpose_channel()?.on_b(d).apply_operator(j)?,
            };
            DensityMatrix::with_tolerance(m, tol)
        })
        .collect::<Result<Vec<_>>>()?;
    ExclusionEnsemble::new(states, Some(cfg.priors.clone()), tol)
}

/// Same states, built the long way: encode on A, then send A through the channel.
pub fn build_game_states_direct<T: Real>(
    cfg: &GameConfig<T>,
    tol: &Tolerance<T>,
) -> Result<ExclusionEnsemble<T>> {
    let d = cfg.d;
    let phi = max_entangled::<T>(d)?.density();
    let noise = cfg.kraus(tol)?.on_a(d);
    let states = cfg
        .encodings
        .iter()
        .map(|e| {
            let encoded = match e {
                Encoding::Unitary(u) => {
                    DensityMatrix::with_tolerance(phi.matrix().conjugate_by(&tensor(u, &ComplexMatrix::identity(d))), tol)?
                }
                Encoding::Unital(ch) => apply_kraus(&ch.on_a(d), &phi)?,
            };
            apply_kraus(&noise, &encoded)
        })
        .collect::<Result<Vec<_>>>()?;
    ExclusionEnsemble::new(states, Some(cfg.priors.clone()), tol)
}

/// `floor(N (d^2 - r_c) / d^2)`: the most labels Bob can exclude with certainty.
pub fn theorem1_bound(n: usize, d: usize, r_c: usize) -> Result<usize> {
    let d2 = d * d;
    if r_c == 0 || r_c > d2 {
        return Err(Error::InvalidChoiRank { rank: r_c, max: d2 });
    }
    Ok(n * (d2 - r_c) / d2)
}

/// `W_{a,b}` for every `(a, b)` in lexicographic order; encoding `x` is `W` at flat index `x = a d + b`.
pub fn weyl_encodings<T: Real>(d: usize) -> Vec<Encoding<T>> {
    WeylIndex::all(d).map(|i| Encoding::Unitary(weyl(i))).collect()
}

/// Projectors onto `(I (x) W_{a,b})|Phi+>`, labeled by the flat index `a d + b`.
pub fn bell_povm<T: Real>(d: usize) -> Result<Povm<T>> {
    let effects = WeylIndex::all(d)
        .map(|i| bell_state::<T>(d, i.a() as i64, i.b() as i64).map(|v| HermitianMatrix::ket_bra(v.amplitudes())))
        .collect::<Result<Vec<_>>>()?;
    Povm::new(effects, None)
}

/// For each measurement outcome, the encoding labels Bob declares impossible.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Decoder(pub Vec<Vec<usize>>);

impl Decoder {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.0
    }
}

/// Excludes exactly the labels the POVM gives zero probability on the game states.
pub fn exclusion_decoder<T: Real>(cfg: &GameConfig<T>, povm: &Povm<T>, tol: &Tolerance<T>) -> Result<Decoder> {
    let ens = build_game_states(cfg, tol)?;
    Ok(Decoder(exclusion_table(povm, &ens, tol)?.excluded))
}

/// Outcome `a` excludes every label except `a`. Only sensible when the states are orthogonal.
pub fn discrimination_decoder(n: usize) -> Decoder {
    Decoder((0..n).map(|a| (0..n).filter(|&x| x != a).collect()).collect())
}

/// Recovers `p` if `ch` is `rho -> p rho + (1 - p) diag(rho)` with `p < 1`.
pub fn dephasing_parameter<T: Real>(cfg: &GameConfig<T>) -> Option<T> {
    let d = cfg.d;
    let j = cfg.choi.matrix().as_matrix();
    // J[(0,0),(1,1)] = p / d
    let p = j[(0, d + 1)].re * T::from_count(d);
    if !(p >= -T::identity_slack() && p < T::one() - T::identity_slack()) {
        return None;
    }
    let p = p.max(T::zero());
    let reference = kraus_to_choi(&make_dephasing(d, p).ok()?).ok()?;
    (reference.matrix().distance(cfg.choi.matrix()) <= T::identity_slack()).then_some(p)
}

/// Encoding `x` equals `W` at flat index `x` up to a global phase.
fn is_weyl_family<T: Real>(cfg: &GameConfig<T>) -> bool {
    let d = cfg.d;
    cfg.encodings.len() == d * d
        && cfg.encodings.iter().enumerate().all(|(x, e)| match e {
            Encoding::Unitary(u) => {
                let w = weyl::<T>(WeylIndex::from_flat(d, x));
                let overlap = (&w.adjoint() * u).trace() / cr(T::from_count(d));
                (overlap.norm() - T::one()).abs() <= T::unitary_slack()
                    && u.distance(&w.scale(overlap)) <= T::unitary_slack()
            }
            Encoding::Unital(_) => false,
        })
}

/// Bell-basis decoder for the dephasing game, derived numerically from the
/// exclusion table. Every outcome rules out `d^2 - d` labels, and the set
/// depends only on the outcome's shift index.
pub fn decoder_table<T: Real>(cfg: &GameConfig<T>, tol: &Tolerance<T>) -> Result<Decoder> {
    if dephasing_parameter(cfg).is_none() {
        return Err(Error::Unsupported("decoder_table needs a dephasing channel with p < 1".into()));
    }
    if !is_weyl_family(cfg) {
        return Err(Error::Unsupported("decoder_table needs the Weyl encodings in flat order".into()));
    }
    let d = cfg.d;
    let decoder = exclusion_decoder(cfg, &bell_povm(d)?, tol)?;
    for (outcome, set) in decoder.0.iter().enumerate() {
        let r = outcome / d;
        if set.len() != d * d - d || *set != decoder.0[r * d] {
            return Err(Error::Unsupported(format!(
                "outcome {outcome} excludes {set:?}, expected d^2 - d labels shared across shift {r}"
            )));
        }
    }
    Ok(decoder)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitalExtensionVerdict {
    pub r_c: usize,
    pub ranks: Vec<usize>,
    /// Every state has rank at least `r_c`.
    pub ranks_ok: bool,
    pub lemma1_max_k: usize,
    pub theorem1_k: usize,
    pub bound_ok: bool,
}

impl UnitalExtensionVerdict {
    pub fn holds(&self) -> bool {
        self.ranks_ok && self.bound_ok
    }
}

/// Checks that unital encodings keep every game state at rank `>= r_c`, so the
/// projector-sum bound never beats the Choi-rank bound.
pub fn unital_extension_check<T: Real>(cfg: &GameConfig<T>, tol: &Tolerance<T>) -> Result<UnitalExtensionVerdict> {
    // GameConfig::new already rejects non-unital encodings; unitaries are unital.
    let r_c = choi_rank(&cfg.choi, tol)?;
    let ens = build_game_states(cfg, tol)?;
    let ranks: Vec<usize> = ens
        .states()
        .iter()
        .map(|s| supp_count(&spectrum(s, tol).values, tol))
        .collect();
    let max_k = lemma1_max_k(&ens, tol);
    let theorem1_k = theorem1_bound(cfg.n(), cfg.d, r_c)?;
    Ok(UnitalExtensionVerdict {
        r_c,
        ranks_ok: ranks.iter().all(|&r| r >= r_c),
        ranks,
        lemma1_max_k: max_k,
        theorem1_k,
        bound_ok: max_k <= theorem1_k,
    })
}
