//! JSON file formats. Complex numbers are `[re, im]` pairs (a bare number is
//! read as a real entry), matrices are row-major nested arrays.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::densegame::{
    bell_povm, decoder_table, discrimination_decoder, exclusion_decoder, weyl_encodings, Decoder, Encoding,
    GameChannel, GameConfig,
};
use crate::error::{Error, Result};
use crate::exclusion::{ExclusionEnsemble, Label, Povm};
use crate::matop::{ComplexMatrix, HermitianMatrix, Tolerance};
use crate::quantum::{
    kraus_to_choi, make_dephasing, make_depolarizing, make_unitary_channel, ChoiState, DensityMatrix, KrausChannel,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonScalar {
    Pair([f64; 2]),
    Real(f64),
}

impl From<JsonScalar> for Complex<f64> {
    fn from(s: JsonScalar) -> Self {
        match s {
            JsonScalar::Pair([re, im]) => Complex::new(re, im),
            JsonScalar::Real(re) => Complex::new(re, 0.0),
        }
    }
}

pub type JsonMatrix = Vec<Vec<JsonScalar>>;

pub fn matrix_from_json(m: &JsonMatrix) -> Result<ComplexMatrix<f64>> {
    ComplexMatrix::from_rows(m.iter().map(|row| row.iter().map(|&s| s.into()).collect()).collect())
}

pub fn matrix_to_json(m: &ComplexMatrix<f64>) -> JsonMatrix {
    m.to_rows()
        .into_iter()
        .map(|row| row.into_iter().map(|z| JsonScalar::Pair([z.re, z.im])).collect())
        .collect()
}

fn hermitian(m: &JsonMatrix, dim: usize) -> Result<HermitianMatrix<f64>> {
    let h = HermitianMatrix::new(matrix_from_json(m)?)?;
    if h.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: h.dim() });
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Kraus,
    Choi,
    Builtin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BuiltinName {
    Dephasing,
    Depolarizing,
    Unitary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuiltinSpec {
    pub name: BuiltinName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<JsonMatrix>,
}

/// `{ "d", "kind", "kraus" | "choi" | "builtin" }`. A Choi matrix is read with
/// unit trace, `J = (N (x) I)(|Phi+><Phi+|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub d: usize,
    pub kind: ChannelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<BuiltinSpec>,
}

fn missing(field: &str) -> Error {
    Error::Unsupported(format!("missing field {field:?}"))
}

impl ChannelSpec {
    /// Noise parameter of a builtin channel.
    pub fn p(&self) -> Option<f64> {
        self.builtin.as_ref().and_then(|b| b.p)
    }

    fn kraus_channel(&self) -> Result<KrausChannel<f64>> {
        let ch = match self.kind {
            ChannelKind::Kraus => {
                let ops = self.kraus.as_ref().ok_or_else(|| missing("kraus"))?;
                KrausChannel::new(ops.iter().map(matrix_from_json).collect::<Result<_>>()?)?
            }
            ChannelKind::Builtin => {
                let b = self.builtin.as_ref().ok_or_else(|| missing("builtin"))?;
                match b.name {
                    BuiltinName::Dephasing => make_dephasing(self.d, b.p.ok_or_else(|| missing("builtin.p"))?)?,
                    BuiltinName::Depolarizing => make_depolarizing(self.d, b.p.ok_or_else(|| missing("builtin.p"))?)?,
                    BuiltinName::Unitary => {
                        make_unitary_channel(matrix_from_json(b.unitary.as_ref().ok_or_else(|| missing("builtin.unitary"))?)?)?
                    }
                }
            }
            ChannelKind::Choi => unreachable!("handled by the caller"),
        };
        if (ch.d_in(), ch.d_out()) != (self.d, self.d) {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: if ch.d_in() != self.d { ch.d_in() } else { ch.d_out() },
            });
        }
        Ok(ch)
    }

    /// Choi state of the channel. No CPTP check for `kind = "choi"`.
    pub fn choi_state(&self) -> Result<ChoiState<f64>> {
        match self.kind {
            ChannelKind::Choi => {
                let m = self.choi.as_ref().ok_or_else(|| missing("choi"))?;
                ChoiState::new(self.d, HermitianMatrix::new(matrix_from_json(m)?)?)
            }
            _ => kraus_to_choi(&self.kraus_channel()?),
        }
    }

    pub fn game_channel(&self) -> Result<GameChannel<f64>> {
        match self.kind {
            ChannelKind::Choi => Ok(GameChannel::Choi(self.choi_state()?)),
            _ => Ok(GameChannel::Kraus(self.kraus_channel()?)),
        }
    }
}

/// `{ "dim", "states", "priors"? }`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub states: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
}

impl EnsembleSpec {
    pub fn build(&self, tol: &Tolerance<f64>) -> Result<ExclusionEnsemble<f64>> {
        let states = self
            .states
            .iter()
            .map(|m| DensityMatrix::with_tolerance(hermitian(m, self.dim)?, tol))
            .collect::<Result<Vec<_>>>()?;
        ExclusionEnsemble::new(states, self.priors.clone(), tol)
    }

    pub fn from_ensemble(ens: &ExclusionEnsemble<f64>) -> Self {
        Self {
            dim: ens.dim(),
            states: ens.states().iter().map(|s| matrix_to_json(s.matrix().as_matrix())).collect(),
            priors: Some(ens.priors().to_vec()),
        }
    }
}

/// `{ "dim", "effects", "labels"? }`; a label is an index or a list of indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PovmSpec {
    pub dim: usize,
    pub effects: Vec<JsonMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<Label>>,
}

impl PovmSpec {
    pub fn build(&self) -> Result<Povm<f64>> {
        let effects = self.effects.iter().map(|m| hermitian(m, self.dim)).collect::<Result<Vec<_>>>()?;
        Povm::new(effects, self.labels.clone())
    }

    pub fn from_povm(p: &Povm<f64>) -> Self {
        Self {
            dim: p.dim(),
            effects: p.effects().iter().map(|e| matrix_to_json(e.as_matrix())).collect(),
            labels: Some(p.labels().to_vec()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedEncodings {
    Weyl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingSpec {
    Unitary(JsonMatrix),
    /// Kraus operators of a unital channel.
    Unital(Vec<JsonMatrix>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EncodingsSpec {
    Named(NamedEncodings),
    List(Vec<EncodingSpec>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedPovm {
    Bell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PovmChoice {
    Named(NamedPovm),
    Explicit(PovmSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedDecoder {
    /// Whatever the POVM provably rules out on the game states.
    Exclusion,
    /// Outcome `a` excludes every label but `a`.
    Discrimination,
    /// Bell-basis table for a dephasing channel with Weyl encodings.
    Dephasing,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DecoderChoice {
    Named(NamedDecoder),
    Table { table: Vec<Vec<usize>> },
}

fn default_encodings() -> EncodingsSpec {
    EncodingsSpec::Named(NamedEncodings::Weyl)
}

fn default_povm() -> PovmChoice {
    PovmChoice::Named(NamedPovm::Bell)
}

fn default_decoder() -> DecoderChoice {
    DecoderChoice::Named(NamedDecoder::Exclusion)
}

pub const DEFAULT_TRIALS: u64 = 10_000;

/// Game configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub d: usize,
    pub channel: ChannelSpec,
    #[serde(default = "default_encodings")]
    pub encodings: EncodingsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub priors: Option<Vec<f64>>,
    #[serde(default = "default_povm")]
    pub povm: PovmChoice,
    #[serde(default = "default_decoder")]
    pub decoder: DecoderChoice,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Everything `run_game` needs.
pub struct Game {
    pub config: GameConfig<f64>,
    pub povm: Povm<f64>,
    pub decoder: Decoder,
}

impl GameSpec {
    /// `trials` and `seed` override the file when given.
    pub fn build(&self, trials: Option<u64>, seed: Option<u64>, tol: &Tolerance<f64>) -> Result<Game> {
        if self.channel.d != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: self.channel.d,
            });
        }
        let encodings = match &self.encodings {
            EncodingsSpec::Named(NamedEncodings::Weyl) => weyl_encodings(self.d),
            EncodingsSpec::List(list) => list
                .iter()
                .map(|e| match e {
                    EncodingSpec::Unitary(m) => Ok(Encoding::Unitary(matrix_from_json(m)?)),
                    EncodingSpec::Unital(ops) => Ok(Encoding::Unital(KrausChannel::new(
                        ops.iter().map(matrix_from_json).collect::<Result<_>>()?,
                    )?)),
                })
                .collect::<Result<Vec<_>>>()?,
        };
        let config = GameConfig::new(
            self.d,
            self.channel.game_channel()?,
            encodings,
            self.priors.clone(),
            trials.or(self.trials).unwrap_or(DEFAULT_TRIALS),
            seed.or(self.seed).unwrap_or(0),
            tol,
        )?;
        let povm = match &self.povm {
            PovmChoice::Named(NamedPovm::Bell) => bell_povm(self.d)?,
            PovmChoice::Explicit(spec) => spec.build()?,
        };
        let decoder = match &self.decoder {
            DecoderChoice::Named(NamedDecoder::Exclusion) => exclusion_decoder(&config, &povm, tol)?,
            DecoderChoice::Named(NamedDecoder::Discrimination) => discrimination_decoder(config.n()),
            DecoderChoice::Named(NamedDecoder::Dephasing) => decoder_table(&config, tol)?,
            DecoderChoice::Table { table } => Decoder(table.clone()),
        };
        Ok(Game { config, povm, decoder })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densegame::run_game;
    use crate::quantum::{choi_rank, is_cptp};

    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn matrices_round_trip() {
        let m = ComplexMatrix::from_rows(vec![
            vec![Complex::new(1.0, -2.0), Complex::new(0.5, 0.0)],
            vec![Complex::new(0.0, 3.0), Complex::new(-1.0, 0.25)],
        ])
        .unwrap();
        let text = serde_json::to_string(&matrix_to_json(&m)).unwrap();
        assert_eq!(text, "[[[1.0,-2.0],[0.5,0.0]],[[0.0,3.0],[-1.0,0.25]]]");
        let back: JsonMatrix = serde_json::from_str(&text).unwrap();
        assert_eq!(matrix_from_json(&back).unwrap(), m);
    }

    #[test]
    fn bare_numbers_are_real() {
        let m: JsonMatrix = serde_json::from_str("[[1, [0, 1]], [[0, -1], 2.5]]").unwrap();
        let m = matrix_from_json(&m).unwrap();
        assert_eq!(m[(0, 1)], Complex::new(0.0, 1.0));
        assert_eq!(m[(1, 1)], Complex::new(2.5, 0.0));
        let ragged: JsonMatrix = serde_json::from_str("[[1, 0], [0]]").unwrap();
        assert!(matrix_from_json(&ragged).is_err());
    }

    #[test]
    fn channel_specs() {
        let spec: ChannelSpec =
            serde_json::from_str(r#"{"d": 2, "kind": "builtin", "builtin": {"name": "dephasing", "p": 0.25}}"#).unwrap();
        assert_eq!(spec.p(), Some(0.25));
        assert_eq!(choi_rank(&spec.choi_state().unwrap(), &tol()).unwrap(), 2);

        let unitary: ChannelSpec = serde_json::from_str(
            r#"{"d": 2, "kind": "builtin", "builtin": {"name": "unitary", "unitary": [[0, 1], [1, 0]]}}"#,
        )
        .unwrap();
        assert_eq!(choi_rank(&unitary.choi_state().unwrap(), &tol()).unwrap(), 1);

        let j = spec.choi_state().unwrap();
        let as_choi = ChannelSpec {
            d: 2,
            kind: ChannelKind::Choi,
            kraus: None,
            choi: Some(matrix_to_json(j.matrix().as_matrix())),
            builtin: None,
        };
        let parsed: ChannelSpec = serde_json::from_str(&serde_json::to_string(&as_choi).unwrap()).unwrap();
        assert!(is_cptp(&parsed.choi_state().unwrap(), &tol()).cptp);

        let wrong_d: ChannelSpec =
            serde_json::from_str(r#"{"d": 3, "kind": "kraus", "kraus": [[[1, 0], [0, 1]]]}"#).unwrap();
        assert!(matches!(wrong_d.choi_state(), Err(Error::DimensionMismatch { .. })));
        let no_p: ChannelSpec =
            serde_json::from_str(r#"{"d": 2, "kind": "builtin", "builtin": {"name": "depolarizing"}}"#).unwrap();
        assert!(no_p.choi_state().is_err());
        assert!(serde_json::from_str::<ChannelSpec>(r#"{"d": 2, "kind": "kraus", "extra": 1}"#).is_err());
    }

    #[test]
    fn ensemble_and_povm_specs() {
        let ens: EnsembleSpec =
            serde_json::from_str(r#"{"dim": 2, "states": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]], "priors": [0.3, 0.7]}"#)
                .unwrap();
        let built = ens.build(&tol()).unwrap();
        assert_eq!(built.priors(), &[0.3, 0.7]);
        let again = EnsembleSpec::from_ensemble(&built).build(&tol()).unwrap();
        assert_eq!(again.priors(), built.priors());
        for (a, b) in again.states().iter().zip(built.states()) {
            assert_eq!(a.matrix().as_matrix(), b.matrix().as_matrix());
        }

        let povm: PovmSpec =
            serde_json::from_str(r#"{"dim": 2, "effects": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]], "labels": [[1], 0]}"#)
                .unwrap();
        let p = povm.build().unwrap();
        assert_eq!(p.labels(), &[Label::Subset(vec![1]), Label::Index(0)]);

        let not_state: EnsembleSpec = serde_json::from_str(r#"{"dim": 2, "states": [[[2, 0], [0, 0]], [[0, 0], [0, 1]]]}"#).unwrap();
        assert!(not_state.build(&tol()).is_err());
        let wrong_dim: EnsembleSpec = serde_json::from_str(r#"{"dim": 3, "states": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}"#).unwrap();
        assert!(matches!(wrong_dim.build(&tol()), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn game_spec_defaults_and_overrides() {
        let spec: GameSpec = serde_json::from_str(
            r#"{"d": 2, "channel": {"d": 2, "kind": "builtin", "builtin": {"name": "dephasing", "p": 0.5}}, "seed": 9}"#,
        )
        .unwrap();
        assert_eq!(spec.encodings, EncodingsSpec::Named(NamedEncodings::Weyl));
        assert_eq!(spec.povm, PovmChoice::Named(NamedPovm::Bell));
        assert_eq!(spec.decoder, DecoderChoice::Named(NamedDecoder::Exclusion));
        let game = spec.build(None, None, &tol()).unwrap();
        assert_eq!((game.config.trials, game.config.seed), (DEFAULT_TRIALS, 9));
        let game = spec.build(Some(50), Some(3), &tol()).unwrap();
        assert_eq!((game.config.trials, game.config.seed), (50, 3));
        let rep = run_game(&game.config, &game.povm, &game.decoder, &tol()).unwrap();
        assert_eq!((rep.failures, rep.achieved_k), (0, 2));
    }

    #[test]
    fn game_spec_with_explicit_encodings() {
        let spec: GameSpec = serde_json::from_str(
            r#"{
                "d": 2,
                "channel": {"d": 2, "kind": "kraus", "kraus": [[[1, 0], [0, 1]]]},
                "encodings": [
                    {"unitary": [[1, 0], [0, 1]]},
                    {"unitary": [[0, 1], [1, 0]]},
                    {"unital": [[[0.5, 0], [0, 0.5]], [[0, 0.5], [0.5, 0]], [[0.5, 0], [0, -0.5]], [[0, [0, -0.5]], [[0, 0.5], 0]]]}
                ],
                "priors": [0.25, 0.25, 0.5],
                "decoder": {"table": [[1, 2], [0, 2], [], [], []]}
            }"#,
        )
        .unwrap();
        let game = spec.build(Some(100), Some(1), &tol()).unwrap();
        assert_eq!(game.config.n(), 3);
        assert_eq!(game.config.priors(), &[0.25, 0.25, 0.5]);
        assert!(run_game(&game.config, &game.povm, &game.decoder, &tol()).is_ok());

        let mismatched: GameSpec = serde_json::from_str(
            r#"{"d": 3, "channel": {"d": 2, "kind": "builtin", "builtin": {"name": "dephasing", "p": 0.5}}}"#,
        )
        .unwrap();
        assert!(matches!(mismatched.build(None, None, &tol()), Err(Error::DimensionMismatch { .. })));
    }
}
