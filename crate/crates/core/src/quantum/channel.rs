use std::sync::OnceLock;

use num_traits::Zero;

use super::{DensityMatrix, WeylIndex};
use crate::error::{Error, Result};
use crate::matop::{
    eig_hermitian, numerical_rank, partial_trace, tensor, transpose_in_basis, ComplexMatrix,
    HermitianMatrix, Subsystem, Tolerance,
};
use crate::quantum::weyl;
use crate::scalar::{cr, Real};

/// Channel in Kraus form, `N(rho) = sum_x K_x rho K_x^dag`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel<T: Real> {
    d_in: usize,
    d_out: usize,
    ops: Vec<ComplexMatrix<T>>,
}

impl<T: Real> KrausChannel<T> {
    /// Checks shapes and `sum K^dag K = I` within the scalar's identity slack.
    pub fn new(ops: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = ops.first().ok_or(Error::InvalidDimension(0))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        for op in &ops {
            if op.rows() != d_out || op.cols() != d_in {
                return Err(Error::DimensionMismatch {
                    expected: d_out * d_in,
                    found: op.rows() * op.cols(),
                });
            }
        }
        let ch = Self { d_in, d_out, ops };
        let residual = ch.completeness_residual();
        if residual > T::identity_slack() {
            return Err(Error::NotTracePreserving {
                residual: residual.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(ch)
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d_in: d,
            d_out: d,
            ops: vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn ops(&self) -> &[ComplexMatrix<T>] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// `||sum K^dag K - I||_F`
    pub fn completeness_residual(&self) -> T {
        let mut acc = ComplexMatrix::zeros(self.d_in, self.d_in);
        for k in &self.ops {
            acc = &acc + &(&k.adjoint() * k);
        }
        acc.distance(&ComplexMatrix::identity(self.d_in))
    }

    /// `||sum K K^dag - I||_F`; zero exactly when the channel is unital.
    pub fn unitality_residual(&self) -> T {
        let mut acc = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.ops {
            acc = &acc + &(k * &k.adjoint());
        }
        acc.distance(&ComplexMatrix::identity(self.d_out))
    }

    pub fn is_unital(&self) -> bool {
        self.d_in == self.d_out && self.unitality_residual() <= T::identity_slack()
    }

    /// Channel with Kraus operators `K_x^t`. Unital channels map to unital channels.
    pub fn transpose_channel(&self) -> Result<Self> {
        Self::new(self.ops.iter().map(transpose_in_basis).collect())
    }

    /// `self o first`: apply `first`, then `self`.
    pub fn after(&self, first: &Self) -> Result<Self> {
        if first.d_out != self.d_in {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                found: first.d_out,
            });
        }
        Self::new(
            self.ops
                .iter()
                .flat_map(|k| first.ops.iter().map(move |l| k * l))
                .collect(),
        )
    }

    /// `N (x) I_{d_b}`: the channel acting on the A factor of `A (x) B`.
    pub fn on_a(&self, d_b: usize) -> Self {
        let id = ComplexMatrix::identity(d_b);
        Self {
            d_in: self.d_in * d_b,
            d_out: self.d_out * d_b,
            ops: self.ops.iter().map(|k| tensor(k, &id)).collect(),
        }
    }

    /// `I_{d_a} (x) N`: the channel acting on the B factor of `A (x) B`.
    pub fn on_b(&self, d_a: usize) -> Self {
        let id = ComplexMatrix::identity(d_a);
        Self {
            d_in: self.d_in * d_a,
            d_out: self.d_out * d_a,
            ops: self.ops.iter().map(|k| tensor(&id, k)).collect(),
        }
    }

    /// Applies the Kraus sum to an arbitrary Hermitian operator.
    pub fn apply_operator(&self, x: &HermitianMatrix<T>) -> Result<HermitianMatrix<T>> {
        if x.dim() != self.d_in {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                found: x.dim(),
            });
        }
        let mut acc = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.ops {
            acc = &acc + &x.as_matrix().conjugate_by(k);
        }
        Ok(HermitianMatrix::symmetrized(&acc))
    }
}

/// `N(rho) = sum_x K_x rho K_x^dag`.
pub fn apply_kraus<T: Real>(ch: &KrausChannel<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    DensityMatrix::new(ch.apply_operator(rho.matrix())?)
}

/// Choi state `J = (N (x) I)(|Phi+><Phi+|)`, stored with unit trace.
#[derive(Debug, Clone)]
pub struct ChoiState<T: Real> {
    d: usize,
    matrix: HermitianMatrix<T>,
    rank: OnceLock<(Tolerance<T>, usize)>,
}

impl<T: Real> PartialEq for ChoiState<T> {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.matrix == other.matrix
    }
}

/// Outcome of [`is_cptp`], with both residuals that decide it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CptpVerdict<T: Real> {
    pub cptp: bool,
    pub psd: bool,
    pub marginal_ok: bool,
    pub min_eigenvalue: T,
    /// `||tr_A J - I/d||_F`
    pub marginal_residual: T,
}

impl<T: Real> ChoiState<T> {
    /// Wraps a `d^2 x d^2` Hermitian matrix. No CPTP check happens here; see [`is_cptp`].
    pub fn new(d: usize, matrix: HermitianMatrix<T>) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        if matrix.dim() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: matrix.dim(),
            });
        }
        Ok(Self {
            d,
            matrix,
            rank: OnceLock::new(),
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &HermitianMatrix<T> {
        &self.matrix
    }

    /// The Choi matrix viewed as a bipartite state.
    pub fn to_state(&self) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(self.matrix.clone())
    }

    pub(crate) fn require_cptp(&self, tol: &Tolerance<T>) -> Result<()> {
        let v = is_cptp(self, tol);
        if !v.cptp {
            return Err(Error::NotCptp {
                min_eigenvalue: v.min_eigenvalue.to_f64().unwrap_or(f64::NAN),
                marginal_residual: v.marginal_residual.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(())
    }
}

/// Builds the Choi state of a square Kraus channel.
pub fn kraus_to_choi<T: Real>(ch: &KrausChannel<T>) -> Result<ChoiState<T>> {
    if ch.d_in != ch.d_out {
        return Err(Error::Unsupported(format!(
            "non-square channel {} -> {}",
            ch.d_in, ch.d_out
        )));
    }
    let d = ch.d_in;
    let n = d * d;
    let inv_d = T::one() / T::from_count(d);
    // (K (x) I)|Phi+> has amplitude K[r][c] / sqrt(d) at flat index r*d + c.
    let mut j = ComplexMatrix::zeros(n, n);
    for k in &ch.ops {
        let v = k.as_slice();
        for p in 0..n {
            if v[p].is_zero() {
                continue;
            }
            for q in 0..n {
                j[(p, q)] = j[(p, q)] + v[p] * v[q].conj() * inv_d;
            }
        }
    }
    ChoiState::new(d, HermitianMatrix::symmetrized(&j))
}

/// Minimal Kraus form from the eigendecomposition of `J`:
/// `K_i[r][c] = sqrt(d lambda_i) v_i[r d + c]` for every eigenvalue above the rank cut.
pub fn choi_to_kraus<T: Real>(j: &ChoiState<T>, tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    j.require_cptp(tol)?;
    let d = j.d;
    let (spec, vecs) = eig_hermitian(&j.matrix);
    let rank = spec.count_above(tol);
    let df = T::from_count(d);
    let ops = (0..rank)
        .map(|i| {
            let s = (df * spec.eigenvalues[i]).sqrt();
            ComplexMatrix::from_fn(d, d, |r, c| vecs[(r * d + c, i)] * s)
        })
        .collect();
    KrausChannel::new(ops)
}

/// `N(rho) = d tr_B[(I (x) rho^t) J]`.
pub fn apply_via_choi<T: Real>(
    j: &ChoiState<T>,
    rho: &DensityMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<DensityMatrix<T>> {
    if rho.dim() != j.d {
        return Err(Error::DimensionMismatch {
            expected: j.d,
            found: rho.dim(),
        });
    }
    j.require_cptp(tol)?;
    let d = j.d;
    let lifted = tensor(
        &ComplexMatrix::identity(d),
        &transpose_in_basis(rho.matrix().as_matrix()),
    );
    let prod = &lifted * j.matrix.as_matrix();
    let out = partial_trace(&prod, Subsystem::A, (d, d))?.scale_real(T::from_count(d));
    DensityMatrix::new(HermitianMatrix::symmetrized(&out))
}

/// Numerical rank of the Choi matrix. Cached per tolerance.
pub fn choi_rank<T: Real>(j: &ChoiState<T>, tol: &Tolerance<T>) -> Result<usize> {
    if let Some((cached_tol, r)) = j.rank.get() {
        if cached_tol == tol {
            return Ok(*r);
        }
    }
    let r = numerical_rank(&j.matrix, tol)?;
    let _ = j.rank.set((*tol, r));
    Ok(r)
}

/// `J` is a valid Choi state iff `J >= 0` and `tr_A J = I/d`.
pub fn is_cptp<T: Real>(j: &ChoiState<T>, tol: &Tolerance<T>) -> CptpVerdict<T> {
    let d = j.d;
    let min_eigenvalue = crate::matop::min_eigenvalue(&j.matrix);
    let psd = min_eigenvalue >= -tol.psd_slack;
    let marginal = partial_trace(j.matrix.as_matrix(), Subsystem::B, (d, d)).expect("d^2 square matrix");
    let target = ComplexMatrix::identity(d).scale_real(T::one() / T::from_count(d));
    let marginal_residual = marginal.distance(&target);
    let marginal_ok = marginal_residual <= T::identity_slack();
    CptpVerdict {
        cptp: psd && marginal_ok,
        psd,
        marginal_ok,
        min_eigenvalue,
        marginal_residual,
    }
}

fn check_probability<T: Real>(p: T) -> Result<()> {
    if !(p >= T::zero() && p <= T::one()) {
        return Err(Error::ProbabilityOutOfRange(p.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// `D_p(rho) = p rho + (1 - p) I/d` as the Weyl twirl
/// `{sqrt(q_ab) W_ab}` with `q_00 = p + (1-p)/d^2` and `q_ab = (1-p)/d^2` otherwise.
pub fn make_depolarizing<T: Real>(d: usize, p: T) -> Result<KrausChannel<T>> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    check_probability(p)?;
    let d2 = T::from_count(d * d);
    let rest = (T::one() - p) / d2;
    let ops = WeylIndex::all(d)
        .filter_map(|idx| {
            let q = if idx.flat() == 0 { p + rest } else { rest };
            (q > T::zero()).then(|| weyl::<T>(idx).scale_real(q.sqrt()))
        })
        .collect();
    KrausChannel::new(ops)
}

/// `D_p(rho) = p rho + (1 - p) sum_n |n><n| rho |n><n|`.
pub fn make_dephasing<T: Real>(d: usize, p: T) -> Result<KrausChannel<T>> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    check_probability(p)?;
    let mut ops = Vec::with_capacity(d + 1);
    if p > T::zero() {
        ops.push(ComplexMatrix::identity(d).scale_real(p.sqrt()));
    }
    if p < T::one() {
        let s = (T::one() - p).sqrt();
        for n in 0..d {
            let mut k = ComplexMatrix::zeros(d, d);
            k[(n, n)] = cr(s);
            ops.push(k);
        }
    }
    KrausChannel::new(ops)
}

pub fn make_unitary_channel<T: Real>(u: ComplexMatrix<T>) -> Result<KrausChannel<T>> {
    if !u.is_square() {
        return Err(Error::NotSquare {
            rows: u.rows(),
            cols: u.cols(),
        });
    }
    let residual = u.unitarity_residual();
    if residual > T::unitary_slack() {
        return Err(Error::NotUnitary {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    KrausChannel::new(vec![u])
}

/// Partial-trace helper kept here so callers need not import `matop`.
pub fn reduced_state<T: Real>(
    rho: &DensityMatrix<T>,
    keep: Subsystem,
    dims: (usize, usize),
) -> Result<DensityMatrix<T>> {
    let m = partial_trace(rho.matrix().as_matrix(), keep, dims)?;
    DensityMatrix::new(HermitianMatrix::symmetrized(&m))
}
