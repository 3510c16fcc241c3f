use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::matop::ComplexMatrix;
use crate::quantum::PureState;
use crate::scalar::{cr, Real};

/// Index `(a, b)` of the Heisenberg-Weyl operator `W_{a,b} = X^a Z^b` in
/// dimension `d`, both components reduced mod `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylIndex {
    d: usize,
    a: usize,
    b: usize,
}

impl WeylIndex {
    pub fn new(d: usize, a: i64, b: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(d));
        }
        let m = d as i64;
        Ok(Self {
            d,
            a: a.rem_euclid(m) as usize,
            b: b.rem_euclid(m) as usize,
        })
    }

    /// Inverse of [`WeylIndex::flat`].
    pub fn from_flat(d: usize, flat: usize) -> Self {
        Self {
            d,
            a: (flat / d) % d,
            b: flat % d,
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Lexicographic position `a * d + b`.
    pub fn flat(&self) -> usize {
        self.a * self.d + self.b
    }

    /// All `d^2` indices in lexicographic order.
    pub fn all(d: usize) -> impl Iterator<Item = WeylIndex> {
        (0..d * d).map(move |f| WeylIndex::from_flat(d, f))
    }
}

/// `omega^k` with `omega = exp(2 pi i / d)`; the exponent is reduced mod `d`.
pub fn root_of_unity<T: Real>(d: usize, k: i64) -> Complex<T> {
    let r = k.rem_euclid(d as i64);
    let angle = T::TAU() * T::from_count(r as usize) / T::from_count(d);
    Complex::from_polar(T::one(), angle)
}

/// `W_{a,b} = sum_n omega^{b n} |n + a><n|`.
pub fn weyl<T: Real>(idx: WeylIndex) -> ComplexMatrix<T> {
    let d = idx.d;
    let mut w = ComplexMatrix::zeros(d, d);
    for n in 0..d {
        w[((n + idx.a) % d, n)] = root_of_unity(d, (idx.b * n) as i64);
    }
    w
}

/// `|Phi+> = sum_i |ii> / sqrt(d)`.
pub fn max_entangled<T: Real>(d: usize) -> Result<PureState<T>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let amp = cr(T::one() / T::from_count(d).sqrt());
    let mut v = vec![Complex::zero(); d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    PureState::new(v)
}

/// `(I (x) W_{a,b}) |Phi+>`.
pub fn bell_state<T: Real>(d: usize, a: i64, b: i64) -> Result<PureState<T>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let w = weyl::<T>(WeylIndex::new(d, a, b)?);
    let s = T::one() / T::from_count(d).sqrt();
    // (I (x) W) sum_i |i>|i> = sum_{i,j} W_{ji} |i>|j>
    let v = (0..d * d).map(|f| w[(f % d, f / d)] * s).collect();
    PureState::new(v)
}
