//! Scalar types for the decomposition kernels.
//!
//! The kernels are generic so that the common cases run on machine
//! integers: monic inputs on exact `i128` (a non-integral quotient is a
//! conclusive "no"), everything else on `Ratio<i128>`, and anything that
//! overflows is retried on `BigRational`.

use num::rational::Ratio;
use num::traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub};
use num::{BigInt, BigRational, One, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Fail {
    Overflow,
    /// Exact integer division had a remainder.
    NotIntegral,
}

pub(crate) type Step<T> = Result<T, Fail>;

pub(crate) trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn from_int(v: i128) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Step<Self>;
    fn sub(&self, o: &Self) -> Step<Self>;
    fn mul(&self, o: &Self) -> Step<Self>;
    fn div(&self, o: &Self) -> Step<Self>;
    fn to_big(&self) -> BigRational;

    fn zero() -> Self {
        Self::from_int(0)
    }

    fn one() -> Self {
        Self::from_int(1)
    }
}

impl Scalar for i128 {
    fn from_int(v: i128) -> Self {
        v
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, o: &Self) -> Step<Self> {
        i128::checked_add(*self, *o).ok_or(Fail::Overflow)
    }
    fn sub(&self, o: &Self) -> Step<Self> {
        i128::checked_sub(*self, *o).ok_or(Fail::Overflow)
    }
    fn mul(&self, o: &Self) -> Step<Self> {
        i128::checked_mul(*self, *o).ok_or(Fail::Overflow)
    }
    fn div(&self, o: &Self) -> Step<Self> {
        match self.checked_rem(*o) {
            None => Err(Fail::Overflow),
            Some(0) => i128::checked_div(*self, *o).ok_or(Fail::Overflow),
            Some(_) => Err(Fail::NotIntegral),
        }
    }
    fn to_big(&self) -> BigRational {
        BigRational::from_integer(BigInt::from(*self))
    }
}

impl Scalar for Ratio<i128> {
    fn from_int(v: i128) -> Self {
        Ratio::from_integer(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Step<Self> {
        self.checked_add(o).ok_or(Fail::Overflow)
    }
    fn sub(&self, o: &Self) -> Step<Self> {
        self.checked_sub(o).ok_or(Fail::Overflow)
    }
    fn mul(&self, o: &Self) -> Step<Self> {
        self.checked_mul(o).ok_or(Fail::Overflow)
    }
    fn div(&self, o: &Self) -> Step<Self> {
        if Zero::is_zero(o) {
            return Err(Fail::Overflow);
        }
        self.checked_div(o).ok_or(Fail::Overflow)
    }
    fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
}

// Never fails except on division by zero, which the kernels do not perform.
impl Scalar for BigRational {
    fn from_int(v: i128) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Step<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> Step<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> Step<Self> {
        Ok(self * o)
    }
    fn div(&self, o: &Self) -> Step<Self> {
        if Zero::is_zero(o) {
            return Err(Fail::Overflow);
        }
        Ok(self / o)
    }
    fn to_big(&self) -> BigRational {
        self.clone()
    }
    fn one() -> Self {
        One::one()
    }
}

/// Coefficients `Q_0..Q_{len-1}` of the power series `Q` with `Q_0 = 1`
/// and `Q^m ≡ P (mod t^len)`, given `P_0 = 1`.
///
/// Uses `k·P_0·Q_k = Σ_{j=1..k} ((m+1)·j − m·k)/m · P_j·Q_{k−j}`.
pub(crate) fn series_root<F: Scalar>(p: &[F], m: usize, len: usize) -> Step<Vec<F>> {
    let mut q = Vec::with_capacity(len);
    q.push(F::one());
    let m_i = m as i128;
    for k in 1..len {
        let mut acc = F::zero();
        for j in 1..=k {
            let pj = p.get(j).cloned().unwrap_or_else(F::zero);
            if pj.is_zero() {
                continue;
            }
            let w = (m_i + 1) * j as i128 - m_i * k as i128;
            acc = acc.add(&F::from_int(w).mul(&pj)?.mul(&q[k - j])?)?;
        }
        q.push(acc.div(&F::from_int(m_i * k as i128))?);
    }
    Ok(q)
}

/// Quotient and remainder of `num` by a monic `divisor` of degree `n >= 1`.
pub(crate) fn divmod_monic<F: Scalar>(num: &[F], divisor: &[F]) -> Step<(Vec<F>, Vec<F>)> {
    let n = divisor.len() - 1;
    let mut r = num.to_vec();
    if r.len() <= n {
        return Ok((Vec::new(), r));
    }
    let mut q = vec![F::zero(); r.len() - n];
    for i in (0..q.len()).rev() {
        let c = r[i + n].clone();
        if !c.is_zero() {
            for j in 0..n {
                r[i + j] = r[i + j].sub(&c.mul(&divisor[j])?)?;
            }
        }
        r[i + n] = F::zero();
        q[i] = c;
    }
    r.truncate(n);
    Ok((q, r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_integer_division() {
        assert_eq!(6i128.div(&3), Ok(2));
        assert_eq!(7i128.div(&3), Err(Fail::NotIntegral));
        assert_eq!(i128::MIN.div(&-1), Err(Fail::Overflow));
    }

    #[test]
    fn square_root_series() {
        // (1 + t)^2 = 1 + 2t + t^2
        let q = series_root::<i128>(&[1, 2, 1], 2, 3).unwrap();
        assert_eq!(q, vec![1, 1, 0]);
        // 1 + t has no integral square root series
        assert_eq!(series_root::<i128>(&[1, 1], 2, 2), Err(Fail::NotIntegral));
        let half = series_root::<Ratio<i128>>(&[Ratio::from_integer(1), Ratio::from_integer(1)], 2, 2).unwrap();
        assert_eq!(half[1], Ratio::new(1, 2));
    }

    #[test]
    fn cube_root_series() {
        // (1 + 2t - t^2)^3 truncated to 4 terms: 1 + 6t + 9t^2 - 4t^3
        let q = series_root::<i128>(&[1, 6, 9, -4], 3, 4).unwrap();
        assert_eq!(q, vec![1, 2, -1, 0]);
    }

    #[test]
    fn monic_division() {
        // x^4 + x = x^2 · x^2 + x
        let (q, r) = divmod_monic::<i128>(&[0, 1, 0, 0, 1], &[0, 0, 1]).unwrap();
        assert_eq!(q, vec![0, 0, 1]);
        assert_eq!(r, vec![0, 1]);
    }
}
