//! Dense univariate polynomials over the integers.
//!
//! Coefficients are stored in ascending order of degree as `i128`. Every
//! arithmetic operation is checked: an intermediate that does not fit the
//! working width surfaces as [`PolyError::Overflow`] instead of wrapping.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, Integer, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("operation is undefined for the zero polynomial")]
    ZeroPolynomial,
    #[error("integer overflow in polynomial arithmetic")]
    Overflow,
    #[error("degree {found} is below the required minimum {required}")]
    DegreeTooSmall { found: usize, required: usize },
    #[error("linear shift must have unit slope, got {0}")]
    NonUnitShift(i128),
}

pub type Result<T> = std::result::Result<T, PolyError>;

/// An integer polynomial `c[0] + c[1] x + ... + c[d] x^d` with `c[d] != 0`.
///
/// The zero polynomial is the empty coefficient vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntPoly {
    coeffs: Vec<i128>,
}

impl IntPoly {
    /// Builds a polynomial from ascending coefficients, dropping trailing zeros.
    pub fn new(mut coeffs: Vec<i128>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: i128) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: i128, k: usize) -> Self {
        let mut coeffs = vec![0; k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn x() -> Self {
        Self::monomial(1, 1)
    }

    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<i128> {
        self.coeffs
    }

    /// Coefficient of `x^k`, zero beyond the degree.
    pub fn coeff(&self, k: usize) -> i128 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<i128> {
        self.coeffs.last().copied()
    }

    pub fn is_monic(&self) -> bool {
        self.lead() == Some(1)
    }

    /// Maximum absolute value of the coefficients.
    pub fn height(&self) -> Result<u128> {
        self.coeffs
            .iter()
            .map(|c| c.unsigned_abs())
            .max()
            .ok_or(PolyError::ZeroPolynomial)
    }

    /// Sum of absolute values of the coefficients, as a float.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.iter().map(|&c| (c as f64).abs()).sum()
    }

    /// Non-negative gcd of the coefficients; zero for the zero polynomial.
    pub fn content(&self) -> u128 {
        self.coeffs
            .iter()
            .fold(0u128, |acc, c| acc.gcd(&c.unsigned_abs()))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            out.push(
                self.coeff(k)
                    .checked_add(other.coeff(k))
                    .ok_or(PolyError::Overflow)?,
            );
        }
        Ok(Self::new(out))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.checked_neg()?)
    }

    pub fn checked_neg(&self) -> Result<Self> {
        self.checked_scale(-1)
    }

    pub fn checked_scale(&self, c: i128) -> Result<Self> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| a.checked_mul(c).ok_or(PolyError::Overflow))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(coeffs))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero());
        }
        let mut out = vec![0i128; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                let p = a.checked_mul(b).ok_or(PolyError::Overflow)?;
                out[i + j] = out[i + j].checked_add(p).ok_or(PolyError::Overflow)?;
            }
        }
        Ok(Self::new(out))
    }

    pub fn checked_pow(&self, e: u32) -> Result<Self> {
        let mut acc = Self::constant(1);
        for _ in 0..e {
            acc = acc.checked_mul(self)?;
        }
        Ok(acc)
    }

    /// `self ∘ inner`, i.e. `self(inner(x))`.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        compose(self, inner)
    }

    /// Exact Horner evaluation at an integer.
    pub fn evaluate(&self, t: i128) -> Result<i128> {
        self.coeffs.iter().rev().try_fold(0i128, |acc, &c| {
            acc.checked_mul(t)
                .and_then(|v| v.checked_add(c))
                .ok_or(PolyError::Overflow)
        })
    }

    /// Exact Horner evaluation at a rational.
    pub fn evaluate_rational(&self, t: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, &c| {
            acc * t + BigRational::from_integer(BigInt::from(c))
        })
    }

    /// `self(-x)`.
    pub fn reflect(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 1 { -c } else { c })
            .collect();
        Self::new(coeffs)
    }
}

/// `g ∘ h` by Horner's scheme in the outer polynomial.
///
/// The result has degree `deg g * deg h` and leading coefficient
/// `lead(g) * lead(h)^deg(g)` whenever both inputs are nonzero.
pub fn compose(g: &IntPoly, h: &IntPoly) -> Result<IntPoly> {
    if g.is_zero() || h.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let mut acc = IntPoly::zero();
    for &c in g.coeffs.iter().rev() {
        acc = acc.checked_mul(h)?.checked_add(&IntPoly::constant(c))?;
    }
    Ok(acc)
}

/// The affine map `x ↦ u·x + v` with `u = ±1`.
///
/// These are exactly the linear polynomials invertible over the integers,
/// so `g ∘ λ` and `λ⁻¹ ∘ h` stay integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LinearShift {
    u: i128,
    v: i128,
}

impl LinearShift {
    pub fn new(u: i128, v: i128) -> Result<Self> {
        if u != 1 && u != -1 {
            return Err(PolyError::NonUnitShift(u));
        }
        Ok(Self { u, v })
    }

    pub fn identity() -> Self {
        Self { u: 1, v: 0 }
    }

    pub fn slope(&self) -> i128 {
        self.u
    }

    pub fn offset(&self) -> i128 {
        self.v
    }

    pub fn as_poly(&self) -> IntPoly {
        IntPoly::new(vec![self.v, self.u])
    }

    /// The inverse map `x ↦ u·x − u·v`.
    pub fn inverse(&self) -> Result<Self> {
        let v = self.v.checked_mul(self.u).ok_or(PolyError::Overflow)?;
        Ok(Self {
            u: self.u,
            v: v.checked_neg().ok_or(PolyError::Overflow)?,
        })
    }
}

/// Moves the constant term and sign of `h` into `g`.
///
/// Returns `(g₁, h₁)` with `h₁(0) = 0`, `lead(h₁) > 0` and `g₁ ∘ h₁ = g ∘ h`.
/// With `λ(x) = u·x + h(0)` and `u = sign(lead h)` this is
/// `h₁ = λ⁻¹ ∘ h`, `g₁ = g ∘ λ`.
pub fn shift_pair(g: &IntPoly, h: &IntPoly) -> Result<(IntPoly, IntPoly)> {
    for p in [g, h] {
        match p.degree() {
            None => return Err(PolyError::ZeroPolynomial),
            Some(0) => return Err(PolyError::DegreeTooSmall { found: 0, required: 1 }),
            Some(_) => {}
        }
    }
    let lead = h.lead().ok_or(PolyError::ZeroPolynomial)?;
    let shift = LinearShift::new(lead.signum(), h.coeff(0))?;
    let h1 = shift.inverse()?.as_poly().compose(h)?;
    let g1 = g.compose(&shift.as_poly())?;
    Ok((g1, h1))
}

impl fmt::Display for IntPoly {
    /// Ascending comma-separated coefficients; `0` for the zero polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for IntPoly {
    type Err = crate::text::ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        crate::text::parse_poly(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i128]) -> IntPoly {
        IntPoly::new(c.to_vec())
    }

    #[test]
    fn compose_monomials() {
        let x2 = IntPoly::monomial(1, 2);
        assert_eq!(compose(&x2, &x2).unwrap(), IntPoly::monomial(1, 4));
    }

    #[test]
    fn compose_quartic_family_member() {
        // (x^2 + 2x + 5) ∘ (x^2 + x)
        let f = compose(&p(&[5, 2, 1]), &p(&[0, 1, 1])).unwrap();
        assert_eq!(f, p(&[5, 2, 3, 2, 1]));
    }

    #[test]
    fn compose_with_power_inner() {
        let g = p(&[7, -3, 4, 1]);
        for n in 1..5usize {
            let f = compose(&g, &IntPoly::monomial(1, n)).unwrap();
            let mut expect = vec![0; 3 * n + 1];
            expect[0] = 7;
            expect[n] = -3;
            expect[2 * n] = 4;
            expect[3 * n] = 1;
            assert_eq!(f, IntPoly::new(expect));
        }
    }

    #[test]
    fn compose_rejects_zero() {
        assert_eq!(compose(&IntPoly::zero(), &IntPoly::x()), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn compose_reports_overflow() {
        let big = p(&[0, 1 << 40]);
        let g = IntPoly::monomial(1, 4);
        assert_eq!(compose(&g, &big), Err(PolyError::Overflow));
    }

    #[test]
    fn heights() {
        assert_eq!(p(&[5, 2, 3, 2, 1]).height().unwrap(), 5);
        assert_eq!(p(&[3, 0, -7]).height().unwrap(), 7);
        assert_eq!(IntPoly::monomial(1, 9).height().unwrap(), 1);
        assert_eq!(IntPoly::zero().height(), Err(PolyError::ZeroPolynomial));
    }

    #[test]
    fn evaluation() {
        assert_eq!(p(&[0, 1, 1]).evaluate(2).unwrap(), 6);
        assert_eq!(p(&[5]).evaluate(-123).unwrap(), 5);
        assert_eq!(p(&[0, -1, 0, 1]).evaluate(-1).unwrap(), 0);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(
            p(&[0, 1, 1]).evaluate_rational(&half),
            BigRational::new(3.into(), 4.into())
        );
    }

    #[test]
    fn shift_pair_moves_constant() {
        let (g1, h1) = shift_pair(&p(&[0, 0, 1]), &p(&[1, 0, 1])).unwrap();
        assert_eq!(g1, p(&[1, 2, 1]));
        assert_eq!(h1, p(&[0, 0, 1]));
        assert_eq!(compose(&g1, &h1).unwrap(), p(&[1, 0, 2, 0, 1]));
    }

    #[test]
    fn shift_pair_flips_sign() {
        let g = p(&[0, 0, 1]);
        let h = p(&[0, 1, -1]);
        let (g1, h1) = shift_pair(&g, &h).unwrap();
        assert_eq!(h1, p(&[0, -1, 1]));
        assert_eq!(g1, p(&[0, 0, 1]));
        assert_eq!(compose(&g1, &h1).unwrap(), compose(&g, &h).unwrap());
    }

    #[test]
    fn shift_pair_identity_on_normalized() {
        let g = p(&[3, -1, 2]);
        let h = p(&[0, 4, 2]);
        assert_eq!(shift_pair(&g, &h).unwrap(), (g, h));
    }

    #[test]
    fn shift_pair_rejects_constants() {
        assert!(matches!(
            shift_pair(&p(&[1, 1]), &p(&[3])),
            Err(PolyError::DegreeTooSmall { .. })
        ));
    }

    #[test]
    fn linear_shift_validation() {
        assert_eq!(LinearShift::new(2, 0), Err(PolyError::NonUnitShift(2)));
        let s = LinearShift::new(-1, 5).unwrap();
        let back = s.inverse().unwrap().as_poly().compose(&s.as_poly()).unwrap();
        assert_eq!(back, IntPoly::x());
    }

    #[test]
    fn display_round_trip() {
        let f = p(&[5, -2, 0, 1]);
        assert_eq!(f.to_string(), "5,-2,0,1");
        assert_eq!("5,-2,0,1".parse::<IntPoly>().unwrap(), f);
        assert_eq!(IntPoly::zero().to_string(), "0");
    }

    fn small_poly(max_deg: usize) -> impl Strategy<Value = IntPoly> {
        prop::collection::vec(-50i128..=50, 1..=max_deg + 1)
            .prop_map(IntPoly::new)
            .prop_filter("nonconstant", |f| f.degree().unwrap_or(0) >= 1)
    }

    proptest! {
        #[test]
        fn compose_degree_and_lead(g in small_poly(4), h in small_poly(3)) {
            let f = compose(&g, &h).unwrap();
            let m = g.degree().unwrap();
            prop_assert_eq!(f.degree().unwrap(), m * h.degree().unwrap());
            prop_assert_eq!(f.lead().unwrap(), g.lead().unwrap() * h.lead().unwrap().pow(m as u32));
        }

        #[test]
        fn shift_pair_preserves_composition(g in small_poly(3), h in small_poly(3)) {
            let (g1, h1) = shift_pair(&g, &h).unwrap();
            prop_assert_eq!(h1.coeff(0), 0);
            prop_assert!(h1.lead().unwrap() > 0);
            prop_assert_eq!(compose(&g1, &h1).unwrap(), compose(&g, &h).unwrap());
        }

        #[test]
        fn height_is_homogeneous(f in small_poly(6), c in -30i128..=30) {
            prop_assume!(c != 0);
            let scaled = f.checked_scale(c).unwrap();
            prop_assert_eq!(scaled.height().unwrap(), c.unsigned_abs() * f.height().unwrap());
        }

        #[test]
        fn evaluation_commutes_with_composition(g in small_poly(3), h in small_poly(3), t in -6i128..=6) {
            let f = compose(&g, &h).unwrap();
            prop_assert_eq!(f.evaluate(t).unwrap(), g.evaluate(h.evaluate(t).unwrap()).unwrap());
        }
    }
}
