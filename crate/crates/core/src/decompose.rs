//! Functional decomposition of integer polynomials.
//!
//! For a split `d = m·n`, a decomposition `f = g ∘ h` with `h` monic and
//! `h(0) = 0` is unique over the rationals when it exists. Its inner part is
//! read off the top `n` coefficients of `f` (`rev(f)/lead(f)` is the `m`-th
//! power of `rev(h)` modulo `t^n`), and `f` is a composition through that
//! `h` exactly when every digit of the `h`-adic expansion of `f` is a
//! constant. A rational witness is then rescaled to the integer witness with
//! primitive `h`; decomposability over ℤ and over ℂ coincide for integer
//! polynomials, so that rescaling always lands in `ℤ[x]`.

use std::fmt;

use num::rational::Ratio;
use num::{BigInt, BigRational, Integer, One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::field::{divmod_monic, series_root, Fail, Scalar, Step};
use crate::poly::{IntPoly, PolyError};

/// An ordered factorisation `d = outer · inner` with both factors at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Split {
    /// Degree of the outer polynomial `g`.
    pub outer: usize,
    /// Degree of the inner polynomial `h`.
    pub inner: usize,
}

impl Split {
    pub fn new(outer: usize, inner: usize) -> Self {
        Self { outer, inner }
    }

    pub fn degree(&self) -> usize {
        self.outer * self.inner
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.outer, self.inner)
    }
}

/// Every ordered split of `d`, sorted by increasing inner degree.
pub fn splits_of(d: usize) -> Vec<Split> {
    (2..d)
        .filter(|n| d.is_multiple_of(*n) && d / n >= 2)
        .map(|n| Split::new(d / n, n))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("polynomial of degree {degree:?} does not match split {split}")]
    DegreeMismatch { degree: Option<usize>, split: Split },
    #[error("split {0} is invalid: both degrees must be at least 2")]
    InvalidSplit(Split),
    #[error("inner polynomial must be monic of degree at least 1")]
    BadInner,
    #[error("rational witness found but integer normalization failed for {0}")]
    Normalization(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A polynomial with exact rational coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// True for constants, including zero.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(Zero::zero)
    }

    fn from_scalars<F: Scalar>(v: &[F]) -> Self {
        Self::new(v.iter().map(Scalar::to_big).collect())
    }
}

impl From<&IntPoly> for RatPoly {
    fn from(p: &IntPoly) -> Self {
        Self::new(p.coeffs().iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }
}

impl fmt::Display for RatPoly {
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

/// A normalized witness `f = g ∘ h`: `h(0) = 0`, `lead(h) > 0` and `h`
/// primitive. For monic `f` both parts are monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decomposition {
    pub g: IntPoly,
    pub h: IntPoly,
    pub split: Split,
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g = {} ; h = {}", self.g, self.h)
    }
}

fn check_split(degree: Option<usize>, split: Split) -> Result<(), DecomposeError> {
    if split.outer < 2 || split.inner < 2 {
        return Err(DecomposeError::InvalidSplit(split));
    }
    if degree != Some(split.degree()) {
        return Err(DecomposeError::DegreeMismatch { degree, split });
    }
    Ok(())
}

/// Monic inner candidate with zero constant term, from the top coefficients.
fn inner_candidate<F: Scalar>(f: &[i128], m: usize, n: usize) -> Step<Vec<F>> {
    let d = m * n;
    let lead = F::from_int(f[d]);
    let mut p = Vec::with_capacity(n);
    for k in 0..n {
        p.push(F::from_int(f[d - k]).div(&lead)?);
    }
    let q = series_root(&p, m, n)?;
    let mut h = vec![F::zero(); n + 1];
    for (k, qk) in q.into_iter().enumerate() {
        h[n - k] = qk;
    }
    Ok(h)
}

/// Digits of the `h`-adic expansion; with `stop_early` returns `None` at the
/// first non-constant digit.
fn hadic<F: Scalar>(f: Vec<F>, h: &[F], stop_early: bool) -> Step<Option<Vec<Vec<F>>>> {
    let n = h.len() - 1;
    let mut digits = Vec::new();
    let mut cur = f;
    while cur.len() > n {
        let (q, r) = divmod_monic(&cur, h)?;
        if stop_early && r.iter().skip(1).any(|c| !c.is_zero()) {
            return Ok(None);
        }
        digits.push(r);
        cur = q;
    }
    digits.push(cur);
    Ok(Some(digits))
}

/// Rational witness `(g, h)` with `h` monic, `h(0) = 0`, if one exists.
fn rational_witness<F: Scalar>(f: &[i128], m: usize, n: usize) -> Step<Option<(Vec<F>, Vec<F>)>> {
    let h = inner_candidate::<F>(f, m, n)?;
    let fv: Vec<F> = f.iter().map(|&c| F::from_int(c)).collect();
    Ok(hadic(fv, &h, true)?.map(|digits| {
        let g = digits
            .into_iter()
            .map(|c| c.into_iter().next().unwrap_or_else(F::zero))
            .collect();
        (g, h)
    }))
}

const SMALL: u128 = 1 << 62;

/// Runs the witness search on the cheapest scalar type that can carry it.
fn witness_big(f: &[i128], m: usize, n: usize) -> Option<(Vec<BigRational>, Vec<BigRational>)> {
    let small = f.iter().all(|c| c.unsigned_abs() <= SMALL);
    if small && f[m * n] == 1 {
        match rational_witness::<i128>(f, m, n) {
            Ok(w) => return w.map(|(g, h)| (to_big(&g), to_big(&h))),
            Err(Fail::NotIntegral) => return None,
            Err(Fail::Overflow) => {}
        }
    }
    if small {
        if let Ok(w) = rational_witness::<Ratio<i128>>(f, m, n) {
            return w.map(|(g, h)| (to_big(&g), to_big(&h)));
        }
    }
    // BigRational arithmetic cannot fail here: the only divisors are the
    // nonzero leading coefficient and the positive integers m·k.
    rational_witness::<BigRational>(f, m, n).ok().flatten()
}

fn to_big<F: Scalar>(v: &[F]) -> Vec<BigRational> {
    v.iter().map(Scalar::to_big).collect()
}

/// Fast yes/no test on a raw coefficient slice of length `m·n + 1`.
pub(crate) fn split_exists(f: &[i128], m: usize, n: usize) -> bool {
    debug_assert_eq!(f.len(), m * n + 1);
    let small = f.iter().all(|c| c.unsigned_abs() <= SMALL);
    if small && f[m * n] == 1 {
        match rational_witness::<i128>(f, m, n) {
            Ok(w) => return w.is_some(),
            Err(Fail::NotIntegral) => return false,
            Err(Fail::Overflow) => {}
        }
    }
    if small {
        if let Ok(w) = rational_witness::<Ratio<i128>>(f, m, n) {
            return w.is_some();
        }
    }
    witness_big(f, m, n).is_some()
}

/// Decomposability test on a raw coefficient slice (trailing entry nonzero).
pub(crate) fn is_decomposable_coeffs(f: &[i128]) -> bool {
    let d = f.len().saturating_sub(1);
    splits_of(d).iter().any(|s| split_exists(f, s.outer, s.inner))
}

/// The monic rational inner candidate for `split`: the unique `h` with
/// `h(0) = 0`, `h` monic of degree `n`, whose `m`-th power scaled by
/// `lead(f)` matches `f` in the coefficients of `x^{d-1}, ..., x^{d-n+1}`.
pub fn candidate_h(f: &IntPoly, split: Split) -> Result<RatPoly, DecomposeError> {
    check_split(f.degree(), split)?;
    let h = inner_candidate::<BigRational>(f.coeffs(), split.outer, split.inner)
        .map_err(|_| DecomposeError::Normalization(f.to_string()))?;
    Ok(RatPoly::from_scalars(&h))
}

/// Digits `c_0, ..., c_k` with `f = Σ c_i·h^i` and `deg c_i < deg h`.
pub fn hadic_coefficients(f: &IntPoly, h: &RatPoly) -> Result<Vec<RatPoly>, DecomposeError> {
    match h.degree() {
        Some(n) if n >= 1 && h.coeffs[n].is_one() => {}
        _ => return Err(DecomposeError::BadInner),
    }
    let fv: Vec<BigRational> = RatPoly::from(f).coeffs;
    let digits = hadic(fv, &h.coeffs, false)
        .ok()
        .flatten()
        .ok_or(DecomposeError::BadInner)?;
    Ok(digits.iter().map(|c| RatPoly::from_scalars(c)).collect())
}

fn big_to_i128(v: &BigRational, f: &IntPoly) -> Result<i128, DecomposeError> {
    if !v.is_integer() {
        return Err(DecomposeError::Normalization(f.to_string()));
    }
    v.to_integer().to_i128().ok_or(DecomposeError::Poly(PolyError::Overflow))
}

/// Rescales a rational witness (monic `h`) to the integer witness with
/// primitive `h`: `h_int = h / c`, `g_int(x) = g(c·x)` for `c = content(h)`.
fn normalize(f: &IntPoly, g: &[BigRational], h: &[BigRational], split: Split) -> Result<Decomposition, DecomposeError> {
    let num_gcd = h.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()));
    let den_lcm = h.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let content = BigRational::new(num_gcd, den_lcm);
    let h_int = h
        .iter()
        .map(|c| big_to_i128(&(c / &content), f))
        .collect::<Result<Vec<_>, _>>()?;
    let mut scale = <BigRational as One>::one();
    let mut g_int = Vec::with_capacity(g.len());
    for c in g {
        g_int.push(big_to_i128(&(c * &scale), f)?);
        scale *= &content;
    }
    let w = Decomposition {
        g: IntPoly::new(g_int),
        h: IntPoly::new(h_int),
        split,
    };
    if w.h.lead().is_some_and(|l| l <= 0) || w.g.compose(&w.h)? != *f {
        return Err(DecomposeError::Normalization(f.to_string()));
    }
    Ok(w)
}

/// The normalized witness for `split`, or `None` when `f` is not a
/// composition with those degrees.
pub fn decompose_split(f: &IntPoly, split: Split) -> Result<Option<Decomposition>, DecomposeError> {
    check_split(f.degree(), split)?;
    match witness_big(f.coeffs(), split.outer, split.inner) {
        None => Ok(None),
        Some((g, h)) => normalize(f, &g, &h, split).map(Some),
    }
}

/// True iff `f` is a composition of two polynomials of degree at least 2.
/// Prime and sub-quadratic degrees are never decomposable.
pub fn is_decomposable(f: &IntPoly) -> bool {
    is_decomposable_coeffs(f.coeffs())
}

/// Writes `f = f_1 ∘ f_2 ∘ ... ∘ f_k` with indecomposable factors, listed
/// outermost first. The innermost factor is peeled with the smallest
/// possible degree at each step, which makes it indecomposable.
pub fn full_decomposition(f: &IntPoly) -> Result<Vec<IntPoly>, DecomposeError> {
    let mut inner_factors = Vec::new();
    let mut outer = f.clone();
    'peel: loop {
        for split in splits_of(outer.degree().unwrap_or(0)) {
            if let Some(w) = decompose_split(&outer, split)? {
                inner_factors.push(w.h);
                outer = w.g;
                continue 'peel;
            }
        }
        break;
    }
    let mut chain = vec![outer];
    chain.extend(inner_factors.into_iter().rev());
    Ok(chain)
}

/// `|lead(g)|·H(h)^m`, the left side of the Lemma-type height bound.
pub fn outer_lead_times_inner_height(w: &Decomposition) -> Result<BigInt, DecomposeError> {
    let a = BigInt::from(w.g.lead().ok_or(PolyError::ZeroPolynomial)?).abs();
    let hh = BigInt::from(w.h.height()?);
    Ok(a * num::pow(hh, w.split.outer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::compose;
    use proptest::prelude::*;

    fn p(c: &[i128]) -> IntPoly {
        IntPoly::new(c.to_vec())
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn split_listing() {
        assert_eq!(splits_of(4), vec![Split::new(2, 2)]);
        assert_eq!(splits_of(6), vec![Split::new(3, 2), Split::new(2, 3)]);
        assert_eq!(splits_of(7), vec![]);
        assert_eq!(splits_of(12).len(), 4);
    }

    #[test]
    fn candidates() {
        let h = candidate_h(&p(&[5, 2, 3, 2, 1]), Split::new(2, 2)).unwrap();
        assert_eq!(h, RatPoly::new(vec![r(0, 1), r(1, 1), r(1, 1)]));
        let h = candidate_h(&p(&[0, 1, 0, 0, 1]), Split::new(2, 2)).unwrap();
        assert_eq!(h, RatPoly::new(vec![r(0, 1), r(0, 1), r(1, 1)]));
        let f = compose(&p(&[0, 1, 1]), &p(&[0, 1, 0, 1])).unwrap();
        assert_eq!(f, p(&[0, 1, 1, 1, 2, 0, 1]));
        let h = candidate_h(&f, Split::new(2, 3)).unwrap();
        assert_eq!(h, RatPoly::new(vec![r(0, 1), r(1, 1), r(0, 1), r(1, 1)]));
    }

    #[test]
    fn candidate_may_be_fractional() {
        // 4x^4 + 4x^3 + x^2 = (2x^2 + x)^2; monic inner is x^2 + x/2
        let h = candidate_h(&p(&[0, 0, 1, 4, 4]), Split::new(2, 2)).unwrap();
        assert_eq!(h.coeff(1), r(1, 2));
    }

    #[test]
    fn candidate_rejects_bad_degree() {
        assert!(matches!(
            candidate_h(&p(&[1, 2, 3]), Split::new(2, 2)),
            Err(DecomposeError::DegreeMismatch { .. })
        ));
        assert!(matches!(
            candidate_h(&p(&[1, 2, 3]), Split::new(1, 2)),
            Err(DecomposeError::InvalidSplit(_))
        ));
    }

    #[test]
    fn hadic_digits() {
        let h = RatPoly::from(&p(&[0, 1, 1]));
        let digits = hadic_coefficients(&p(&[5, 2, 3, 2, 1]), &h).unwrap();
        let consts: Vec<_> = digits.iter().map(|c| c.coeff(0)).collect();
        assert!(digits.iter().all(RatPoly::is_constant));
        assert_eq!(consts, vec![r(5, 1), r(2, 1), r(1, 1)]);

        let h = RatPoly::from(&p(&[0, 0, 1]));
        let digits = hadic_coefficients(&p(&[0, 1, 0, 0, 1]), &h).unwrap();
        assert_eq!(digits[0], RatPoly::from(&p(&[0, 1])));
        assert_eq!(digits[1], RatPoly::new(vec![]));
        assert_eq!(digits[2], RatPoly::from(&p(&[1])));

        let h = RatPoly::from(&p(&[0, 3, 1]));
        let digits = hadic_coefficients(&p(&[0, 3, 1]), &h).unwrap();
        assert_eq!(digits, vec![RatPoly::new(vec![]), RatPoly::from(&p(&[1]))]);

        assert_eq!(
            hadic_coefficients(&p(&[1, 2]), &RatPoly::from(&p(&[0, 2]))),
            Err(DecomposeError::BadInner)
        );
    }

    #[test]
    fn split_witnesses() {
        let w = decompose_split(&p(&[5, 2, 3, 2, 1]), Split::new(2, 2)).unwrap().unwrap();
        assert_eq!((w.g.clone(), w.h.clone()), (p(&[5, 2, 1]), p(&[0, 1, 1])));
        assert_eq!(w.to_string(), "g = 5,2,1 ; h = 0,1,1");

        assert_eq!(decompose_split(&p(&[0, 1, 0, 0, 1]), Split::new(2, 2)).unwrap(), None);

        let w = decompose_split(&p(&[1, 0, 4, 0, 4]), Split::new(2, 2)).unwrap().unwrap();
        assert_eq!((w.g, w.h), (p(&[1, 4, 4]), p(&[0, 0, 1])));
    }

    #[test]
    fn non_monic_witness_uses_primitive_inner() {
        // 4x^4 = x^2 ∘ 2x^2 = 4x^2 ∘ x^2; the primitive inner wins.
        let w = decompose_split(&IntPoly::monomial(4, 4), Split::new(2, 2)).unwrap().unwrap();
        assert_eq!((w.g, w.h), (IntPoly::monomial(4, 2), IntPoly::monomial(1, 2)));
        // (2x^2 + x)^2: monic inner x^2 + x/2 rescales to 2x^2 + x.
        let w = decompose_split(&p(&[0, 0, 1, 4, 4]), Split::new(2, 2)).unwrap().unwrap();
        assert_eq!((w.g, w.h), (IntPoly::monomial(1, 2), p(&[0, 1, 2])));
    }

    #[test]
    fn decomposability() {
        assert!(is_decomposable(&IntPoly::monomial(1, 4)));
        assert!(!is_decomposable(&p(&[0, 1, 0, 0, 1])));
        assert!(!is_decomposable(&p(&[3, 1, 4, 1, 5, 9])));
        assert!(!is_decomposable(&IntPoly::monomial(1, 5)));
        assert!(!is_decomposable(&p(&[1, 1])));
    }

    #[test]
    fn huge_coefficients_take_the_bignum_route() {
        let h = p(&[0, 1 << 50, 1]);
        let g = p(&[0, 0, 1]);
        let f = compose(&g, &h).unwrap();
        let w = decompose_split(&f, Split::new(2, 2)).unwrap().unwrap();
        assert_eq!((w.g, w.h), (g, h));
    }

    #[test]
    fn full_decompositions() {
        let x2 = IntPoly::monomial(1, 2);
        assert_eq!(full_decomposition(&IntPoly::monomial(1, 8)).unwrap(), vec![x2.clone(), x2.clone(), x2]);
        assert_eq!(
            full_decomposition(&p(&[5, 2, 3, 2, 1])).unwrap(),
            vec![p(&[5, 2, 1]), p(&[0, 1, 1])]
        );
        let f = p(&[0, 1, 0, 0, 1]);
        assert_eq!(full_decomposition(&f).unwrap(), vec![f]);
    }

    fn normalized_pair(m: usize, n: usize, monic: bool) -> impl Strategy<Value = (IntPoly, IntPoly)> {
        let g = prop::collection::vec(-9i128..=9, m + 1);
        let h = prop::collection::vec(-9i128..=9, n + 1);
        (g, h).prop_map(move |(mut g, mut h)| {
            h[0] = 0;
            if monic {
                g[m] = 1;
                h[n] = 1;
            } else {
                g[m] = if g[m] == 0 { 1 } else { g[m] };
                h[n] = h[n].abs().max(1);
            }
            (IntPoly::new(g), IntPoly::new(h))
        })
    }

    proptest! {
        #[test]
        fn monic_round_trip((g, h) in normalized_pair(3, 2, true)) {
            let f = compose(&g, &h).unwrap();
            let w = decompose_split(&f, Split::new(3, 2)).unwrap().unwrap();
            prop_assert_eq!((w.g, w.h), (g, h));
        }

        #[test]
        fn non_monic_round_trip((g, h) in normalized_pair(2, 3, false)) {
            let f = compose(&g, &h).unwrap();
            let w = decompose_split(&f, Split::new(2, 3)).unwrap().unwrap();
            prop_assert_eq!(w.g.compose(&w.h).unwrap(), f);
            prop_assert_eq!(w.h.content(), 1);
            prop_assert_eq!(w.h.coeff(0), 0);
        }

        #[test]
        fn full_decomposition_composes_back(
            (g, h) in normalized_pair(2, 2, false),
            (g2, _) in normalized_pair(2, 2, true),
        ) {
            let f = compose(&g2, &compose(&g, &h).unwrap()).unwrap();
            let chain = full_decomposition(&f).unwrap();
            let mut acc = chain.last().unwrap().clone();
            for outer in chain.iter().rev().skip(1) {
                acc = outer.compose(&acc).unwrap();
            }
            prop_assert_eq!(acc, f);
            prop_assert!(chain.iter().all(|c| !is_decomposable(c)));
        }
    }
}
