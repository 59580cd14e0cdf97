//! Complex roots, Mahler measure, and the height/measure inequalities.
//!
//! `M(f) = |a_d|·Π max(1, |α_i|)` over the complex roots `α_i` of `f`.
//! Roots come from Aberth–Ehrlich simultaneous iteration in `f64`.

use num::complex::Complex64;
use num::{BigInt, BigRational, ToPrimitive, Zero};
use thiserror::Error;

use crate::census::{explicit_constants, Split};
use crate::poly::{compose, IntPoly, PolyError};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;
/// Relative tolerance for the height/measure chain and the composition bounds.
pub const CHAIN_TOL: f64 = 1e-9;
/// Relative tolerance for `M(gh) = M(g)·M(h)`.
pub const PRODUCT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MahlerError {
    #[error("polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("root finding did not converge in {iterations} iterations (worst relative residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        best: Vec<Complex64>,
        residual: f64,
    },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

pub type Result<T> = std::result::Result<T, MahlerError>;

#[derive(Debug, Clone, PartialEq)]
pub struct MahlerResult {
    /// All `deg f` roots, repeated by multiplicity.
    pub roots: Vec<Complex64>,
    /// `|f(α)| / (‖f‖₁·max(1, |α|)^d)` for each root.
    pub residuals: Vec<f64>,
    pub measure: f64,
    /// Every entry of `residuals` is at most this.
    pub residual_bound: f64,
}

struct Dense {
    coeffs: Vec<f64>,
    norm: f64,
}

impl Dense {
    fn new(coeffs: &[i128]) -> Self {
        Self::from_floats(coeffs.iter().map(|&c| c as f64).collect())
    }

    fn from_floats(coeffs: Vec<f64>) -> Self {
        let norm = coeffs.iter().map(|c| c.abs()).sum();
        Self { coeffs, norm }
    }

    fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn eval(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    fn relative_residual(&self, z: Complex64) -> f64 {
        let (p, _) = self.eval(z);
        p.norm() / (self.norm * z.norm().max(1.0).powi(self.degree() as i32))
    }
}

fn aberth(f: &Dense, radius: f64, tol: f64) -> Result<Vec<Complex64>> {
    let n = f.degree();
    // Offset the starting angle so conjugate-symmetric inputs do not pin
    // guesses to the real axis.
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, (2.0 * std::f64::consts::PI * k as f64 + 0.7) / n as f64))
        .collect();
    let worst = |z: &[Complex64]| z.iter().map(|&r| f.relative_residual(r)).fold(0.0, f64::max);
    let mut polish = 0;
    for _ in 0..MAX_ITERATIONS {
        for i in 0..n {
            let (p, dp) = f.eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let newton = if dp.norm() == 0.0 {
                // stationary point: nudge off it
                Complex64::new(1e-8 * z[i].norm().max(1.0), 1e-8)
            } else {
                p / dp
            };
            let repel: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let denom = Complex64::new(1.0, 0.0) - newton * repel;
            let step = if denom.norm() == 0.0 { newton } else { newton / denom };
            if step.is_finite() {
                z[i] -= step;
            }
        }
        if worst(&z) <= tol {
            // a couple of extra sweeps tighten roots well past the residual test
            polish += 1;
            if polish > 2 {
                return Ok(z);
            }
        }
    }
    let residual = worst(&z);
    if residual <= tol {
        return Ok(z);
    }
    Err(MahlerError::NoConvergence { iterations: MAX_ITERATIONS, best: z, residual })
}

const MODULUS: u128 = (1 << 61) - 1;

fn mod_p(c: i128) -> u128 {
    c.rem_euclid(MODULUS as i128) as u128
}

fn inv_mod(a: u128) -> u128 {
    let (mut result, mut base, mut e) = (1u128, a, MODULUS - 2);
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % MODULUS;
        }
        base = base * base % MODULUS;
        e >>= 1;
    }
    result
}

/// Degree of `gcd(a, b)` over `Z/pZ`; both arguments are trimmed.
fn gcd_degree_mod_p(mut a: Vec<u128>, mut b: Vec<u128>) -> usize {
    while !b.is_empty() {
        let inv = inv_mod(*b.last().expect("nonempty"));
        while a.len() >= b.len() {
            let q = a.last().expect("nonempty") * inv % MODULUS;
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + MODULUS - q * bi % MODULUS) % MODULUS;
            }
            while a.last() == Some(&0) {
                a.pop();
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Whether `f` certainly has no repeated roots: `gcd(f, f')` is constant
/// modulo a prime not dividing the leading coefficient.
fn certainly_squarefree(f: &[i128]) -> bool {
    let a: Vec<u128> = f.iter().map(|&c| mod_p(c)).collect();
    if a.last() == Some(&0) {
        return false;
    }
    let mut b: Vec<u128> = f.iter().enumerate().skip(1).map(|(i, &c)| mod_p(c) * (i as u128 % MODULUS) % MODULUS).collect();
    while b.last() == Some(&0) {
        b.pop();
    }
    !b.is_empty() && gcd_degree_mod_p(a, b) == 0
}

type Rat = Vec<BigRational>;

fn trim(mut p: Rat) -> Rat {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

fn derivative(p: &Rat) -> Rat {
    trim(p.iter().enumerate().skip(1).map(|(i, c)| c * BigRational::from_integer(BigInt::from(i))).collect())
}

fn monic(p: Rat) -> Rat {
    let lead = p.last().expect("nonzero").clone();
    p.into_iter().map(|c| c / &lead).collect()
}

/// Quotient and remainder; `b` is nonzero.
fn divrem(a: &Rat, b: &Rat) -> (Rat, Rat) {
    let mut r = a.clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - b.len() + 1];
    let lead = b.last().expect("nonzero");
    for i in (0..q.len()).rev() {
        let c = &r[i + b.len() - 1] / lead;
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        q[i] = c;
    }
    (trim(q), trim(r))
}

fn gcd(a: &Rat, b: &Rat) -> Rat {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// `f = c·Π p_i^i` with each `p_i` squarefree (Yun's algorithm over ℚ).
/// Returns the nonconstant `p_i` with their multiplicities.
fn squarefree_parts(f: &[i128]) -> Vec<(Rat, usize)> {
    let f: Rat = f.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect();
    let df = derivative(&f);
    let a = gcd(&f, &df);
    let mut b = divrem(&f, &a).0;
    let c = divrem(&df, &a).0;
    let mut d = trim(c.iter().zip(derivative(&b).into_iter().chain(std::iter::repeat(BigRational::zero()))).map(|(x, y)| x - y).collect());
    let mut parts = Vec::new();
    let mut i = 1;
    while b.len() > 1 {
        let a = gcd(&b, &d);
        let next_b = divrem(&b, &a).0;
        let c = divrem(&d, &a).0;
        if a.len() > 1 {
            parts.push((a, i));
        }
        let db = derivative(&next_b);
        let len = c.len().max(db.len());
        d = trim((0..len).map(|k| c.get(k).cloned().unwrap_or_default() - db.get(k).cloned().unwrap_or_default()).collect());
        b = next_b;
        i += 1;
    }
    parts
}

fn simple_roots(p: Dense, tol: f64) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n == 1 {
        return Ok(vec![Complex64::new(-p.coeffs[0] / p.coeffs[1], 0.0)]);
    }
    let lead = p.coeffs[n].abs();
    let height = p.coeffs.iter().fold(0f64, |m, c| m.max(c.abs()));
    let bound = 1.0 + height / lead;
    match aberth(&p, bound, tol) {
        Ok(z) => Ok(z),
        Err(first) => {
            // Start on the circle through the geometric mean of the root
            // moduli instead.
            let mean = (p.coeffs[0] / p.coeffs[n]).abs().powf(1.0 / n as f64);
            aberth(&p, mean.clamp(1e-3, bound), tol).map_err(|_| first)
        }
    }
}

/// All complex roots of `f`, each with relative residual at most `tol`.
///
/// Repeated factors are split off exactly first, so every polynomial passed
/// to the iteration has simple roots.
pub fn roots(f: &IntPoly, tol: f64) -> Result<MahlerResult> {
    let d = match f.degree() {
        Some(d) if d >= 1 => d,
        _ => return Err(MahlerError::ConstantPolynomial),
    };
    let lead = f.lead().unwrap_or(1);
    let zeros = f.coeffs().iter().take_while(|&&c| c == 0).count();
    let core = &f.coeffs()[zeros..];
    let mut found = vec![Complex64::new(0.0, 0.0); zeros];
    if core.len() > 1 {
        if certainly_squarefree(core) {
            found.extend(simple_roots(Dense::new(core), tol)?);
        } else {
            for (p, mult) in squarefree_parts(core) {
                let coeffs: Vec<f64> = p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
                let z = simple_roots(Dense::from_floats(coeffs), tol)?;
                for _ in 0..mult {
                    found.extend(&z);
                }
            }
        }
    }
    let full = Dense::new(f.coeffs());
    let residuals: Vec<f64> = found.iter().map(|&z| full.relative_residual(z)).collect();
    debug_assert_eq!(found.len(), d);
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    if worst.is_nan() || worst > tol {
        return Err(MahlerError::NoConvergence { iterations: MAX_ITERATIONS, best: found, residual: worst });
    }
    let measure = (lead as f64).abs() * found.iter().map(|z| z.norm().max(1.0)).product::<f64>();
    Ok(MahlerResult { roots: found, residuals, measure, residual_bound: tol })
}

pub fn mahler_measure(f: &IntPoly) -> Result<f64> {
    Ok(roots(f, DEFAULT_TOL)?.measure)
}

/// One inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `(rhs − lhs) / |rhs|`; negative means violated.
    pub slack: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(name: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = (rhs - lhs) / rhs.abs().max(f64::MIN_POSITIVE);
        Self { name: name.into(), lhs, rhs, slack, holds: slack >= -tol }
    }
}

/// `H(f)·2^{-d} ≤ M(f)` and `M(f) ≤ H(f)·√(d+1)`.
pub fn height_measure_chain(f: &IntPoly, label: &str) -> Result<[InequalityCheck; 2]> {
    let d = f.degree().ok_or(MahlerError::ConstantPolynomial)?;
    let m = mahler_measure(f)?;
    let h = f.height()? as f64;
    Ok([
        InequalityCheck::new(format!("H({label})/2^d <= M({label})"), h / 2f64.powi(d as i32), m, CHAIN_TOL),
        InequalityCheck::new(format!("M({label}) <= H({label})*sqrt(d+1)"), m, h * ((d + 1) as f64).sqrt(), CHAIN_TOL),
    ])
}

/// How `f` is built from `g` and `h`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Product,
    Composition(Split),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub checks: Vec<InequalityCheck>,
    /// `|M(f) − M(g)M(h)| / M(f)` for products.
    pub product_error: Option<f64>,
}

impl InequalityReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &InequalityCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Bounds on the composition factors that need no root finding:
/// `|lead(g)|·H(h)^m ≤ K₁·H(f)` and `H(g) ≤ K₂·H(f)`.
pub fn composition_bounds(f: &IntPoly, g: &IntPoly, h: &IntPoly, split: Split) -> Result<[InequalityCheck; 2]> {
    let (k1, k2) = explicit_constants(split);
    let hf = f.height()? as f64;
    let lead = g.lead().unwrap_or(0).unsigned_abs() as f64;
    let lhs = lead * (h.height()? as f64).powi(split.outer as i32);
    Ok([
        InequalityCheck::new("|lead g|*H(h)^m <= K1*H(f)", lhs, k1 * hf, CHAIN_TOL),
        InequalityCheck::new("H(g) <= K2*H(f)", g.height()? as f64, k2 * hf, CHAIN_TOL),
    ])
}

/// Checks the height/measure chain for `f`, `g`, `h`, plus multiplicativity
/// for a product or the composition bounds for a composition. Fails if `f`
/// is not exactly the stated combination of `g` and `h`.
pub fn check_inequalities(f: &IntPoly, g: &IntPoly, h: &IntPoly, relation: Relation) -> Result<InequalityReport> {
    let mut checks = Vec::new();
    let mut product_error = None;
    match relation {
        Relation::Product => {
            if &g.checked_mul(h)? != f {
                return Err(MahlerError::Precondition("f is not g*h".into()));
            }
            let (mf, mg, mh) = (mahler_measure(f)?, mahler_measure(g)?, mahler_measure(h)?);
            let err = (mf - mg * mh).abs() / mf;
            product_error = Some(err);
            checks.push(InequalityCheck::new("|M(f) - M(g)M(h)|/M(f) <= tol", err, PRODUCT_TOL, 0.0));
        }
        Relation::Composition(split) => {
            if g.degree() != Some(split.outer) || h.degree() != Some(split.inner) {
                return Err(MahlerError::Precondition(format!("degrees do not match split {split}")));
            }
            if h.coeff(0) != 0 {
                return Err(MahlerError::Precondition("h(0) must be 0".into()));
            }
            if &compose(g, h)? != f {
                return Err(MahlerError::Precondition("f is not g(h)".into()));
            }
            checks.extend(composition_bounds(f, g, h, split)?);
        }
    }
    for (p, label) in [(f, "f"), (g, "g"), (h, "h")] {
        if p.degree().is_some_and(|d| d >= 1) {
            checks.extend(height_measure_chain(p, label)?);
        }
    }
    Ok(InequalityReport { checks, product_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i128]) -> IntPoly {
        IntPoly::new(c.to_vec())
    }

    fn sorted(mut z: Vec<Complex64>) -> Vec<Complex64> {
        z.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap());
        z
    }

    #[test]
    fn known_roots() {
        let r = sorted(roots(&p(&[-4, 0, 1]), DEFAULT_TOL).unwrap().roots);
        assert!((r[0] - Complex64::new(-2.0, 0.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let r = sorted(roots(&p(&[1, 0, 1]), DEFAULT_TOL).unwrap().roots);
        assert!((r[0] - Complex64::new(0.0, -1.0)).norm() < 1e-12);
        assert!((r[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn known_measures() {
        assert!((mahler_measure(&p(&[-4, 0, 1])).unwrap() - 4.0).abs() < 1e-10);
        assert!((mahler_measure(&p(&[-6, 3])).unwrap() - 6.0).abs() < 1e-12);
        assert!((mahler_measure(&p(&[1, 1, 1])).unwrap() - 1.0).abs() < 1e-10);
        // x^3 (x - 5)(2x + 1)
        let f = p(&[0, 0, 0, -5, -9, 2]);
        assert!((mahler_measure(&f).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn distinct_integer_roots() {
        let mut f = IntPoly::constant(1);
        for k in 1..=10 {
            f = f.checked_mul(&p(&[-k, 1])).unwrap();
        }
        let r = roots(&f, DEFAULT_TOL).unwrap();
        let mut re: Vec<f64> = r.roots.iter().map(|z| z.re).collect();
        re.sort_by(f64::total_cmp);
        for (k, x) in re.iter().enumerate() {
            assert!((x - (k + 1) as f64).abs() < 1e-6, "{re:?}");
        }
        assert!((r.measure / 3_628_800.0 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn repeated_roots() {
        // (2x - 5)^2 (x + 1)^3 (x^2 + 1)
        let mut f = IntPoly::constant(1);
        for (factor, k) in [(p(&[-5, 2]), 2), (p(&[1, 1]), 3), (p(&[1, 0, 1]), 1)] {
            for _ in 0..k {
                f = f.checked_mul(&factor).unwrap();
            }
        }
        assert!(!certainly_squarefree(f.coeffs()));
        let parts = squarefree_parts(f.coeffs());
        let mults: Vec<usize> = parts.iter().map(|(q, m)| (q.len() - 1) * 10 + m).collect();
        assert_eq!(mults, vec![21, 12, 13]);
        let r = roots(&f, DEFAULT_TOL).unwrap();
        assert_eq!(r.roots.len(), 7);
        assert!((r.measure - 25.0).abs() < 1e-12 * 25.0);
    }

    #[test]
    fn squarefree_screen() {
        assert!(certainly_squarefree(&[-4, 0, 1]));
        assert!(!certainly_squarefree(&[1, 2, 1]));
        assert!(certainly_squarefree(&[-6, 3]));
    }

    #[test]
    fn constants_are_rejected() {
        assert_eq!(roots(&p(&[5]), DEFAULT_TOL), Err(MahlerError::ConstantPolynomial));
    }

    #[test]
    fn product_example() {
        let rep = check_inequalities(&p(&[-4, 0, 1]), &p(&[-2, 1]), &p(&[2, 1]), Relation::Product).unwrap();
        assert!(rep.all_hold());
        assert!(rep.product_error.unwrap() < 1e-12);
        let [lo, hi] = height_measure_chain(&p(&[-4, 0, 1]), "f").unwrap();
        assert!((lo.lhs - 1.0).abs() < 1e-12 && (hi.rhs - 4.0 * 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn composition_checks() {
        let g = p(&[5, 2, 1]);
        let h = p(&[0, 1, 1]);
        let f = compose(&g, &h).unwrap();
        let rep = check_inequalities(&f, &g, &h, Relation::Composition(Split::new(2, 2))).unwrap();
        assert!(rep.all_hold());
        assert_eq!(rep.checks.len(), 8);
        let bad = check_inequalities(&f, &g, &p(&[1, 1, 1]), Relation::Composition(Split::new(2, 2)));
        assert!(matches!(bad, Err(MahlerError::Precondition(_))));
        let bad = check_inequalities(&f, &g, &h, Relation::Product);
        assert!(matches!(bad, Err(MahlerError::Precondition(_))));
    }

    fn poly(max_deg: usize, bound: i128) -> impl Strategy<Value = IntPoly> {
        (1..=max_deg).prop_flat_map(move |d| {
            (prop::collection::vec(-bound..=bound, d), (1..=bound), any::<bool>()).prop_map(|(mut c, lead, neg)| {
                c.push(if neg { -lead } else { lead });
                IntPoly::new(c)
            })
        })
    }

    proptest! {
        #[test]
        fn residual_contract(f in poly(10, 1000)) {
            let r = roots(&f, DEFAULT_TOL).unwrap();
            prop_assert_eq!(r.roots.len(), f.degree().unwrap());
            prop_assert!(r.residuals.iter().all(|&e| e <= r.residual_bound));
            prop_assert!(r.measure >= (f.lead().unwrap() as f64).abs() * (1.0 - 1e-12));
        }

        #[test]
        fn chain_holds(f in poly(10, 1000)) {
            for c in height_measure_chain(&f, "f").unwrap() {
                prop_assert!(c.holds, "{:?}", c);
            }
        }

        #[test]
        fn multiplicative(g in poly(6, 100), h in poly(6, 100)) {
            let f = g.checked_mul(&h).unwrap();
            let rep = check_inequalities(&f, &g, &h, Relation::Product).unwrap();
            prop_assert!(rep.product_error.unwrap() <= PRODUCT_TOL);
        }

        #[test]
        fn invariant_under_reflection_and_scaling(f in poly(8, 100), c in 1i128..50) {
            let m = mahler_measure(&f).unwrap();
            let neg: Vec<i128> = f.coeffs().iter().enumerate().map(|(i, &a)| if i % 2 == 1 { -a } else { a }).collect();
            let mneg = mahler_measure(&IntPoly::new(neg)).unwrap();
            prop_assert!((mneg - m).abs() <= 1e-9 * m);
            let mc = mahler_measure(&f.checked_scale(-c).unwrap()).unwrap();
            prop_assert!((mc - c as f64 * m).abs() <= 1e-9 * mc);
        }
    }
}
