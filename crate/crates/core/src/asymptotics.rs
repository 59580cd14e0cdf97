//! Predicted growth rates of the census counts and least-squares growth fits.

use std::fmt;

use num::rational::Rational64;
use thiserror::Error;

use crate::census::{count_forward, CensusConfig, CensusError, CountQuery, Split, Variant};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AsymptoticsError {
    #[error("split {split} does not factor degree {degree}")]
    InvalidSplit { degree: usize, split: Split },
    #[error("degree must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("need at least 3 points with count >= {min_count}, have {have}")]
    TooFewPoints { have: usize, min_count: u128 },
    #[error("heights must be strictly ascending")]
    NotAscending,
    #[error("all heights are equal")]
    Degenerate,
    #[error(transparent)]
    Census(#[from] CensusError),
}

pub type Result<T> = std::result::Result<T, AsymptoticsError>;

/// Smallest prime factor of `d`; `spf(1)` is 1.
pub fn spf(d: usize) -> usize {
    if d.is_multiple_of(2) {
        return 2;
    }
    let mut p = 3;
    while p * p <= d {
        if d.is_multiple_of(p) {
            return p;
        }
        p += 2;
    }
    d
}

pub fn is_prime(d: usize) -> bool {
    d >= 2 && spf(d) == d
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionKind {
    /// Matching upper and lower bounds.
    TwoSided,
    /// Only an upper bound is known.
    UpperOnly,
    /// Prime degree: the count is identically zero.
    Vanishing,
}

/// Predicted order of growth `H^exponent` (times `log H` if `log_factor`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prediction {
    pub exponent: Rational64,
    pub log_factor: bool,
    pub kind: PredictionKind,
}

impl Prediction {
    fn new(exponent: Rational64, log_factor: bool, kind: PredictionKind) -> Self {
        Self { exponent, log_factor, kind }
    }

    fn int(e: usize, log_factor: bool, kind: PredictionKind) -> Self {
        Self::new(Rational64::from_integer(e as i64), log_factor, kind)
    }

    pub fn exponent_f64(&self) -> f64 {
        *self.exponent.numer() as f64 / *self.exponent.denom() as f64
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            PredictionKind::Vanishing => return f.write_str("0 (identically zero)"),
            PredictionKind::TwoSided => f.write_str("asymp ")?,
            PredictionKind::UpperOnly => f.write_str("<< ")?,
        }
        write!(f, "H^{}", self.exponent)?;
        if self.log_factor {
            f.write_str(" log H")?;
        }
        Ok(())
    }
}

fn split_prediction(split: Split, monic: bool) -> Prediction {
    use PredictionKind::*;
    let (m, n) = (split.outer, split.inner);
    let (mi, ni) = (m as i64, n as i64);
    if monic {
        if m == 2 && n == 2 {
            Prediction::int(2, true, TwoSided)
        } else if m * (m - 1) >= 2 * n {
            Prediction::int(m, false, TwoSided)
        } else if m * (m - 1) == 2 * (n - 1) {
            Prediction::int(m, true, UpperOnly)
        } else {
            let e = Rational64::new(mi + 1, 2) + Rational64::new(ni - 1, mi);
            Prediction::new(e, false, UpperOnly)
        }
    } else if m * (m + 1) >= 2 * (n + 1) {
        Prediction::int(m + 1, false, TwoSided)
    } else if m * (m + 1) == 2 * n {
        Prediction::int(m + 1, true, UpperOnly)
    } else {
        let e = Rational64::new(mi + 1, 2) + Rational64::new(ni, mi);
        Prediction::new(e, false, UpperOnly)
    }
}

/// Predicted growth of a count as `H → ∞`. The indecomposable-pair count
/// has the same prediction as the total count.
pub fn predicted_growth(d: usize, monic: bool, variant: Variant) -> Result<Prediction> {
    if d < 2 {
        return Err(AsymptoticsError::DegreeTooSmall(d));
    }
    if let Variant::Split(s) = variant {
        if s.outer < 2 || s.inner < 2 || s.degree() != d {
            return Err(AsymptoticsError::InvalidSplit { degree: d, split: s });
        }
        return Ok(split_prediction(s, monic));
    }
    if is_prime(d) {
        return Ok(Prediction::int(0, false, PredictionKind::Vanishing));
    }
    let top = d / spf(d);
    Ok(match (monic, d) {
        (true, 4) => Prediction::int(2, true, PredictionKind::TwoSided),
        (true, _) => Prediction::int(top, false, PredictionKind::TwoSided),
        (false, _) => Prediction::int(top + 1, false, PredictionKind::TwoSided),
    })
}

/// Predicted order of `D − I`, the polynomials without an indecomposable
/// witness through the dominant split. `None` when `d = ℓ²`, where the
/// difference vanishes.
pub fn predicted_remainder(d: usize, monic: bool) -> Option<Prediction> {
    let l = spf(d);
    if l == d || d == l * l {
        return None;
    }
    let top = (d / l) as i64;
    let p = match (monic, d) {
        (true, 6) => Prediction::new(Rational64::new(5, 2), false, PredictionKind::UpperOnly),
        (true, _) => Prediction::new(Rational64::from_integer(top - 1), false, PredictionKind::UpperOnly),
        (false, 6) => Prediction::new(Rational64::from_integer(3), true, PredictionKind::UpperOnly),
        (false, _) => Prediction::new(Rational64::from_integer(top), false, PredictionKind::UpperOnly),
    };
    Some(p)
}

/// Points with smaller counts are left out of fits.
pub const MIN_FIT_COUNT: u128 = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthFit {
    /// Exponent of the preferred model.
    pub exponent: f64,
    pub log_model_preferred: bool,
    /// False when too few points were available to compare the two models.
    pub log_conclusive: bool,
    /// Multiplicative constant of the preferred model.
    pub constant: f64,
    /// RMS residual (in log space) of the preferred model.
    pub rms_residual: f64,
    pub points_used: usize,
    /// `count ≈ C·H^e`.
    pub power_exponent: f64,
    pub power_rms: f64,
    /// `count ≈ C·H^e·ln H`.
    pub log_exponent: f64,
    pub log_rms: f64,
}

struct Line {
    slope: f64,
    intercept: f64,
    rms: f64,
}

fn least_squares(xs: &[f64], ys: &[f64]) -> Line {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Line { slope, intercept, rms: (sse / n).sqrt() }
}

/// Fits `count ≈ C·H^e` and `count ≈ C·H^e·ln H` by least squares in log
/// space over the points with `count ≥ MIN_FIT_COUNT`. With four or more
/// points the model with the smaller RMS residual is preferred; with three
/// the power model is reported and `log_conclusive` is false.
pub fn fit_growth(points: &[(u64, u128)]) -> Result<GrowthFit> {
    if points.windows(2).any(|w| w[0].0 > w[1].0) {
        return Err(AsymptoticsError::NotAscending);
    }
    let used: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(h, c)| c >= MIN_FIT_COUNT && h >= 2)
        .map(|&(h, c)| ((h as f64).ln(), (c as f64).ln()))
        .collect();
    if used.len() < 3 {
        return Err(AsymptoticsError::TooFewPoints { have: used.len(), min_count: MIN_FIT_COUNT });
    }
    if used.iter().all(|p| p.0 == used[0].0) {
        return Err(AsymptoticsError::Degenerate);
    }
    if used.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(AsymptoticsError::NotAscending);
    }
    let xs: Vec<f64> = used.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.1).collect();
    let power = least_squares(&xs, &ys);
    let ys_log: Vec<f64> = used.iter().map(|p| p.1 - p.0.ln()).collect();
    let log = least_squares(&xs, &ys_log);
    let log_conclusive = used.len() >= 4;
    let log_model_preferred = log_conclusive && log.rms < power.rms;
    let best = if log_model_preferred { &log } else { &power };
    Ok(GrowthFit {
        exponent: best.slope,
        log_model_preferred,
        log_conclusive,
        constant: best.intercept.exp(),
        rms_residual: best.rms,
        points_used: used.len(),
        power_exponent: power.slope,
        power_rms: power.rms,
        log_exponent: log.slope,
        log_rms: log.rms,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemainderRow {
    pub height: u64,
    /// All decomposable polynomials.
    pub decomposable: u128,
    /// Those with an indecomposable witness through the dominant split.
    pub indecomp_pair: u128,
    pub remainder: u128,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RemainderReport {
    pub degree: usize,
    pub monic: bool,
    pub rows: Vec<RemainderRow>,
    pub predicted: Option<Prediction>,
    /// Fit of the remainder column; absent when the remainder vanishes
    /// or too few rows have enough mass.
    pub fit: Option<GrowthFit>,
}

/// Tabulates `D`, `I` and `D − I` over a height grid.
pub fn remainder_report(d: usize, monic: bool, grid: &[u64], config: &CensusConfig) -> Result<RemainderReport> {
    if is_prime(d) || d < 4 {
        return Err(CensusError::InvalidQuery(format!("degree {d} is not composite")).into());
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &height in grid {
        let total = count_forward(&CountQuery::new(d, height, monic, Variant::Total)?, config)?.count;
        let pair = count_forward(&CountQuery::new(d, height, monic, Variant::IndecompPair)?, config)?.count;
        let remainder = total.checked_sub(pair).ok_or_else(|| {
            CensusError::InvalidQuery(format!("indecomposable-pair count {pair} exceeds total {total} at H={height}"))
        })?;
        let ratio = if total == 0 { 0.0 } else { remainder as f64 / total as f64 };
        rows.push(RemainderRow { height, decomposable: total, indecomp_pair: pair, remainder, ratio });
    }
    let predicted = predicted_remainder(d, monic);
    let fit = if predicted.is_some() {
        fit_growth(&rows.iter().map(|r| (r.height, r.remainder)).collect::<Vec<_>>()).ok()
    } else {
        None
    };
    Ok(RemainderReport { degree: d, monic, rows, predicted, fit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn smallest_prime_factors() {
        assert_eq!(spf(4), 2);
        assert_eq!(spf(9), 3);
        assert_eq!(spf(15), 3);
        assert_eq!(spf(49), 7);
        assert_eq!(spf(13), 13);
        assert!(is_prime(2) && is_prime(7) && !is_prime(1) && !is_prime(91));
    }

    proptest! {
        #[test]
        fn spf_is_a_prime_divisor(d in 2usize..100_000) {
            let p = spf(d);
            prop_assert_eq!(d % p, 0);
            prop_assert!((2..p).all(|q| !p.is_multiple_of(q)));
        }
    }

    #[test]
    fn total_predictions() {
        let p = predicted_growth(4, true, Variant::Total).unwrap();
        assert_eq!((p.exponent, p.log_factor, p.kind), (r(2, 1), true, PredictionKind::TwoSided));
        let p = predicted_growth(9, true, Variant::Total).unwrap();
        assert_eq!((p.exponent, p.log_factor, p.kind), (r(3, 1), false, PredictionKind::TwoSided));
        let p = predicted_growth(6, false, Variant::Total).unwrap();
        assert_eq!((p.exponent, p.log_factor, p.kind), (r(4, 1), false, PredictionKind::TwoSided));
        assert_eq!(predicted_growth(7, true, Variant::Total).unwrap().kind, PredictionKind::Vanishing);
    }

    #[test]
    fn split_predictions() {
        let monic = |m, n| predicted_growth(m * n, true, Variant::Split(Split::new(m, n))).unwrap();
        let p = monic(3, 2);
        assert_eq!((p.exponent, p.log_factor, p.kind), (r(3, 1), false, PredictionKind::TwoSided));
        // m(m-1) = 2(n-1)
        let p = monic(2, 2);
        assert_eq!((p.exponent, p.log_factor), (r(2, 1), true));
        let p = monic(3, 4);
        assert_eq!((p.exponent, p.log_factor, p.kind), (r(3, 1), true, PredictionKind::UpperOnly));
        let p = monic(2, 3);
        assert_eq!((p.exponent, p.kind), (r(5, 2), PredictionKind::UpperOnly));
        let p = monic(2, 5);
        assert_eq!(p.exponent, r(3, 2) + r(4, 2));
        let nm = |m, n| predicted_growth(m * n, false, Variant::Split(Split::new(m, n))).unwrap();
        assert_eq!(nm(2, 2).exponent, r(3, 1));
        assert_eq!(nm(2, 2).kind, PredictionKind::TwoSided);
        let p = nm(2, 3);
        assert_eq!((p.exponent, p.log_factor, p.kind), (r(3, 1), true, PredictionKind::UpperOnly));
        assert_eq!(nm(2, 4).exponent, r(3, 2) + r(2, 1));
        assert!(predicted_growth(6, true, Variant::Split(Split::new(2, 2))).is_err());
    }

    #[test]
    fn total_matches_best_two_sided_split() {
        for d in [4usize, 6, 8, 9, 10, 12, 15, 16, 25, 27] {
            let total = predicted_growth(d, true, Variant::Total).unwrap();
            let best = crate::decompose::splits_of(d)
                .into_iter()
                .map(|s| predicted_growth(d, true, Variant::Split(s)).unwrap())
                .filter(|p| p.kind == PredictionKind::TwoSided)
                .max_by_key(|p| p.exponent)
                .unwrap();
            assert_eq!(total.exponent, best.exponent, "d={d}");
            let l = spf(d);
            let dominant = predicted_growth(d, true, Variant::Split(Split::new(d / l, l))).unwrap();
            assert_eq!(dominant.exponent, total.exponent, "d={d}");
        }
    }

    #[test]
    fn fits_exact_power_law() {
        let pts: Vec<(u64, u128)> = [10u64, 20, 40, 80, 160].iter().map(|&h| (h, 7 * (h as u128).pow(3))).collect();
        let fit = fit_growth(&pts).unwrap();
        assert!((fit.exponent - 3.0).abs() < 1e-6);
        assert!((fit.constant - 7.0).abs() < 1e-6);
        assert!(!fit.log_model_preferred);
        assert!(fit.log_conclusive);
    }

    #[test]
    fn fits_power_times_log() {
        let pts: Vec<(u64, u128)> = [10u64, 30, 100, 300, 1000, 3000]
            .iter()
            .map(|&h| (h, (5.0 * (h as f64).powi(2) * (h as f64).ln()).round() as u128))
            .collect();
        let fit = fit_growth(&pts).unwrap();
        assert!(fit.log_model_preferred);
        assert!((fit.exponent - 2.0).abs() < 1e-3);
        assert!(fit.power_exponent > 2.0);
    }

    #[test]
    fn three_points_are_inconclusive() {
        let fit = fit_growth(&[(10, 1000), (20, 8000), (40, 64000)]).unwrap();
        assert!(!fit.log_conclusive && !fit.log_model_preferred);
        assert!((fit.exponent - 3.0).abs() < 1e-9);
    }

    #[test]
    fn fit_preconditions() {
        assert!(matches!(fit_growth(&[(10, 100), (20, 200)]), Err(AsymptoticsError::TooFewPoints { .. })));
        assert!(matches!(
            fit_growth(&[(10, 100), (10, 200), (10, 300)]),
            Err(AsymptoticsError::Degenerate)
        ));
        assert!(matches!(fit_growth(&[(20, 100), (10, 200), (30, 300)]), Err(AsymptoticsError::NotAscending)));
        // small counts are dropped
        assert!(fit_growth(&[(2, 3), (4, 9), (8, 27), (16, 81)]).is_err());
    }

    #[test]
    fn remainder_predictions() {
        assert_eq!(predicted_remainder(4, true), None);
        assert_eq!(predicted_remainder(9, false), None);
        assert_eq!(predicted_remainder(6, true).unwrap().exponent, r(5, 2));
        assert_eq!(predicted_remainder(8, true).unwrap().exponent, r(3, 1));
        let p = predicted_remainder(6, false).unwrap();
        assert_eq!((p.exponent, p.log_factor), (r(3, 1), true));
        assert_eq!(predicted_remainder(8, false).unwrap().exponent, r(4, 1));
    }

    #[test]
    fn square_degree_has_no_remainder() {
        let rep = remainder_report(4, true, &[3, 5, 8], &CensusConfig::with_workers(2)).unwrap();
        assert!(rep.rows.iter().all(|r| r.remainder == 0 && r.decomposable > 0));
        assert!(rep.fit.is_none());
    }
}
