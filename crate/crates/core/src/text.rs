//! Parsers for the textual inputs accepted on the command line.
//!
//! Polynomials are written as ascending comma-separated integers:
//! `5,2,3,2,1` is `x^4 + 2x^3 + 3x^2 + 2x + 5`. Whitespace is ignored
//! everywhere and each coefficient may carry a leading `-`.

use thiserror::Error;

use crate::census::{Split, Variant};
use crate::poly::IntPoly;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("coefficient {index} is not an integer: {text:?}")]
    BadCoefficient { index: usize, text: String },
    #[error("malformed split {0:?}, expected m,n")]
    BadSplit(String),
    #[error("unknown variant {0:?}, expected total, split:m,n or indecomp-pair")]
    BadVariant(String),
    #[error("malformed grid {0:?}, expected geometric:k or a comma-separated list")]
    BadGrid(String),
    #[error("grid must be strictly ascending with every height >= 2")]
    GridOrder,
}

fn strip_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

fn parse_int(item: &str) -> Option<i128> {
    let digits = item.strip_prefix('-').unwrap_or(item);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    item.parse().ok()
}

pub fn parse_poly(s: &str) -> Result<IntPoly, ParseError> {
    let s = strip_ws(s);
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    let coeffs = s
        .split(',')
        .enumerate()
        .map(|(index, item)| {
            parse_int(item).ok_or_else(|| ParseError::BadCoefficient {
                index,
                text: item.to_string(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(IntPoly::new(coeffs))
}

fn parse_usize(item: &str) -> Option<usize> {
    if item.is_empty() || !item.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    item.parse().ok()
}

/// `m,n` with `m, n >= 2`.
pub fn parse_split(s: &str) -> Result<Split, ParseError> {
    let s = strip_ws(s);
    let bad = || ParseError::BadSplit(s.clone());
    let (m, n) = s.split_once(',').ok_or_else(bad)?;
    let (m, n) = (parse_usize(m).ok_or_else(bad)?, parse_usize(n).ok_or_else(bad)?);
    if m < 2 || n < 2 || m.checked_mul(n).is_none() {
        return Err(bad());
    }
    Ok(Split { outer: m, inner: n })
}

/// `total`, `split:m,n` or `indecomp-pair` (`indecomp_pair` also accepted).
pub fn parse_variant(s: &str) -> Result<Variant, ParseError> {
    let s = strip_ws(s);
    match s.as_str() {
        "total" => Ok(Variant::Total),
        "indecomp-pair" | "indecomp_pair" => Ok(Variant::IndecompPair),
        _ => match s.strip_prefix("split:") {
            Some(rest) => parse_split(rest).map(Variant::Split),
            None => Err(ParseError::BadVariant(s)),
        },
    }
}

/// A height grid as written on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GridSpec {
    /// `k` heights halving down from the maximum height.
    Geometric(usize),
    List(Vec<u64>),
}

pub fn parse_grid(s: &str) -> Result<GridSpec, ParseError> {
    let s = strip_ws(s);
    let bad = || ParseError::BadGrid(s.clone());
    if let Some(k) = s.strip_prefix("geometric:") {
        let k = parse_usize(k).ok_or_else(bad)?;
        if k == 0 {
            return Err(bad());
        }
        return Ok(GridSpec::Geometric(k));
    }
    if s.is_empty() {
        return Err(bad());
    }
    let list = s
        .split(',')
        .map(|item| parse_usize(item).and_then(|v| u64::try_from(v).ok()))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(bad)?;
    check_ascending(&list)?;
    Ok(GridSpec::List(list))
}

fn check_ascending(grid: &[u64]) -> Result<(), ParseError> {
    let ascending = grid.windows(2).all(|w| w[0] < w[1]);
    if !ascending || grid.iter().any(|&h| h < 2) {
        return Err(ParseError::GridOrder);
    }
    Ok(())
}

impl GridSpec {
    /// Materialises the grid; geometric grids end at `height_max`.
    pub fn resolve(&self, height_max: Option<u64>) -> Result<Vec<u64>, ParseError> {
        let grid = match self {
            GridSpec::List(list) => list.clone(),
            GridSpec::Geometric(k) => {
                let top = height_max.ok_or_else(|| ParseError::BadGrid("geometric grid needs --height-max".into()))?;
                let mut grid: Vec<u64> = (0..*k)
                    .rev()
                    .map(|i| u32::try_from(i).ok().and_then(|i| top.checked_shr(i)).unwrap_or(0))
                    .collect();
                grid.dedup();
                grid
            }
        };
        check_ascending(&grid)?;
        Ok(grid)
    }
}
