//! Brute-force counting over the full coefficient box.

use rayon::prelude::*;

use super::{timed, CensusConfig, CensusError, CountQuery, CountResult, Method, Result, Variant};
use crate::asymptotics::is_prime;
use crate::decompose::{decompose_split, is_decomposable, is_decomposable_coeffs, split_exists};
use crate::poly::IntPoly;

fn box_size(degree: usize, height: u64, monic: bool) -> Option<u128> {
    let side = 2 * u128::from(height) + 1;
    let free = side.checked_pow(u32::try_from(degree).ok()?)?;
    if monic {
        Some(free)
    } else {
        free.checked_mul(side - 1)
    }
}

/// Applies `visit` to every polynomial of the given degree with all
/// coefficients in `[-height, height]` (monic: leading coefficient 1) and
/// sums the results. Refuses boxes larger than `config.oracle_budget`.
pub fn scan_box<F>(degree: usize, height: u64, monic: bool, config: &CensusConfig, visit: F) -> Result<u128>
where
    F: Fn(&[i128]) -> u128 + Sync,
{
    let size = box_size(degree, height, monic).unwrap_or(u128::MAX);
    if size > config.oracle_budget {
        return Err(CensusError::BudgetExceeded {
            what: "brute-force box",
            estimate: size,
            budget: config.oracle_budget,
        });
    }
    let h = i128::from(height);
    // Parallelise over the top free coefficient.
    let top: Vec<i128> = if monic {
        (-h..=h).collect()
    } else {
        (-h..=h).filter(|&a| a != 0).collect()
    };
    let lead_slot = if monic { degree - 1 } else { degree };
    let pool = config.pool()?;
    let total = pool.install(|| {
        top.par_iter()
            .map(|&a| {
                let mut f = vec![-h; degree + 1];
                if monic {
                    f[degree] = 1;
                }
                f[lead_slot] = a;
                let mut acc = 0u128;
                loop {
                    acc += visit(&f);
                    // odometer over f[0..lead_slot]
                    let mut k = 0;
                    while k < lead_slot && f[k] == h {
                        f[k] = -h;
                        k += 1;
                    }
                    if k == lead_slot {
                        break;
                    }
                    f[k] += 1;
                }
                acc
            })
            .sum()
    });
    Ok(total)
}

fn indecomp_pair_member(f: &[i128]) -> bool {
    let d = f.len() - 1;
    let Some(split) = super::dominant_split(d) else {
        return false;
    };
    if !split_exists(f, split.outer, split.inner) {
        return false;
    }
    if is_prime(split.outer) {
        return true;
    }
    // Witnesses differ by x ↦ c·x inside g, which preserves decomposability.
    match decompose_split(&IntPoly::new(f.to_vec()), split) {
        Ok(Some(w)) => !is_decomposable(&w.g),
        _ => false,
    }
}

/// Counts by testing every polynomial in the box.
pub fn count_bruteforce(q: &CountQuery, config: &CensusConfig) -> Result<CountResult> {
    q.validate()?;
    let variant = q.variant;
    let (count, elapsed) = timed(|| {
        scan_box(q.degree, q.height, q.monic, config, |f| {
            let hit = match variant {
                Variant::Total => is_decomposable_coeffs(f),
                Variant::Split(s) => split_exists(f, s.outer, s.inner),
                Variant::IndecompPair => indecomp_pair_member(f),
            };
            u128::from(hit)
        })
    })?;
    Ok(CountResult {
        count,
        query: *q,
        method: Method::Oracle,
        elapsed_seconds: elapsed,
        workers: config.workers,
        enumerated: box_size(q.degree, q.height, q.monic).unwrap_or(u128::MAX),
    })
}
