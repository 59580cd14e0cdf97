//! Forward enumeration of compositions `f = g ∘ h` of bounded height.
//!
//! For a split `(m, n)` the inner polynomial `h` is normalized to
//! `h(0) = 0` and `lead(h) > 0` (primitive in canonical mode). Its
//! coefficients below the leading one are fixed top-down: the coefficient of
//! `x^{d-k}` in `f` is `lead(g)·[h^m]_{d-k}` for `k < n`, linear in
//! `h_{n-k}` with slope `m·lead(h)^{m-1}`, so each one ranges over an
//! interval.
//!
//! The outer polynomial is fixed from `a_m` down to `a_0`. Once
//! `a_m, ..., a_i` are chosen, every coefficient of `x^j` with
//! `j > (i-1)·n` is final, and each newly final coefficient is linear in
//! `a_i`, so the admissible `a_i` form an exact interval. Every value
//! visited therefore extends to at least one polynomial of height `≤ H`.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{
    timed, CensusConfig, CensusError, CountQuery, CountResult, DedupMode, EnumBox, Method, Result, Split, Variant,
    MAX_DEGREE,
};
use crate::asymptotics::is_prime;
use crate::decompose::{is_decomposable_coeffs, split_exists, splits_of};

type Coeffs = [i128; MAX_DEGREE + 1];

const ZERO: Coeffs = [0; MAX_DEGREE + 1];

fn ovf<T>(v: Option<T>) -> Result<T> {
    v.ok_or(CensusError::Overflow)
}

fn floor_div(a: i128, b: i128) -> i128 {
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -((-a).div_euclid(b))
}

/// Admissible `a` with `|s + a·t| ≤ height`, intersected with `[lo, hi]`.
fn clamp_linear(lo: i128, hi: i128, s: i128, t: i128, height: i128) -> Result<Option<(i128, i128)>> {
    if t == 0 {
        return Ok((s.unsigned_abs() <= height.unsigned_abs()).then_some((lo, hi)));
    }
    let (s, t) = if t < 0 { (ovf(s.checked_neg())?, -t) } else { (s, t) };
    let l = ceil_div(ovf(height.checked_add(s))?.checked_neg().ok_or(CensusError::Overflow)?, t);
    let u = floor_div(ovf(height.checked_sub(s))?, t);
    let (lo, hi) = (lo.max(l), hi.min(u));
    Ok((lo <= hi).then_some((lo, hi)))
}

/// Coefficient `k` of `(r_0 + r_1 t + ... )^m`, reading `r` as a power series.
fn series_power_coeff(r: &[i128], m: usize, k: usize) -> Result<i128> {
    let mut acc = vec![0i128; k + 1];
    acc[0] = 1;
    for _ in 0..m {
        let mut next = vec![0i128; k + 1];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in r.iter().enumerate().take(k + 1 - i) {
                next[i + j] = ovf(next[i + j].checked_add(ovf(a.checked_mul(b))?))?;
            }
        }
        acc = next;
    }
    Ok(acc[k])
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Every normalized inner polynomial `h` (ascending coefficients, `h(0) = 0`,
/// `lead(h) ≥ 1`, `H(h) ≤ b_max`) whose top coefficients are compatible with
/// some composition of height at most `height`, in lexicographic order of
/// `(lead, h_{n-1}, ..., h_1)`.
pub fn inner_candidates(split: Split, height: u64, monic: bool, primitive_only: bool) -> Result<Vec<Vec<i128>>> {
    let (m, n) = (split.outer, split.inner);
    let bound = EnumBox::new(split, height);
    let big_h = i128::from(height);
    let mut leads = Vec::new();
    if monic {
        leads.push(1);
    } else {
        let mut c = 1i128;
        while c <= bound.b_max && c.checked_pow(m as u32).is_some_and(|p| p <= big_h) {
            leads.push(c);
            c += 1;
        }
    }
    let mut out = Vec::new();
    for c in leads {
        let mut h = vec![0i128; n + 1];
        h[n] = c;
        fill_inner(&mut h, 1, m, big_h, bound.b_max, primitive_only, &mut out)?;
    }
    Ok(out)
}

fn fill_inner(
    h: &mut Vec<i128>,
    k: usize,
    m: usize,
    height: i128,
    b_max: i128,
    primitive_only: bool,
    out: &mut Vec<Vec<i128>>,
) -> Result<()> {
    let n = h.len() - 1;
    if k == n {
        if !primitive_only || h.iter().fold(0, |g, &c| gcd(g, c)) == 1 {
            out.push(h.clone());
        }
        return Ok(());
    }
    let reversed: Vec<i128> = (0..=k).map(|i| h[n - i]).collect();
    let rest = series_power_coeff(&reversed, m, k)?;
    let slope = ovf(h[n].checked_pow(m as u32 - 1).and_then(|p| p.checked_mul(m as i128)))?;
    if let Some((lo, hi)) = clamp_linear(-b_max, b_max, rest, slope, height)? {
        for b in lo..=hi {
            h[n - k] = b;
            fill_inner(h, k + 1, m, height, b_max, primitive_only, out)?;
        }
    }
    h[n - k] = 0;
    Ok(())
}

/// Per-pair filter applied once the outer polynomial is fixed up to `a_0`.
/// Both filters are invariant under adding a constant to `g`.
#[derive(Debug, Clone)]
enum Check {
    None,
    /// Skip polynomials that also decompose through an earlier split.
    NotEarlier(Vec<Split>),
    /// Keep only pairs with indecomposable `g`.
    OuterIndecomposable,
}

struct Plan {
    split: Split,
    check: Check,
    powers: Vec<Coeffs>,
}

impl Plan {
    fn new(split: Split, check: Check, h: &[i128]) -> Result<Self> {
        let d = split.degree();
        let mut powers = vec![ZERO; split.outer + 1];
        powers[0][0] = 1;
        for i in 1..=split.outer {
            for a in 0..=d - h.len() + 1 {
                let pa = powers[i - 1][a];
                if pa == 0 {
                    continue;
                }
                for (b, &hb) in h.iter().enumerate() {
                    if a + b <= d {
                        powers[i][a + b] = ovf(powers[i][a + b].checked_add(ovf(pa.checked_mul(hb))?))?;
                    }
                }
            }
        }
        Ok(Self { split, check, powers })
    }
}

#[derive(Default)]
struct Tally {
    count: u128,
    pairs: u128,
    set: HashMap<Box<[i128]>, bool>,
}

impl Tally {
    fn merge(mut self, mut other: Self) -> Self {
        self.count += other.count;
        self.pairs += other.pairs;
        if self.set.len() < other.set.len() {
            std::mem::swap(&mut self.set, &mut other.set);
        }
        for (k, flag) in other.set {
            *self.set.entry(k).or_insert(false) |= flag;
        }
        self
    }
}

struct Walker<'a> {
    plan: &'a Plan,
    monic: bool,
    height: i128,
    g_bound: i128,
    dedup: DedupMode,
}

impl Walker<'_> {
    fn degree(&self) -> usize {
        self.plan.split.degree()
    }

    /// Admissible `a_level` given the partial sum `s` of the higher terms.
    fn interval(&self, level: usize, s: &Coeffs) -> Result<Option<(i128, i128)>> {
        let n = self.plan.split.inner;
        let (jlo, jhi) = if level == 0 { (0, 0) } else { ((level - 1) * n + 1, level * n) };
        let mut range = (-self.g_bound, self.g_bound);
        for (&sj, &tj) in s[jlo..=jhi].iter().zip(&self.plan.powers[level][jlo..=jhi]) {
            match clamp_linear(range.0, range.1, sj, tj, self.height)? {
                Some(r) => range = r,
                None => return Ok(None),
            }
        }
        Ok(Some(range))
    }

    fn outer_indecomposable(&self, g: &Coeffs) -> bool {
        !is_decomposable_coeffs(&g[..=self.plan.split.outer])
    }

    fn visit(&self, level: usize, s: &Coeffs, g: &Coeffs, flag: bool) -> Result<Tally> {
        let Some((lo, hi)) = self.interval(level, s)? else {
            return Ok(Tally::default());
        };
        let m = self.plan.split.outer;
        if level == 0 {
            return self.record(lo, hi, s, flag);
        }
        if level == 1 && self.dedup == DedupMode::Canonical && matches!(self.plan.check, Check::None) {
            let k = (hi - lo + 1) as u128 * self.constant_terms();
            return Ok(Tally { count: k, pairs: k, ..Tally::default() });
        }
        let (lo, hi) = if level == m && self.monic {
            if lo > 1 || hi < 1 {
                return Ok(Tally::default());
            }
            (1, 1)
        } else {
            (lo, hi)
        };
        let step = |a: i128| -> Result<Tally> {
            if level == m && a == 0 {
                return Ok(Tally::default());
            }
            let mut s2 = *s;
            let p = &self.plan.powers[level];
            for j in 0..=level * self.plan.split.inner {
                s2[j] = ovf(s2[j].checked_add(ovf(a.checked_mul(p[j]))?))?;
            }
            let mut g2 = *g;
            g2[level] = a;
            if level == 1 {
                self.finish(&s2, &g2)
            } else {
                self.visit(level - 1, &s2, &g2, flag)
            }
        };
        if level + 1 >= m {
            let (lo, hi) = (ovf(i64::try_from(lo).ok())?, ovf(i64::try_from(hi).ok())?);
            (lo..=hi)
                .into_par_iter()
                .map(|a| step(i128::from(a)))
                .try_reduce(Tally::default, |x, y| Ok(x.merge(y)))
        } else {
            (lo..=hi).try_fold(Tally::default(), |acc, a| Ok(acc.merge(step(a)?)))
        }
    }

    /// Number of admissible constant terms; every `h^i` with `i ≥ 1`
    /// vanishes at 0, so this is the full range `[-H, H]`.
    fn constant_terms(&self) -> u128 {
        2 * self.height as u128 + 1
    }

    /// `a_m, ..., a_1` are fixed.
    fn finish(&self, s: &Coeffs, g: &Coeffs) -> Result<Tally> {
        match self.dedup {
            DedupMode::Canonical => {
                let keep = match &self.plan.check {
                    Check::None => true,
                    Check::NotEarlier(splits) => {
                        let f = &s[..=self.degree()];
                        !splits.iter().any(|sp| split_exists(f, sp.outer, sp.inner))
                    }
                    Check::OuterIndecomposable => self.outer_indecomposable(g),
                };
                let n0 = self.constant_terms();
                Ok(Tally {
                    count: if keep { n0 } else { 0 },
                    pairs: n0,
                    ..Tally::default()
                })
            }
            DedupMode::Set => {
                let flag = match self.plan.check {
                    Check::OuterIndecomposable => self.outer_indecomposable(g),
                    _ => true,
                };
                self.visit(0, s, g, flag)
            }
        }
    }

    fn record(&self, lo: i128, hi: i128, s: &Coeffs, flag: bool) -> Result<Tally> {
        let mut t = Tally::default();
        let mut f = s[..=self.degree()].to_vec();
        for a in lo..=hi {
            f[0] = ovf(s[0].checked_add(a))?;
            t.pairs += 1;
            *t.set.entry(f.clone().into_boxed_slice()).or_insert(false) |= flag;
        }
        Ok(t)
    }
}

/// Splits to enumerate and the filter attached to each.
fn plan_splits(q: &CountQuery, dedup: DedupMode) -> Vec<(Split, Check)> {
    match q.variant {
        Variant::Split(s) => vec![(s, Check::None)],
        Variant::Total => {
            let splits = splits_of(q.degree);
            splits
                .iter()
                .enumerate()
                .map(|(i, &s)| {
                    let check = match dedup {
                        DedupMode::Canonical if i > 0 => Check::NotEarlier(splits[..i].to_vec()),
                        _ => Check::None,
                    };
                    (s, check)
                })
                .collect()
        }
        Variant::IndecompPair => q
            .splits()
            .into_iter()
            .map(|s| {
                let check = if is_prime(s.outer) { Check::None } else { Check::OuterIndecomposable };
                (s, check)
            })
            .collect(),
    }
}

fn run(q: &CountQuery, dedup: DedupMode, pool: &rayon::ThreadPool) -> Result<(u128, u128)> {
    let mut tasks = Vec::new();
    for (split, check) in plan_splits(q, dedup) {
        for h in inner_candidates(split, q.height, q.monic, dedup == DedupMode::Canonical)? {
            tasks.push((split, check.clone(), h));
        }
    }
    let height = i128::from(q.height);
    let tally = pool.install(|| {
        tasks
            .par_iter()
            .map(|(split, check, h)| {
                let plan = Plan::new(*split, check.clone(), h)?;
                let bound = EnumBox::new(*split, q.height);
                let walker = Walker {
                    plan: &plan,
                    monic: q.monic,
                    height,
                    g_bound: bound.g_coeff_bounds[0].max(height),
                    dedup,
                };
                walker.visit(split.outer, &ZERO, &ZERO, true)
            })
            .try_reduce(Tally::default, |x, y| Ok(x.merge(y)))
    })?;
    let count = match (dedup, q.variant) {
        (DedupMode::Canonical, _) => tally.count,
        (DedupMode::Set, Variant::IndecompPair) => tally.set.values().filter(|&&f| f).count() as u128,
        (DedupMode::Set, _) => tally.set.len() as u128,
    };
    Ok((count, tally.pairs))
}

/// Counts by generating compositions from normalized pairs.
pub fn count_forward(q: &CountQuery, config: &CensusConfig) -> Result<CountResult> {
    q.validate()?;
    let pool = config.pool()?;
    let ((count, enumerated), elapsed) = timed(|| {
        if config.dedup == DedupMode::Set {
            let (distinct, _) = run(q, DedupMode::Canonical, &pool)?;
            if distinct > config.dedup_cap {
                return Err(CensusError::BudgetExceeded {
                    what: "dedup set",
                    estimate: distinct,
                    budget: config.dedup_cap,
                });
            }
        }
        run(q, config.dedup, &pool)
    })?;
    Ok(CountResult {
        count,
        query: *q,
        method: Method::Forward,
        elapsed_seconds: elapsed,
        workers: config.workers,
        enumerated,
    })
}

/// Calls `visit(split, g, h, f)` for every canonical pair generating a
/// polynomial counted by `q` (every split for `Total`), sequentially and
/// with the constant term of `g` enumerated explicitly. Returns the number
/// of pairs visited.
pub fn visit_pairs(q: &CountQuery, mut visit: impl FnMut(Split, &[i128], &[i128], &[i128])) -> Result<u128> {
    q.validate()?;
    let height = i128::from(q.height);
    let mut visited = 0u128;
    let splits = match q.variant {
        Variant::Total => splits_of(q.degree),
        _ => q.splits(),
    };
    for split in splits {
        for h in inner_candidates(split, q.height, q.monic, true)? {
            let plan = Plan::new(split, Check::None, &h)?;
            let walker = Walker {
                plan: &plan,
                monic: q.monic,
                height,
                g_bound: EnumBox::new(split, q.height).g_coeff_bounds[0].max(height),
                dedup: DedupMode::Set,
            };
            let mut stack = vec![(split.outer, ZERO, ZERO)];
            while let Some((level, s, g)) = stack.pop() {
                let Some((lo, hi)) = walker.interval(level, &s)? else { continue };
                for a in lo..=hi {
                    if level == split.outer && (a == 0 || (q.monic && a != 1)) {
                        continue;
                    }
                    let mut s2 = s;
                    for (sj, &pj) in s2[..=level * split.inner].iter_mut().zip(&plan.powers[level]) {
                        *sj = ovf(sj.checked_add(ovf(a.checked_mul(pj))?))?;
                    }
                    let mut g2 = g;
                    g2[level] = a;
                    if level == 0 {
                        visited += 1;
                        visit(split, &g2[..=split.outer], &h, &s2[..=split.degree()]);
                    } else {
                        stack.push((level - 1, s2, g2));
                    }
                }
            }
        }
    }
    Ok(visited)
}
