//! Exact counts of decomposable integer polynomials of fixed degree and
//! bounded height.
//!
//! Two independent routes produce every count: [`count_bruteforce`] walks
//! the whole coefficient box and tests each polynomial, and
//! [`count_forward`] generates compositions `g ∘ h` from normalized pairs
//! and prunes the outer polynomial coefficient by coefficient.

mod forward;
mod oracle;

use std::fmt;
use std::time::Instant;

use thiserror::Error;

use crate::asymptotics::spf;
use crate::decompose::{splits_of, DecomposeError};
pub use crate::decompose::Split;

pub use forward::{count_forward, inner_candidates, visit_pairs};
pub use oracle::{count_bruteforce, scan_box};

/// Forward enumeration keeps coefficient vectors on the stack up to this degree.
pub const MAX_DEGREE: usize = 32;

pub const DEFAULT_ORACLE_BUDGET: u128 = 100_000_000;
pub const DEFAULT_DEDUP_CAP: u128 = 200_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("{what} needs about {estimate} entries, over the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        estimate: u128,
        budget: u128,
    },
    #[error("integer overflow during enumeration")]
    Overflow,
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error("thread pool: {0}")]
    Pool(String),
}

pub type Result<T> = std::result::Result<T, CensusError>;

/// Which count a query asks for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Decomposable through any split.
    Total,
    /// Decomposable with outer degree `m` and inner degree `n`.
    Split(Split),
    /// Has a witness `g ∘ h` with `deg g = d/ℓ`, `deg h = ℓ` and `g`
    /// indecomposable, where `ℓ` is the smallest prime factor of `d`.
    IndecompPair,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Total => "total",
            Variant::Split(_) => "split",
            Variant::IndecompPair => "indecomp_pair",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Split(s) => write!(f, "split:{s}"),
            Variant::IndecompPair => f.write_str("indecomp-pair"),
            Variant::Total => f.write_str("total"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountQuery {
    pub degree: usize,
    pub height: u64,
    pub monic: bool,
    pub variant: Variant,
}

impl CountQuery {
    pub fn new(degree: usize, height: u64, monic: bool, variant: Variant) -> Result<Self> {
        let q = Self { degree, height, monic, variant };
        q.validate()?;
        Ok(q)
    }

    pub fn total(degree: usize, height: u64, monic: bool) -> Self {
        Self { degree, height, monic, variant: Variant::Total }
    }

    pub fn validate(&self) -> Result<()> {
        if self.degree < 2 || self.height < 2 {
            return Err(CensusError::InvalidQuery(format!(
                "degree and height must be at least 2 (got d={}, H={})",
                self.degree, self.height
            )));
        }
        if self.degree > MAX_DEGREE {
            return Err(CensusError::InvalidQuery(format!(
                "degree {} exceeds the supported maximum {MAX_DEGREE}",
                self.degree
            )));
        }
        if i64::try_from(self.height).is_err() {
            return Err(CensusError::InvalidQuery("height exceeds i64".into()));
        }
        if let Variant::Split(s) = self.variant {
            if s.outer < 2 || s.inner < 2 || s.degree() != self.degree {
                return Err(CensusError::InvalidQuery(format!(
                    "split {s} does not factor degree {}",
                    self.degree
                )));
            }
        }
        Ok(())
    }

    /// The splits whose compositions this query counts.
    pub fn splits(&self) -> Vec<Split> {
        match self.variant {
            Variant::Split(s) => vec![s],
            Variant::Total => splits_of(self.degree),
            Variant::IndecompPair => dominant_split(self.degree).into_iter().collect(),
        }
    }

    /// `(m, n)` reported in output rows: the split itself, or the dominant
    /// split for the indecomposable-pair count.
    pub fn reported_split(&self) -> Option<Split> {
        match self.variant {
            Variant::Split(s) => Some(s),
            Variant::Total => None,
            Variant::IndecompPair => dominant_split(self.degree),
        }
    }
}

/// `(d/ℓ, ℓ)` for composite `d`.
pub fn dominant_split(d: usize) -> Option<Split> {
    let l = spf(d);
    (l < d).then(|| Split::new(d / l, l))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Oracle,
    Forward,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Oracle => "oracle",
            Method::Forward => "forward",
        }
    }
}

/// How the forward enumerator avoids counting a polynomial twice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DedupMode {
    /// Generate each polynomial from exactly one witness: primitive inner
    /// part within a split, and the first split in a fixed order across
    /// splits. Needs no memory beyond the recursion.
    #[default]
    Canonical,
    /// Generate every normalized pair and collect coefficient vectors in a
    /// hash set.
    Set,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusConfig {
    pub workers: usize,
    /// Largest coefficient box the oracle will walk.
    pub oracle_budget: u128,
    /// Largest dedup set the forward enumerator will build.
    pub dedup_cap: u128,
    pub dedup: DedupMode,
}

impl Default for CensusConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            oracle_budget: DEFAULT_ORACLE_BUDGET,
            dedup_cap: DEFAULT_DEDUP_CAP,
            dedup: DedupMode::Canonical,
        }
    }
}

impl CensusConfig {
    pub fn with_workers(workers: usize) -> Self {
        Self { workers, ..Self::default() }
    }

    pub(crate) fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers.max(1))
            .build()
            .map_err(|e| CensusError::Pool(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CountResult {
    pub count: u128,
    pub query: CountQuery,
    pub method: Method,
    pub elapsed_seconds: f64,
    pub workers: usize,
    /// Normalized `(g, h)` pairs generated (forward) or polynomials
    /// examined (oracle).
    pub enumerated: u128,
}

/// Explicit constants `(K₁, K₂)` for a split `(m, n)`, `d = m·n`:
///
/// * `|lead(g)|·H(h)^m ≤ K₁·H(f)` with `K₁ = 2^d·(n+1)^{m/2}`,
/// * `H(g) ≤ K₂·H(f)` with `K₂ = 2^m·(n+1)^{m/2}·√(d+1)`,
///
/// for every `f = g ∘ h` with `h(0) = 0`.
pub fn explicit_constants(split: Split) -> (f64, f64) {
    let (m, n) = (split.outer as f64, split.inner as f64);
    let d = m * n;
    let spread = (n + 1.0).powf(m / 2.0);
    let k1 = 2f64.powf(d) * spread;
    let k2 = 2f64.powf(m) * spread * (d + 1.0).sqrt();
    (k1, k2)
}

/// Coefficient box that contains every normalized decomposition of every
/// polynomial of height at most `height` through `split`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumBox {
    /// Bound on `H(h)` from `|lead(g)|·H(h)^m ≤ K₁·H`.
    pub b_max: i128,
    /// Bound on each coefficient of `g`, from `H(g) ≤ 2^m·K₁·H`.
    pub g_coeff_bounds: Vec<i128>,
    pub k1: f64,
    pub k2: f64,
}

impl EnumBox {
    pub fn new(split: Split, height: u64) -> Self {
        let (k1, k2) = explicit_constants(split);
        let m = split.outer as i32;
        let budget = k1 * height as f64;
        let mut b = budget.powf(1.0 / m as f64).floor().max(1.0);
        while (b + 1.0).powi(m) <= budget * (1.0 + 1e-12) {
            b += 1.0;
        }
        let g_bound = (2f64.powi(m) * budget).min(i64::MAX as f64).floor() as i128;
        Self {
            b_max: b as i128,
            g_coeff_bounds: vec![g_bound; split.outer + 1],
            k1,
            k2,
        }
    }
}

/// Runs `count_forward` over an ascending height grid, handing each row to
/// `on_row` as soon as it is available.
pub fn census_sweep(
    degree: usize,
    monic: bool,
    variant: Variant,
    grid: &[u64],
    method: Method,
    config: &CensusConfig,
    mut on_row: impl FnMut(&CountResult),
) -> Result<Vec<CountResult>> {
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CensusError::InvalidQuery("height grid must be strictly ascending".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &height in grid {
        let q = CountQuery::new(degree, height, monic, variant)?;
        let row = match method {
            Method::Forward => count_forward(&q, config)?,
            Method::Oracle => count_bruteforce(&q, config)?,
        };
        on_row(&row);
        rows.push(row);
    }
    Ok(rows)
}

pub(crate) fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let out = f()?;
    Ok((out, start.elapsed().as_secs_f64()))
}
