//! Multivariate Faà di Bruno combinatorics.
//!
//! `enumerate_fdb(m, k)` lists every index tuple of the expansion of the
//! k-th spatial derivative of a composite `g(v, v', ..., v^(n))` with
//! `m = n + 1` inner arguments: block sizes `l_1 < ... < l_s`, an `s x m`
//! multiplicity matrix `k[j][q]`, the multi-index `lambda` of the outer
//! derivative (the column sums), and the exact coefficient
//!
//! ```text
//!   k! / prod_{j,q} ( k[j][q]! * (l_j!)^{k[j][q]} )
//! ```
//!
//! kept as a rational so downstream weights do not drift. Tables are
//! memoized per `(m, k)` and shared; a configurable size cap guards memory
//! because derivative orders can grow without bound along a tree path.
//!
//! Term order is canonical and platform-independent: ascending by
//! `(|lambda|, lambda, s, parts, k-matrix)`, all lexicographic.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, OnceLock};

use dashmap::DashMap;
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;

/// One term of the multivariate Faà di Bruno expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct FdbTerm {
    /// Exact combinatorial coefficient, always a positive integer.
    pub coefficient: BigRational,
    /// Outer multi-index `(lambda_0, ..., lambda_{m-1})`; column sums of
    /// `k_matrix`.
    pub lambda: Vec<u32>,
    /// `s` rows of length `m`: `k_matrix[j][q]` is the multiplicity of the
    /// inner factor `v^(q + l_j)` attributed to argument `q`.
    pub k_matrix: Vec<Vec<u32>>,
    /// Strictly increasing block sizes `l_1 < ... < l_s`.
    pub parts: Vec<u32>,
    /// Number of distinct block sizes.
    pub s: u32,
}

impl FdbTerm {
    /// Row sum `|k_j|` of the multiplicity matrix.
    pub fn row_sum(&self, j: usize) -> u32 {
        self.k_matrix[j].iter().sum()
    }

    pub fn coefficient_f64(&self) -> f64 {
        big_rational_to_f64(&self.coefficient)
    }
}

pub fn big_rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().expect("rational out of f64 range")
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FdbError {
    #[error("Faa di Bruno table ({m},{k}) exceeds the cap of {cap} terms")]
    TableTooLarge { m: u32, k: u32, cap: usize },
}

static TABLE_CAP: AtomicUsize = AtomicUsize::new(1_000_000);

/// Sets the per-table term cap (default 10^6).
pub fn set_table_cap(cap: usize) {
    TABLE_CAP.store(cap, Ordering::Relaxed);
}

pub fn table_cap() -> usize {
    TABLE_CAP.load(Ordering::Relaxed)
}

/// All vectors of length `parts` with non-negative entries summing to
/// `total`, in lexicographic order.
pub fn compositions(total: u32, parts: u32) -> Vec<Vec<u32>> {
    assert!(parts >= 1, "compositions needs at least one part");
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(parts as usize);
    fn rec(total: u32, parts: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if parts == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            rec(total - first, parts - 1, prefix, out);
            prefix.pop();
        }
    }
    rec(total, parts, &mut prefix, &mut out);
    out
}

type TableCache = DashMap<(u32, u32), Arc<Vec<FdbTerm>>>;

fn tables() -> &'static TableCache {
    static TABLES: OnceLock<TableCache> = OnceLock::new();
    TABLES.get_or_init(DashMap::new)
}

/// The complete, duplicate-free Faà di Bruno table for `m` inner arguments
/// and derivative order `k`, memoized per `(m, k)`.
pub fn enumerate_fdb(m: u32, k: u32) -> Result<Arc<Vec<FdbTerm>>, FdbError> {
    assert!(m >= 1 && k >= 1, "enumerate_fdb needs m >= 1 and k >= 1");
    if let Some(t) = tables().get(&(m, k)) {
        return Ok(t.clone());
    }
    let built = Arc::new(build_table(m, k)?);
    // concurrent builders produce value-equal tables; first insert wins
    let entry = tables().entry((m, k)).or_insert(built);
    Ok(entry.clone())
}

fn build_table(m: u32, k: u32) -> Result<Vec<FdbTerm>, FdbError> {
    let cap = table_cap();
    let k_fact = factorial(k);
    let mut terms = Vec::new();

    for s in 1..=k {
        let mut parts = Vec::with_capacity(s as usize);
        choose_parts(m, k, s, 1, k, &mut parts, &mut terms, &k_fact, cap)?;
    }

    terms.sort_by(|a, b| {
        let ta: u32 = a.lambda.iter().sum();
        let tb: u32 = b.lambda.iter().sum();
        ta.cmp(&tb)
            .then_with(|| a.lambda.cmp(&b.lambda))
            .then_with(|| a.s.cmp(&b.s))
            .then_with(|| a.parts.cmp(&b.parts))
            .then_with(|| a.k_matrix.cmp(&b.k_matrix))
    });
    Ok(terms)
}

/// Picks strictly increasing block sizes, then the row sums, then the column
/// splits. `remaining` is the derivative order still to be absorbed.
#[allow(clippy::too_many_arguments)]
fn choose_parts(
    m: u32,
    k: u32,
    s_left: u32,
    min_l: u32,
    remaining: u32,
    parts: &mut Vec<u32>,
    terms: &mut Vec<FdbTerm>,
    k_fact: &BigUint,
    cap: usize,
) -> Result<(), FdbError> {
    // every part still to pick needs row sum >= 1, so a size `l` only fits
    // if l * s_left <= remaining
    let mut l = min_l;
    while l * s_left <= remaining && l <= k {
        parts.push(l);
        if s_left == 1 {
            // sizes fixed; decide the row sums
            let mut rows = Vec::with_capacity(parts.len());
            choose_rowsums(m, k, parts, remaining, 0, &mut rows, terms, k_fact, cap)?;
        } else {
            choose_parts(m, k, s_left - 1, l + 1, remaining, parts, terms, k_fact, cap)?;
        }
        parts.pop();
        l += 1;
    }
    Ok(())
}

/// Distributes the remaining order over the chosen block sizes (row sums
/// `h_j >= 1` with sum h_j * l_j = remaining), then splits each row over the
/// `m` argument columns.
#[allow(clippy::too_many_arguments)]
#[allow(clippy::only_used_in_recursion)]
fn choose_rowsums(
    m: u32,
    k: u32,
    parts: &[u32],
    remaining: u32,
    j: usize,
    rowsums: &mut Vec<u32>,
    terms: &mut Vec<FdbTerm>,
    k_fact: &BigUint,
    cap: usize,
) -> Result<(), FdbError> {
    if j == parts.len() {
        if remaining == 0 {
            return emit_splits(m, k, parts, rowsums, terms, k_fact, cap);
        }
        return Ok(());
    }
    let l = parts[j];
    // later parts each need at least their size
    let tail_min: u32 = parts[j + 1..].iter().sum();
    let mut h = 1u32;
    while h * l + tail_min <= remaining {
        if j + 1 == parts.len() && h * l != remaining {
            h += 1;
            continue;
        }
        rowsums.push(h);
        choose_rowsums(m, k, parts, remaining - h * l, j + 1, rowsums, terms, k_fact, cap)?;
        rowsums.pop();
        h += 1;
    }
    Ok(())
}

fn emit_splits(
    m: u32,
    k: u32,
    parts: &[u32],
    rowsums: &[u32],
    terms: &mut Vec<FdbTerm>,
    k_fact: &BigUint,
    cap: usize,
) -> Result<(), FdbError> {
    let per_row: Vec<Vec<Vec<u32>>> = rowsums
        .iter()
        .map(|&h| compositions(h, m))
        .collect();
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(parts.len());
    #[allow(clippy::too_many_arguments)]
    fn rec(
        m: u32,
        k: u32,
        parts: &[u32],
        rowsums: &[u32],
        per_row: &[Vec<Vec<u32>>],
        rows: &mut Vec<Vec<u32>>,
        terms: &mut Vec<FdbTerm>,
        k_fact: &BigUint,
        cap: usize,
    ) -> Result<(), FdbError> {
        let j = rows.len();
        if j == parts.len() {
            if terms.len() >= cap {
                return Err(FdbError::TableTooLarge { m, k, cap });
            }
            let mut lambda = vec![0u32; m as usize];
            for row in rows.iter() {
                for (q, &v) in row.iter().enumerate() {
                    lambda[q] += v;
                }
            }
            let mut denom = BigUint::one();
            for (j, row) in rows.iter().enumerate() {
                denom *= factorial(parts[j]).pow(rowsums[j]);
                for &v in row {
                    denom *= factorial(v);
                }
            }
            let coefficient = BigRational::new(k_fact.clone().into(), denom.into());
            terms.push(FdbTerm {
                coefficient,
                lambda,
                k_matrix: rows.clone(),
                parts: parts.to_vec(),
                s: parts.len() as u32,
            });
            return Ok(());
        }
        for row in &per_row[j] {
            rows.push(row.clone());
            rec(m, k, parts, rowsums, per_row, rows, terms, k_fact, cap)?;
            rows.pop();
        }
        Ok(())
    }
    rec(m, k, parts, rowsums, &per_row, &mut rows, terms, k_fact, cap)
}

fn factorial(n: u32) -> BigUint {
    (1..=n as u64).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}
