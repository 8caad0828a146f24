//! Exact sieves for the multiplication table and divisor counts, plus the
//! closed-form estimates and bounds that accompany them.
//!
//! All logarithms are natural logarithms.

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::sizeset::SizeSet;

/// Largest dense bit-vector a sieve may allocate.
pub const DENSE_SIEVE_LIMIT: u64 = 1_000_000_000;

/// Segment width for sieves past [`DENSE_SIEVE_LIMIT`].
pub const SEGMENT_BITS: u64 = 1 << 26;

/// Ford's exponent δ = 1 − (1 + ln ln 2)/ln 2 ≈ 0.086.
pub fn ford_delta() -> f64 {
    let ln2 = std::f64::consts::LN_2;
    1.0 - (1.0 + ln2.ln()) / ln2
}

fn table_bits(a: u64, b: u64) -> Result<u64> {
    let top = a.checked_mul(b).ok_or(Error::TooLarge {
        what: "table size",
        requested: u64::MAX,
        limit: DENSE_SIEVE_LIMIT,
    })?;
    if top >= DENSE_SIEVE_LIMIT {
        return Err(Error::TooLarge {
            what: "table size",
            requested: top + 1,
            limit: DENSE_SIEVE_LIMIT,
        });
    }
    Ok(top)
}

/// Products `i·j` with `0 <= i <= a`, `0 <= j <= b`.
pub fn product_table(a: u64, b: u64) -> Result<SizeSet> {
    let top = table_bits(a, b)?;
    let (small, large) = (a.min(b), a.max(b));
    let mut bits = BitSet::new(top as usize + 1);
    bits.insert(0);
    let square = small == large;
    for i in 1..=small {
        // In a square table j < i was already marked as j·i.
        let start = if square { i } else { 1 };
        let mut v = i * start;
        for _ in start..=large {
            bits.insert(v as usize);
            v += i;
        }
    }
    Ok(SizeSet::from_bits(bits))
}

/// M(n) = { a·b : 0 <= a, b <= n }, including 0.
pub fn multiplication_table(n: u64) -> Result<SizeSet> {
    product_table(n, n)
}

/// |{ i·j : 0 <= i <= a, 0 <= j <= b }| without materializing the table.
/// Tables past the dense limit are sieved in parallel segments of
/// `segment_bits` values.
pub fn product_count(a: u64, b: u64) -> Result<u64> {
    match table_bits(a, b) {
        Ok(_) => Ok(product_table(a, b)?.cardinality()),
        Err(_) => product_count_segmented(a, b, SEGMENT_BITS),
    }
}

/// Segmented form of [`product_count`]; exact for any segment width.
pub fn product_count_segmented(a: u64, b: u64, segment_bits: u64) -> Result<u64> {
    assert!(segment_bits > 0);
    let top = a.checked_mul(b).ok_or(Error::TooLarge {
        what: "table size",
        requested: u64::MAX,
        limit: u64::MAX,
    })?;
    if top == 0 {
        return Ok(1);
    }
    let (small, large) = (a.min(b), a.max(b));
    let square = small == large;
    let segments = top.div_ceil(segment_bits);
    let positive: u64 = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = s * segment_bits + 1;
            let hi = ((s + 1) * segment_bits).min(top);
            let mut words = vec![0u64; (hi - lo + 1).div_ceil(64) as usize];
            for i in 1..=small.min(hi) {
                // In a square table j < i was already marked as j·i.
                let j_lo = lo.div_ceil(i).max(if square { i } else { 1 });
                let j_hi = (hi / i).min(large);
                if j_lo > j_hi {
                    continue;
                }
                let mut off = j_lo * i - lo;
                let end = j_hi * i - lo;
                while off <= end {
                    words[(off >> 6) as usize] |= 1 << (off & 63);
                    off += i;
                }
            }
            words.iter().map(|w| w.count_ones() as u64).sum::<u64>()
        })
        .sum();
    Ok(positive + 1)
}

/// Φ(K_{a,b}) = |{ i·j : 0 <= i <= a, 0 <= j <= b }|.
pub fn phi_complete_bipartite(a: u64, b: u64) -> Result<u64> {
    Ok(product_table(a, b)?.cardinality())
}

fn divisor_range(y: f64, z: f64) -> Option<(u64, u64)> {
    // Integers d with y < d <= z, d >= 1.
    let lo = if y < 0.0 { 1 } else { (y.floor() as u64).saturating_add(1) };
    if z < 1.0 {
        return None;
    }
    let hi = z.floor() as u64;
    (lo <= hi).then_some((lo, hi))
}

/// H(x, y, z): the number of `1 <= n <= x` having a divisor `d` with
/// `y < d <= z`. Exact; multiples of every admissible `d` are marked in a
/// sieve and counted.
pub fn hxyz(x: u64, y: f64, z: f64) -> u64 {
    if x <= DENSE_SIEVE_LIMIT {
        hxyz_dense(x, y, z)
    } else {
        hxyz_segmented(x, y, z, SEGMENT_BITS)
    }
}

fn hxyz_dense(x: u64, y: f64, z: f64) -> u64 {
    let Some((lo, hi)) = divisor_range(y, z) else {
        return 0;
    };
    let hi = hi.min(x);
    if lo > hi {
        return 0;
    }
    let mut marked = BitSet::new(x as usize + 1);
    for d in lo..=hi {
        // A multiple of a smaller admissible divisor is already marked.
        if marked.contains(d as usize) {
            continue;
        }
        let mut v = d;
        while v <= x {
            marked.insert(v as usize);
            v += d;
        }
    }
    marked.count_ones() as u64
}

/// Segmented H(x, y, z); segments are sieved in parallel and the counts
/// summed, so the result matches the dense sieve exactly.
pub fn hxyz_segmented(x: u64, y: f64, z: f64, segment_bits: u64) -> u64 {
    assert!(segment_bits > 0);
    let Some((lo, hi)) = divisor_range(y, z) else {
        return 0;
    };
    let hi = hi.min(x);
    if lo > hi || x == 0 {
        return 0;
    }
    let segments = x.div_ceil(segment_bits);
    (0..segments)
        .into_par_iter()
        .map(|s| {
            // Values seg_lo..=seg_hi, with n = seg_lo + offset.
            let seg_lo = s * segment_bits + 1;
            let seg_hi = ((s + 1) * segment_bits).min(x);
            let mut marked = BitSet::new((seg_hi - seg_lo + 1) as usize);
            for d in lo..=hi.min(seg_hi) {
                let first = seg_lo.div_ceil(d).max(1) * d;
                let mut v = first;
                while v <= seg_hi {
                    marked.insert((v - seg_lo) as usize);
                    v += d;
                }
            }
            marked.count_ones() as u64
        })
        .sum()
}

/// n² / ((ln n)^δ (ln ln n)^{3/2}), the order of magnitude of |M(n)|.
pub fn ford_estimate(n: u64) -> Result<f64> {
    if n < 16 {
        return Err(Error::param("n", format!("must be >= 16 so that ln ln n > 0, got {n}")));
    }
    let nf = n as f64;
    let ln = nf.ln();
    Ok(nf * nf / (ln.powf(ford_delta()) * ln.ln().powf(1.5)))
}

/// Bounds on the number of positive products `i·j`, `i <= d`, `j <= m/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sandwich {
    /// H(m/4, d/4, d/2).
    pub lower: u64,
    /// Σ_k H(m/2^k, d/2^{k+1}, d/2^k).
    pub upper: u64,
}

impl Sandwich {
    /// Checks the bounds against Φ(K_{d,m/d}). The bounds count positive
    /// products only, so the product 0 is removed from `phi` first.
    pub fn brackets(&self, phi: u64) -> bool {
        let positive = phi.saturating_sub(1);
        self.lower <= positive && positive <= self.upper
    }
}

pub fn phi_sandwich(d: u64, m: u64) -> Result<Sandwich> {
    if d == 0 || !m.is_multiple_of(d) {
        return Err(Error::param("d", format!("must divide m = {m}, got {d}")));
    }
    if d.saturating_mul(d) > m {
        return Err(Error::param("d", format!("must be <= sqrt(m) = {:.3}, got {d}", (m as f64).sqrt())));
    }
    let df = d as f64;
    let lower = hxyz(m / 4, df / 4.0, df / 2.0);
    let mut upper = 0;
    let mut k = 0u32;
    while k < 64 && (m >> k) >= 1 {
        let scale = (1u64 << k) as f64;
        upper += hxyz(m >> k, df / (2.0 * scale), df / scale);
        k += 1;
    }
    Ok(Sandwich { lower, upper })
}

/// C(p+q, p), an upper bound on the bipartite Ramsey number b(p, q).
pub fn bipartite_ramsey_upper(p: u64, q: u64) -> Result<BigUint> {
    if p == 0 || q == 0 {
        return Err(Error::param("p, q", "must both be >= 1"));
    }
    Ok(binomial(p + q, p.min(q)))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k.min(n));
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinomialGrowth {
    /// (k·e)^{c·ln n / ln k}.
    pub bound: f64,
    pub sqrt_n: f64,
    /// Whether the bound is below √n.
    pub is_small: bool,
}

pub fn binomial_growth_check(n: u64, c: f64, k: u64) -> Result<BinomialGrowth> {
    if n < 3 || k < 3 {
        return Err(Error::param("n, k", "must both be >= 3"));
    }
    if !(c > 0.0 && c < 1.0 / 6.0) {
        return Err(Error::param("c", format!("must lie in (0, 1/6), got {c}")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let bound = (kf * std::f64::consts::E).powf(c * nf.ln() / kf.ln());
    let sqrt_n = nf.sqrt();
    Ok(BinomialGrowth {
        bound,
        sqrt_n,
        is_small: bound < sqrt_n,
    })
}

/// Natural log of the union bound 2·C(n,k)²·2^{−k²} with k = C·ln n.
///
/// The binomial is evaluated through the log-gamma function so that `k`
/// need not be an integer. Returns `None` when k > n (the event is empty).
pub fn ramsey_probability_bound_ln(n: u64, c: f64) -> Result<Option<f64>> {
    if n < 3 {
        return Err(Error::param("n", format!("must be >= 3, got {n}")));
    }
    if c.is_nan() || c <= 0.0 {
        return Err(Error::param("C", format!("must be > 0, got {c}")));
    }
    let nf = n as f64;
    let k = c * nf.ln();
    if k > nf {
        return Ok(None);
    }
    let ln_binom = ln_gamma(nf + 1.0) - ln_gamma(k + 1.0) - ln_gamma(nf - k + 1.0);
    Ok(Some(std::f64::consts::LN_2 + 2.0 * ln_binom - k * k * std::f64::consts::LN_2))
}

/// 2·C(n,k)²·2^{−k²} with k = C·ln n; 0 when k > n. Underflows to 0 for large
/// `n`; use [`ramsey_probability_bound_ln`] to compare such values.
pub fn ramsey_probability_bound(n: u64, c: f64) -> Result<f64> {
    Ok(ramsey_probability_bound_ln(n, c)?.map_or(0.0, f64::exp))
}
