//! Initial-degree laws: the law of the i.i.d. positive-integer weights that
//! each arriving vertex brings into the graph.
//!
//! Three families are supported: a point mass (`const:m=3`), a zeta power law
//! `r_k ∝ k^{-τ_W}` on `k ≥ k_min` (`zeta:tau=2.5,kmin=1`), and an explicit
//! finite table (`explicit:1=0.5,2=0.5`). The zeta law keeps a ccdf table up
//! to the point where the remaining tail mass drops below 2⁻³² (capped in
//! size); past the table, inverse-cdf sampling bisects an Euler–Maclaurin
//! evaluation of the tail, which is accurate to f64 resolution. Distributions
//! are immutable after construction and safe to share across threads.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};

/// Tail mass below which the zeta cdf table stops: a single draw lands past
/// the table with probability smaller than the resolution of a 32-bit uniform.
const TABLE_TAIL_MASS: f64 = 1.0 / 4294967296.0; // 2^-32

/// Hard cap on the zeta table length (heavy tails would otherwise demand
/// astronomically long tables to reach `TABLE_TAIL_MASS`).
const TABLE_MAX_LEN: u64 = 1 << 20;

/// Largest value a zeta draw can return. For every admissible exponent the
/// mass beyond it is far below the resolution of one 64-bit uniform, and the
/// cap keeps downstream integer sums comfortably inside `u64`.
const SAMPLE_MAX: u64 = 1 << 60;

/// Mean of a weight law; heavy-tailed laws may not have one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mean {
    Finite(f64),
    Infinite,
}

impl Mean {
    pub fn is_finite(self) -> bool {
        matches!(self, Mean::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Mean::Finite(m) => Some(m),
            Mean::Infinite => None,
        }
    }
}

/// Descriptor of a weight law, as configured.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    Constant(u64),
    ZetaPowerLaw { tau_w: f64, k_min: u64 },
    Explicit(Vec<(u64, f64)>),
}

/// Result of the norming-quantile computation `a_n`.
///
/// `capped` is set when the law has bounded support and `n` is so large that
/// the quantile saturates at the largest support point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormingQuantile {
    pub value: u64,
    pub capped: bool,
}

#[derive(Debug)]
struct ZetaTables {
    tau: f64,
    k_min: u64,
    /// Normalizing constant Σ_{k ≥ k_min} k^{-τ}.
    norm: f64,
    /// Largest k covered by the table.
    table_last: u64,
    /// tail[j] = P(W > k_min - 1 + j); tail[0] = 1.
    tail: Vec<f64>,
}

#[derive(Debug)]
struct ExplicitTables {
    support: Vec<u64>,
    pmf: Vec<f64>,
    /// cum[i] = Σ_{j ≤ i} pmf[j]; last entry pinned to 1.
    cum: Vec<f64>,
    /// suffix[i] = Σ_{j ≥ i} pmf[j], summed backwards so tail masses keep
    /// full relative precision.
    suffix: Vec<f64>,
}

#[derive(Debug, Clone)]
enum Repr {
    Constant(u64),
    Zeta(Arc<ZetaTables>),
    Explicit(Arc<ExplicitTables>),
}

/// An initial-degree law together with its precomputed sampling tables.
#[derive(Debug, Clone)]
pub struct WeightDistribution {
    kind: WeightKind,
    repr: Repr,
    mean: Mean,
    min_support: u64,
    max_support: Option<u64>,
}

impl PartialEq for WeightDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

// ---------------------------------------------------------------------------
// Power-sum numerics.
// ---------------------------------------------------------------------------

/// Σ_{k=a}^∞ k^{-s} for s > 1, integer a ≥ 1, to ~1e-14 relative accuracy.
///
/// Terms below the cutoff are summed directly; the remainder uses the
/// Euler–Maclaurin expansion of the tail with Bernoulli terms through B_8.
fn power_tail_sum(s: f64, a: u64) -> f64 {
    debug_assert!(s > 1.0);
    debug_assert!(a >= 1);
    let cut = (64.0f64).max(4.0 * s).ceil() as u64;
    if a >= cut {
        return em_tail(s, a as f64);
    }
    let mut sum = 0.0;
    for k in a..cut {
        sum += (k as f64).powf(-s);
    }
    sum + em_tail(s, cut as f64)
}

/// Euler–Maclaurin tail Σ_{k=a}^∞ k^{-s} for a ≥ max(64, 4s).
fn em_tail(s: f64, a: f64) -> f64 {
    let inv = 1.0 / a;
    let pow = a.powf(-s); // a^{-s}
    let mut sum = pow * a / (s - 1.0); // ∫_a^∞ x^{-s} dx = a^{1-s}/(s-1)
    sum += 0.5 * pow;
    // B_2/2! * s * a^{-s-1}
    sum += s * pow * inv / 12.0;
    // -B_4/4! * s(s+1)(s+2) * a^{-s-3}
    sum -= s * (s + 1.0) * (s + 2.0) * pow * inv.powi(3) / 720.0;
    // B_6/6! * (s)_5 * a^{-s-5}
    sum += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * pow * inv.powi(5) / 30240.0;
    // -B_8/8! * (s)_7 * a^{-s-7}
    sum -= s
        * (s + 1.0)
        * (s + 2.0)
        * (s + 3.0)
        * (s + 4.0)
        * (s + 5.0)
        * (s + 6.0)
        * pow
        * inv.powi(7)
        / 1209600.0;
    sum
}

impl ZetaTables {
    fn new(tau: f64, k_min: u64) -> Self {
        let norm = power_tail_sum(tau, k_min);
        // Smallest k with tail mass below the threshold, capped in length.
        let mut lo = k_min;
        let mut hi = k_min.max(2);
        while Self::raw_tail(tau, norm, hi) >= TABLE_TAIL_MASS && hi < u64::MAX / 4 {
            lo = hi;
            hi *= 2;
        }
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if Self::raw_tail(tau, norm, mid) >= TABLE_TAIL_MASS {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let table_last = hi.min(k_min + TABLE_MAX_LEN);

        // Build P(W > k) backwards from the analytic seed so the deep table
        // entries keep full relative precision.
        let len = (table_last - k_min + 2) as usize;
        let mut tail = vec![0.0; len];
        tail[len - 1] = Self::raw_tail(tau, norm, table_last);
        for j in (0..len - 1).rev() {
            let k = k_min + j as u64; // tail[j] = P(W > k - 1) = tail[j+1] + pmf(k)
            tail[j] = tail[j + 1] + (k as f64).powf(-tau) / norm;
        }
        debug_assert!((tail[0] - 1.0).abs() < 1e-9);
        ZetaTables {
            tau,
            k_min,
            norm,
            table_last,
            tail,
        }
    }

    /// P(W > k) evaluated analytically (valid for any k ≥ k_min - 1).
    fn raw_tail(tau: f64, norm: f64, k: u64) -> f64 {
        power_tail_sum(tau, k + 1) / norm
    }

    /// P(W > k); uses the table where available.
    fn tail_at(&self, k: u64) -> f64 {
        if k < self.k_min {
            1.0
        } else if k <= self.table_last {
            self.tail[(k - self.k_min + 1) as usize]
        } else {
            Self::raw_tail(self.tau, self.norm, k)
        }
    }

    fn pmf(&self, k: u64) -> f64 {
        if k < self.k_min {
            0.0
        } else {
            (k as f64).powf(-self.tau) / self.norm
        }
    }

    /// Inverse-cdf draw: the smallest k ≥ k_min with P(W > k) ≤ d.
    fn invert(&self, d: f64) -> u64 {
        let last_idx = self.tail.len() - 1;
        if self.tail[last_idx] <= d {
            // Within the table. tail[1..] is decreasing; find the first entry ≤ d.
            let j = self.tail[1..].partition_point(|&t| t > d) + 1;
            return self.k_min + (j - 1) as u64;
        }
        // Past the table: bisect the analytic tail.
        let mut lo = self.table_last; // invariant: tail(lo) > d
        let mut hi = (self.table_last * 2).min(SAMPLE_MAX);
        while Self::raw_tail(self.tau, self.norm, hi) > d {
            if hi >= SAMPLE_MAX {
                return SAMPLE_MAX;
            }
            lo = hi;
            hi = (hi * 2).min(SAMPLE_MAX);
        }
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if Self::raw_tail(self.tau, self.norm, mid) > d {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

// ---------------------------------------------------------------------------
// Construction.
// ---------------------------------------------------------------------------

impl WeightDistribution {
    /// Point mass at `m ≥ 1`.
    pub fn constant(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidDistribution(
                "constant weight must be a positive integer".into(),
            ));
        }
        Ok(WeightDistribution {
            kind: WeightKind::Constant(m),
            repr: Repr::Constant(m),
            mean: Mean::Finite(m as f64),
            min_support: m,
            max_support: Some(m),
        })
    }

    /// Zeta power law `r_k = k^{-τ_W} / Z` on `k ≥ k_min`; requires `τ_W > 1`.
    pub fn zeta(tau_w: f64, k_min: u64) -> Result<Self> {
        if !(tau_w > 1.0 && tau_w <= 64.0) {
            return Err(Error::InvalidDistribution(format!(
                "zeta exponent must lie in (1, 64], got {tau_w}"
            )));
        }
        if k_min == 0 {
            return Err(Error::InvalidDistribution(
                "zeta k_min must be a positive integer".into(),
            ));
        }
        let tables = ZetaTables::new(tau_w, k_min);
        let mean = if tau_w > 2.0 {
            Mean::Finite(power_tail_sum(tau_w - 1.0, k_min) / tables.norm)
        } else {
            Mean::Infinite
        };
        Ok(WeightDistribution {
            kind: WeightKind::ZetaPowerLaw { tau_w, k_min },
            repr: Repr::Zeta(Arc::new(tables)),
            mean,
            min_support: k_min,
            max_support: None,
        })
    }

    /// Explicit pmf table; support must be strictly increasing positive
    /// integers and the masses must sum to 1 within 1e-12.
    pub fn explicit(pairs: Vec<(u64, f64)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidDistribution("explicit table is empty".into()));
        }
        let mut sum = 0.0;
        for (i, &(k, p)) in pairs.iter().enumerate() {
            if k == 0 {
                return Err(Error::InvalidDistribution(
                    "explicit support must be positive integers".into(),
                ));
            }
            if i > 0 && pairs[i - 1].0 >= k {
                return Err(Error::InvalidDistribution(
                    "explicit support must be strictly increasing".into(),
                ));
            }
            if !(p >= 0.0) {
                return Err(Error::InvalidDistribution(format!(
                    "explicit mass at k={k} must be nonnegative, got {p}"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "explicit masses sum to {sum}, expected 1 within 1e-12"
            )));
        }
        let min_support = pairs
            .iter()
            .find(|&&(_, p)| p > 0.0)
            .map(|&(k, _)| k)
            .ok_or_else(|| Error::InvalidDistribution("explicit table has no mass".into()))?;
        let max_support = pairs
            .iter()
            .rev()
            .find(|&&(_, p)| p > 0.0)
            .map(|&(k, _)| k)
            .unwrap();
        let mean = pairs.iter().map(|&(k, p)| k as f64 * p).sum();

        let support: Vec<u64> = pairs.iter().map(|&(k, _)| k).collect();
        let pmf: Vec<f64> = pairs.iter().map(|&(_, p)| p).collect();
        let mut cum = Vec::with_capacity(pmf.len());
        let mut acc = 0.0;
        for &p in &pmf {
            acc += p;
            cum.push(acc);
        }
        *cum.last_mut().unwrap() = 1.0;
        let mut suffix = pmf.clone();
        for i in (0..suffix.len().saturating_sub(1)).rev() {
            suffix[i] += suffix[i + 1];
        }

        Ok(WeightDistribution {
            kind: WeightKind::Explicit(pairs),
            repr: Repr::Explicit(Arc::new(ExplicitTables {
                support,
                pmf,
                cum,
                suffix,
            })),
            mean: Mean::Finite(mean),
            min_support,
            max_support: Some(max_support),
        })
    }
}

// ---------------------------------------------------------------------------
// Queries and sampling.
// ---------------------------------------------------------------------------

impl WeightDistribution {
    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    /// Smallest point of the support.
    pub fn min_support(&self) -> u64 {
        self.min_support
    }

    /// Largest point of the support, `None` when unbounded.
    pub fn max_support(&self) -> Option<u64> {
        self.max_support
    }

    /// μ = E\[W\], or the infinite marker.
    pub fn mean(&self) -> Mean {
        self.mean
    }

    /// Power-law exponent of the weight tail; ∞ for laws that decay faster
    /// than any power (point masses, finite tables).
    pub fn tau_w(&self) -> f64 {
        match self.kind {
            WeightKind::ZetaPowerLaw { tau_w, .. } => tau_w,
            _ => f64::INFINITY,
        }
    }

    /// r_k = P(W = k); zero off the support.
    pub fn pmf(&self, k: u64) -> f64 {
        match &self.repr {
            Repr::Constant(m) => {
                if k == *m {
                    1.0
                } else {
                    0.0
                }
            }
            Repr::Zeta(z) => z.pmf(k),
            Repr::Explicit(e) => match e.support.binary_search(&k) {
                Ok(i) => e.pmf[i],
                Err(_) => 0.0,
            },
        }
    }

    /// P(W > x), a right-continuous step function of the real argument.
    pub fn ccdf(&self, x: f64) -> f64 {
        if x < self.min_support as f64 {
            return 1.0;
        }
        let k = x.floor() as u64;
        self.tail_at(k)
    }

    /// P(W > k) at an integer threshold.
    pub fn tail_at(&self, k: u64) -> f64 {
        match &self.repr {
            Repr::Constant(m) => {
                if k < *m {
                    1.0
                } else {
                    0.0
                }
            }
            Repr::Zeta(z) => z.tail_at(k),
            Repr::Explicit(e) => {
                // Mass strictly above k.
                let i = e.support.partition_point(|&s| s <= k);
                if i == e.support.len() {
                    0.0
                } else {
                    e.suffix[i]
                }
            }
        }
    }

    /// One draw from the law.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match &self.repr {
            Repr::Constant(m) => *m,
            Repr::Zeta(z) => {
                let d = 1.0 - rng.random::<f64>(); // (0, 1]
                z.invert(d)
            }
            Repr::Explicit(e) => {
                let u = rng.random::<f64>();
                let i = e.cum.partition_point(|&c| c <= u);
                e.support[i.min(e.support.len() - 1)]
            }
        }
    }

    /// Norming quantile `a_n`: the largest integer k with `P(W ≥ k) ≥ 1/n`.
    ///
    /// Satisfies `P(W ≥ a_n) ≥ 1/n > P(W ≥ a_n + 1)` unless the law has
    /// bounded support and the quantile saturates there (`capped`).
    pub fn norming_quantile(&self, n: u64) -> NormingQuantile {
        assert!(n >= 1, "norming quantile requires n >= 1");
        let thr = 1.0 / n as f64;
        // P(W >= k) = tail_at(k - 1).
        if let Some(max) = self.max_support {
            if self.tail_at(max - 1) >= thr {
                return NormingQuantile {
                    value: max,
                    capped: self.pmf(max) > thr,
                };
            }
            // Largest k in [min_support, max) with tail_at(k-1) >= thr; k = min
            // always qualifies since tail_at(min-1) = 1.
            let (mut lo, mut hi) = (self.min_support, max);
            while lo + 1 < hi {
                let mid = lo + (hi - lo) / 2;
                if self.tail_at(mid - 1) >= thr {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return NormingQuantile {
                value: lo,
                capped: false,
            };
        }
        // Unbounded support: doubling bracket, then bisection.
        let mut lo = self.min_support; // tail_at(lo - 1) = 1 >= thr
        let mut hi = lo.saturating_mul(2).max(lo + 1);
        while self.tail_at(hi - 1) >= thr {
            if hi >= u64::MAX / 2 {
                return NormingQuantile {
                    value: hi,
                    capped: false,
                };
            }
            lo = hi;
            hi *= 2;
        }
        while lo + 1 < hi {
            let mid = lo + (hi - lo) / 2;
            if self.tail_at(mid - 1) >= thr {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        NormingQuantile {
            value: lo,
            capped: false,
        }
    }
}

// ---------------------------------------------------------------------------
// Spec strings: `const:m=3`, `zeta:tau=2.5,kmin=1`, `explicit:1=0.5,2=0.5`.
// ---------------------------------------------------------------------------

impl fmt::Display for WeightDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::Constant(m) => write!(f, "const:m={m}"),
            WeightKind::ZetaPowerLaw { tau_w, k_min } => {
                write!(f, "zeta:tau={tau_w},kmin={k_min}")
            }
            WeightKind::Explicit(pairs) => {
                write!(f, "explicit:")?;
                for (i, (k, p)) in pairs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{k}={p}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for WeightDistribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidDistribution(msg);
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| bad(format!("weight spec `{s}` is missing `:`")))?;
        let fields: Vec<(&str, &str)> = rest
            .split(',')
            .map(|kv| {
                kv.split_once('=')
                    .ok_or_else(|| bad(format!("expected key=value, got `{kv}` in `{s}`")))
            })
            .collect::<Result<_>>()?;
        match head {
            "const" => {
                let mut m = None;
                for (k, v) in fields {
                    match k {
                        "m" => m = Some(v.parse::<u64>().map_err(|e| bad(format!("m: {e}")))?),
                        other => return Err(bad(format!("unknown const key `{other}`"))),
                    }
                }
                WeightDistribution::constant(
                    m.ok_or_else(|| bad("const spec needs m=<int>".into()))?,
                )
            }
            "zeta" => {
                let (mut tau, mut kmin) = (None, 1u64);
                for (k, v) in fields {
                    match k {
                        "tau" => {
                            tau = Some(v.parse::<f64>().map_err(|e| bad(format!("tau: {e}")))?)
                        }
                        "kmin" => kmin = v.parse::<u64>().map_err(|e| bad(format!("kmin: {e}")))?,
                        other => return Err(bad(format!("unknown zeta key `{other}`"))),
                    }
                }
                WeightDistribution::zeta(
                    tau.ok_or_else(|| bad("zeta spec needs tau=<real>".into()))?,
                    kmin,
                )
            }
            "explicit" => {
                let mut pairs = Vec::with_capacity(fields.len());
                for (k, v) in fields {
                    let k = k
                        .parse::<u64>()
                        .map_err(|e| bad(format!("explicit key `{k}`: {e}")))?;
                    let p = v
                        .parse::<f64>()
                        .map_err(|e| bad(format!("explicit mass for k={k}: {e}")))?;
                    pairs.push((k, p));
                }
                WeightDistribution::explicit(pairs)
            }
            other => Err(bad(format!(
                "unknown weight kind `{other}` (expected const, zeta or explicit)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Independent oracle: Σ_{k=a}^N k^{-s} by brute force (smallest terms
    /// first, to keep the float sum accurate), with the integral tail bracket
    /// [(N+1)^{1-s}, N^{1-s}]/(s-1) averaged in.
    fn brute_power_tail(s: f64, a: u64) -> f64 {
        let n: u64 = 20_000_000;
        let mut sum = 0.0;
        for k in (a..=n).rev() {
            sum += (k as f64).powf(-s);
        }
        let lo = ((n + 1) as f64).powf(1.0 - s) / (s - 1.0);
        let hi = (n as f64).powf(1.0 - s) / (s - 1.0);
        sum + 0.5 * (lo + hi)
    }

    #[test]
    fn zeta_constants_match_brute_force() {
        // ζ(3) and ζ(2)/ζ(3); brute force is good to ~1e-15 relative here.
        let z3 = brute_power_tail(3.0, 1);
        let z2 = brute_power_tail(2.0, 1);
        assert_abs_diff_eq!(power_tail_sum(3.0, 1), z3, epsilon = 1e-12);
        assert_abs_diff_eq!(power_tail_sum(2.0, 1), z2, epsilon = 1e-11);

        let d = WeightDistribution::zeta(3.0, 1).unwrap();
        assert_abs_diff_eq!(d.pmf(2), 0.125 / z3, epsilon = 1e-12);
        assert_abs_diff_eq!(d.mean().finite().unwrap(), z2 / z3, epsilon = 1e-11);
        assert_abs_diff_eq!(d.ccdf(1.0), 1.0 - 1.0 / z3, epsilon = 1e-12);
    }

    #[test]
    fn constant_law_basics() {
        let d = WeightDistribution::constant(3).unwrap();
        assert_eq!(d.pmf(3), 1.0);
        assert_eq!(d.pmf(2), 0.0);
        assert_eq!(d.pmf(0), 0.0);
        assert_eq!(d.ccdf(2.5), 1.0);
        assert_eq!(d.ccdf(3.0), 0.0);
        assert_eq!(d.ccdf(0.0), 1.0);
        assert_eq!(d.mean(), Mean::Finite(3.0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(WeightDistribution::constant(5).unwrap().sample(&mut rng), 5);
    }

    #[test]
    fn infinite_mean_detection() {
        assert_eq!(
            WeightDistribution::zeta(1.5, 1).unwrap().mean(),
            Mean::Infinite
        );
        assert_eq!(
            WeightDistribution::zeta(2.0, 1).unwrap().mean(),
            Mean::Infinite
        );
        assert!(WeightDistribution::zeta(2.5, 1).unwrap().mean().is_finite());
    }

    #[test]
    fn explicit_validation() {
        assert!(WeightDistribution::explicit(vec![(1, 0.5), (2, 0.5)]).is_ok());
        assert!(WeightDistribution::explicit(vec![(2, 0.5), (1, 0.5)]).is_err());
        assert!(WeightDistribution::explicit(vec![(1, 0.6), (2, 0.5)]).is_err());
        assert!(WeightDistribution::explicit(vec![(0, 1.0)]).is_err());
        assert!(WeightDistribution::explicit(vec![]).is_err());

        // Zero-mass entries are tolerated but do not count as support.
        let d = WeightDistribution::explicit(vec![(1, 0.0), (2, 0.75), (9, 0.25)]).unwrap();
        assert_eq!(d.min_support(), 2);
        assert_eq!(d.max_support(), Some(9));
        assert_eq!(d.pmf(1), 0.0);
        assert_eq!(d.ccdf(0.0), 1.0);
        assert_eq!(d.ccdf(1.0), 1.0);
    }

    #[test]
    fn explicit_sample_mean_within_three_sigma() {
        let d = WeightDistribution::explicit(vec![(1, 0.5), (2, 0.5)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000u64;
        let sum: u64 = (0..n).map(|_| d.sample(&mut rng)).sum();
        let mean = sum as f64 / n as f64;
        // sd of one draw is 0.5, so 3 sigma of the mean is 0.0015.
        assert!(
            (mean - 1.5).abs() < 0.0015,
            "sample mean {mean} too far from 1.5"
        );
    }

    #[test]
    fn zeta_empirical_ccdf_matches_exact() {
        let d = WeightDistribution::zeta(2.5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 1_000_000u64;
        let mut above_10 = 0u64;
        for _ in 0..n {
            if d.sample(&mut rng) > 10 {
                above_10 += 1;
            }
        }
        let emp = above_10 as f64 / n as f64;
        assert!(
            (emp - d.ccdf(10.0)).abs() < 0.003,
            "empirical ccdf at 10: {emp} vs exact {}",
            d.ccdf(10.0)
        );
    }

    #[test]
    fn sample_histogram_total_variation() {
        for spec in ["zeta:tau=2.5,kmin=1", "explicit:1=0.25,3=0.5,7=0.25"] {
            let d: WeightDistribution = spec.parse().unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let n = 1_000_000u64;
            let mut counts = std::collections::BTreeMap::<u64, u64>::new();
            for _ in 0..n {
                *counts.entry(d.sample(&mut rng)).or_insert(0) += 1;
            }
            // TV distance = 1/2 Σ |p̂ - p|, including mass we never sampled.
            let mut tv = 0.0;
            let mut covered = 0.0;
            for (&k, &c) in &counts {
                tv += (c as f64 / n as f64 - d.pmf(k)).abs();
                covered += d.pmf(k);
            }
            tv += 1.0 - covered;
            tv *= 0.5;
            assert!(tv <= 0.005, "{spec}: TV distance {tv} exceeds 0.005");
        }
    }

    #[test]
    fn norming_quantile_examples() {
        let c = WeightDistribution::constant(3).unwrap();
        assert_eq!(
            c.norming_quantile(10),
            NormingQuantile {
                value: 3,
                capped: true
            }
        );
        let e = WeightDistribution::explicit(vec![(1, 0.9), (10, 0.1)]).unwrap();
        assert_eq!(
            e.norming_quantile(10),
            NormingQuantile {
                value: 10,
                capped: false
            }
        );
        assert_eq!(
            e.norming_quantile(11),
            NormingQuantile {
                value: 10,
                capped: true
            }
        );
        assert_eq!(
            e.norming_quantile(5),
            NormingQuantile {
                value: 1,
                capped: false
            }
        );
    }

    #[test]
    fn norming_quantile_matches_brute_scan() {
        let d = WeightDistribution::zeta(2.5, 1).unwrap();
        let n = 10_000u64;
        let q = d.norming_quantile(n).value;
        // Brute-force scan of P(W >= k) over the integers.
        let thr = 1.0 / n as f64;
        let mut expect = 1;
        for k in 1..100_000u64 {
            if d.tail_at(k - 1) >= thr {
                expect = k;
            } else {
                break;
            }
        }
        assert_eq!(q, expect);
        assert!(d.tail_at(q - 1) >= thr);
        assert!(d.tail_at(q) < thr);
    }

    #[test]
    fn log_ccdf_slope_matches_tail_exponent() {
        for tau in [1.5, 2.5, 4.0] {
            let d = WeightDistribution::zeta(tau, 1).unwrap();
            let pts: Vec<(f64, f64)> = (0..=40)
                .map(|i| {
                    let x = 100.0 * (10000.0f64 / 100.0).powf(i as f64 / 40.0);
                    (x.ln(), d.ccdf(x).ln())
                })
                .collect();
            let n = pts.len() as f64;
            let sx: f64 = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let sy: f64 = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let slope: f64 = pts.iter().map(|p| (p.0 - sx) * (p.1 - sy)).sum::<f64>()
                / pts.iter().map(|p| (p.0 - sx).powi(2)).sum::<f64>();
            assert!(
                (slope - (1.0 - tau)).abs() < 0.05,
                "tau={tau}: slope {slope} vs {}",
                1.0 - tau
            );
        }
    }

    #[test]
    fn spec_string_round_trip() {
        for s in [
            "const:m=3",
            "zeta:tau=2.5,kmin=1",
            "explicit:1=0.5,2=0.5",
            "zeta:tau=1.5,kmin=2",
        ] {
            let d: WeightDistribution = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
            let d2: WeightDistribution = d.to_string().parse().unwrap();
            assert_eq!(d, d2);
        }
        assert!("zeta:tau=1".parse::<WeightDistribution>().is_err());
        assert!("gauss:mu=1".parse::<WeightDistribution>().is_err());
        assert!("const:m=0".parse::<WeightDistribution>().is_err());
    }

    proptest! {
        #[test]
        fn ccdf_is_monotone_and_normalized(tau in 1.1f64..6.0, kmin in 1u64..4) {
            let d = WeightDistribution::zeta(tau, kmin).unwrap();
            prop_assert_eq!(d.ccdf(0.0), 1.0);
            let mut prev = 1.0;
            for k in 0..200u64 {
                let c = d.tail_at(k);
                prop_assert!(c <= prev + 1e-15);
                prev = c;
            }
            // Σ pmf over a long prefix + analytic tail accounts for all mass.
            let head: f64 = (1..=5000u64).map(|k| d.pmf(k)).sum();
            prop_assert!((head + d.tail_at(5000) - 1.0).abs() < 1e-10);
        }

        #[test]
        fn explicit_pmf_sums_to_one(masses in proptest::collection::vec(0.01f64..1.0, 1..8)) {
            let total: f64 = masses.iter().sum();
            let pairs: Vec<(u64, f64)> = masses
                .iter()
                .enumerate()
                .map(|(i, &m)| ((i as u64 + 1) * 2, m / total))
                .collect();
            let mut pairs = pairs;
            let correction: f64 = 1.0 - pairs.iter().map(|p| p.1).sum::<f64>();
            pairs.last_mut().unwrap().1 += correction;
            let d = WeightDistribution::explicit(pairs.clone()).unwrap();
            let s: f64 = pairs.iter().map(|&(k, _)| d.pmf(k)).sum();
            prop_assert!((s - 1.0).abs() < 1e-10);
            let q = d.norming_quantile(7);
            prop_assert!(d.tail_at(q.value - 1) >= 1.0 / 7.0 || q.capped);
            if !q.capped && Some(q.value) != d.max_support() {
                prop_assert!(d.tail_at(q.value) < 1.0 / 7.0);
            }
        }
    }
}
