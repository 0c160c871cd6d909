//! The limiting degree distribution and its power-law exponents.
//!
//! With finite-mean weights the limiting fraction of degree-k vertices solves
//!
//! ```text
//! p_k = ((k-1+δ)/θ) p_{k-1} - ((k+δ)/θ) p_k + r_k,      θ = 2 + δ/μ,
//! ```
//!
//! which rearranges to the stable forward recursion
//! `p_k = ((k-1+δ) p_{k-1} + θ r_k) / (k+δ+θ)` used here. For a point mass at
//! `m` the solution collapses to a ratio of gamma functions, implemented
//! independently as a cross-check. The degree exponent is the smaller of the
//! weight-tail exponent `τ_W` and the attachment exponent `τ_P = 3 + δ/μ`.

use crate::error::{Error, Result};
use crate::regress;
use crate::weights::{Mean, WeightDistribution};
use statrs::function::gamma::ln_gamma;

/// Exponent triple: weight tail, attachment-induced, and their minimum.
///
/// `tau_p` is undefined for infinite-mean weights; the degree law is then
/// expected to inherit `tau_w` directly, so `tau = tau_w` in that case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub tau_w: f64,
    pub tau_p: Option<f64>,
    pub tau: f64,
}

/// `{p_k}` evaluated up to a cutoff, plus the exponent triple.
#[derive(Debug, Clone)]
pub struct TheoreticalDegreeDistribution {
    theta: f64,
    delta: f64,
    min_support: u64,
    /// `p[k-1] = p_k` for `k = 1..=k_max`.
    p: Vec<f64>,
    tail_mass: f64,
    exponents: Exponents,
}

/// Exponents induced by a weight law and shift; total degree exponent is the
/// minimum of the two competing ones.
pub fn exponents(weights: &WeightDistribution, delta: f64) -> Exponents {
    let tau_w = weights.tau_w();
    match weights.mean() {
        Mean::Finite(mu) => {
            let tau_p = 3.0 + delta / mu;
            Exponents {
                tau_w,
                tau_p: Some(tau_p),
                tau: tau_w.min(tau_p),
            }
        }
        Mean::Infinite => Exponents {
            tau_w,
            tau_p: None,
            tau: tau_w,
        },
    }
}

/// Limiting `p_k` for `k = 1..=k_max` by the forward recursion.
pub fn limit_pk(
    weights: &WeightDistribution,
    delta: f64,
    k_max: u64,
) -> Result<TheoreticalDegreeDistribution> {
    let mu = weights.mean().finite().ok_or_else(|| {
        Error::UnsupportedRegime(
            "the limiting degree distribution requires finite-mean weights".into(),
        )
    })?;
    let min = weights.min_support();
    if !(delta + min as f64 > 0.0) {
        return Err(Error::Config(format!(
            "delta + min support must be positive, got delta = {delta} with min {min}"
        )));
    }
    if k_max < 1 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let theta = 2.0 + delta / mu;
    let mut p = vec![0.0; k_max as usize];
    let mut prev = 0.0;
    let mut sum = 0.0;
    for k in 1..=k_max {
        let rk = weights.pmf(k);
        let pk = if k < min {
            0.0
        } else {
            ((k as f64 - 1.0 + delta) * prev + theta * rk) / (k as f64 + delta + theta)
        };
        p[(k - 1) as usize] = pk;
        sum += pk;
        prev = pk;
    }
    Ok(TheoreticalDegreeDistribution {
        theta,
        delta,
        min_support: min,
        p,
        tail_mass: (1.0 - sum).max(0.0),
        exponents: exponents(weights, delta),
    })
}

/// Closed form for constant weight `m`:
/// `p_k = θ Γ(k+δ) Γ(m+δ+θ) / (Γ(m+δ) Γ(k+1+δ+θ))` for `k ≥ m`, zero below.
pub fn closed_form_constant(m: u64, delta: f64, k: u64) -> f64 {
    assert!(m >= 1 && k >= 1);
    assert!(
        delta + m as f64 > 0.0,
        "delta + m must be positive, got delta = {delta}, m = {m}"
    );
    if k < m {
        return 0.0;
    }
    let theta = 2.0 + delta / m as f64;
    // k >= m > -delta, so every gamma argument is positive.
    let log = theta.ln() + ln_gamma(k as f64 + delta) + ln_gamma(m as f64 + delta + theta)
        - ln_gamma(m as f64 + delta)
        - ln_gamma(k as f64 + 1.0 + delta + theta);
    log.exp()
}

impl TheoreticalDegreeDistribution {
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn k_max(&self) -> u64 {
        self.p.len() as u64
    }

    pub fn min_support(&self) -> u64 {
        self.min_support
    }

    /// `p_k`; zero for `k < min support` and for `k > k_max` (the mass beyond
    /// the cutoff is reported as `tail_mass`, not extrapolated).
    pub fn p_k(&self, k: u64) -> f64 {
        if k == 0 || k > self.p.len() as u64 {
            0.0
        } else {
            self.p[(k - 1) as usize]
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.p
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn exponents(&self) -> Exponents {
        self.exponents
    }

    /// Least-squares slope of `log p_k` against `log k` over `[k_lo, k_hi]`;
    /// the diagnostic for `p_k ~ c k^{-τ}`.
    pub fn asymptotic_slope(&self, k_lo: u64, k_hi: u64) -> Result<f64> {
        if !(k_lo < k_hi && k_hi <= self.p.len() as u64 && k_lo >= 1) {
            return Err(Error::InvalidArgument(format!(
                "slope range [{k_lo}, {k_hi}] outside 1..={}",
                self.p.len()
            )));
        }
        let mut pts = Vec::with_capacity((k_hi - k_lo + 1) as usize);
        for k in k_lo..=k_hi {
            let pk = self.p_k(k);
            if pk <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "p_{k} vanishes inside the slope range"
                )));
            }
            pts.push(((k as f64).ln(), pk.ln()));
        }
        Ok(regress::slope(&pts))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn w(spec: &str) -> WeightDistribution {
        spec.parse().unwrap()
    }

    #[test]
    fn unit_weights_give_the_classic_sequence() {
        // For m = 1, δ = 0 the closed form is 4/(k(k+1)(k+2)).
        let d = limit_pk(&w("const:m=1"), 0.0, 1000).unwrap();
        assert_abs_diff_eq!(d.p_k(1), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.p_k(2), 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.p_k(3), 1.0 / 15.0, epsilon = 1e-15);
        for k in [1u64, 2, 7, 100, 999] {
            let kf = k as f64;
            assert_abs_diff_eq!(
                d.p_k(k),
                4.0 / (kf * (kf + 1.0) * (kf + 2.0)),
                epsilon = 1e-14
            );
        }
        assert_abs_diff_eq!(closed_form_constant(1, 0.0, 2), 1.0 / 6.0, epsilon = 1e-15);
    }

    #[test]
    fn mass_below_the_minimum_weight_is_zero() {
        let d = limit_pk(&w("const:m=2"), 0.0, 100).unwrap();
        assert_eq!(d.p_k(1), 0.0);
        assert!(d.p_k(2) > 0.0);
        assert_eq!(closed_form_constant(2, 0.0, 1), 0.0);
    }

    #[test]
    fn recursion_matches_closed_form_everywhere() {
        for m in [1u64, 2, 3, 5] {
            for delta in [-0.5, 0.0, 1.0, 2.5] {
                if delta + m as f64 <= 0.0 {
                    continue;
                }
                let d = limit_pk(&w(&format!("const:m={m}")), delta, 2000).unwrap();
                for k in (m..=2000).step_by(97) {
                    let a = d.p_k(k);
                    let b = closed_form_constant(m, delta, k);
                    assert!(
                        (a - b).abs() <= 1e-10 * b.max(1e-300),
                        "m={m} delta={delta} k={k}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn fixed_point_residual_is_tiny() {
        for (spec, delta) in [
            ("const:m=1", 0.0),
            ("const:m=3", -0.5),
            ("explicit:1=0.5,2=0.5", 1.0),
            ("zeta:tau=2.5,kmin=1", 0.0),
        ] {
            let wd = w(spec);
            let mu = wd.mean().finite().unwrap();
            let theta = 2.0 + delta / mu;
            let d = limit_pk(&wd, delta, 5000).unwrap();
            for k in 1..=5000u64 {
                let res = d.p_k(k) - (k as f64 - 1.0 + delta) / theta * d.p_k(k - 1)
                    + (k as f64 + delta) / theta * d.p_k(k)
                    - wd.pmf(k);
                assert!(
                    res.abs() <= 1e-12,
                    "{spec} delta={delta} k={k}: residual {res}"
                );
            }
        }
    }

    #[test]
    fn normalization_approaches_one_from_below() {
        let wd = w("explicit:1=0.5,2=0.5");
        let mut prev = 0.0;
        for k_max in [10u64, 100, 1000, 10000] {
            let d = limit_pk(&wd, 0.0, k_max).unwrap();
            let total: f64 = d.values().iter().sum();
            assert!(total >= prev - 1e-14);
            assert!(d.tail_mass() >= 0.0);
            assert_abs_diff_eq!(total + d.tail_mass(), 1.0, epsilon = 1e-10);
            prev = total;
        }
        let d = limit_pk(&wd, 0.0, 10000).unwrap();
        assert!(
            d.values().iter().sum::<f64>() >= 1.0 - 1e-3,
            "mass within k <= 1e4 should be nearly all of it"
        );
    }

    #[test]
    fn exponent_triples() {
        let e = exponents(&w("const:m=1"), 0.0);
        assert_eq!(e.tau_w, f64::INFINITY);
        assert_eq!(e.tau_p, Some(3.0));
        assert_eq!(e.tau, 3.0);

        let e = exponents(&w("zeta:tau=2.5,kmin=1"), 0.0);
        assert_abs_diff_eq!(e.tau_w, 2.5);
        assert_eq!(e.tau_p, Some(3.0));
        assert_abs_diff_eq!(e.tau, 2.5);

        let e = exponents(&w("const:m=2"), -1.0);
        assert_eq!(e.tau_p, Some(2.5));
        assert_eq!(e.tau, 2.5);

        // Infinite mean: only the weight exponent survives.
        let e = exponents(&w("zeta:tau=1.5,kmin=1"), 0.0);
        assert_eq!(e.tau_p, None);
        assert_abs_diff_eq!(e.tau, 1.5);

        assert!(matches!(
            limit_pk(&w("zeta:tau=1.5,kmin=1"), 0.0, 100),
            Err(Error::UnsupportedRegime(_))
        ));
    }

    #[test]
    fn tau_p_increases_with_delta() {
        let wd = w("const:m=2");
        let mut prev = f64::NEG_INFINITY;
        for delta in [-1.5, -0.5, 0.0, 1.0, 3.0] {
            let tau_p = exponents(&wd, delta).tau_p.unwrap();
            assert!(tau_p > prev);
            prev = tau_p;
        }
    }

    #[test]
    fn slope_tracks_the_exponent_for_mixed_weights() {
        // Finite-support weights with a shift: the degree exponent is the
        // attachment one, 3 + delta/mu.
        let wd = w("explicit:1=0.5,2=0.5");
        let delta = 1.0;
        let e = exponents(&wd, delta);
        assert_abs_diff_eq!(e.tau, 3.0 + delta / 1.5, epsilon = 1e-12);
        let d = limit_pk(&wd, delta, 30_000).unwrap();
        let s = d.asymptotic_slope(300, 30_000).unwrap();
        assert!((s + e.tau).abs() < 0.1, "slope {s} vs -tau {}", -e.tau);
    }

    #[test]
    fn slope_diagnostics() {
        let d = limit_pk(&w("const:m=1"), 0.0, 10_000).unwrap();
        let s = d.asymptotic_slope(100, 10_000).unwrap();
        assert!((s + 3.0).abs() < 0.05, "slope {s}");

        let d = limit_pk(&w("zeta:tau=2.5,kmin=1"), 0.0, 10_000).unwrap();
        let s = d.asymptotic_slope(100, 10_000).unwrap();
        assert!((s + 2.5).abs() < 0.1, "slope {s}");

        // Two equal consecutive values give slope zero exactly.
        let mut d = limit_pk(&w("const:m=1"), 0.0, 10).unwrap();
        d.p[4] = d.p[3];
        assert_abs_diff_eq!(d.asymptotic_slope(4, 5).unwrap(), 0.0, epsilon = 1e-12);

        // Errors: bad range, zero mass in range.
        assert!(d.asymptotic_slope(5, 5).is_err());
        assert!(d.asymptotic_slope(5, 11).is_err());
        let d2 = limit_pk(&w("const:m=3"), 0.0, 10).unwrap();
        assert!(d2.asymptotic_slope(1, 5).is_err());
    }
}
