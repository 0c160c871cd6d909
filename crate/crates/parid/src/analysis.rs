//! Turning raw degree sequences into checkable statistics: histograms and
//! ccdfs, sup-norm distance to the limiting law and its decay in `t`, Hill
//! tail-index estimates, the weight-ccdf lower bound on the degree ccdf, and
//! the fractional-moment scalings that govern the infinite-mean regime.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::engine::{ModelParams, Process};
use crate::error::{Error, Result};
use crate::regress;
use crate::rng::{stream, StreamKind};
use crate::theory::TheoreticalDegreeDistribution;
use crate::weights::WeightDistribution;

/// Degree histogram of one snapshot: `N_k`, `p_k = N_k/(t+1)` and suffix
/// counts `N_{≥k}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalStats {
    t: u64,
    l_t: u64,
    /// Sorted distinct degrees and their counts.
    ks: Vec<u64>,
    counts: Vec<u64>,
    /// suffix[i] = Σ_{j ≥ i} counts[j].
    suffix: Vec<u64>,
}

impl EmpiricalStats {
    pub fn from_degrees(t: u64, l_t: u64, degrees: &[u64]) -> Self {
        let mut map = BTreeMap::new();
        for &d in degrees {
            *map.entry(d).or_insert(0u64) += 1;
        }
        let ks: Vec<u64> = map.keys().copied().collect();
        let counts: Vec<u64> = map.values().copied().collect();
        let mut suffix = counts.clone();
        for i in (0..suffix.len().saturating_sub(1)).rev() {
            suffix[i] += suffix[i + 1];
        }
        EmpiricalStats {
            t,
            l_t,
            ks,
            counts,
            suffix,
        }
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn l_t(&self) -> u64 {
        self.l_t
    }

    pub fn vertex_count(&self) -> u64 {
        self.t + 1
    }

    /// Iterate `(k, N_k)` in increasing k.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.ks.iter().copied().zip(self.counts.iter().copied())
    }

    pub fn n_k(&self, k: u64) -> u64 {
        match self.ks.binary_search(&k) {
            Ok(i) => self.counts[i],
            Err(_) => 0,
        }
    }

    pub fn p_k(&self, k: u64) -> f64 {
        self.n_k(k) as f64 / (self.t + 1) as f64
    }

    /// `N_{≥k}`.
    pub fn n_geq(&self, k: u64) -> u64 {
        let i = self.ks.partition_point(|&x| x < k);
        if i == self.suffix.len() {
            0
        } else {
            self.suffix[i]
        }
    }

    pub fn p_geq(&self, k: u64) -> f64 {
        self.n_geq(k) as f64 / (self.t + 1) as f64
    }

    pub fn max_degree(&self) -> u64 {
        *self.ks.last().unwrap()
    }

    /// Exact integer identities every snapshot must satisfy.
    pub fn check_identities(&self) {
        let total: u64 = self.counts.iter().sum();
        assert_eq!(total, self.t + 1, "counts must sum to the vertex count");
        let weighted: u64 = self.iter().map(|(k, n)| k * n).sum();
        assert_eq!(weighted, 2 * self.l_t, "Σ k N_k must equal 2 L_t");
        assert_eq!(self.n_geq(1), self.t + 1, "no vertex has degree zero");
    }
}

/// Per-degree mean and variance of `p_k` (and of the raw counts) across
/// replications, merged in replication order.
#[derive(Debug, Clone, Default)]
pub struct ReplicationAggregate {
    reps: u64,
    sums: BTreeMap<u64, (f64, f64)>, // Σ p_k, Σ p_k²
    count_sums: BTreeMap<u64, (f64, f64)>,
}

impl ReplicationAggregate {
    pub fn from_stats<'a, I: IntoIterator<Item = &'a EmpiricalStats>>(stats: I) -> Self {
        let mut agg = ReplicationAggregate::default();
        for s in stats {
            agg.push(s);
        }
        agg
    }

    pub fn push(&mut self, s: &EmpiricalStats) {
        self.reps += 1;
        for (k, n) in s.iter() {
            let p = n as f64 / s.vertex_count() as f64;
            let e = self.sums.entry(k).or_insert((0.0, 0.0));
            e.0 += p;
            e.1 += p * p;
            let c = self.count_sums.entry(k).or_insert((0.0, 0.0));
            c.0 += n as f64;
            c.1 += (n as f64) * (n as f64);
        }
    }

    pub fn reps(&self) -> u64 {
        self.reps
    }

    pub fn degrees(&self) -> impl Iterator<Item = u64> + '_ {
        self.sums.keys().copied()
    }

    /// Mean of `p_k` over all replications (absent degrees count as zero).
    pub fn mean_p(&self, k: u64) -> f64 {
        self.sums.get(&k).map_or(0.0, |e| e.0 / self.reps as f64)
    }

    pub fn var_p(&self, k: u64) -> f64 {
        let (s, s2) = self.sums.get(&k).copied().unwrap_or((0.0, 0.0));
        let n = self.reps as f64;
        if self.reps < 2 {
            return 0.0;
        }
        ((s2 - s * s / n) / (n - 1.0)).max(0.0)
    }

    pub fn mean_count(&self, k: u64) -> f64 {
        self.count_sums
            .get(&k)
            .map_or(0.0, |e| e.0 / self.reps as f64)
    }

    pub fn var_count(&self, k: u64) -> f64 {
        let (s, s2) = self.count_sums.get(&k).copied().unwrap_or((0.0, 0.0));
        let n = self.reps as f64;
        if self.reps < 2 {
            return 0.0;
        }
        ((s2 - s * s / n) / (n - 1.0)).max(0.0)
    }

    /// Σ_k mean p_k — must be 1 up to rounding.
    pub fn total_mean_mass(&self) -> f64 {
        self.sums.values().map(|e| e.0).sum::<f64>() / self.reps as f64
    }
}

/// Run `reps` independent replications in parallel; results are merged in
/// replication order, so the output is deterministic.
pub fn replicate<T: Send, F: Fn(u64) -> T + Sync + Send>(reps: u64, f: F) -> Vec<T> {
    (0..reps).into_par_iter().map(f).collect()
}

/// `max_k |p_k(t) - p_k|` between a snapshot and the limiting law.
///
/// Beyond the theory cutoff the pointwise distance is bounded by the larger
/// of the observed mass and the residual theory mass, and that bound joins
/// the maximum.
pub fn sup_norm_deviation(emp: &EmpiricalStats, theory: &TheoreticalDegreeDistribution) -> f64 {
    let k_max = theory.k_max();
    let mut sup: f64 = 0.0;
    let mut ei = 0usize;
    for k in 1..=k_max {
        let observed = if ei < emp.ks.len() && emp.ks[ei] == k {
            let n = emp.counts[ei];
            ei += 1;
            n as f64 / emp.vertex_count() as f64
        } else {
            0.0
        };
        sup = sup.max((observed - theory.p_k(k)).abs());
    }
    while ei < emp.ks.len() {
        let p = emp.counts[ei] as f64 / emp.vertex_count() as f64;
        sup = sup.max(p.max(theory.tail_mass()));
        ei += 1;
    }
    sup
}

/// Mean sup-norm deviation at each requested time, across replications.
pub fn sup_norm_series(
    params: &ModelParams,
    theory: &TheoreticalDegreeDistribution,
    times: &[u64],
    reps: u64,
) -> Result<Vec<(f64, f64)>> {
    let per_rep: Vec<Vec<f64>> = replicate(reps, |rep| {
        let (_, snaps) = crate::engine::run(params, rep, times).expect("validated params");
        snaps
            .iter()
            .map(|s| sup_norm_deviation(s, theory))
            .collect()
    });
    Ok(times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mean = per_rep.iter().map(|v| v[i]).sum::<f64>() / reps as f64;
            (t as f64, mean)
        })
        .collect())
}

/// Fitted decay exponent: the negative log-log slope of `(t, value)` pairs.
/// Zero values are dropped; fewer than two surviving points is an error.
pub fn decay_exponent(series: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|&&(_, v)| v > 0.0)
        .map(|&(t, v)| (t.ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InvalidArgument(
            "decay fit needs at least two positive values".into(),
        ));
    }
    Ok(-regress::slope(&pts))
}

/// Hill tail-index estimate from the `top_k` largest order statistics:
/// `τ̂ = 1 + [ mean_{i ≤ top_k} ln(X_(i)/X_(top_k+1)) ]^{-1}`.
///
/// Returns `+∞` when the top values are all equal (zero log spacings).
pub fn hill_estimator(sample: &[u64], top_k: usize) -> Result<f64> {
    if top_k < 1 {
        return Err(Error::InvalidArgument("top_k must be at least 1".into()));
    }
    if top_k + 1 > sample.len() {
        return Err(Error::InvalidArgument(format!(
            "top_k + 1 = {} exceeds the sample size {}",
            top_k + 1,
            sample.len()
        )));
    }
    let mut sorted = sample.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let pivot = sorted[top_k] as f64;
    debug_assert!(pivot >= 1.0);
    let mean_log: f64 = sorted[..top_k]
        .iter()
        .map(|&x| (x as f64 / pivot).ln())
        .sum::<f64>()
        / top_k as f64;
    if mean_log <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 + 1.0 / mean_log)
}

/// Mean Hill estimate on the top fraction of the final degree sequence,
/// across replications.
pub fn hill_over_reps(params: &ModelParams, top_frac: f64, reps: u64) -> Result<f64> {
    if !(top_frac > 0.0 && top_frac < 1.0) {
        return Err(Error::InvalidArgument(
            "top fraction must lie in (0, 1)".into(),
        ));
    }
    params.validate()?;
    let estimates: Vec<f64> = replicate(reps, |rep| {
        let (state, _) = crate::engine::run(params, rep, &[]).expect("validated params");
        let n = state.degrees().len();
        let top_k = ((n as f64 * top_frac) as usize).clamp(1, n - 1);
        hill_estimator(state.degrees(), top_k).expect("top_k is in range")
    });
    Ok(estimates.iter().sum::<f64>() / reps as f64)
}

/// Outcome of the weight-ccdf lower-bound check.
#[derive(Debug, Clone)]
pub struct CcdfBoundReport {
    /// Number of degrees k where the bound failed beyond the slack.
    pub violations: u64,
    /// Worst shortfall (positive = violation size); zero if none.
    pub max_shortfall: f64,
    pub checked_up_to: u64,
}

/// Verify `p_{≥k}(t) ≥ ccdf_W(k-1) · t/(t+1) − 3σ_k` for every k, where σ_k
/// is the binomial deviation of the weight-count lower bound.
pub fn ccdf_lower_bound_check(
    emp: &EmpiricalStats,
    weights: &WeightDistribution,
) -> CcdfBoundReport {
    let t = emp.t() as f64;
    let mut violations = 0;
    let mut max_shortfall: f64 = 0.0;
    let mut k = 1u64;
    loop {
        let q = weights.tail_at(k - 1); // P(W ≥ k)
        let sigma = (t * q * (1.0 - q)).sqrt() / (t + 1.0);
        let bound = q * t / (t + 1.0) - 3.0 * sigma;
        if bound <= 0.0 && k > 1 {
            // The bound's sign flips exactly once (q is nonincreasing), so it
            // is vacuous for every larger k.
            break;
        }
        let shortfall = bound - emp.p_geq(k);
        if shortfall > 0.0 {
            violations += 1;
            max_shortfall = max_shortfall.max(shortfall);
        }
        k += 1;
    }
    CcdfBoundReport {
        violations,
        max_shortfall,
        checked_up_to: k,
    }
}

/// One probe vertex's Monte-Carlo moment estimate.
#[derive(Debug, Clone)]
pub struct ProbeMoment {
    pub vertex: u64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone)]
pub struct FractionalMomentReport {
    pub s: f64,
    pub t_max: u64,
    pub probes: Vec<ProbeMoment>,
    /// Log-log slope of the per-probe means against the vertex index;
    /// absent with fewer than two probes.
    pub slope: Option<f64>,
    /// `-s/(τ_W - 1)`, the index scaling of the moment envelope.
    pub expected_slope: f64,
}

/// Monte-Carlo `E[d_i(t_max)^s]` for each probe vertex, from fresh
/// independent replications, plus the fitted index-scaling slope.
pub fn fractional_moment_scaling(
    params: &ModelParams,
    s: f64,
    probe_vertices: &[u64],
    reps: u64,
) -> Result<FractionalMomentReport> {
    params.validate()?;
    let tau_w = params.weights.tau_w();
    if !(tau_w > 1.0 && tau_w < 2.0) {
        return Err(Error::UnsupportedRegime(format!(
            "fractional-moment scaling needs a weight tail exponent in (1,2), got {tau_w}"
        )));
    }
    if !(s >= 0.0 && s < tau_w - 1.0) {
        return Err(Error::InvalidArgument(format!(
            "moment order must satisfy 0 <= s < τ_W - 1 = {}, got {s}",
            tau_w - 1.0
        )));
    }
    if probe_vertices.is_empty() {
        return Err(Error::InvalidArgument("no probe vertices given".into()));
    }
    for &i in probe_vertices {
        if i > params.t_max {
            return Err(Error::InvalidArgument(format!(
                "probe vertex {i} is born after t_max = {}",
                params.t_max
            )));
        }
    }

    let per_rep: Vec<Vec<f64>> = replicate(reps, |rep| {
        let mut proc = Process::new(params.clone(), rep).expect("validated params");
        proc.run_to(params.t_max);
        probe_vertices
            .iter()
            .map(|&i| (proc.state().degree(i as usize) as f64).powf(s))
            .collect()
    });

    let mut probes = Vec::with_capacity(probe_vertices.len());
    for (j, &i) in probe_vertices.iter().enumerate() {
        let vals: Vec<f64> = per_rep.iter().map(|v| v[j]).collect();
        let mean = vals.iter().sum::<f64>() / reps as f64;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps as f64 - 1.0);
        probes.push(ProbeMoment {
            vertex: i,
            mean,
            stderr: (var / reps as f64).sqrt(),
        });
    }
    let pts: Vec<(f64, f64)> = probes
        .iter()
        .map(|p| ((p.vertex.max(1) as f64).ln(), p.mean.ln()))
        .collect();
    let slope = (pts.len() >= 2).then(|| regress::slope(&pts));
    Ok(FractionalMomentReport {
        s,
        t_max: params.t_max,
        probes,
        slope,
        expected_slope: -s / (tau_w - 1.0),
    })
}

#[derive(Debug, Clone)]
pub struct NormingMomentRow {
    pub t: u64,
    pub a_t: u64,
    pub mean_pos: f64,
    pub mean_neg: f64,
    /// `E[L_t^s] / a_t^s` — should stabilize to a constant.
    pub ratio_pos: f64,
    /// `E[L_t^{-s}] · a_t^s` — should stay bounded.
    pub ratio_neg: f64,
}

#[derive(Debug, Clone)]
pub struct NormingMomentReport {
    pub s: f64,
    pub rows: Vec<NormingMomentRow>,
}

/// Monte-Carlo fractional moments of `L_t = Σ W_i` against the norming
/// sequence `a_t`, at each requested time.
pub fn norming_moment_check(
    weights: &WeightDistribution,
    s: f64,
    t_values: &[u64],
    reps: u64,
    seed: u64,
) -> Result<NormingMomentReport> {
    let tau_w = weights.tau_w();
    if !(tau_w > 1.0 && tau_w < 2.0) {
        return Err(Error::UnsupportedRegime(format!(
            "norming-moment check needs a weight tail exponent in (1,2), got {tau_w}"
        )));
    }
    if !(s > 0.0 && s < tau_w - 1.0) {
        return Err(Error::InvalidArgument(format!(
            "moment order must satisfy 0 < s < τ_W - 1 = {}, got {s}",
            tau_w - 1.0
        )));
    }
    let mut ts = t_values.to_vec();
    ts.sort_unstable();
    ts.dedup();
    if ts.is_empty() || ts[0] == 0 {
        return Err(Error::InvalidArgument(
            "t values must be positive integers".into(),
        ));
    }

    // One pass per replication, recording L_t at each checkpoint.
    let t_last = *ts.last().unwrap();
    let sums: Vec<(f64, f64)> = replicate(reps, |rep| {
        let mut rng = stream(seed, rep, StreamKind::Weights);
        let mut l: u64 = 0;
        let mut out = Vec::with_capacity(ts.len());
        let mut next = 0usize;
        for t in 1..=t_last {
            l = l.saturating_add(weights.sample(&mut rng));
            if next < ts.len() && ts[next] == t {
                out.push(l);
                next += 1;
            }
        }
        out
    })
    .into_iter()
    .fold(vec![(0.0, 0.0); ts.len()], |mut acc, ls| {
        for (i, &l) in ls.iter().enumerate() {
            let lf = l as f64;
            acc[i].0 += lf.powf(s);
            acc[i].1 += lf.powf(-s);
        }
        acc
    });

    let rows = ts
        .iter()
        .zip(&sums)
        .map(|(&t, &(pos, neg))| {
            let a_t = weights.norming_quantile(t).value;
            let at_s = (a_t as f64).powf(s);
            let mean_pos = pos / reps as f64;
            let mean_neg = neg / reps as f64;
            NormingMomentRow {
                t,
                a_t,
                mean_pos,
                mean_neg,
                ratio_pos: mean_pos / at_s,
                ratio_neg: mean_neg * at_s,
            }
        })
        .collect();
    Ok(NormingMomentReport { s, rows })
}
