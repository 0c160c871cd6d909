//! Truncation coupling. The process `G` runs jointly with a copy `G'` whose
//! initial degrees are capped at `t_max^a`; both consume the same weight
//! stream. Each shared edge attaches to the same vertex in both graphs with
//! probability `Σ_i min(p_i, p'_i)` (a maximal coupling of the endpoint
//! laws); otherwise it is miscoupled and each graph draws independently from
//! its renormalized residual. An edge numbered past the cap exists only in
//! `G` and contributes 2 to the miscoupled count — both its in- and out-edge
//! join the miscoupled set.

use std::collections::BTreeSet;

use rand::Rng;

use crate::analysis::EmpiricalStats;
use crate::engine::{AttachmentRule, ModelParams};
use crate::error::{Error, Result};
use crate::fenwick::SamplerTree;
use crate::rng::{stream, StreamKind};

const REBUILD_EVERY: u64 = 1 << 20;

#[derive(Debug, Clone)]
pub struct CouplingStats {
    /// Truncation exponent.
    pub a: f64,
    /// Cap `⌊t_max^a⌋` applied to the initial degrees of `G'`.
    pub cap: u64,
    /// `u_trajectory[s]` = miscoupled-edge count after step `s`; index 0 is 0.
    pub u_trajectory: Vec<u64>,
}

impl CouplingStats {
    pub fn u_final(&self) -> u64 {
        *self.u_trajectory.last().unwrap()
    }
}

/// Outcome of a coupled run: the miscoupling trajectory plus both final
/// degree sequences.
#[derive(Debug, Clone)]
pub struct CoupledRun {
    pub stats: CouplingStats,
    pub full_degrees: Vec<u64>,
    pub truncated_degrees: Vec<u64>,
    pub l_full: u64,
    pub l_truncated: u64,
    t: u64,
}

impl CoupledRun {
    pub fn full_stats(&self) -> EmpiricalStats {
        EmpiricalStats::from_degrees(self.t, self.l_full, &self.full_degrees)
    }

    pub fn truncated_stats(&self) -> EmpiricalStats {
        EmpiricalStats::from_degrees(self.t, self.l_truncated, &self.truncated_degrees)
    }
}

struct Core {
    degrees: Vec<u64>,
    l: u64,
    sampler: SamplerTree,
    delta: f64,
}

impl Core {
    fn new(w1: u64, delta: f64) -> Self {
        let sampler = SamplerTree::from_weights([w1 as f64 + delta, w1 as f64 + delta]);
        Core {
            degrees: vec![w1, w1],
            l: w1,
            sampler,
            delta,
        }
    }

    fn add_hit(&mut self, i: usize, c: u64) {
        self.degrees[i] += c;
        self.sampler.add(i, c as f64);
    }

    fn push_vertex(&mut self, w: u64) {
        self.degrees.push(w);
        self.sampler.append(w as f64 + self.delta);
        self.l += w;
    }

    fn maybe_rebuild(&mut self, t_next: u64) {
        let expected = 2.0 * self.l as f64 + t_next as f64 * self.delta;
        let drift = (self.sampler.total() - expected).abs() > 1e-6 * expected;
        if drift || self.sampler.updates_since_rebuild() >= REBUILD_EVERY {
            let delta = self.delta;
            let w: Vec<f64> = self.degrees.iter().map(|&d| d as f64 + delta).collect();
            self.sampler.rebuild_from(w);
        }
    }
}

/// Evolve `G` and its truncated copy to `params.t_max` under the shared
/// weight stream, returning the miscoupling trajectory and both graphs.
pub fn coupled_run(params: &ModelParams, a: f64, rep: u64) -> Result<CoupledRun> {
    params.validate()?;
    if !matches!(params.rule, AttachmentRule::Parid) {
        return Err(Error::Config(
            "the coupled run is defined for the plain attachment rule".into(),
        ));
    }
    if !(a > 0.0 && a < 0.5) {
        return Err(Error::Config(format!(
            "truncation exponent must lie in (0, 1/2), got {a}"
        )));
    }
    let cap = (params.t_max as f64).powf(a).floor().max(1.0) as u64;
    let eff_min = params.weights.min_support().min(cap);
    if !(params.delta + eff_min as f64 > 0.0) {
        return Err(Error::Config(format!(
            "truncation cap {cap} makes delta + min weight nonpositive in the capped process"
        )));
    }

    let mut weight_rng = stream(params.seed, rep, StreamKind::Weights);
    let mut edge_rng = stream(params.seed, rep, StreamKind::Coupling);

    let w1 = params.weights.sample(&mut weight_rng);
    let w1c = w1.min(cap);
    let mut g = Core::new(w1, params.delta);
    let mut gp = Core::new(w1c, params.delta);

    // Vertices whose degrees differ between the two graphs.
    let mut divergent: BTreeSet<usize> = BTreeSet::new();
    let mut u: u64 = 0;
    if w1 > w1c {
        u += 2 * (w1 - w1c);
        divergent.insert(0);
        divergent.insert(1);
    }
    let mut trajectory = Vec::with_capacity(params.t_max as usize + 1);
    trajectory.push(0);
    trajectory.push(u);

    let mut hits_g: Vec<(usize, u64)> = Vec::new();
    let mut hits_gp: Vec<(usize, u64)> = Vec::new();

    for s in 2..=params.t_max {
        g.maybe_rebuild(s);
        gp.maybe_rebuild(s);

        let w = params.weights.sample(&mut weight_rng);
        let wc = w.min(cap);

        let d_tot = 2.0 * g.l as f64 + s as f64 * params.delta;
        let dp_tot = 2.0 * gp.l as f64 + s as f64 * params.delta;

        // Shared mass: non-divergent vertices always have p_i <= p'_i (the
        // full graph has at least as many edges), so min = p_i there; the
        // divergent ones are walked explicitly.
        let mut sd = 0.0; // Σ_{i divergent} (d_i + δ) in G
        let mut min_div = 0.0; // Σ_{i divergent} min(p_i, p'_i)
        for &i in &divergent {
            let wi = g.degrees[i] as f64 + params.delta;
            let wpi = gp.degrees[i] as f64 + params.delta;
            sd += wi;
            min_div += (wi / d_tot).min(wpi / dp_tot);
        }
        let nondiv_shared = ((d_tot - sd) / d_tot).max(0.0);
        let shared = nondiv_shared + min_div;
        let q = (1.0 - shared).max(0.0);

        hits_g.clear();
        hits_gp.clear();
        let add = |hits: &mut Vec<(usize, u64)>, i: usize| {
            // Steps touch few distinct vertices; linear scan beats a map.
            if let Some(e) = hits.iter_mut().find(|e| e.0 == i) {
                e.1 += 1;
            } else {
                hits.push((i, 1));
            }
        };

        for _ in 0..wc {
            let coin: f64 = edge_rng.random();
            if coin < shared {
                let r = edge_rng.random::<f64>() * shared;
                let i = if r < nondiv_shared || divergent.is_empty() {
                    loop {
                        let i = g.sampler.sample(&mut edge_rng);
                        if !divergent.contains(&i) {
                            break i;
                        }
                    }
                } else {
                    let mut target = r - nondiv_shared;
                    let mut chosen = *divergent.iter().next_back().unwrap();
                    for &i in &divergent {
                        let wi = g.degrees[i] as f64 + params.delta;
                        let wpi = gp.degrees[i] as f64 + params.delta;
                        let m = (wi / d_tot).min(wpi / dp_tot);
                        if target < m {
                            chosen = i;
                            break;
                        }
                        target -= m;
                    }
                    chosen
                };
                add(&mut hits_g, i);
                add(&mut hits_gp, i);
            } else {
                // Miscoupled: each graph draws from its renormalized residual.
                u += 1;
                // G residual lives on the divergent set only.
                let mut target = edge_rng.random::<f64>() * q;
                let mut tg = *divergent.iter().next_back().unwrap();
                for &i in &divergent {
                    let res = (g.degrees[i] as f64 + params.delta) / d_tot - {
                        let wi = g.degrees[i] as f64 + params.delta;
                        let wpi = gp.degrees[i] as f64 + params.delta;
                        (wi / d_tot).min(wpi / dp_tot)
                    };
                    if target < res {
                        tg = i;
                        break;
                    }
                    target -= res;
                }
                // G' residual: a uniform excess over the non-divergent set
                // (its normalizer is smaller) plus the divergent part.
                let m_nondiv = (d_tot - sd) * (d_tot - dp_tot) / (d_tot * dp_tot);
                let r2 = edge_rng.random::<f64>() * q;
                let tp = if r2 < m_nondiv || divergent.is_empty() {
                    loop {
                        let i = gp.sampler.sample(&mut edge_rng);
                        if !divergent.contains(&i) {
                            break i;
                        }
                    }
                } else {
                    let mut target = r2 - m_nondiv;
                    let mut chosen = *divergent.iter().next_back().unwrap();
                    for &i in &divergent {
                        let wi = g.degrees[i] as f64 + params.delta;
                        let wpi = gp.degrees[i] as f64 + params.delta;
                        let res = wpi / dp_tot - (wi / d_tot).min(wpi / dp_tot);
                        if target < res {
                            chosen = i;
                            break;
                        }
                        target -= res;
                    }
                    chosen
                };
                add(&mut hits_g, tg);
                add(&mut hits_gp, tp);
            }
        }

        // Edges numbered past the cap exist only in G; each adds 2 to U.
        for _ in wc..w {
            let i = g.sampler.sample(&mut edge_rng);
            add(&mut hits_g, i);
            u += 2;
        }

        // Commit, in vertex order for determinism.
        hits_g.sort_unstable_by_key(|e| e.0);
        hits_gp.sort_unstable_by_key(|e| e.0);
        for &(i, c) in &hits_g {
            g.add_hit(i, c);
        }
        for &(i, c) in &hits_gp {
            gp.add_hit(i, c);
        }
        g.push_vertex(w);
        gp.push_vertex(wc);

        let newcomer = g.degrees.len() - 1;
        for &(i, _) in hits_g.iter().chain(hits_gp.iter()) {
            if g.degrees[i] == gp.degrees[i] {
                divergent.remove(&i);
            } else {
                divergent.insert(i);
            }
        }
        if g.degrees[newcomer] != gp.degrees[newcomer] {
            divergent.insert(newcomer);
        }

        trajectory.push(u);
    }

    Ok(CoupledRun {
        stats: CouplingStats {
            a,
            cap,
            u_trajectory: trajectory,
        },
        t: params.t_max,
        full_degrees: g.degrees,
        truncated_degrees: gp.degrees,
        l_full: g.l,
        l_truncated: gp.l,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::ModelParams;

    fn params(delta: f64, weights: &str, t_max: u64, seed: u64) -> ModelParams {
        ModelParams::new(delta, weights.parse().unwrap(), t_max, seed).unwrap()
    }

    #[test]
    fn inactive_truncation_couples_perfectly() {
        // Constant weights below the cap: the two graphs are the same object.
        let p = params(0.0, "const:m=2", 500, 41);
        let run = coupled_run(&p, 0.4, 0).unwrap(); // cap = 500^0.4 ≈ 12
        assert!(run.stats.cap >= 2);
        assert_eq!(run.stats.u_final(), 0);
        assert!(run.stats.u_trajectory.iter().all(|&x| x == 0));
        assert_eq!(run.full_degrees, run.truncated_degrees);
        assert_eq!(run.l_full, run.l_truncated);
    }

    #[test]
    fn over_cap_vertex_adds_two_per_extra_edge() {
        // All mass below the cap except one huge value: when it arrives the
        // miscoupled count jumps by at least 2 per extra edge.
        let p = params(0.0, "explicit:1=0.99,1000=0.01", 200, 7);
        let mut saw_jump = false;
        for rep in 0..50 {
            let run = coupled_run(&p, 0.4, rep).unwrap();
            let cap = run.stats.cap;
            assert!(cap < 1000);
            let tr = &run.stats.u_trajectory;
            for s in 1..tr.len() {
                assert!(tr[s] >= tr[s - 1], "U must be nondecreasing");
            }
            // Find first step whose weight exceeded the cap via the jump size.
            if let Some(s) = (1..tr.len()).find(|&s| tr[s] > tr[s - 1]) {
                assert!(tr[s] - tr[s - 1] >= 2 * (1000 - cap));
                saw_jump = true;
                break;
            }
        }
        assert!(saw_jump, "no replication drew the heavy weight");
    }

    #[test]
    fn marginal_degree_identities_hold() {
        let p = params(0.0, "zeta:tau=2.2,kmin=1", 300, 11);
        let run = coupled_run(&p, 0.4, 3).unwrap();
        let sum: u64 = run.full_degrees.iter().sum();
        assert_eq!(sum, 2 * run.l_full);
        let sum_p: u64 = run.truncated_degrees.iter().sum();
        assert_eq!(sum_p, 2 * run.l_truncated);
        // The truncated graph never exceeds the full one in edge count.
        assert!(run.l_truncated <= run.l_full);
        assert!(run.stats.u_final() > 0 || run.l_truncated == run.l_full);
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = params(0.0, "const:m=2", 100, 1);
        assert!(coupled_run(&p, 0.0, 0).is_err());
        assert!(coupled_run(&p, 0.5, 0).is_err());
        // delta close to -m: the cap can push the truncated weights below -delta.
        let p = params(-1.5, "const:m=2", 100, 1);
        assert!(coupled_run(&p, 0.1, 0).is_err()); // cap = 100^0.1 = 1 < 1.5
    }
}
