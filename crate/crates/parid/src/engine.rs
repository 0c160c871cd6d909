//! The graph process. `G(1)` is two vertices joined by `W_1` parallel edges;
//! at every later time `t` a vertex arrives with `W_t` edges whose endpoints
//! are i.i.d. draws over the existing vertices, vertex `i` taken with
//! probability `(d_i(t-1) + δ) / (2 L_{t-1} + t δ)`. Degrees stay frozen at
//! their time-`t-1` values while the `W_t` endpoints are drawn; an optional
//! sequential mode updates them edge by edge for cross-checks.

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::analysis::EmpiricalStats;
use crate::error::{Error, Result};
use crate::fenwick::SamplerTree;
use crate::rng::{stream, StreamKind, StreamRng};
use crate::weights::WeightDistribution;

/// Rebuild the sampler from exact degrees after this many point updates.
const REBUILD_EVERY: u64 = 1 << 20;

/// Relative drift of the sampler total that forces an early rebuild.
const DRIFT_TOL: f64 = 1e-6;

/// Switch from per-edge draws to a binomial chain over the vertices when one
/// step brings more than this many edges per existing vertex.
const CHAIN_FACTOR: u64 = 8;

/// Law of a per-vertex fitness component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitnessLaw {
    Const(f64),
    Uniform(f64, f64),
}

impl FitnessLaw {
    fn sample(&self, rng: &mut StreamRng) -> f64 {
        match *self {
            FitnessLaw::Const(c) => c,
            FitnessLaw::Uniform(a, b) => a + (b - a) * rng.random::<f64>(),
        }
    }

    fn lower(&self) -> f64 {
        match *self {
            FitnessLaw::Const(c) => c,
            FitnessLaw::Uniform(a, _) => a,
        }
    }

    fn upper(&self) -> f64 {
        match *self {
            FitnessLaw::Const(c) => c,
            FitnessLaw::Uniform(_, b) => b,
        }
    }
}

impl std::fmt::Display for FitnessLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            FitnessLaw::Const(c) => write!(f, "const:{c}"),
            FitnessLaw::Uniform(a, b) => write!(f, "uniform:{a}:{b}"),
        }
    }
}

impl std::str::FromStr for FitnessLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::Config(m);
        match s.split_once(':') {
            Some(("const", v)) => Ok(FitnessLaw::Const(
                v.parse().map_err(|e| bad(format!("fitness const: {e}")))?,
            )),
            Some(("uniform", rest)) => {
                let (a, b) = rest
                    .split_once(':')
                    .ok_or_else(|| bad(format!("uniform fitness needs a:b, got `{rest}`")))?;
                Ok(FitnessLaw::Uniform(
                    a.parse().map_err(|e| bad(format!("uniform lo: {e}")))?,
                    b.parse().map_err(|e| bad(format!("uniform hi: {e}")))?,
                ))
            }
            _ => Err(bad(format!(
                "unknown fitness law `{s}` (expected const:<v> or uniform:<a>:<b>)"
            ))),
        }
    }
}

/// How an arriving edge picks its endpoint.
#[derive(Debug, Clone, PartialEq)]
pub enum AttachmentRule {
    /// Weight `d_i + δ` per vertex.
    Parid,
    /// Weight `η_i d_i + ζ_i` with per-vertex fitness drawn at birth.
    Fitness { eta: FitnessLaw, zeta: FitnessLaw },
}

#[derive(Debug, Clone)]
pub struct ModelParams {
    pub delta: f64,
    pub weights: WeightDistribution,
    pub t_max: u64,
    pub seed: u64,
    pub rule: AttachmentRule,
}

impl ModelParams {
    pub fn new(delta: f64, weights: WeightDistribution, t_max: u64, seed: u64) -> Result<Self> {
        let p = ModelParams {
            delta,
            weights,
            t_max,
            seed,
            rule: AttachmentRule::Parid,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_rule(mut self, rule: AttachmentRule) -> Result<Self> {
        self.rule = rule;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_max < 1 {
            return Err(Error::Config("t_max must be at least 1".into()));
        }
        match &self.rule {
            AttachmentRule::Parid => {
                let min = self.weights.min_support() as f64;
                if !(self.delta + min > 0.0) {
                    return Err(Error::Config(format!(
                        "delta + min support must be positive: delta = {} with min support {}",
                        self.delta,
                        self.weights.min_support()
                    )));
                }
            }
            AttachmentRule::Fitness { eta, zeta } => {
                if eta.lower() < 0.0 || zeta.lower() < 0.0 {
                    return Err(Error::Config(
                        "fitness components must be nonnegative".into(),
                    ));
                }
                // Total attachment weight must stay positive: either the
                // multiplicative part can be positive or the additive part is
                // bounded away from zero.
                if !(eta.upper() > 0.0) && !(zeta.lower() > 0.0) {
                    return Err(Error::Config(
                        "fitness rule needs multiplicative fitness positive with positive \
                         probability, or additive fitness bounded away from zero"
                            .into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The evolving graph: degrees, drawn weights, edge totals and the dynamic
/// sampling structure over per-vertex attachment weights.
#[derive(Debug, Clone)]
pub struct GraphState {
    t: u64,
    degrees: Vec<u64>,
    /// `initial_weights[i] = W_i` for `i >= 1`; index 0 holds 0 because the
    /// root vertex carries no weight of its own (its degree starts at `W_1`).
    initial_weights: Vec<u64>,
    l_t: u64,
    delta: f64,
    fitness: Option<Vec<(f64, f64)>>,
    sampler: SamplerTree,
    edge_log: Option<Vec<(u32, u32)>>,
}

impl GraphState {
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn vertex_count(&self) -> u64 {
        self.degrees.len() as u64
    }

    pub fn degrees(&self) -> &[u64] {
        &self.degrees
    }

    pub fn degree(&self, i: usize) -> u64 {
        self.degrees[i]
    }

    pub fn initial_weights(&self) -> &[u64] {
        &self.initial_weights
    }

    /// Σ_{i=1}^t W_i — the number of edges; total degree is twice this.
    pub fn l_t(&self) -> u64 {
        self.l_t
    }

    pub fn edge_log(&self) -> Option<&[(u32, u32)]> {
        self.edge_log.as_deref()
    }

    pub fn fitness(&self) -> Option<&[(f64, f64)]> {
        self.fitness.as_deref()
    }

    fn vertex_weight(&self, i: usize) -> f64 {
        match &self.fitness {
            None => self.degrees[i] as f64 + self.delta,
            Some(fit) => fit[i].0 * self.degrees[i] as f64 + fit[i].1,
        }
    }

    /// Exact endpoint probabilities for the next arriving edge.
    pub fn attachment_probabilities(&self) -> Vec<f64> {
        let w: Vec<f64> = (0..self.degrees.len())
            .map(|i| self.vertex_weight(i))
            .collect();
        let total: f64 = w.iter().sum();
        w.into_iter().map(|x| x / total).collect()
    }

    /// Histogram snapshot of the current degree sequence.
    pub fn stats(&self) -> EmpiricalStats {
        EmpiricalStats::from_degrees(self.t, self.l_t, &self.degrees)
    }

    /// Exact structural identities; panics on violation. Used by tests.
    pub fn check_invariants(&self) {
        let total: u64 = self.degrees.iter().sum();
        assert_eq!(total, 2 * self.l_t, "degree sum must equal 2 L_t");
        assert_eq!(self.degrees.len() as u64, self.t + 1);
        for i in 1..self.degrees.len() {
            assert!(self.degrees[i] >= self.initial_weights[i]);
        }
        assert!(self.degrees[0] >= self.initial_weights[1]);
    }
}

/// A single evolving realization together with its random streams.
pub struct Process {
    params: ModelParams,
    state: GraphState,
    weight_rng: StreamRng,
    endpoint_rng: StreamRng,
    fitness_rng: StreamRng,
    sequential_update: bool,
}

impl Process {
    /// Initialize at `t = 1`; replication `rep` gets its own streams derived
    /// from `(params.seed, rep)`.
    pub fn new(params: ModelParams, rep: u64) -> Result<Self> {
        params.validate()?;
        let mut weight_rng = stream(params.seed, rep, StreamKind::Weights);
        let endpoint_rng = stream(params.seed, rep, StreamKind::Endpoints);
        let mut fitness_rng = stream(params.seed, rep, StreamKind::Fitness);

        let w1 = params.weights.sample(&mut weight_rng);
        let fitness = match &params.rule {
            AttachmentRule::Parid => None,
            AttachmentRule::Fitness { eta, zeta } => Some(vec![
                (eta.sample(&mut fitness_rng), zeta.sample(&mut fitness_rng)),
                (eta.sample(&mut fitness_rng), zeta.sample(&mut fitness_rng)),
            ]),
        };
        let mut state = GraphState {
            t: 1,
            degrees: vec![w1, w1],
            initial_weights: vec![0, w1],
            l_t: w1,
            delta: params.delta,
            fitness,
            sampler: SamplerTree::from_weights(std::iter::empty()),
            edge_log: None,
        };
        let init_weights: Vec<f64> = (0..2).map(|i| state.vertex_weight(i)).collect();
        state.sampler.rebuild_from(init_weights);
        Ok(Process {
            params,
            state,
            weight_rng,
            endpoint_rng,
            fitness_rng,
            sequential_update: false,
        })
    }

    /// Record `(source, target)` multi-edges from now on. Enabled before the
    /// first step this also logs the initial bundle.
    pub fn with_edge_log(mut self) -> Self {
        let mut log = Vec::new();
        if self.state.t == 1 {
            let w1 = self.state.initial_weights[1];
            log.extend(std::iter::repeat_n((1u32, 0u32), w1 as usize));
        }
        self.state.edge_log = Some(log);
        self
    }

    /// Update degrees after every single edge instead of freezing them for
    /// the whole step (cross-check variant, not the default).
    pub fn with_sequential_update(mut self) -> Self {
        self.sequential_update = true;
        self
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn state(&self) -> &GraphState {
        &self.state
    }

    pub fn into_state(self) -> GraphState {
        self.state
    }

    /// Draw one endpoint from the current state without committing anything.
    pub fn sample_endpoint(&mut self) -> usize {
        self.state.sampler.sample(&mut self.endpoint_rng)
    }

    /// Advance the process by one time step.
    pub fn step(&mut self) {
        let t_new = self.state.t + 1;
        let w = self.params.weights.sample(&mut self.weight_rng);
        self.maybe_rebuild(t_new);

        let n_old = self.state.degrees.len();
        let total = self.state.sampler.total();
        assert!(
            total.is_finite() && total > 0.0,
            "attachment weights must have a positive total (got {total})"
        );

        // hit counts over old vertices, in vertex order for determinism
        let mut hits: BTreeMap<usize, u64> = BTreeMap::new();
        if self.sequential_update {
            for _ in 0..w {
                let i = self.state.sampler.sample(&mut self.endpoint_rng);
                *hits.entry(i).or_insert(0) += 1;
                self.state.degrees[i] += 1;
                let inc = match &self.state.fitness {
                    None => 1.0,
                    Some(f) => f[i].0,
                };
                self.state.sampler.add(i, inc);
            }
            // Degrees were already committed above; rewind them so the common
            // commit path below applies once.
            for (&i, &c) in &hits {
                self.state.degrees[i] -= c;
            }
        } else if w > CHAIN_FACTOR * n_old as u64 {
            // Binomial chain: equivalent to drawing the w endpoints one by one
            // against frozen degrees, in O(V) instead of O(w log V).
            let mut rem = w;
            let mut rem_weight = total;
            for i in 0..n_old {
                if rem == 0 {
                    break;
                }
                let wi = self.state.sampler.leaf(i);
                let c = if i + 1 == n_old {
                    rem
                } else {
                    let p = (wi / rem_weight).clamp(0.0, 1.0);
                    Binomial::new(rem, p)
                        .expect("binomial parameters")
                        .sample(&mut self.endpoint_rng)
                };
                if c > 0 {
                    hits.insert(i, c);
                    rem -= c;
                }
                rem_weight = (rem_weight - wi).max(0.0);
            }
        } else {
            for _ in 0..w {
                let i = self.state.sampler.sample(&mut self.endpoint_rng);
                *hits.entry(i).or_insert(0) += 1;
            }
        }

        // Commit: old vertices first, then the newcomer.
        for (&i, &c) in &hits {
            self.state.degrees[i] += c;
            if !self.sequential_update {
                let inc = match &self.state.fitness {
                    None => c as f64,
                    Some(f) => f[i].0 * c as f64,
                };
                self.state.sampler.add(i, inc);
            }
            if let Some(log) = self.state.edge_log.as_mut() {
                log.extend(std::iter::repeat_n((t_new as u32, i as u32), c as usize));
            }
        }
        self.state.degrees.push(w);
        self.state.initial_weights.push(w);
        if let AttachmentRule::Fitness { eta, zeta } = &self.params.rule {
            let pair = (
                eta.sample(&mut self.fitness_rng),
                zeta.sample(&mut self.fitness_rng),
            );
            self.state.fitness.as_mut().unwrap().push(pair);
        }
        let new_idx = self.state.degrees.len() - 1;
        self.state.sampler.append(self.state.vertex_weight(new_idx));
        self.state.l_t += w;
        self.state.t = t_new;
    }

    pub fn run_to(&mut self, t: u64) {
        while self.state.t < t {
            self.step();
        }
    }

    fn maybe_rebuild(&mut self, t_next: u64) {
        let mut rebuild = self.state.sampler.updates_since_rebuild() >= REBUILD_EVERY;
        if !rebuild && matches!(self.params.rule, AttachmentRule::Parid) {
            let expected = 2.0 * self.state.l_t as f64 + t_next as f64 * self.params.delta;
            if (self.state.sampler.total() - expected).abs() > DRIFT_TOL * expected {
                rebuild = true;
            }
        }
        if rebuild {
            let weights: Vec<f64> = (0..self.state.degrees.len())
                .map(|i| self.state.vertex_weight(i))
                .collect();
            self.state.sampler.rebuild_from(weights);
            if matches!(self.params.rule, AttachmentRule::Parid) {
                let expected = 2.0 * self.state.l_t as f64 + t_next as f64 * self.params.delta;
                assert!(
                    (self.state.sampler.total() - expected).abs() <= DRIFT_TOL * expected,
                    "sampler total {} deviates from {} after rebuild",
                    self.state.sampler.total(),
                    expected
                );
            }
        }
    }
}

/// Evolve one replication to `params.t_max`, capturing histogram snapshots at
/// the requested times. Deterministic given `(params.seed, rep)`.
pub fn run(
    params: &ModelParams,
    rep: u64,
    snapshot_times: &[u64],
) -> Result<(GraphState, Vec<EmpiricalStats>)> {
    for (i, &s) in snapshot_times.iter().enumerate() {
        if s < 1 || s > params.t_max {
            return Err(Error::Config(format!(
                "snapshot time {s} outside [1, {}]",
                params.t_max
            )));
        }
        if i > 0 && snapshot_times[i - 1] >= s {
            return Err(Error::Config(
                "snapshot times must be strictly increasing".into(),
            ));
        }
    }
    let mut proc = Process::new(params.clone(), rep)?;
    let mut snaps = Vec::with_capacity(snapshot_times.len());
    for &s in snapshot_times {
        proc.run_to(s);
        snaps.push(proc.state().stats());
    }
    proc.run_to(params.t_max);
    Ok((proc.into_state(), snaps))
}
