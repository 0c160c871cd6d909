//! Exhaustive-enumeration oracle for tiny horizons with constant weights.
//!
//! Walks every attachment outcome of the process with exact rational
//! probabilities and accumulates E[N_k(t)] for every time up to the horizon.
//! Deliberately independent of the engine: the attachment law is recomputed
//! here from its definition (endpoint i gets a fixed edge with probability
//! `(d_i + δ) / (2L + tδ)`, degrees frozen within a step, the newcomer
//! arriving with its constant bundle of edges).

use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::BTreeMap;

pub type Q = Ratio<i64>;

/// E[N_k(t)] for every `t in 1..=t_max` and every reachable `k`, for constant
/// weight `m` and exact rational shift `delta`.
pub fn expected_counts(m: u64, delta: Q, t_max: u64) -> BTreeMap<(u64, u64), f64> {
    assert!(
        m >= 1 && (1..=6).contains(&t_max),
        "oracle is for tiny horizons"
    );
    let mut acc: BTreeMap<(u64, u64), Q> = BTreeMap::new();
    let init = vec![m as i64; 2];
    record(&init, 1, Q::one(), &mut acc);
    walk(&init, m, delta, 2, t_max, Q::one(), &mut acc);
    acc.into_iter()
        .map(|(key, v)| (key, v.to_f64().unwrap()))
        .collect()
}

fn record(degrees: &[i64], t: u64, prob: Q, acc: &mut BTreeMap<(u64, u64), Q>) {
    let mut counts: BTreeMap<u64, i64> = BTreeMap::new();
    for &d in degrees {
        *counts.entry(d as u64).or_insert(0) += 1;
    }
    for (k, c) in counts {
        *acc.entry((t, k)).or_insert_with(Q::zero) += prob * Q::from_integer(c);
    }
}

fn walk(
    degrees: &[i64],
    m: u64,
    delta: Q,
    t: u64,
    t_max: u64,
    prob: Q,
    acc: &mut BTreeMap<(u64, u64), Q>,
) {
    if t > t_max {
        return;
    }
    for (hits, p_step) in edge_tuples(degrees, m, delta, t) {
        let mut next = degrees.to_vec();
        for (i, h) in hits.iter().enumerate() {
            next[i] += h;
        }
        next.push(m as i64);
        let p = prob * p_step;
        record(&next, t, p, acc);
        walk(&next, m, delta, t + 1, t_max, p, acc);
    }
}

/// All ordered outcomes of the `m` i.i.d. endpoint draws at time `t`, as
/// (hit-count vector over existing vertices, probability).
fn edge_tuples(degrees: &[i64], m: u64, delta: Q, t: u64) -> Vec<(Vec<i64>, Q)> {
    let l: i64 = degrees.iter().sum::<i64>() / 2;
    let denom = Q::from_integer(2 * l) + Q::from_integer(t as i64) * delta;
    let mut out = vec![(vec![0i64; degrees.len()], Q::one())];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * degrees.len());
        for (hits, p) in &out {
            for i in 0..degrees.len() {
                let pi = (Q::from_integer(degrees[i]) + delta) / denom;
                let mut h = hits.clone();
                h[i] += 1;
                next.push((h, *p * pi));
            }
        }
        out = next;
    }
    out
}
