//! Artifact emission: CSV tables and JSON documents, written to a temp file
//! and renamed into place so interrupted runs never leave partial files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use parid::{stream_id, EmpiricalStats, StreamKind, TheoreticalDegreeDistribution};
use sha2::{Digest, Sha256};

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().context("artifact path has no parent")?;
    fs::create_dir_all(dir)?;
    let mut tmp = PathBuf::from(path);
    let mut name = path
        .file_name()
        .context("artifact path has no file name")?
        .to_os_string();
    name.push(".tmp");
    tmp.set_file_name(name);
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

/// `k,N_k,p_k` snapshot table (the generator's output format).
pub fn snapshot_csv(stats: &EmpiricalStats) -> String {
    let mut out = String::from("k,N_k,p_k\n");
    for (k, n) in stats.iter() {
        out.push_str(&format!(
            "{k},{n},{}\n",
            n as f64 / stats.vertex_count() as f64
        ));
    }
    out
}

/// `k,N_k,p_k,p_geq_k` histogram table (the analysis output format).
pub fn histogram_csv(stats: &EmpiricalStats) -> String {
    let mut out = String::from("k,N_k,p_k,p_geq_k\n");
    for (k, n) in stats.iter() {
        out.push_str(&format!(
            "{k},{n},{},{}\n",
            n as f64 / stats.vertex_count() as f64,
            stats.p_geq(k)
        ));
    }
    out
}

/// `t,sup_norm` decay series.
pub fn sup_norm_csv(series: &[(f64, f64)]) -> String {
    let mut out = String::from("t,sup_norm\n");
    for (t, v) in series {
        out.push_str(&format!("{t},{v}\n"));
    }
    out
}

/// `k,p_k` limiting-distribution table.
pub fn theory_csv(theory: &TheoreticalDegreeDistribution) -> String {
    let mut out = String::from("k,p_k\n");
    for k in 1..=theory.k_max() {
        out.push_str(&format!("{k},{}\n", theory.p_k(k)));
    }
    out
}

pub fn theory_header_json(theory: &TheoreticalDegreeDistribution) -> serde_json::Value {
    let e = theory.exponents();
    serde_json::json!({
        "theta": theory.theta(),
        "tau_w": if e.tau_w.is_finite() { serde_json::json!(e.tau_w) } else { serde_json::json!("infinity") },
        "tau_p": e.tau_p,
        "tau": e.tau,
        "tail_mass": theory.tail_mass(),
        "k_max": theory.k_max(),
        "min_support": theory.min_support(),
    })
}

pub fn config_hash(config_text: &str) -> String {
    let mut h = Sha256::new();
    h.update(config_text.as_bytes());
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Seed material: the derivation rule plus explicit stream ids for the first
/// replications, enough to replay any single replication in isolation.
pub fn seed_material(seed: u64, reps: u64) -> serde_json::Value {
    let listed = reps.min(32);
    let ids: Vec<serde_json::Value> = (0..listed)
        .map(|rep| {
            serde_json::json!({
                "rep": rep,
                "weights": stream_id(rep, StreamKind::Weights),
                "endpoints": stream_id(rep, StreamKind::Endpoints),
                "fitness": stream_id(rep, StreamKind::Fitness),
                "coupling": stream_id(rep, StreamKind::Coupling),
            })
        })
        .collect();
    serde_json::json!({
        "master_seed": seed,
        "derivation": "chacha8 stream id = (rep << 3) | role; roles: weights=0, endpoints=1, fitness=2, coupling=3",
        "streams": ids,
        "listed_reps": listed,
    })
}
