//! The experiment runner: replications in parallel, analyses evaluated on
//! the collected snapshots, artifacts and a JSON report with pass/fail flags.

use std::time::Instant;

use anyhow::{Context, Result};
use parid::*;
use serde_json::json;

use crate::artifacts;
use crate::config::{Analysis, ExperimentSpec};

#[derive(Debug)]
pub struct AnalysisOutcome {
    pub name: String,
    pub pass: bool,
    pub details: serde_json::Value,
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub name: String,
    pub pass: bool,
    pub outcomes: Vec<AnalysisOutcome>,
    pub wall_seconds: f64,
}

fn lsq_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx: f64 = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my: f64 = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Run every replication, evaluate every analysis, and write all artifacts
/// under `spec.out_dir`. Deterministic given the experiment spec (manifest
/// timings aside).
pub fn run_experiment(spec: &ExperimentSpec, config_text: &str) -> Result<ExperimentReport> {
    let start = Instant::now();
    let params = spec.params();
    params.validate().context("model parameters")?;
    let out = &spec.out_dir;
    std::fs::create_dir_all(out)?;

    // Replications only run when some analysis needs graph snapshots.
    let needs_runs = spec.analyses.iter().any(|a| {
        matches!(
            a,
            Analysis::SupNorm { .. }
                | Analysis::Spot { .. }
                | Analysis::Decay { .. }
                | Analysis::Hill { .. }
                | Analysis::CcdfBound
        )
    }) || spec.analyses.is_empty();

    let snapshots = spec.snapshots.clone();
    let per_rep: Vec<(Vec<EmpiricalStats>, EmpiricalStats)> = if needs_runs {
        replicate(spec.reps, |rep| {
            let (state, snaps) = run(&params, rep, &snapshots).expect("validated spec");
            (snaps, state.stats())
        })
    } else {
        Vec::new()
    };

    if let Some((snaps, _)) = per_rep.first() {
        for snap in snaps {
            let path = out.join(format!("snapshot_t{}.csv", snap.t()));
            artifacts::write_atomic(&path, artifacts::snapshot_csv(snap).as_bytes())?;
        }
        let final_stats = &per_rep[0].1;
        let path = out.join(format!("histogram_t{}.csv", final_stats.t()));
        artifacts::write_atomic(&path, artifacts::histogram_csv(final_stats).as_bytes())?;
    }

    let mut outcomes = Vec::new();
    for analysis in &spec.analyses {
        let outcome = match analysis {
            Analysis::TheoryTable {
                k_max,
                slope_lo,
                slope_hi,
                expect_slope,
                tol,
            } => {
                let theory = limit_pk(&spec.weights, spec.delta, *k_max)?;
                artifacts::write_atomic(
                    &out.join("theory.csv"),
                    artifacts::theory_csv(&theory).as_bytes(),
                )?;
                artifacts::write_atomic(
                    &out.join("theory.json"),
                    serde_json::to_string_pretty(&artifacts::theory_header_json(&theory))?
                        .as_bytes(),
                )?;
                let mut pass = true;
                let mut details = artifacts::theory_header_json(&theory);
                if let Some(expect) = expect_slope {
                    let lo = slope_lo.unwrap_or(100.max(theory.min_support()));
                    let hi = slope_hi.unwrap_or(*k_max);
                    let slope = theory.asymptotic_slope(lo, hi)?;
                    pass = (slope - expect).abs() <= *tol;
                    details["slope"] = json!(slope);
                    details["expect_slope"] = json!(expect);
                    details["tol"] = json!(tol);
                }
                AnalysisOutcome {
                    name: analysis.name().into(),
                    pass,
                    details,
                }
            }
            Analysis::SupNorm { k_max, max_final } => {
                let theory = limit_pk(&spec.weights, spec.delta, *k_max)?;
                let agg: Vec<(f64, f64)> = (0..snapshots.len())
                    .map(|i| {
                        let mean = per_rep
                            .iter()
                            .map(|(snaps, _)| sup_norm_deviation(&snaps[i], &theory))
                            .sum::<f64>()
                            / spec.reps as f64;
                        (snapshots[i] as f64, mean)
                    })
                    .collect();
                artifacts::write_atomic(
                    &out.join("sup_norm.csv"),
                    artifacts::sup_norm_csv(&agg).as_bytes(),
                )?;
                let last = agg.last().map(|x| x.1).unwrap_or(f64::NAN);
                let pass = max_final.is_none_or(|m| last <= m);
                AnalysisOutcome {
                    name: analysis.name().into(),
                    pass,
                    details: json!({ "series": agg, "final": last, "max_final": max_final }),
                }
            }
            Analysis::Spot { ks } => {
                let k_top = ks.iter().copied().max().unwrap_or(1).max(1_000);
                let theory = limit_pk(&spec.weights, spec.delta, k_top)?;
                let agg = ReplicationAggregate::from_stats(per_rep.iter().map(|(_, f)| f));
                let mut pass = true;
                let mut rows = Vec::new();
                for &k in ks {
                    let mean = agg.mean_p(k);
                    let se = (agg.var_p(k) / agg.reps() as f64).sqrt();
                    let target = theory.p_k(k);
                    let ok = (mean - target).abs() <= 3.0 * se;
                    pass &= ok;
                    rows.push(json!({
                        "k": k, "mean_p": mean, "target": target, "se": se, "pass": ok
                    }));
                }
                AnalysisOutcome {
                    name: analysis.name().into(),
                    pass,
                    details: json!({ "spots": rows }),
                }
            }
            Analysis::Decay {
                k_max,
                gamma_lo,
                gamma_hi,
                ratio_min,
            } => {
                let theory = limit_pk(&spec.weights, spec.delta, *k_max)?;
                let agg: Vec<(f64, f64)> = (0..snapshots.len())
                    .map(|i| {
                        let mean = per_rep
                            .iter()
                            .map(|(snaps, _)| sup_norm_deviation(&snaps[i], &theory))
                            .sum::<f64>()
                            / spec.reps as f64;
                        (snapshots[i] as f64, mean)
                    })
                    .collect();
                artifacts::write_atomic(
                    &out.join("sup_norm.csv"),
                    artifacts::sup_norm_csv(&agg).as_bytes(),
                )?;
                let gamma = decay_exponent(&agg)?;
                let ratio = agg.first().map(|x| x.1).unwrap_or(f64::NAN)
                    / agg.last().map(|x| x.1).unwrap_or(f64::NAN);
                let pass = gamma > *gamma_lo && gamma < *gamma_hi && ratio >= *ratio_min;
                AnalysisOutcome {
                    name: analysis.name().into(),
                    pass,
                    details: json!({
                        "series": agg,
                        "gamma": gamma,
                        "gamma_range": [gamma_lo, gamma_hi],
                        "shrink_ratio": ratio,
                        "ratio_min": ratio_min,
                    }),
                }
            }
            Analysis::Hill {
                top_frac,
                expect,
                tol,
            } => {
                let estimates: Vec<f64> = per_rep
                    .iter()
                    .map(|(_, final_stats)| {
                        // Rebuild the degree multiset from the histogram.
                        let mut degrees = Vec::with_capacity(final_stats.vertex_count() as usize);
                        for (k, n) in final_stats.iter() {
                            degrees.extend(std::iter::repeat_n(k, n as usize));
                        }
                        let top_k = ((degrees.len() as f64 * top_frac) as usize)
                            .clamp(1, degrees.len() - 1);
                        hill_estimator(&degrees, top_k).expect("top_k in range")
                    })
                    .collect();
                let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
                let pass = (mean - expect).abs() <= *tol;
                AnalysisOutcome {
                    name: analysis.name().into(),
                    pass,
                    details: json!({
                        "tau_hat": mean,
                        "expect": expect,
                        "tol": tol,
                        "top_frac": top_frac,
                        "per_rep": estimates,
                    }),
                }
            }
            Analysis::CcdfBound => {
                let report = ccdf_lower_bound_check(&per_rep[0].1, &spec.weights);
                AnalysisOutcome {
                    name: analysis.name().into(),
                    pass: report.violations == 0,
                    details: json!({
                        "violations": report.violations,
                        "max_shortfall": report.max_shortfall,
                        "checked_up_to": report.checked_up_to,
                    }),
                }
            }
            Analysis::Coupling { a, horizons, b_max } => {
                let a = a.or(spec.coupling_a).expect("validated at parse time");
                let horizons = if horizons.is_empty() {
                    vec![spec.t_max / 100, spec.t_max / 10, spec.t_max]
                } else {
                    horizons.clone()
                };
                let mut rows = Vec::new();
                for &h in &horizons {
                    let mut p = params.clone();
                    p.t_max = h;
                    let finals: Vec<u64> = replicate(spec.reps, |rep| {
                        coupled_run(&p, a, rep)
                            .expect("validated spec")
                            .stats
                            .u_final()
                    });
                    let mean = finals.iter().sum::<u64>() as f64 / spec.reps as f64;
                    rows.push((h as f64, mean));
                }
                let mut csv = String::from("t,mean_U\n");
                for (t, u) in &rows {
                    csv.push_str(&format!("{t},{u}\n"));
                }
                artifacts::write_atomic(&out.join("coupling_u.csv"), csv.as_bytes())?;
                let pts: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| r.1 > 0.0)
                    .map(|r| (r.0.ln(), r.1.ln()))
                    .collect();
                let (pass, slope) = if pts.len() >= 2 {
                    let b = lsq_slope(&pts);
                    (b < *b_max, Some(b))
                } else {
                    // No miscouplings at all: sublinear trivially.
                    (true, None)
                };
                AnalysisOutcome {
                    name: analysis.name().into(),
                    pass,
                    details: json!({ "a": a, "mean_u": rows, "slope": slope, "b_max": b_max }),
                }
            }
            Analysis::Moments {
                s,
                probes,
                expect_slope,
                tol,
                reps,
            } => {
                let reps = reps.unwrap_or(spec.reps);
                let report = fractional_moment_scaling(&params, *s, probes, reps)?;
                let mut csv = String::from("i,mean_d_s,stderr\n");
                for p in &report.probes {
                    csv.push_str(&format!("{},{},{}\n", p.vertex, p.mean, p.stderr));
                }
                artifacts::write_atomic(&out.join("degree_moments.csv"), csv.as_bytes())?;
                let pass = report
                    .slope
                    .is_some_and(|sl| (sl - expect_slope).abs() <= *tol);
                AnalysisOutcome {
                    name: analysis.name().into(),
                    pass,
                    details: json!({
                        "s": s,
                        "slope": report.slope,
                        "envelope_slope": report.expected_slope,
                        "expect_slope": expect_slope,
                        "tol": tol,
                        "probes": report.probes.iter().map(|p| json!({
                            "i": p.vertex, "mean": p.mean, "stderr": p.stderr
                        })).collect::<Vec<_>>(),
                    }),
                }
            }
            Analysis::LMoments {
                s,
                ts,
                ratio_factor,
                neg_bound,
                reps,
            } => {
                let reps = reps.unwrap_or(spec.reps);
                let report = norming_moment_check(&spec.weights, *s, ts, reps, spec.seed)?;
                let mut csv = String::from("t,a_t,ratio_pos,ratio_neg\n");
                for r in &report.rows {
                    csv.push_str(&format!(
                        "{},{},{},{}\n",
                        r.t, r.a_t, r.ratio_pos, r.ratio_neg
                    ));
                }
                artifacts::write_atomic(&out.join("l_moments.csv"), csv.as_bytes())?;
                let ratios: Vec<f64> = report.rows.iter().map(|r| r.ratio_pos).collect();
                let spread = ratios.iter().cloned().fold(f64::MIN, f64::max)
                    / ratios.iter().cloned().fold(f64::MAX, f64::min);
                let neg_ok = report.rows.iter().all(|r| r.ratio_neg <= *neg_bound);
                let pass = spread <= *ratio_factor && neg_ok;
                AnalysisOutcome {
                    name: analysis.name().into(),
                    pass,
                    details: json!({
                        "s": s,
                        "rows": report.rows.iter().map(|r| json!({
                            "t": r.t, "a_t": r.a_t, "ratio_pos": r.ratio_pos, "ratio_neg": r.ratio_neg
                        })).collect::<Vec<_>>(),
                        "spread": spread,
                        "ratio_factor": ratio_factor,
                        "neg_bound": neg_bound,
                    }),
                }
            }
        };
        outcomes.push(outcome);
    }

    let pass = outcomes.iter().all(|o| o.pass);
    let wall_seconds = start.elapsed().as_secs_f64();

    let manifest = json!({
        "name": spec.name,
        "config": config_text,
        "config_sha256": artifacts::config_hash(config_text),
        "version": env!("CARGO_PKG_VERSION"),
        "reps": spec.reps,
        "seeds": artifacts::seed_material(spec.seed, spec.reps),
        "wall_seconds": wall_seconds,
        "pass": pass,
    });
    artifacts::write_atomic(
        &out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )?;

    let report_json = json!({
        "name": spec.name,
        "pass": pass,
        "analyses": outcomes.iter().map(|o| json!({
            "name": o.name,
            "pass": o.pass,
            "details": o.details,
        })).collect::<Vec<_>>(),
    });
    artifacts::write_atomic(
        &out.join("report.json"),
        serde_json::to_string_pretty(&report_json)?.as_bytes(),
    )?;

    Ok(ExperimentReport {
        name: spec.name.clone(),
        pass,
        outcomes,
        wall_seconds,
    })
}
