use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use parid::*;
use serde_json::json;

use parid_cli::artifacts;
use parid_cli::config::{parse_config, parse_snapshots};
use parid_cli::experiment::run_experiment;

#[derive(Parser)]
#[command(
    name = "parid",
    about = "Simulate a preferential attachment process with random initial degrees and verify its degree-sequence limits",
    version
)]
struct Cli {
    /// Worker threads for replications (default: hardware parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Weight law: const:m=3 | zeta:tau=2.5,kmin=1 | explicit:1=0.5,2=0.5
    #[arg(long)]
    weights: String,

    /// Attachment shift δ (must satisfy δ + min weight > 0).
    #[arg(long, default_value_t = 0.0)]
    delta: f64,

    /// Attachment rule: parid | fitness:eta=const:1;zeta=const:0
    #[arg(long, default_value = "parid")]
    rule: String,

    #[arg(long)]
    t_max: u64,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// One run of the process, emitting snapshot histograms.
    Generate {
        #[command(flatten)]
        model: ModelArgs,

        /// Comma list of times, or geom:base=2.
        #[arg(long)]
        snapshots: Option<String>,

        /// Replication index to run (streams derive from (seed, rep)).
        #[arg(long, default_value_t = 0)]
        rep: u64,

        /// Record the multigraph edge list to edges.csv.
        #[arg(long)]
        edge_log: bool,
    },

    /// Limiting degree distribution table and exponents.
    Theory {
        /// Weight law spec string.
        #[arg(long)]
        weights: String,

        #[arg(long, default_value_t = 0.0)]
        delta: f64,

        #[arg(long, default_value_t = 1_000_000)]
        k_max: u64,

        #[arg(long)]
        out: PathBuf,
    },

    /// Run a full experiment config; exit 0 iff every analysis passes.
    Verify {
        /// Path to the experiment config file.
        #[arg(long)]
        config: PathBuf,

        /// Override the config's out_dir.
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Coupled run against the weight-capped copy.
    Couple {
        #[command(flatten)]
        model: ModelArgs,

        /// Truncation exponent a in (0, 1/2); cap = floor(t_max^a).
        #[arg(long)]
        a: f64,

        #[arg(long, default_value_t = 1)]
        reps: u64,
    },

    /// Fractional-moment scaling in the infinite-mean regime.
    Moments {
        #[command(flatten)]
        model: ModelArgs,

        /// Moment order s in (0, τ_W - 1).
        #[arg(long)]
        s: f64,

        /// Probe vertices (colon separated).
        #[arg(long, default_value = "10:100:1000")]
        probes: String,

        #[arg(long, default_value_t = 200)]
        reps: u64,

        /// Also check E[L_t^±s] against the norming sequence at these times
        /// (colon separated).
        #[arg(long)]
        l_times: Option<String>,
    },
}

fn parse_model(model: &ModelArgs) -> Result<ModelParams> {
    let weights: WeightDistribution = model.weights.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
    let rule = if model.rule == "parid" {
        AttachmentRule::Parid
    } else if let Some(rest) = model.rule.strip_prefix("fitness:") {
        let (eta_part, zeta_part) = rest
            .split_once(';')
            .context("fitness rule needs eta=<law>;zeta=<law>")?;
        AttachmentRule::Fitness {
            eta: eta_part
                .strip_prefix("eta=")
                .context("fitness rule must start with eta=")?
                .parse()
                .map_err(|e| anyhow::anyhow!("{e}"))?,
            zeta: zeta_part
                .strip_prefix("zeta=")
                .context("fitness second field must be zeta=")?
                .parse()
                .map_err(|e| anyhow::anyhow!("{e}"))?,
        }
    } else {
        bail!("unknown rule `{}`", model.rule);
    };
    let params = ModelParams {
        delta: model.delta,
        weights,
        t_max: model.t_max,
        seed: model.seed,
        rule,
    };
    params.validate().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(params)
}

fn cmd_generate(
    model: ModelArgs,
    snapshots: Option<String>,
    rep: u64,
    edge_log: bool,
) -> Result<()> {
    let params = parse_model(&model)?;
    let snaps = match &snapshots {
        Some(s) => parse_snapshots(s, params.t_max).map_err(|e| anyhow::anyhow!("{e}"))?,
        None => vec![params.t_max],
    };
    let mut proc = Process::new(params.clone(), rep).map_err(|e| anyhow::anyhow!("{e}"))?;
    if edge_log {
        proc = proc.with_edge_log();
    }
    let start = std::time::Instant::now();
    let mut written = Vec::new();
    for &t in &snaps {
        proc.run_to(t);
        let stats = proc.state().stats();
        let path = model.out.join(format!("snapshot_t{t}.csv"));
        artifacts::write_atomic(&path, artifacts::snapshot_csv(&stats).as_bytes())?;
        written.push(path.display().to_string());
    }
    proc.run_to(params.t_max);
    if edge_log {
        let mut csv = String::from("source,target\n");
        for &(s, t) in proc.state().edge_log().unwrap() {
            csv.push_str(&format!("{s},{t}\n"));
        }
        let path = model.out.join("edges.csv");
        artifacts::write_atomic(&path, csv.as_bytes())?;
        written.push(path.display().to_string());
    }
    let manifest = json!({
        "command": "generate",
        "weights": params.weights.to_string(),
        "delta": params.delta,
        "t_max": params.t_max,
        "rep": rep,
        "snapshots": snaps,
        "seeds": artifacts::seed_material(params.seed, rep + 1),
        "l_t": proc.state().l_t(),
        "wall_seconds": start.elapsed().as_secs_f64(),
        "artifacts": written,
    });
    artifacts::write_atomic(
        &model.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )?;
    println!(
        "generated to t = {} ({} vertices, {} edges) in {:.2?}",
        proc.state().t(),
        proc.state().vertex_count(),
        proc.state().l_t(),
        start.elapsed()
    );
    Ok(())
}

fn cmd_theory(weights: String, delta: f64, k_max: u64, out: PathBuf) -> Result<()> {
    let w: WeightDistribution = weights.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
    let theory = limit_pk(&w, delta, k_max).map_err(|e| anyhow::anyhow!("{e}"))?;
    artifacts::write_atomic(
        &out.join("theory.csv"),
        artifacts::theory_csv(&theory).as_bytes(),
    )?;
    let header = artifacts::theory_header_json(&theory);
    artifacts::write_atomic(
        &out.join("theory.json"),
        serde_json::to_string_pretty(&header)?.as_bytes(),
    )?;
    println!("{header}");
    Ok(())
}

fn cmd_couple(model: ModelArgs, a: f64, reps: u64) -> Result<()> {
    let params = parse_model(&model)?;
    let start = std::time::Instant::now();
    let runs: Vec<CoupledRun> = replicate(reps, |rep| {
        coupled_run(&params, a, rep).expect("validated params")
    });
    let t_len = runs[0].stats.u_trajectory.len();
    let mut csv = String::from("t,mean_U\n");
    for s in 0..t_len {
        let mean = runs
            .iter()
            .map(|r| r.stats.u_trajectory[s] as f64)
            .sum::<f64>()
            / reps as f64;
        csv.push_str(&format!("{s},{mean}\n"));
    }
    artifacts::write_atomic(&model.out.join("coupling_u.csv"), csv.as_bytes())?;
    let mean_final = runs.iter().map(|r| r.stats.u_final() as f64).sum::<f64>() / reps as f64;
    let manifest = json!({
        "command": "couple",
        "weights": params.weights.to_string(),
        "delta": params.delta,
        "t_max": params.t_max,
        "a": a,
        "cap": runs[0].stats.cap,
        "reps": reps,
        "mean_u_final": mean_final,
        "seeds": artifacts::seed_material(params.seed, reps),
        "wall_seconds": start.elapsed().as_secs_f64(),
    });
    artifacts::write_atomic(
        &model.out.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?.as_bytes(),
    )?;
    println!(
        "coupled {reps} replications to t = {} (cap {}): mean final miscoupled count {mean_final}",
        params.t_max, runs[0].stats.cap
    );
    Ok(())
}

fn cmd_moments(
    model: ModelArgs,
    s: f64,
    probes: String,
    reps: u64,
    l_times: Option<String>,
) -> Result<()> {
    let params = parse_model(&model)?;
    let probes: Vec<u64> = probes
        .split(':')
        .map(|p| p.parse::<u64>().context("probe index"))
        .collect::<Result<_>>()?;
    let start = std::time::Instant::now();
    let report =
        fractional_moment_scaling(&params, s, &probes, reps).map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut csv = String::from("i,mean_d_s,stderr\n");
    for p in &report.probes {
        csv.push_str(&format!("{},{},{}\n", p.vertex, p.mean, p.stderr));
    }
    artifacts::write_atomic(&model.out.join("degree_moments.csv"), csv.as_bytes())?;
    let mut doc = json!({
        "command": "moments",
        "s": s,
        "slope": report.slope,
        "envelope_slope": report.expected_slope,
        "reps": reps,
        "seeds": artifacts::seed_material(params.seed, reps),
        "wall_seconds": start.elapsed().as_secs_f64(),
    });
    if let Some(lt) = l_times {
        let ts: Vec<u64> = lt
            .split(':')
            .map(|p| p.parse::<u64>().context("l_times entry"))
            .collect::<Result<_>>()?;
        let norming = norming_moment_check(&params.weights, s, &ts, reps, params.seed)
            .map_err(|e| anyhow::anyhow!("{e}"))?;
        let mut csv = String::from("t,a_t,ratio_pos,ratio_neg\n");
        for r in &norming.rows {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                r.t, r.a_t, r.ratio_pos, r.ratio_neg
            ));
        }
        artifacts::write_atomic(&model.out.join("l_moments.csv"), csv.as_bytes())?;
        doc["l_moments"] = json!(norming
            .rows
            .iter()
            .map(|r| json!({"t": r.t, "a_t": r.a_t, "ratio_pos": r.ratio_pos, "ratio_neg": r.ratio_neg}))
            .collect::<Vec<_>>());
    }
    artifacts::write_atomic(
        &model.out.join("manifest.json"),
        serde_json::to_string_pretty(&doc)?.as_bytes(),
    )?;
    match report.slope {
        Some(sl) => println!(
            "moment slope {sl:.4} (envelope exponent {:.4}) over probes {probes:?}",
            report.expected_slope
        ),
        None => println!(
            "single-probe moment (envelope exponent {:.4})",
            report.expected_slope
        ),
    }
    Ok(())
}

fn cmd_verify(config: PathBuf, out: Option<PathBuf>) -> Result<bool> {
    let text = std::fs::read_to_string(&config)
        .with_context(|| format!("reading {}", config.display()))?;
    let mut spec = match parse_config(&text) {
        Ok(s) => s,
        Err(errors) => {
            for e in &errors {
                eprintln!("{}: {e}", config.display());
            }
            bail!("{} config error(s)", errors.len());
        }
    };
    if let Some(o) = out {
        spec.out_dir = o;
    }
    let report = run_experiment(&spec, &text)?;
    for o in &report.outcomes {
        println!(
            "{}: {} — {}",
            o.name,
            if o.pass { "pass" } else { "FAIL" },
            o.details
        );
    }
    println!(
        "experiment `{}`: {} in {:.1}s (artifacts in {})",
        report.name,
        if report.pass { "PASS" } else { "FAIL" },
        report.wall_seconds,
        spec.out_dir.display()
    );
    Ok(report.pass)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("could not size the worker pool: {e}");
            return ExitCode::FAILURE;
        }
    }
    let result = match cli.command {
        Command::Generate {
            model,
            snapshots,
            rep,
            edge_log,
        } => cmd_generate(model, snapshots, rep, edge_log).map(|_| true),
        Command::Theory {
            weights,
            delta,
            k_max,
            out,
        } => cmd_theory(weights, delta, k_max, out).map(|_| true),
        Command::Verify { config, out } => cmd_verify(config, out),
        Command::Couple { model, a, reps } => cmd_couple(model, a, reps).map(|_| true),
        Command::Moments {
            model,
            s,
            probes,
            reps,
            l_times,
        } => cmd_moments(model, s, probes, reps, l_times).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
