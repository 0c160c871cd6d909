//! Experiment config files: line-oriented `key = value` text with an
//! `analyses = [...]` list. Parsing validates everything it can see and
//! reports *all* problems with their line numbers, not just the first.

use std::fmt;
use std::path::PathBuf;

use parid::{AttachmentRule, FitnessLaw, Mean, ModelParams, WeightDistribution};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub delta: f64,
    pub weights: WeightDistribution,
    pub t_max: u64,
    pub seed: u64,
    pub reps: u64,
    /// Resolved snapshot times, strictly increasing.
    pub snapshots: Vec<u64>,
    pub rule: AttachmentRule,
    /// Default truncation exponent for coupling analyses.
    pub coupling_a: Option<f64>,
    pub out_dir: PathBuf,
    pub analyses: Vec<Analysis>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Analysis {
    /// Emit the limiting distribution table; optionally check its log-log
    /// slope over [lo, hi] against `expect ± tol`.
    TheoryTable {
        k_max: u64,
        slope_lo: Option<u64>,
        slope_hi: Option<u64>,
        expect_slope: Option<f64>,
        tol: f64,
    },
    /// Sup-norm distance to the limiting law at every snapshot; optionally
    /// require the final snapshot's mean distance below `max_final`.
    SupNorm { k_max: u64, max_final: Option<f64> },
    /// Mean empirical p_k at the final snapshot against the limiting value,
    /// within three standard errors, for each listed degree.
    Spot { ks: Vec<u64> },
    /// Fit the sup-norm decay exponent over the snapshots.
    Decay {
        k_max: u64,
        gamma_lo: f64,
        gamma_hi: f64,
        ratio_min: f64,
    },
    /// Mean Hill tail-index estimate on the top fraction of final degrees.
    Hill {
        top_frac: f64,
        expect: f64,
        tol: f64,
    },
    /// Weight-ccdf lower bound on the degree ccdf (replication 0).
    CcdfBound,
    /// Coupled runs at several horizons, cap t^a each; fit the growth of the
    /// mean miscoupled count and require slope < b_max.
    Coupling {
        a: Option<f64>,
        horizons: Vec<u64>,
        b_max: f64,
    },
    /// Probe-vertex fractional moments E[d_i(t)^s] and their index slope.
    Moments {
        s: f64,
        probes: Vec<u64>,
        expect_slope: f64,
        tol: f64,
        /// Replication override (defaults to the experiment's reps).
        reps: Option<u64>,
    },
    /// Fractional moments of L_t against the norming sequence.
    LMoments {
        s: f64,
        ts: Vec<u64>,
        ratio_factor: f64,
        neg_bound: f64,
        /// Replication override (defaults to the experiment's reps).
        reps: Option<u64>,
    },
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::TheoryTable { .. } => "theory_table",
            Analysis::SupNorm { .. } => "supnorm",
            Analysis::Spot { .. } => "spot",
            Analysis::Decay { .. } => "decay",
            Analysis::Hill { .. } => "hill",
            Analysis::CcdfBound => "ccdf_bound",
            Analysis::Coupling { .. } => "coupling",
            Analysis::Moments { .. } => "moments",
            Analysis::LMoments { .. } => "l_moments",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl ExperimentSpec {
    /// Model parameters for one replication family.
    pub fn params(&self) -> ModelParams {
        ModelParams {
            delta: self.delta,
            weights: self.weights.clone(),
            t_max: self.t_max,
            seed: self.seed,
            rule: self.rule.clone(),
        }
    }
}

fn rule_to_string(rule: &AttachmentRule) -> String {
    match rule {
        AttachmentRule::Parid => "parid".into(),
        AttachmentRule::Fitness { eta, zeta } => format!("fitness:eta={eta};zeta={zeta}"),
    }
}

fn parse_rule(s: &str) -> Result<AttachmentRule, String> {
    if s == "parid" {
        return Ok(AttachmentRule::Parid);
    }
    let rest = s
        .strip_prefix("fitness:")
        .ok_or_else(|| format!("unknown rule `{s}` (expected `parid` or `fitness:...`)"))?;
    let (eta_part, zeta_part) = rest
        .split_once(';')
        .ok_or_else(|| "fitness rule needs `eta=<law>;zeta=<law>`".to_string())?;
    let eta = eta_part
        .strip_prefix("eta=")
        .ok_or_else(|| "fitness rule must start with eta=".to_string())?
        .parse::<FitnessLaw>()
        .map_err(|e| e.to_string())?;
    let zeta = zeta_part
        .strip_prefix("zeta=")
        .ok_or_else(|| "fitness rule second field must be zeta=".to_string())?
        .parse::<FitnessLaw>()
        .map_err(|e| e.to_string())?;
    Ok(AttachmentRule::Fitness { eta, zeta })
}

/// `100,1000` or `geom:base=2` (powers of the base up to t_max, then t_max).
pub fn parse_snapshots(value: &str, t_max: u64) -> Result<Vec<u64>, String> {
    if let Some(rest) = value.strip_prefix("geom:") {
        let base = rest
            .strip_prefix("base=")
            .ok_or_else(|| "geometric schedule needs base=<int>".to_string())?
            .parse::<u64>()
            .map_err(|e| format!("base: {e}"))?;
        if base < 2 {
            return Err("geometric base must be at least 2".into());
        }
        let mut out = Vec::new();
        let mut v: u64 = 1;
        while v <= t_max {
            out.push(v);
            match v.checked_mul(base) {
                Some(next) => v = next,
                None => break,
            }
        }
        if *out.last().unwrap_or(&0) != t_max {
            out.push(t_max);
        }
        return Ok(out);
    }
    let mut out = Vec::new();
    for part in value.split(',') {
        out.push(
            part.trim()
                .parse::<u64>()
                .map_err(|e| format!("snapshot `{part}`: {e}"))?,
        );
    }
    Ok(out)
}

fn parse_u64_list(value: &str) -> Result<Vec<u64>, String> {
    value
        .split(':')
        .map(|p| p.parse::<u64>().map_err(|e| format!("`{p}`: {e}")))
        .collect()
}

/// Split `name(args)` items of the bracketed analyses list at top-level
/// commas.
fn split_analyses(list: &str) -> Result<Vec<String>, String> {
    let inner = list
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| "analyses must be a [bracketed, list]".to_string())?;
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    for c in inner.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| "unbalanced parentheses in analyses".to_string())?;
                cur.push(c);
            }
            ',' if depth == 0 => {
                items.push(cur.trim().to_string());
                cur.clear();
            }
            _ => cur.push(c),
        }
    }
    if depth != 0 {
        return Err("unbalanced parentheses in analyses".into());
    }
    if !cur.trim().is_empty() {
        items.push(cur.trim().to_string());
    }
    Ok(items.into_iter().filter(|s| !s.is_empty()).collect())
}

struct Args(Vec<(String, String)>);

impl Args {
    fn parse(name: &str, body: &str) -> Result<Self, String> {
        let mut out = Vec::new();
        for kv in body.split(',').filter(|s| !s.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| format!("{name}: expected key=value, got `{kv}`"))?;
            out.push((k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Args(out))
    }

    fn take(&mut self, key: &str) -> Option<String> {
        let i = self.0.iter().position(|(k, _)| k == key)?;
        Some(self.0.remove(i).1)
    }

    fn finish(self, name: &str) -> Result<(), String> {
        if let Some((k, _)) = self.0.first() {
            return Err(format!("{name}: unknown argument `{k}`"));
        }
        Ok(())
    }
}

fn parse_analysis(item: &str) -> Result<Analysis, String> {
    let (name, body) = match item.split_once('(') {
        Some((n, rest)) => {
            let body = rest
                .strip_suffix(')')
                .ok_or_else(|| format!("`{item}`: missing closing parenthesis"))?;
            (n.trim(), body)
        }
        None => (item.trim(), ""),
    };
    let mut args = Args::parse(name, body)?;
    let num = |v: Option<String>, key: &str| -> Result<Option<f64>, String> {
        v.map(|s| s.parse::<f64>().map_err(|e| format!("{name}: {key}: {e}")))
            .transpose()
    };
    let int = |v: Option<String>, key: &str| -> Result<Option<u64>, String> {
        v.map(|s| s.parse::<u64>().map_err(|e| format!("{name}: {key}: {e}")))
            .transpose()
    };
    let analysis = match name {
        "theory_table" => Analysis::TheoryTable {
            k_max: int(args.take("k_max"), "k_max")?.unwrap_or(1_000_000),
            slope_lo: int(args.take("slope_lo"), "slope_lo")?,
            slope_hi: int(args.take("slope_hi"), "slope_hi")?,
            expect_slope: num(args.take("expect_slope"), "expect_slope")?,
            tol: num(args.take("tol"), "tol")?.unwrap_or(0.1),
        },
        "supnorm" => Analysis::SupNorm {
            k_max: int(args.take("k_max"), "k_max")?.unwrap_or(100_000),
            max_final: num(args.take("max_final"), "max_final")?,
        },
        "spot" => Analysis::Spot {
            ks: match args.take("ks") {
                Some(v) => parse_u64_list(&v).map_err(|e| format!("spot: ks: {e}"))?,
                None => vec![1, 2, 3],
            },
        },
        "decay" => Analysis::Decay {
            k_max: int(args.take("k_max"), "k_max")?.unwrap_or(100_000),
            gamma_lo: num(args.take("gamma_lo"), "gamma_lo")?.unwrap_or(0.0),
            gamma_hi: num(args.take("gamma_hi"), "gamma_hi")?.unwrap_or(1.0),
            ratio_min: num(args.take("ratio_min"), "ratio_min")?.unwrap_or(1.0),
        },
        "hill" => Analysis::Hill {
            top_frac: num(args.take("top_frac"), "top_frac")?.unwrap_or(0.01),
            expect: num(args.take("expect"), "expect")?
                .ok_or_else(|| "hill: expect=<tau> is required".to_string())?,
            tol: num(args.take("tol"), "tol")?.unwrap_or(0.3),
        },
        "ccdf_bound" => Analysis::CcdfBound,
        "coupling" => Analysis::Coupling {
            a: num(args.take("a"), "a")?,
            horizons: match args.take("horizons") {
                Some(v) => parse_u64_list(&v).map_err(|e| format!("coupling: horizons: {e}"))?,
                None => Vec::new(),
            },
            b_max: num(args.take("b_max"), "b_max")?.unwrap_or(1.0),
        },
        "moments" => Analysis::Moments {
            s: num(args.take("s"), "s")?
                .ok_or_else(|| "moments: s=<order> is required".to_string())?,
            probes: match args.take("probes") {
                Some(v) => parse_u64_list(&v).map_err(|e| format!("moments: probes: {e}"))?,
                None => vec![10, 100, 1000],
            },
            expect_slope: num(args.take("expect_slope"), "expect_slope")?
                .ok_or_else(|| "moments: expect_slope=<slope> is required".to_string())?,
            tol: num(args.take("tol"), "tol")?.unwrap_or(0.2),
            reps: int(args.take("reps"), "reps")?,
        },
        "l_moments" => Analysis::LMoments {
            s: num(args.take("s"), "s")?
                .ok_or_else(|| "l_moments: s=<order> is required".to_string())?,
            ts: match args.take("ts") {
                Some(v) => parse_u64_list(&v).map_err(|e| format!("l_moments: ts: {e}"))?,
                None => vec![1_000, 10_000, 100_000],
            },
            ratio_factor: num(args.take("ratio_factor"), "ratio_factor")?.unwrap_or(2.0),
            neg_bound: num(args.take("neg_bound"), "neg_bound")?.unwrap_or(10.0),
            reps: int(args.take("reps"), "reps")?,
        },
        other => return Err(format!("unknown analysis `{other}`")),
    };
    args.finish(name)?;
    Ok(analysis)
}

/// Parse and validate a config; on failure every detected problem is
/// reported with its line number.
pub fn parse_config(text: &str) -> Result<ExperimentSpec, Vec<ConfigError>> {
    let mut errors = Vec::new();
    let mut fields: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((k, v)) => fields.push((line_no, k.trim().to_string(), v.trim().to_string())),
            None => errors.push(ConfigError {
                line: line_no,
                message: format!("expected `key = value`, got `{line}`"),
            }),
        }
    }

    let mut err = |line: usize, message: String| {
        errors.push(ConfigError { line, message });
    };

    let mut name = String::from("experiment");
    let mut delta = 0.0f64;
    let mut delta_line = 0usize;
    let mut weights: Option<(usize, WeightDistribution)> = None;
    let mut t_max: Option<(usize, u64)> = None;
    let mut seed = 0u64;
    let mut reps = 1u64;
    let mut snapshots_raw: Option<(usize, String)> = None;
    let mut rule = AttachmentRule::Parid;
    let mut rule_line = 0usize;
    let mut coupling_a: Option<f64> = None;
    let mut coupling_a_line = 0usize;
    let mut out_dir: Option<PathBuf> = None;
    let mut analyses_raw: Option<(usize, String)> = None;

    for (line, key, value) in fields {
        match key.as_str() {
            "name" => {
                if value.is_empty()
                    || !value
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
                {
                    err(
                        line,
                        format!("name `{value}` is not a valid directory component"),
                    );
                } else {
                    name = value;
                }
            }
            "delta" => match value.parse::<f64>() {
                Ok(v) => {
                    delta = v;
                    delta_line = line;
                }
                Err(e) => err(line, format!("delta: {e}")),
            },
            "weights" => match value.parse::<WeightDistribution>() {
                Ok(w) => weights = Some((line, w)),
                Err(e) => err(line, e.to_string()),
            },
            "t_max" => match value.parse::<u64>() {
                Ok(v) if v >= 1 => t_max = Some((line, v)),
                Ok(_) => err(line, "t_max must be at least 1".into()),
                Err(e) => err(line, format!("t_max: {e}")),
            },
            "seed" => match value.parse::<u64>() {
                Ok(v) => seed = v,
                Err(e) => err(line, format!("seed: {e}")),
            },
            "reps" => match value.parse::<u64>() {
                Ok(v) if v >= 1 => reps = v,
                Ok(_) => err(line, "reps must be at least 1".into()),
                Err(e) => err(line, format!("reps: {e}")),
            },
            "snapshots" => snapshots_raw = Some((line, value)),
            "rule" => match parse_rule(&value) {
                Ok(r) => {
                    rule = r;
                    rule_line = line;
                }
                Err(e) => err(line, e),
            },
            "coupling_a" => match value.parse::<f64>() {
                Ok(v) => {
                    coupling_a = Some(v);
                    coupling_a_line = line;
                }
                Err(e) => err(line, format!("coupling_a: {e}")),
            },
            "out_dir" => out_dir = Some(PathBuf::from(value)),
            "analyses" => analyses_raw = Some((line, value)),
            other => err(line, format!("unknown key `{other}`")),
        }
    }

    let (weights_line, weights) = match weights {
        Some((l, w)) => (l, Some(w)),
        None => {
            err(0, "missing required key `weights`".into());
            (0, None)
        }
    };
    let (_t_max_line, t_max_v) = match t_max {
        Some((l, v)) => (l, v),
        None => {
            err(0, "missing required key `t_max`".into());
            (0, 1)
        }
    };

    // Cross-field validation.
    if let Some(w) = &weights {
        if matches!(rule, AttachmentRule::Parid) && !(delta + w.min_support() as f64 > 0.0) {
            err(
                if delta_line > 0 { delta_line } else { weights_line },
                format!(
                    "delta + min weight support must be strictly positive (delta = {delta}, min support = {})",
                    w.min_support()
                ),
            );
        }
        if let AttachmentRule::Fitness { .. } = &rule {
            let p = ModelParams {
                delta,
                weights: w.clone(),
                t_max: t_max_v,
                seed,
                rule: rule.clone(),
            };
            if let Err(e) = p.validate() {
                err(rule_line, e.to_string());
            }
        }
    }
    if let Some(a) = coupling_a {
        if !(a > 0.0 && a < 0.5) {
            err(
                coupling_a_line,
                format!("coupling_a must lie in (0, 1/2), got {a}"),
            );
        }
    }

    let snapshots = match &snapshots_raw {
        Some((line, v)) => match parse_snapshots(v, t_max_v) {
            Ok(s) => {
                for (i, &t) in s.iter().enumerate() {
                    if t < 1 || t > t_max_v {
                        err(*line, format!("snapshot {t} outside [1, {t_max_v}]"));
                    }
                    if i > 0 && s[i - 1] >= t {
                        err(*line, "snapshots must be strictly increasing".into());
                    }
                }
                s
            }
            Err(e) => {
                err(*line, e);
                vec![t_max_v]
            }
        },
        None => vec![t_max_v],
    };

    let mut analyses = Vec::new();
    if let Some((line, raw)) = &analyses_raw {
        match split_analyses(raw) {
            Ok(items) => {
                for item in items {
                    match parse_analysis(&item) {
                        Ok(a) => analyses.push(a),
                        Err(e) => err(*line, e),
                    }
                }
            }
            Err(e) => err(*line, e),
        }
    }

    // Analysis preconditions, checkable from the params alone.
    if let Some(w) = &weights {
        let tau_w = w.tau_w();
        let finite_mean = matches!(w.mean(), Mean::Finite(_));
        for a in &analyses {
            let line = analyses_raw.as_ref().map(|x| x.0).unwrap_or(0);
            match a {
                Analysis::Moments { s, probes, .. } => {
                    if !(tau_w > 1.0 && tau_w < 2.0) {
                        err(
                            line,
                            format!("moments analysis requires a weight tail exponent in (1,2), got τ_W = {tau_w}"),
                        );
                    } else if !(*s > 0.0 && *s < tau_w - 1.0) {
                        err(
                            line,
                            format!("moments order s = {s} must lie in (0, τ_W - 1)"),
                        );
                    }
                    if probes.iter().any(|&i| i > t_max_v) {
                        err(line, "moments probes must be within [0, t_max]".into());
                    }
                }
                Analysis::LMoments { s, .. } => {
                    if !(tau_w > 1.0 && tau_w < 2.0) {
                        err(
                            line,
                            format!("l_moments analysis requires a weight tail exponent in (1,2), got τ_W = {tau_w}"),
                        );
                    } else if !(*s > 0.0 && *s < tau_w - 1.0) {
                        err(
                            line,
                            format!("l_moments order s = {s} must lie in (0, τ_W - 1)"),
                        );
                    }
                }
                Analysis::TheoryTable { .. }
                | Analysis::SupNorm { .. }
                | Analysis::Spot { .. }
                | Analysis::Decay { .. } => {
                    if !finite_mean {
                        err(
                            line,
                            format!("{} analysis requires finite-mean weights", a.name()),
                        );
                    }
                    if let Analysis::Decay { .. } = a {
                        if snapshots.len() < 3 {
                            err(line, "decay analysis needs at least 3 snapshots".into());
                        }
                    }
                }
                Analysis::Hill { top_frac, .. } => {
                    if !(*top_frac > 0.0 && *top_frac < 1.0) {
                        err(
                            line,
                            format!("hill top fraction {top_frac} must lie in (0,1)"),
                        );
                    }
                }
                Analysis::Coupling {
                    a: a_opt, horizons, ..
                } => {
                    let a_eff = a_opt.or(coupling_a);
                    match a_eff {
                        None => err(
                            line,
                            "coupling analysis needs a=<exponent> (or coupling_a)".into(),
                        ),
                        Some(a) if !(a > 0.0 && a < 0.5) => err(
                            line,
                            format!("coupling exponent must lie in (0, 1/2), got {a}"),
                        ),
                        _ => {}
                    }
                    if horizons.iter().any(|&h| h > t_max_v || h < 2) {
                        err(line, "coupling horizons must lie in [2, t_max]".into());
                    }
                }
                Analysis::CcdfBound => {}
            }
        }
    }

    if !errors.is_empty() {
        return Err(errors);
    }
    let out_dir = out_dir.unwrap_or_else(|| PathBuf::from("out").join(&name));
    Ok(ExperimentSpec {
        name,
        delta,
        weights: weights.unwrap(),
        t_max: t_max_v,
        seed,
        reps,
        snapshots,
        rule,
        coupling_a,
        out_dir,
        analyses,
    })
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Analysis::TheoryTable {
                k_max,
                slope_lo,
                slope_hi,
                expect_slope,
                tol,
            } => {
                write!(f, "theory_table(k_max={k_max}")?;
                if let Some(lo) = slope_lo {
                    write!(f, ", slope_lo={lo}")?;
                }
                if let Some(hi) = slope_hi {
                    write!(f, ", slope_hi={hi}")?;
                }
                if let Some(e) = expect_slope {
                    write!(f, ", expect_slope={e}")?;
                }
                write!(f, ", tol={tol})")
            }
            Analysis::SupNorm { k_max, max_final } => {
                write!(f, "supnorm(k_max={k_max}")?;
                if let Some(m) = max_final {
                    write!(f, ", max_final={m}")?;
                }
                write!(f, ")")
            }
            Analysis::Spot { ks } => {
                let s: Vec<String> = ks.iter().map(|k| k.to_string()).collect();
                write!(f, "spot(ks={})", s.join(":"))
            }
            Analysis::Decay {
                k_max,
                gamma_lo,
                gamma_hi,
                ratio_min,
            } => write!(
                f,
                "decay(k_max={k_max}, gamma_lo={gamma_lo}, gamma_hi={gamma_hi}, ratio_min={ratio_min})"
            ),
            Analysis::Hill { top_frac, expect, tol } => {
                write!(f, "hill(top_frac={top_frac}, expect={expect}, tol={tol})")
            }
            Analysis::CcdfBound => write!(f, "ccdf_bound"),
            Analysis::Coupling { a, horizons, b_max } => {
                write!(f, "coupling(")?;
                if let Some(a) = a {
                    write!(f, "a={a}, ")?;
                }
                let hs: Vec<String> = horizons.iter().map(|h| h.to_string()).collect();
                write!(f, "horizons={}, b_max={b_max})", hs.join(":"))
            }
            Analysis::Moments {
                s,
                probes,
                expect_slope,
                tol,
                reps,
            } => {
                let ps: Vec<String> = probes.iter().map(|p| p.to_string()).collect();
                write!(
                    f,
                    "moments(s={s}, probes={}, expect_slope={expect_slope}, tol={tol}",
                    ps.join(":")
                )?;
                if let Some(r) = reps {
                    write!(f, ", reps={r}")?;
                }
                write!(f, ")")
            }
            Analysis::LMoments {
                s,
                ts,
                ratio_factor,
                neg_bound,
                reps,
            } => {
                let tss: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(
                    f,
                    "l_moments(s={s}, ts={}, ratio_factor={ratio_factor}, neg_bound={neg_bound}",
                    tss.join(":")
                )?;
                if let Some(r) = reps {
                    write!(f, ", reps={r}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for ExperimentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name = {}", self.name)?;
        writeln!(f, "delta = {}", self.delta)?;
        writeln!(f, "weights = {}", self.weights)?;
        writeln!(f, "t_max = {}", self.t_max)?;
        writeln!(f, "seed = {}", self.seed)?;
        writeln!(f, "reps = {}", self.reps)?;
        let snaps: Vec<String> = self.snapshots.iter().map(|s| s.to_string()).collect();
        writeln!(f, "snapshots = {}", snaps.join(","))?;
        writeln!(f, "rule = {}", rule_to_string(&self.rule))?;
        if let Some(a) = self.coupling_a {
            writeln!(f, "coupling_a = {a}")?;
        }
        writeln!(f, "out_dir = {}", self.out_dir.display())?;
        let items: Vec<String> = self.analyses.iter().map(|a| a.to_string()).collect();
        writeln!(f, "analyses = [{}]", items.join(", "))
    }
}
