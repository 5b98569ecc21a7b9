//! tailforge: generate example hypergraphs, compute structural profiles,
//! evaluate upper-tail bounds over parameter grids, run reproducible Monte
//! Carlo tail estimates, and execute the verification campaigns.
//!
//! Exit codes: 0 = ran (NotApplicable bound rows are not failures),
//! 1 = usage error, 2 = verification violation.

use std::collections::BTreeSet;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use uppertail::generators::{self, InstanceProfile};
use uppertail::pattern::{self, Pattern};
use uppertail::sampler::{mc_tail, Regime, TailModel, Target};
use uppertail::verify::{evaluate_theorems, VerifySuite};
use uppertail::Hypergraph;

#[derive(Parser)]
#[command(name = "tailforge", version, about = "upper-tail concentration workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an example hypergraph and write its canonical JSON.
    Gen(GenArgs),
    /// Print degree and mu profiles of a stored hypergraph.
    Stats(StatsArgs),
    /// Sweep the bound evaluators over a (p, eps) grid.
    Bound(ConfigArgs),
    /// Monte Carlo tail estimates over the configured grid.
    Simulate(ConfigArgs),
    /// Run the verification campaigns; exits 2 on any violation.
    Verify(VerifyArgs),
    /// Summarize previously written report files.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// ap | schur | ellsum | quad | rssum | linsys | complete
    family: String,
    #[arg(long)]
    n: u32,
    /// Edge size for ap/complete.
    #[arg(long)]
    k: Option<usize>,
    /// Multiplier for ellsum (x + y = ell z).
    #[arg(long)]
    ell: Option<u32>,
    /// Left/right arity for rssum.
    #[arg(long)]
    r: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// Coefficient rows for linsys, as a JSON array of rows.
    #[arg(long)]
    matrix: Option<String>,
    /// Constant edge weight (default 1).
    #[arg(long)]
    weight: Option<f64>,
    /// Pattern name for subgraph-edge / subgraph-vertex (k3, k12, 2k2, ...).
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated inclusion probabilities for mu profiles.
    #[arg(long)]
    p: Option<String>,
}

#[derive(Args)]
struct ConfigArgs {
    /// Experiment configuration (JSON document).
    #[arg(long)]
    config: PathBuf,
    /// Seed override (otherwise config seed, then TAILFORGE_SEED).
    #[arg(long)]
    seed: Option<u64>,
    /// Trials override for simulate.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    seed: Option<u64>,
    /// Shrunken case counts for smoke runs.
    #[arg(long)]
    quick: bool,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Verify JSON, bound CSV, or simulate CSV files.
    inputs: Vec<PathBuf>,
}

/// One experiment: a generator, a parameter grid, a threshold grid, and the
/// provenance seed. Flags override fields; the seed must come from the flag,
/// the config, or TAILFORGE_SEED (never the clock).
#[derive(Clone, Serialize, Deserialize)]
struct ExperimentConfig {
    generator: GeneratorSpec,
    regime: RegimeSpec,
    thresholds: ThresholdSpec,
    #[serde(default)]
    theorems: Vec<String>,
    #[serde(default)]
    trials: Option<u64>,
    #[serde(default)]
    seed: Option<u64>,
    /// Reduction order of the family (defaults to the family's known value).
    #[serde(default)]
    q: Option<usize>,
}

#[derive(Clone, Serialize, Deserialize)]
struct GeneratorSpec {
    family: String,
    n: u32,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    ell: Option<u32>,
    #[serde(default)]
    r: Option<usize>,
    #[serde(default)]
    s: Option<usize>,
    #[serde(default)]
    matrix: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    weight: Option<f64>,
    /// Pattern name for the subgraph-count encodings (k3, k12, 2k2, ...).
    #[serde(default)]
    pattern: Option<String>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum RegimeSpec {
    VertexBinomial { p_grid: Vec<f64> },
    VertexUniform { m_grid: Vec<usize> },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum ThresholdSpec {
    /// Thresholds `(1 + eps) mu`.
    Eps { grid: Vec<f64> },
    /// Thresholds `mu + t`.
    T { grid: Vec<f64> },
}

fn main() -> ExitCode {
    // behave like a normal unix filter when downstream closes the pipe
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap would exit 2; the contract reserves 2 for verification
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    let outcome = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn build_hypergraph(spec: &GeneratorSpec) -> Result<(Hypergraph, usize)> {
    let n = spec.n;
    let (h, q) = match spec.family.as_str() {
        "ap" => {
            let k = spec.k.unwrap_or(3);
            (generators::gen_ap(n, k)?, 2)
        }
        "schur" => (generators::gen_schur(n)?, 2),
        "ellsum" => (generators::gen_ell_sum(n, spec.ell.unwrap_or(1))?, 2),
        "quad" => (generators::gen_additive_quadruples(n)?, 3),
        "rssum" => {
            let r = spec.r.ok_or_else(|| anyhow!("rssum needs --r"))?;
            let s = spec.s.ok_or_else(|| anyhow!("rssum needs --s"))?;
            (generators::gen_rs_sums(n, r, s)?, r + s - 1)
        }
        "linsys" => {
            let m = spec
                .matrix
                .as_ref()
                .ok_or_else(|| anyhow!("linsys needs a coefficient matrix"))?;
            let k = m.first().map(|row| row.len()).unwrap_or(0);
            let q = k.saturating_sub(m.len());
            (generators::gen_linear_system(n, m)?, q)
        }
        "complete" => {
            let k = spec.k.ok_or_else(|| anyhow!("complete needs --k"))?;
            (generators::gen_complete(n, k)?, k)
        }
        "subgraph-edge" => {
            // faithful encoding: vertex-sampling this hypergraph at p equals
            // counting pattern copies in a random graph at edge density p
            let pat = Pattern::by_name(
                spec.pattern.as_deref().ok_or_else(|| anyhow!("subgraph-edge needs a pattern"))?,
            )?;
            let q = pat.e() + 1 - pat.min_degree();
            (pattern::encode_edge_exposure(&pat, n as usize)?, q)
        }
        "subgraph-vertex" => {
            // the support hypergraph of the vertex-exposure analysis: every
            // v-set of [n] is an edge slot
            let pat = Pattern::by_name(
                spec.pattern.as_deref().ok_or_else(|| anyhow!("subgraph-vertex needs a pattern"))?,
            )?;
            (generators::gen_complete(n, pat.v())?, pat.v())
        }
        other => bail!("unknown generator family: {other}"),
    };
    let h = match spec.weight {
        Some(w) => h.with_uniform_weight(w)?,
        None => h,
    };
    Ok((h, q))
}

fn cmd_gen(a: GenArgs) -> Result<ExitCode> {
    let spec = GeneratorSpec {
        family: a.family,
        n: a.n,
        k: a.k,
        ell: a.ell,
        r: a.r,
        s: a.s,
        matrix: a.matrix.as_deref().map(serde_json::from_str).transpose()?,
        weight: a.weight,
        pattern: a.pattern,
    };
    let (h, q) = build_hypergraph(&spec)?;
    let json = h.to_json();
    if let Some(path) = &a.out {
        fs::write(path, &json).with_context(|| format!("writing {}", path.display()))?;
    } else {
        println!("{json}");
    }
    let profile = h.degree_profile(f64::INFINITY);
    println!("family={} n={} edges={}", spec.family, a.n, h.edge_count());
    let deltas: Vec<String> = profile
        .deltas
        .iter()
        .enumerate()
        .map(|(i, d)| format!("delta_{}={}", i + 1, d))
        .collect();
    println!("{}", deltas.join(" "));
    if q >= 1 && q <= h.max_edge_size() {
        println!("q={} delta_q={}", q, h.delta(q)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_stats(a: StatsArgs) -> Result<ExitCode> {
    let raw = fs::read_to_string(&a.input)
        .with_context(|| format!("reading {}", a.input.display()))?;
    let h = Hypergraph::from_json(&raw)?;
    let profile = h.degree_profile(f64::INFINITY);
    let mut doc = serde_json::json!({
        "n": h.n_vertices(),
        "k": h.max_edge_size(),
        "edges": h.edge_count(),
        "total_weight": h.total_weight(),
        "deltas": profile.deltas,
    });
    if let Some(ps) = &a.p {
        let mut out = Vec::new();
        for tok in ps.split(',') {
            let p: f64 = tok.trim().parse().context("parsing --p")?;
            out.push(serde_json::to_value(h.mu_profile(p)?)?);
        }
        doc["mu_profiles"] = serde_json::Value::Array(out);
    }
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(ExitCode::SUCCESS)
}

fn resolve_seed(flag: Option<u64>, config: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = config {
        return Ok(s);
    }
    if let Ok(env) = std::env::var("TAILFORGE_SEED") {
        return env
            .parse()
            .map_err(|_| anyhow!("TAILFORGE_SEED must be an unsigned integer"));
    }
    bail!("no seed: pass --seed, set it in the config, or export TAILFORGE_SEED")
}

fn load_config(a: &ConfigArgs) -> Result<(ExperimentConfig, u64, String)> {
    let raw = fs::read_to_string(&a.config)
        .with_context(|| format!("reading {}", a.config.display()))?;
    let mut cfg: ExperimentConfig = serde_json::from_str(&raw).context("parsing config")?;
    let seed = resolve_seed(a.seed, cfg.seed)?;
    cfg.seed = Some(seed);
    if let Some(t) = a.trials {
        cfg.trials = Some(t);
    }
    match &cfg.regime {
        RegimeSpec::VertexBinomial { p_grid } if p_grid.is_empty() => bail!("empty p grid"),
        RegimeSpec::VertexUniform { m_grid } if m_grid.is_empty() => bail!("empty m grid"),
        _ => {}
    }
    let empty = match &cfg.thresholds {
        ThresholdSpec::Eps { grid } | ThresholdSpec::T { grid } => grid.is_empty(),
    };
    if empty {
        bail!("empty threshold grid");
    }
    let canonical = serde_json::to_string(&cfg)?;
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let hash = hex_prefix(&hasher.finalize(), 12);
    Ok((cfg, seed, hash))
}

fn hex_prefix(bytes: &[u8], len: usize) -> String {
    let mut s = String::new();
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
        if s.len() >= len {
            break;
        }
    }
    s.truncate(len);
    s
}

fn regime_points(cfg: &ExperimentConfig) -> Vec<(String, f64, Regime)> {
    match &cfg.regime {
        RegimeSpec::VertexBinomial { p_grid } => p_grid
            .iter()
            .map(|&p| ("vertex-binomial".to_string(), p, Regime::VertexBinomial { p }))
            .collect(),
        RegimeSpec::VertexUniform { m_grid } => m_grid
            .iter()
            .map(|&m| ("vertex-uniform".to_string(), m as f64, Regime::VertexUniform { m }))
            .collect(),
    }
}

/// Effective inclusion probability of a regime (uniform transfers m/N).
fn effective_p(regime: &Regime, h: &Hypergraph) -> f64 {
    match regime {
        Regime::VertexBinomial { p } => *p,
        Regime::VertexUniform { m } => *m as f64 / h.n_vertices() as f64,
        _ => unreachable!("CLI regimes are vertex regimes"),
    }
}

fn cmd_bound(a: ConfigArgs) -> Result<ExitCode> {
    let (cfg, seed, hash) = load_config(&a)?;
    let (h, q_default) = build_hypergraph(&cfg.generator)?;
    let q = cfg.q.unwrap_or(q_default);
    let profile = InstanceProfile::from_hypergraph(&h, q)?;
    let wanted: Option<BTreeSet<String>> = if cfg.theorems.is_empty() {
        None
    } else {
        Some(cfg.theorems.iter().cloned().collect())
    };
    let mut csv = String::from(
        "target,regime,param,threshold,theorem,status,log10_bound,seed,config_hash\n",
    );
    let mut reports = Vec::new();
    for (regime_name, param, regime) in regime_points(&cfg) {
        let p = effective_p(&regime, &h);
        let mu = profile.mu(p);
        let eps_grid: Vec<f64> = match &cfg.thresholds {
            ThresholdSpec::Eps { grid } => grid.clone(),
            ThresholdSpec::T { grid } => grid.iter().map(|t| t / mu.max(1e-300)).collect(),
        };
        for &eps in &eps_grid {
            let threshold = (1.0 + eps) * mu;
            let mut batch = evaluate_theorems(&h, &profile, p, eps)?;
            // pattern encodings additionally get the subgraph-count bounds
            if let Some(name) = &cfg.generator.pattern {
                if cfg.generator.family.starts_with("subgraph") {
                    let pat = Pattern::by_name(name)?;
                    let params = uppertail::bounds::SubgraphParams {
                        eps,
                        t: eps * mu,
                        ..Default::default()
                    };
                    for mode in [
                        uppertail::bounds::SubgraphMode::Small,
                        uppertail::bounds::SubgraphMode::Gauss,
                        uppertail::bounds::SubgraphMode::Large,
                        uppertail::bounds::SubgraphMode::LargeBalanced,
                    ] {
                        batch.push(uppertail::bounds::bound_subgraph(
                            &pat,
                            cfg.generator.n as usize,
                            p,
                            mode,
                            &params,
                        )?);
                    }
                }
            }
            for rep in batch {
                if let Some(w) = &wanted {
                    if !w.contains(&rep.theorem) {
                        continue;
                    }
                }
                let lg = rep
                    .log10_bound()
                    .map(|v| format!("{v:.6}"))
                    .unwrap_or_else(|| "".to_string());
                let status = if rep.applicable() { "ok" } else { "not_applicable" };
                csv.push_str(&format!(
                    "{},{},{},{:.6},{},{},{},{},{}\n",
                    cfg.generator.family, regime_name, param, threshold, rep.theorem, status, lg,
                    seed, hash
                ));
                reports.push(serde_json::json!({
                    "param": param,
                    "eps": eps,
                    "report": rep,
                }));
            }
        }
    }
    emit(&a.out_csv, &csv)?;
    if let Some(path) = &a.out_json {
        fs::write(path, serde_json::to_string_pretty(&reports)?)?;
    }
    if a.out_csv.is_none() {
        print!("{csv}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_simulate(a: ConfigArgs) -> Result<ExitCode> {
    let (cfg, seed, hash) = load_config(&a)?;
    let trials = cfg.trials.unwrap_or(0);
    if trials == 0 {
        bail!("simulate needs trials >= 1");
    }
    let (h, q_default) = build_hypergraph(&cfg.generator)?;
    let q = cfg.q.unwrap_or(q_default);
    let profile = InstanceProfile::from_hypergraph(&h, q)?;
    let mut csv = String::from(
        "target,regime,param,threshold,trials,estimate,ci_lo,ci_hi,seed,config_hash\n",
    );
    for (regime_name, param, regime) in regime_points(&cfg) {
        let p = effective_p(&regime, &h);
        let mu = profile.mu(p);
        let thresholds: Vec<f64> = match &cfg.thresholds {
            ThresholdSpec::Eps { grid } => grid.iter().map(|e| (1.0 + e) * mu).collect(),
            ThresholdSpec::T { grid } => grid.iter().map(|t| mu + t).collect(),
        };
        let model = TailModel { target: Target::Hyper(h.clone()), regime, seed };
        for threshold in thresholds {
            let est = mc_tail(&model, threshold, trials, 0.95)?;
            csv.push_str(&format!(
                "{},{},{},{:.6},{},{:.8},{:.8},{:.8},{},{}\n",
                cfg.generator.family,
                regime_name,
                param,
                threshold,
                est.trials,
                est.estimate,
                est.ci_lo,
                est.ci_hi,
                seed,
                hash
            ));
        }
    }
    emit(&a.out_csv, &csv)?;
    if a.out_csv.is_none() {
        print!("{csv}");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(a: VerifyArgs) -> Result<ExitCode> {
    let seed = resolve_seed(a.seed, None)?;
    let suite = VerifySuite::run(seed, a.quick);
    for c in &suite.campaigns {
        println!(
            "[{}] {} ({} cases, {} violations)",
            if c.passed() { "pass" } else { "FAIL" },
            c.name,
            c.cases,
            c.violations.len()
        );
    }
    if let Some(path) = &a.out_csv {
        fs::write(path, suite.to_csv())?;
    }
    if let Some(path) = &a.out_json {
        fs::write(path, suite.to_json())?;
    }
    if suite.passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        for c in &suite.campaigns {
            for v in &c.violations {
                eprintln!("violation[{}]: {v}", c.name);
            }
        }
        Ok(ExitCode::from(2))
    }
}

fn cmd_report(a: ReportArgs) -> Result<ExitCode> {
    if a.inputs.is_empty() {
        bail!("report needs at least one input file");
    }
    for path in &a.inputs {
        let raw = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        println!("== {}", path.display());
        if raw.trim_start().starts_with('{') {
            let doc: serde_json::Value = serde_json::from_str(&raw)?;
            if let Some(campaigns) = doc.get("campaigns").and_then(|c| c.as_array()) {
                for c in campaigns {
                    println!(
                        "  {}: {} cases, {} violations",
                        c["name"].as_str().unwrap_or("?"),
                        c["cases"],
                        c["violations"].as_array().map(|v| v.len()).unwrap_or(0)
                    );
                }
            } else {
                println!("  JSON document with {} top-level entries", doc.as_object().map(|o| o.len()).unwrap_or(0));
            }
        } else {
            let mut lines = raw.lines();
            let header = lines.next().unwrap_or("");
            let rows = lines.filter(|l| !l.starts_with('#')).count();
            println!("  {rows} rows [{header}]");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn emit(path: &Option<PathBuf>, contents: &str) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, contents).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}
