use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use rainbow_core::absorbers::{enumerate_clique_absorbers, enumerate_matching_absorbers, Gadget, RainbowAbsorber};
use rainbow_core::fb::{build_fb_graph, FbMode};
use rainbow_core::generators::{generate, InstanceKind, InstanceSpec};
use rainbow_core::lp::{
    has_perfect_fractional_matching, max_fractional_matching, min_fractional_cover, parse_hypergraph, Hypergraph,
};
use rainbow_core::model::io::{parse_instance, write_instance};
use rainbow_core::model::{DegreeRule, GraphSystem, PatternF, RainbowPacking};
use rainbow_core::pipeline::{
    find_rainbow_factor, verify_factor, CoverStrategy, FactorStrategy, PipelineConfig, SolveStatus,
};
use rainbow_core::sweep::{emit_report, run_sweep, write_csv, SweepSpec};

#[derive(Parser)]
#[command(name = "rf", version, about = "Rainbow F-factors in graph systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen(GenArgs),
    /// Search for a rainbow factor.
    Solve(SolveArgs),
    /// Check a claimed factor against an instance.
    Verify(VerifyArgs),
    /// Fractional matching, cover and perfect fractional matching LPs.
    Lp(LpArgs),
    /// Enumerate rainbow absorbers for a target set.
    Absorbers(AbsorberArgs),
    /// Run a seeded experiment grid and write a CSV report.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value = "random")]
    kind: String,
    #[arg(long)]
    n: usize,
    /// Clique size; shorthand for `--pattern clique:t`.
    #[arg(long, alias = "k")]
    t: Option<usize>,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    m: Option<usize>,
    /// Degree rule: standard[:d], out, in, semi, partite.
    #[arg(long)]
    rule: Option<String>,
    /// Minimum degree target for random systems.
    #[arg(long)]
    delta: Option<usize>,
    /// Minimum degree target as a fraction of n.
    #[arg(long, conflicts_with = "delta")]
    frac: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    delete_prob: f64,
    #[arg(long)]
    parts: Option<usize>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConfigArgs {
    /// File of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides a single key, e.g. `--set epsilon=0.1`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    cover: Option<CoverStrategy>,
    #[arg(long)]
    budget: Option<u64>,
}

impl ConfigArgs {
    fn resolve(&self, seed: Option<u64>) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.config {
            cfg.merge_text(&read(path)?).map_err(usage)?;
        }
        for kv in &self.overrides {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| usage(format!("expected KEY=VALUE, got '{kv}'")))?;
            cfg.set(k.trim(), v.trim()).map_err(usage)?;
        }
        if let Some(c) = self.cover {
            cfg.cover = c;
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    pattern: String,
    #[arg(long, default_value = "absorption")]
    strategy: String,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    config: ConfigArgs,
    /// Also write the factor JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    factor: PathBuf,
    /// Defaults to the pattern recorded in the factor file.
    #[arg(long)]
    pattern: Option<String>,
}

#[derive(Args)]
struct LpArgs {
    /// Hypergraph file (`hypergraph n`, then one edge per line).
    #[arg(long, conflicts_with = "instance")]
    hypergraph: Option<PathBuf>,
    /// Instance file; the LP runs on its (f,b)-graph.
    #[arg(long, requires = "pattern")]
    instance: Option<PathBuf>,
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long, default_value = "matching", value_parser = ["matching", "cover", "pfm"])]
    mode: String,
}

#[derive(Args)]
struct AbsorberArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    pattern: String,
    #[arg(long, value_delimiter = ',')]
    target: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    colors: Vec<usize>,
    #[arg(long, default_value_t = 10)]
    limit: usize,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    pattern: String,
    #[arg(long, default_value = "random")]
    kind: String,
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.75")]
    frac: Vec<f64>,
    /// Number of seeds per cell.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "absorption")]
    strategy: Vec<String>,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// CSV output; stdout when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long, requires = "out")]
    json: Option<PathBuf>,
    #[arg(long)]
    no_timing: bool,
}

/// Bad input: exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow!(Usage(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(|e| usage(format!("{e:#}")))
}

fn load_instance(path: &Path) -> Result<GraphSystem> {
    parse_instance(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_pattern(s: &str) -> Result<PatternF> {
    s.parse().map_err(usage)
}

fn factor_json(pattern: &PatternF, packing: &RainbowPacking) -> Value {
    let copies: Vec<Value> = packing
        .copies
        .iter()
        .map(|c| json!({"vertices": c.vertex_set(), "embedding": c.embedding, "colors": c.colors}))
        .collect();
    json!({"pattern": pattern.to_string(), "copies": copies})
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let kind: InstanceKind = a
        .kind
        .parse()
        .map_err(|_| usage(format!("unknown kind '{}'", a.kind)))?;
    let pattern = match (&a.pattern, a.t) {
        (Some(p), _) => parse_pattern(p)?,
        (None, Some(t)) => PatternF::clique(t).map_err(usage)?,
        (None, None) if kind == InstanceKind::FromFile => PatternF::clique(3).map_err(usage)?,
        (None, None) => bail!(usage("give --pattern or --t")),
    };
    let mut spec = InstanceSpec::new(kind, a.n, pattern, a.seed);
    spec.m = a.m;
    if let Some(r) = &a.rule {
        spec.rule = r.parse::<DegreeRule>().map_err(usage)?;
    }
    spec.delta = match a.frac {
        Some(f) if (0.0..=1.0).contains(&f) => Some((f * a.n as f64).ceil() as usize),
        Some(f) => bail!(usage(format!("fraction {f} is outside [0, 1]"))),
        None => a.delta,
    };
    spec.delete_prob = a.delete_prob;
    spec.parts = a.parts;
    spec.path = a.input;
    let sys = generate(&spec).map_err(usage)?;
    write_output(a.out.as_deref(), &write_instance(&sys))?;
    Ok(ExitCode::SUCCESS)
}

fn solve(a: SolveArgs) -> Result<ExitCode> {
    let sys = load_instance(&a.instance)?;
    let pattern = parse_pattern(&a.pattern)?;
    let strategy: FactorStrategy = a.strategy.parse().map_err(usage)?;
    let cfg = a.config.resolve(a.seed)?;
    cfg.validate().map_err(usage)?;
    let report = find_rainbow_factor(&sys, &pattern, &cfg, strategy).map_err(|e| {
        if e.is_search_failure() || matches!(e, rainbow_core::pipeline::PipelineError::Verification(_)) {
            anyhow!(e)
        } else {
            usage(e)
        }
    })?;
    let mut stats = serde_json::to_value(&report.stats)?;
    if a.no_timing {
        stats["timings_ms"] = json!({});
    }
    let factor = report.packing.as_ref().map(|p| factor_json(&pattern, p));
    if let (Some(path), Some(f)) = (&a.out, &factor) {
        fs::write(path, serde_json::to_string_pretty(f)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let out = json!({
        "status": report.status,
        "strategy": strategy,
        "seed": cfg.seed,
        "factor": factor,
        "stats": stats,
    });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(if report.status == SolveStatus::Factor {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let sys = load_instance(&a.instance)?;
    let doc: Value =
        serde_json::from_str(&read(&a.factor)?).map_err(|e| usage(format!("{}: {e}", a.factor.display())))?;
    // accept a bare factor or a `solve` report
    let factor = if doc.get("copies").is_some() {
        &doc
    } else {
        &doc["factor"]
    };
    if factor.is_null() {
        println!("invalid: the file holds no factor");
        return Ok(ExitCode::from(1));
    }
    let pattern = match (a.pattern.as_deref(), factor["pattern"].as_str()) {
        (Some(p), _) | (None, Some(p)) => parse_pattern(p)?,
        (None, None) => bail!(usage("no pattern given or recorded")),
    };
    let packing: RainbowPacking = serde_json::from_value(factor.clone()).map_err(usage)?;
    match verify_factor(&sys, &pattern, &packing) {
        Ok(()) => {
            println!("valid: {} copies", packing.len());
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(ExitCode::from(1))
        }
    }
}

fn lp(a: LpArgs) -> Result<ExitCode> {
    let (h, b): (Hypergraph, Option<usize>) = match (&a.hypergraph, &a.instance) {
        (Some(p), _) => {
            let h = parse_hypergraph(&read(p)?).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            let b = h.uniformity();
            (h, b)
        }
        (None, Some(p)) => {
            let pattern = parse_pattern(a.pattern.as_deref().unwrap_or_default())?;
            let g = build_fb_graph(&load_instance(p)?, &pattern, FbMode::Relaxed).map_err(usage)?;
            (g.to_hypergraph(), Some(pattern.b() + pattern.f()))
        }
        (None, None) => bail!(usage("give --hypergraph or --instance")),
    };
    let (value, weights, extra) = match a.mode.as_str() {
        "matching" => {
            let s = max_fractional_matching(&h);
            (s.value, s.weights, None)
        }
        "cover" => {
            let s = min_fractional_cover(&h);
            (s.value, s.weights, None)
        }
        _ => {
            let b = b.ok_or_else(|| usage("perfect fractional matchings need a uniform hypergraph"))?;
            let out = has_perfect_fractional_matching(&h, b).map_err(usage)?;
            let cert = out.certificate.map(|c| c.a);
            (out.matching.value, out.matching.weights, Some((out.perfect, cert)))
        }
    };
    println!("value,{value}");
    if let Some((perfect, cert)) = &extra {
        println!("perfect,{perfect}");
        if let Some(a) = cert {
            let parts: Vec<String> = a.iter().map(|q| q.to_string()).collect();
            println!("certificate,{}", parts.join(" "));
        }
    }
    let slot = if a.mode == "cover" { "vertex" } else { "edge" };
    println!("{slot},weight");
    for (i, w) in weights.iter().enumerate() {
        println!("{i},{w}");
    }
    Ok(match extra {
        Some((false, _)) => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    })
}

fn absorber_json(a: &RainbowAbsorber, pattern: &PatternF) -> Value {
    let edges = |p: &RainbowPacking| -> Vec<Value> {
        p.copies
            .iter()
            .flat_map(|c| c.colored_edges(pattern))
            .map(|(e, c)| json!({"edge": e.verts(), "sign": e.sign().as_char().to_string(), "color": c}))
            .collect()
    };
    json!({
        "B": a.target,
        "L": a.internal,
        "interior": edges(&a.interior),
        "exterior": edges(&a.exterior),
    })
}

fn absorbers(a: AbsorberArgs) -> Result<ExitCode> {
    let sys = load_instance(&a.instance)?;
    let pattern = parse_pattern(&a.pattern)?;
    let found = match Gadget::for_pattern(&pattern) {
        Some(Gadget::Clique) => enumerate_clique_absorbers(&sys, &pattern, &a.target, &a.colors, a.limit),
        Some(Gadget::Matching) => enumerate_matching_absorbers(&sys, &pattern, &a.target, &a.colors, a.limit),
        None => bail!(usage(format!("no absorber gadget for {pattern}"))),
    }
    .map_err(usage)?;
    for ab in &found {
        println!("{}", absorber_json(ab, &pattern));
    }
    log::info!("{} absorbers", found.len());
    Ok(ExitCode::SUCCESS)
}

fn sweep(a: SweepArgs) -> Result<ExitCode> {
    let pattern = parse_pattern(&a.pattern)?;
    let kind: InstanceKind = a
        .kind
        .parse()
        .map_err(|_| usage(format!("unknown kind '{}'", a.kind)))?;
    let strategies = a
        .strategy
        .iter()
        .map(|s| s.parse::<FactorStrategy>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(usage)?;
    let config = a.config.resolve(None)?;
    config.validate().map_err(usage)?;
    let spec = SweepSpec {
        pattern,
        kind,
        ns: a.n,
        fracs: a.frac,
        seeds: (a.seed..a.seed + a.seeds).collect(),
        strategies,
        config,
        jobs: a.jobs.max(1),
        timing: !a.no_timing,
    };
    spec.validate().map_err(usage)?;
    let rows = run_sweep(&spec)?;
    match &a.out {
        Some(path) => emit_report(&rows, path, a.json.as_deref())?,
        None => write_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Solve(a) => solve(a),
        Command::Verify(a) => verify(a),
        Command::Lp(a) => lp(a),
        Command::Absorbers(a) => absorbers(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RF_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}
