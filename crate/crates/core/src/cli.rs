//! The `logwalk` command line: `solve`, `gap`, `oracle` and `audit`.
//!
//! Every subcommand prints a line-oriented `key=value` summary on stdout
//! and can additionally write the same pairs as a JSON object
//! (`--summary`). Output files are written to a temporary file next to the
//! target and renamed into place only on success.
//!
//! Exit codes: 0 success, 2 parse or configuration error, 3 violated
//! precondition (vector not in the image, graph too small or too large, …),
//! 4 exhausted sample budget.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::audit::{audited_run, AuditArgs, AuditTarget};
use crate::error::{domain, Error, Result};
use crate::graph::{generators, load_graph, load_vector, norm2, LoadOptions, WeightedGraph};
use crate::mode::{Mode, PracticalBudget, StrictBudget};
use crate::oracle;
use crate::solver::{solve, NormTarget, SolveConfig};
use crate::spectral::{lambda2_estimate, GapConfig, DEFAULT_NOISE_MULTIPLIER};
use crate::walk::RandomSource;

/// Seed used when neither `--seed` nor `LOGWALK_SEED` is given.
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Parser)]
#[command(name = "logwalk", version, about = "Random-walk Laplacian solver and spectral-gap estimator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Approximate L†b.
    Solve(SolveArgs),
    /// Estimate the spectral gap λ₂.
    Gap(GapArgs),
    /// Dense spectrum and, optionally, L†b.
    Oracle(OracleArgs),
    /// Register high-water marks of the strict algorithms.
    Audit(AuditCmd),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Practical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormArg {
    Entrywise,
    Euclidean,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Edge-list file: `n m`, then `u v w` per undirected edge.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value = "practical")]
    pub mode: ModeArg,
    /// Walks per start vertex (practical mode).
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Macro-trials per pmf estimate; exact pmf when absent (practical mode).
    #[arg(long)]
    pub pmf_samples: Option<u64>,
    /// Iteration cap of every innermost loop (strict mode).
    #[arg(long)]
    pub loop_cap: Option<u64>,
    /// Total work cap (strict mode).
    #[arg(long, default_value_t = 1_000_000_000)]
    pub total_cap: u64,
    #[arg(long, env = "LOGWALK_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Also write the summary as JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

impl Common {
    fn mode(&self) -> Result<Mode> {
        if self.workers == 0 {
            return Err(domain("--workers must be at least 1"));
        }
        Ok(match self.mode {
            ModeArg::Strict => Mode::Strict(StrictBudget {
                loop_cap: self.loop_cap,
                total_cap: Some(self.total_cap),
            }),
            ModeArg::Practical => {
                if self.samples == 0 {
                    return Err(domain("--samples must be positive"));
                }
                let mut b = PracticalBudget::new(self.samples).with_workers(self.workers);
                if let Some(m) = self.pmf_samples {
                    if m == 0 {
                        return Err(domain("--pmf-samples must be positive"));
                    }
                    b = b.with_pmf_samples(m);
                }
                Mode::Practical(b)
            }
        })
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    /// Right-hand side, one value per line.
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    /// Lower bound on λ₂ (default: 1/(diam·vol) per component).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Project b onto the image of L instead of rejecting it.
    #[arg(long)]
    pub project: bool,
    #[arg(long, value_enum, default_value = "entrywise")]
    pub norm: NormArg,
    /// Compare against the dense pseudo-inverse (n ≤ 200).
    #[arg(long)]
    pub compare_oracle: bool,
    /// Solution vector file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GapArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 0.2)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub gamma: f64,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Practical stopping threshold in units of the per-call sampling noise.
    #[arg(long, default_value_t = DEFAULT_NOISE_MULTIPLIER)]
    pub noise_multiplier: f64,
    /// Report the dense λ₂ too; components below four vertices use it.
    #[arg(long)]
    pub compare_oracle: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Also compute L†b (projected per component).
    #[arg(long)]
    pub b: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AuditCmd {
    /// `solve_entry`, `estimate_norm`, `lambda2_estimate` or `all`.
    #[arg(long, default_value = "all")]
    pub algorithm: String,
    /// Audit this graph instead of the cycle ladder.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Cycle lengths of the ladder.
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    pub loop_cap: u64,
    #[arg(long, default_value_t = 50_000)]
    pub total_cap: u64,
    #[arg(long, env = "LOGWALK_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

/// Exit code for an error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. }
        | Error::Weight { .. }
        | Error::Index { .. }
        | Error::Asymmetry { .. }
        | Error::Domain(_)
        | Error::Io(_) => 2,
        Error::Budget { .. } => 4,
        Error::IsolatedVertex(_)
        | Error::Disconnected { .. }
        | Error::NotApplicable(_)
        | Error::NotInImage { .. }
        | Error::Size { .. }
        | Error::Convergence { .. }
        | Error::TooSmall { .. } => 3,
    }
}

/// Ordered `key=value` report.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Summary(pub Vec<(String, Value)>);

impl Summary {
    fn put(&mut self, key: impl Into<String>, value: impl Into<Value>) {
        self.0.push((key.into(), value.into()));
    }

    fn put_f(&mut self, key: impl Into<String>, value: f64) {
        // JSON has no NaN/inf; keep them as strings.
        let v = if value.is_finite() {
            json!(value)
        } else {
            Value::String(value.to_string())
        };
        self.put(key, v);
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.0 {
            let v = match v {
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }

    pub fn json(&self) -> String {
        let map: Map<String, Value> = self.0.iter().cloned().collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("serializable");
        s.push('\n');
        s
    }
}

/// Write `contents` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

fn vector_text(x: &[f64]) -> String {
    x.iter().map(|v| format!("{v}\n")).collect()
}

fn csv(x: &[f64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

fn check_range(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(domain(format!("--{name} = {x} must lie in (0, 1]")));
    }
    Ok(())
}

fn load(path: &Path) -> Result<WeightedGraph> {
    load_graph(path, LoadOptions::default())
}

/// Result of one subcommand: the summary plus files to write on success.
pub struct Outcome {
    pub summary: Summary,
    pub files: Vec<(PathBuf, String)>,
}

pub fn cmd_solve(a: &SolveArgs) -> Result<Outcome> {
    check_range("epsilon", a.epsilon)?;
    check_range("gamma", a.gamma)?;
    if let Some(l) = a.lambda {
        if !(l > 0.0 && l <= 2.0) {
            return Err(domain(format!("--lambda = {l} must lie in (0, 2]")));
        }
    }
    let mode = a.common.mode()?;
    let g = load(&a.common.graph)?;
    let b = load_vector(&a.b)?;
    if b.len() != g.n() {
        return Err(domain(format!("b has {} entries, graph has {} vertices", b.len(), g.n())));
    }
    let mut cfg = SolveConfig::with_mode(a.epsilon, a.gamma, mode)
        .with_projection(a.project)
        .with_norm(match a.norm {
            NormArg::Entrywise => NormTarget::Entrywise,
            NormArg::Euclidean => NormTarget::Euclidean,
        });
    cfg.lambda = a.lambda;
    let sol = solve(&g, &b, &cfg, &RandomSource::new(a.common.seed))?;

    let mut s = Summary::default();
    s.put("command", "solve");
    s.put("n", g.n());
    s.put("edges", g.edge_count());
    s.put("mode", mode_name(&mode));
    s.put("seed", a.common.seed);
    s.put_f("epsilon", a.epsilon);
    s.put_f("gamma", a.gamma);
    s.put("norm", if cfg.norm == NormTarget::Euclidean { "euclidean" } else { "entrywise" });
    s.put("components", sol.components.len());
    for (c, rep) in sol.components.iter().enumerate() {
        let p = format!("component.{c}.");
        s.put(format!("{p}size"), rep.vertices.len());
        s.put_f(format!("{p}b_norm"), rep.b_norm);
        if let Some(series) = rep.series {
            s.put_f(format!("{p}lambda"), rep.lambda);
            s.put_f(format!("{p}entry_epsilon"), rep.entry_epsilon);
            s.put_f(format!("{p}entry_gamma"), rep.entry_gamma);
            s.put(format!("{p}T"), series.t_horizon);
            s.put(format!("{p}N"), series.n_terms);
            s.put(format!("{p}K"), series.k_terms);
            s.put_f(format!("{p}delta"), rep.delta);
            s.put_f(format!("{p}zeta"), rep.zeta);
            s.put_f(format!("{p}r"), rep.strict_trials);
            s.put(format!("{p}walks"), rep.walks);
        }
    }
    s.put_f("max_radius", sol.radius.iter().cloned().fold(0.0, f64::max));
    if a.compare_oracle {
        if g.n() <= oracle::MAX_SERIES {
            let projected = g.project_per_component(&b)?;
            let exact = oracle::pseudo_inverse_apply_any(&g, &projected)?;
            let diff: Vec<f64> = sol.x.iter().zip(&exact).map(|(a, b)| a - b).collect();
            s.put_f("oracle_max_error", diff.iter().fold(0.0, |m, d| m.max(d.abs())));
            s.put_f("oracle_l2_error", norm2(&diff));
        } else {
            s.put("oracle", "skipped");
        }
    }
    let mut files = Vec::new();
    match &a.out {
        Some(path) => {
            s.put("out", path.display().to_string());
            files.push((path.clone(), vector_text(&sol.x)));
        }
        None => s.put("x", csv(&sol.x)),
    }
    Ok(Outcome { summary: s, files })
}

fn mode_name(m: &Mode) -> &'static str {
    if m.is_strict() {
        "strict"
    } else {
        "practical"
    }
}

pub fn cmd_gap(a: &GapArgs) -> Result<Outcome> {
    check_range("delta", a.delta)?;
    check_range("gamma", a.gamma)?;
    if !(a.noise_multiplier >= 0.0) {
        return Err(domain("--noise-multiplier must be non-negative"));
    }
    let mode = a.common.mode()?;
    let g = load(&a.common.graph)?;
    g.check_no_isolated()?;
    let parts = g.connected_components();
    let mut s = Summary::default();
    s.put("command", "gap");
    s.put("n", g.n());
    s.put("edges", g.edge_count());
    s.put("mode", mode_name(&mode));
    s.put("seed", a.common.seed);
    s.put_f("delta", a.delta);
    s.put_f("gamma", a.gamma);
    s.put("components", parts.len());
    let source = RandomSource::new(a.common.seed);
    let mut best = f64::INFINITY;
    for (c, part) in parts.iter().enumerate() {
        let sub = g.induced_subgraph(part);
        let p = format!("component.{c}.");
        s.put(format!("{p}size"), part.len());
        if part.len() < 4 {
            if !a.compare_oracle {
                return Err(Error::TooSmall { n: part.len() });
            }
            if part.len() < 2 {
                s.put(format!("{p}lambda2"), "undefined");
                continue;
            }
            let exact = oracle::lambda2_exact(&sub)?;
            s.put_f(format!("{p}lambda2_oracle"), exact);
            best = best.min(exact);
            continue;
        }
        let mut cfg = GapConfig::with_mode(a.delta, a.gamma, mode).with_noise_multiplier(a.noise_multiplier);
        cfg.lambda = a.lambda;
        let est = lambda2_estimate(&sub, &cfg, &source.child(c as u64))?;
        s.put_f(format!("{p}lambda2"), est.value);
        s.put_f(format!("{p}lambda"), est.params.lambda);
        s.put_f(format!("{p}tau"), est.tau);
        s.put_f(format!("{p}ln_tau_strict"), est.params.ln_tau);
        s.put_f(format!("{p}epsilon"), est.params.epsilon);
        s.put_f(format!("{p}zeta"), est.params.zeta);
        s.put(format!("{p}k_cap"), est.k_cap);
        s.put(format!("{p}norm_calls"), est.norm_calls);
        if let Some((i, j, k)) = est.argmax {
            s.put(format!("{p}argmax"), format!("{i},{j},{k}"));
        }
        if a.compare_oracle && sub.n() <= oracle::MAX_DENSE {
            s.put_f(format!("{p}lambda2_oracle"), oracle::lambda2_exact(&sub)?);
        }
        best = best.min(est.value);
    }
    if parts.len() > 1 {
        // A disconnected graph has λ₂ = 0; the minimum over components is
        // the gap of its worst-connected piece.
        s.put("note", "minimum over components");
    }
    if best.is_finite() {
        s.put_f("lambda2", best);
    } else {
        s.put("lambda2", "undefined");
    }
    let mut files = Vec::new();
    if let Some(path) = &a.out {
        files.push((path.clone(), format!("{best}\n")));
    }
    Ok(Outcome { summary: s, files })
}

pub fn cmd_oracle(a: &OracleArgs) -> Result<Outcome> {
    let g = load(&a.graph)?;
    let sp = oracle::spectrum(&g)?;
    let mut s = Summary::default();
    s.put("command", "oracle");
    s.put("n", g.n());
    s.put("edges", g.edge_count());
    s.put("graph_hash", format!("{:016x}", sp.graph_hash));
    s.put("eigenvalues", csv(&sp.eigenvalues));
    if g.n() >= 2 {
        let l2 = if g.is_connected() { sp.lambda2().unwrap_or(0.0) } else { 0.0 };
        s.put_f("lambda2", l2);
    }
    let mut files = Vec::new();
    if let Some(bp) = &a.b {
        let b = load_vector(bp)?;
        let projected = g.project_per_component(&b)?;
        let x = oracle::pseudo_inverse_apply_any(&g, &projected)?;
        match &a.out {
            Some(path) => {
                s.put("out", path.display().to_string());
                files.push((path.clone(), vector_text(&x)));
            }
            None => s.put("x", csv(&x)),
        }
    } else if let Some(path) = &a.out {
        files.push((path.clone(), vector_text(&sp.eigenvalues)));
    }
    Ok(Outcome { summary: s, files })
}

pub fn cmd_audit(a: &AuditCmd) -> Result<Outcome> {
    let targets: Vec<AuditTarget> = if a.algorithm == "all" {
        AuditTarget::ALL.to_vec()
    } else {
        vec![AuditTarget::parse(&a.algorithm)
            .ok_or_else(|| domain(format!("unknown algorithm {:?}", a.algorithm)))?]
    };
    let graphs: Vec<WeightedGraph> = match &a.graph {
        Some(path) => vec![load(path)?],
        None => {
            if a.sizes.iter().any(|&n| n < 4) {
                return Err(domain("cycle sizes must be at least 4"));
            }
            a.sizes.iter().map(|&n| generators::cycle(n)).collect()
        }
    };
    let args = AuditArgs {
        budget: StrictBudget::capped(a.loop_cap, a.total_cap),
        seed: a.seed,
        ..AuditArgs::default()
    };
    let mut report = String::new();
    let mut s = Summary::default();
    s.put("command", "audit");
    let mut truncated = 0;
    for target in &targets {
        let mut marks = Vec::new();
        for g in &graphs {
            let r = audited_run(*target, g, &args);
            if let Err(e) = &r.result {
                if !matches!(e, Error::Budget { .. }) {
                    return Err(e.clone());
                }
                truncated += 1;
            }
            report.push_str(&r.line());
            report.push('\n');
            marks.push(r.high_water);
        }
        let constant = marks.windows(2).all(|w| w[0] == w[1]);
        s.put(format!("{}.marks", target.name()), marks.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","));
        s.put(format!("{}.constant", target.name()), constant);
    }
    s.put("truncated", truncated);
    let mut files = Vec::new();
    if let Some(path) = &a.out {
        files.push((path.clone(), report.clone()));
    }
    s.0.insert(0, ("report".into(), Value::String(report.trim_end().replace('\n', "; "))));
    Ok(Outcome { summary: s, files })
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let (outcome, summary_path) = match &cli.command {
        Command::Solve(a) => (cmd_solve(a), a.common.summary.clone()),
        Command::Gap(a) => (cmd_gap(a), a.common.summary.clone()),
        Command::Oracle(a) => (cmd_oracle(a), a.summary.clone()),
        Command::Audit(a) => (cmd_audit(a), a.summary.clone()),
    };
    let finish = outcome.and_then(|o| {
        for (path, contents) in &o.files {
            write_atomic(path, contents)?;
        }
        if let Some(path) = &summary_path {
            write_atomic(path, &o.summary.json())?;
        }
        Ok(o.summary)
    });
    match finish {
        Ok(summary) => {
            let _ = out.write_all(summary.text().as_bytes());
            0
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
