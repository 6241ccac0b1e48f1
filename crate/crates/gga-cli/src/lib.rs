//! The `gga` command line: tail analysis, representatives, posterior tail
//! queries, Monte-Carlo verification and forward sampling of model files.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use gga_core::{is_stand_in, representative, Caveat, RepresentativeConfig64};
use gga_ppl::posterior::{posterior_class, PosteriorQuery};
use gga_ppl::{analyze, compile, NodeId, ProgramGraph, ReportEntry, Span, TailReport, Warning};
use gga_verify::mc::verify_targets;
use gga_verify::{forward_sample, forward_sample_many, mc_verify_nodes, tail_density, Budget, Thresholds};
use gga_core::{RepresentativeSpec, TailClass64};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "gga", version, about = "Static tail analysis of probabilistic programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// On failure also print a JSON error object to stdout.
    #[arg(long, global = true)]
    pub error_json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Tail class of every live node.
    Analyze { input: PathBuf },
    /// Sampleable representative for queried nodes.
    Repr {
        input: PathBuf,
        #[arg(long)]
        var: Option<String>,
        /// Shapes rho at or below this get a Student-t representative.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
    },
    /// Posterior tail class of one parameter given the observed nodes.
    Posterior {
        input: PathBuf,
        #[arg(long)]
        param: String,
    },
    /// Forward-sample the model and test the predicted classes.
    Verify {
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0.01)]
        tail_fraction: f64,
        #[arg(long)]
        var: Option<String>,
        /// Use a saved `analyze` report instead of re-analyzing.
        #[arg(long)]
        report: Option<PathBuf>,
        /// `csv` emits (x, log density) points of each node's tail instead.
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Draw realizations of one node as CSV.
    Sample {
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        var: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug)]
pub struct Failure {
    pub kind: &'static str,
    pub message: String,
    pub span: Option<Span>,
}

impl Failure {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Failure { kind, message: message.into(), span: None }
    }
}

struct Source {
    path: PathBuf,
    text: String,
}

impl Source {
    fn read(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::new("io", format!("cannot read {}: {e}", path.display())))?;
        Ok(Source { path: path.to_path_buf(), text })
    }

    fn compile(&self) -> Result<ProgramGraph, Failure> {
        compile(&self.text).map_err(|e| {
            let span = e.span();
            let msg = e.to_string();
            let msg = msg.strip_prefix(&format!("{span}: ")).unwrap_or(&msg).to_string();
            let kind = match e {
                gga_ppl::FrontendError::Parse(_) => "parse",
                gga_ppl::FrontendError::Lower(_) => "lower",
            };
            Failure { kind, message: msg, span: Some(span) }
        })
    }

    fn diagnostic(&self, level: &str, msg: &str, span: Option<Span>) -> String {
        let mut s = format!("{level}: {msg}\n");
        match span {
            Some(sp) => {
                let _ = writeln!(s, "  --> {}:{}:{}", self.path.display(), sp.line, sp.col);
                if let Some(line) = self.text.lines().nth((sp.line as usize).saturating_sub(1)) {
                    let w = sp.line.to_string().len();
                    let _ = writeln!(s, "{:w$} |", "");
                    let _ = writeln!(s, "{} | {line}", sp.line);
                    let _ = writeln!(s, "{:w$} | {:>c$}", "", "^", c = sp.col as usize);
                }
            }
            None => {
                let _ = writeln!(s, "  --> {}", self.path.display());
            }
        }
        s
    }
}

/// Runs one command; returns the exit status (0 clean, 2 warnings, 1 error).
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let input = match &cli.command {
        Command::Analyze { input }
        | Command::Repr { input, .. }
        | Command::Posterior { input, .. }
        | Command::Verify { input, .. }
        | Command::Sample { input, .. } => input,
    };
    let mut diags = String::new();
    let result = match Source::read(input) {
        Ok(src) => {
            let r = execute(&cli.command, &src, &mut diags);
            if let Err(f) = &r {
                diags.push_str(&src.diagnostic("error", &f.message, f.span));
            }
            r
        }
        Err(f) => {
            let _ = writeln!(diags, "error: {}", f.message);
            Err(f)
        }
    };
    let _ = stderr.write_all(diags.as_bytes());
    match result {
        Ok((body, code)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &body).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => stdout.write_all(body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: {e}");
                    1
                }
            }
        }
        Err(f) => {
            if cli.error_json {
                let error = ErrorJson {
                    kind: f.kind,
                    message: &f.message,
                    path: input.display().to_string(),
                    line: f.span.map(|sp| sp.line),
                    col: f.span.map(|sp| sp.col),
                };
                let _ = stdout.write_all(to_json(&ErrorEnvelope { error }).as_bytes());
            }
            1
        }
    }
}

#[derive(Serialize)]
struct ErrorEnvelope<'a> {
    error: ErrorJson<'a>,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    kind: &'static str,
    message: &'a str,
    path: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    col: Option<u32>,
}

#[derive(Serialize)]
struct ReprOut<'a> {
    model: &'a str,
    nodes: Vec<ReprNode>,
}

#[derive(Serialize)]
struct ReprNode {
    id: NodeId,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    class: TailClass64,
    representative: RepresentativeSpec<f64>,
    stand_in: bool,
}

#[derive(Serialize)]
struct PosteriorOut<'a> {
    model: &'a str,
    param: &'a str,
    entry: ReportEntry,
    prior: TailClass64,
    terms: Vec<PosteriorTerm>,
    corrections: Vec<Correction>,
    visits: usize,
}

#[derive(Serialize)]
struct PosteriorTerm {
    observed: String,
    inverted: TailClass64,
    term: TailClass64,
}

#[derive(Serialize)]
struct Correction {
    node: String,
    op: String,
    exponent: f64,
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("serializable output");
    s.push('\n');
    s
}

fn resolve(g: &ProgramGraph, name: &str) -> Result<NodeId, Failure> {
    g.by_name(name)
        .ok_or_else(|| Failure::new("usage", format!("no live variable `{name}` (only observed, queried or named nodes they depend on are kept)")))
}

fn targets(g: &ProgramGraph, var: &Option<String>) -> Result<Vec<NodeId>, Failure> {
    match var {
        Some(v) => Ok(vec![resolve(g, v)?]),
        None => Ok(verify_targets(g)),
    }
}

/// Errors anywhere in the graph; warnings only for the nodes of interest.
fn report_diagnostics(src: &Source, g: &ProgramGraph, report: &TailReport, ids: &[NodeId], out: &mut String) {
    for e in &report.nodes {
        let shown = ids.contains(&e.id);
        let span = g.node(e.id).span;
        let label = g.label(e.id);
        if let Some(err) = &e.error {
            out.push_str(&src.diagnostic("error", &format!("`{label}`: {err}"), span));
        }
        for w in e.warnings.iter().filter(|_| shown) {
            out.push_str(&src.diagnostic("warning", &format!("`{label}`: {w}"), span));
        }
    }
}

fn execute(cmd: &Command, src: &Source, diags: &mut String) -> Result<(String, i32), Failure> {
    let g = src.compile()?;
    match cmd {
        Command::Analyze { .. } => {
            let report = analyze(&g);
            report_diagnostics(src, &g, &report, &verify_targets(&g), diags);
            Ok((to_json(&report), report.exit_code()))
        }
        Command::Repr { var, epsilon, .. } => {
            let cfg = RepresentativeConfig64 { epsilon: *epsilon, ..Default::default() };
            cfg.validate().map_err(|e| Failure::new("usage", format!("--epsilon {epsilon}: {e}")))?;
            let ids = targets(&g, var)?;
            let report = analyze(&g);
            report_diagnostics(src, &g, &report, &ids, diags);
            let mut code = 0;
            let mut nodes = Vec::new();
            for &id in &ids {
                let entry = report.entry(id).expect("live node is reported");
                code = code.max(if entry.warnings.is_empty() { 0 } else { 2 });
                let class = entry.class.ok_or_else(|| Failure::new("analysis", format!("`{}` has no tail class", g.label(id))))?;
                let spec = representative(&class, &cfg).map_err(|e| Failure::new("analysis", format!("`{}`: {e}", g.label(id))))?;
                if var.is_some() {
                    return Ok((to_json(&spec), code));
                }
                nodes.push(ReprNode { id, name: g.node(id).name.clone(), class, representative: spec, stand_in: is_stand_in(&class) });
            }
            Ok((to_json(&ReprOut { model: &g.name, nodes }), code))
        }
        Command::Posterior { param, .. } => {
            let id = resolve(&g, param)?;
            let r = posterior_class(&g, &PosteriorQuery::new(&g, id)).map_err(|e| Failure { kind: "posterior", message: e.to_string(), span: g.node(id).span })?;
            let warnings: Vec<Warning> = r.class.caveats.iter().map(|&c| Warning::from(c)).collect();
            let entry = ReportEntry {
                id,
                name: g.node(id).name.clone(),
                expr: g.expr_label(id),
                class: Some(r.class.class),
                warnings: warnings.clone(),
                error: None,
            };
            for w in &warnings {
                diags.push_str(&src.diagnostic("warning", &format!("posterior of `{param}`: {w}"), g.node(id).span));
            }
            let terms: Vec<_> = r
                .inverted
                .iter()
                .zip(&r.terms)
                .map(|((obs, inv), (_, term))| PosteriorTerm { observed: g.label(*obs), inverted: *inv, term: *term })
                .collect();
            let corrections: Vec<_> = r
                .corrections
                .iter()
                .map(|c| Correction { node: g.label(c.node), op: c.op.clone(), exponent: c.exponent })
                .collect();
            let out = PosteriorOut { model: &g.name, param, entry, prior: r.prior, terms, corrections, visits: r.visits };
            let code = if r.has_caveat(Caveat::Conservative) || r.has_caveat(Caveat::Projection) { 2 } else { 0 };
            Ok((to_json(&out), code))
        }
        Command::Verify { seed, samples, tail_fraction, var, report, format, .. } => {
            if !(*tail_fraction > 0.0 && *tail_fraction <= 0.5) {
                return Err(Failure::new("usage", format!("--tail-fraction {tail_fraction} outside (0, 0.5]")));
            }
            if *samples == 0 {
                return Err(Failure::new("usage", "--samples must be positive"));
            }
            let ids = targets(&g, var)?;
            let tail_report = match report {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Failure::new("io", format!("cannot read {}: {e}", path.display())))?;
                    serde_json::from_str::<TailReport>(&text).map_err(|e| Failure::new("io", format!("{}: not a tail report: {e}", path.display())))?
                }
                None => analyze(&g),
            };
            let budget = Budget { samples: *samples, seed: *seed, tail_fraction: *tail_fraction };
            match format {
                Format::Json => {
                    let v = mc_verify_nodes(&g, &tail_report, &budget, &ids);
                    let code = if v.all_consistent() { 0 } else { 2 };
                    for n in &v.nodes {
                        if n.verdict != gga_verify::Verdict::Consistent {
                            let why = n.note.clone().unwrap_or_default();
                            diags.push_str(&src.diagnostic("warning", &format!("`{}`: {:?} {why}", g.label(n.id), n.verdict).to_lowercase(), g.node(n.id).span));
                        }
                    }
                    Ok((to_json(&v), code))
                }
                Format::Csv => {
                    let th = Thresholds::new(*tail_fraction);
                    let cols = forward_sample_many(&g, &ids, *seed, *samples).map_err(|e| Failure::new("verify", e.to_string()))?;
                    let mut s = format!("# model={} seed={seed} samples={samples} band={}..{}\nnode,x,log_density\n", g.name, th.band[0], th.band[1]);
                    for (&id, col) in ids.iter().zip(&cols) {
                        let pts = tail_density(col, th.band[0], th.band[1]).map_err(|e| Failure::new("verify", format!("`{}`: {e}", g.label(id))))?;
                        for p in pts {
                            let _ = writeln!(s, "{},{},{}", g.label(id), p.x, p.log_density);
                        }
                    }
                    Ok((s, 0))
                }
            }
        }
        Command::Sample { seed, samples, var, .. } => {
            if *samples == 0 {
                return Err(Failure::new("usage", "--samples must be positive"));
            }
            let ids = targets(&g, var)?;
            let [id] = ids[..] else {
                return Err(Failure::new("usage", format!("{} candidate nodes; pick one with --var", ids.len())));
            };
            let x = forward_sample(&g, id, *seed, *samples).map_err(|e| Failure { kind: "sample", message: e.to_string(), span: g.node(id).span })?;
            let label = g.label(id);
            let mut s = format!("# model={} node={label} seed={seed} samples={samples}\n# {label} = {}\n{label}\n", g.name, g.expr_label(id));
            for v in x {
                let _ = writeln!(s, "{v}");
            }
            Ok((s, 0))
        }
    }
}
