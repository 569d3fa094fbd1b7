//! Argument parsing and command bodies for the `cubefold` binary. Commands
//! return their output and exit code instead of printing, so tests can run
//! them in process.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use cubefold::complex::hamming;
use cubefold::io::{
    vertex_map_json, Format, IoError, RunConfig, Workspace, EXIT_INVALID, EXIT_LEMMA, VERTEX_CAP_ENV,
};
use cubefold::{dual_complex, folding_sequence, quotient_pocset, ResolutionState, DEFAULT_VERTEX_CAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const MEDIAN_SAMPLES: usize = 500;

#[derive(Parser, Debug)]
#[command(name = "cubefold", version, about = "Pocsets, dual cube complexes, quotients and folding sequences")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Write the export here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, default_value = "text", value_parser = ["dot", "json", "text"])]
    pub format: String,
    #[arg(long, global = true, env = VERTEX_CAP_ENV, default_value_t = DEFAULT_VERTEX_CAP)]
    pub vertex_cap: usize,
    /// Skip per-step verification while folding.
    #[arg(long, global = true)]
    pub no_verify: bool,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Validate a pocset, and optionally an action, relation or map over it.
    Validate {
        pocset: PathBuf,
        #[arg(long)]
        action: Option<PathBuf>,
        #[arg(long)]
        relation: Option<PathBuf>,
        /// Map file; needs --target.
        #[arg(long, requires = "target")]
        map: Option<PathBuf>,
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Build the dual cube complex.
    Dual { pocset: PathBuf },
    /// Check a relation and print the quotient pocset.
    Quotient { pocset: PathBuf, relation: PathBuf },
    /// Classify a map and export the induced vertex map.
    CheckMap {
        domain: PathBuf,
        target: PathBuf,
        map: PathBuf,
        #[arg(long)]
        action: Option<PathBuf>,
        #[arg(long)]
        target_action: Option<PathBuf>,
    },
    /// Fold a resolution into an embedding.
    Fold {
        domain: PathBuf,
        target: PathBuf,
        map: PathBuf,
        #[arg(long)]
        action: Option<PathBuf>,
        #[arg(long)]
        target_action: Option<PathBuf>,
    },
    /// Summarise a saved fold trace.
    TraceShow { trace: PathBuf },
}

#[derive(Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn fail(err: IoError) -> Self {
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            code: err.exit_code(),
        }
    }
}

pub fn config(g: &GlobalArgs) -> Result<RunConfig, IoError> {
    RunConfig {
        vertex_cap: g.vertex_cap,
        verify: !g.no_verify,
        seed: g.seed,
        format: g.format.parse()?,
    }
    .validate()
}

pub fn run(cli: &Cli) -> Outcome {
    let cfg = match config(&cli.global) {
        Ok(c) => c,
        Err(e) => return Outcome::fail(e),
    };
    let mut ws = Workspace::new();
    let out = cli.global.out.as_deref();
    let result = match &cli.command {
        Command::Validate {
            pocset,
            action,
            relation,
            map,
            target,
        } => cmd_validate(&mut ws, pocset, action.as_deref(), relation.as_deref(), map.as_deref(), target.as_deref()),
        Command::Dual { pocset } => cmd_dual(&mut ws, pocset, &cfg, out),
        Command::Quotient { pocset, relation } => cmd_quotient(&mut ws, pocset, relation, &cfg, out),
        Command::CheckMap {
            domain,
            target,
            map,
            action,
            target_action,
        } => cmd_check_map(&mut ws, domain, target, map, action.as_ref(), target_action.as_ref(), &cfg, out),
        Command::Fold {
            domain,
            target,
            map,
            action,
            target_action,
        } => cmd_fold(&mut ws, domain, target, map, action.as_ref(), target_action.as_ref(), &cfg, out),
        Command::TraceShow { trace } => cmd_trace_show(trace),
    };
    result.unwrap_or_else(Outcome::fail)
}

/// Parses `args` (program name first) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => Outcome {
            stdout: String::new(),
            stderr: e.to_string(),
            code: if e.use_stderr() { 64 } else { 0 },
        },
    }
}

/// Sends an export to `--out` when given, otherwise appends it to stdout.
fn emit(out: Option<&Path>, export: &str, stdout: &mut String) -> Result<(), IoError> {
    match out {
        Some(path) => std::fs::write(path, export).map_err(|e| IoError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        }),
        None => {
            stdout.push_str(export);
            if !export.ends_with('\n') {
                stdout.push('\n');
            }
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialise") + "\n"
}

fn cmd_validate(
    ws: &mut Workspace,
    pocset: &Path,
    action: Option<&Path>,
    relation: Option<&Path>,
    map: Option<&Path>,
    target: Option<&Path>,
) -> Result<Outcome, IoError> {
    let p = ws.read_pocset(pocset)?;
    let mut o = Outcome::default();
    o.stdout.push_str(&format!("pocset OK: {} hyperplanes\n", p.num_hyperplanes()));
    if let Some(a) = action {
        let act = ws.read_action(a, p.clone())?;
        let orbits = act.hyperplane_orbits().into_iter().max().map_or(0, |m| m + 1);
        o.stdout
            .push_str(&format!("action OK: group of order {}, {} hyperplane orbits\n", act.order(), orbits));
    }
    if let Some(r) = relation {
        let rel = ws.read_relation(r, p.clone())?;
        let report = rel.check_admissible();
        o.stdout.push_str(&report.render(&p));
        if !report.admissible() {
            o.code = EXIT_INVALID;
        }
    }
    if let (Some(m), Some(t)) = (map, target) {
        let tp = ws.read_pocset(t)?;
        let f = ws.read_map(m, p, tp)?;
        let c = f.classify();
        o.stdout.push_str(&c.render(&f));
        if !c.admissible() {
            o.code = EXIT_INVALID;
        }
    }
    Ok(o)
}

fn cmd_dual(ws: &mut Workspace, pocset: &Path, cfg: &RunConfig, out: Option<&Path>) -> Result<Outcome, IoError> {
    let p = ws.read_pocset(pocset)?;
    let x = dual_complex(p, cfg.vertex_cap)?;
    let mut summary = format!(
        "vertices: {}\nedges: {}\nmaximal cubes: {}\nsquares: {}\ndimension: {}\n",
        x.vertices().len(),
        x.edges().len(),
        x.maximal_cubes().len(),
        x.count_cubes(2),
        x.dimension()
    );
    let mut o = Outcome::default();
    // seeded sample of majority votes, all of which must be vertices
    let n = x.vertices().len();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let samples = MEDIAN_SAMPLES.min(n.pow(3));
    let mut bad = 0;
    for _ in 0..samples {
        let (a, b, c) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n));
        let m = x.median(x.vertex(a), x.vertex(b), x.vertex(c));
        if x.vertex_index(&m).is_none() {
            bad += 1;
        }
    }
    summary.push_str(&format!("median check: {}/{} sampled triples closed\n", samples - bad, samples));
    if bad > 0 {
        o.code = EXIT_LEMMA;
    }
    match cfg.format {
        Format::Text => o.stdout.push_str(&summary),
        Format::Dot => {
            emit(out, &x.to_dot(), &mut o.stdout)?;
            o.stderr.push_str(&summary);
        }
        Format::Json => {
            emit(out, &pretty(&x.to_json()), &mut o.stdout)?;
            o.stderr.push_str(&summary);
        }
    }
    Ok(o)
}

fn cmd_quotient(
    ws: &mut Workspace,
    pocset: &Path,
    relation: &Path,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<Outcome, IoError> {
    let p = ws.read_pocset(pocset)?;
    let rel = ws.read_relation(relation, p.clone())?;
    let report = rel.check_admissible();
    let mut o = Outcome::default();
    if !report.admissible() {
        o.stdout.push_str(&report.render(&p));
        o.code = EXIT_INVALID;
        return Ok(o);
    }
    let q = quotient_pocset(&rel)?;
    let export = match cfg.format {
        Format::Json => {
            let classes: Vec<Value> = q
                .pocset()
                .halfspaces()
                .map(|c| {
                    let members: Vec<&str> = q.members(c).iter().map(|&h| p.name(h)).collect();
                    json!({"class": q.pocset().name(c), "members": members})
                })
                .collect();
            pretty(&json!({"pocset": q.pocset().to_grammar(), "classes": classes}))
        }
        _ => q.pocset().to_grammar(),
    };
    if out.is_some() || cfg.format == Format::Text {
        o.stdout.push_str(&report.render(&p));
        o.stdout
            .push_str(&format!("quotient: {} hyperplanes\n", q.pocset().num_hyperplanes()));
    }
    emit(out, &export, &mut o.stdout)?;
    Ok(o)
}

#[allow(clippy::too_many_arguments)]
fn cmd_check_map(
    ws: &mut Workspace,
    domain: &Path,
    target: &Path,
    map: &Path,
    action: Option<&PathBuf>,
    target_action: Option<&PathBuf>,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<Outcome, IoError> {
    let d = ws.read_pocset(domain)?;
    let t = ws.read_pocset(target)?;
    let f = ws.read_map(map, d.clone(), t.clone())?;
    let c = f.classify();
    let mut o = Outcome::default();
    o.stdout.push_str(&c.render(&f));
    if action.is_some() || target_action.is_some() {
        let a = ws.read_action_or_trivial(action, d.clone())?;
        let ta = ws.read_action_or_trivial(target_action, t.clone())?;
        match cubefold::action::equivariance_witness(&a, &ta, &f)? {
            None => o.stdout.push_str("equivariant: yes\n"),
            Some((g, h)) => {
                o.stdout.push_str(&format!("equivariant: no ({g} at {})\n", d.name(h)));
                o.code = EXIT_INVALID;
            }
        }
    }
    if !c.admissible() {
        o.code = EXIT_INVALID;
        return Ok(o);
    }
    let part = f.image_partition()?;
    let names = |hs: &[cubefold::HyperplaneId]| hs.iter().map(|&h| t.hyperplane_name(h)).collect::<Vec<_>>().join(" ");
    o.stdout.push_str(&format!("image: {}\n", names(&part.h1)));
    o.stdout.push_str(&format!("transverse to image: {}\n", names(&part.h2)));
    let forced: Vec<&str> = part.h3.iter().map(|&(_, side)| t.name(side)).collect();
    o.stdout.push_str(&format!("forced sides: {}\n", forced.join(" ")));
    if cfg.format == Format::Json {
        let x = dual_complex(d, cfg.vertex_cap)?;
        let y = dual_complex(t, cfg.vertex_cap)?;
        let fv = f.induced_codomain_map(&x, &y)?;
        if let Some((i, j)) = cubefold::maps::distance_violation(&x, &y, &fv, c.is_embedding) {
            o.stdout.push_str(&format!(
                "distance check FAIL v{i} v{j}: {} -> {}\n",
                hamming(x.vertex(i), x.vertex(j)),
                hamming(y.vertex(fv[i]), y.vertex(fv[j]))
            ));
            o.code = EXIT_LEMMA;
        }
        emit(out, &pretty(&vertex_map_json(&fv)), &mut o.stdout)?;
    }
    Ok(o)
}

#[allow(clippy::too_many_arguments)]
fn cmd_fold(
    ws: &mut Workspace,
    domain: &Path,
    target: &Path,
    map: &Path,
    action: Option<&PathBuf>,
    target_action: Option<&PathBuf>,
    cfg: &RunConfig,
    out: Option<&Path>,
) -> Result<Outcome, IoError> {
    let d = ws.read_pocset(domain)?;
    let t = ws.read_pocset(target)?;
    let f = ws.read_map(map, d.clone(), t.clone())?;
    let a = ws.read_action_or_trivial(action, d)?;
    let ta = ws.read_action_or_trivial(target_action, t)?;
    let st = ResolutionState::new(a, f, ta)?;
    let trace = folding_sequence(&st, &cfg.fold_config())?;
    let mut o = Outcome::default();
    let all_checks = trace.steps.iter().all(|s| s.checks.iter().all(|(_, ok)| *ok));
    let embedding = trace.final_embedding().classify().is_embedding;
    if !(all_checks && embedding) {
        o.code = EXIT_LEMMA;
    }
    let json = trace.to_json();
    match cfg.format {
        Format::Json => emit(out, &pretty(&json), &mut o.stdout)?,
        _ => {
            o.stdout.push_str(&summarise_trace(&json));
            if out.is_some() {
                emit(out, &pretty(&json), &mut o.stdout)?;
            }
        }
    }
    Ok(o)
}

fn cmd_trace_show(path: &Path) -> Result<Outcome, IoError> {
    let text = read_text(path)?;
    let json: Value = serde_json::from_str(&text).map_err(|e| IoError::Read {
        path: path.display().to_string(),
        message: format!("not a trace: {e}"),
    })?;
    let mut o = Outcome {
        stdout: summarise_trace(&json),
        ..Outcome::default()
    };
    if json["embedding"] != Value::Bool(true) {
        o.code = EXIT_LEMMA;
    }
    Ok(o)
}

/// Human-readable summary of an exported trace.
pub fn summarise_trace(json: &Value) -> String {
    let mut s = String::new();
    let steps = json["steps"].as_array().cloned().unwrap_or_default();
    s.push_str(&format!(
        "steps: {} (bound {})\n",
        steps.len(),
        json["step_bound"].as_u64().unwrap_or(0)
    ));
    for (i, step) in steps.iter().enumerate() {
        let pair = step["pair"].as_array().map_or(String::new(), |p| {
            p.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(" ~ ")
        });
        let merged: Vec<String> = step["relation_classes"]
            .as_array()
            .into_iter()
            .flatten()
            .filter_map(Value::as_array)
            .filter(|c| c.len() > 1)
            .map(|c| format!("{{{}}}", c.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(", ")))
            .collect();
        let failed: Vec<&str> = step["checks"]
            .as_object()
            .into_iter()
            .flatten()
            .filter(|(_, v)| **v != Value::Bool(true))
            .map(|(k, _)| k.as_str())
            .collect();
        let checks = step["checks"].as_object().map_or(0, |c| c.len());
        let complexity = step["complexity"].as_u64().map_or("-".to_owned(), |c| c.to_string());
        s.push_str(&format!("step {}: fold {pair}; merged {}\n", i + 1, merged.join(" ")));
        if failed.is_empty() {
            s.push_str(&format!("  checks: {checks} passed; complexity {complexity}\n"));
        } else {
            s.push_str(&format!("  checks FAILED: {}; complexity {complexity}\n", failed.join(", ")));
        }
    }
    let history: Vec<String> = json["complexity_history"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|v| v.to_string())
        .collect();
    s.push_str(&format!("complexity history: {}\n", history.join(" ")));
    let emb = json["embedding"] == Value::Bool(true);
    s.push_str(&format!("final map embedding: {}\n", if emb { "yes" } else { "no" }));
    s
}
