use std::ffi::OsString;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{
    parse_loop_file, parse_matrix_file, parse_scheme_document, serialize_loop, serialize_scheme, FormatError,
    Limits, SchemeFile, MAX_ORDER_VAR,
};
use crate::algmaps::{
    self, AlgMapsError, AutGroupReport, AutonomyVerdict, ColorPermutation,
};
use crate::closures::{self, ClosureError, ClosureKind};
use crate::fixtures;
use crate::loops::{self, CayleyTable, LoopError, LoopSchemeOutcome, TranslationFailure};
use crate::rainbow::{classify_rainbow, ColorMatrix};
use crate::relations::PointSet;
use crate::schemes::{self, CoherenceWitness, SchemeError, SchemeRecord, StructureTensor};

#[derive(Parser, Debug)]
#[command(name = "jordanlab", version, about = "Exact computations with rainbows, Jordan schemes and loops")]
struct Cli {
    /// Emit a machine-readable JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for parallel enumerations.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify a rainbow and print its structure constants.
    Check { file: PathBuf },
    /// WL or Jordan closure of a rainbow, optionally with extra seed matrices.
    Closure {
        #[arg(long, value_enum)]
        kind: KindArg,
        file: PathBuf,
        #[arg(long, num_args = 1.., value_name = "FILES")]
        seed_matrices: Vec<PathBuf>,
    },
    /// Build schemes and loops from named groups.
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// Loop tables: RA check and passage to and from schemes.
    #[command(subcommand)]
    Loop(LoopCommand),
    /// Identify a thin Jordan scheme.
    Recognize { file: PathBuf },
    /// Jordan, algebraic and twisted automorphism groups.
    Jaut { file: PathBuf },
    /// All algebraic fusions, one per distinct partition.
    Fusions { file: PathBuf },
    /// Decide autonomy of a Jordan scheme.
    Autonomy {
        file: PathBuf,
        #[arg(long)]
        brute_force: bool,
    },
    /// Exploratory searches that report counts and assert nothing.
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Subcommand, Debug)]
enum ConstructCommand {
    /// Thin scheme of left translations of a group.
    GroupScheme { spec: String },
    /// The non-regular thin Jordan scheme J(G) of an abelian group.
    Jcal { spec: String },
    /// The loop L(G, *, g0).
    RaLoop {
        #[arg(long)]
        base: String,
        /// Element index, or `s` for the commutator element.
        #[arg(long)]
        g0: String,
    },
    /// Left translations of a loop as a Jordan scheme.
    LoopScheme { loopfile: PathBuf },
}

#[derive(Subcommand, Debug)]
enum LoopCommand {
    /// Loop identities, nuclei and the RA conditions.
    Check { loopfile: PathBuf },
    /// The ◊ loop of a thin regular Jordan scheme at a base point.
    FromScheme {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        base: usize,
    },
}

#[derive(Subcommand, Debug)]
enum ExperimentCommand {
    /// Isomorphism classes of ◊ loops over all base points.
    Basepoints { loopfile: PathBuf },
    /// Random tests of k-fold symmetrized and reversal-sum products.
    SymmetrizedProducts {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum KindArg {
    Wl,
    Jordan,
}

impl From<KindArg> for ClosureKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Wl => ClosureKind::Associative,
            KindArg::Jordan => ClosureKind::Jordan,
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
struct CliError {
    module: &'static str,
    message: String,
    location: Option<String>,
    usage: bool,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            module: "cli_io",
            message: message.into(),
            location: None,
            usage: true,
        }
    }

    fn domain(module: &'static str, message: impl fmt::Display) -> Self {
        CliError {
            module,
            message: message.to_string(),
            location: None,
            usage: false,
        }
    }

    fn at(mut self, path: &Path) -> Self {
        self.location = Some(path.display().to_string());
        self
    }

    fn name(&self) -> &str {
        let end = self
            .message
            .find(|c: char| !c.is_ascii_alphanumeric() && c != ':')
            .unwrap_or(self.message.len());
        self.message[..end].trim_end_matches(':')
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Syntax { .. } => CliError::domain("cli_io", e),
            FormatError::Validation(inner) => CliError::domain("rainbow", inner),
            FormatError::Loop(inner) => CliError::domain("loops", inner),
        }
    }
}

impl From<LoopError> for CliError {
    fn from(e: LoopError) -> Self {
        CliError::domain("loops", e)
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::Loop(inner) => inner.into(),
            other => CliError::domain("schemes", other),
        }
    }
}

impl From<AlgMapsError> for CliError {
    fn from(e: AlgMapsError) -> Self {
        match e {
            AlgMapsError::Loop(inner) => inner.into(),
            other => CliError::domain("algmaps", other),
        }
    }
}

impl From<ClosureError> for CliError {
    fn from(e: ClosureError) -> Self {
        match e {
            ClosureError::Rainbow(inner) => CliError::domain("rainbow", inner),
            other => CliError::domain("closures", other),
        }
    }
}

struct Report {
    text: String,
    json: Value,
    diagnostics: Vec<String>,
}

struct Context {
    limits: Limits,
    diagnostics: Vec<String>,
}

/// Parses `args` (including the program name) and runs one command.
pub fn run<I, T>(args: I) -> CliOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                CliOutcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                CliOutcome {
                    code: 0,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    let json = cli.json;
    let mut ctx = Context {
        limits: Limits::from_env(),
        diagnostics: Vec::new(),
    };
    let result = match cli.threads {
        Some(0) => Err(CliError::usage("--threads must be positive")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli.command, &mut ctx)),
            Err(e) => Err(CliError::usage(format!("cannot start {n} threads: {e}"))),
        },
        None => dispatch(cli.command, &mut ctx),
    };
    let mut stderr: String = ctx.diagnostics.iter().map(|d| format!("note: {d}\n")).collect();
    match result {
        Ok(report) => {
            for d in &report.diagnostics {
                stderr.push_str(&format!("note: {d}\n"));
            }
            let stdout = if json {
                let mut s = serde_json::to_string_pretty(&report.json).expect("JSON values serialize");
                s.push('\n');
                s
            } else {
                report.text
            };
            CliOutcome { code: 0, stdout, stderr }
        }
        Err(err) => {
            stderr.push_str(&format!("error: {}: {}\n", err.module, err.message));
            if let Some(loc) = &err.location {
                stderr.push_str(&format!("  --> {loc}\n"));
            }
            let stdout = if json {
                let doc = json!({
                    "error": {
                        "module": err.module,
                        "name": err.name(),
                        "message": err.message,
                        "location": err.location,
                    }
                });
                format!("{}\n", serde_json::to_string_pretty(&doc).expect("JSON values serialize"))
            } else {
                String::new()
            };
            CliOutcome {
                code: if err.usage { 2 } else { 1 },
                stdout,
                stderr,
            }
        }
    }
}

fn dispatch(command: Command, ctx: &mut Context) -> Result<Report, CliError> {
    match command {
        Command::Check { file } => cmd_check(&file, ctx),
        Command::Closure {
            kind,
            file,
            seed_matrices,
        } => cmd_closure(kind.into(), &file, &seed_matrices, ctx),
        Command::Construct(c) => match c {
            ConstructCommand::GroupScheme { spec } => cmd_group_scheme(&spec, ctx),
            ConstructCommand::Jcal { spec } => cmd_jcal(&spec, ctx),
            ConstructCommand::RaLoop { base, g0 } => cmd_ra_loop(&base, &g0, ctx),
            ConstructCommand::LoopScheme { loopfile } => cmd_loop_scheme(&loopfile, ctx),
        },
        Command::Loop(c) => match c {
            LoopCommand::Check { loopfile } => cmd_loop_check(&loopfile, ctx),
            LoopCommand::FromScheme { file, base } => cmd_loop_from_scheme(&file, base, ctx),
        },
        Command::Recognize { file } => cmd_recognize(&file, ctx),
        Command::Jaut { file } => cmd_jaut(&file, ctx),
        Command::Fusions { file } => cmd_fusions(&file, ctx),
        Command::Autonomy { file, brute_force } => cmd_autonomy(&file, brute_force, ctx),
        Command::Experiment(c) => match c {
            ExperimentCommand::Basepoints { loopfile } => cmd_basepoints(&loopfile, ctx),
            ExperimentCommand::SymmetrizedProducts { file, k, trials, seed } => {
                cmd_symmetrized(&file, k, trials, seed, ctx)
            }
        },
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_scheme(path: &Path, ctx: &Context) -> Result<SchemeFile, CliError> {
    let doc = parse_scheme_document(&read(path)?).map_err(|e| CliError::from(e).at(path))?;
    check_order(doc.cm.order(), ctx.limits.closure_order, "closure")?;
    Ok(doc)
}

fn check_order(order: usize, bound: usize, which: &str) -> Result<(), CliError> {
    if order > bound {
        return Err(CliError::domain(
            "cli_io",
            format!("OrderTooLarge: order {order} exceeds the {which} bound {bound} (see {MAX_ORDER_VAR})"),
        ));
    }
    Ok(())
}

fn load_loop(path: &Path, ctx: &mut Context) -> Result<CayleyTable, CliError> {
    let normalized = parse_loop_file(&read(path)?).map_err(|e| CliError::from(e).at(path))?;
    if let Some(relabel) = &normalized.relabel {
        let old = relabel.iter().position(|&x| x == 0).expect("relabel is a permutation");
        ctx.diagnostics.push(format!(
            "{}: identity was element {old}; relabelled old -> new as {relabel:?}",
            path.display()
        ));
    }
    Ok(normalized.table)
}

fn load_spec(spec: &str, ctx: &mut Context) -> Result<CayleyTable, CliError> {
    if let Some(path) = spec.strip_prefix("file:") {
        return load_loop(Path::new(path), ctx);
    }
    fixtures::from_spec(spec).ok_or_else(|| {
        CliError::usage(format!(
            "unknown SPEC `{spec}`; expected cyclic:n, abelian:n1xn2x..., named:S3|D8|Q8|Chein12|O16|LD8 or file:PATH"
        ))
    })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn scheme_json(cm: &ColorMatrix) -> Value {
    json!(cm.canonical().rows())
}

fn perm_json(p: &[ColorPermutation]) -> Value {
    json!(p.iter().map(|x| x.map().to_vec()).collect::<Vec<_>>())
}

fn kind_label(rec: &SchemeRecord) -> &'static str {
    let f = &rec.flags;
    if f.is_as {
        "AS"
    } else if f.is_cc {
        "CC"
    } else if f.is_js {
        "JS"
    } else if f.is_jc {
        "JC"
    } else {
        "rainbow"
    }
}

fn tensor_json(t: &Option<StructureTensor>) -> Value {
    match t {
        None => Value::Null,
        Some(t) => json!(t
            .nonzero()
            .iter()
            .map(|(&(i, j, k), &v)| [i as u64, j as u64, k as u64, v])
            .collect::<Vec<_>>()),
    }
}

fn witness_json(w: &CoherenceWitness) -> Value {
    json!({
        "i": w.i,
        "j": w.j,
        "t": w.t,
        "cells": [[w.first.0 .0, w.first.0 .1], [w.second.0 .0, w.second.0 .1]],
        "counts": [w.first.1, w.second.1],
    })
}

fn witness_text(kind: ClosureKind, w: &CoherenceWitness) -> String {
    format!(
        "{} product of colors {} and {} is not constant on class {}: {} at ({}, {}) but {} at ({}, {})",
        kind.name(),
        w.i,
        w.j,
        w.t,
        w.first.1,
        w.first.0 .0,
        w.first.0 .1,
        w.second.1,
        w.second.0 .0,
        w.second.0 .1
    )
}

fn proper_label(p: Option<bool>) -> &'static str {
    match p {
        Some(true) => "proper",
        Some(false) => "improper",
        None => "undetermined",
    }
}

fn cmd_check(path: &Path, ctx: &mut Context) -> Result<Report, CliError> {
    let doc = load_scheme(path, ctx)?;
    let class = classify_rainbow(&doc.cm);
    let rec = SchemeRecord::analyze(doc.cm.clone());
    let ratio = rec
        .flags
        .is_js
        .then(|| schemes::ratio_report(&doc.cm))
        .transpose()?;
    let summary = format!(
        "{}, {}, {}, ratio {}",
        kind_label(&rec),
        if class.regular { "regular" } else { "non-regular" },
        if class.thin { "thin" } else { "non-thin" },
        class.ratio
    );

    let mut text = String::new();
    for m in &doc.metadata {
        text.push_str(&format!("# {m}\n"));
    }
    text.push_str(&format!("order {}, rank {}\n", class.order, class.rank));
    text.push_str(&format!(
        "homogeneous: {}, regular: {}, thin: {}, symmetric: {}\n",
        yes(class.homogeneous),
        yes(class.regular),
        yes(class.thin),
        yes(class.symmetric)
    ));
    text.push_str(&format!(
        "CC: {}, JC: {}, AS: {}, JS: {}\n",
        yes(rec.flags.is_cc),
        yes(rec.flags.is_jc),
        yes(rec.flags.is_as),
        yes(rec.flags.is_js)
    ));
    if rec.flags.is_js {
        text.push_str(&format!("properness: {}\n", proper_label(rec.flags.proper_js)));
    }
    let mut witnesses = serde_json::Map::new();
    for (kind, tensor) in [
        (ClosureKind::Associative, &rec.tensor_assoc),
        (ClosureKind::Jordan, &rec.tensor_jordan),
    ] {
        match tensor {
            Some(t) => {
                text.push_str(&format!("{} intersection numbers:\n", kind.name()));
                for (&(i, j, k), v) in t.nonzero() {
                    text.push_str(&format!("  p[{i},{j};{k}] = {v}\n"));
                }
            }
            None => {
                let w = schemes::intersection_numbers(&doc.cm, kind).expect_err("tensor was absent");
                text.push_str(&format!("not closed: {}\n", witness_text(kind, &w)));
                witnesses.insert(kind.name().into(), witness_json(&w));
            }
        }
    }
    if let Some(r) = &ratio {
        text.push_str(&format!(
            "ratio bound 3/2: {}\n",
            if r.bound_tight { "attained" } else { "not attained" }
        ));
        if let Some((o0, o1)) = &r.split {
            text.push_str(&format!("fibres: {o0:?} {o1:?}\n"));
        }
    }
    text.push_str(&format!("summary: {summary}\n"));

    let json = json!({
        "command": "check",
        "metadata": doc.metadata,
        "order": class.order,
        "rank": class.rank,
        "homogeneous": class.homogeneous,
        "regular": class.regular,
        "thin": class.thin,
        "symmetric": class.symmetric,
        "ratio": class.ratio.to_string(),
        "is_cc": rec.flags.is_cc,
        "is_jc": rec.flags.is_jc,
        "is_as": rec.flags.is_as,
        "is_js": rec.flags.is_js,
        "proper_js": rec.flags.proper_js,
        "intersection_numbers": {
            "associative": tensor_json(&rec.tensor_assoc),
            "jordan": tensor_json(&rec.tensor_jordan),
        },
        "witnesses": witnesses,
        "ratio_report": ratio.map(|r| json!({
            "ratio": r.ratio.to_string(),
            "bound_tight": r.bound_tight,
            "split": r.split.map(|(a, b)| json!({"omega0": a, "omega1": b})),
        })),
        "summary": summary,
    });
    Ok(Report {
        text,
        json,
        diagnostics: Vec::new(),
    })
}

fn cmd_closure(kind: ClosureKind, path: &Path, seeds: &[PathBuf], ctx: &mut Context) -> Result<Report, CliError> {
    let doc = load_scheme(path, ctx)?;
    let n = doc.cm.order();
    let (cl, rounds) = if seeds.is_empty() {
        let (cl, rounds) = closures::closure_with_rounds(&doc.cm, kind);
        (cl, Some(rounds))
    } else {
        let mut mats: Vec<_> = (0..doc.cm.rank()).map(|c| doc.cm.indicator(c)).collect();
        for p in seeds {
            let m = parse_matrix_file(&read(p)?).map_err(|e| CliError::from(e).at(p))?;
            if m.size() != n {
                return Err(CliError::domain(
                    "rainbow",
                    format!("DimensionMismatch: expected {n} points, found {}", m.size()),
                )
                .at(p));
            }
            mats.push(m);
        }
        let domain = PointSet::new(n).expect("non-empty point set");
        (closures::closure_of_matrices(domain, &mats, kind)?, None)
    };
    let body = serialize_scheme(&cl);
    let text = format!(
        "# {} closure: rank {} -> {}{}\n{body}",
        kind.name(),
        doc.cm.rank(),
        cl.rank(),
        rounds.map_or(String::new(), |r| format!(" after {r} rounds"))
    );
    let json = json!({
        "command": "closure",
        "kind": kind.name(),
        "order": n,
        "seed_rank": doc.cm.rank(),
        "rank": cl.rank(),
        "rounds": rounds,
        "scheme": scheme_json(&cl),
    });
    Ok(Report {
        text,
        json,
        diagnostics: Vec::new(),
    })
}

fn scheme_report(command: &str, cm: &ColorMatrix) -> Report {
    Report {
        text: serialize_scheme(cm),
        json: json!({
            "command": command,
            "order": cm.order(),
            "rank": cm.rank(),
            "scheme": scheme_json(cm),
        }),
        diagnostics: Vec::new(),
    }
}

fn cmd_group_scheme(spec: &str, ctx: &mut Context) -> Result<Report, CliError> {
    let g = load_spec(spec, ctx)?;
    if !g.is_associative() {
        return Err(LoopError::NotAGroup.into());
    }
    Ok(scheme_report("construct group-scheme", &fixtures::thin_group_scheme(&g)))
}

fn cmd_jcal(spec: &str, ctx: &mut Context) -> Result<Report, CliError> {
    let g = load_spec(spec, ctx)?;
    let rec = schemes::construct_jcal(&g)?;
    Ok(scheme_report("construct jcal", &rec.cm))
}

fn cmd_ra_loop(base: &str, g0: &str, ctx: &mut Context) -> Result<Report, CliError> {
    let g = load_spec(base, ctx)?;
    let g0 = if g0 == "s" {
        loops::klein_quotient(&g)?.commutator
    } else {
        let e: usize = g0
            .parse()
            .map_err(|_| CliError::usage(format!("--g0 expects an element index or `s`, found `{g0}`")))?;
        g.check_element(e)?;
        e
    };
    let l = loops::construct_LGg(&g, g0)?;
    Ok(Report {
        text: serialize_loop(&l),
        json: json!({
            "command": "construct ra-loop",
            "order": l.order(),
            "g0": g0,
            "table": l.rows(),
        }),
        diagnostics: Vec::new(),
    })
}

fn failure_error(f: &TranslationFailure) -> CliError {
    match f {
        TranslationFailure::CAssoc { u, v, w } => CliError::domain(
            "loops",
            format!("CAssoc: {{u(vw), v(uw)}} differs from {{(uv)w, (vu)w}} at (u, v, w) = ({u}, {v}, {w})"),
        ),
        TranslationFailure::NotTransposeClosed { a } => CliError::domain(
            "loops",
            format!("NotTransposeClosed: the inverse of the translation by {a} is not a translation"),
        ),
    }
}

fn loop_scheme(l: &CayleyTable) -> Result<SchemeRecord, CliError> {
    match loops::scheme_from_loop(l)? {
        LoopSchemeOutcome::Scheme(rec) => Ok(*rec),
        LoopSchemeOutcome::Failure(f) => Err(failure_error(&f)),
    }
}

fn cmd_loop_scheme(path: &Path, ctx: &mut Context) -> Result<Report, CliError> {
    let l = load_loop(path, ctx)?;
    let rec = loop_scheme(&l).map_err(|e| e.at(path))?;
    Ok(scheme_report("construct loop-scheme", &rec.cm))
}

fn cmd_loop_check(path: &Path, ctx: &mut Context) -> Result<Report, CliError> {
    let l = load_loop(path, ctx)?;
    let props = loops::loop_properties(&l);
    let ra = loops::is_ra_loop(&l);
    let f = &props.flags;
    let flags = [
        ("associative", f.associative),
        ("commutative", f.commutative),
        ("lip", f.lip),
        ("left_alternative", f.left_alt),
        ("right_alternative", f.right_alt),
        ("flexible", f.flexible),
        ("left_bol", f.left_bol),
        ("right_bol", f.right_bol),
        ("moufang", f.moufang),
        ("ra", ra.ra),
    ];
    let mut text = format!("order {}\n", l.order());
    for (name, v) in flags {
        text.push_str(&format!("{name}: {v}\n"));
    }
    if let Some((u, v, w)) = ra.witness {
        text.push_str(&format!("RA witness: ({u}, {v}, {w})\n"));
    }
    text.push_str(&format!("center: {:?}\n", props.center));
    text.push_str(&format!("left nucleus: {:?}\n", props.left_nucleus));
    text.push_str(&format!("middle nucleus: {:?}\n", props.middle_nucleus));
    text.push_str(&format!("right nucleus: {:?}\n", props.right_nucleus));
    text.push_str(&format!("exponent two: {}\n", props.exponent_two));
    let mut flag_map = serde_json::Map::new();
    for (name, v) in flags {
        flag_map.insert(name.into(), Value::Bool(v));
    }
    let json = json!({
        "command": "loop check",
        "order": l.order(),
        "flags": flag_map,
        "ra_witness": ra.witness.map(|(u, v, w)| [u, v, w]),
        "center": props.center,
        "left_nucleus": props.left_nucleus,
        "middle_nucleus": props.middle_nucleus,
        "right_nucleus": props.right_nucleus,
        "exponent_two": props.exponent_two,
    });
    Ok(Report {
        text,
        json,
        diagnostics: Vec::new(),
    })
}

fn cmd_loop_from_scheme(path: &Path, base: usize, ctx: &mut Context) -> Result<Report, CliError> {
    let doc = load_scheme(path, ctx)?;
    if base >= doc.cm.order() {
        return Err(LoopError::ElementOutOfRange {
            element: base,
            order: doc.cm.order(),
        }
        .into());
    }
    let l = loops::diamond_from_scheme(&doc.cm, base).map_err(|e| CliError::from(e).at(path))?;
    Ok(Report {
        text: serialize_loop(&l),
        json: json!({
            "command": "loop from-scheme",
            "base": base,
            "order": l.order(),
            "table": l.rows(),
        }),
        diagnostics: Vec::new(),
    })
}

fn cmd_recognize(path: &Path, ctx: &mut Context) -> Result<Report, CliError> {
    let doc = load_scheme(path, ctx)?;
    let cm = doc.cm.canonical();
    let rec = SchemeRecord::analyze(cm.clone());
    if !rec.flags.is_js {
        return Err(CliError::from(SchemeError::NotAJordanScheme("the rainbow is not a Jordan scheme".into())).at(path));
    }
    if cm.is_regular() {
        if !cm.is_thin() {
            return Err(CliError::from(LoopError::NotRegularThinJS("classes have valency above 1".into())).at(path));
        }
        let l = loops::diamond_from_scheme(&cm, 0)?;
        let ra = loops::is_ra_loop(&l);
        let group = l.is_associative();
        let abelian = group && l.is_commutative();
        let mut text = format!("thin regular Jordan scheme of order {}\n", cm.order());
        text.push_str(&format!("coherent: {}\n", yes(rec.flags.is_cc)));
        text.push_str(&format!("loop: group {}, abelian {}, ra {}\n", yes(group), yes(abelian), yes(ra.ra)));
        let invariants = abelian.then(|| l.abelian_invariants());
        if let Some(inv) = &invariants {
            text.push_str(&format!("abelian invariants: {inv:?}\n"));
        }
        text.push_str(&serialize_loop(&l));
        let json = json!({
            "command": "recognize",
            "kind": "regular",
            "order": cm.order(),
            "coherent": rec.flags.is_cc,
            "loop": {
                "group": group,
                "abelian": abelian,
                "ra": ra.ra,
                "abelian_invariants": invariants,
                "table": l.rows(),
            },
        });
        Ok(Report {
            text,
            json,
            diagnostics: Vec::new(),
        })
    } else {
        let r = schemes::recognize_nonregular_thin(&cm).map_err(|e| CliError::from(e).at(path))?;
        let invariants = r.group.abelian_invariants();
        let text = format!(
            "non-regular thin Jordan scheme of order {}\nisomorphic to J(G) with G of order {} and invariants {:?}\nconjugator: {:?}\n",
            cm.order(),
            r.group.order(),
            invariants,
            r.conjugator
        );
        let json = json!({
            "command": "recognize",
            "kind": "non-regular",
            "order": cm.order(),
            "group_order": r.group.order(),
            "abelian_invariants": invariants,
            "conjugator": r.conjugator,
        });
        Ok(Report {
            text,
            json,
            diagnostics: Vec::new(),
        })
    }
}

fn cmd_jaut(path: &Path, ctx: &mut Context) -> Result<Report, CliError> {
    let doc = load_scheme(path, ctx)?;
    let cm = doc.cm.canonical();
    let auts = algmaps::jaut_enumerate(&cm).map_err(|e| CliError::from(e).at(path))?;
    let size = |g: &Option<Vec<ColorPermutation>>| g.as_ref().map(Vec::len);
    let mut text = format!("|JAut| = {}\n", auts.jaut.len());
    match (&auts.aaut, &auts.taut) {
        (Some(a), Some(t)) => text.push_str(&format!("|AAut| = {}\n|TAut| = {}\n", a.len(), t.len())),
        _ => text.push_str("AAut, TAut: not defined (not coherent)\n"),
    }
    for p in &auts.jaut {
        text.push_str(&format!("  {:?}\n", p.map()));
    }
    let json = json!({
        "command": "jaut",
        "rank": cm.rank(),
        "jaut_order": auts.jaut.len(),
        "aaut_order": size(&auts.aaut),
        "taut_order": size(&auts.taut),
        "tau": auts.tau.map(),
        "jaut": perm_json(&auts.jaut),
    });
    Ok(Report {
        text,
        json,
        diagnostics: Vec::new(),
    })
}

struct FusionEntry {
    subgroup_order: usize,
    generators: Vec<ColorPermutation>,
    fused: SchemeRecord,
}

fn fusion_label(rec: &SchemeRecord) -> String {
    format!(
        "{}-{}",
        proper_label(rec.flags.proper_js),
        if rec.cm.is_symmetric() { "symmetric" } else { "non-symmetric" }
    )
}

fn fusion_entries(cm: &ColorMatrix, auts: &AutGroupReport) -> Result<Vec<FusionEntry>, CliError> {
    let subgroups = algmaps::enumerate_subgroups(auts)?;
    let mut seen: Vec<ColorMatrix> = Vec::new();
    let mut out = Vec::new();
    for h in subgroups {
        let fused = algmaps::algebraic_fusion(cm, &h)?.canonical();
        if seen.contains(&fused) {
            continue;
        }
        seen.push(fused.clone());
        out.push(FusionEntry {
            subgroup_order: h.len(),
            generators: h,
            fused: SchemeRecord::analyze(fused),
        });
    }
    Ok(out)
}

fn cmd_fusions(path: &Path, ctx: &mut Context) -> Result<Report, CliError> {
    let doc = load_scheme(path, ctx)?;
    let cm = doc.cm.canonical();
    let auts = algmaps::jaut_enumerate(&cm).map_err(|e| CliError::from(e).at(path))?;
    let entries = fusion_entries(&cm, &auts)?;
    let mut text = format!("{} algebraic fusions (|JAut| = {})\n", entries.len(), auts.jaut.len());
    let mut items = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let label = fusion_label(&e.fused);
        text.push_str(&format!(
            "[{i}] |Phi| = {}, rank {}, {}, {label}\n",
            e.subgroup_order,
            e.fused.cm.rank(),
            kind_label(&e.fused)
        ));
        items.push(json!({
            "subgroup_order": e.subgroup_order,
            "subgroup": perm_json(&e.generators),
            "rank": e.fused.cm.rank(),
            "kind": kind_label(&e.fused),
            "is_cc": e.fused.flags.is_cc,
            "is_js": e.fused.flags.is_js,
            "symmetric": e.fused.cm.is_symmetric(),
            "proper_js": e.fused.flags.proper_js,
            "label": label,
            "scheme": scheme_json(&e.fused.cm),
        }));
    }
    let json = json!({
        "command": "fusions",
        "rank": cm.rank(),
        "jaut_order": auts.jaut.len(),
        "fusions": items,
    });
    Ok(Report {
        text,
        json,
        diagnostics: Vec::new(),
    })
}

fn verdict_report(v: &AutonomyVerdict) -> (String, Value) {
    let mut text = format!("verdict: {}\n", v.name());
    let (certificate, witness, reason) = match v {
        AutonomyVerdict::Autonomous(c) => {
            text.push_str(&format!(
                "order {}, right nucleus {}, WL rank {}, WL class sizes {:?}\n",
                c.order, c.nucleus_size, c.wl_rank, c.wl_class_sizes
            ));
            let cert = json!({
                "order": c.order,
                "nucleus_size": c.nucleus_size,
                "wl_rank": c.wl_rank,
                "wl_class_sizes": c.wl_class_sizes,
                "matches_nucleus_two_orbits": c.matches_nucleus_two_orbits,
                "nucleus_is_center": c.nucleus_is_center,
                "nucleus_is_eighth": c.nucleus_is_eighth,
            });
            (cert, Value::Null, Value::Null)
        }
        AutonomyVerdict::NonAutonomous(w) => {
            text.push_str(&format!(
                "fuses from a coherent configuration of rank {} under |Phi| = {}\n",
                w.cc.rank(),
                w.phi.len()
            ));
            text.push_str(&serialize_scheme(&w.cc));
            let wit = json!({
                "cc": scheme_json(&w.cc),
                "cc_rank": w.cc.rank(),
                "phi": perm_json(&w.phi),
            });
            (Value::Null, wit, Value::Null)
        }
        AutonomyVerdict::NotApplicable(r) | AutonomyVerdict::Undetermined(r) => {
            text.push_str(&format!("reason: {r}\n"));
            (Value::Null, Value::Null, json!(r))
        }
    };
    let json = json!({
        "command": "autonomy",
        "verdict": v.name(),
        "certificate": certificate,
        "witness": witness,
        "reason": reason,
    });
    (text, json)
}

fn cmd_autonomy(path: &Path, brute_force: bool, ctx: &mut Context) -> Result<Report, CliError> {
    let doc = load_scheme(path, ctx)?;
    let rec = SchemeRecord::analyze(doc.cm.canonical());
    let verdict = if brute_force {
        algmaps::brute_force_autonomy(&rec, ctx.limits.search_order)
    } else {
        algmaps::autonomy_thin_regular(&rec)
    }
    .map_err(|e| CliError::from(e).at(path))?;
    let mut diagnostics = Vec::new();
    if !brute_force && matches!(verdict, AutonomyVerdict::NotApplicable(_) | AutonomyVerdict::Undetermined(_)) {
        diagnostics.push("--brute-force searches all coherent fissions for small orders".into());
    }
    let (text, json) = verdict_report(&verdict);
    Ok(Report { text, json, diagnostics })
}

fn cmd_basepoints(path: &Path, ctx: &mut Context) -> Result<Report, CliError> {
    let l = load_loop(path, ctx)?;
    let rec = loop_scheme(&l).map_err(|e| e.at(path))?;
    let classes = loops::basepoint_classes(&rec.cm)?;
    let count = classes.iter().max().map_or(0, |m| m + 1);
    let text = format!(
        "{count} isomorphism class(es) of loops over {} base points\nclass of each base point: {classes:?}\n",
        classes.len()
    );
    let json = json!({
        "command": "experiment basepoints",
        "order": l.order(),
        "classes": count,
        "class_of": classes,
    });
    Ok(Report {
        text,
        json,
        diagnostics: Vec::new(),
    })
}

fn coeffs_json(e: &[Vec<BigRational>]) -> Value {
    json!(e
        .iter()
        .map(|v| v.iter().map(ToString::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn cmd_symmetrized(path: &Path, k: usize, trials: usize, seed: u64, ctx: &mut Context) -> Result<Report, CliError> {
    if k == 0 {
        return Err(CliError::usage("--k must be positive"));
    }
    let doc = load_scheme(path, ctx)?;
    let cm = doc.cm.canonical();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut symmetrized_ok = 0usize;
    let mut reversal_ok = 0usize;
    let mut counterexample = None;
    for _ in 0..trials {
        let elements: Vec<_> = (0..k).map(|_| schemes::random_element(&cm, &mut rng)).collect();
        if schemes::symmetrization_membership_check(&cm, &elements)? {
            symmetrized_ok += 1;
        }
        if schemes::reversal_sum_membership(&cm, &elements)? {
            reversal_ok += 1;
        } else if counterexample.is_none() {
            counterexample = Some(elements);
        }
    }
    let mut text = format!(
        "k = {k}, {trials} trials\nsymmetrized product in span: {symmetrized_ok}/{trials}\nreversal sum in span: {reversal_ok}/{trials}\n"
    );
    if let Some(c) = &counterexample {
        text.push_str("first reversal-sum counterexample:\n");
        for e in c {
            let parts: Vec<String> = e.iter().map(ToString::to_string).collect();
            text.push_str(&format!("  [{}]\n", parts.join(", ")));
        }
    }
    let json = json!({
        "command": "experiment symmetrized-products",
        "k": k,
        "trials": trials,
        "seed": seed,
        "symmetrized_in_span": symmetrized_ok,
        "reversal_in_span": reversal_ok,
        "counterexample": counterexample.as_deref().map(coeffs_json),
    });
    Ok(Report {
        text,
        json,
        diagnostics: Vec::new(),
    })
}
