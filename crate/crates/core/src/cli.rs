//! Command-line front end.
//!
//! Batch commands are deterministic: the same arguments and files always
//! produce the same standard output. Exit status is 0 on success, 1 on a user
//! error and 2 on a conflict under the strict policy.

use std::collections::BTreeSet;
use std::fmt::Display;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::calculus::{CertaintyInterval, ConflictPolicy};
use crate::cbr::{match_case, retrieve};
use crate::dsl::{parse_atom, parse_interval, parse_kb, parse_query, parse_world_with, render_world, ParseError};
use crate::engine::{explain, forward_saturate, Asker, QueryConfig, QueryResult, Session};
use crate::error::InferenceError;
use crate::knowledge::{validate_with_world, validate, Atom, KnowledgeBase, TaxonomyPath, World};
use crate::revision::BeliefTracker;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USER: i32 = 1;
pub const EXIT_CONFLICT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "possum", version, about = "Possibilistic rule- and case-based reasoning")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Policy {
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// What to do when evidence conflicts.
    #[arg(long, global = true, value_enum, default_value = "strict")]
    tnorm_policy: Policy,
    /// Context activation threshold.
    #[arg(long, global = true, default_value_t = 0.5, value_parser = parse_alpha)]
    alpha: f64,
    /// Print the proof tree after each answer.
    #[arg(long, global = true)]
    trace: bool,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
}

fn parse_alpha(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a knowledge base (and optionally a world).
    Load { kb: PathBuf, world: Option<PathBuf> },
    /// Answer a goal such as "(anti-trust-success ?raider ?target)" or "(not (...))".
    Query { kb: PathBuf, world: PathBuf, goal: String },
    /// Add one source's report on a fact and print the updated world.
    Assert {
        world: PathBuf,
        atom: String,
        interval: String,
        #[arg(long, default_value = "user")]
        source: String,
        /// Rewrite the world file instead of printing it.
        #[arg(long)]
        write: bool,
    },
    /// Withdraw one source's report on a fact.
    RetractSource {
        world: PathBuf,
        atom: String,
        source: String,
        #[arg(long)]
        write: bool,
    },
    /// List the cases filed under a taxonomy path, matched against a world if given.
    Cases { kb: PathBuf, path: String, world: Option<PathBuf> },
    /// Print the proof tree for a goal.
    Explain { kb: PathBuf, world: PathBuf, goal: String },
    /// Evaluate every derivable conclusion bottom-up.
    Saturate { kb: PathBuf, world: PathBuf },
    /// Interactive consultation.
    Repl { kb: PathBuf, world: PathBuf },
}

/// A failure already rendered for the user, with its exit status.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn user(message: impl Display) -> Self {
        Self { code: EXIT_USER, message: message.to_string() }
    }
}

impl From<InferenceError> for Failure {
    fn from(e: InferenceError) -> Self {
        let code = if e.is_conflict() { EXIT_CONFLICT } else { EXIT_USER };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::user(e)
    }
}

fn parse_errors(file: &Path, errors: &[ParseError]) -> String {
    errors.iter().map(|e| format!("{}:{e}", file.display())).collect::<Vec<_>>().join("\n")
}

struct Context {
    config: QueryConfig,
    trace: bool,
    format: Format,
    color: bool,
}

impl Context {
    fn note(&self, err: &mut dyn Write, msg: impl Display) -> std::io::Result<()> {
        writeln!(err, "note: {msg}")
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::user(format!("{}: {e}", path.display())))
}

fn load_kb(path: &Path) -> Result<KnowledgeBase, Failure> {
    parse_kb(&read(path)?).map_err(|errs| Failure::user(parse_errors(path, &errs)))
}

fn load_world(path: &Path, policy: ConflictPolicy) -> Result<World, Failure> {
    let text = read(path)?;
    parse_world_with(&text, policy).map_err(|errs| {
        // Errors that vanish under the lenient policy are evidence conflicts.
        let code = if policy == ConflictPolicy::Strict && parse_world_with(&text, ConflictPolicy::Lenient).is_ok() {
            EXIT_CONFLICT
        } else {
            EXIT_USER
        };
        Failure { code, message: parse_errors(path, &errs) }
    })
}

fn load_valid(kb: &Path, world: &Path, policy: ConflictPolicy) -> Result<(KnowledgeBase, World), Failure> {
    let kb_value = load_kb(kb)?;
    let world_value = load_world(world, policy)?;
    let report = validate_with_world(&kb_value, &world_value);
    if !report.is_ok() {
        let lines: Vec<String> = report.violations.iter().map(|v| format!("{}: {v}", kb.display())).collect();
        return Err(Failure::user(lines.join("\n")));
    }
    Ok((kb_value, world_value))
}

fn goal_arg(text: &str) -> Result<(Atom, bool), Failure> {
    parse_query(text).map_err(|e| Failure::user(format!("goal {e}")))
}

fn headline(result: &QueryResult) -> String {
    if result.negated {
        format!("(not {}) {:.4}", result.goal, result.interval)
    } else {
        format!("{} {:.4}", result.goal, result.interval)
    }
}

fn print_result(ctx: &Context, result: &QueryResult, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match ctx.format {
        Format::Json => {
            let json = serde_json::to_string_pretty(result).map_err(Failure::user)?;
            writeln!(out, "{json}")?;
        }
        Format::Text if ctx.trace => write!(out, "{}", explain(result))?,
        Format::Text => writeln!(out, "{}", headline(result))?,
    }
    for d in &result.diagnostics {
        ctx.note(err, d)?;
    }
    Ok(())
}

fn ask_session<'a>(
    kb: &'a KnowledgeBase,
    world: &'a World,
    config: QueryConfig,
    goal: &Atom,
    negated: bool,
    asker: Option<&'a mut dyn Asker>,
) -> Result<(QueryResult, Vec<(Atom, CertaintyInterval)>), InferenceError> {
    let mut session = Session::new(kb, world, config);
    if let Some(a) = asker {
        session = session.with_asker(a);
    }
    let result = if negated { session.prove_negated(goal)? } else { session.prove(goal)? };
    let answers = session.answers().map(|(a, iv)| (a.clone(), iv)).collect();
    Ok((result, answers))
}

fn cases(
    ctx: &Context,
    kb: &KnowledgeBase,
    path: &str,
    world: Option<&World>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let path = TaxonomyPath::parse(path);
    if !kb.library.has_path(&path) {
        return Err(InferenceError::UnknownPath(path).into());
    }
    match world {
        None => {
            let found = kb.library.under(&path);
            if ctx.format == Format::Json {
                writeln!(out, "{}", serde_json::to_string_pretty(&found).map_err(Failure::user)?)?;
                return Ok(());
            }
            for t in found {
                writeln!(out, "{} {} tnorm {} suff {} nec {}", t.path, t.id, t.family, t.sufficiency, t.necessity)?;
            }
        }
        Some(world) => {
            let selected = retrieve(&kb.library, &path, world, &ctx.config)?;
            let mut session = Session::new(kb, world, ctx.config);
            let mut matches = Vec::new();
            for t in selected {
                matches.push(match_case(t, world, |a| session.interval(a))?);
            }
            if ctx.format == Format::Json {
                writeln!(out, "{}", serde_json::to_string_pretty(&matches).map_err(Failure::user)?)?;
                return Ok(());
            }
            for m in matches {
                writeln!(out, "{} match {:.4} relevance {:.4}", m.template, m.matching, m.relevance)?;
            }
        }
    }
    Ok(())
}

fn dispatch(
    ctx: &Context,
    command: Command,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let policy = ctx.config.conflict_policy;
    match command {
        Command::Load { kb, world } => {
            let kb_value = load_kb(&kb)?;
            let (report, world_value) = match &world {
                Some(w) => {
                    let w = load_world(w, policy)?;
                    (validate_with_world(&kb_value, &w), Some(w))
                }
                None => (validate(&kb_value), None),
            };
            if !report.is_ok() {
                let lines: Vec<String> = report.violations.iter().map(|v| format!("{}: {v}", kb.display())).collect();
                return Err(Failure::user(lines.join("\n")));
            }
            writeln!(
                out,
                "{}: {} rules, {} cases, {} precedent links, {} taxonomy paths",
                kb.display(),
                kb_value.rules.len(),
                kb_value.library.templates().count(),
                kb_value.precedents.len(),
                kb_value.library.paths().count()
            )?;
            if let (Some(path), Some(w)) = (&world, &world_value) {
                writeln!(out, "{}: world {}, {} roles, {} facts", path.display(), w.id, w.roles.len(), w.facts().count())?;
            }
        }
        Command::Query { kb, world, goal } => {
            let (kb, world) = load_valid(&kb, &world, policy)?;
            let (goal, negated) = goal_arg(&goal)?;
            let (result, _) = ask_session(&kb, &world, ctx.config, &goal, negated, None)?;
            print_result(ctx, &result, out, err)?;
        }
        Command::Explain { kb, world, goal } => {
            let (kb, world) = load_valid(&kb, &world, policy)?;
            let (goal, negated) = goal_arg(&goal)?;
            let (result, _) = ask_session(&kb, &world, ctx.config, &goal, negated, None)?;
            let ctx = Context { trace: true, ..*ctx };
            print_result(&ctx, &result, out, err)?;
        }
        Command::Assert { world, atom, interval, source, write } => {
            let mut w = load_world(&world, policy)?;
            let atom = parse_atom(&atom).map_err(|e| Failure::user(format!("atom {e}")))?;
            let iv = parse_interval(&interval).map_err(|e| Failure::user(format!("interval {e}")))?;
            let change = w.assert_evidence(&atom, iv, &source, policy).map_err(InferenceError::from)?;
            finish_update(ctx, &world, &w, &change, write, out, err)?;
        }
        Command::RetractSource { world, atom, source, write } => {
            let mut w = load_world(&world, policy)?;
            let atom = parse_atom(&atom).map_err(|e| Failure::user(format!("atom {e}")))?;
            let change = w.retract_source(&atom, &source, policy).map_err(InferenceError::from)?;
            finish_update(ctx, &world, &w, &change, write, out, err)?;
        }
        Command::Cases { kb, path, world } => {
            let kb = load_kb(&kb)?;
            let world = world.map(|w| load_world(&w, policy)).transpose()?;
            cases(ctx, &kb, &path, world.as_ref(), out)?;
        }
        Command::Saturate { kb, world } => {
            let (kb, world) = load_valid(&kb, &world, policy)?;
            let values = forward_saturate(&kb, &world, &ctx.config)?;
            if ctx.format == Format::Json {
                let rows: Vec<(String, CertaintyInterval)> = values.iter().map(|(a, iv)| (a.to_string(), *iv)).collect();
                writeln!(out, "{}", serde_json::to_string_pretty(&rows).map_err(Failure::user)?)?;
            } else {
                for (atom, iv) in &values {
                    writeln!(out, "{atom} {iv:.4}")?;
                }
            }
        }
        Command::Repl { kb, world } => {
            let (kb, world) = load_valid(&kb, &world, policy)?;
            repl(ctx, &kb, world, input, out, err)?;
        }
    }
    Ok(())
}

fn finish_update(
    ctx: &Context,
    path: &Path,
    world: &World,
    change: &crate::knowledge::FactChange,
    write: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    if let Some(d) = &change.diagnostic {
        ctx.note(err, d)?;
    }
    if write {
        fs::write(path, render_world(world)).map_err(|e| Failure::user(format!("{}: {e}", path.display())))?;
        writeln!(out, "{} {:.4}", change.atom, change.after)?;
    } else {
        write!(out, "{}", render_world(world))?;
    }
    Ok(())
}

/// Prompts on the console for askable predicates.
struct ConsoleAsker<'a> {
    input: &'a mut dyn BufRead,
    out: &'a mut dyn Write,
}

impl Asker for ConsoleAsker<'_> {
    fn ask(&mut self, atom: &Atom) -> Option<CertaintyInterval> {
        loop {
            let _ = write!(self.out, "belief in {atom}? [l,u] or enter to skip ");
            let _ = self.out.flush();
            let mut line = String::new();
            if self.input.read_line(&mut line).ok()? == 0 {
                return None;
            }
            let line = line.trim();
            if line.is_empty() {
                return None;
            }
            match parse_interval(line) {
                Ok(iv) => return Some(iv),
                Err(e) => {
                    let _ = writeln!(self.out, "{e}");
                }
            }
        }
    }
}

const REPL_HELP: &str = "commands:
  query <goal>                      answer a goal, asking for askable facts
  why                               proof tree of the last answer
  assert <atom> <interval> [source] record evidence (source defaults to user)
  retract <atom> <source>           withdraw one source's evidence
  what-if <atom> <interval> [goal]  answer a goal under a transient update
  cases <path>                      cases under a taxonomy path
  help | quit";

/// Splits a leading parenthesised or bracketed group off `text`.
fn split_group(text: &str) -> Option<(&str, &str)> {
    let text = text.trim_start();
    let (open, close) = match text.chars().next()? {
        '(' => ('(', ')'),
        '[' => ('[', ']'),
        _ => return None,
    };
    let mut depth = 0usize;
    for (i, c) in text.char_indices() {
        if c == open {
            depth += 1;
        } else if c == close {
            depth -= 1;
            if depth == 0 {
                return Some((&text[..=i], text[i + 1..].trim_start()));
            }
        }
    }
    None
}

struct Repl<'a> {
    ctx: &'a Context,
    kb: &'a KnowledgeBase,
    world: World,
    tracker: BeliefTracker,
    last: Option<QueryResult>,
}

impl Repl<'_> {
    fn command(&mut self, line: &str, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, Failure> {
        let (verb, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let policy = self.ctx.config.conflict_policy;
        match verb {
            "" => {}
            "quit" | "exit" => return Ok(false),
            "help" => writeln!(out, "{REPL_HELP}")?,
            "query" => {
                let (goal, negated) = goal_arg(rest)?;
                let config = QueryConfig { interactive: true, ..self.ctx.config };
                let mut asker = ConsoleAsker { input, out: &mut *out };
                let (result, answers) =
                    ask_session(self.kb, &self.world, config, &goal, negated, Some(&mut asker))?;
                for (atom, iv) in answers {
                    self.world.assert_evidence(&atom, iv, "user", policy).map_err(InferenceError::from)?;
                }
                self.tracker.track(&result);
                print_result(self.ctx, &result, out, err)?;
                self.last = Some(result);
            }
            "why" => match &self.last {
                Some(r) => write!(out, "{}", explain(r))?,
                None => writeln!(out, "no query yet")?,
            },
            "assert" | "retract" => {
                let (atom_text, rest) = split_group(rest).ok_or_else(|| Failure::user("expected an atom"))?;
                let atom = parse_atom(atom_text).map_err(|e| Failure::user(format!("atom {e}")))?;
                let invalidated = if verb == "assert" {
                    let (iv_text, source) = split_group(rest).ok_or_else(|| Failure::user("expected an interval"))?;
                    let iv = parse_interval(iv_text).map_err(|e| Failure::user(format!("interval {e}")))?;
                    let source = if source.is_empty() { "user" } else { source };
                    self.tracker.on_update(&mut self.world, &atom, iv, source, policy)
                } else {
                    if rest.is_empty() {
                        return Err(Failure::user("expected a source"));
                    }
                    self.tracker.on_retract(&mut self.world, &atom, rest, policy)
                }
                .map_err(InferenceError::from)?;
                writeln!(out, "{atom} {:.4}", self.world.lookup(&atom))?;
                self.revise(&invalidated, out)?;
            }
            "what-if" => {
                let (atom_text, rest) = split_group(rest).ok_or_else(|| Failure::user("expected an atom"))?;
                let atom = parse_atom(atom_text).map_err(|e| Failure::user(format!("atom {e}")))?;
                let (iv_text, rest) = split_group(rest).ok_or_else(|| Failure::user("expected an interval"))?;
                let iv = parse_interval(iv_text).map_err(|e| Failure::user(format!("interval {e}")))?;
                let (goal, negated) = if rest.is_empty() {
                    match &self.last {
                        Some(r) => (r.goal.clone(), r.negated),
                        None => return Err(Failure::user("what-if needs a goal before any query")),
                    }
                } else {
                    goal_arg(rest)?
                };
                let mut scratch = self.world.clone();
                scratch.assert_evidence(&atom, iv, "what-if", policy).map_err(InferenceError::from)?;
                let (result, _) = ask_session(self.kb, &scratch, self.ctx.config, &goal, negated, None)?;
                print_result(self.ctx, &result, out, err)?;
            }
            "cases" => cases(self.ctx, self.kb, rest, Some(&self.world), out)?,
            other => writeln!(out, "unknown command `{other}`; try help")?,
        }
        Ok(true)
    }

    /// Re-derives previously answered conclusions touched by an update.
    fn revise(&mut self, invalidated: &BTreeSet<Atom>, out: &mut dyn Write) -> Result<(), Failure> {
        let revised = self.tracker.recompute(self.kb, &self.world, invalidated, &self.ctx.config)?;
        for (goal, iv) in revised {
            writeln!(out, "  revised {goal} {iv:.4}")?;
        }
        Ok(())
    }
}

fn repl(
    ctx: &Context,
    kb: &KnowledgeBase,
    world: World,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), Failure> {
    let tracker = BeliefTracker::new(&world);
    let mut session = Repl { ctx, kb, world, tracker, last: None };
    loop {
        write!(out, "possum> ")?;
        out.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            writeln!(out)?;
            return Ok(());
        }
        match session.command(line.trim(), input, out, err) {
            Ok(true) => {}
            Ok(false) => return Ok(()),
            Err(f) => report(ctx, err, &f.message)?,
        }
    }
}

fn report(ctx: &Context, err: &mut dyn Write, message: &str) -> std::io::Result<()> {
    if ctx.color {
        writeln!(err, "\x1b[31merror\x1b[0m: {message}")
    } else {
        writeln!(err, "error: {message}")
    }
}

/// Runs one invocation without color.
pub fn run<I, T>(argv: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_color(argv, input, out, err, false)
}

pub fn run_with_color<I, T>(argv: I, input: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                EXIT_OK
            } else {
                let _ = write!(err, "{text}");
                EXIT_USER
            };
        }
    };
    let g = &cli.global;
    let ctx = Context {
        config: QueryConfig {
            context_threshold: g.alpha,
            conflict_policy: match g.tnorm_policy {
                Policy::Strict => ConflictPolicy::Strict,
                Policy::Lenient => ConflictPolicy::Lenient,
            },
            ..QueryConfig::default()
        },
        trace: g.trace,
        format: g.format,
        color,
    };
    match dispatch(&ctx, cli.command, input, out, err) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = report(&ctx, err, &f.message);
            f.code
        }
    }
}
