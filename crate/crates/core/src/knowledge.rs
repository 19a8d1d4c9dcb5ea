//! Knowledge-base object model: atoms, facts with per-source evidence,
//! plausible rules, worlds with role bindings, and load-time validation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calculus::{consensus, CalculusError, CertaintyInterval, ConflictPolicy, TNormFamily};
use crate::cbr::{CaseLibrary, PrecedentLink};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KnowledgeError {
    #[error("ground atom required, found {0}")]
    NotGround(Atom),
    #[error("role variable ?{var} in {atom} is not bound")]
    UnboundRole { var: String, atom: Atom },
    #[error("sources {sources:?} disagree on {atom}: consensus [{lower}, {upper}] is inverted")]
    SourceConflict {
        atom: Atom,
        sources: Vec<String>,
        lower: f64,
        upper: f64,
    },
    #[error(transparent)]
    Calculus(#[from] CalculusError),
}

/// An atom argument: a constant symbol or a role variable (`?name`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Term {
    Const(String),
    /// Variable name without the leading `?`.
    Var(String),
}

impl Term {
    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => f.write_str(c),
            Term::Var(v) => write!(f, "?{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Self { predicate: predicate.into(), args }
    }

    /// Ground atom from constant arguments.
    pub fn ground<S: AsRef<str>>(predicate: &str, args: &[S]) -> Self {
        Self::new(predicate, args.iter().map(|a| Term::Const(a.as_ref().to_string())).collect())
    }

    pub fn is_ground(&self) -> bool {
        !self.args.iter().any(Term::is_var)
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            Term::Const(_) => None,
        })
    }

    /// Replaces every role variable by its binding.
    pub fn substitute(&self, roles: &BTreeMap<String, String>) -> Result<Atom, KnowledgeError> {
        let args = self
            .args
            .iter()
            .map(|t| match t {
                Term::Const(_) => Ok(t.clone()),
                Term::Var(v) => roles.get(v).map(|c| Term::Const(c.clone())).ok_or_else(|| {
                    KnowledgeError::UnboundRole { var: v.clone(), atom: self.clone() }
                }),
            })
            .collect::<Result<_, _>>()?;
        Ok(Atom { predicate: self.predicate.clone(), args })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

pub fn substitute(atom: &Atom, roles: &BTreeMap<String, String>) -> Result<Atom, KnowledgeError> {
    atom.substitute(roles)
}

/// A hierarchical index such as `defense/anti-trust/market-dominance`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TaxonomyPath(pub Vec<String>);

impl TaxonomyPath {
    pub fn parse(text: &str) -> Self {
        Self(text.split('/').filter(|s| !s.is_empty()).map(str::to_string).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// True when `self` equals `other` or is one of its ancestors.
    pub fn contains(&self, other: &TaxonomyPath) -> bool {
        other.0.starts_with(&self.0)
    }

    /// Every non-empty prefix, shortest first.
    pub fn prefixes(&self) -> impl Iterator<Item = TaxonomyPath> + '_ {
        (1..=self.0.len()).map(|n| TaxonomyPath(self.0[..n].to_vec()))
    }
}

impl fmt::Display for TaxonomyPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("/"))
    }
}

/// A ground atom with the reports of every source that has spoken about it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub atom: Atom,
    pub evidence: BTreeMap<String, CertaintyInterval>,
    pub effective: CertaintyInterval,
}

/// A plausible rule: `if antecedents then consequent` discounted by
/// sufficiency and necessity, gated by an optional context.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub class: TaxonomyPath,
    pub context: Vec<Atom>,
    pub antecedents: Vec<Atom>,
    pub consequent: Atom,
    pub sufficiency: f64,
    pub necessity: f64,
    pub family: TNormFamily,
}

impl Rule {
    /// Conventional strict implication.
    pub fn is_strict(&self) -> bool {
        self.sufficiency == 1.0 && self.necessity == 0.0
    }
}

/// What an evidence update did to a fact's effective interval.
#[derive(Debug, Clone, PartialEq)]
pub struct FactChange {
    pub atom: Atom,
    pub before: CertaintyInterval,
    pub after: CertaintyInterval,
    pub diagnostic: Option<String>,
}

impl FactChange {
    pub fn changed(&self) -> bool {
        self.before != self.after
    }
}

/// The current situation: role bindings, facts and askable predicates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub id: String,
    pub roles: BTreeMap<String, String>,
    facts: BTreeMap<Atom, Fact>,
    pub askables: BTreeSet<String>,
    epoch: u64,
}

impl World {
    pub fn new(id: impl Into<String>) -> Self {
        Self { id: id.into(), ..Self::default() }
    }

    pub fn bind(&mut self, var: impl Into<String>, constant: impl Into<String>) {
        self.roles.insert(var.into(), constant.into());
    }

    /// Counts changes to any effective interval.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.facts.values()
    }

    pub fn fact(&self, atom: &Atom) -> Option<&Fact> {
        self.facts.get(atom)
    }

    /// Effective interval of a ground atom; total ignorance when absent.
    pub fn lookup(&self, atom: &Atom) -> CertaintyInterval {
        self.facts.get(atom).map_or(CertaintyInterval::UNKNOWN, |f| f.effective)
    }

    pub fn substitute(&self, atom: &Atom) -> Result<Atom, KnowledgeError> {
        atom.substitute(&self.roles)
    }

    /// Records `source`'s report on `atom`, replacing any earlier report from
    /// the same source, and recomputes the consensus. On a strict conflict the
    /// world is left unchanged.
    pub fn assert_evidence(
        &mut self,
        atom: &Atom,
        interval: CertaintyInterval,
        source: &str,
        policy: ConflictPolicy,
    ) -> Result<FactChange, KnowledgeError> {
        if !atom.is_ground() {
            return Err(KnowledgeError::NotGround(atom.clone()));
        }
        let mut evidence = self.facts.get(atom).map(|f| f.evidence.clone()).unwrap_or_default();
        evidence.insert(source.to_string(), interval);
        self.install(atom, evidence, policy)
    }

    /// Withdraws one source's report. The fact disappears with its last source.
    pub fn retract_source(
        &mut self,
        atom: &Atom,
        source: &str,
        policy: ConflictPolicy,
    ) -> Result<FactChange, KnowledgeError> {
        let mut evidence = self.facts.get(atom).map(|f| f.evidence.clone()).unwrap_or_default();
        evidence.remove(source);
        self.install(atom, evidence, policy)
    }

    fn install(
        &mut self,
        atom: &Atom,
        evidence: BTreeMap<String, CertaintyInterval>,
        policy: ConflictPolicy,
    ) -> Result<FactChange, KnowledgeError> {
        let before = self.lookup(atom);
        let mut diagnostic = None;
        if evidence.is_empty() {
            self.facts.remove(atom);
        } else {
            let reports: Vec<CertaintyInterval> = evidence.values().copied().collect();
            let fused = consensus(&reports, policy).map_err(|e| match e {
                CalculusError::SourceConflict { lower, upper } => KnowledgeError::SourceConflict {
                    atom: atom.clone(),
                    sources: evidence.keys().cloned().collect(),
                    lower,
                    upper,
                },
                other => other.into(),
            })?;
            if let Some((l, u)) = fused.conflict {
                diagnostic = Some(format!(
                    "sources {:?} disagree on {atom} ([{l}, {u}]); using [0, 1]",
                    evidence.keys().collect::<Vec<_>>()
                ));
            }
            self.facts.insert(
                atom.clone(),
                Fact { atom: atom.clone(), evidence, effective: fused.interval },
            );
        }
        let after = self.lookup(atom);
        if before != after {
            self.epoch += 1;
        }
        Ok(FactChange { atom: atom.clone(), before, after, diagnostic })
    }
}

/// Rules, case library and precedent links, immutable once loaded.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KnowledgeBase {
    /// Linguistic certainty labels, e.g. `"high chance" = 0.9`.
    pub lexicon: BTreeMap<String, f64>,
    pub rules: BTreeMap<String, Rule>,
    pub library: CaseLibrary,
    /// Keyed by target predicate.
    pub precedents: BTreeMap<String, PrecedentLink>,
}

impl KnowledgeBase {
    pub fn is_empty(&self) -> bool {
        self.lexicon.is_empty()
            && self.rules.is_empty()
            && self.library.is_empty()
            && self.precedents.is_empty()
    }

    /// Predicate dependency graph: each predicate maps to the predicates its
    /// derivation may evaluate.
    pub fn dependencies(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut graph: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for rule in self.rules.values() {
            let deps = graph.entry(rule.consequent.predicate.clone()).or_default();
            deps.extend(rule.antecedents.iter().map(|a| a.predicate.clone()));
            for a in &rule.antecedents {
                graph.entry(a.predicate.clone()).or_default();
            }
        }
        for link in self.precedents.values() {
            graph.entry(link.predicate.clone()).or_default();
            for case in self.library.under(&link.path) {
                if case.consequent.predicate != link.predicate {
                    continue;
                }
                for a in &case.antecedents {
                    graph.entry(a.predicate.clone()).or_default();
                }
                graph
                    .get_mut(&link.predicate)
                    .unwrap()
                    .extend(case.antecedents.iter().map(|a| a.predicate.clone()));
            }
        }
        graph
    }

    /// Predicates ordered so that dependencies come first, or the first cycle
    /// found.
    pub fn topological_order(&self) -> Result<Vec<String>, Vec<String>> {
        let graph = self.dependencies();
        let mut state: BTreeMap<&str, u8> = BTreeMap::new();
        let mut order = Vec::new();
        let mut stack = Vec::new();
        for start in graph.keys() {
            visit(start, &graph, &mut state, &mut stack, &mut order)?;
        }
        Ok(order)
    }
}

// 0 = unvisited, 1 = on the stack, 2 = done
fn visit<'g>(
    node: &'g str,
    graph: &'g BTreeMap<String, BTreeSet<String>>,
    state: &mut BTreeMap<&'g str, u8>,
    stack: &mut Vec<&'g str>,
    order: &mut Vec<String>,
) -> Result<(), Vec<String>> {
    match state.get(node).copied().unwrap_or(0) {
        2 => return Ok(()),
        1 => {
            let start = stack.iter().position(|n| *n == node).unwrap();
            let mut cycle: Vec<String> = stack[start..].iter().map(|s| s.to_string()).collect();
            cycle.push(node.to_string());
            return Err(cycle);
        }
        _ => {}
    }
    state.insert(node, 1);
    stack.push(node);
    if let Some(deps) = graph.get(node) {
        for d in deps {
            visit(d, graph, state, stack, order)?;
        }
    }
    stack.pop();
    state.insert(node, 2);
    order.push(node.to_string());
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Predicates along a dependency cycle; the first is repeated at the end.
    Cycle(Vec<String>),
    OutOfRange { item: String, field: &'static str, value: f64 },
    UnboundRole { item: String, var: String },
    DanglingPrecedent { predicate: String, path: TaxonomyPath },
    UnknownCasePath { case: String, path: TaxonomyPath },
    EmptyAntecedent { item: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle(preds) => write!(f, "dependency cycle: {}", preds.join(" -> ")),
            Violation::OutOfRange { item, field, value } => {
                write!(f, "{item}: {field} {value} is outside [0, 1]")
            }
            Violation::UnboundRole { item, var } => write!(f, "{item}: role variable ?{var} is unbound"),
            Violation::DanglingPrecedent { predicate, path } => {
                write!(f, "precedent for {predicate}: taxonomy path {path} is not declared")
            }
            Violation::UnknownCasePath { case, path } => {
                write!(f, "case {case}: taxonomy path {path} is not declared")
            }
            Violation::EmptyAntecedent { item } => write!(f, "{item}: no antecedent clauses"),
        }
    }
}

/// Problems found by [`validate`]; empty means the knowledge base is loadable.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

fn check_range(out: &mut Vec<Violation>, item: &str, field: &'static str, value: f64) {
    if !(0.0..=1.0).contains(&value) {
        out.push(Violation::OutOfRange { item: item.to_string(), field, value });
    }
}

pub fn validate(kb: &KnowledgeBase) -> ValidationReport {
    let mut out = Vec::new();
    for rule in kb.rules.values() {
        let item = format!("rule {}", rule.id);
        check_range(&mut out, &item, "sufficiency", rule.sufficiency);
        check_range(&mut out, &item, "necessity", rule.necessity);
        if rule.antecedents.is_empty() {
            out.push(Violation::EmptyAntecedent { item });
        }
    }
    for case in kb.library.templates() {
        let item = format!("case {}", case.id);
        check_range(&mut out, &item, "sufficiency", case.sufficiency);
        check_range(&mut out, &item, "necessity", case.necessity);
        if case.antecedents.is_empty() {
            out.push(Violation::EmptyAntecedent { item: item.clone() });
        }
        if !kb.library.has_path(&case.path) {
            out.push(Violation::UnknownCasePath { case: case.id.clone(), path: case.path.clone() });
        }
        let declared: BTreeSet<&str> = case.roles.iter().map(String::as_str).collect();
        let used: BTreeSet<&str> = case.atoms().flat_map(Atom::vars).collect();
        for var in used.difference(&declared) {
            out.push(Violation::UnboundRole { item: item.clone(), var: var.to_string() });
        }
    }
    for link in kb.precedents.values() {
        if !kb.library.has_path(&link.path) {
            out.push(Violation::DanglingPrecedent {
                predicate: link.predicate.clone(),
                path: link.path.clone(),
            });
        }
    }
    if let Err(cycle) = kb.topological_order() {
        out.push(Violation::Cycle(cycle));
    }
    ValidationReport { violations: out }
}

/// [`validate`] plus a check that every role variable the knowledge base uses
/// is bound by `world`.
pub fn validate_with_world(kb: &KnowledgeBase, world: &World) -> ValidationReport {
    let mut report = validate(kb);
    let bound = |v: &str| world.roles.contains_key(v);
    for rule in kb.rules.values() {
        let used: BTreeSet<&str> = rule
            .context
            .iter()
            .chain(&rule.antecedents)
            .chain(std::iter::once(&rule.consequent))
            .flat_map(Atom::vars)
            .collect();
        for var in used.into_iter().filter(|v| !bound(v)) {
            report
                .violations
                .push(Violation::UnboundRole { item: format!("rule {}", rule.id), var: var.to_string() });
        }
    }
    for link in kb.precedents.values() {
        for var in link.atom.vars().filter(|v| !bound(v)) {
            report.violations.push(Violation::UnboundRole {
                item: format!("precedent {}", link.predicate),
                var: var.to_string(),
            });
        }
    }
    report
}
