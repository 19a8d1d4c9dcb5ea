//! Inference over the rule deduction graph.
//!
//! A goal is supported by up to three kinds of evidence: its stored fact, the
//! active rules concluding it, and, when a precedent link names its predicate,
//! the aggregated relevance of matching cases. Rule and precedent paths are
//! merged by conclusion aggregation; the stored fact then joins the result by
//! source consensus, as one more information source.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use std::rc::Rc;

use serde::Serialize;

use crate::calculus::{
    aggregate, antecedent_eval, consensus, detach, CalculusError, CertaintyInterval, ConflictPolicy,
    Fused, TNormFamily,
};
use crate::cbr::{precedent_support, retrieve_screened};
use crate::error::InferenceError;
use crate::knowledge::{Atom, KnowledgeBase, KnowledgeError, Rule, World};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QueryConfig {
    /// Minimum lower bound a context must reach for its rule to be active.
    pub context_threshold: f64,
    pub conflict_policy: ConflictPolicy,
    /// Ask for askable predicates that have no stored fact.
    pub interactive: bool,
    pub max_depth: usize,
    pub memoize: bool,
}

impl Default for QueryConfig {
    fn default() -> Self {
        Self {
            context_threshold: 0.5,
            conflict_policy: ConflictPolicy::Strict,
            interactive: false,
            max_depth: 64,
            memoize: true,
        }
    }
}

/// Outcome of screening one context.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub active: bool,
    /// The ground context atoms that were looked up.
    pub atoms: Vec<Atom>,
}

/// A context is satisfied when it is empty or the min-conjunction of its
/// clauses reaches `threshold` in its lower bound.
pub fn context_gate(context: &[Atom], world: &World, threshold: f64) -> Result<Gate, KnowledgeError> {
    if context.is_empty() {
        return Ok(Gate { active: true, atoms: Vec::new() });
    }
    let atoms = context.iter().map(|a| world.substitute(a)).collect::<Result<Vec<_>, _>>()?;
    let clauses: Vec<CertaintyInterval> = atoms.iter().map(|a| world.lookup(a)).collect();
    let joined = antecedent_eval(TNormFamily::T3, &clauses)?;
    Ok(Gate { active: joined.lower() >= threshold, atoms })
}

/// Identifiers of the rules whose context holds in `world`. A context that
/// cannot be grounded leaves its rule inactive.
pub fn screen(kb: &KnowledgeBase, world: &World, config: &QueryConfig) -> BTreeSet<String> {
    kb.rules
        .values()
        .filter(|r| {
            context_gate(&r.context, world, config.context_threshold).is_ok_and(|g| g.active)
        })
        .map(|r| r.id.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeKind {
    Fact,
    RuleInstance,
    Aggregation,
    Precedent,
    CaseInstance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Strength {
    pub sufficiency: f64,
    pub necessity: f64,
}

/// One node of a proof graph.
///
/// - fact: a world lookup; `result` is the effective interval (or `[0, 1]`).
/// - rule-instance / case-instance: children are the premise sub-goals,
///   `premise` is `[b, B]`, `detached` is `[c, C]`.
/// - precedent: children are case instances, `aggregated` is their `[d, D]`.
/// - aggregation: an optional fact child followed by rule-instance and
///   precedent paths; `aggregated` is `[d, D]` over the paths and `result` its
///   consensus with the fact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProofNode {
    pub goal: Atom,
    pub kind: NodeKind,
    pub provenance: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<TNormFamily>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub strength: Option<Strength>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub premise: Option<CertaintyInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detached: Option<CertaintyInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aggregated: Option<CertaintyInterval>,
    pub result: CertaintyInterval,
    /// World atoms consulted here that are not fact children: the goal itself
    /// and the ground contexts of candidate rules and cases.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub watched: Vec<Atom>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<Rc<ProofNode>>,
}

impl ProofNode {
    fn leaf(goal: Atom, provenance: String, result: CertaintyInterval) -> Self {
        Self {
            goal,
            kind: NodeKind::Fact,
            provenance,
            family: None,
            strength: None,
            premise: None,
            detached: None,
            aggregated: None,
            result,
            watched: Vec::new(),
            children: Vec::new(),
        }
    }

    /// Interval this node contributes as a proof path.
    pub fn contribution(&self) -> CertaintyInterval {
        self.detached.unwrap_or(self.result)
    }

    /// Recomputes every interval bottom-up from the fact leaves and reports
    /// the first node whose recorded value differs.
    pub fn audit(&self, policy: ConflictPolicy) -> Result<(), String> {
        for c in &self.children {
            c.audit(policy)?;
        }
        let mismatch = |what: &str| Err(format!("{what} of {:?} node {} does not recompute", self.kind, self.goal));
        let fused = |r: Result<Fused, CalculusError>| r.map(|f| f.interval).map_err(|e| e.to_string());
        match self.kind {
            NodeKind::Fact => Ok(()),
            NodeKind::RuleInstance | NodeKind::CaseInstance => {
                let family = self.family.ok_or("instance without family")?;
                let strength = self.strength.ok_or("instance without strength")?;
                let clauses: Vec<CertaintyInterval> = self.children.iter().map(|c| c.result).collect();
                let premise = antecedent_eval(family, &clauses).map_err(|e| e.to_string())?;
                if Some(premise) != self.premise {
                    return mismatch("premise");
                }
                let detached = detach(family, strength.sufficiency, strength.necessity, premise)
                    .map_err(|e| e.to_string())?;
                if Some(detached) != self.detached || detached != self.result {
                    return mismatch("detachment");
                }
                Ok(())
            }
            NodeKind::Precedent => {
                let expect = match self.family {
                    Some(f) if !self.children.is_empty() => {
                        let paths: Vec<_> = self.children.iter().map(|c| c.contribution()).collect();
                        fused(aggregate(f, &paths, policy))?
                    }
                    _ => CertaintyInterval::UNKNOWN,
                };
                if Some(expect) != self.aggregated || expect != self.result {
                    return mismatch("precedent aggregation");
                }
                Ok(())
            }
            NodeKind::Aggregation => {
                let fact = self.children.iter().find(|c| c.kind == NodeKind::Fact).map(|c| c.result);
                let paths: Vec<_> = self
                    .children
                    .iter()
                    .filter(|c| c.kind != NodeKind::Fact)
                    .map(|c| c.contribution())
                    .collect();
                let aggregated = match self.family {
                    Some(f) if !paths.is_empty() => Some(fused(aggregate(f, &paths, policy))?),
                    _ => None,
                };
                if aggregated != self.aggregated {
                    return mismatch("aggregation");
                }
                let expect = match (fact, aggregated) {
                    (Some(f), Some(d)) => fused(consensus(&[f, d], policy))?,
                    (Some(f), None) => f,
                    (None, Some(d)) => d,
                    (None, None) => CertaintyInterval::UNKNOWN,
                };
                if expect != self.result {
                    return mismatch("consensus");
                }
                Ok(())
            }
        }
    }

    /// Number of nodes in the tree, counting shared sub-goals once per use.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a ProofNode)) {
        visit(self);
        for c in &self.children {
            c.walk(visit);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub goal: Atom,
    pub negated: bool,
    pub interval: CertaintyInterval,
    pub proof: Rc<ProofNode>,
    pub diagnostics: Vec<String>,
    /// World epoch the answer was computed against.
    pub epoch: u64,
}

/// Source of answers for askable predicates in interactive sessions.
pub trait Asker {
    /// `None` skips the question.
    fn ask(&mut self, atom: &Atom) -> Option<CertaintyInterval>;
}

/// A single-threaded query session over one world.
pub struct Session<'a> {
    kb: &'a KnowledgeBase,
    world: &'a World,
    config: QueryConfig,
    active: BTreeSet<String>,
    by_consequent: BTreeMap<&'a str, Vec<&'a Rule>>,
    memo: HashMap<Atom, Rc<ProofNode>>,
    in_progress: HashSet<Atom>,
    diagnostics: Vec<String>,
    asker: Option<&'a mut dyn Asker>,
    answers: BTreeMap<Atom, Option<CertaintyInterval>>,
}

impl<'a> Session<'a> {
    pub fn new(kb: &'a KnowledgeBase, world: &'a World, config: QueryConfig) -> Self {
        let mut by_consequent: BTreeMap<&str, Vec<&Rule>> = BTreeMap::new();
        for r in kb.rules.values() {
            by_consequent.entry(r.consequent.predicate.as_str()).or_default().push(r);
        }
        Self {
            kb,
            world,
            config,
            active: screen(kb, world, &config),
            by_consequent,
            memo: HashMap::new(),
            in_progress: HashSet::new(),
            diagnostics: Vec::new(),
            asker: None,
            answers: BTreeMap::new(),
        }
    }

    pub fn with_asker(mut self, asker: &'a mut dyn Asker) -> Self {
        self.asker = Some(asker);
        self
    }

    /// Pre-seeds the memo table with sub-goal proofs known to be current.
    pub fn with_memo(mut self, memo: HashMap<Atom, Rc<ProofNode>>) -> Self {
        self.memo = memo;
        self
    }

    pub fn active_rules(&self) -> &BTreeSet<String> {
        &self.active
    }

    /// Answers collected from the asker; skipped questions are omitted.
    pub fn answers(&self) -> impl Iterator<Item = (&Atom, CertaintyInterval)> {
        self.answers.iter().filter_map(|(a, iv)| iv.map(|iv| (a, iv)))
    }

    pub fn memo(&self) -> &HashMap<Atom, Rc<ProofNode>> {
        &self.memo
    }

    /// Proves `goal` after substituting the world's roles.
    pub fn prove(&mut self, goal: &Atom) -> Result<QueryResult, InferenceError> {
        let goal = self.world.substitute(goal)?;
        self.diagnostics.clear();
        let proof = self.evaluate(&goal, 0)?;
        Ok(QueryResult {
            interval: proof.result,
            goal,
            negated: false,
            proof,
            diagnostics: std::mem::take(&mut self.diagnostics),
            epoch: self.world.epoch(),
        })
    }

    /// Answers `not goal` as the complement of the goal's interval.
    pub fn prove_negated(&mut self, goal: &Atom) -> Result<QueryResult, InferenceError> {
        let mut r = self.prove(goal)?;
        r.interval = r.interval.complement();
        r.negated = true;
        Ok(r)
    }

    /// Interval of a ground sub-goal.
    pub fn interval(&mut self, goal: &Atom) -> Result<CertaintyInterval, InferenceError> {
        Ok(self.evaluate(goal, 0)?.result)
    }

    fn stored_fact(&mut self, goal: &Atom) -> Option<(CertaintyInterval, String)> {
        if let Some(f) = self.world.fact(goal) {
            let sources: Vec<&str> = f.evidence.keys().map(String::as_str).collect();
            return Some((f.effective, sources.join(",")));
        }
        if !self.config.interactive || !self.world.askables.contains(&goal.predicate) {
            return None;
        }
        let answer = match self.answers.get(goal) {
            Some(a) => *a,
            None => {
                let a = self.asker.as_mut().and_then(|asker| asker.ask(goal));
                self.answers.insert(goal.clone(), a);
                a
            }
        };
        answer.map(|iv| (iv, "user".to_string()))
    }

    fn evaluate(&mut self, goal: &Atom, depth: usize) -> Result<Rc<ProofNode>, InferenceError> {
        if self.config.memoize {
            if let Some(node) = self.memo.get(goal) {
                return Ok(Rc::clone(node));
            }
        }
        if depth > self.config.max_depth {
            return Err(InferenceError::DepthExceeded { goal: goal.clone(), depth: self.config.max_depth });
        }
        if !self.in_progress.insert(goal.clone()) {
            return Err(InferenceError::Cycle { goal: goal.clone() });
        }
        let node = self.expand(goal, depth);
        self.in_progress.remove(goal);
        let node = Rc::new(node?);
        if self.config.memoize {
            self.memo.insert(goal.clone(), Rc::clone(&node));
        }
        Ok(node)
    }

    fn expand(&mut self, goal: &Atom, depth: usize) -> Result<ProofNode, InferenceError> {
        let kb = self.kb;
        let world = self.world;
        let candidates: Vec<&Rule> = match self.by_consequent.get(goal.predicate.as_str()) {
            Some(rules) => rules
                .iter()
                .copied()
                .filter_map(|r| match world.substitute(&r.consequent) {
                    Ok(c) if &c == goal => Some(Ok(r)),
                    Ok(_) => None,
                    Err(e) => Some(Err(e)),
                })
                .collect::<Result<_, _>>()?,
            None => Vec::new(),
        };
        let link = kb.precedents.get(&goal.predicate);
        let fact = self.stored_fact(goal);

        if candidates.is_empty() && link.is_none() {
            return Ok(match fact {
                Some((iv, sources)) => ProofNode::leaf(goal.clone(), sources, iv),
                None => {
                    self.diagnostics.push(format!("no support for {goal}"));
                    ProofNode::leaf(goal.clone(), "unknown".into(), CertaintyInterval::UNKNOWN)
                }
            });
        }

        let mut children: Vec<Rc<ProofNode>> = Vec::new();
        let mut watched = vec![goal.clone()];
        if let Some((iv, sources)) = &fact {
            children.push(Rc::new(ProofNode::leaf(goal.clone(), sources.clone(), *iv)));
        }
        let mut families: Vec<TNormFamily> = Vec::new();

        for rule in candidates {
            if let Ok(gate) = context_gate(&rule.context, world, self.config.context_threshold) {
                watched.extend(gate.atoms);
            }
            if !self.active.contains(&rule.id) {
                continue;
            }
            let node = self.rule_instance(rule, goal, depth)?;
            families.push(rule.family);
            children.push(Rc::new(node));
        }

        if link.is_some() {
            let node = self.precedent(goal, depth, &mut watched)?;
            families.extend(node.family);
            children.push(Rc::new(node));
        }

        let paths: Vec<(CertaintyInterval, String)> = children
            .iter()
            .filter(|c| c.kind != NodeKind::Fact)
            .map(|c| (c.contribution(), format!("{:?} {}", c.kind, c.provenance)))
            .collect();
        let family = families.iter().copied().min();
        let aggregated = match family {
            Some(f) if !paths.is_empty() => {
                let ivs: Vec<_> = paths.iter().map(|(iv, _)| *iv).collect();
                let fused = aggregate(f, &ivs, self.config.conflict_policy).map_err(|e| match e {
                    CalculusError::EvidenceConflict { lower, upper } => InferenceError::EvidenceConflict {
                        goal: goal.clone(),
                        paths: paths.iter().map(|(_, p)| p.clone()).collect(),
                        lower,
                        upper,
                    },
                    other => other.into(),
                })?;
                if let Some((l, u)) = fused.conflict {
                    self.diagnostics.push(format!("conflicting paths for {goal} ([{l}, {u}]); using [0, 1]"));
                }
                Some(fused.interval)
            }
            _ => None,
        };
        let result = match (&fact, aggregated) {
            (Some((f, sources)), Some(d)) => {
                let fused = consensus(&[*f, d], self.config.conflict_policy).map_err(|e| match e {
                    CalculusError::SourceConflict { lower, upper } => InferenceError::SourceConflict {
                        goal: goal.clone(),
                        sources: sources.split(',').map(str::to_string).chain(["derived".to_string()]).collect(),
                        lower,
                        upper,
                    },
                    other => other.into(),
                })?;
                if let Some((l, u)) = fused.conflict {
                    self.diagnostics
                        .push(format!("stored fact and derivation disagree on {goal} ([{l}, {u}]); using [0, 1]"));
                }
                fused.interval
            }
            (Some((f, _)), None) => *f,
            (None, Some(d)) => d,
            (None, None) => {
                self.diagnostics.push(format!("no support for {goal}"));
                CertaintyInterval::UNKNOWN
            }
        };
        watched.sort();
        watched.dedup();
        Ok(ProofNode {
            goal: goal.clone(),
            kind: NodeKind::Aggregation,
            provenance: "aggregation".into(),
            family: family.filter(|_| aggregated.is_some()),
            strength: None,
            premise: None,
            detached: None,
            aggregated,
            result,
            watched,
            children,
        })
    }

    fn rule_instance(&mut self, rule: &Rule, goal: &Atom, depth: usize) -> Result<ProofNode, InferenceError> {
        let mut children = Vec::with_capacity(rule.antecedents.len());
        for a in &rule.antecedents {
            let sub = self.world.substitute(a)?;
            children.push(self.evaluate(&sub, depth + 1)?);
        }
        let clauses: Vec<CertaintyInterval> = children.iter().map(|c| c.result).collect();
        let premise = antecedent_eval(rule.family, &clauses)?;
        let detached = detach(rule.family, rule.sufficiency, rule.necessity, premise)?;
        Ok(ProofNode {
            goal: goal.clone(),
            kind: NodeKind::RuleInstance,
            provenance: rule.id.clone(),
            family: Some(rule.family),
            strength: Some(Strength { sufficiency: rule.sufficiency, necessity: rule.necessity }),
            premise: Some(premise),
            detached: Some(detached),
            aggregated: None,
            result: detached,
            watched: Vec::new(),
            children,
        })
    }

    fn precedent(&mut self, goal: &Atom, depth: usize, watched: &mut Vec<Atom>) -> Result<ProofNode, InferenceError> {
        let kb = self.kb;
        let world = self.world;
        let config = self.config;
        let link = &kb.precedents[&goal.predicate];
        // Premise proofs are collected in evaluation order and regrouped per
        // case afterwards.
        let mut premise_nodes: Vec<Rc<ProofNode>> = Vec::new();
        let support = precedent_support(kb, world, goal, &config, |atom| {
            let node = self.evaluate(atom, depth + 1)?;
            let iv = node.result;
            premise_nodes.push(node);
            Ok(iv)
        })?;
        self.diagnostics.extend(support.diagnostics.iter().cloned());
        watched.extend(support.consulted.iter().cloned());

        let mut premise_nodes = premise_nodes.into_iter();
        let mut children = Vec::with_capacity(support.matches.len());
        for m in &support.matches {
            let case = kb.library.get(&m.template).expect("matched case is in the library");
            let case_children: Vec<Rc<ProofNode>> = premise_nodes.by_ref().take(m.premises.len()).collect();
            children.push(Rc::new(ProofNode {
                goal: goal.clone(),
                kind: NodeKind::CaseInstance,
                provenance: m.template.clone(),
                family: Some(case.family),
                strength: Some(Strength { sufficiency: case.sufficiency, necessity: case.necessity }),
                premise: Some(m.matching),
                detached: Some(m.relevance),
                aggregated: None,
                result: m.relevance,
                watched: Vec::new(),
                children: case_children,
            }));
        }
        Ok(ProofNode {
            goal: goal.clone(),
            kind: NodeKind::Precedent,
            provenance: link.path.to_string(),
            family: Some(support.family),
            strength: None,
            premise: None,
            detached: None,
            aggregated: Some(support.interval),
            result: support.interval,
            watched: Vec::new(),
            children,
        })
    }
}

/// Backward-chaining query in batch mode.
pub fn prove(
    kb: &KnowledgeBase,
    world: &World,
    goal: &Atom,
    config: &QueryConfig,
) -> Result<QueryResult, InferenceError> {
    Session::new(kb, world, *config).prove(goal)
}

/// Ground goals that active rules or precedent links can conclude, grouped by
/// predicate.
fn derivable_goals(
    kb: &KnowledgeBase,
    world: &World,
    active: &BTreeSet<String>,
) -> Result<BTreeMap<String, BTreeSet<Atom>>, InferenceError> {
    let mut goals: BTreeMap<String, BTreeSet<Atom>> = BTreeMap::new();
    for rule in kb.rules.values().filter(|r| active.contains(&r.id)) {
        let g = world.substitute(&rule.consequent)?;
        goals.entry(g.predicate.clone()).or_default().insert(g);
    }
    for link in kb.precedents.values() {
        let g = world.substitute(&link.atom)?;
        goals.entry(g.predicate.clone()).or_default().insert(g);
    }
    Ok(goals)
}

/// Evaluates every derivable goal bottom-up in one pass over the predicates
/// in dependency order.
pub fn forward_saturate(
    kb: &KnowledgeBase,
    world: &World,
    config: &QueryConfig,
) -> Result<BTreeMap<Atom, CertaintyInterval>, InferenceError> {
    let order = kb.topological_order().map_err(|cycle| InferenceError::Cycle {
        goal: Atom::new(cycle[0].clone(), Vec::new()),
    })?;
    let active = screen(kb, world, config);
    let goals = derivable_goals(kb, world, &active)?;
    let policy = config.conflict_policy;
    let mut values: BTreeMap<Atom, CertaintyInterval> = BTreeMap::new();

    for predicate in &order {
        let Some(targets) = goals.get(predicate) else { continue };
        for goal in targets {
            let value_of = |a: &Atom, values: &BTreeMap<Atom, CertaintyInterval>| {
                values.get(a).copied().unwrap_or_else(|| world.lookup(a))
            };
            let mut paths = Vec::new();
            let mut families = Vec::new();
            for rule in kb.rules.values().filter(|r| active.contains(&r.id)) {
                if &world.substitute(&rule.consequent)? != goal {
                    continue;
                }
                let clauses = rule
                    .antecedents
                    .iter()
                    .map(|a| world.substitute(a).map(|g| value_of(&g, &values)))
                    .collect::<Result<Vec<_>, _>>()?;
                let premise = antecedent_eval(rule.family, &clauses)?;
                paths.push(detach(rule.family, rule.sufficiency, rule.necessity, premise)?);
                families.push(rule.family);
            }
            if let Some(link) = kb.precedents.get(predicate) {
                let retrieval = retrieve_screened(&kb.library, &link.path, world, config)?;
                let mut relevances = Vec::new();
                for case in retrieval.selected {
                    let Ok(bindings) = case
                        .roles
                        .iter()
                        .map(|r| world.roles.get(r).map(|c| (r.clone(), c.clone())).ok_or(()))
                        .collect::<Result<BTreeMap<_, _>, ()>>()
                    else {
                        continue;
                    };
                    let Ok(concl) = case.consequent.substitute(&bindings) else { continue };
                    if &concl != goal {
                        continue;
                    }
                    let Ok(premises) = case
                        .antecedents
                        .iter()
                        .map(|a| a.substitute(&bindings))
                        .collect::<Result<Vec<_>, _>>()
                    else {
                        continue;
                    };
                    let clauses: Vec<_> = premises.iter().map(|p| value_of(p, &values)).collect();
                    let matching = antecedent_eval(case.family, &clauses)?;
                    relevances.push(detach(case.family, case.sufficiency, case.necessity, matching)?);
                }
                let f = link.aggregation_family();
                families.push(f);
                if relevances.is_empty() {
                    paths.push(CertaintyInterval::UNKNOWN);
                } else {
                    paths.push(aggregate(f, &relevances, policy).map_err(|e| conflict(goal, e))?.interval);
                }
            }
            let aggregated = match families.iter().copied().min() {
                Some(f) => Some(aggregate(f, &paths, policy).map_err(|e| conflict(goal, e))?.interval),
                None => paths.first().copied(),
            };
            let value = match (world.fact(goal), aggregated) {
                (Some(fact), Some(d)) => consensus(&[fact.effective, d], policy).map_err(|e| conflict(goal, e))?.interval,
                (Some(fact), None) => fact.effective,
                (None, Some(d)) => d,
                (None, None) => CertaintyInterval::UNKNOWN,
            };
            values.insert(goal.clone(), value);
        }
    }
    Ok(values)
}

fn conflict(goal: &Atom, e: CalculusError) -> InferenceError {
    match e {
        CalculusError::EvidenceConflict { lower, upper } => {
            InferenceError::EvidenceConflict { goal: goal.clone(), paths: Vec::new(), lower, upper }
        }
        CalculusError::SourceConflict { lower, upper } => {
            InferenceError::SourceConflict { goal: goal.clone(), sources: Vec::new(), lower, upper }
        }
        other => other.into(),
    }
}

/// Renders a proof as an indented tree. Sub-goals proved once and used
/// several times are expanded at their first occurrence only.
pub fn explain(result: &QueryResult) -> String {
    let mut out = String::new();
    let head = if result.negated { format!("(not {})", result.goal) } else { result.goal.to_string() };
    let _ = writeln!(out, "{head} {:.4}", result.interval);
    let mut seen = HashSet::new();
    render_node(&result.proof, 1, &mut seen, &mut out);
    out
}

fn render_node(node: &ProofNode, depth: usize, seen: &mut HashSet<Atom>, out: &mut String) {
    let indent = "  ".repeat(depth);
    let family = node.family.map(|f| format!(" {f}")).unwrap_or_default();
    let strength = node
        .strength
        .map(|s| format!(" s={} n={}", s.sufficiency, s.necessity))
        .unwrap_or_default();
    let line = match node.kind {
        NodeKind::Fact if node.provenance == "unknown" => format!("unknown {} {:.4}", node.goal, node.result),
        NodeKind::Fact => format!("fact {} {:.4} from {}", node.goal, node.result, node.provenance),
        NodeKind::RuleInstance | NodeKind::CaseInstance => {
            let label = if node.kind == NodeKind::RuleInstance { "rule" } else { "case" };
            format!(
                "{label} {}{family}{strength} premise {:.4} detached {:.4}",
                node.provenance,
                node.premise.unwrap_or_default(),
                node.result
            )
        }
        NodeKind::Precedent => {
            format!("precedent {} from {}{family} -> {:.4}", node.goal, node.provenance, node.result)
        }
        NodeKind::Aggregation => {
            let agg = node.aggregated.map(|d| format!(" paths {d:.4}")).unwrap_or_default();
            format!("aggregate {}{family}{agg} -> {:.4}", node.goal, node.result)
        }
    };
    let _ = write!(out, "{indent}{line}");
    if node.kind == NodeKind::Aggregation && !node.children.is_empty() && !seen.insert(node.goal.clone()) {
        let _ = writeln!(out, " (see above)");
        return;
    }
    let _ = writeln!(out);
    for c in &node.children {
        render_node(c, depth + 1, seen, out);
    }
}
