//! Belief revision by dependency tracking.
//!
//! Every aggregation node of a proof becomes a [`DependencyRecord`] listing
//! the facts, rules and cases beneath it. A fact update invalidates exactly
//! the records that mention the atom; recomputation re-proves those while
//! reusing the proofs of everything left valid.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use serde::Serialize;

use crate::calculus::{CertaintyInterval, ConflictPolicy};
use crate::engine::{NodeKind, ProofNode, QueryConfig, QueryResult, Session};
use crate::error::InferenceError;
use crate::knowledge::{Atom, KnowledgeBase, KnowledgeError, World};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "id")]
pub enum Supporter {
    Fact(Atom),
    Rule(String),
    Case(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DependencyRecord {
    pub conclusion: Atom,
    /// Fact leaves, rule instances and case instances of the proof.
    pub supporters: BTreeSet<Supporter>,
    /// Atoms absent from the world when the proof was built whose arrival
    /// would change it: unknown leaves, the goal itself, screened contexts.
    pub watched: BTreeSet<Atom>,
    pub cached: CertaintyInterval,
    pub epoch: u64,
}

impl DependencyRecord {
    pub fn depends_on(&self, atom: &Atom) -> bool {
        self.watched.contains(atom) || self.supporters.contains(&Supporter::Fact(atom.clone()))
    }
}

fn collect(node: &ProofNode, supporters: &mut BTreeSet<Supporter>, watched: &mut BTreeSet<Atom>) {
    match node.kind {
        NodeKind::Fact if node.provenance == "unknown" => {
            watched.insert(node.goal.clone());
        }
        NodeKind::Fact => {
            supporters.insert(Supporter::Fact(node.goal.clone()));
        }
        NodeKind::RuleInstance => {
            supporters.insert(Supporter::Rule(node.provenance.clone()));
        }
        NodeKind::CaseInstance => {
            supporters.insert(Supporter::Case(node.provenance.clone()));
        }
        NodeKind::Aggregation | NodeKind::Precedent => {}
    }
    watched.extend(node.watched.iter().cloned());
    for c in &node.children {
        collect(c, supporters, watched);
    }
}

fn record(node: &ProofNode, epoch: u64) -> DependencyRecord {
    let mut supporters = BTreeSet::new();
    let mut watched = BTreeSet::new();
    collect(node, &mut supporters, &mut watched);
    watched.retain(|a| !supporters.contains(&Supporter::Fact(a.clone())));
    DependencyRecord { conclusion: node.goal.clone(), supporters, watched, cached: node.result, epoch }
}

fn tracked_nodes(result: &QueryResult) -> Vec<Rc<ProofNode>> {
    let mut out: BTreeMap<Atom, Rc<ProofNode>> = BTreeMap::new();
    fn walk(node: &Rc<ProofNode>, out: &mut BTreeMap<Atom, Rc<ProofNode>>) {
        if node.kind == NodeKind::Aggregation && !out.contains_key(&node.goal) {
            out.insert(node.goal.clone(), Rc::clone(node));
        }
        for c in &node.children {
            walk(c, out);
        }
    }
    walk(&result.proof, &mut out);
    out.entry(result.goal.clone()).or_insert_with(|| Rc::clone(&result.proof));
    out.into_values().collect()
}

/// Dependency records for the query's goal and each derived sub-goal.
pub fn track(result: &QueryResult) -> Vec<DependencyRecord> {
    tracked_nodes(result).iter().map(|n| record(n, result.epoch)).collect()
}

#[derive(Debug, Clone)]
struct Entry {
    record: DependencyRecord,
    node: Rc<ProofNode>,
    valid: bool,
}

/// Cached conclusions kept consistent with one world across fact updates.
#[derive(Debug, Clone, Default)]
pub struct BeliefTracker {
    entries: BTreeMap<Atom, Entry>,
    /// World epoch at the last observed update or recomputation.
    seen_epoch: u64,
}

impl BeliefTracker {
    pub fn new(world: &World) -> Self {
        Self { entries: BTreeMap::new(), seen_epoch: world.epoch() }
    }

    pub fn records(&self) -> impl Iterator<Item = &DependencyRecord> {
        self.entries.values().map(|e| &e.record)
    }

    pub fn record(&self, conclusion: &Atom) -> Option<&DependencyRecord> {
        self.entries.get(conclusion).map(|e| &e.record)
    }

    /// Cached interval, served only if still valid and no update has bypassed
    /// the tracker since.
    pub fn cached(&self, conclusion: &Atom, world: &World) -> Option<CertaintyInterval> {
        if self.seen_epoch != world.epoch() {
            return None;
        }
        self.entries.get(conclusion).filter(|e| e.valid).map(|e| e.record.cached)
    }

    pub fn track(&mut self, result: &QueryResult) {
        for node in tracked_nodes(result) {
            let record = record(&node, result.epoch);
            self.entries.insert(node.goal.clone(), Entry { record, node, valid: true });
        }
        self.seen_epoch = result.epoch;
    }

    /// Proves `goal` and tracks the result.
    pub fn query(
        &mut self,
        kb: &KnowledgeBase,
        world: &World,
        goal: &Atom,
        config: &QueryConfig,
    ) -> Result<QueryResult, InferenceError> {
        let result = Session::new(kb, world, *config).with_memo(self.valid_memo()).prove(goal)?;
        self.track(&result);
        Ok(result)
    }

    /// Applies one source report and returns the conclusions it invalidates.
    /// An update that leaves the effective interval unchanged invalidates
    /// nothing.
    pub fn on_update(
        &mut self,
        world: &mut World,
        atom: &Atom,
        interval: CertaintyInterval,
        source: &str,
        policy: ConflictPolicy,
    ) -> Result<BTreeSet<Atom>, KnowledgeError> {
        let change = world.assert_evidence(atom, interval, source, policy)?;
        Ok(self.observe(world, atom, change.changed()))
    }

    /// Withdraws one source report; see [`BeliefTracker::on_update`].
    pub fn on_retract(
        &mut self,
        world: &mut World,
        atom: &Atom,
        source: &str,
        policy: ConflictPolicy,
    ) -> Result<BTreeSet<Atom>, KnowledgeError> {
        let change = world.retract_source(atom, source, policy)?;
        Ok(self.observe(world, atom, change.changed()))
    }

    fn observe(&mut self, world: &World, atom: &Atom, changed: bool) -> BTreeSet<Atom> {
        let mut invalidated = BTreeSet::new();
        if changed {
            for (goal, e) in self.entries.iter_mut() {
                if e.valid && e.record.depends_on(atom) {
                    e.valid = false;
                    invalidated.insert(goal.clone());
                }
            }
        }
        self.seen_epoch = world.epoch();
        invalidated
    }

    fn valid_memo(&self) -> HashMap<Atom, Rc<ProofNode>> {
        self.entries
            .iter()
            .filter(|(_, e)| e.valid)
            .map(|(g, e)| (g.clone(), Rc::clone(&e.node)))
            .collect()
    }

    /// Re-proves the invalidated conclusions, reusing the proofs of every
    /// conclusion still valid.
    pub fn recompute(
        &mut self,
        kb: &KnowledgeBase,
        world: &World,
        invalidated: &BTreeSet<Atom>,
        config: &QueryConfig,
    ) -> Result<BTreeMap<Atom, CertaintyInterval>, InferenceError> {
        let mut out = BTreeMap::new();
        if invalidated.is_empty() {
            return Ok(out);
        }
        let mut session = Session::new(kb, world, *config).with_memo(self.valid_memo());
        let mut results = Vec::new();
        for goal in invalidated {
            let r = session.prove(goal)?;
            out.insert(goal.clone(), r.interval);
            results.push(r);
        }
        for r in &results {
            self.track(r);
        }
        Ok(out)
    }
}
