//! Case-based support.
//!
//! Past cases are stored as rule templates over role variables, filed in a
//! hierarchical library. Matching a case against the current world is plain
//! premise evaluation: the substituted premises yield the match interval
//! `[N(p|d), P(p|d)]`, and detaching it through the case's sufficiency and
//! necessity gives the case's relevance. The relevances of all matching cases
//! are aggregated into a single precedent proof path.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::calculus::{aggregate, antecedent_eval, detach, CalculusError, CertaintyInterval, TNormFamily};
use crate::engine::{context_gate, QueryConfig};
use crate::error::InferenceError;
use crate::knowledge::{Atom, KnowledgeBase, TaxonomyPath, World};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseTemplate {
    pub id: String,
    pub path: TaxonomyPath,
    /// Declared role variables, without the `?`.
    pub roles: Vec<String>,
    pub context: Vec<Atom>,
    pub antecedents: Vec<Atom>,
    pub consequent: Atom,
    pub sufficiency: f64,
    pub necessity: f64,
    pub family: TNormFamily,
}

impl CaseTemplate {
    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.context.iter().chain(&self.antecedents).chain(std::iter::once(&self.consequent))
    }

    fn bindings(&self, world: &World) -> Result<BTreeMap<String, String>, InferenceError> {
        self.roles
            .iter()
            .map(|r| match world.roles.get(r) {
                Some(c) => Ok((r.clone(), c.clone())),
                None => Err(crate::knowledge::KnowledgeError::UnboundRole {
                    var: r.clone(),
                    atom: self.consequent.clone(),
                }
                .into()),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CaseLibrary {
    taxonomy: BTreeSet<TaxonomyPath>,
    templates: BTreeMap<String, CaseTemplate>,
}

impl CaseLibrary {
    /// Declares a path together with all of its ancestors.
    pub fn declare(&mut self, path: &TaxonomyPath) {
        self.taxonomy.extend(path.prefixes());
    }

    pub fn has_path(&self, path: &TaxonomyPath) -> bool {
        self.taxonomy.contains(path)
    }

    pub fn paths(&self) -> impl Iterator<Item = &TaxonomyPath> {
        self.taxonomy.iter()
    }

    /// Declared paths that are not an ancestor of another declared path.
    pub fn leaf_paths(&self) -> impl Iterator<Item = &TaxonomyPath> {
        self.taxonomy
            .iter()
            .filter(|p| !self.taxonomy.iter().any(|q| q != *p && p.contains(q)))
    }

    /// Files a template, returning any template it replaced.
    pub fn insert(&mut self, template: CaseTemplate) -> Option<CaseTemplate> {
        self.templates.insert(template.id.clone(), template)
    }

    pub fn get(&self, id: &str) -> Option<&CaseTemplate> {
        self.templates.get(id)
    }

    pub fn templates(&self) -> impl Iterator<Item = &CaseTemplate> {
        self.templates.values()
    }

    pub fn is_empty(&self) -> bool {
        self.taxonomy.is_empty() && self.templates.is_empty()
    }

    /// Templates filed at `path` or below it, ordered by path then identifier.
    pub fn under(&self, path: &TaxonomyPath) -> Vec<&CaseTemplate> {
        let mut found: Vec<&CaseTemplate> =
            self.templates.values().filter(|t| path.contains(&t.path)).collect();
        found.sort_by(|a, b| (&a.path, &a.id).cmp(&(&b.path, &b.id)));
        found
    }
}

/// Routes a goal predicate to a subtree of the case library.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecedentLink {
    pub predicate: String,
    /// The declared goal pattern; its predicate is `predicate`.
    pub atom: Atom,
    pub path: TaxonomyPath,
    /// Family used to aggregate case relevances; see [`PrecedentLink::aggregation_family`].
    pub family: Option<TNormFamily>,
}

/// Aggregation family of a precedent link that does not declare one.
pub const DEFAULT_PRECEDENT_FAMILY: TNormFamily = TNormFamily::T2;

impl PrecedentLink {
    /// The declared family, or [`DEFAULT_PRECEDENT_FAMILY`]. Fixed per link so
    /// that which cases happen to match never changes how evidence combines.
    pub fn aggregation_family(&self) -> TNormFamily {
        self.family.unwrap_or(DEFAULT_PRECEDENT_FAMILY)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchResult {
    pub template: String,
    pub bindings: BTreeMap<String, String>,
    /// Substituted premises and their evaluated intervals.
    pub premises: Vec<(Atom, CertaintyInterval)>,
    /// Degree of matching `[N(p|d), P(p|d)]`.
    #[serde(rename = "match")]
    pub matching: CertaintyInterval,
    pub relevance: CertaintyInterval,
}

impl MatchResult {
    pub fn premise_profile(&self) -> Vec<CertaintyInterval> {
        self.premises.iter().map(|(_, iv)| *iv).collect()
    }
}

/// Templates under `path` split by the context screen, plus every ground
/// context atom consulted while screening.
#[derive(Debug, Default)]
pub struct Retrieval<'kb> {
    pub selected: Vec<&'kb CaseTemplate>,
    pub screened_out: Vec<&'kb CaseTemplate>,
    pub consulted: Vec<Atom>,
    pub diagnostics: Vec<String>,
}

pub(crate) fn retrieve_screened<'kb>(
    library: &'kb CaseLibrary,
    path: &TaxonomyPath,
    world: &World,
    config: &QueryConfig,
) -> Result<Retrieval<'kb>, InferenceError> {
    if !library.has_path(path) {
        return Err(InferenceError::UnknownPath(path.clone()));
    }
    let mut out = Retrieval::default();
    for template in library.under(path) {
        match context_gate(&template.context, world, config.context_threshold) {
            Ok(gate) => {
                out.consulted.extend(gate.atoms);
                if gate.active {
                    out.selected.push(template);
                } else {
                    out.screened_out.push(template);
                }
            }
            Err(e) => {
                out.diagnostics.push(format!("case {} skipped: {e}", template.id));
                out.screened_out.push(template);
            }
        }
    }
    Ok(out)
}

/// Templates at or below `path` whose context passes the screen.
pub fn retrieve<'kb>(
    library: &'kb CaseLibrary,
    path: &TaxonomyPath,
    world: &World,
    config: &QueryConfig,
) -> Result<Vec<&'kb CaseTemplate>, InferenceError> {
    retrieve_screened(library, path, world, config).map(|r| r.selected)
}

/// Instantiates `template` to the world's roles and evaluates its premises
/// with `evaluate`, which may derive them through the engine.
pub fn match_case(
    template: &CaseTemplate,
    world: &World,
    mut evaluate: impl FnMut(&Atom) -> Result<CertaintyInterval, InferenceError>,
) -> Result<MatchResult, InferenceError> {
    let bindings = template.bindings(world)?;
    let premises = template
        .antecedents
        .iter()
        .map(|a| a.substitute(&bindings).map_err(InferenceError::from))
        .collect::<Result<Vec<Atom>, _>>()?;
    let mut evaluated = Vec::with_capacity(premises.len());
    for p in premises {
        let iv = evaluate(&p)?;
        evaluated.push((p, iv));
    }
    let profile: Vec<CertaintyInterval> = evaluated.iter().map(|(_, iv)| *iv).collect();
    let matching = antecedent_eval(template.family, &profile)?;
    let relevance = detach(template.family, template.sufficiency, template.necessity, matching)?;
    Ok(MatchResult {
        template: template.id.clone(),
        bindings,
        premises: evaluated,
        matching,
        relevance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrecedentSupport {
    pub interval: CertaintyInterval,
    /// Family the relevances were aggregated with.
    pub family: TNormFamily,
    pub matches: Vec<MatchResult>,
    /// Ground context atoms consulted while screening templates.
    pub consulted: Vec<Atom>,
    pub diagnostics: Vec<String>,
}

/// Aggregated relevance of every retrieved case concluding `goal`.
pub fn precedent_support(
    kb: &KnowledgeBase,
    world: &World,
    goal: &Atom,
    config: &QueryConfig,
    mut evaluate: impl FnMut(&Atom) -> Result<CertaintyInterval, InferenceError>,
) -> Result<PrecedentSupport, InferenceError> {
    let link = kb
        .precedents
        .get(&goal.predicate)
        .ok_or_else(|| InferenceError::NoPrecedentLink(goal.predicate.clone()))?;
    let retrieval = retrieve_screened(&kb.library, &link.path, world, config)?;
    let mut diagnostics = retrieval.diagnostics;
    let mut matches = Vec::new();
    for template in retrieval.selected {
        let concludes = template
            .bindings(world)
            .and_then(|b| template.consequent.substitute(&b).map_err(InferenceError::from));
        match concludes {
            Ok(c) if &c == goal => {}
            Ok(_) => continue,
            Err(e) => {
                diagnostics.push(format!("case {} skipped: {e}", template.id));
                continue;
            }
        }
        match match_case(template, world, &mut evaluate) {
            Ok(m) => matches.push(m),
            Err(e @ InferenceError::Knowledge(_)) => {
                diagnostics.push(format!("case {} skipped: {e}", template.id));
            }
            Err(e) => return Err(e),
        }
    }
    let family = link.aggregation_family();
    let interval = if matches.is_empty() {
        diagnostics.push(format!("no precedent for {goal} under {}", link.path));
        CertaintyInterval::UNKNOWN
    } else {
        let relevances: Vec<CertaintyInterval> = matches.iter().map(|m| m.relevance).collect();
        let fused = aggregate(family, &relevances, config.conflict_policy).map_err(|e| match e {
            CalculusError::EvidenceConflict { lower, upper } => InferenceError::EvidenceConflict {
                goal: goal.clone(),
                paths: matches.iter().map(|m| format!("case {}", m.template)).collect(),
                lower,
                upper,
            },
            other => other.into(),
        })?;
        if let Some((l, u)) = fused.conflict {
            diagnostics.push(format!(
                "conflicting precedents for {goal} ([{l}, {u}]); using [0, 1]"
            ));
        }
        fused.interval
    };
    Ok(PrecedentSupport {
        interval,
        family,
        matches,
        consulted: retrieval.consulted,
        diagnostics,
    })
}

/// Similarity of two premise profiles: one minus the mean absolute difference
/// of interval midpoints.
pub fn case_similarity(a: &[CertaintyInterval], b: &[CertaintyInterval]) -> Result<f64, InferenceError> {
    if a.len() != b.len() || a.is_empty() {
        return Err(InferenceError::ShapeMismatch { left: a.len(), right: b.len() });
    }
    let distance: f64 =
        a.iter().zip(b).map(|(x, y)| (x.midpoint() - y.midpoint()).abs()).sum::<f64>() / a.len() as f64;
    Ok(crate::calculus::similarity_from_distance(distance.min(1.0))?)
}
