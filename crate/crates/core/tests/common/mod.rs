//! Random knowledge bases for the property and acceptance suites.
#![allow(dead_code)]

use possum::calculus::{CertaintyInterval, ConflictPolicy, TNormFamily};
use possum::cbr::{CaseTemplate, PrecedentLink};
use possum::knowledge::{Atom, KnowledgeBase, Rule, TaxonomyPath, Term, World};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub predicates: usize,
    pub rules: usize,
    /// s = n = 1 and every fact crisp.
    pub crisp: bool,
    /// Force n = 0 on rules and cases.
    pub no_necessity: bool,
    /// Probability that a derived predicate also carries a stored fact.
    pub derived_facts: f64,
    /// Probability that a rule is gated by a context atom.
    pub contexts: f64,
    /// Number of cases routed through one precedent link.
    pub cases: usize,
    /// Use one-place atoms over the role variable `?x` instead of 0-ary atoms.
    pub roles: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Self {
            predicates: 12,
            rules: 20,
            crisp: false,
            no_necessity: false,
            derived_facts: 0.2,
            contexts: 0.0,
            cases: 0,
            roles: false,
        }
    }
}

pub fn pred(i: usize) -> String {
    format!("p{i}")
}

pub fn atom(shape: &Shape, predicate: &str) -> Atom {
    if shape.roles {
        Atom::new(predicate, vec![Term::Var("x".into())])
    } else {
        Atom::new(predicate, vec![])
    }
}

/// The world's ground version of `atom(shape, predicate)`.
pub fn ground(shape: &Shape, predicate: &str) -> Atom {
    if shape.roles {
        Atom::ground(predicate, &["a"])
    } else {
        Atom::ground::<&str>(predicate, &[])
    }
}

pub fn family(rng: &mut StdRng) -> TNormFamily {
    *TNormFamily::ALL.choose(rng).unwrap()
}

fn grid(rng: &mut StdRng) -> f64 {
    (rng.gen_range(0..=20) as f64) / 20.0
}

pub fn interval(rng: &mut StdRng) -> CertaintyInterval {
    let a = grid(rng);
    let b = grid(rng);
    CertaintyInterval::new(a.min(b), a.max(b)).unwrap()
}

pub fn crisp(rng: &mut StdRng) -> CertaintyInterval {
    if rng.gen_bool(0.5) {
        CertaintyInterval::TRUE
    } else {
        CertaintyInterval::FALSE
    }
}

pub const CONTEXTS: usize = 3;

pub fn context_pred(i: usize) -> String {
    format!("c{i}")
}

/// The predicate targeted by the precedent link, when cases are generated.
pub fn linked(shape: &Shape) -> Option<String> {
    (shape.cases > 0).then(|| pred(shape.predicates - 1))
}

/// An acyclic knowledge base: every rule concludes a predicate with a higher
/// index than all of its antecedents.
pub fn random_kb(rng: &mut StdRng, shape: &Shape) -> (KnowledgeBase, World) {
    let n = shape.predicates;
    let mut kb = KnowledgeBase::default();
    let mut derived = vec![false; n];
    let strength = |rng: &mut StdRng| {
        if shape.crisp {
            (1.0, 1.0)
        } else {
            let s = grid(rng);
            let nec = if shape.no_necessity { 0.0 } else { grid(rng) };
            (s, nec)
        }
    };
    for r in 0..shape.rules {
        let c = rng.gen_range(1..n);
        derived[c] = true;
        let k = rng.gen_range(1..=3.min(c));
        let mut ants: Vec<usize> = (0..c).collect();
        ants.shuffle(rng);
        ants.truncate(k);
        let (s, nec) = strength(rng);
        let context = if rng.gen_bool(shape.contexts) {
            vec![atom(shape, &context_pred(rng.gen_range(0..CONTEXTS)))]
        } else {
            vec![]
        };
        let rule = Rule {
            id: format!("r{r:02}"),
            class: TaxonomyPath::default(),
            context,
            antecedents: ants.iter().map(|&i| atom(shape, &pred(i))).collect(),
            consequent: atom(shape, &pred(c)),
            sufficiency: s,
            necessity: nec,
            family: family(rng),
        };
        kb.rules.insert(rule.id.clone(), rule);
    }
    if let Some(target) = linked(shape) {
        derived[n - 1] = true;
        for leaf in ["lib/a", "lib/b/c"] {
            kb.library.declare(&TaxonomyPath::parse(leaf));
        }
        for i in 0..shape.cases {
            let k = rng.gen_range(1..=3);
            let mut ants: Vec<usize> = (0..n - 1).collect();
            ants.shuffle(rng);
            ants.truncate(k);
            let (s, nec) = strength(rng);
            let context = if rng.gen_bool(shape.contexts) {
                vec![atom(shape, &context_pred(rng.gen_range(0..CONTEXTS)))]
            } else {
                vec![]
            };
            kb.library.insert(CaseTemplate {
                id: format!("case{i}"),
                path: TaxonomyPath::parse(if rng.gen_bool(0.5) { "lib/a" } else { "lib/b/c" }),
                roles: if shape.roles { vec!["x".into()] } else { vec![] },
                context,
                antecedents: ants.iter().map(|&j| atom(shape, &pred(j))).collect(),
                consequent: atom(shape, &target),
                sufficiency: s,
                necessity: nec,
                family: family(rng),
            });
        }
        kb.precedents.insert(
            target.clone(),
            PrecedentLink {
                predicate: target.clone(),
                atom: atom(shape, &target),
                path: TaxonomyPath::parse("lib"),
                family: if rng.gen_bool(0.5) { Some(family(rng)) } else { None },
            },
        );
    }

    let mut world = World::new("w");
    if shape.roles {
        world.bind("x", "a");
    }
    let policy = ConflictPolicy::Lenient;
    for (i, &is_derived) in derived.iter().enumerate() {
        let p = if is_derived { shape.derived_facts } else if shape.crisp { 1.0 } else { 0.8 };
        if rng.gen_bool(p) {
            let iv = if shape.crisp { crisp(rng) } else { interval(rng) };
            world.assert_evidence(&ground(shape, &pred(i)), iv, "gen", policy).unwrap();
        }
    }
    for i in 0..CONTEXTS {
        let iv = interval(rng);
        world.assert_evidence(&ground(shape, &context_pred(i)), iv, "gen", policy).unwrap();
    }
    (kb, world)
}

/// Ground goals concluded by some rule or precedent link.
pub fn derivable(kb: &KnowledgeBase, world: &World) -> Vec<Atom> {
    let mut goals: Vec<Atom> = kb
        .rules
        .values()
        .map(|r| world.substitute(&r.consequent).unwrap())
        .chain(kb.precedents.values().map(|l| world.substitute(&l.atom).unwrap()))
        .collect();
    goals.sort();
    goals.dedup();
    goals
}
