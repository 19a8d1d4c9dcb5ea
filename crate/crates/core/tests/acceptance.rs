//! Acceptance suite: one line of PASS/FAIL per criterion.
//!
//! Runs as a plain binary (no libtest harness) so the summary is always
//! printed. Exits non-zero if any criterion fails.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;

use common::{derivable, pred, random_kb, Shape};
use possum::calculus::{
    aggregate, complement, similarity_from_distance, tconorm, tnorm, transitivity_bound, CertaintyInterval,
    ConflictPolicy, TNormFamily,
};
use possum::dsl::{parse_kb, render_kb};
use possum::engine::{forward_saturate, prove, NodeKind, ProofNode, QueryConfig};
use possum::knowledge::{Atom, KnowledgeBase, TaxonomyPath, World};
use possum::revision::BeliefTracker;
use possum::{demo, InferenceError};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;

fn grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

fn t(f: TNormFamily, a: f64, b: f64) -> f64 {
    tnorm(f, &[a, b]).unwrap()
}

fn s(f: TNormFamily, a: f64, b: f64) -> f64 {
    tconorm(f, &[a, b]).unwrap()
}

/// Closed forms of the five binary T-norms, written out independently.
fn oracle_tnorm(f: TNormFamily, a: f64, b: f64) -> f64 {
    match f {
        TNormFamily::T1 => (a + b - 1.0).max(0.0),
        TNormFamily::T1_5 => {
            let r = a.sqrt() + b.sqrt() - 1.0;
            if r > 0.0 {
                r * r
            } else {
                0.0
            }
        }
        TNormFamily::T2 => a * b,
        TNormFamily::T2_5 => {
            if a == 0.0 || b == 0.0 {
                0.0
            } else {
                1.0 / (1.0 / a + 1.0 / b - 1.0)
            }
        }
        TNormFamily::T3 => a.min(b),
    }
}

fn criterion_1() -> Outcome {
    const TOL: f64 = 1e-9;
    let g = grid();
    let mut checks = 0usize;
    for f in TNormFamily::ALL {
        for &a in &g {
            for &b in &g {
                let ab = t(f, a, b);
                if (ab - oracle_tnorm(f, a, b)).abs() > TOL {
                    return Err(format!("{f}({a},{b}) = {ab}, closed form {}", oracle_tnorm(f, a, b)));
                }
                if (ab - t(f, b, a)).abs() > TOL {
                    return Err(format!("{f} not commutative at ({a},{b})"));
                }
                if (t(f, a, 1.0) - a).abs() > TOL {
                    return Err(format!("{f}({a},1) != {a}"));
                }
                for &a2 in g.iter().filter(|&&x| x >= a) {
                    if t(f, a, b) > t(f, a2, b) + TOL {
                        return Err(format!("{f} not monotone: ({a},{b}) vs ({a2},{b})"));
                    }
                }
                for &c in &g {
                    let left = t(f, t(f, a, b), c);
                    let right = t(f, a, t(f, b, c));
                    if (left - right).abs() > TOL {
                        return Err(format!("{f} not associative at ({a},{b},{c}): {left} vs {right}"));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} associativity triples plus commutativity, identity, monotonicity"))
}

fn criterion_2() -> Outcome {
    const TOL: f64 = 1e-9;
    let g = grid();
    let mut checks = 0usize;
    for &a in &g {
        for &b in &g {
            let lo = (a + b - 1.0).max(0.0);
            let hi = a.min(b);
            let values: Vec<f64> = TNormFamily::ALL.iter().map(|&f| t(f, a, b)).collect();
            for (f, v) in TNormFamily::ALL.iter().zip(&values) {
                if *v < lo - TOL || *v > hi + TOL {
                    return Err(format!("{f}({a},{b}) = {v} outside [{lo}, {hi}]"));
                }
            }
            for w in values.windows(2) {
                if w[0] > w[1] + TOL {
                    return Err(format!("ordering violated at ({a},{b}): {values:?}"));
                }
            }
            checks += 1;
        }
    }
    Ok(format!("{checks} grid points, five families"))
}

fn criterion_3() -> Outcome {
    const TOL: f64 = 1e-12;
    let g = grid();
    for f in TNormFamily::ALL {
        for &a in &g {
            for &b in &g {
                let dual = 1.0 - t(f, 1.0 - a, 1.0 - b);
                if (s(f, a, b) - dual).abs() > TOL {
                    return Err(format!("S_{f}({a},{b}) = {} but dual is {dual}", s(f, a, b)));
                }
            }
            if (s(f, a, 0.0) - a).abs() > TOL || (s(f, a, 1.0) - 1.0).abs() > TOL {
                return Err(format!("S_{f} boundary fails at {a}"));
            }
        }
    }
    for &l in &g {
        for &u in g.iter().filter(|&&u| u >= l) {
            let x = CertaintyInterval::new(l, u).unwrap();
            let back = complement(complement(x));
            if (back.lower() - l).abs() > TOL || (back.upper() - u).abs() > TOL {
                return Err(format!("complement not involutive on {x}"));
            }
            if (x.upper() - (1.0 - complement(x).lower())).abs() > TOL {
                return Err(format!("U(A) != 1 - L(not A) on {x}"));
            }
        }
    }
    Ok("duality, conorm boundaries and complement involution on the grid".into())
}

/// Boolean value of a goal in the crisp reduction, or a detected conflict.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Crisp {
    Value(bool),
    Unknown,
    Conflict,
}

/// Independent boolean backward chainer: a rule with s = n = 1 forces its
/// consequent to equal the conjunction of its antecedents; disagreeing rules
/// or a stored fact contradicting the derivation are conflicts.
fn boolean_oracle(
    rules: &[(Vec<String>, String)],
    facts: &HashMap<String, bool>,
    goal: &str,
    memo: &mut HashMap<String, Crisp>,
) -> Crisp {
    if let Some(v) = memo.get(goal) {
        return *v;
    }
    let mut derived: Vec<bool> = Vec::new();
    let mut conflict = false;
    let mut unknown = false;
    for (ants, _) in rules.iter().filter(|(_, c)| c == goal) {
        let mut all = true;
        for a in ants {
            match boolean_oracle(rules, facts, a, memo) {
                Crisp::Value(v) => all &= v,
                Crisp::Unknown => unknown = true,
                Crisp::Conflict => conflict = true,
            }
        }
        derived.push(all);
    }
    let result = if conflict {
        Crisp::Conflict
    } else if unknown {
        Crisp::Unknown
    } else if derived.is_empty() {
        facts.get(goal).map_or(Crisp::Unknown, |&v| Crisp::Value(v))
    } else if derived.iter().any(|&d| d != derived[0]) {
        Crisp::Conflict
    } else {
        match facts.get(goal) {
            Some(&f) if f != derived[0] => Crisp::Conflict,
            _ => Crisp::Value(derived[0]),
        }
    };
    memo.insert(goal.to_string(), result);
    result
}

fn criterion_4() -> Outcome {
    let mut rng = StdRng::seed_from_u64(4);
    let cfg = QueryConfig::default();
    let (mut goals, mut conflicts) = (0usize, 0usize);
    for kb_index in 0..200 {
        let shape = Shape {
            predicates: rng.gen_range(4..=16),
            rules: rng.gen_range(1..=30),
            crisp: true,
            derived_facts: 0.15,
            ..Shape::default()
        };
        let (kb, world) = random_kb(&mut rng, &shape);
        let rules: Vec<(Vec<String>, String)> = kb
            .rules
            .values()
            .map(|r| (r.antecedents.iter().map(|a| a.predicate.clone()).collect(), r.consequent.predicate.clone()))
            .collect();
        let facts: HashMap<String, bool> = world
            .facts()
            .map(|f| (f.atom.predicate.clone(), f.effective == CertaintyInterval::TRUE))
            .collect();
        let mut memo = HashMap::new();
        for i in 0..shape.predicates {
            let goal = Atom::new(pred(i), vec![]);
            let expected = boolean_oracle(&rules, &facts, &pred(i), &mut memo);
            let got = prove(&kb, &world, &goal, &cfg);
            let ok = match (expected, &got) {
                (Crisp::Value(v), Ok(r)) => {
                    r.interval == if v { CertaintyInterval::TRUE } else { CertaintyInterval::FALSE }
                }
                (Crisp::Unknown, Ok(r)) => r.interval == CertaintyInterval::UNKNOWN,
                (Crisp::Conflict, Err(e)) => e.is_conflict(),
                _ => false,
            };
            if !ok {
                return Err(format!("kb #{kb_index}, goal {goal}: oracle {expected:?}, engine {got:?}"));
            }
            goals += 1;
            conflicts += usize::from(expected == Crisp::Conflict);
        }
    }
    Ok(format!("200 KBs, {goals} goals ({conflicts} strict conflicts) match the boolean oracle exactly"))
}

fn criterion_5() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    for f in TNormFamily::ALL {
        for _ in 0..200 {
            let a: f64 = rng.gen();
            let b: f64 = rng.gen_range(a..=1.0);
            let x = CertaintyInterval::new(a, b).unwrap();
            let got = aggregate(f, &[x], ConflictPolicy::Strict).map_err(|e| e.to_string())?;
            if got.interval != x {
                return Err(format!("{f}: aggregate([{x}]) = {}", got.interval));
            }
        }
        let paths = [CertaintyInterval::new(0.9, 1.0).unwrap(), CertaintyInterval::new(0.0, 0.1).unwrap()];
        if aggregate(f, &paths, ConflictPolicy::Strict).is_ok() {
            return Err(format!("{f}: strict aggregation of [0.9,1.0] and [0.0,0.1] did not raise"));
        }
        let lenient = aggregate(f, &paths, ConflictPolicy::Lenient).map_err(|e| e.to_string())?;
        if lenient.interval != CertaintyInterval::UNKNOWN || lenient.conflict.is_none() {
            return Err(format!("{f}: lenient aggregation gave {}", lenient.interval));
        }
    }
    Ok("m=1 identity exact for all families; constructed conflict raises / yields [0,1]".into())
}

type Matrix = [[f64; 8]; 8];

fn random_distances(rng: &mut StdRng) -> Matrix {
    let pts: Vec<[f64; 3]> = (0..8).map(|_| [rng.gen(), rng.gen(), rng.gen()]).collect();
    let mut d = [[0.0; 8]; 8];
    for i in 0..8 {
        for j in 0..8 {
            d[i][j] = (0..3).map(|k| (pts[i][k] - pts[j][k]).powi(2)).sum::<f64>().sqrt();
        }
    }
    d
}

fn normalize(d: &mut Matrix) {
    let max = d.iter().flatten().copied().fold(0.0, f64::max);
    for v in d.iter_mut().flatten() {
        *v /= max;
    }
}

/// Single-linkage clustering: the cophenetic distance is the smallest
/// achievable largest hop between two points.
fn single_linkage(d: &Matrix) -> Matrix {
    let mut u = *d;
    for k in 0..8 {
        for i in 0..8 {
            for j in 0..8 {
                u[i][j] = u[i][j].min(u[i][k].max(u[k][j]));
            }
        }
    }
    u
}

fn check_transitivity(family: TNormFamily, d: &Matrix) -> Result<usize, String> {
    let sim = |i: usize, j: usize| similarity_from_distance(d[i][j]).unwrap();
    let mut n = 0;
    for a in 0..8 {
        for b in 0..8 {
            for c in 0..8 {
                let bound = transitivity_bound(family, sim(a, c), sim(c, b)).unwrap();
                if sim(a, b) < bound - 1e-12 {
                    return Err(format!("{family}: S({a},{b}) = {} below bound {bound}", sim(a, b)));
                }
                n += 1;
            }
        }
    }
    Ok(n)
}

fn criterion_6() -> Outcome {
    let mut rng = StdRng::seed_from_u64(6);
    let mut triples = 0;
    for _ in 0..100 {
        let mut d = random_distances(&mut rng);
        normalize(&mut d);
        triples += check_transitivity(TNormFamily::T1, &d)?;
    }
    for _ in 0..100 {
        let mut u = single_linkage(&random_distances(&mut rng));
        normalize(&mut u);
        for a in 0..8 {
            for b in 0..8 {
                for c in 0..8 {
                    if u[a][b] > u[a][c].max(u[c][b]) + 1e-12 {
                        return Err("generated distance is not an ultrametric".into());
                    }
                }
            }
        }
        triples += check_transitivity(TNormFamily::T3, &u)?;
    }
    Ok(format!("{triples} triples: metrics satisfy the T1 bound, ultrametrics the T3 bound"))
}

fn criterion_7() -> Outcome {
    let mut rng = StdRng::seed_from_u64(7);
    let shape = Shape { predicates: 24, rules: 50, contexts: 0.3, cases: 4, roles: true, ..Shape::default() };
    let (kb, mut world) = random_kb(&mut rng, &shape);
    let cfg = QueryConfig { conflict_policy: ConflictPolicy::Lenient, ..QueryConfig::default() };
    let goals = derivable(&kb, &world);
    let mut tracker = BeliefTracker::new(&world);
    for g in &goals {
        tracker.query(&kb, &world, g, &cfg).map_err(|e| e.to_string())?;
    }
    let mut touchable: Vec<String> = (0..shape.predicates).map(pred).collect();
    touchable.extend((0..common::CONTEXTS).map(common::context_pred));
    let (mut comparisons, mut invalidations, mut reproved) = (0usize, 0usize, 0usize);
    for step in 0..100 {
        let p = &touchable[rng.gen_range(0..touchable.len())];
        let atom = common::ground(&shape, p);
        let source = ["gen", "s1", "s2"][rng.gen_range(0..3)];
        let invalid = if rng.gen_bool(0.15) {
            tracker.on_retract(&mut world, &atom, source, cfg.conflict_policy)
        } else {
            let iv = common::interval(&mut rng);
            tracker.on_update(&mut world, &atom, iv, source, cfg.conflict_policy)
        }
        .map_err(|e| e.to_string())?;
        invalidations += invalid.len();
        let revised = tracker.recompute(&kb, &world, &invalid, &cfg).map_err(|e| e.to_string())?;
        reproved += revised.len();
        for g in &goals {
            let fresh = prove(&kb, &world, g, &cfg).map_err(|e| e.to_string())?.interval;
            let cached = tracker.cached(g, &world);
            if cached != Some(fresh) {
                return Err(format!("step {step}: {g} incremental {cached:?}, from scratch {fresh}"));
            }
            if let Some(r) = revised.get(g) {
                if *r != fresh {
                    return Err(format!("step {step}: recompute gave {r} for {g}, fresh {fresh}"));
                }
            }
            comparisons += 1;
        }
    }
    Ok(format!(
        "{} rules, 100 updates, {comparisons} comparisons equal ({invalidations} invalidations, {reproved} re-proofs)",
        kb.rules.len()
    ))
}

fn close(a: CertaintyInterval, l: f64, u: f64) -> bool {
    (a.lower() - l).abs() <= 1e-9 && (a.upper() - u).abs() <= 1e-9
}

/// The demo's final interval, derived by hand from the bundled files.
fn demo_oracle() -> (f64, f64) {
    let s2 = |xs: &[f64]| 1.0 - xs.iter().map(|x| 1.0 - x).product::<f64>();
    // hhi > 1800: two sources [0.6,0.8] and [0.5,0.9] fuse to [0.6,0.8]
    let (hl, hu) = (0.6_f64.max(0.5), 0.8_f64.min(0.9));
    // strict T3 rules with s = n = 1 pass premises through
    let (high_l, _high_u) = (hl.min(1.0), 1.0 - (1.0_f64 - hu).min(1.0));
    let (mod_l, _) = (0.2_f64, 0.4_f64);
    // large-merged-national-market: T2 paths [0.9*high, 1] and [0.6*mod, 1]
    let lmnm_l = s2(&[0.9 * high_l, 0.6 * mod_l]);
    let lmnm_u = 1.0_f64;
    // brown-shoe, T3, s = 0.8, n = 0.5, premises lmnm and local dominance [0.7,0.9]
    let (b_l, b_u) = (lmnm_l.min(0.7), lmnm_u.min(0.9));
    let brown = (0.8_f64.min(b_l), 1.0 - 0.5_f64.min(1.0 - b_u));
    // mobil-marathon, T2, s = 0.85, n = 0.3, premises industry [0.9,1], lmnm, local
    let (m_l, m_u) = (0.9 * lmnm_l * 0.7, 1.0 * lmnm_u * 0.9);
    let mobil = (0.85 * m_l, 1.0 - 0.3 * (1.0 - m_u));
    // pabst, T2, s = 0.7, n = 0.2, premises lmnm and regional dominance [0.5,0.8]
    let (p_l, p_u) = (lmnm_l * 0.5, lmnm_u * 0.8);
    let pabst = (0.7 * p_l, 1.0 - 0.2 * (1.0 - p_u));
    // precedent aggregation under T2
    let sim_l = s2(&[brown.0, mobil.0, pabst.0]);
    let sim_u = 1.0 - s2(&[1.0 - brown.1, 1.0 - mobil.1, 1.0 - pabst.1]);
    // prior-precedent rule: T2, s = 0.9, n = 0.2
    let r1 = (0.9 * sim_l, 1.0 - 0.2 * (1.0 - sim_u));
    // political-lobby rule: T2, s = 0.75, n = 0, lobby [0.8,1]; n = 0 leaves U = 1
    let r2 = (0.75 * 0.8, 1.0);
    (s2(&[r1.0, r2.0]), 1.0 - s2(&[1.0 - r1.1, 1.0 - r2.1]))
}

fn criterion_8() -> Outcome {
    let kb = demo::knowledge_base();
    let world = demo::world();
    let goal = Atom::ground("anti-trust-success", &["Mobil", "Marathon"]);
    let r = prove(&kb, &world, &goal, &QueryConfig::default()).map_err(|e| e.to_string())?;
    let root = &r.proof;
    let rule_children: Vec<&ProofNode> =
        root.children.iter().filter(|c| c.kind == NodeKind::RuleInstance).map(|c| c.as_ref()).collect();
    let direct = rule_children
        .iter()
        .find(|c| c.provenance == "political-lobby" && c.children.iter().all(|g| g.kind == NodeKind::Fact))
        .ok_or("no direct rule support from political-lobby")?;
    let mut precedents = Vec::new();
    root.walk(&mut |n| {
        if n.kind == NodeKind::Precedent {
            precedents.push(n);
        }
    });
    let precedent = precedents.first().ok_or("no precedent node")?;
    let cases: BTreeSet<&str> = precedent
        .children
        .iter()
        .filter(|c| c.kind == NodeKind::CaseInstance)
        .map(|c| c.provenance.as_str())
        .collect();
    if cases.len() < 2 || !cases.contains("brown-shoe") || !cases.contains("pabst") {
        return Err(format!("precedent expands to {cases:?}"));
    }
    r.proof.audit(ConflictPolicy::Strict)?;
    let (l, u) = demo_oracle();
    if !close(r.interval, l, u) {
        return Err(format!("engine {} vs oracle [{l}, {u}]", r.interval));
    }
    Ok(format!(
        "{} = [{l:.6}, {u:.6}]; precedent -> {cases:?}, direct rule {} detached {:.4}",
        r.goal,
        direct.provenance,
        direct.result
    ))
}

fn forward_matches(kb: &KnowledgeBase, world: &World, cfg: &QueryConfig) -> Result<usize, String> {
    let forward = forward_saturate(kb, world, cfg).map_err(|e| e.to_string())?;
    for (goal, iv) in &forward {
        let back = prove(kb, world, goal, cfg).map_err(|e: InferenceError| e.to_string())?;
        if back.interval != *iv {
            return Err(format!("{goal}: forward {iv}, backward {}", back.interval));
        }
    }
    Ok(forward.len())
}

fn criterion_9() -> Outcome {
    let demo_goals = forward_matches(&demo::knowledge_base(), &demo::world(), &QueryConfig::default())?;
    if demo_goals == 0 {
        return Err("demo saturation derived nothing".into());
    }
    let mut rng = StdRng::seed_from_u64(9);
    let cfg = QueryConfig { conflict_policy: ConflictPolicy::Lenient, ..QueryConfig::default() };
    let mut total = 0;
    for i in 0..50 {
        let shape = Shape {
            predicates: rng.gen_range(6..=20),
            rules: rng.gen_range(5..=30),
            contexts: 0.3,
            cases: rng.gen_range(0..=4),
            roles: rng.gen_bool(0.5),
            ..Shape::default()
        };
        let (kb, world) = random_kb(&mut rng, &shape);
        total += forward_matches(&kb, &world, &cfg).map_err(|e| format!("kb #{i}: {e}"))?;
    }
    Ok(format!("demo ({demo_goals} goals) and 50 random KBs ({total} goals) agree exactly"))
}

fn position(text: &str, byte: usize) -> (usize, usize) {
    let before = &text[..byte];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().unwrap().chars().count() + 1;
    (line, col)
}

/// A random knowledge base exercising every syntactic feature.
fn generated_kb(rng: &mut StdRng) -> KnowledgeBase {
    let shape = Shape {
        predicates: rng.gen_range(3..=10),
        rules: rng.gen_range(1..=12),
        contexts: 0.4,
        cases: rng.gen_range(0..=3),
        roles: rng.gen_bool(0.5),
        ..Shape::default()
    };
    let (mut kb, _) = random_kb(rng, &shape);
    let classes = ["", "market-structure", "defense/anti-trust", "a/b/c"];
    for rule in kb.rules.values_mut() {
        rule.class = TaxonomyPath::parse(classes[rng.gen_range(0..classes.len())]);
        rule.sufficiency = (rng.gen::<f64>() * 1e4).round() / 1e4;
    }
    for i in 0..rng.gen_range(0..4) {
        kb.lexicon.insert(format!("label \"{i}\" of chance"), rng.gen());
    }
    kb
}

fn criterion_10() -> Outcome {
    let mut fixtures = vec![("demo.kb".to_string(), demo::KB.to_string())];
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");
    let mut paths: Vec<_> = std::fs::read_dir(dir).map_err(|e| e.to_string())?.flatten().map(|e| e.path()).collect();
    paths.sort();
    for p in paths.into_iter().filter(|p| p.extension().is_some_and(|e| e == "kb")) {
        fixtures.push((p.display().to_string(), std::fs::read_to_string(&p).map_err(|e| e.to_string())?));
    }
    for (name, text) in &fixtures {
        let once = parse_kb(text).map_err(|e| format!("{name}: {e:?}"))?;
        let twice = parse_kb(&render_kb(&once)).map_err(|e| format!("{name} re-parse: {e:?}"))?;
        if once != twice {
            return Err(format!("{name}: parse . render . parse differs from parse"));
        }
    }

    let mut rng = StdRng::seed_from_u64(10);
    let mut seeded = 0;
    for i in 0..100 {
        let kb = generated_kb(&mut rng);
        let text = render_kb(&kb);
        let back = parse_kb(&text).map_err(|e| format!("generated #{i}: {e:?}\n{text}"))?;
        if back != kb || parse_kb(&render_kb(&back)).as_ref() != Ok(&back) {
            return Err(format!("generated #{i} does not round-trip:\n{text}"));
        }

        // Seed one syntax error and check the reported position.
        let (broken, at) = match rng.gen_range(0..3) {
            0 => {
                let sites: Vec<usize> = text.match_indices(" tnorm ").map(|(k, _)| k + 7).collect();
                let k = sites[rng.gen_range(0..sites.len())];
                let end = k + text[k..].find(|c: char| c.is_whitespace() || c == ';').unwrap();
                (format!("{}T7{}", &text[..k], &text[end..]), k)
            }
            1 => {
                let sites: Vec<usize> = text.match_indices(" suff ").map(|(k, _)| k + 6).collect();
                let k = sites[rng.gen_range(0..sites.len())];
                let end = k + text[k..].find(' ').unwrap();
                (format!("{}1.5{}", &text[..k], &text[end..]), k)
            }
            _ => {
                let sites: Vec<usize> = text
                    .match_indices(' ')
                    .map(|(k, _)| k)
                    .filter(|&k| !text[..k].rsplit('\n').next().unwrap().contains('"'))
                    .collect();
                let k = sites[rng.gen_range(0..sites.len())];
                (format!("{}${}", &text[..k], &text[k + 1..]), k)
            }
        };
        let (line, column) = position(&broken, at);
        let errors = parse_kb(&broken).err().ok_or_else(|| format!("seeded error not detected:\n{broken}"))?;
        let first = &errors[0];
        if (first.span.line, first.span.column) != (line, column) {
            return Err(format!("expected {line}:{column}, got {first} in\n{broken}"));
        }
        seeded += 1;
    }
    Ok(format!("{} fixtures and 100 generated KBs round-trip; {seeded} seeded errors located", fixtures.len()))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("T-norm axioms", criterion_1),
        ("Frechet bounds and liberality ordering", criterion_2),
        ("DeMorgan duality and complement involution", criterion_3),
        ("crisp reduction", criterion_4),
        ("aggregation identity and conflict", criterion_5),
        ("similarity transitivity", criterion_6),
        ("belief-revision equivalence", criterion_7),
        ("demo knowledge base end-to-end", criterion_8),
        ("forward/backward agreement", criterion_9),
        ("DSL round-trip and error positions", criterion_10),
    ];
    let mut failed = 0;
    let mut timings = BTreeMap::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        timings.insert(i + 1, start.elapsed());
        match outcome {
            Ok(detail) => println!("PASS {:>2}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2}. {name}: {why}", i + 1);
            }
        }
    }
    let total: std::time::Duration = timings.values().sum();
    println!("{} of {} criteria passed in {:.1?}", criteria.len() - failed, criteria.len(), total);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
