//! Text format for knowledge bases and worlds.
//!
//! A hand-written lexer and recursive-descent parser (one token of
//! lookahead, no backtracking) plus a printer whose output parses back to an
//! equal structure.
//!
//! ```text
//! lexicon { "high chance" = 0.9; }
//! taxonomy defense/anti-trust/market-dominance;
//! rule lobby context (horizontal-merger ?raider ?target) tnorm T2 suff "it is likely" nec 0 {
//!     if (strong-political-lobby ?target)
//!     then (anti-trust-success ?raider ?target)
//! }
//! precedent (similar-precedent ?raider ?target) from defense/anti-trust tnorm T2;
//!
//! world M1 {
//!     roles ?raider=Mobil ?target=Marathon;
//!     fact (similar-industry Mobil Marathon) [0.9,1.0] @filings;
//!     askable strong-political-lobby;
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::calculus::{CertaintyInterval, ConflictPolicy, TNormFamily};
use crate::cbr::{CaseTemplate, PrecedentLink};
use crate::knowledge::{Atom, KnowledgeBase, Rule, TaxonomyPath, Term, World};

/// Source used for facts written without `@source`.
pub const DEFAULT_SOURCE: &str = "world";

const KB_KEYWORDS: [&str; 5] = ["lexicon", "taxonomy", "rule", "case", "precedent"];

/// Location of a lexeme; line and column are 1-based and count characters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {expected}, found {found}")]
pub struct ParseError {
    pub span: SourceSpan,
    /// What the parser wanted, phrased as a complete message.
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Var(String),
    Number(String),
    Str(String),
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Number(s) => write!(f, "`{s}`"),
            Tok::Var(s) => write!(f, "`?{s}`"),
            Tok::Str(s) => write!(f, "{s:?}"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '-' | '_' | '.')
}

fn lex(text: &str, errors: &mut Vec<ParseError>) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let take_while = |mut j: usize, pred: fn(char) -> bool| {
            while j < chars.len() && pred(chars[j]) {
                j += 1;
            }
            j
        };
        let tok = if is_ident_start(c) {
            i = take_while(i + 1, is_ident_char);
            Tok::Ident(chars[start..i].iter().collect())
        } else if c == '?' {
            i = take_while(i + 1, is_ident_char);
            if i == start + 1 {
                errors.push(ParseError {
                    span: SourceSpan { line, column: col, length: 1 },
                    expected: "expected a role variable name after `?`".into(),
                    found: "`?`".into(),
                });
                col += 1;
                continue;
            }
            Tok::Var(chars[start + 1..i].iter().collect())
        } else if c.is_ascii_digit() {
            i = take_while(i, |c| c.is_ascii_digit());
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                i = take_while(i + 1, |c| c.is_ascii_digit());
            }
            Tok::Number(chars[start..i].iter().collect())
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            let mut closed = false;
            while i < chars.len() && chars[i] != '\n' {
                match chars[i] {
                    '"' => {
                        closed = true;
                        i += 1;
                        break;
                    }
                    '\\' if i + 1 < chars.len() => {
                        s.push(chars[i + 1]);
                        i += 2;
                    }
                    other => {
                        s.push(other);
                        i += 1;
                    }
                }
            }
            if !closed {
                errors.push(ParseError {
                    span: SourceSpan { line, column: col, length: i - start },
                    expected: "unterminated string".into(),
                    found: chars[start..i].iter().collect(),
                });
                col += i - start;
                continue;
            }
            Tok::Str(s)
        } else if "(){}[];,=@/".contains(c) {
            i += 1;
            Tok::Punct(c)
        } else {
            errors.push(ParseError {
                span: SourceSpan { line, column: col, length: 1 },
                expected: "unexpected character".into(),
                found: format!("`{c}`"),
            });
            i += 1;
            col += 1;
            continue;
        };
        let length = i - start;
        tokens.push(Token { tok, span: SourceSpan { line, column: col, length } });
        col += length;
    }
    tokens.push(Token { tok: Tok::Eof, span: SourceSpan { line, column: col, length: 1 } });
    tokens
}

/// A strength given as a number or a lexicon label awaiting resolution.
#[derive(Debug, Clone)]
enum Strength {
    Value(f64),
    Label(String, SourceSpan),
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn new(text: &str, errors: &mut Vec<ParseError>) -> Self {
        Self { tokens: lex(text, errors), pos: 0 }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn error_at(token: &Token, expected: impl Into<String>) -> ParseError {
        ParseError { span: token.span, expected: expected.into(), found: token.tok.to_string() }
    }

    fn fail<T>(&self, expected: impl Into<String>) -> PResult<T> {
        Err(Self::error_at(self.peek(), expected))
    }

    fn at_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn punct(&mut self, c: char) -> PResult<Token> {
        if self.at_punct(c) {
            Ok(self.bump())
        } else {
            self.fail(format!("expected `{c}`"))
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Token> {
        if self.at_keyword(kw) {
            Ok(self.bump())
        } else {
            self.fail(format!("expected `{kw}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Token)> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump()))
            }
            _ => self.fail(format!("expected {what}")),
        }
    }

    fn number(&mut self) -> PResult<(f64, Token)> {
        match &self.peek().tok {
            Tok::Number(s) => {
                let v = s.parse::<f64>().map_err(|_| Self::error_at(self.peek(), "expected a decimal number"))?;
                Ok((v, self.bump()))
            }
            _ => self.fail("expected a decimal number"),
        }
    }

    fn unit(&mut self, what: &str) -> PResult<(f64, Token)> {
        let (v, tok) = self.number()?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Self::error_at(&tok, format!("{what} must lie in [0, 1]")));
        }
        Ok((v, tok))
    }

    fn strength(&mut self, what: &str) -> PResult<Strength> {
        match &self.peek().tok {
            Tok::Number(_) => Ok(Strength::Value(self.unit(what)?.0)),
            Tok::Str(s) | Tok::Ident(s) => {
                let s = s.clone();
                let t = self.bump();
                Ok(Strength::Label(s, t.span))
            }
            _ => self.fail(format!("expected a {what} value or lexicon label")),
        }
    }

    fn family(&mut self) -> PResult<TNormFamily> {
        let t = self.peek().clone();
        let (name, _) = self.ident("a T-norm family (T1, T1.5, T2, T2.5, T3)")?;
        name.parse().map_err(|_| Self::error_at(&t, "expected a T-norm family (T1, T1.5, T2, T2.5, T3)"))
    }

    fn path(&mut self) -> PResult<TaxonomyPath> {
        let mut parts = vec![self.ident("a taxonomy path")?.0];
        while self.at_punct('/') {
            self.bump();
            parts.push(self.ident("a taxonomy path segment")?.0);
        }
        Ok(TaxonomyPath(parts))
    }

    fn atom(&mut self) -> PResult<(Atom, Token)> {
        let open = self.punct('(')?;
        let (predicate, _) = self.ident("a predicate name")?;
        let mut args = Vec::new();
        loop {
            match &self.peek().tok {
                Tok::Ident(s) | Tok::Number(s) => {
                    args.push(Term::Const(s.clone()));
                    self.bump();
                }
                Tok::Var(v) => {
                    args.push(Term::Var(v.clone()));
                    self.bump();
                }
                Tok::Punct(')') => {
                    self.bump();
                    break;
                }
                _ => return self.fail("expected a constant, role variable or `)`"),
            }
        }
        Ok((Atom::new(predicate, args), open))
    }

    fn atoms(&mut self) -> PResult<Vec<Atom>> {
        let mut out = vec![self.atom()?.0];
        loop {
            if self.at_punct(',') {
                self.bump();
            } else if !self.at_punct('(') {
                return Ok(out);
            }
            out.push(self.atom()?.0);
        }
    }

    fn interval(&mut self) -> PResult<CertaintyInterval> {
        let open = self.punct('[')?;
        let (l, _) = self.unit("a lower bound")?;
        self.punct(',')?;
        let (u, _) = self.unit("an upper bound")?;
        self.punct(']')?;
        if l > u {
            return Err(ParseError {
                span: open.span,
                expected: "lower exceeds upper".into(),
                found: format!("[{l}, {u}]"),
            });
        }
        CertaintyInterval::new(l, u).map_err(|e| Self::error_at(&open, e.to_string()))
    }

    /// Skips to the next token satisfying `stop` (not consuming it).
    fn recover(&mut self, stop: impl Fn(&Parser) -> bool) {
        self.bump();
        while self.peek().tok != Tok::Eof && !stop(self) {
            self.bump();
        }
    }

    fn at_kb_keyword(&self) -> bool {
        KB_KEYWORDS.iter().any(|k| self.at_keyword(k))
    }
}

/// A rule or case awaiting label resolution.
struct Pending {
    id: String,
    sufficiency: Strength,
    necessity: Strength,
}

#[derive(Default)]
struct KbBuilder {
    kb: KnowledgeBase,
    rule_strengths: Vec<Pending>,
    case_strengths: Vec<Pending>,
}

impl Parser {
    fn declaration(&mut self, b: &mut KbBuilder) -> PResult<()> {
        let head = self.peek().clone();
        let Tok::Ident(kw) = &head.tok else {
            return self.fail("expected `lexicon`, `taxonomy`, `rule`, `case` or `precedent`");
        };
        match kw.as_str() {
            "lexicon" => {
                self.bump();
                self.punct('{')?;
                while !self.at_punct('}') {
                    let label_tok = self.peek().clone();
                    let label = match &label_tok.tok {
                        Tok::Str(s) | Tok::Ident(s) => s.clone(),
                        _ => return self.fail("expected a label or `}`"),
                    };
                    self.bump();
                    self.punct('=')?;
                    let (v, _) = self.unit("a lexicon value")?;
                    self.punct(';')?;
                    if b.kb.lexicon.insert(label.clone(), v).is_some() {
                        return Err(Self::error_at(&label_tok, format!("label {label:?} is defined twice")));
                    }
                }
                self.bump();
            }
            "taxonomy" => {
                self.bump();
                let p = self.path()?;
                self.punct(';')?;
                b.kb.library.declare(&p);
            }
            "rule" => {
                self.bump();
                let (id, id_tok) = self.ident("a rule identifier")?;
                let class = if self.at_keyword("class") {
                    self.bump();
                    self.path()?
                } else {
                    TaxonomyPath::default()
                };
                let context = if self.at_keyword("context") {
                    self.bump();
                    self.atoms()?
                } else {
                    Vec::new()
                };
                self.keyword("tnorm")?;
                let family = self.family()?;
                self.keyword("suff")?;
                let sufficiency = self.strength("sufficiency")?;
                self.keyword("nec")?;
                let necessity = self.strength("necessity")?;
                self.punct('{')?;
                self.keyword("if")?;
                let antecedents = self.atoms()?;
                self.keyword("then")?;
                let (consequent, _) = self.atom()?;
                self.punct('}')?;
                if b.kb.rules.contains_key(&id) {
                    return Err(Self::error_at(&id_tok, format!("rule {id} is defined twice")));
                }
                b.rule_strengths.push(Pending { id: id.clone(), sufficiency, necessity });
                b.kb.rules.insert(
                    id.clone(),
                    Rule { id, class, context, antecedents, consequent, sufficiency: 0.0, necessity: 0.0, family },
                );
            }
            "case" => {
                self.bump();
                let (id, id_tok) = self.ident("a case identifier")?;
                self.keyword("path")?;
                let path_tok = self.peek().clone();
                let path = self.path()?;
                if !b.kb.library.has_path(&path) {
                    return Err(Self::error_at(&path_tok, format!("taxonomy path {path} must be declared first")));
                }
                let context = if self.at_keyword("context") {
                    self.bump();
                    self.atoms()?
                } else {
                    Vec::new()
                };
                self.keyword("tnorm")?;
                let family = self.family()?;
                self.keyword("suff")?;
                let sufficiency = self.strength("sufficiency")?;
                self.keyword("nec")?;
                let necessity = self.strength("necessity")?;
                self.punct('{')?;
                self.keyword("roles")?;
                let mut roles = Vec::new();
                while let Tok::Var(v) = &self.peek().tok {
                    roles.push(v.clone());
                    self.bump();
                }
                self.keyword("if")?;
                let antecedents = self.atoms()?;
                self.keyword("then")?;
                let (consequent, _) = self.atom()?;
                self.punct('}')?;
                if b.kb.library.get(&id).is_some() {
                    return Err(Self::error_at(&id_tok, format!("case {id} is defined twice")));
                }
                b.case_strengths.push(Pending { id: id.clone(), sufficiency, necessity });
                b.kb.library.insert(CaseTemplate {
                    id,
                    path,
                    roles,
                    context,
                    antecedents,
                    consequent,
                    sufficiency: 0.0,
                    necessity: 0.0,
                    family,
                });
            }
            "precedent" => {
                self.bump();
                let (atom, atom_tok) = self.atom()?;
                self.keyword("from")?;
                let path = self.path()?;
                let family = if self.at_keyword("tnorm") {
                    self.bump();
                    Some(self.family()?)
                } else {
                    None
                };
                self.punct(';')?;
                let predicate = atom.predicate.clone();
                if b.kb.precedents.contains_key(&predicate) {
                    return Err(Self::error_at(
                        &atom_tok,
                        format!("a precedent link for {predicate} is already declared"),
                    ));
                }
                b.kb.precedents.insert(predicate.clone(), PrecedentLink { predicate, atom, path, family });
            }
            _ => return self.fail("expected `lexicon`, `taxonomy`, `rule`, `case` or `precedent`"),
        }
        Ok(())
    }
}

fn resolve(lexicon: &BTreeMap<String, f64>, s: &Strength, errors: &mut Vec<ParseError>) -> f64 {
    match s {
        Strength::Value(v) => *v,
        Strength::Label(label, span) => lexicon.get(label).copied().unwrap_or_else(|| {
            errors.push(ParseError {
                span: *span,
                expected: "label is not in the lexicon".into(),
                found: format!("{label:?}"),
            });
            0.0
        }),
    }
}

/// Parses a knowledge base. Errors are collected across declarations and
/// returned in source order.
pub fn parse_kb(text: &str) -> Result<KnowledgeBase, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut p = Parser::new(text, &mut errors);
    let mut b = KbBuilder::default();
    while p.peek().tok != Tok::Eof {
        if let Err(e) = p.declaration(&mut b) {
            errors.push(e);
            p.recover(Parser::at_kb_keyword);
        }
    }
    let KbBuilder { mut kb, rule_strengths, case_strengths } = b;
    for pending in rule_strengths {
        let s = resolve(&kb.lexicon, &pending.sufficiency, &mut errors);
        let n = resolve(&kb.lexicon, &pending.necessity, &mut errors);
        let rule = kb.rules.get_mut(&pending.id).expect("pending rule was inserted");
        rule.sufficiency = s;
        rule.necessity = n;
    }
    for pending in case_strengths {
        let s = resolve(&kb.lexicon, &pending.sufficiency, &mut errors);
        let n = resolve(&kb.lexicon, &pending.necessity, &mut errors);
        let mut case = kb.library.get(&pending.id).expect("pending case was inserted").clone();
        case.sufficiency = s;
        case.necessity = n;
        kb.library.insert(case);
    }
    if errors.is_empty() {
        Ok(kb)
    } else {
        errors.sort_by_key(|e| e.span);
        Err(errors)
    }
}

/// Parses a world block under the strict conflict policy.
pub fn parse_world(text: &str) -> Result<World, Vec<ParseError>> {
    parse_world_with(text, ConflictPolicy::Strict)
}

pub fn parse_world_with(text: &str, policy: ConflictPolicy) -> Result<World, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut p = Parser::new(text, &mut errors);
    let world = world_block(&mut p, policy, &mut errors);
    if p.peek().tok != Tok::Eof && errors.is_empty() {
        errors.push(Parser::error_at(p.peek(), "expected end of input after the world block"));
    }
    match world {
        Some(w) if errors.is_empty() => Ok(w),
        _ => {
            errors.sort_by_key(|e| e.span);
            Err(errors)
        }
    }
}

fn world_block(p: &mut Parser, policy: ConflictPolicy, errors: &mut Vec<ParseError>) -> Option<World> {
    let header = (|| {
        p.keyword("world")?;
        let (id, _) = p.ident("a world identifier")?;
        p.punct('{')?;
        Ok(id)
    })();
    let id = match header {
        Ok(id) => id,
        Err(e) => {
            errors.push(e);
            return None;
        }
    };
    let mut world = World::new(id);
    while !p.at_punct('}') {
        if p.peek().tok == Tok::Eof {
            errors.push(Parser::error_at(p.peek(), "expected `}` closing the world block"));
            return None;
        }
        if let Err(e) = world_item(p, &mut world, policy) {
            errors.push(e);
            p.recover(|p| p.at_punct('}') || ["roles", "fact", "askable"].iter().any(|k| p.at_keyword(k)));
        }
    }
    p.bump();
    Some(world)
}

fn world_item(p: &mut Parser, world: &mut World, policy: ConflictPolicy) -> PResult<()> {
    if p.at_keyword("roles") {
        p.bump();
        while let Tok::Var(v) = &p.peek().tok {
            let var = v.clone();
            p.bump();
            p.punct('=')?;
            let (constant, _) = p.ident("a constant")?;
            world.bind(var, constant);
        }
        p.punct(';')?;
    } else if p.at_keyword("fact") {
        p.bump();
        let (atom, atom_tok) = p.atom()?;
        if !atom.is_ground() {
            return Err(Parser::error_at(&atom_tok, "ground atom required"));
        }
        let interval = p.interval()?;
        let source = if p.at_punct('@') {
            p.bump();
            match &p.peek().tok {
                Tok::Ident(s) | Tok::Str(s) => {
                    let s = s.clone();
                    p.bump();
                    s
                }
                _ => return p.fail("expected a source name"),
            }
        } else {
            DEFAULT_SOURCE.to_string()
        };
        p.punct(';')?;
        world
            .assert_evidence(&atom, interval, &source, policy)
            .map_err(|e| ParseError { span: atom_tok.span, expected: e.to_string(), found: atom.to_string() })?;
    } else if p.at_keyword("askable") {
        p.bump();
        let (pred, _) = p.ident("a predicate name")?;
        p.punct(';')?;
        world.askables.insert(pred);
    } else {
        return p.fail("expected `roles`, `fact`, `askable` or `}`");
    }
    Ok(())
}

/// Parses a single atom such as `(anti-trust-success ?raider ?target)`.
pub fn parse_atom(text: &str) -> Result<Atom, ParseError> {
    single(text, |p| p.atom().map(|(a, _)| a))
}

/// Parses an interval such as `[0.2,0.4]`.
pub fn parse_interval(text: &str) -> Result<CertaintyInterval, ParseError> {
    single(text, Parser::interval)
}

/// Parses a query goal: an atom, or `(not <atom>)` for its negation.
pub fn parse_query(text: &str) -> Result<(Atom, bool), ParseError> {
    single(text, |p| {
        let save = p.pos;
        p.punct('(')?;
        if p.at_keyword("not") && p.tokens[p.pos + 1].tok == Tok::Punct('(') {
            p.bump();
            let (atom, _) = p.atom()?;
            p.punct(')')?;
            return Ok((atom, true));
        }
        p.pos = save;
        p.atom().map(|(a, _)| (a, false))
    })
}

fn single<T>(text: &str, f: impl FnOnce(&mut Parser) -> PResult<T>) -> Result<T, ParseError> {
    let mut errors = Vec::new();
    let mut p = Parser::new(text, &mut errors);
    if let Some(e) = errors.into_iter().next() {
        return Err(e);
    }
    let value = f(&mut p)?;
    if p.peek().tok != Tok::Eof {
        return p.fail("expected end of input");
    }
    Ok(value)
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if matches!(c, '"' | '\\') {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn join(atoms: &[Atom]) -> String {
    atoms.iter().map(Atom::to_string).collect::<Vec<_>>().join(" ")
}

/// Canonical text of a knowledge base: lexicon, taxonomy leaves, rules,
/// cases and precedent links, each sorted by key.
pub fn render_kb(kb: &KnowledgeBase) -> String {
    let mut sections: Vec<String> = Vec::new();
    if !kb.lexicon.is_empty() {
        let mut s = String::from("lexicon {\n");
        for (label, v) in &kb.lexicon {
            let _ = writeln!(s, "    {} = {v};", quote(label));
        }
        s.push_str("}\n");
        sections.push(s);
    }
    let leaves: Vec<_> = kb.library.leaf_paths().collect();
    if !leaves.is_empty() {
        sections.push(leaves.iter().map(|p| format!("taxonomy {p};\n")).collect());
    }
    for rule in kb.rules.values() {
        let mut s = format!("rule {}", rule.id);
        if !rule.class.is_empty() {
            let _ = write!(s, " class {}", rule.class);
        }
        if !rule.context.is_empty() {
            let _ = write!(s, " context {}", join(&rule.context));
        }
        let _ = write!(
            s,
            " tnorm {} suff {} nec {} {{\n    if {}\n    then {}\n}}\n",
            rule.family,
            rule.sufficiency,
            rule.necessity,
            join(&rule.antecedents),
            rule.consequent
        );
        sections.push(s);
    }
    for case in kb.library.templates() {
        let mut s = format!("case {} path {}", case.id, case.path);
        if !case.context.is_empty() {
            let _ = write!(s, " context {}", join(&case.context));
        }
        let roles: String = case.roles.iter().map(|r| format!(" ?{r}")).collect();
        let _ = write!(
            s,
            " tnorm {} suff {} nec {} {{\n    roles{roles}\n    if {}\n    then {}\n}}\n",
            case.family,
            case.sufficiency,
            case.necessity,
            join(&case.antecedents),
            case.consequent
        );
        sections.push(s);
    }
    if !kb.precedents.is_empty() {
        let mut s = String::new();
        for link in kb.precedents.values() {
            let _ = write!(s, "precedent {} from {}", link.atom, link.path);
            if let Some(f) = link.family {
                let _ = write!(s, " tnorm {f}");
            }
            s.push_str(";\n");
        }
        sections.push(s);
    }
    sections.join("\n")
}

/// Canonical text of a world, one `fact` line per source report.
pub fn render_world(world: &World) -> String {
    let mut s = format!("world {} {{\n", world.id);
    if !world.roles.is_empty() {
        let roles: Vec<String> = world.roles.iter().map(|(v, c)| format!("?{v}={c}")).collect();
        let _ = writeln!(s, "    roles {};", roles.join(" "));
    }
    for fact in world.facts() {
        for (source, iv) in &fact.evidence {
            let source = if source.chars().next().is_some_and(is_ident_start) && source.chars().all(is_ident_char) {
                source.clone()
            } else {
                quote(source)
            };
            let _ = writeln!(s, "    fact {} [{},{}] @{source};", fact.atom, iv.lower(), iv.upper());
        }
    }
    let askables: BTreeSet<_> = world.askables.iter().collect();
    for a in askables {
        let _ = writeln!(s, "    askable {a};");
    }
    s.push_str("}\n");
    s
}
