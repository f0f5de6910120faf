//! Quivers, paths, relations and the presentation DSL.
//!
//! Paths are written left-composed (`a*b` is `a` after `b`) but stored in
//! application order: `arrows[0]` is applied first.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{input, Error, Result};
use crate::field::format_rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    /// Vertices are `1..=n` externally and `0..n` internally.
    pub n: usize,
    pub arrows: Vec<Arrow>,
    by_name: HashMap<String, usize>,
}

impl Quiver {
    pub fn new(n: usize, arrows: Vec<Arrow>) -> Result<Self> {
        let mut by_name = HashMap::new();
        for (i, a) in arrows.iter().enumerate() {
            if a.source >= n || a.target >= n {
                return input(format!("arrow {} uses an undeclared vertex", a.name));
            }
            if by_name.insert(a.name.clone(), i).is_some() {
                return input(format!("duplicate arrow name {}", a.name));
            }
        }
        Ok(Quiver { n, arrows, by_name })
    }

    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn has_double_arrows(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        self.arrows.iter().any(|a| !seen.insert((a.source, a.target)))
    }

    pub fn arrows_from(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&i| self.arrows[i].source == v)
    }

    pub fn arrows_into(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&i| self.arrows[i].target == v)
    }

    pub fn arrows_between(&self, s: usize, t: usize) -> Vec<usize> {
        (0..self.arrows.len())
            .filter(|&i| self.arrows[i].source == s && self.arrows[i].target == t)
            .collect()
    }

    /// Left-composed name of a path, `e3` for the trivial path at vertex 3.
    pub fn path_name(&self, p: &Path) -> String {
        if p.arrows.is_empty() {
            return format!("e{}", p.source + 1);
        }
        p.arrows.iter().rev().map(|&a| self.arrows[a].name.as_str()).collect::<Vec<_>>().join("*")
    }

    pub fn path_from_names(&self, names: &[&str]) -> Result<Path> {
        let mut arrows = Vec::new();
        for n in names.iter().rev() {
            match self.arrow_index(n) {
                Some(i) => arrows.push(i),
                None => return input(format!("unknown arrow {n}")),
            }
        }
        if arrows.is_empty() {
            return input("empty path");
        }
        let p = Path { source: self.arrows[arrows[0]].source, arrows };
        self.check_path(&p)?;
        Ok(p)
    }

    /// Parses `a*b*c` or `e3`.
    pub fn parse_path(&self, s: &str) -> Result<Path> {
        let s = s.trim();
        if let Some(v) = s.strip_prefix('e').and_then(|r| r.parse::<usize>().ok()) {
            if self.arrow_index(s).is_none() {
                if v == 0 || v > self.n {
                    return input(format!("unknown vertex in {s}"));
                }
                return Ok(Path::trivial(v - 1));
            }
        }
        let names: Vec<&str> = s.split('*').map(str::trim).collect();
        self.path_from_names(&names)
    }

    pub fn check_path(&self, p: &Path) -> Result<()> {
        let mut at = p.source;
        for &a in &p.arrows {
            if self.arrows[a].source != at {
                return input(format!("path {} is not composable", self.path_name(p)));
            }
            at = self.arrows[a].target;
        }
        Ok(())
    }

    pub fn target(&self, p: &Path) -> usize {
        p.arrows.last().map_or(p.source, |&a| self.arrows[a].target)
    }

    /// Vertex sequence e(0), …, e(l) visited by the path.
    pub fn vertex_sequence(&self, p: &Path) -> Vec<usize> {
        let mut out = vec![p.source];
        out.extend(p.arrows.iter().map(|&a| self.arrows[a].target));
        out
    }

    pub fn arrow_name(&self, a: usize) -> &str {
        &self.arrows[a].name
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub source: usize,
    pub arrows: Vec<usize>,
}

impl Path {
    pub fn trivial(v: usize) -> Self {
        Path { source: v, arrows: Vec::new() }
    }

    pub fn arrow(q: &Quiver, a: usize) -> Self {
        Path { source: q.arrows[a].source, arrows: vec![a] }
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.arrows.is_empty()
    }

    /// `self` after `first`; caller guarantees composability.
    pub fn after(&self, first: &Path) -> Path {
        let mut arrows = first.arrows.clone();
        arrows.extend(self.arrows.iter().copied());
        Path { source: first.source, arrows }
    }

    /// The right subpath of length `k` (the first `k` arrows applied).
    pub fn right(&self, k: usize) -> Path {
        Path { source: self.source, arrows: self.arrows[..k].to_vec() }
    }

    /// The left part `v` with `self = v * right(k)`.
    pub fn left_after(&self, q: &Quiver, k: usize) -> Path {
        let src = if k == 0 { self.source } else { q.arrows[self.arrows[k - 1]].target };
        Path { source: src, arrows: self.arrows[k..].to_vec() }
    }

    /// `Some(v)` with `self = v * u`.
    pub fn strip_right(&self, q: &Quiver, u: &Path) -> Option<Path> {
        if u.source != self.source || u.len() > self.len() || self.arrows[..u.len()] != u.arrows[..] {
            return None;
        }
        Some(self.left_after(q, u.len()))
    }

    pub fn is_right_subpath_of(&self, p: &Path) -> bool {
        self.source == p.source && self.len() <= p.len() && p.arrows[..self.len()] == self.arrows[..]
    }

    pub fn first_arrow(&self) -> Option<usize> {
        self.arrows.first().copied()
    }

    pub fn last_arrow(&self) -> Option<usize> {
        self.arrows.last().copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub terms: Vec<(BigRational, Path)>,
}

impl Relation {
    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub quiver: Quiver,
    pub relations: Vec<Relation>,
    pub loewy_bound: usize,
}

impl Presentation {
    pub fn new(quiver: Quiver, relations: Vec<Relation>, loewy_bound: usize) -> Result<Self> {
        if loewy_bound < 2 {
            return input("loewy bound must be at least 2");
        }
        for r in &relations {
            validate_relation(&quiver, r)?;
        }
        Ok(Presentation { quiver, relations, loewy_bound })
    }

    pub fn is_monomial(&self) -> bool {
        self.relations.iter().all(Relation::is_monomial)
    }

    pub fn pretty(&self) -> String {
        let q = &self.quiver;
        let mut s = String::new();
        s.push_str("quiver {\n");
        let _ = writeln!(s, "  vertices 1..{};", q.n);
        for a in &q.arrows {
            let _ = writeln!(s, "  arrow {} : {} -> {};", a.name, a.source + 1, a.target + 1);
        }
        s.push_str("}\nrelations {\n");
        for r in &self.relations {
            let _ = writeln!(s, "  {};", format_terms(r.terms.iter().map(|(c, p)| (c, q.path_name(p)))));
        }
        let _ = writeln!(s, "  loewy {}", self.loewy_bound);
        s.push_str("}\n");
        s
    }
}

fn validate_relation(q: &Quiver, r: &Relation) -> Result<()> {
    if r.terms.is_empty() {
        return input("empty relation");
    }
    let (s0, t0) = (r.terms[0].1.source, q.target(&r.terms[0].1));
    for (c, p) in &r.terms {
        q.check_path(p)?;
        if c.is_zero() {
            return input(format!("zero coefficient on {}", q.path_name(p)));
        }
        if p.len() < 2 {
            return input(format!("relation term {} has length < 2 (not admissible)", q.path_name(p)));
        }
        if p.source != s0 || q.target(p) != t0 {
            return input(format!("relation terms are not parallel ({})", q.path_name(p)));
        }
    }
    Ok(())
}

fn format_terms<'a>(terms: impl Iterator<Item = (&'a BigRational, String)>) -> String {
    let mut s = String::new();
    for (i, (c, body)) in terms.enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if i == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        if !mag.is_one() {
            let _ = write!(s, "{}*", format_rational(&mag));
        }
        s.push_str(&body);
    }
    s
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleSpec {
    pub generators: Vec<(String, usize)>,
    /// Terms (scalar, path, generator index).
    pub relators: Vec<Vec<(BigRational, Path, usize)>>,
}

impl ModuleSpec {
    pub fn free(generators: Vec<(String, usize)>) -> Self {
        ModuleSpec { generators, relators: Vec::new() }
    }

    pub fn validate(&self, q: &Quiver) -> Result<()> {
        let mut names = std::collections::HashSet::new();
        for (n, v) in &self.generators {
            if !names.insert(n) {
                return input(format!("duplicate generator {n}"));
            }
            if *v >= q.n {
                return input(format!("generator {n} at undeclared vertex"));
            }
        }
        for rel in &self.relators {
            let mut end = None;
            for (_, p, g) in rel {
                q.check_path(p)?;
                if p.source != self.generators[*g].1 {
                    return input(format!(
                        "path {} does not start at the vertex of {}",
                        q.path_name(p),
                        self.generators[*g].0
                    ));
                }
                let t = q.target(p);
                if *end.get_or_insert(t) != t {
                    return input("relator terms are not parallel");
                }
            }
        }
        Ok(())
    }

    pub fn pretty(&self, q: &Quiver) -> String {
        let mut s = String::from("module {\n");
        for (n, v) in &self.generators {
            let _ = writeln!(s, "  gen {n} @ {};", v + 1);
        }
        for rel in &self.relators {
            let body = format_terms(rel.iter().map(|(c, p, g)| {
                let path = if p.is_trivial() { String::new() } else { q.path_name(p) };
                (c, format!("{path}({})", self.generators[*g].0))
            }));
            let _ = writeln!(s, "  rel {body};");
        }
        s.push_str("}\n");
        s
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Colon,
    To,
    Star,
    Plus,
    Minus,
    Slash,
    At,
    DotDot,
    Num(BigInt),
    Ident(String),
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let adv = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            adv(1, &mut i, &mut col);
            continue;
        }
        if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let simple = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ';' => Some(Tok::Semi),
            ':' => Some(Tok::Colon),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            '/' => Some(Tok::Slash),
            '@' => Some(Tok::At),
            _ => None,
        };
        if let Some(t) = simple {
            out.push(Token { tok: t, line: l0, col: c0 });
            adv(1, &mut i, &mut col);
            continue;
        }
        if c == '-' {
            if chars.get(i + 1) == Some(&'>') {
                out.push(Token { tok: Tok::To, line: l0, col: c0 });
                adv(2, &mut i, &mut col);
            } else {
                out.push(Token { tok: Tok::Minus, line: l0, col: c0 });
                adv(1, &mut i, &mut col);
            }
            continue;
        }
        if c == '.' && chars.get(i + 1) == Some(&'.') {
            out.push(Token { tok: Tok::DotDot, line: l0, col: c0 });
            adv(2, &mut i, &mut col);
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Num(s.parse().unwrap()), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            out.push(Token { tok: Tok::Ident(s), line: l0, col: c0 });
            continue;
        }
        return Err(Error::Syntax { line, col, msg: format!("unexpected character `{c}`") });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = match self.toks.get(self.pos).or(self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        };
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {t:?}"))
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected identifier"),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == k => {
                self.pos += 1;
                Ok(())
            }
            _ => self.err(format!("expected `{k}`")),
        }
    }

    fn number(&mut self) -> Result<BigInt> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = n.clone();
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected number"),
        }
    }

    fn usize_num(&mut self) -> Result<usize> {
        let n = self.number()?;
        match usize::try_from(&n) {
            Ok(v) => Ok(v),
            Err(_) => self.err("number out of range"),
        }
    }

    /// `[-|+] [COEFF *]` with the sign folded in.
    fn coefficient(&mut self, leading: bool) -> Result<BigRational> {
        let mut sign = BigRational::one();
        if leading {
            if self.eat(&Tok::Minus) {
                sign = -sign;
            } else {
                self.eat(&Tok::Plus);
            }
        } else if self.eat(&Tok::Minus) {
            sign = -sign;
        } else if !self.eat(&Tok::Plus) {
            return self.err("expected + or -");
        }
        if let Some(Tok::Num(_)) = self.peek() {
            let n = self.number()?;
            let d = if self.eat(&Tok::Slash) { self.number()? } else { BigInt::one() };
            if d.is_zero() {
                return self.err("zero denominator");
            }
            self.expect(Tok::Star)?;
            return Ok(sign * BigRational::new(n, d));
        }
        Ok(sign)
    }

    fn path_names(&mut self) -> Result<Vec<String>> {
        let mut names = vec![self.ident()?];
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            names.push(self.ident()?);
        }
        Ok(names)
    }
}

fn resolve_path(q: &Quiver, names: &[String], p: &Parser) -> Result<Path> {
    for n in names {
        if q.arrow_index(n).is_none() {
            return p.err(format!("unknown arrow `{n}`"));
        }
    }
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    q.path_from_names(&refs).or_else(|e| p.err(e.to_string()))
}

pub fn parse_presentation(text: &str) -> Result<Presentation> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    p.keyword("quiver")?;
    p.expect(Tok::LBrace)?;
    p.keyword("vertices")?;
    let lo = p.usize_num()?;
    p.expect(Tok::DotDot)?;
    let n = p.usize_num()?;
    if lo != 1 || n == 0 {
        return p.err("vertices must be declared as 1..n with n ≥ 1");
    }
    p.expect(Tok::Semi)?;
    let mut arrows = Vec::new();
    while p.peek() != Some(&Tok::RBrace) {
        p.keyword("arrow")?;
        let name = p.ident()?;
        p.expect(Tok::Colon)?;
        let s = p.usize_num()?;
        p.expect(Tok::To)?;
        let t = p.usize_num()?;
        if s == 0 || s > n || t == 0 || t > n {
            return p.err(format!("arrow {name} uses an undeclared vertex"));
        }
        p.eat(&Tok::Semi);
        arrows.push(Arrow { name, source: s - 1, target: t - 1 });
    }
    p.expect(Tok::RBrace)?;
    let quiver = Quiver::new(n, arrows)?;
    p.keyword("relations")?;
    p.expect(Tok::LBrace)?;
    let mut relations = Vec::new();
    let loewy;
    loop {
        if let Some(Tok::Ident(k)) = p.peek() {
            if k == "loewy" {
                p.pos += 1;
                loewy = p.usize_num()?;
                p.eat(&Tok::Semi);
                break;
            }
        }
        let mut terms = Vec::new();
        let mut first = true;
        loop {
            let c = p.coefficient(first)?;
            first = false;
            let names = p.path_names()?;
            let path = resolve_path(&quiver, &names, &p)?;
            terms.push((c, path));
            if matches!(p.peek(), Some(Tok::Plus) | Some(Tok::Minus)) {
                continue;
            }
            break;
        }
        p.expect(Tok::Semi)?;
        relations.push(Relation { terms });
    }
    p.expect(Tok::RBrace)?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    Presentation::new(quiver, relations, loewy)
}

pub fn parse_module_spec(text: &str, pres: &Presentation) -> Result<ModuleSpec> {
    let q = &pres.quiver;
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    p.keyword("module")?;
    p.expect(Tok::LBrace)?;
    let mut generators: Vec<(String, usize)> = Vec::new();
    let mut relators = Vec::new();
    while p.peek() != Some(&Tok::RBrace) {
        let kw = p.ident()?;
        match kw.as_str() {
            "gen" => {
                let name = p.ident()?;
                p.expect(Tok::At)?;
                let v = p.usize_num()?;
                if v == 0 || v > q.n {
                    return p.err(format!("unknown vertex {v}"));
                }
                if generators.iter().any(|(g, _)| *g == name) {
                    return p.err(format!("duplicate generator {name}"));
                }
                generators.push((name, v - 1));
            }
            "rel" => {
                let mut terms = Vec::new();
                let mut first = true;
                loop {
                    let c = p.coefficient(first)?;
                    first = false;
                    let names = if p.peek() == Some(&Tok::LParen) { Vec::new() } else { p.path_names()? };
                    p.expect(Tok::LParen)?;
                    let g = p.ident()?;
                    p.expect(Tok::RParen)?;
                    let Some(gi) = generators.iter().position(|(n, _)| *n == g) else {
                        return p.err(format!("unknown generator `{g}`"));
                    };
                    let path = if names.is_empty() {
                        Path::trivial(generators[gi].1)
                    } else {
                        resolve_path(q, &names, &p)?
                    };
                    if path.source != generators[gi].1 {
                        return p.err(format!(
                            "path {} does not start at the vertex of generator {g}",
                            q.path_name(&path)
                        ));
                    }
                    terms.push((c, path, gi));
                    if matches!(p.peek(), Some(Tok::Plus) | Some(Tok::Minus)) {
                        continue;
                    }
                    break;
                }
                relators.push(terms);
            }
            other => return p.err(format!("unexpected `{other}`")),
        }
        p.expect(Tok::Semi)?;
    }
    p.expect(Tok::RBrace)?;
    if p.pos < p.toks.len() {
        return p.err("trailing input");
    }
    let spec = ModuleSpec { generators, relators };
    spec.validate(q)?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "quiver { vertices 1..2; arrow a : 1 -> 2; arrow b : 1 -> 2; arrow c : 2 -> 1; }
        relations { c*a; -1/2*a*c + 3*b*c; loewy 4 }";

    #[test]
    fn parses_and_prints() {
        let p = parse_presentation(TINY).unwrap();
        assert_eq!(p.quiver.arrows.len(), 3);
        assert_eq!(p.relations.len(), 2);
        let again = parse_presentation(&p.pretty()).unwrap();
        assert_eq!(p, again);
        assert!(p.quiver.has_double_arrows());
    }

    #[test]
    fn composition_order() {
        let p = parse_presentation(TINY).unwrap();
        let ca = &p.relations[0].terms[0].1;
        // c*a: a first, then c
        assert_eq!(ca.source, 0);
        assert_eq!(p.quiver.target(ca), 0);
        assert_eq!(p.quiver.path_name(ca), "c*a");
    }

    #[test]
    fn rejects_non_parallel() {
        let bad = "quiver { vertices 1..2; arrow a : 1 -> 2; arrow c : 2 -> 1; } relations { c*a + a*c; loewy 3 }";
        assert!(matches!(parse_presentation(bad), Err(Error::Input(_))));
    }

    #[test]
    fn rejects_non_composable_with_position() {
        let bad = "quiver { vertices 1..2; arrow a : 1 -> 2; } relations { a*a; loewy 3 }";
        assert!(matches!(parse_presentation(bad), Err(Error::Syntax { line: 1, .. })));
    }

    #[test]
    fn loewy_bounds() {
        let one = "quiver { vertices 1..1; } relations { loewy 1 }";
        assert!(parse_presentation(one).is_err());
        let two = "quiver { vertices 1..1; } relations { loewy 2 }";
        assert!(parse_presentation(two).is_ok());
    }

    #[test]
    fn module_spec_terms() {
        let p = parse_presentation(TINY).unwrap();
        let m = parse_module_spec("module { gen x @ 1; gen y @ 1; rel b(x) - 2*a(y); rel (y) - (y); }", &p);
        // second relator is parallel (trivial paths at 1) and accepted
        let m = m.unwrap();
        assert_eq!(m.generators.len(), 2);
        assert_eq!(m.relators.len(), 2);
        let again = parse_module_spec(&m.pretty(&p.quiver), &p).unwrap();
        assert_eq!(m, again);
        assert!(parse_module_spec("module { gen x @ 2; rel a(x); }", &p).is_err());
    }
}
