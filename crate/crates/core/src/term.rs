//! Signatures, terms of the absolutely free algebra over `x1..xn`, equations,
//! substitutions, the prefix term syntax and bounded term enumeration.

use std::collections::HashMap;
use std::fmt;

use crate::caps::Caps;
use crate::error::{Error, Result};

/// One operation symbol.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// An ordered list of operation symbols with unique names.
///
/// Declaration order is significant: it fixes the canonical order of terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
    index: HashMap<String, usize>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut sig = Signature::default();
        for (name, arity) in symbols {
            sig.push(name.into(), arity)?;
        }
        Ok(sig)
    }

    pub(crate) fn push(&mut self, name: String, arity: usize) -> Result<usize> {
        if !is_identifier(&name) || is_variable(&name) {
            return Err(Error::Invalid(format!(
                "`{name}` is not a valid symbol name"
            )));
        }
        if self.index.contains_key(&name) {
            return Err(Error::Invalid(format!("duplicate symbol `{name}`")));
        }
        let id = self.symbols.len();
        self.index.insert(name.clone(), id);
        self.symbols.push(Symbol { name, arity });
        Ok(id)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, id: usize) -> &Symbol {
        &self.symbols[id]
    }

    pub fn arity(&self, id: usize) -> usize {
        self.symbols[id].arity
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Ids of the nullary symbols.
    pub fn constants(&self) -> impl Iterator<Item = usize> + '_ {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, s)| s.arity == 0)
            .map(|(i, _)| i)
    }

    /// Same symbols with the same arities, regardless of declaration order.
    pub fn same_symbols(&self, other: &Signature) -> bool {
        self.len() == other.len()
            && self
                .symbols
                .iter()
                .all(|s| other.lookup(&s.name).map(|j| other.arity(j)) == Some(s.arity))
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| !c.is_whitespace() && c != '(' && c != ')' && c != '=' && c != '#')
}

fn is_variable(s: &str) -> bool {
    variable_index(s).is_some()
}

/// `x12` or `y12` to `12`.
fn variable_index(s: &str) -> Option<usize> {
    let rest = s.strip_prefix('x').or_else(|| s.strip_prefix('y'))?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

/// A term over a signature. Variables are 0-based internally and print as
/// `x1, x2, ...`.
///
/// The derived order is the canonical term order: variables first by index,
/// then applications by symbol declaration order, then arguments
/// lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(usize),
    Apply(usize, Vec<Term>),
}

impl Term {
    /// Variable with 1-based index `i`.
    pub fn var(i: usize) -> Term {
        assert!(i >= 1, "variables are 1-based");
        Term::Var(i - 1)
    }

    pub fn apply(symbol: usize, args: Vec<Term>) -> Term {
        Term::Apply(symbol, args)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Apply(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// Tree height; variables and constants have height 0.
    pub fn height(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Apply(_, args) => args.iter().map(|a| a.height() + 1).max().unwrap_or(0),
        }
    }

    /// Number of variables needed, i.e. the largest 1-based index used.
    pub fn var_bound(&self) -> usize {
        match self {
            Term::Var(i) => i + 1,
            Term::Apply(_, args) => args.iter().map(Term::var_bound).max().unwrap_or(0),
        }
    }

    /// Checks arities and that every variable index is within `var_count`.
    pub fn check(&self, sig: &Signature, var_count: usize) -> Result<()> {
        match self {
            Term::Var(i) if *i < var_count => Ok(()),
            Term::Var(i) => Err(Error::IndexOutOfRange {
                index: i + 1,
                max: var_count,
            }),
            Term::Apply(f, args) => {
                if *f >= sig.len() {
                    return Err(Error::UnknownSymbol(format!("#{f}")));
                }
                let arity = sig.arity(*f);
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: sig.symbol(*f).name.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                args.iter().try_for_each(|a| a.check(sig, var_count))
            }
        }
    }

    /// Printable form using variable prefix `x`.
    pub fn display<'a>(&'a self, sig: &'a Signature) -> TermDisplay<'a> {
        TermDisplay {
            term: self,
            sig,
            prefix: 'x',
        }
    }

    /// Replaces every variable `j` by `s.images[j]`.
    pub fn substitute(&self, s: &Substitution) -> Result<Term> {
        match self {
            Term::Var(j) => s.images.get(*j).cloned().ok_or(Error::IndexOutOfRange {
                index: j + 1,
                max: s.source_vars,
            }),
            Term::Apply(f, args) => Ok(Term::Apply(
                *f,
                args.iter()
                    .map(|a| a.substitute(s))
                    .collect::<Result<Vec<_>>>()?,
            )),
        }
    }
}

pub struct TermDisplay<'a> {
    term: &'a Term,
    sig: &'a Signature,
    prefix: char,
}

impl TermDisplay<'_> {
    pub fn with_prefix(mut self, prefix: char) -> Self {
        self.prefix = prefix;
        self
    }

    fn write(&self, t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match t {
            Term::Var(i) => write!(f, "{}{}", self.prefix, i + 1),
            Term::Apply(s, args) if args.is_empty() => f.write_str(&self.sig.symbol(*s).name),
            Term::Apply(s, args) => {
                write!(f, "({}", self.sig.symbol(*s).name)?;
                for a in args {
                    f.write_str(" ")?;
                    self.write(a, f)?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(self.term, f)
    }
}

/// The pair `(lhs, rhs)` read as the equation `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Equation { lhs, rhs }
    }

    pub fn size(&self) -> usize {
        self.lhs.size() + self.rhs.size()
    }

    pub fn var_bound(&self) -> usize {
        self.lhs.var_bound().max(self.rhs.var_bound())
    }

    pub fn check(&self, sig: &Signature, var_count: usize) -> Result<()> {
        self.lhs.check(sig, var_count)?;
        self.rhs.check(sig, var_count)
    }

    pub fn substitute(&self, s: &Substitution) -> Result<Equation> {
        Ok(Equation::new(
            self.lhs.substitute(s)?,
            self.rhs.substitute(s)?,
        ))
    }

    pub fn display<'a>(&'a self, sig: &'a Signature) -> EquationDisplay<'a> {
        EquationDisplay {
            eq: self,
            sig,
            prefix: 'x',
        }
    }
}

pub struct EquationDisplay<'a> {
    eq: &'a Equation,
    sig: &'a Signature,
    prefix: char,
}

impl EquationDisplay<'_> {
    pub fn with_prefix(mut self, prefix: char) -> Self {
        self.prefix = prefix;
        self
    }
}

impl fmt::Display for EquationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} = {}",
            self.eq.lhs.display(self.sig).with_prefix(self.prefix),
            self.eq.rhs.display(self.sig).with_prefix(self.prefix)
        )
    }
}

/// A homomorphism `W(Y) -> W(X)` given by the images of `y1..ym`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Substitution {
    source_vars: usize,
    target_vars: usize,
    images: Vec<Term>,
}

impl Substitution {
    pub fn new(
        sig: &Signature,
        source_vars: usize,
        target_vars: usize,
        images: Vec<Term>,
    ) -> Result<Self> {
        if images.len() != source_vars {
            return Err(Error::Invalid(format!(
                "substitution needs {source_vars} image(s), got {}",
                images.len()
            )));
        }
        for t in &images {
            t.check(sig, target_vars)?;
        }
        Ok(Substitution {
            source_vars,
            target_vars,
            images,
        })
    }

    pub fn identity(n: usize) -> Self {
        Substitution {
            source_vars: n,
            target_vars: n,
            images: (0..n).map(Term::Var).collect(),
        }
    }

    pub fn source_vars(&self) -> usize {
        self.source_vars
    }

    pub fn target_vars(&self) -> usize {
        self.target_vars
    }

    pub fn images(&self) -> &[Term] {
        &self.images
    }

    /// `self ∘ inner`: first `inner`, then `self`. Requires
    /// `inner.target_vars == self.source_vars`.
    pub fn compose(&self, inner: &Substitution) -> Result<Substitution> {
        if inner.target_vars != self.source_vars {
            return Err(Error::Invalid(format!(
                "cannot compose: inner target has {} variable(s), outer source has {}",
                inner.target_vars, self.source_vars
            )));
        }
        Ok(Substitution {
            source_vars: inner.source_vars,
            target_vars: self.target_vars,
            images: inner
                .images
                .iter()
                .map(|t| t.substitute(self))
                .collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token<'a> {
    Open,
    Close,
    Equals,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        let single = match c {
            '(' => Some(Token::Open),
            ')' => Some(Token::Close),
            '=' => Some(Token::Equals),
            _ => None,
        };
        if c.is_whitespace() || single.is_some() {
            if let Some(s) = start.take() {
                out.push(Token::Atom(&text[s..i]));
            }
            if let Some(t) = single {
                out.push(t);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token::Atom(&text[s..]));
    }
    out
}

struct Parser<'a, 's> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    sig: &'s Signature,
    var_count: usize,
    line: usize,
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> Option<&Token<'a>> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token<'a>> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn variable(&self, atom: &str) -> Option<Result<Term>> {
        let i = variable_index(atom)?;
        if i == 0 || i > self.var_count {
            Some(Err(Error::IndexOutOfRange {
                index: i,
                max: self.var_count,
            }))
        } else {
            Some(Ok(Term::Var(i - 1)))
        }
    }

    fn symbol(&self, atom: &str) -> Result<usize> {
        self.sig
            .lookup(atom)
            .ok_or_else(|| Error::UnknownSymbol(atom.to_string()))
    }

    fn term(&mut self) -> Result<Term> {
        match self.next() {
            Some(Token::Atom(a)) => {
                if let Some(v) = self.variable(a) {
                    return v;
                }
                let f = self.symbol(a)?;
                let arity = self.sig.arity(f);
                if arity != 0 {
                    return Err(Error::ArityMismatch {
                        symbol: a.to_string(),
                        expected: arity,
                        found: 0,
                    });
                }
                Ok(Term::Apply(f, Vec::new()))
            }
            Some(Token::Open) => {
                let name = match self.next() {
                    Some(Token::Atom(a)) => a,
                    _ => return Err(Error::parse(self.line, "expected a symbol after `(`")),
                };
                if variable_index(name).is_some() {
                    return Err(Error::parse(
                        self.line,
                        format!("variable `{name}` cannot be applied"),
                    ));
                }
                let f = self.symbol(name)?;
                let mut args = Vec::new();
                loop {
                    match self.peek() {
                        Some(Token::Close) => {
                            self.pos += 1;
                            break;
                        }
                        None => return Err(Error::parse(self.line, "unclosed `(`")),
                        _ => args.push(self.term()?),
                    }
                }
                if args.is_empty() {
                    return Err(Error::parse(
                        self.line,
                        format!("application of `{name}` has no arguments"),
                    ));
                }
                let arity = self.sig.arity(f);
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: name.to_string(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                Ok(Term::Apply(f, args))
            }
            Some(Token::Close) => Err(Error::parse(self.line, "unexpected `)`")),
            Some(Token::Equals) => Err(Error::parse(self.line, "unexpected `=`")),
            None => Err(Error::parse(self.line, "unexpected end of input")),
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(Error::parse(self.line, "trailing input after term")),
        }
    }
}

fn parser<'a, 's>(
    text: &'a str,
    sig: &'s Signature,
    var_count: usize,
    line: usize,
) -> Parser<'a, 's> {
    Parser {
        tokens: tokenize(text),
        pos: 0,
        sig,
        var_count,
        line,
    }
}

/// Parses one term in prefix syntax, e.g. `(add x1 (neg x2))`.
pub fn parse_term(text: &str, sig: &Signature, var_count: usize) -> Result<Term> {
    let mut p = parser(text, sig, var_count, 1);
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parses `lhs = rhs`.
pub fn parse_equation(text: &str, sig: &Signature, var_count: usize) -> Result<Equation> {
    parse_equation_at(text, sig, var_count, 1)
}

fn parse_equation_at(
    text: &str,
    sig: &Signature,
    var_count: usize,
    line: usize,
) -> Result<Equation> {
    let mut p = parser(text, sig, var_count, line);
    let lhs = p.term()?;
    match p.next() {
        Some(Token::Equals) => {}
        _ => return Err(Error::parse(line, "expected `=` between the two sides")),
    }
    let rhs = p.term()?;
    p.finish()?;
    Ok(Equation::new(lhs, rhs))
}

/// Parses a system file: one equation per line, `#` comment lines and blank
/// lines ignored. Errors other than syntax errors are wrapped with the line
/// number.
pub fn parse_system_lines(text: &str, sig: &Signature, var_count: usize) -> Result<Vec<Equation>> {
    non_comment_lines(text)
        .map(|(line, body)| {
            parse_equation_at(body, sig, var_count, line).map_err(|e| at_line(e, line))
        })
        .collect()
}

/// Parses a file with one term per line (substitution images).
pub fn parse_term_lines(text: &str, sig: &Signature, var_count: usize) -> Result<Vec<Term>> {
    non_comment_lines(text)
        .map(|(line, body)| {
            let mut p = parser(body, sig, var_count, line);
            let t = p.term().and_then(|t| p.finish().map(|_| t));
            t.map_err(|e| at_line(e, line))
        })
        .collect()
}

pub(crate) fn non_comment_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((i + 1, l))
        }
    })
}

fn at_line(e: Error, line: usize) -> Error {
    match e {
        Error::Parse { .. } => e,
        other => Error::parse(line, other.to_string()),
    }
}

/// All terms of height at most `depth` over `var_count` variables, sorted in
/// canonical order without duplicates.
pub fn enumerate_terms(
    sig: &Signature,
    var_count: usize,
    depth: usize,
    caps: &Caps,
) -> Result<Vec<Term>> {
    let mut level: Vec<Term> = (0..var_count).map(Term::Var).collect();
    level.extend(sig.constants().map(|c| Term::Apply(c, Vec::new())));
    Caps::check("max-terms", caps.max_terms, level.len() as u128)?;
    for _ in 0..depth {
        let prev = level.len();
        let count = sig.symbols().iter().fold(var_count as u128, |acc, s| {
            acc.saturating_add(crate::caps::pow_saturating(prev, s.arity))
        });
        Caps::check("max-terms", caps.max_terms, count)?;
        let mut next: Vec<Term> = (0..var_count).map(Term::Var).collect();
        for (f, s) in sig.symbols().iter().enumerate() {
            for_each_tuple(prev, s.arity, |idx| {
                next.push(Term::Apply(
                    f,
                    idx.iter().map(|&i| level[i].clone()).collect(),
                ));
            });
        }
        level = next;
    }
    Ok(level)
}

/// Calls `f` on every tuple in `0..base` of length `len`, in lexicographic order.
pub(crate) fn for_each_tuple(base: usize, len: usize, mut f: impl FnMut(&[usize])) {
    if len > 0 && base == 0 {
        return;
    }
    let mut idx = vec![0usize; len];
    loop {
        f(&idx);
        let mut k = len;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < base {
                break;
            }
            idx[k] = 0;
        }
    }
}
