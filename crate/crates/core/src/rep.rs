//! Finite representations `(V, G)` with `V = (Z/m)^d` and `G` acting on the
//! right by matrices: action-type terms and equations, their solution sets and
//! closures, and the triangular and wreath product constructions.
//!
//! Vectors are rows and act as `v ∘ g = v · M(g)`, so a valid action satisfies
//! `M(g) · M(h) = M(gh)`.

use std::fmt::{self, Write as _};

use crate::caps::{pow_saturating, Caps};
use crate::error::{Error, Result};
use crate::term::for_each_tuple;

/// A dense matrix over `Z/m`; the modulus is supplied by the caller.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(d: usize, modulus: u32) -> Self {
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            m.data[i * d + i] = 1 % modulus;
        }
        m
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<u32>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &Matrix, modulus: u32) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let m = modulus as u64;
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) as u64;
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out.data[i * other.cols + j] as u64;
                    out.data[i * other.cols + j] = ((cur + a * other.get(k, j) as u64) % m) as u32;
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix, modulus: u32) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| ((a as u64 + b as u64) % modulus as u64) as u32)
                .collect(),
        }
    }

    pub fn scale(&self, c: u32, modulus: u32) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&a| ((a as u64 * c as u64) % modulus as u64) as u32)
                .collect(),
        }
    }

    /// Row vector times matrix.
    pub fn apply_row(&self, v: &[u32], modulus: u32) -> Vec<u32> {
        assert_eq!(v.len(), self.rows);
        let m = modulus as u64;
        (0..self.cols)
            .map(|j| {
                (0..self.rows).fold(0u64, |acc, i| {
                    (acc + v[i] as u64 * self.get(i, j) as u64) % m
                }) as u32
            })
            .collect()
    }
}

/// A finite group given by its multiplication table `table[a * order + b] = ab`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses.
    pub fn from_table(order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 {
            return Err(Error::GroupAxiomViolation("group must be non-empty".into()));
        }
        if table.len() != order * order {
            return Err(Error::GroupAxiomViolation(format!(
                "table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        if let Some(v) = table.iter().find(|&&v| v >= order) {
            return Err(Error::GroupAxiomViolation(format!(
                "entry {v} outside 0..{order}"
            )));
        }
        let mul = |a: usize, b: usize| table[a * order + b];
        for a in 0..order {
            for b in 0..order {
                let ab = mul(a, b);
                for c in 0..order {
                    if mul(ab, c) != mul(a, mul(b, c)) {
                        return Err(Error::GroupAxiomViolation(format!(
                            "({a}*{b})*{c} != {a}*({b}*{c})"
                        )));
                    }
                }
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| mul(e, x) == x && mul(x, e) == x))
            .ok_or_else(|| Error::GroupAxiomViolation("no identity element".into()))?;
        let inverse = (0..order)
            .map(|a| {
                (0..order)
                    .find(|&b| mul(a, b) == identity && mul(b, a) == identity)
                    .ok_or_else(|| Error::GroupAxiomViolation(format!("{a} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteGroup {
            order,
            table,
            identity,
            inverse,
        })
    }

    /// The cyclic group `Z/n` under addition.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        FiniteGroup::from_table(n, table).expect("cyclic group table is valid")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Reads `group N` followed by `N^2` table entries.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = Tokens::new(text);
        let order = tokens.keyword_usize("group")?;
        let table = tokens.usizes(order * order, "group table")?;
        tokens.finish()?;
        FiniteGroup::from_table(order, table)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("group {}\n", self.order);
        write_rows(&mut out, &self.table, self.order);
        out
    }
}

fn write_rows<T: fmt::Display>(out: &mut String, values: &[T], row: usize) {
    for chunk in values.chunks(row.max(1)) {
        let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
}

struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("");
                l.split_whitespace().map(move |w| (i + 1, w))
            })
            .collect();
        Tokens { items, pos: 0 }
    }

    fn line(&self) -> usize {
        self.items
            .get(self.pos)
            .or(self.items.last())
            .map_or(0, |(l, _)| *l)
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let t = self.items.get(self.pos).copied().ok_or_else(|| {
            Error::parse(
                self.line(),
                format!("unexpected end of input, expected {what}"),
            )
        })?;
        self.pos += 1;
        Ok(t)
    }

    fn expect(&mut self, word: &str) -> Result<()> {
        let (line, w) = self.next(&format!("`{word}`"))?;
        if w != word {
            return Err(Error::parse(
                line,
                format!("expected `{word}`, found `{w}`"),
            ));
        }
        Ok(())
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        let (line, w) = self.next(what)?;
        w.parse()
            .map_err(|_| Error::parse(line, format!("bad {what} `{w}`")))
    }

    fn keyword_usize(&mut self, word: &str) -> Result<usize> {
        self.expect(word)?;
        self.usize(word)
    }

    fn usizes(&mut self, count: usize, what: &str) -> Result<Vec<usize>> {
        (0..count).map(|_| self.usize(what)).collect()
    }

    fn finish(&self) -> Result<()> {
        match self.items.get(self.pos) {
            None => Ok(()),
            Some((line, w)) => Err(Error::parse(*line, format!("unexpected trailing `{w}`"))),
        }
    }
}

/// A representation of a finite group on `(Z/m)^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteRepresentation {
    name: String,
    modulus: u32,
    dim: usize,
    group: FiniteGroup,
    action: Vec<Matrix>,
}

impl FiniteRepresentation {
    /// Validates entries, `M(identity) = I` and `M(g)M(h) = M(gh)`.
    pub fn new(
        name: impl Into<String>,
        modulus: u32,
        dim: usize,
        group: FiniteGroup,
        action: Vec<Matrix>,
    ) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::Invalid("modulus must be positive".into()));
        }
        if action.len() != group.order() {
            return Err(Error::ActionNotHomomorphic(format!(
                "{} matrices for a group of order {}",
                action.len(),
                group.order()
            )));
        }
        for (g, a) in action.iter().enumerate() {
            if a.rows() != dim || a.cols() != dim {
                return Err(Error::ActionNotHomomorphic(format!(
                    "matrix of {g} is not {dim}x{dim}"
                )));
            }
            if let Some(v) = a.entries().iter().find(|&&v| v >= modulus) {
                return Err(Error::ActionNotHomomorphic(format!(
                    "matrix of {g} has entry {v} outside Z/{modulus}"
                )));
            }
        }
        if action[group.identity()] != Matrix::identity(dim, modulus) {
            return Err(Error::ActionNotHomomorphic(
                "identity does not act as the identity matrix".into(),
            ));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                if action[g].mul(&action[h], modulus) != action[group.mul(g, h)] {
                    return Err(Error::ActionNotHomomorphic(format!(
                        "M({g})M({h}) != M({g}*{h})"
                    )));
                }
            }
        }
        Ok(FiniteRepresentation {
            name: name.into(),
            modulus,
            dim,
            group,
            action,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn matrix(&self, g: usize) -> &Matrix {
        &self.action[g]
    }

    /// `m^d`, the number of module elements.
    pub fn module_size(&self) -> u128 {
        pow_saturating(self.modulus as usize, self.dim)
    }

    /// Reads the representation file format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = Tokens::new(text);
        t.expect("rep")?;
        let (_, name) = t.next("a name")?;
        let modulus = t.keyword_usize("modulus")?;
        let dim = t.keyword_usize("dim")?;
        let order = t.keyword_usize("group")?;
        if modulus == 0 || modulus > u32::MAX as usize {
            return Err(Error::parse(t.line(), format!("bad modulus {modulus}")));
        }
        let table = t.usizes(order * order, "group table entry")?;
        t.expect("action")?;
        let mut action = Vec::with_capacity(order);
        for _ in 0..order {
            let entries = t.usizes(dim * dim, "matrix entry")?;
            action.push(Matrix::from_rows(
                dim,
                dim,
                entries.into_iter().map(|v| v as u32).collect(),
            ));
        }
        t.finish()?;
        let group = FiniteGroup::from_table(order, table)?;
        FiniteRepresentation::new(name, modulus as u32, dim, group, action)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "rep {}\nmodulus {}\ndim {}\ngroup {}\n",
            self.name,
            self.modulus,
            self.dim,
            self.group.order()
        );
        write_rows(&mut out, self.group.table(), self.group.order());
        out.push_str("action\n");
        for a in &self.action {
            if self.dim == 0 {
                continue;
            }
            write_rows(&mut out, a.entries(), self.dim);
        }
        out
    }
}

/// A letter `y_j` or `y_j^-1` of a group word; `var` is 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub var: usize,
    pub inverse: bool,
}

/// A word in the group variables; empty is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

/// `Σ x_i ∘ u_i` with each `u_i` a `Z/m`-combination of group words.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ActionTerm {
    pub summands: Vec<Summand>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Summand {
    /// 0-based module variable.
    pub var: usize,
    pub combination: Vec<(i64, Word)>,
}

impl ActionTerm {
    /// `x_var ∘ (Σ c w)` with a 1-based variable index.
    pub fn single(var: usize, combination: Vec<(i64, Word)>) -> Self {
        ActionTerm {
            summands: vec![Summand {
                var: var - 1,
                combination,
            }],
        }
    }

    pub fn plus(mut self, other: ActionTerm) -> Self {
        self.summands.extend(other.summands);
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        ActionParser::new(text)?.term()
    }

    fn check(&self, size_x: usize, size_y: usize) -> Result<()> {
        for s in &self.summands {
            if s.var >= size_x {
                return Err(Error::IndexOutOfRange {
                    index: s.var + 1,
                    max: size_x,
                });
            }
            for (_, w) in &s.combination {
                if let Some(l) = w.0.iter().find(|l| l.var >= size_y) {
                    return Err(Error::IndexOutOfRange {
                        index: l.var + 1,
                        max: size_y,
                    });
                }
            }
        }
        Ok(())
    }
}

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// Parses `1`, `y1`, `y1*y2^-1`, ...
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = ActionParser::new(text)?;
        let w = p.word()?;
        p.finish()?;
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            write!(f, "y{}", l.var + 1)?;
            if l.inverse {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for ActionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.summands.is_empty() {
            return f.write_str("0");
        }
        for (i, s) in self.summands.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "x{} * (", s.var + 1)?;
            for (k, (c, w)) in s.combination.iter().enumerate() {
                let (sign, mag) = if *c < 0 {
                    ("-", c.unsigned_abs())
                } else {
                    ("+", *c as u64)
                };
                match (k, sign) {
                    (0, "-") => f.write_str("-")?,
                    (0, _) => {}
                    (_, s) => write!(f, " {s} ")?,
                }
                if mag != 1 {
                    write!(f, "{mag} ")?;
                }
                write!(f, "{w}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum ATok {
    X(usize),
    Y(usize),
    Int(i64),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

struct ActionParser {
    toks: Vec<ATok>,
    pos: usize,
}

impl ActionParser {
    fn new(text: &str) -> Result<Self> {
        let mut toks = Vec::new();
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let single = match c {
                '+' => Some(ATok::Plus),
                '-' => Some(ATok::Minus),
                '*' => Some(ATok::Star),
                '^' => Some(ATok::Caret),
                '(' => Some(ATok::Open),
                ')' => Some(ATok::Close),
                _ => None,
            };
            if let Some(t) = single {
                toks.push(t);
                i += 1;
                continue;
            }
            let start = i;
            if c == 'x' || c == 'y' {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            let digits = word.trim_start_matches(['x', 'y']);
            if digits.is_empty() || (c != 'x' && c != 'y' && !c.is_ascii_digit()) {
                return Err(Error::parse(1, format!("unexpected `{c}` in action term")));
            }
            let v: i64 = digits
                .parse()
                .map_err(|_| Error::parse(1, format!("bad number `{digits}`")))?;
            toks.push(match c {
                'x' | 'y' if v == 0 => return Err(Error::IndexOutOfRange { index: 0, max: 0 }),
                'x' => ATok::X(v as usize - 1),
                'y' => ATok::Y(v as usize - 1),
                _ => ATok::Int(v),
            });
        }
        Ok(ActionParser { toks, pos: 0 })
    }

    fn peek(&self) -> Option<&ATok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, t: &ATok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(Error::parse(1, format!("unexpected {t:?} in action term"))),
        }
    }

    fn term(&mut self) -> Result<ActionTerm> {
        let mut summands = Vec::new();
        let mut negate = self.eat(&ATok::Minus);
        if self.peek() == Some(&ATok::Int(0)) && self.toks.len() == 1 {
            self.pos += 1;
            return Ok(ActionTerm::default());
        }
        loop {
            let mut s = self.summand()?;
            if negate {
                for (c, _) in &mut s.combination {
                    *c = -*c;
                }
            }
            summands.push(s);
            if self.eat(&ATok::Plus) {
                negate = false;
            } else if self.eat(&ATok::Minus) {
                negate = true;
            } else {
                break;
            }
        }
        self.finish()?;
        Ok(ActionTerm { summands })
    }

    fn summand(&mut self) -> Result<Summand> {
        let var = match self.peek() {
            Some(ATok::X(v)) => *v,
            other => {
                return Err(Error::parse(
                    1,
                    format!("expected a module variable, found {other:?}"),
                ))
            }
        };
        self.pos += 1;
        if !self.eat(&ATok::Star) {
            return Ok(Summand {
                var,
                combination: vec![(1, Word::empty())],
            });
        }
        if !self.eat(&ATok::Open) {
            let w = self.word()?;
            return Ok(Summand {
                var,
                combination: vec![(1, w)],
            });
        }
        let mut combination = Vec::new();
        let mut sign = if self.eat(&ATok::Minus) { -1 } else { 1 };
        loop {
            let coeff = match (self.peek(), self.toks.get(self.pos + 1)) {
                (Some(ATok::Int(c)), Some(ATok::Y(_) | ATok::Int(_))) => {
                    let c = *c;
                    self.pos += 1;
                    c
                }
                (Some(ATok::Int(c)), _) if *c != 1 => {
                    let c = *c;
                    self.pos += 1;
                    combination.push((sign * c, Word::empty()));
                    if !self.next_sign(&mut sign)? {
                        break;
                    }
                    continue;
                }
                _ => 1,
            };
            let w = self.word()?;
            combination.push((sign * coeff, w));
            if !self.next_sign(&mut sign)? {
                break;
            }
        }
        if !self.eat(&ATok::Close) {
            return Err(Error::parse(
                1,
                "expected `)` closing the group-algebra element",
            ));
        }
        Ok(Summand { var, combination })
    }

    fn next_sign(&mut self, sign: &mut i64) -> Result<bool> {
        if self.eat(&ATok::Plus) {
            *sign = 1;
            Ok(true)
        } else if self.eat(&ATok::Minus) {
            *sign = -1;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    fn word(&mut self) -> Result<Word> {
        if self.eat(&ATok::Int(1)) {
            return Ok(Word::empty());
        }
        let mut letters = Vec::new();
        loop {
            let var = match self.peek() {
                Some(ATok::Y(v)) => *v,
                other => {
                    return Err(Error::parse(
                        1,
                        format!("expected a group variable, found {other:?}"),
                    ))
                }
            };
            self.pos += 1;
            let mut inverse = false;
            if self.eat(&ATok::Caret) {
                if !(self.eat(&ATok::Minus) && self.eat(&ATok::Int(1))) {
                    return Err(Error::parse(1, "only `^-1` exponents are allowed"));
                }
                inverse = true;
            }
            letters.push(Letter { var, inverse });
            let is_letter_next = self.peek() == Some(&ATok::Star)
                && matches!(self.toks.get(self.pos + 1), Some(ATok::Y(_)));
            if is_letter_next {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok(Word(letters))
    }
}

/// Values of the module variables and the group variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RepPoint {
    pub module: Vec<Vec<u32>>,
    pub group: Vec<usize>,
}

impl fmt::Display for RepPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("x=[")?;
        for (i, v) in self.module.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            let parts: Vec<String> = v.iter().map(u32::to_string).collect();
            write!(f, "({})", parts.join(","))?;
        }
        f.write_str("] y=[")?;
        let parts: Vec<String> = self.group.iter().map(usize::to_string).collect();
        write!(f, "{}]", parts.join(","))
    }
}

fn reduce(c: i64, modulus: u32) -> u32 {
    c.rem_euclid(modulus as i64) as u32
}

/// Value of a group word under the group assignment.
fn word_value(r: &FiniteRepresentation, w: &Word, group: &[usize]) -> usize {
    let g = r.group();
    w.0.iter().fold(g.identity(), |acc, l| {
        let v = group[l.var];
        g.mul(acc, if l.inverse { g.inverse(v) } else { v })
    })
}

/// `Σ x_i · (Σ c M(w))` over `Z/m`.
pub fn evaluate_action_term(
    r: &FiniteRepresentation,
    w: &ActionTerm,
    p: &RepPoint,
) -> Result<Vec<u32>> {
    w.check(p.module.len(), p.group.len())?;
    if p.module.iter().any(|v| v.len() != r.dim())
        || p.group.iter().any(|&g| g >= r.group().order())
    {
        return Err(Error::Invalid(
            "point does not fit the representation".into(),
        ));
    }
    let m = r.modulus();
    let mut out = vec![0u32; r.dim()];
    for s in &w.summands {
        let mut combo = Matrix::zeros(r.dim(), r.dim());
        for (c, word) in &s.combination {
            let g = word_value(r, word, &p.group);
            combo = combo.add(&r.matrix(g).scale(reduce(*c, m), m), m);
        }
        let part = combo.apply_row(&p.module[s.var], m);
        for (o, v) in out.iter_mut().zip(part) {
            *o = ((*o as u64 + v as u64) % m as u64) as u32;
        }
    }
    Ok(out)
}

/// Every point at which all terms evaluate to zero, in point order.
pub fn solve_action_system(
    r: &FiniteRepresentation,
    size_x: usize,
    size_y: usize,
    terms: &[ActionTerm],
    caps: &Caps,
) -> Result<Vec<RepPoint>> {
    for t in terms {
        t.check(size_x, size_y)?;
    }
    let count = pow_saturating(r.modulus() as usize, r.dim() * size_x)
        .saturating_mul(pow_saturating(r.group().order(), size_y));
    Caps::check("max-points", caps.max_points, count)?;
    let mut out = Vec::new();
    let mut failure = None;
    for_each_tuple(r.modulus() as usize, r.dim() * size_x, |flat| {
        let module: Vec<Vec<u32>> = flat
            .chunks(r.dim().max(1))
            .take(size_x)
            .map(|c| c.iter().map(|&v| v as u32).collect())
            .collect();
        let module = if r.dim() == 0 {
            vec![Vec::new(); size_x]
        } else {
            module
        };
        for_each_tuple(r.group().order(), size_y, |group| {
            if failure.is_some() {
                return;
            }
            let p = RepPoint {
                module: module.clone(),
                group: group.to_vec(),
            };
            let mut zero = true;
            for t in terms {
                match evaluate_action_term(r, t, &p) {
                    Ok(v) if v.iter().all(|&c| c == 0) => {}
                    Ok(_) => {
                        zero = false;
                        break;
                    }
                    Err(e) => {
                        failure = Some(e);
                        return;
                    }
                }
            }
            if zero {
                out.push(p);
            }
        });
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Whether `w0 ≡ 0` holds at every solution of `terms`.
pub fn action_closure_contains(
    r: &FiniteRepresentation,
    size_x: usize,
    size_y: usize,
    terms: &[ActionTerm],
    w0: &ActionTerm,
    caps: &Caps,
) -> Result<bool> {
    w0.check(size_x, size_y)?;
    for p in solve_action_system(r, size_x, size_y, terms, caps)? {
        if evaluate_action_term(r, w0, &p)?.iter().any(|&c| c != 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Element `(g1, g2, φ)` of a triangular product, `φ ∈ Hom(V2, V1)` stored as
/// a `d2 × d1` matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriangularElement {
    pub g1: usize,
    pub g2: usize,
    pub phi: Matrix,
}

/// Block upper-triangular form `[[g2, φ·g1], [0, g1]]` on rows `(b, a)` with
/// `b ∈ V2`, `a ∈ V1`. Diagonal blocks stay group elements; `corner` is the
/// matrix `φ·M1(g1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriangularBlock {
    pub g1: usize,
    pub g2: usize,
    pub corner: Matrix,
}

/// `(V1, G1) ▽ (V2, G2)` together with the codec for its group elements.
#[derive(Debug, Clone)]
pub struct TriangularProduct {
    pub left: FiniteRepresentation,
    pub right: FiniteRepresentation,
    pub rep: FiniteRepresentation,
}

impl TriangularProduct {
    fn phi_count(&self) -> usize {
        self.left
            .modulus()
            .pow((self.left.dim() * self.right.dim()) as u32) as usize
    }

    pub fn encode(&self, e: &TriangularElement) -> usize {
        let m = self.left.modulus() as usize;
        let code = e
            .phi
            .entries()
            .iter()
            .fold(0usize, |acc, &v| acc * m + v as usize);
        (e.g1 * self.right.group().order() + e.g2) * self.phi_count() + code
    }

    pub fn decode(&self, idx: usize) -> TriangularElement {
        let (d1, d2) = (self.left.dim(), self.right.dim());
        let m = self.left.modulus() as usize;
        let phis = self.phi_count();
        let (pair, mut code) = (idx / phis, idx % phis);
        let mut entries = vec![0u32; d1 * d2];
        for e in entries.iter_mut().rev() {
            *e = (code % m) as u32;
            code /= m;
        }
        TriangularElement {
            g1: pair / self.right.group().order(),
            g2: pair % self.right.group().order(),
            phi: Matrix::from_rows(d2, d1, entries),
        }
    }

    /// Image in block-triangular form.
    pub fn block(&self, idx: usize) -> TriangularBlock {
        let e = self.decode(idx);
        TriangularBlock {
            g1: e.g1,
            g2: e.g2,
            corner: e.phi.mul(self.left.matrix(e.g1), self.left.modulus()),
        }
    }

    /// Block-matrix multiplication of two block forms.
    pub fn block_mul(&self, x: &TriangularBlock, y: &TriangularBlock) -> TriangularBlock {
        let m = self.left.modulus();
        let corner = x
            .corner
            .mul(self.left.matrix(y.g1), m)
            .add(&self.right.matrix(x.g2).mul(&y.corner, m), m);
        TriangularBlock {
            g1: self.left.group().mul(x.g1, y.g1),
            g2: self.right.group().mul(x.g2, y.g2),
            corner,
        }
    }
}

/// The triangular product on `V1 ⊕ V2`.
///
/// An element `(g1, g2, φ)` acts by `a ↦ a∘g1` on `V1` and
/// `b ↦ b∘g2 + (bφ)∘g1` on `V2`. Composition gives
/// `(g1,g2,φ)(h1,h2,ψ) = (g1h1, g2h2, φ + M2(g2) ψ M1(g1)^-1)`.
pub fn triangular_product(
    left: &FiniteRepresentation,
    right: &FiniteRepresentation,
    caps: &Caps,
) -> Result<TriangularProduct> {
    if left.modulus() != right.modulus() {
        return Err(Error::ModulusMismatch(left.modulus(), right.modulus()));
    }
    let m = left.modulus();
    let (d1, d2) = (left.dim(), right.dim());
    let (g1s, g2s) = (left.group(), right.group());
    let order = (g1s.order() as u128 * g2s.order() as u128)
        .saturating_mul(pow_saturating(m as usize, d1 * d2));
    Caps::check("max-group-order", caps.max_group_order, order)?;
    let order = order as usize;

    let mut shell = TriangularProduct {
        left: left.clone(),
        right: right.clone(),
        rep: left.clone(),
    };
    let elems: Vec<TriangularElement> = (0..order).map(|i| shell.decode(i)).collect();
    let mut table = Vec::with_capacity(order * order);
    for x in &elems {
        let twist_left = left.matrix(g1s.inverse(x.g1));
        let twist_right = right.matrix(x.g2);
        for y in &elems {
            let phi = x.phi.add(&twist_right.mul(&y.phi, m).mul(twist_left, m), m);
            table.push(shell.encode(&TriangularElement {
                g1: g1s.mul(x.g1, y.g1),
                g2: g2s.mul(x.g2, y.g2),
                phi,
            }));
        }
    }
    let group = FiniteGroup::from_table(order, table)?;
    let d = d1 + d2;
    let action = elems
        .iter()
        .map(|e| {
            let mut a = Matrix::zeros(d, d);
            let upper = left.matrix(e.g1);
            let lower = right.matrix(e.g2);
            let corner = e.phi.mul(upper, m);
            for i in 0..d1 {
                for j in 0..d1 {
                    a.set(i, j, upper.get(i, j));
                }
            }
            for i in 0..d2 {
                for j in 0..d1 {
                    a.set(d1 + i, j, corner.get(i, j));
                }
                for j in 0..d2 {
                    a.set(d1 + i, d1 + j, lower.get(i, j));
                }
            }
            a
        })
        .collect();
    shell.rep = FiniteRepresentation::new(
        format!("{}_tri_{}", left.name(), right.name()),
        m,
        d,
        group,
        action,
    )?;
    Ok(shell)
}

/// `(V, H) wr G = (V^G, H wr G)`.
///
/// Group elements `(f, g)` with `f: G → H` are encoded as
/// `code(f) * |G| + g`, `f` in mixed radix with `f(0)` most significant, and
/// multiply as `(f, g)(k, g') = (t ↦ f(t) k(tg), gg')`. A function
/// `v: G → V` is acted on by `(v ∘ (f, g))(t) = v(t g^-1) ∘ f(t g^-1)`.
pub fn wreath_product(
    r: &FiniteRepresentation,
    top: &FiniteGroup,
    caps: &Caps,
) -> Result<FiniteRepresentation> {
    let h = r.group();
    let n = top.order();
    let order = pow_saturating(h.order(), n).saturating_mul(n as u128);
    Caps::check("max-group-order", caps.max_group_order, order)?;
    let order = order as usize;
    let hs = h.order();
    let decode = |idx: usize| -> (Vec<usize>, usize) {
        let (mut code, g) = (idx / n, idx % n);
        let mut f = vec![0; n];
        for v in f.iter_mut().rev() {
            *v = code % hs;
            code /= hs;
        }
        (f, g)
    };
    let encode = |f: &[usize], g: usize| f.iter().fold(0, |acc, &v| acc * hs + v) * n + g;
    let elems: Vec<(Vec<usize>, usize)> = (0..order).map(decode).collect();
    let mut table = Vec::with_capacity(order * order);
    for (f, g) in &elems {
        for (k, g2) in &elems {
            let prod: Vec<usize> = (0..n).map(|t| h.mul(f[t], k[top.mul(t, *g)])).collect();
            table.push(encode(&prod, top.mul(*g, *g2)));
        }
    }
    let group = FiniteGroup::from_table(order, table)?;
    let d = r.dim();
    let action = elems
        .iter()
        .map(|(f, g)| {
            let mut a = Matrix::zeros(d * n, d * n);
            for s in 0..n {
                let block = r.matrix(f[s]);
                let col = top.mul(s, *g);
                for i in 0..d {
                    for j in 0..d {
                        a.set(s * d + i, col * d + j, block.get(i, j));
                    }
                }
            }
            a
        })
        .collect();
    FiniteRepresentation::new(
        format!("{}_wr_{}", r.name(), n),
        r.modulus(),
        d * n,
        group,
        action,
    )
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const REGULAR_C2_Z3: &str =
        "rep reg\nmodulus 3\ndim 2\ngroup 2\n0 1\n1 0\naction\n1 0\n0 1\n0 1\n1 0\n";
    pub(crate) const REGULAR_C2_Z2: &str =
        "rep reg2\nmodulus 2\ndim 2\ngroup 2\n0 1\n1 0\naction\n1 0\n0 1\n0 1\n1 0\n";
    pub(crate) const SIGN_C2_Z2: &str =
        "rep sign\nmodulus 2\ndim 1\ngroup 2\n0 1\n1 0\naction\n1\n1\n";

    fn rep(text: &str) -> FiniteRepresentation {
        FiniteRepresentation::parse(text).unwrap()
    }

    fn term(text: &str) -> ActionTerm {
        ActionTerm::parse(text).unwrap()
    }

    #[test]
    fn loads_examples() {
        let sign = rep(SIGN_C2_Z2);
        assert_eq!(sign.group().order(), 2);
        let reg = rep(REGULAR_C2_Z3);
        let swap = reg.matrix(1);
        assert_eq!(swap.mul(swap, 3), Matrix::identity(2, 3));
        assert_eq!(FiniteRepresentation::parse(&reg.to_text()).unwrap(), reg);
    }

    #[test]
    fn load_errors() {
        let bad_action = "rep bad\nmodulus 3\ndim 1\ngroup 2\n0 1\n1 0\naction\n1\n0\n";
        assert!(matches!(
            FiniteRepresentation::parse(bad_action),
            Err(Error::ActionNotHomomorphic(_))
        ));
        let bad_group = "rep bad\nmodulus 2\ndim 1\ngroup 2\n0 0\n1 0\naction\n1\n1\n";
        assert!(matches!(
            FiniteRepresentation::parse(bad_group),
            Err(Error::GroupAxiomViolation(_))
        ));
        assert!(matches!(
            FiniteRepresentation::parse("rep x\nmodulus 2\ndim 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            FiniteRepresentation::parse("rep x\nmodulus 2\ndim 1\ngroup 1\n0\naction\n1\n5\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn action_term_syntax() {
        let t = term("x1 * (y1 + y1^-1)");
        assert_eq!(t.to_string(), "x1 * (y1 + y1^-1)");
        let t = term("x1 * (2 y1*y2^-1 - 1) + x2 * (1)");
        assert_eq!(t.summands.len(), 2);
        assert_eq!(t.summands[0].combination[0].0, 2);
        assert_eq!(t.summands[0].combination[0].1 .0.len(), 2);
        assert_eq!(t.summands[0].combination[1], (-1, Word::empty()));
        assert_eq!(term(&t.to_string()), t);
        assert_eq!(term("x1").summands[0].combination, vec![(1, Word::empty())]);
        assert_eq!(
            term("x1 * (3)").summands[0].combination,
            vec![(3, Word::empty())]
        );
        assert_eq!(
            term("x1 * (3 1)").summands[0].combination,
            vec![(3, Word::empty())]
        );
        let neg = term("x1 * (y1) - x1 * (1)");
        assert_eq!(neg.summands[1].combination, vec![(-1, Word::empty())]);
        assert!(ActionTerm::parse("x1 * (y1").is_err());
        assert!(ActionTerm::parse("x1 * (y1^2)").is_err());
        assert!(ActionTerm::parse("y1").is_err());
        assert_eq!(Word::parse("y2*y1^-1").unwrap().to_string(), "y2*y1^-1");
    }

    #[test]
    fn evaluation_examples() {
        let reg = rep(REGULAR_C2_Z3);
        let p = RepPoint {
            module: vec![vec![2, 1]],
            group: vec![1],
        };
        assert_eq!(
            evaluate_action_term(&reg, &term("x1 * (1)"), &p).unwrap(),
            vec![2, 1]
        );
        let p = RepPoint {
            module: vec![vec![1, 0]],
            group: vec![1],
        };
        assert_eq!(
            evaluate_action_term(&reg, &term("x1 * (y1) + x1 * (y1^-1)"), &p).unwrap(),
            vec![0, 2]
        );
        assert_eq!(
            evaluate_action_term(&reg, &term("x1 * (1 - 1)"), &p).unwrap(),
            vec![0, 0]
        );
        assert!(matches!(
            evaluate_action_term(&reg, &term("x2"), &p),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            evaluate_action_term(&reg, &term("x1 * (y2)"), &p),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn solve_examples() {
        let caps = Caps::default();
        let reg = rep(REGULAR_C2_Z2);
        assert_eq!(
            solve_action_system(&reg, 1, 1, &[], &caps).unwrap().len(),
            8
        );
        let zero_fiber = solve_action_system(&reg, 1, 1, &[term("x1")], &caps).unwrap();
        assert_eq!(zero_fiber.len(), 2);
        assert!(zero_fiber.iter().all(|p| p.module[0] == vec![0, 0]));
        let fixed = solve_action_system(&reg, 1, 1, &[term("x1 * (y1 - 1)")], &caps).unwrap();
        // identity: all 4 vectors; swap: (0,0) and (1,1)
        assert_eq!(fixed.len(), 6);
    }

    #[test]
    fn closure_examples() {
        let caps = Caps::default();
        let reg = rep(REGULAR_C2_Z3);
        assert!(
            action_closure_contains(&reg, 1, 1, &[term("x1")], &term("x1 * (y1)"), &caps).unwrap()
        );
        assert!(action_closure_contains(&reg, 1, 1, &[], &term("x1 * (3)"), &caps).unwrap());
        assert!(!action_closure_contains(&reg, 1, 1, &[], &term("x1 * (y1 - 1)"), &caps).unwrap());
    }

    #[test]
    fn point_cap() {
        let caps = Caps {
            max_points: 10,
            ..Caps::default()
        };
        let reg = rep(REGULAR_C2_Z3);
        assert!(solve_action_system(&reg, 1, 1, &[], &caps)
            .unwrap_err()
            .is_size_limit());
    }

    #[test]
    fn triangular_small() {
        let caps = Caps::default();
        let sign = rep(SIGN_C2_Z2);
        let tri = triangular_product(&sign, &sign, &caps).unwrap();
        assert_eq!(tri.rep.group().order(), 8);
        assert_eq!(tri.rep.dim(), 2);
        let id = tri.rep.group().identity();
        assert_eq!(
            tri.decode(id),
            TriangularElement {
                g1: 0,
                g2: 0,
                phi: Matrix::zeros(1, 1)
            }
        );
        assert_eq!(tri.rep.matrix(id), &Matrix::identity(2, 2));
        let reg = rep(REGULAR_C2_Z3);
        assert!(matches!(
            triangular_product(&sign, &reg, &caps),
            Err(Error::ModulusMismatch(2, 3))
        ));
    }

    #[test]
    fn wreath_small() {
        let caps = Caps::default();
        let sign = rep(SIGN_C2_Z2);
        let w = wreath_product(&sign, &FiniteGroup::cyclic(2), &caps).unwrap();
        assert_eq!(w.group().order(), 8);
        assert_eq!(w.dim(), 2);
        let trivial = wreath_product(&sign, &FiniteGroup::cyclic(1), &caps).unwrap();
        assert_eq!(trivial.group(), sign.group());
        assert_eq!(trivial.dim(), sign.dim());
        let tight = Caps {
            max_group_order: 4,
            ..caps
        };
        assert!(wreath_product(&sign, &FiniteGroup::cyclic(2), &tight)
            .unwrap_err()
            .is_size_limit());
    }

    #[test]
    fn group_file_round_trip() {
        let g = FiniteGroup::cyclic(3);
        assert_eq!(FiniteGroup::parse(&g.to_text()).unwrap(), g);
        assert!(FiniteGroup::parse("group 2\n0 1\n1\n").is_err());
    }
}
