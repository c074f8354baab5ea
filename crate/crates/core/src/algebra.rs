//! Finite algebras given by operation tables: loading, evaluation, direct
//! products, subalgebra generation and homomorphism enumeration.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::hash::Hash;

use crate::caps::{pow_saturating, Caps};
use crate::error::{Error, Result};
use crate::term::{for_each_tuple, Signature, Term};

/// An algebra on the carrier `{0..size-1}` with one total table per symbol.
///
/// The table of a `k`-ary symbol lists `size^k` values in lexicographic order
/// of argument tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    signature: Signature,
    size: usize,
    tables: Vec<Vec<usize>>,
}

impl FiniteAlgebra {
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        size: usize,
        tables: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyCarrier);
        }
        if tables.len() != signature.len() {
            return Err(Error::table(
                0,
                format!(
                    "{} table(s) for {} symbol(s)",
                    tables.len(),
                    signature.len()
                ),
            ));
        }
        for (s, t) in signature.symbols().iter().zip(&tables) {
            let expected = pow_saturating(size, s.arity);
            if t.len() as u128 != expected {
                return Err(Error::table(
                    0,
                    format!(
                        "table of `{}` has {} entries, expected {expected}",
                        s.name,
                        t.len()
                    ),
                ));
            }
            if let Some(v) = t.iter().find(|&&v| v >= size) {
                return Err(Error::table(
                    0,
                    format!("table of `{}` contains {v}, outside 0..{size}", s.name),
                ));
            }
        }
        Ok(FiniteAlgebra {
            name: name.into(),
            signature,
            size,
            tables,
        })
    }

    /// The one-element algebra: every operation returns 0.
    pub fn trivial(signature: &Signature) -> Self {
        let tables = signature.symbols().iter().map(|_| vec![0]).collect();
        FiniteAlgebra {
            name: "1".into(),
            signature: signature.clone(),
            size: 1,
            tables,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self, op: usize) -> &[usize] {
        &self.tables[op]
    }

    /// Value of operation `op` at `args`.
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let code = args.iter().fold(0, |acc, &a| acc * self.size + a);
        self.tables[op][code]
    }

    /// Evaluates `term` at `point`, the values of `x1..xn`.
    pub fn evaluate(&self, term: &Term, point: &[usize]) -> Result<usize> {
        match term {
            Term::Var(i) => point.get(*i).copied().ok_or(Error::IndexOutOfRange {
                index: i + 1,
                max: point.len(),
            }),
            Term::Apply(f, args) => {
                if *f >= self.signature.len() {
                    return Err(Error::UnknownSymbol(format!("#{f}")));
                }
                let arity = self.signature.arity(*f);
                if arity != args.len() {
                    return Err(Error::ArityMismatch {
                        symbol: self.signature.symbol(*f).name.clone(),
                        expected: arity,
                        found: args.len(),
                    });
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.evaluate(a, point)?);
                }
                Ok(self.apply(*f, &vals))
            }
        }
    }

    /// Same algebra with its tables reordered to follow `signature`, which
    /// must declare the same symbols.
    pub fn with_signature(&self, signature: &Signature) -> Result<Self> {
        if !self.signature.same_symbols(signature) {
            return Err(Error::SignatureMismatch(format!(
                "`{}` does not declare the same symbols",
                self.name
            )));
        }
        let tables = signature
            .symbols()
            .iter()
            .map(|s| self.tables[self.signature.lookup(&s.name).unwrap()].clone())
            .collect();
        Ok(FiniteAlgebra {
            name: self.name.clone(),
            signature: signature.clone(),
            size: self.size,
            tables,
        })
    }

    pub(crate) fn require_same_signature(&self, other: &FiniteAlgebra) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch(format!(
                "`{}` and `{}` have different signatures",
                self.name, other.name
            )));
        }
        Ok(())
    }

    /// Parses the algebra file format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| {
                let l = l.split('#').next().unwrap_or("");
                l.split_whitespace().map(move |w| (i + 1, w))
            })
            .peekable();
        let mut keyword = |expected: &str| -> Result<(usize, String)> {
            match tokens.next() {
                Some((line, w)) if w == expected => match tokens.next() {
                    Some((_, v)) => Ok((line, v.to_string())),
                    None => Err(Error::parse(line, format!("`{expected}` needs a value"))),
                },
                Some((line, w)) => Err(Error::parse(
                    line,
                    format!("expected `{expected}`, found `{w}`"),
                )),
                None => Err(Error::parse(0, format!("missing `{expected}`"))),
            }
        };
        let (_, name) = keyword("algebra")?;
        let (size_line, size) = keyword("size")?;
        let size: usize = size
            .parse()
            .map_err(|_| Error::parse(size_line, format!("bad size `{size}`")))?;
        if size == 0 {
            return Err(Error::EmptyCarrier);
        }

        let mut signature = Signature::default();
        let mut tables = Vec::new();
        while let Some((line, w)) = tokens.next() {
            if w != "op" {
                return Err(Error::parse(line, format!("expected `op`, found `{w}`")));
            }
            let (op_name, arity) = match (tokens.next(), tokens.next()) {
                (Some((_, n)), Some((al, a))) => {
                    let arity: usize = a
                        .parse()
                        .map_err(|_| Error::parse(al, format!("bad arity `{a}`")))?;
                    (n.to_string(), arity)
                }
                _ => return Err(Error::parse(line, "`op` needs a name and an arity")),
            };
            signature
                .push(op_name.clone(), arity)
                .map_err(|e| Error::parse(line, e.to_string()))?;
            let count = pow_saturating(size, arity);
            if count > 100_000_000 {
                return Err(Error::table(
                    line,
                    format!("table of `{op_name}` is too large"),
                ));
            }
            let mut table = Vec::with_capacity(count as usize);
            while (table.len() as u128) < count {
                match tokens.peek() {
                    Some((_, "op")) | None => {
                        return Err(Error::table(
                            line,
                            format!(
                                "table of `{op_name}` has {} entries, expected {count}",
                                table.len()
                            ),
                        ))
                    }
                    Some(&(vl, v)) => {
                        let v: usize = v
                            .parse()
                            .map_err(|_| Error::parse(vl, format!("bad table entry `{v}`")))?;
                        if v >= size {
                            return Err(Error::table(vl, format!("entry {v} outside 0..{size}")));
                        }
                        table.push(v);
                        tokens.next();
                    }
                }
            }
            if let Some(&(vl, v)) = tokens.peek() {
                if v != "op" {
                    return Err(Error::table(
                        vl,
                        format!("table of `{op_name}` has extra entries"),
                    ));
                }
            }
            tables.push(table);
        }
        FiniteAlgebra::new(name, signature, size, tables)
    }

    /// Writes the algebra file format; `parse` reads it back unchanged.
    pub fn to_text(&self) -> String {
        let mut out = format!("algebra {}\nsize {}\n", self.name, self.size);
        for (s, t) in self.signature.symbols().iter().zip(&self.tables) {
            let _ = writeln!(out, "op {} {}", s.name, s.arity);
            let row = if t.len() <= 32 { t.len() } else { self.size };
            for chunk in t.chunks(row.max(1)) {
                let line: Vec<String> = chunk.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(out, "{}", line.join(" "));
            }
        }
        out
    }

    /// Least subset containing `generators` and the constants, closed under all
    /// operations.
    pub fn generate_subalgebra(&self, generators: &BTreeSet<usize>) -> BTreeSet<usize> {
        let gens: Vec<usize> = generators
            .iter()
            .copied()
            .filter(|&g| g < self.size)
            .collect();
        saturate(&self.signature, &gens, usize::MAX, |op, args| {
            let code = args.iter().fold(0, |acc, &&a| acc * self.size + a);
            self.tables[op][code]
        })
        .map(|g| g.elements.into_iter().collect())
        .unwrap_or_default()
    }

    /// A generating set chosen greedily in increasing element order.
    pub fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = BTreeSet::new();
        let mut reached = self.generate_subalgebra(&gens);
        for a in 0..self.size {
            if !reached.contains(&a) {
                gens.insert(a);
                reached = self.generate_subalgebra(&gens);
            }
        }
        gens.into_iter().collect()
    }

    /// True iff `map` preserves every operation table from `self` to `target`.
    pub fn is_homomorphism(&self, target: &FiniteAlgebra, map: &[usize]) -> bool {
        if map.len() != self.size || map.iter().any(|&v| v >= target.size) {
            return false;
        }
        (0..self.signature.len()).all(|op| {
            let arity = self.signature.arity(op);
            let mut ok = true;
            let mut img = vec![0; arity];
            for_each_tuple(self.size, arity, |args| {
                if ok {
                    for (i, &a) in args.iter().enumerate() {
                        img[i] = map[a];
                    }
                    ok = map[self.apply(op, args)] == target.apply(op, &img);
                }
            });
            ok
        })
    }
}

/// A homomorphism between two finite algebras, stored as the image of each
/// source element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Homomorphism {
    pub map: Vec<usize>,
}

/// Mixed-radix codec for product carriers, first factor most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductIndex {
    radices: Vec<usize>,
}

impl ProductIndex {
    pub fn new(radices: Vec<usize>) -> Self {
        ProductIndex { radices }
    }

    pub fn size(&self) -> usize {
        self.radices.iter().product()
    }

    pub fn encode(&self, parts: &[usize]) -> usize {
        parts
            .iter()
            .zip(&self.radices)
            .fold(0, |acc, (&p, &r)| acc * r + p)
    }

    pub fn decode(&self, mut code: usize) -> Vec<usize> {
        let mut parts = vec![0; self.radices.len()];
        for (p, &r) in parts.iter_mut().zip(&self.radices).rev() {
            *p = code % r;
            code /= r;
        }
        parts
    }
}

/// Cartesian product of algebras over `signature`; the empty product is the
/// one-element algebra.
pub fn direct_product(
    signature: &Signature,
    factors: &[&FiniteAlgebra],
    caps: &Caps,
) -> Result<FiniteAlgebra> {
    for f in factors {
        if f.signature() != signature {
            return Err(Error::SignatureMismatch(format!(
                "factor `{}` has a different signature",
                f.name()
            )));
        }
    }
    let size = factors
        .iter()
        .fold(1u128, |acc, f| acc.saturating_mul(f.size() as u128));
    Caps::check("max-elements", caps.max_elements, size)?;
    let size = size as usize;
    for s in signature.symbols() {
        Caps::check(
            "max-elements",
            caps.max_elements,
            pow_saturating(size, s.arity),
        )?;
    }
    let index = ProductIndex::new(factors.iter().map(|f| f.size()).collect());
    let decoded: Vec<Vec<usize>> = (0..size).map(|c| index.decode(c)).collect();
    let tables = (0..signature.len())
        .map(|op| {
            let arity = signature.arity(op);
            let mut table = Vec::with_capacity(pow_saturating(size, arity) as usize);
            let mut parts = vec![0; factors.len()];
            let mut comp = vec![0; arity];
            for_each_tuple(size, arity, |args| {
                for (i, f) in factors.iter().enumerate() {
                    for (j, &a) in args.iter().enumerate() {
                        comp[j] = decoded[a][i];
                    }
                    parts[i] = f.apply(op, &comp);
                }
                table.push(index.encode(&parts));
            });
            table
        })
        .collect();
    let name = if factors.is_empty() {
        "1".to_string()
    } else {
        factors
            .iter()
            .map(|f| f.name())
            .collect::<Vec<_>>()
            .join("x")
    };
    FiniteAlgebra::new(name, signature.clone(), size, tables)
}

/// Provenance of an element reached by saturation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Derivation {
    Generator(usize),
    Op(usize, Vec<usize>),
}

/// Result of closing a generator list under the operations.
#[derive(Debug, Clone)]
pub(crate) struct Generated<E> {
    /// Elements in discovery order; generators first, deduplicated.
    pub elements: Vec<E>,
    /// How each element was first reached; arguments always precede.
    pub derivations: Vec<Derivation>,
    /// Index of each generator among `elements`.
    pub generator_positions: Vec<usize>,
    /// `(op, argument indices, result index)` for every tuple of elements.
    pub facts: Vec<(usize, Vec<usize>, usize)>,
}

/// Semi-naive closure: every argument tuple is evaluated exactly once.
pub(crate) fn saturate<E, F>(
    signature: &Signature,
    generators: &[E],
    max_elements: usize,
    mut apply: F,
) -> Result<Generated<E>>
where
    E: Clone + Eq + Hash,
    F: FnMut(usize, &[&E]) -> E,
{
    let mut elements: Vec<E> = Vec::new();
    let mut index: HashMap<E, usize> = HashMap::new();
    let mut derivations = Vec::new();
    let mut generator_positions = Vec::new();
    let mut facts = Vec::new();

    let mut insert = |e: E,
                      d: Derivation,
                      elements: &mut Vec<E>,
                      derivations: &mut Vec<Derivation>|
     -> Result<usize> {
        if let Some(&i) = index.get(&e) {
            return Ok(i);
        }
        Caps::check("max-elements", max_elements, elements.len() as u128 + 1)?;
        let i = elements.len();
        index.insert(e.clone(), i);
        elements.push(e);
        derivations.push(d);
        Ok(i)
    };

    for (k, g) in generators.iter().enumerate() {
        let i = insert(
            g.clone(),
            Derivation::Generator(k),
            &mut elements,
            &mut derivations,
        )?;
        generator_positions.push(i);
    }
    for c in signature.constants() {
        let v = apply(c, &[]);
        let i = insert(
            v,
            Derivation::Op(c, Vec::new()),
            &mut elements,
            &mut derivations,
        )?;
        facts.push((c, Vec::new(), i));
    }

    let mut done = 0;
    while done < elements.len() {
        let end = elements.len();
        for op in 0..signature.len() {
            let arity = signature.arity(op);
            if arity == 0 {
                continue;
            }
            let mut tuples = Vec::new();
            for_each_tuple(end, arity, |args| {
                if args.iter().any(|&a| a >= done) {
                    tuples.push(args.to_vec());
                }
            });
            for args in tuples {
                let v = {
                    let refs: Vec<&E> = args.iter().map(|&a| &elements[a]).collect();
                    apply(op, &refs)
                };
                let i = insert(
                    v,
                    Derivation::Op(op, args.clone()),
                    &mut elements,
                    &mut derivations,
                )?;
                facts.push((op, args, i));
            }
        }
        done = end;
    }
    Ok(Generated {
        elements,
        derivations,
        generator_positions,
        facts,
    })
}

/// All homomorphisms `source -> target`, sorted lexicographically by map.
///
/// With `generators`, candidate maps are built from generator images and
/// extended along derivations; otherwise brute force over all maps is used
/// when it fits `caps.max_elements`, and a greedy generating set otherwise.
pub fn enumerate_homs(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    generators: Option<&[usize]>,
    caps: &Caps,
) -> Result<Vec<Homomorphism>> {
    source.require_same_signature(target)?;
    match generators {
        Some(gens) => {
            let set: BTreeSet<usize> = gens.iter().copied().collect();
            if gens.iter().any(|&g| g >= source.size())
                || source.generate_subalgebra(&set).len() != source.size()
            {
                return Err(Error::GeneratorsInsufficient);
            }
            homs_from_generators(source, target, &set.into_iter().collect::<Vec<_>>(), caps)
        }
        None => {
            if pow_saturating(target.size(), source.size()) <= caps.max_elements as u128 {
                Ok(homs_brute_force(source, target))
            } else {
                homs_from_generators(source, target, &source.greedy_generators(), caps)
            }
        }
    }
}

pub(crate) fn homs_brute_force(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
) -> Vec<Homomorphism> {
    let mut out = Vec::new();
    for_each_tuple(target.size(), source.size(), |map| {
        if source.is_homomorphism(target, map) {
            out.push(Homomorphism { map: map.to_vec() });
        }
    });
    out
}

/// `gens` must be distinct and generate `source`.
pub(crate) fn homs_from_generators(
    source: &FiniteAlgebra,
    target: &FiniteAlgebra,
    gens: &[usize],
    caps: &Caps,
) -> Result<Vec<Homomorphism>> {
    Caps::check(
        "max-elements",
        caps.max_elements,
        pow_saturating(target.size(), gens.len()),
    )?;
    let generated = saturate(source.signature(), gens, usize::MAX, |op, args| {
        let code = args.iter().fold(0, |acc, &&a| acc * source.size() + a);
        source.table(op)[code]
    })?;
    let slots: Vec<usize> = (0..gens.len()).collect();
    let mut by_position = vec![0; generated.elements.len()];
    let mut out = Vec::new();
    for_each_tuple(target.size(), gens.len(), |images| {
        if extend_along(&generated, &slots, target, images, &mut by_position) {
            let mut map = vec![0; source.size()];
            for (pos, &e) in generated.elements.iter().enumerate() {
                map[e] = by_position[pos];
            }
            if source.is_homomorphism(target, &map) {
                out.push(Homomorphism { map });
            }
        }
    });
    out.sort();
    Ok(out)
}

/// Fills `by_position` with the image of every element under the candidate
/// map sending generator `k` to `images[slots[k]]`; false when some fact
/// fails in `target`, i.e. two derivations of an element disagree.
fn extend_along<E>(
    generated: &Generated<E>,
    slots: &[usize],
    target: &FiniteAlgebra,
    images: &[usize],
    by_position: &mut [usize],
) -> bool {
    let size = target.size();
    let code = |args: &[usize], by_position: &[usize]| {
        args.iter().fold(0, |acc, &a| acc * size + by_position[a])
    };
    for (pos, d) in generated.derivations.iter().enumerate() {
        by_position[pos] = match d {
            Derivation::Generator(k) => images[slots[*k]],
            Derivation::Op(op, args) => target.table(*op)[code(args, by_position)],
        };
    }
    generated
        .facts
        .iter()
        .all(|(op, args, r)| target.table(*op)[code(args, by_position)] == by_position[*r])
}

/// Homomorphisms from a generated subalgebra, reported as images of its
/// generators.
///
/// The facts cover every argument tuple of the subalgebra, so a candidate
/// passing them all is a homomorphism.
pub(crate) fn generator_images<E>(
    generated: &Generated<E>,
    target: &FiniteAlgebra,
    caps: &Caps,
) -> Result<Vec<Vec<usize>>> {
    let mut distinct: Vec<usize> = Vec::new();
    let slots: Vec<usize> = generated
        .generator_positions
        .iter()
        .map(|p| match distinct.iter().position(|q| q == p) {
            Some(s) => s,
            None => {
                distinct.push(*p);
                distinct.len() - 1
            }
        })
        .collect();
    Caps::check(
        "max-elements",
        caps.max_elements,
        pow_saturating(target.size(), distinct.len()),
    )?;
    let mut by_position = vec![0; generated.elements.len()];
    let mut out = Vec::new();
    for_each_tuple(target.size(), distinct.len(), |images| {
        if extend_along(generated, &slots, target, images, &mut by_position) {
            out.push(
                generated
                    .generator_positions
                    .iter()
                    .map(|&p| by_position[p])
                    .collect(),
            );
        }
    });
    Ok(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const C2: &str = "algebra C2\nsize 2\nop add 2\n0 1 1 0\nop neg 1\n0 1\nop e 0\n0\n";
    pub(crate) const C3: &str =
        "algebra C3\nsize 3\nop add 2\n0 1 2 1 2 0 2 0 1\nop neg 1\n0 2 1\nop e 0\n0\n";
    pub(crate) const M2: &str = "algebra M2\nsize 2\nop meet 2\n0 0 0 1\n";

    pub(crate) fn c2() -> FiniteAlgebra {
        FiniteAlgebra::parse(C2).unwrap()
    }
    pub(crate) fn c3() -> FiniteAlgebra {
        FiniteAlgebra::parse(C3).unwrap()
    }
    pub(crate) fn m2() -> FiniteAlgebra {
        FiniteAlgebra::parse(M2).unwrap()
    }

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    fn maps(h: Vec<Homomorphism>) -> Vec<Vec<usize>> {
        h.into_iter().map(|h| h.map).collect()
    }

    #[test]
    fn loads_fixtures() {
        let c2 = c2();
        assert_eq!(c2.apply(0, &[1, 1]), 0);
        assert_eq!(c2.size(), 2);
        assert_eq!(FiniteAlgebra::parse(&c2.to_text()).unwrap(), c2);
        assert_eq!(FiniteAlgebra::parse(&c3().to_text()).unwrap(), c3());
    }

    #[test]
    fn load_errors() {
        assert_eq!(
            FiniteAlgebra::parse("algebra Z\nsize 0\n"),
            Err(Error::EmptyCarrier)
        );
        assert!(matches!(
            FiniteAlgebra::parse("algebra B\nsize 2\nop add 2\n0 1 2 0\n"),
            Err(Error::Table { line: 4, .. })
        ));
        assert!(matches!(
            FiniteAlgebra::parse("algebra B\nsize 2\nop add 2\n0 1 1\nop e 0\n0\n"),
            Err(Error::Table { .. })
        ));
        assert!(matches!(
            FiniteAlgebra::parse("algebra B\nsize 2\nop neg 1\n0 1 1\n"),
            Err(Error::Table { .. })
        ));
        assert!(matches!(
            FiniteAlgebra::parse("algebra B\nsize two\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            FiniteAlgebra::parse("algebra B\nsize 2\nfun neg 1\n0 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            FiniteAlgebra::parse("algebra B\nsize 2\nop neg 1\n0 x\n"),
            Err(Error::Parse { line: 4, .. })
        ));
    }

    #[test]
    fn evaluation_examples() {
        let m2 = m2();
        let sig = m2.signature().clone();
        let t = crate::term::parse_term("(meet x1 x2)", &sig, 2).unwrap();
        assert_eq!(m2.evaluate(&t, &[1, 0]).unwrap(), 0);
        let c2 = c2();
        let t = crate::term::parse_term("(add x1 x1)", c2.signature(), 1).unwrap();
        assert_eq!(c2.evaluate(&t, &[1]).unwrap(), 0);
        let e = crate::term::parse_term("e", c2.signature(), 1).unwrap();
        assert_eq!(c2.evaluate(&e, &[1]).unwrap(), 0);
        assert!(matches!(
            c2.evaluate(&Term::var(2), &[1]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            c2.evaluate(&Term::apply(0, vec![Term::var(1)]), &[1]),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn products() {
        let c2 = c2();
        let sig = c2.signature().clone();
        let caps = Caps::default();
        assert_eq!(
            direct_product(&sig, &[&c2], &caps).unwrap().table(0),
            c2.table(0)
        );
        let p = direct_product(&sig, &[&c2, &c2], &caps).unwrap();
        assert_eq!(p.size(), 4);
        assert_eq!(p.apply(0, &[2, 3]), 1);
        let one = direct_product(&sig, &[], &caps).unwrap();
        assert_eq!(one.size(), 1);
        assert!(one.is_homomorphism(&one, &[0]));
        assert!(matches!(
            direct_product(&sig, &[&c2, &m2()], &caps),
            Err(Error::SignatureMismatch(_))
        ));
        let tight = Caps {
            max_elements: 3,
            ..caps
        };
        assert!(direct_product(&sig, &[&c2, &c2], &tight)
            .unwrap_err()
            .is_size_limit());
    }

    #[test]
    fn projections_and_diagonal_are_homs() {
        let caps = Caps::default();
        for a in [c2(), c3(), m2()] {
            let sig = a.signature().clone();
            let p = direct_product(&sig, &[&a, &a], &caps).unwrap();
            let idx = ProductIndex::new(vec![a.size(), a.size()]);
            let first: Vec<usize> = (0..p.size()).map(|c| idx.decode(c)[0]).collect();
            let second: Vec<usize> = (0..p.size()).map(|c| idx.decode(c)[1]).collect();
            let diag: Vec<usize> = (0..a.size()).map(|x| idx.encode(&[x, x])).collect();
            assert!(p.is_homomorphism(&a, &first));
            assert!(p.is_homomorphism(&a, &second));
            assert!(a.is_homomorphism(&p, &diag));
        }
    }

    #[test]
    fn subalgebra_examples() {
        assert_eq!(c2().generate_subalgebra(&set(&[1])), set(&[0, 1]));
        assert_eq!(m2().generate_subalgebra(&set(&[0])), set(&[0]));
        assert_eq!(c2().generate_subalgebra(&set(&[])), set(&[0]));
        assert_eq!(m2().generate_subalgebra(&set(&[])), set(&[]));
        assert_eq!(c3().generate_subalgebra(&set(&[2])), set(&[0, 1, 2]));
    }

    #[test]
    fn subalgebra_idempotent_and_monotone() {
        for a in [c2(), c3(), m2()] {
            for mask in 0u32..(1 << a.size()) {
                let g: BTreeSet<usize> = (0..a.size()).filter(|i| mask >> i & 1 == 1).collect();
                let s = a.generate_subalgebra(&g);
                assert!(g.is_subset(&s));
                assert_eq!(a.generate_subalgebra(&s), s);
                for extra in 0..a.size() {
                    let mut bigger = g.clone();
                    bigger.insert(extra);
                    assert!(s.is_subset(&a.generate_subalgebra(&bigger)));
                }
            }
        }
    }

    #[test]
    fn hom_examples() {
        let caps = Caps::default();
        assert_eq!(
            maps(enumerate_homs(&c2(), &c2(), None, &caps).unwrap()),
            [vec![0, 0], vec![0, 1]]
        );
        assert_eq!(
            maps(enumerate_homs(&m2(), &m2(), None, &caps).unwrap()),
            [vec![0, 0], vec![0, 1], vec![1, 1]]
        );
        assert_eq!(
            maps(enumerate_homs(&c2(), &c3(), None, &caps).unwrap()),
            [vec![0, 0]]
        );
        assert_eq!(
            maps(enumerate_homs(&c3(), &c3(), Some(&[1]), &caps).unwrap()),
            [vec![0, 0, 0], vec![0, 1, 2], vec![0, 2, 1]]
        );
        assert_eq!(
            enumerate_homs(&m2(), &m2(), Some(&[0]), &caps),
            Err(Error::GeneratorsInsufficient)
        );
        assert!(matches!(
            enumerate_homs(&c2(), &m2(), None, &caps),
            Err(Error::SignatureMismatch(_))
        ));
    }

    #[test]
    fn hom_paths_agree() {
        let caps = Caps::default();
        let algebras = [c2(), c3(), m2()];
        for a in &algebras {
            for b in &algebras {
                if a.signature() != b.signature() {
                    continue;
                }
                let brute = homs_brute_force(a, b);
                let gens = homs_from_generators(a, b, &a.greedy_generators(), &caps).unwrap();
                assert_eq!(brute, gens);
                let all: Vec<usize> = (0..a.size()).collect();
                assert_eq!(enumerate_homs(a, b, Some(&all), &caps).unwrap(), brute);
            }
        }
    }

    #[test]
    fn signature_realignment() {
        let reordered = FiniteAlgebra::parse(
            "algebra C2r\nsize 2\nop e 0\n0\nop add 2\n0 1 1 0\nop neg 1\n0 1\n",
        )
        .unwrap();
        let aligned = reordered.with_signature(c2().signature()).unwrap();
        assert_eq!(aligned.table(0), c2().table(0));
        assert!(m2().with_signature(c2().signature()).is_err());
    }
}
