//! The lattice of algebraic sets of `H^n`: enumeration, meet and join,
//! distributivity and modularity checks, and Hasse diagram export.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::galois::{AffineSpace, Point, PointSet};

/// How closed sets are found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumerationMode {
    /// Test every subset of `H^n`.
    Exhaustive,
    /// Close singletons, then saturate under joins.
    Generators,
    /// Exhaustive when `|H|^n` fits the exhaustive cap, generators otherwise.
    Auto,
}

/// Outcome of a lattice law check; `witness` is the first violating triple
/// `(a, b, c)` of element indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LawVerdict {
    pub holds: bool,
    pub witness: Option<[usize; 3]>,
}

/// All algebraic sets of `H^n` ordered by inclusion.
///
/// Elements are sorted lexicographically by their sorted point lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedSetLattice {
    var_count: usize,
    elements: Vec<PointSet>,
    meet: Vec<usize>,
    join: Vec<usize>,
    /// Row `a` holds every `b` with `a ≤ b`.
    up: Vec<Bits>,
    /// Row `b` holds every `a` with `a ≤ b`.
    down: Vec<Bits>,
}

/// Fixed-length bit set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    fn and<'a>(&'a self, other: &'a Bits) -> impl DoubleEndedIterator<Item = u64> + 'a {
        self.0.iter().zip(&other.0).map(|(a, b)| a & b)
    }

    fn count_and(&self, other: &Bits) -> u32 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// Position of the lowest set bit of `self ∩ other`.
    fn first_common(&self, other: &Bits) -> Option<usize> {
        self.and(other)
            .enumerate()
            .find(|(_, w)| *w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    /// Position of the highest set bit of `self ∩ other`.
    fn last_common(&self, other: &Bits) -> Option<usize> {
        let last = self.0.len().checked_sub(1)?;
        self.and(other)
            .rev()
            .enumerate()
            .find(|(_, w)| *w != 0)
            .map(|(k, w)| (last - k) * 64 + 63 - w.leading_zeros() as usize)
    }
}

pub fn enumerate_closed_sets(
    space: &AffineSpace<'_>,
    mode: EnumerationMode,
) -> Result<ClosedSetLattice> {
    let caps = space.caps();
    let count = space.point_count()?;
    let mode = match mode {
        EnumerationMode::Auto if count <= caps.max_exhaustive_points => EnumerationMode::Exhaustive,
        EnumerationMode::Auto => EnumerationMode::Generators,
        m => m,
    };
    let mut elements = match mode {
        EnumerationMode::Exhaustive => exhaustive(space, count, caps)?,
        _ => by_generators(space)?,
    };
    elements.sort();
    elements.dedup();
    ClosedSetLattice::from_elements(space.var_count(), elements)
}

/// Tests every subset. Once `closure(S) = C` is known, each `T` with
/// `S ⊆ T ⊆ C` has closure `C` as well, so only `C` among them is closed.
fn exhaustive(space: &AffineSpace<'_>, count: usize, caps: &Caps) -> Result<Vec<PointSet>> {
    Caps::check(
        "max-exhaustive-points",
        caps.max_exhaustive_points.min(63),
        count as u128,
    )?;
    let points = space.points()?;
    let position: HashMap<&Point, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let subset = |mask: u64| -> PointSet {
        points
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect()
    };
    let mut decided = vec![false; 1usize << count];
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << count) {
        if decided[mask as usize] {
            continue;
        }
        let closed = space.closure(&subset(mask))?.points;
        let cmask = closed.iter().fold(0u64, |acc, p| acc | 1 << position[p]);
        if !decided[cmask as usize] {
            out.push(closed);
        }
        let free = cmask & !mask;
        let mut sub = free;
        loop {
            decided[(mask | sub) as usize] = true;
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & free;
        }
    }
    Ok(out)
}

/// Closes `cl(∅)` under joins with singleton closures. Every closed set is
/// the join of the closures of its points, so intersections add nothing; the
/// lattice construction still checks closure under intersection.
fn by_generators(space: &AffineSpace<'_>) -> Result<Vec<PointSet>> {
    let points = space.points()?;
    let position: HashMap<&Point, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let bits = |set: &PointSet| {
        let mut b = Bits::new(points.len());
        for p in set {
            b.set(position[p]);
        }
        b
    };
    let mut singles = Vec::with_capacity(points.len());
    for p in &points {
        singles.push(bits(&space.closure(&PointSet::from([p.clone()]))?.points));
    }
    let bottom = space.closure(&PointSet::new())?.points;
    let mut seen: HashSet<Bits> = HashSet::from([bits(&bottom)]);
    let mut found = vec![bottom];
    let mut done = 0;
    while done < found.len() {
        let current = bits(&found[done]);
        for (i, p) in points.iter().enumerate() {
            if singles[i].is_subset(&current) {
                continue;
            }
            let mut union = found[done].clone();
            union.insert(p.clone());
            let join = space.closure(&union)?.points;
            if seen.insert(bits(&join)) {
                found.push(join);
            }
        }
        done += 1;
    }
    Ok(found)
}

impl ClosedSetLattice {
    /// Builds the lattice from a sorted, duplicate-free family closed under
    /// intersection and containing the full space.
    fn from_elements(var_count: usize, elements: Vec<PointSet>) -> Result<Self> {
        let n = elements.len();
        let universe: PointSet = elements.iter().flatten().cloned().collect();
        let position: HashMap<&Point, usize> =
            universe.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let sets: Vec<Bits> = elements
            .iter()
            .map(|e| {
                let mut b = Bits::new(universe.len());
                for p in e {
                    b.set(position[p]);
                }
                b
            })
            .collect();
        // `ranked[r]` is the element of rank `r` by size.
        let mut ranked: Vec<usize> = (0..n).collect();
        ranked.sort_by_key(|&i| elements[i].len());
        let mut up = vec![Bits::new(n); n];
        let mut down = vec![Bits::new(n); n];
        let mut up_ranked = vec![Bits::new(n); n];
        let mut down_ranked = vec![Bits::new(n); n];
        for (rb, &b) in ranked.iter().enumerate() {
            for (ra, &a) in ranked.iter().enumerate() {
                if sets[a].is_subset(&sets[b]) {
                    up[a].set(b);
                    down[b].set(a);
                    up_ranked[a].set(rb);
                    down_ranked[b].set(ra);
                }
            }
        }
        let mut meet = vec![0; n * n];
        let mut join = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                // The largest common lower bound is the meet; it must be the
                // intersection itself.
                let m = down_ranked[i]
                    .last_common(&down_ranked[j])
                    .map(|r| ranked[r])
                    .filter(|&m| elements[m].len() as u32 == sets[i].count_and(&sets[j]))
                    .ok_or_else(|| {
                        Error::Invalid(
                            "family of closed sets is not closed under intersection".into(),
                        )
                    })?;
                meet[i * n + j] = m;
                // The smallest common upper bound is the join.
                join[i * n + j] = up_ranked[i]
                    .first_common(&up_ranked[j])
                    .map(|r| ranked[r])
                    .ok_or_else(|| Error::Invalid("family has no top element".into()))?;
            }
        }
        Ok(ClosedSetLattice {
            var_count,
            elements,
            meet,
            join,
            up,
            down,
        })
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[PointSet] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &PointSet {
        &self.elements[i]
    }

    pub fn index_of(&self, set: &PointSet) -> Result<usize> {
        self.elements
            .binary_search(set)
            .map_err(|_| Error::ElementNotInLattice)
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::ElementNotInLattice)
        }
    }

    /// Intersection, by element index.
    pub fn meet(&self, a: usize, b: usize) -> Result<usize> {
        self.check_index(a)?;
        self.check_index(b)?;
        Ok(self.meet[a * self.len() + b])
    }

    /// Closure of the union, by element index.
    pub fn join(&self, a: usize, b: usize) -> Result<usize> {
        self.check_index(a)?;
        self.check_index(b)?;
        Ok(self.join[a * self.len() + b])
    }

    pub fn meet_sets(&self, a: &PointSet, b: &PointSet) -> Result<&PointSet> {
        Ok(&self.elements[self.meet(self.index_of(a)?, self.index_of(b)?)?])
    }

    pub fn join_sets(&self, a: &PointSet, b: &PointSet) -> Result<&PointSet> {
        Ok(&self.elements[self.join(self.index_of(a)?, self.index_of(b)?)?])
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].get(b)
    }

    pub fn bottom(&self) -> usize {
        (0..self.len())
            .min_by_key(|&i| self.elements[i].len())
            .unwrap_or(0)
    }

    pub fn top(&self) -> usize {
        (0..self.len())
            .max_by_key(|&i| self.elements[i].len())
            .unwrap_or(0)
    }

    /// Checks `a ∧ (b ∨ c) = (a ∧ b) ∨ (a ∧ c)` for all triples.
    pub fn is_distributive(&self) -> LawVerdict {
        let n = self.len();
        let m = |x: usize, y: usize| self.meet[x * n + y];
        let j = |x: usize, y: usize| self.join[x * n + y];
        self.first_violation(|a, b, c| m(a, j(b, c)) == j(m(a, b), m(a, c)))
    }

    /// Checks `a ≤ c ⟹ a ∨ (b ∧ c) = (a ∨ b) ∧ c` for all triples.
    pub fn is_modular(&self) -> LawVerdict {
        let n = self.len();
        let m = |x: usize, y: usize| self.meet[x * n + y];
        let j = |x: usize, y: usize| self.join[x * n + y];
        self.first_violation(|a, b, c| !self.leq(a, c) || j(a, m(b, c)) == m(j(a, b), c))
    }

    fn first_violation(&self, law: impl Fn(usize, usize, usize) -> bool) -> LawVerdict {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if !law(a, b, c) {
                        return LawVerdict {
                            holds: false,
                            witness: Some([a, b, c]),
                        };
                    }
                }
            }
        }
        LawVerdict {
            holds: true,
            witness: None,
        }
    }

    /// Covering pairs `(lower, upper)` in index order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                // Only `a` and `b` lie in the interval `[a, b]`.
                if a != b && self.leq(a, b) && self.up[a].count_and(&self.down[b]) == 2 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Elements covering the bottom.
    pub fn atoms(&self) -> Vec<usize> {
        let bottom = self.bottom();
        self.covers()
            .into_iter()
            .filter(|&(a, _)| a == bottom)
            .map(|(_, b)| b)
            .collect()
    }

    /// Number of covering steps in a longest chain.
    pub fn height(&self) -> usize {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| self.elements[i].len());
        let mut lower: Vec<Vec<usize>> = vec![Vec::new(); self.len()];
        for (a, b) in self.covers() {
            lower[b].push(a);
        }
        let mut longest = vec![0usize; self.len()];
        for &b in &order {
            longest[b] = lower[b].iter().map(|&a| longest[a] + 1).max().unwrap_or(0);
        }
        longest.into_iter().max().unwrap_or(0)
    }

    /// DOT digraph of the covering relation, drawn bottom to top.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph lattice {\n  rankdir=BT;\n  node [shape=box];\n");
        for (i, e) in self.elements.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"#{i} |A|={}\"];", e.len());
        }
        for (a, b) in self.covers() {
            let _ = writeln!(out, "  n{a} -> n{b};");
        }
        out.push_str("}\n");
        out
    }

    /// Plain-text report: elements, atoms, height and law verdicts.
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "elements: {}", self.len());
        for (i, e) in self.elements.iter().enumerate() {
            let pts: Vec<String> = e.iter().map(Point::to_string).collect();
            let _ = writeln!(out, "#{i} size={} {{{}}}", e.len(), pts.join(" "));
        }
        let _ = writeln!(out, "atoms: {}", self.atoms().len());
        let _ = writeln!(out, "height: {}", self.height());
        for (name, v) in [
            ("distributive", self.is_distributive()),
            ("modular", self.is_modular()),
        ] {
            match v.witness {
                Some([a, b, c]) => {
                    let _ = writeln!(out, "{name}: false witness=(#{a},#{b},#{c})");
                }
                None => {
                    let _ = writeln!(out, "{name}: true");
                }
            }
        }
        out
    }
}
