//! Relations between algebras and systems: identities, quasi-identities,
//! bounded geometric equivalence, the separation criterion and reduction of
//! systems to irredundant subsystems.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use crate::algebra::{enumerate_homs, FiniteAlgebra};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::galois::{AffineSpace, EquationSystem};
use crate::term::{enumerate_terms, Equation, Term};

/// `premises => conclusion`, universally quantified over `x1..xn`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiIdentity {
    pub premises: EquationSystem,
    pub conclusion: Equation,
}

impl QuasiIdentity {
    pub fn var_count(&self) -> usize {
        self.premises.var_count()
    }
}

/// Fixed-width bit set over the points of a space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn full(len: usize) -> Self {
        let mut words = vec![u64::MAX; len.div_ceil(64)];
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        Bits(words)
    }

    fn from_fn(len: usize, f: impl Fn(usize) -> bool) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for i in (0..len).filter(|&i| f(i)) {
            words[i / 64] |= 1 << (i % 64);
        }
        Bits(words)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn is_subset(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

/// Value table of a term: its value at every point, in point order.
fn values(h: &FiniteAlgebra, points: &[Vec<usize>], t: &Term) -> Result<Vec<usize>> {
    points.iter().map(|p| h.evaluate(t, p)).collect()
}

fn all_points(space: &AffineSpace<'_>) -> Result<Vec<Vec<usize>>> {
    Ok(space.points()?.into_iter().map(|p| p.0).collect())
}

/// Every pair `(w, w')` of terms of height at most `depth`, `w` before `w'`
/// in canonical order, that holds at every point of `H^n`.
pub fn identities_up_to(
    h: &FiniteAlgebra,
    n: usize,
    depth: usize,
    caps: &Caps,
) -> Result<Vec<Equation>> {
    let space = AffineSpace::new(h, n, *caps);
    let points = all_points(&space)?;
    let terms = enumerate_terms(h.signature(), n, depth, caps)?;
    let tables = terms
        .iter()
        .map(|t| values(h, &points, t))
        .collect::<Result<Vec<_>>>()?;
    let mut classes: HashMap<&[usize], Vec<usize>> = HashMap::new();
    for (i, v) in tables.iter().enumerate() {
        classes.entry(v.as_slice()).or_default().push(i);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for members in classes.values() {
        for (k, &i) in members.iter().enumerate() {
            for &j in &members[k + 1..] {
                pairs.push((i, j));
            }
        }
    }
    pairs.sort_unstable();
    Ok(pairs
        .into_iter()
        .map(|(i, j)| Equation::new(terms[i].clone(), terms[j].clone()))
        .collect())
}

/// True iff every point satisfying all premises satisfies the conclusion.
pub fn check_quasi_identity(h: &FiniteAlgebra, q: &QuasiIdentity, caps: &Caps) -> Result<bool> {
    q.conclusion.check(h.signature(), q.var_count())?;
    AffineSpace::new(h, q.var_count(), *caps).system_closure_contains(&q.premises, &q.conclusion)
}

/// Search bounds of the bounded equivalence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// Largest number of variables tried; every count from 1 up is searched.
    pub vars: usize,
    /// Largest term height.
    pub depth: usize,
    /// Largest number of equations in a system.
    pub system_limit: usize,
}

impl fmt::Display for Bounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vars={} depth={} system-limit={}",
            self.vars, self.depth, self.system_limit
        )
    }
}

/// Which of the two compared algebras a witness pair holds in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

impl Side {
    pub fn flip(self) -> Side {
        match self {
            Side::First => Side::Second,
            Side::Second => Side::First,
        }
    }
}

/// A system and a pair lying in the system's closure over exactly one of the
/// two algebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub system: EquationSystem,
    pub pair: Equation,
    pub holds_in: Side,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivalenceStatus {
    EquivalentUpToBound,
    Distinguished,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub status: EquivalenceStatus,
    pub witness: Option<Witness>,
    pub bounds: Bounds,
}

impl EquivalenceVerdict {
    pub fn is_equivalent(&self) -> bool {
        self.status == EquivalenceStatus::EquivalentUpToBound
    }

    /// Re-checks the witness on both algebras.
    pub fn verify(&self, h1: &FiniteAlgebra, h2: &FiniteAlgebra, caps: &Caps) -> Result<bool> {
        let Some(w) = &self.witness else {
            return Ok(self.status == EquivalenceStatus::EquivalentUpToBound);
        };
        let n = w.system.var_count();
        let in1 = AffineSpace::new(h1, n, *caps).system_closure_contains(&w.system, &w.pair)?;
        let in2 = AffineSpace::new(h2, n, *caps).system_closure_contains(&w.system, &w.pair)?;
        let expected = match w.holds_in {
            Side::First => (true, false),
            Side::Second => (false, true),
        };
        Ok(self.status == EquivalenceStatus::Distinguished && (in1, in2) == expected)
    }

    /// Plain-text report: status line, bounds line, then the witness block in
    /// system file syntax.
    pub fn report(&self, h1: &FiniteAlgebra, h2: &FiniteAlgebra) -> String {
        let sig = h1.signature();
        let mut out = String::new();
        let status = match self.status {
            EquivalenceStatus::EquivalentUpToBound => "equivalent-up-to-bound",
            EquivalenceStatus::Distinguished => "distinguished",
        };
        let _ = writeln!(out, "status: {status}");
        let _ = writeln!(out, "bounds: {}", self.bounds);
        if let Some(w) = &self.witness {
            let (yes, no) = match w.holds_in {
                Side::First => (h1, h2),
                Side::Second => (h2, h1),
            };
            let _ = writeln!(out, "witness:");
            let _ = writeln!(out, "# variables: {}", w.system.var_count());
            let _ = writeln!(out, "# holds in {}, fails in {}", yes.name(), no.name());
            let _ = writeln!(out, "# system: {} equation(s)", w.system.len());
            out.push_str(&w.system.to_text(sig));
            let _ = writeln!(out, "# pair");
            let _ = writeln!(out, "{}", w.pair.display(sig));
        }
        out
    }
}

/// Bounded comparison of the closures `T''` over two algebras.
///
/// For each variable count, terms up to `depth` are listed breadth first
/// (height, then canonical order) and merged when they have the same value
/// table on both algebras. Candidate pairs pair each term with every earlier
/// one. Systems are sets of at most `system_limit` candidate pairs, ordered by
/// total term size and then lexicographically. The first pair whose
/// membership differs is the witness.
pub fn geom_equivalent_bounded(
    h1: &FiniteAlgebra,
    h2: &FiniteAlgebra,
    bounds: Bounds,
    caps: &Caps,
) -> Result<EquivalenceVerdict> {
    h1.require_same_signature(h2)?;
    for n in 1..=bounds.vars {
        if let Some(witness) = search_witness(h1, h2, n, bounds, caps)? {
            return Ok(EquivalenceVerdict {
                status: EquivalenceStatus::Distinguished,
                witness: Some(witness),
                bounds,
            });
        }
    }
    Ok(EquivalenceVerdict {
        status: EquivalenceStatus::EquivalentUpToBound,
        witness: None,
        bounds,
    })
}

struct Candidate {
    pair: Equation,
    size: usize,
    on_first: Bits,
    on_second: Bits,
}

fn search_witness(
    h1: &FiniteAlgebra,
    h2: &FiniteAlgebra,
    n: usize,
    bounds: Bounds,
    caps: &Caps,
) -> Result<Option<Witness>> {
    let sig = h1.signature();
    let points1 = all_points(&AffineSpace::new(h1, n, *caps))?;
    let points2 = all_points(&AffineSpace::new(h2, n, *caps))?;
    let mut terms = enumerate_terms(sig, n, bounds.depth, caps)?;
    terms.sort_by_key(Term::height);

    let mut seen = HashMap::new();
    let mut reps: Vec<(Term, Vec<usize>, Vec<usize>)> = Vec::new();
    for t in terms {
        let v1 = values(h1, &points1, &t)?;
        let v2 = values(h2, &points2, &t)?;
        if seen.insert((v1.clone(), v2.clone()), ()).is_none() {
            reps.push((t, v1, v2));
        }
    }

    let mut candidates = Vec::new();
    for i in 0..reps.len() {
        for j in 0..i {
            let (a, a1, a2) = &reps[i];
            let (b, b1, b2) = &reps[j];
            candidates.push(Candidate {
                pair: Equation::new(a.clone(), b.clone()),
                size: a.size() + b.size(),
                on_first: Bits::from_fn(points1.len(), |k| a1[k] == b1[k]),
                on_second: Bits::from_fn(points2.len(), |k| a2[k] == b2[k]),
            });
        }
    }

    // Pairs with the same solution sets on both sides give the same systems.
    let mut class_seen = HashMap::new();
    let generators: Vec<usize> = (0..candidates.len())
        .filter(|&i| {
            let c = &candidates[i];
            class_seen
                .insert((c.on_first.clone(), c.on_second.clone()), ())
                .is_none()
        })
        .collect();

    let systems = ordered_systems(&candidates, &generators, bounds.system_limit, caps)?;
    let mut tried = HashMap::new();
    for system in systems {
        let mut s1 = Bits::full(points1.len());
        let mut s2 = Bits::full(points2.len());
        for &i in &system {
            s1 = s1.and(&candidates[i].on_first);
            s2 = s2.and(&candidates[i].on_second);
        }
        if tried.insert((s1.clone(), s2.clone()), ()).is_some() {
            continue;
        }
        for c in &candidates {
            let in1 = s1.is_subset(&c.on_first);
            let in2 = s2.is_subset(&c.on_second);
            if in1 != in2 {
                let system = EquationSystem::new(
                    sig,
                    n,
                    system.iter().map(|&i| candidates[i].pair.clone()),
                )?;
                return Ok(Some(Witness {
                    system,
                    pair: c.pair.clone(),
                    holds_in: if in1 { Side::First } else { Side::Second },
                }));
            }
        }
    }
    Ok(None)
}

/// Subsets of `generators` with at most `limit` members, ordered by total
/// term size, then by member indices.
fn ordered_systems(
    candidates: &[Candidate],
    generators: &[usize],
    limit: usize,
    caps: &Caps,
) -> Result<Vec<Vec<usize>>> {
    let mut count: u128 = 0;
    let mut binom: u128 = 1;
    let g = generators.len() as u128;
    for k in 0..=limit.min(generators.len()) as u128 {
        if k > 0 {
            binom = binom.saturating_mul(g - k + 1) / k;
        }
        count = count.saturating_add(binom);
    }
    Caps::check("max-systems", caps.max_systems, count)?;

    let mut out: Vec<Vec<usize>> = Vec::with_capacity(count as usize);
    let mut current = Vec::new();
    fn extend(
        from: usize,
        limit: usize,
        generators: &[usize],
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        out.push(current.clone());
        if current.len() == limit {
            return;
        }
        for k in from..generators.len() {
            current.push(generators[k]);
            extend(k + 1, limit, generators, current, out);
            current.pop();
        }
    }
    extend(0, limit, generators, &mut current, &mut out);
    out.sort_by(|a, b| {
        let sa: usize = a.iter().map(|&i| candidates[i].size).sum();
        let sb: usize = b.iter().map(|&i| candidates[i].size).sum();
        sa.cmp(&sb).then_with(|| a.cmp(b))
    });
    Ok(out)
}

/// Whether `source` embeds into a power of `target`: every pair of distinct
/// elements is separated by some homomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Direction {
    pub embeds: bool,
    /// First pair `(a, b)`, `a < b`, that no homomorphism separates.
    pub unseparated: Option<(usize, usize)>,
    pub hom_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparationReport {
    pub first_into_second: Direction,
    pub second_into_first: Direction,
}

impl SeparationReport {
    pub fn equivalent(&self) -> bool {
        self.first_into_second.embeds && self.second_into_first.embeds
    }

    pub fn report(&self, h1: &FiniteAlgebra, h2: &FiniteAlgebra) -> String {
        let mut out = String::new();
        for (d, a, b) in [
            (&self.first_into_second, h1, h2),
            (&self.second_into_first, h2, h1),
        ] {
            let _ = write!(
                out,
                "{} embeds in a power of {}: {} ({} homomorphism(s))",
                a.name(),
                b.name(),
                d.embeds,
                d.hom_count
            );
            if let Some((x, y)) = d.unseparated {
                let _ = write!(out, " unseparated=({x},{y})");
            }
            out.push('\n');
        }
        let _ = writeln!(out, "separation-equivalent: {}", self.equivalent());
        out
    }
}

fn direction(source: &FiniteAlgebra, target: &FiniteAlgebra, caps: &Caps) -> Result<Direction> {
    let homs = enumerate_homs(source, target, None, caps)?;
    let mut unseparated = None;
    'pairs: for a in 0..source.size() {
        for b in a + 1..source.size() {
            if !homs.iter().any(|h| h.map[a] != h.map[b]) {
                unseparated = Some((a, b));
                break 'pairs;
            }
        }
    }
    Ok(Direction {
        embeds: unseparated.is_none(),
        unseparated,
        hom_count: homs.len(),
    })
}

/// Separation criterion in both directions.
pub fn separation_equivalence(
    h1: &FiniteAlgebra,
    h2: &FiniteAlgebra,
    caps: &Caps,
) -> Result<SeparationReport> {
    h1.require_same_signature(h2)?;
    Ok(SeparationReport {
        first_into_second: direction(h1, h2, caps)?,
        second_into_first: direction(h2, h1, caps)?,
    })
}

/// Runs both criteria; fails with `CriteriaConflict` when separation holds but
/// the bounded search distinguishes the algebras.
pub fn cross_check(
    h1: &FiniteAlgebra,
    h2: &FiniteAlgebra,
    bounds: Bounds,
    caps: &Caps,
) -> Result<(SeparationReport, EquivalenceVerdict)> {
    let separation = separation_equivalence(h1, h2, caps)?;
    let verdict = geom_equivalent_bounded(h1, h2, bounds, caps)?;
    if separation.equivalent() && !verdict.is_equivalent() {
        return Err(Error::CriteriaConflict(format!(
            "`{}` and `{}` are separation-equivalent but distinguished at {}",
            h1.name(),
            h2.name(),
            bounds
        )));
    }
    Ok((separation, verdict))
}

/// Greedy elimination to an inclusion-minimal subsystem with the same
/// solution set.
pub fn reduce_system(
    h: &FiniteAlgebra,
    system: &EquationSystem,
    caps: &Caps,
) -> Result<EquationSystem> {
    let n = system.var_count();
    let space = AffineSpace::new(h, n, *caps);
    let points = all_points(&space)?;
    let sols = system
        .equations()
        .iter()
        .map(|e| {
            let l = values(h, &points, &e.lhs)?;
            let r = values(h, &points, &e.rhs)?;
            Ok(Bits::from_fn(points.len(), |k| l[k] == r[k]))
        })
        .collect::<Result<Vec<_>>>()?;
    let solve = |keep: &BTreeSet<usize>| {
        keep.iter()
            .fold(Bits::full(points.len()), |acc, &i| acc.and(&sols[i]))
    };
    let mut keep: BTreeSet<usize> = (0..system.len()).collect();
    let target = solve(&keep);
    loop {
        let mut changed = false;
        for i in 0..system.len() {
            if keep.contains(&i) {
                keep.remove(&i);
                if solve(&keep) == target {
                    changed = true;
                } else {
                    keep.insert(i);
                }
            }
        }
        if !changed {
            break;
        }
    }
    EquationSystem::new(
        h.signature(),
        n,
        keep.into_iter().map(|i| system.equations()[i].clone()),
    )
}
