//! The Galois connection between finite systems of equations over `x1..xn`
//! and sets of points of `H^n`: solution sets, common kernels, closures and
//! the action of substitutions on both sides.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::{generator_images, saturate, FiniteAlgebra};
use crate::caps::{pow_saturating, Caps};
use crate::error::{Error, Result};
use crate::term::{
    for_each_tuple, non_comment_lines, parse_system_lines, Equation, Signature, Substitution,
};

/// A point of `H^n`: the values assigned to `x1..xn`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point(pub Vec<usize>);

impl Point {
    pub fn coords(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

impl From<Vec<usize>> for Point {
    fn from(v: Vec<usize>) -> Self {
        Point(v)
    }
}

/// Points kept in lexicographic order.
pub type PointSet = BTreeSet<Point>;

/// Builds a point set from coordinate slices.
pub fn point_set<I, P>(points: I) -> PointSet
where
    I: IntoIterator<Item = P>,
    P: AsRef<[usize]>,
{
    points
        .into_iter()
        .map(|p| Point(p.as_ref().to_vec()))
        .collect()
}

/// One point per line, lexicographically sorted.
pub fn format_points(points: &PointSet) -> String {
    points.iter().map(|p| format!("{p}\n")).collect()
}

/// Reads `(a1,...,an)` per line; comment and blank lines are skipped.
pub fn parse_points(text: &str, var_count: usize, carrier: usize) -> Result<PointSet> {
    let mut out = PointSet::new();
    for (line, body) in non_comment_lines(text) {
        let inner = body
            .strip_prefix('(')
            .and_then(|b| b.strip_suffix(')'))
            .ok_or_else(|| Error::parse(line, format!("expected `(a1,...,an)`, found `{body}`")))?;
        let coords = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|c| {
                    c.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::parse(line, format!("bad coordinate `{}`", c.trim())))
                })
                .collect::<Result<Vec<_>>>()?
        };
        if coords.len() != var_count {
            return Err(Error::parse(
                line,
                format!(
                    "point has {} coordinate(s), expected {var_count}",
                    coords.len()
                ),
            ));
        }
        if let Some(c) = coords.iter().find(|&&c| c >= carrier) {
            return Err(Error::parse(
                line,
                format!("coordinate {c} outside 0..{carrier}"),
            ));
        }
        out.insert(Point(coords));
    }
    Ok(out)
}

/// A finite system of equations over `x1..xn`, duplicates removed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EquationSystem {
    var_count: usize,
    equations: Vec<Equation>,
}

impl EquationSystem {
    pub fn new(
        sig: &Signature,
        var_count: usize,
        equations: impl IntoIterator<Item = Equation>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut eqs = Vec::new();
        for e in equations {
            e.check(sig, var_count)?;
            if seen.insert(e.clone()) {
                eqs.push(e);
            }
        }
        Ok(EquationSystem {
            var_count,
            equations: eqs,
        })
    }

    pub fn empty(var_count: usize) -> Self {
        EquationSystem {
            var_count,
            equations: Vec::new(),
        }
    }

    /// Reads the system file format.
    pub fn parse(text: &str, sig: &Signature, var_count: usize) -> Result<Self> {
        let eqs = parse_system_lines(text, sig, var_count)?;
        EquationSystem::new(sig, var_count, eqs)
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    /// The system file text, one equation per line.
    pub fn to_text(&self, sig: &Signature) -> String {
        self.equations
            .iter()
            .map(|e| format!("{}\n", e.display(sig)))
            .collect()
    }
}

/// A set of points of `H^n`; algebraic when it is a fixpoint of the closure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraicSet {
    pub var_count: usize,
    pub points: PointSet,
}

/// Membership in the congruence `A'` of all pairs holding at every point of
/// `A`. The congruence is infinite; it is answered by evaluation.
#[derive(Debug, Clone)]
pub struct ClosurePredicate<'a> {
    algebra: &'a FiniteAlgebra,
    var_count: usize,
    points: PointSet,
}

impl ClosurePredicate<'_> {
    pub fn points(&self) -> &PointSet {
        &self.points
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn contains(&self, pair: &Equation) -> Result<bool> {
        holds_at_all(self.algebra, &self.points, pair)
    }
}

fn holds_at_all(h: &FiniteAlgebra, points: &PointSet, pair: &Equation) -> Result<bool> {
    for p in points {
        if h.evaluate(&pair.lhs, &p.0)? != h.evaluate(&pair.rhs, &p.0)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The affine space `H^n` over a finite algebra.
#[derive(Debug, Clone, Copy)]
pub struct AffineSpace<'a> {
    algebra: &'a FiniteAlgebra,
    var_count: usize,
    caps: Caps,
}

impl<'a> AffineSpace<'a> {
    pub fn new(algebra: &'a FiniteAlgebra, var_count: usize, caps: Caps) -> Self {
        AffineSpace {
            algebra,
            var_count,
            caps,
        }
    }

    pub fn algebra(&self) -> &'a FiniteAlgebra {
        self.algebra
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn caps(&self) -> &Caps {
        &self.caps
    }

    /// `|H|^n`, checked against the point cap.
    pub fn point_count(&self) -> Result<usize> {
        let count = pow_saturating(self.algebra.size(), self.var_count);
        Caps::check("max-points", self.caps.max_points, count)?;
        Ok(count as usize)
    }

    /// Every point in lexicographic order.
    pub fn points(&self) -> Result<Vec<Point>> {
        let mut out = Vec::with_capacity(self.point_count()?);
        for_each_tuple(self.algebra.size(), self.var_count, |p| {
            out.push(Point(p.to_vec()))
        });
        Ok(out)
    }

    pub fn full(&self) -> Result<PointSet> {
        Ok(self.points()?.into_iter().collect())
    }

    pub fn check_point(&self, p: &Point) -> Result<()> {
        if p.0.len() != self.var_count || p.0.iter().any(|&c| c >= self.algebra.size()) {
            return Err(Error::Invalid(format!(
                "point {p} is not in the space of dimension {} over `{}`",
                self.var_count,
                self.algebra.name()
            )));
        }
        Ok(())
    }

    fn check_system(&self, system: &EquationSystem) -> Result<()> {
        if system.var_count() != self.var_count {
            return Err(Error::Invalid(format!(
                "system over {} variable(s) used in a space of dimension {}",
                system.var_count(),
                self.var_count
            )));
        }
        Ok(())
    }

    /// `T'`: every point where all equations hold.
    pub fn solve(&self, system: &EquationSystem) -> Result<AlgebraicSet> {
        self.check_system(system)?;
        let mut points = PointSet::new();
        'points: for p in self.points()? {
            for e in system.equations() {
                if self.algebra.evaluate(&e.lhs, &p.0)? != self.algebra.evaluate(&e.rhs, &p.0)? {
                    continue 'points;
                }
            }
            points.insert(p);
        }
        Ok(AlgebraicSet {
            var_count: self.var_count,
            points,
        })
    }

    /// Whether `pair` belongs to `A'`, i.e. holds at every point of `A`.
    pub fn congruence_contains(&self, points: &PointSet, pair: &Equation) -> Result<bool> {
        holds_at_all(self.algebra, points, pair)
    }

    /// The predicate of `A'`.
    pub fn predicate(&self, points: PointSet) -> ClosurePredicate<'a> {
        ClosurePredicate {
            algebra: self.algebra,
            var_count: self.var_count,
            points,
        }
    }

    /// Whether `pair` belongs to `T''`, i.e. the quasi-identity
    /// `T => pair` holds in `H`.
    pub fn system_closure_contains(
        &self,
        system: &EquationSystem,
        pair: &Equation,
    ) -> Result<bool> {
        let solutions = self.solve(system)?;
        self.congruence_contains(&solutions.points, pair)
    }

    /// `A''`, the least algebraic set containing `A`.
    ///
    /// Let `g_i` be the column `(p_i)_{p in A}` in `H^A`. The subalgebra `D`
    /// they generate is closed, and `A''` is the set of tuples
    /// `(h(g_1),...,h(g_n))` over all homomorphisms `h: D -> H`. For empty `A`
    /// the power `H^A` is the one-element algebra.
    pub fn closure(&self, points: &PointSet) -> Result<AlgebraicSet> {
        for p in points {
            self.check_point(p)?;
        }
        let h = self.algebra;
        let columns: Vec<Vec<usize>> = (0..self.var_count)
            .map(|i| points.iter().map(|p| p.0[i]).collect())
            .collect();
        let width = points.len();
        let generated = saturate(
            h.signature(),
            &columns,
            self.caps.max_elements,
            |op, args| {
                let mut vals = vec![0; args.len()];
                (0..width)
                    .map(|j| {
                        for (v, a) in vals.iter_mut().zip(args) {
                            *v = a[j];
                        }
                        h.apply(op, &vals)
                    })
                    .collect::<Vec<usize>>()
            },
        )?;
        let images = generator_images(&generated, h, &self.caps)?;
        Ok(AlgebraicSet {
            var_count: self.var_count,
            points: images.into_iter().map(Point).collect(),
        })
    }

    pub fn is_algebraic(&self, points: &PointSet) -> Result<bool> {
        Ok(self.closure(points)?.points == *points)
    }
}

/// `s~(nu)`: coordinate `j` is the value of the `j`-th image of `s` at `nu`.
pub fn apply_substitution_to_point(
    s: &Substitution,
    h: &FiniteAlgebra,
    nu: &Point,
) -> Result<Point> {
    if nu.0.len() != s.target_vars() {
        return Err(Error::IndexOutOfRange {
            index: nu.0.len(),
            max: s.target_vars(),
        });
    }
    s.images()
        .iter()
        .map(|t| h.evaluate(t, &nu.0))
        .collect::<Result<Vec<_>>>()
        .map(Point)
}

/// Whether the pair over `Y` lies in `s^{-1}(T'')`, i.e. its image under `s`
/// lies in `T''` over `X`.
pub fn pullback_contains(
    h: &FiniteAlgebra,
    s: &Substitution,
    system: &EquationSystem,
    pair: &Equation,
    caps: &Caps,
) -> Result<bool> {
    pair.check(h.signature(), s.source_vars())?;
    let space = AffineSpace::new(h, s.target_vars(), *caps);
    space.system_closure_contains(system, &pair.substitute(s)?)
}

/// The algebraic set over `Y` realizing `s^{-1}(T'')`: the closure of the
/// image of `T'` under `s~`.
pub fn pullback_set(
    h: &FiniteAlgebra,
    s: &Substitution,
    system: &EquationSystem,
    caps: &Caps,
) -> Result<AlgebraicSet> {
    let over_x = AffineSpace::new(h, s.target_vars(), *caps);
    let image = over_x
        .solve(system)?
        .points
        .iter()
        .map(|nu| apply_substitution_to_point(s, h, nu))
        .collect::<Result<PointSet>>()?;
    AffineSpace::new(h, s.source_vars(), *caps).closure(&image)
}
