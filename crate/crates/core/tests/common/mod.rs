//! Fixtures and independent oracles shared by the integration tests.
//!
//! Nothing here calls the closure, solver or lattice code under test; points
//! are enumerated directly and terms are evaluated by table lookup.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap, HashSet};

use algeo::{
    Equation, EquationSystem, FiniteAlgebra, FiniteRepresentation, Matrix, Point, PointSet,
    Signature, Term,
};
use rand::Rng;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub const C2: &str = "algebra C2\nsize 2\nop add 2\n0 1 1 0\nop neg 1\n0 1\nop e 0\n0\n";
pub const C3: &str =
    "algebra C3\nsize 3\nop add 2\n0 1 2 1 2 0 2 0 1\nop neg 1\n0 2 1\nop e 0\n0\n";
pub const M2: &str = "algebra M2\nsize 2\nop meet 2\n0 0 0 1\n";
/// Three-element chain lattice.
pub const L3: &str =
    "algebra L3\nsize 3\nop meet 2\n0 0 0 0 1 1 0 1 2\nop join 2\n0 1 2 1 1 2 2 2 2\n";
/// A unary algebra with a constant: `s` moves 0 to 1 to 2 and fixes 2.
pub const U3: &str = "algebra U3\nsize 3\nop s 1\n1 2 2\nop c 0\n0\n";

pub fn alg(text: &str) -> FiniteAlgebra {
    FiniteAlgebra::parse(text).unwrap()
}

pub fn c2() -> FiniteAlgebra {
    alg(C2)
}

pub fn c3() -> FiniteAlgebra {
    alg(C3)
}

pub fn m2() -> FiniteAlgebra {
    alg(M2)
}

/// Every fixture with at most three elements.
pub fn small_fixtures() -> Vec<FiniteAlgebra> {
    [C2, C3, M2, L3, U3].into_iter().map(alg).collect()
}

/// A random algebra of the given size over `f/2, g/1`.
pub fn random_algebra(seed: u64, size: usize) -> FiniteAlgebra {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let sig = Signature::new([("f", 2), ("g", 1)]).unwrap();
    let tables = vec![
        (0..size * size).map(|_| rng.gen_range(0..size)).collect(),
        (0..size).map(|_| rng.gen_range(0..size)).collect(),
    ];
    FiniteAlgebra::new(format!("R{seed}"), sig, size, tables).unwrap()
}

/// All points of `H^n` in lexicographic order.
pub fn all_points(size: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..size).map(move |a| {
                    let mut q = p.clone();
                    q.push(a);
                    q
                })
            })
            .collect();
    }
    out
}

/// Direct recursive evaluation through the operation tables.
pub fn eval(h: &FiniteAlgebra, t: &Term, p: &[usize]) -> usize {
    match t {
        Term::Var(i) => p[*i],
        Term::Apply(f, args) => {
            let vals: Vec<usize> = args.iter().map(|a| eval(h, a, p)).collect();
            let size = h.size();
            let idx = vals.iter().fold(0, |acc, &v| acc * size + v);
            h.table(*f)[idx]
        }
    }
}

pub fn holds(h: &FiniteAlgebra, e: &Equation, p: &[usize]) -> bool {
    eval(h, &e.lhs, p) == eval(h, &e.rhs, p)
}

/// Solution set computed by checking every point.
pub fn brute_solve(h: &FiniteAlgebra, n: usize, eqs: &[Equation]) -> Vec<Vec<usize>> {
    all_points(h.size(), n)
        .into_iter()
        .filter(|p| eqs.iter().all(|e| holds(h, e, p)))
        .collect()
}

/// Value vectors (over `all_points`) of the term functions of height at most
/// `depth`, deduplicated.
pub fn term_functions(h: &FiniteAlgebra, n: usize, depth: usize) -> Vec<Vec<usize>> {
    let pts = all_points(h.size(), n);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut funcs: Vec<Vec<usize>> = Vec::new();
    let mut push = |v: Vec<usize>, funcs: &mut Vec<Vec<usize>>| {
        if seen.insert(v.clone()) {
            funcs.push(v);
        }
    };
    for i in 0..n {
        push(pts.iter().map(|p| p[i]).collect(), &mut funcs);
    }
    for c in h.signature().constants() {
        push(vec![h.table(c)[0]; pts.len()], &mut funcs);
    }
    for _ in 0..depth {
        let snapshot = funcs.clone();
        for f in 0..h.signature().len() {
            let arity = h.signature().arity(f);
            let tuples = all_points(snapshot.len(), arity);
            for args in tuples {
                let v: Vec<usize> = (0..pts.len())
                    .map(|k| {
                        let idx = args
                            .iter()
                            .fold(0, |acc, &a| acc * h.size() + snapshot[a][k]);
                        h.table(f)[idx]
                    })
                    .collect();
                push(v, &mut funcs);
            }
        }
    }
    funcs
}

/// Every term function, iterating until no new value vector appears.
pub fn clone_functions(h: &FiniteAlgebra, n: usize) -> Vec<Vec<usize>> {
    let mut depth = 1;
    let mut prev = term_functions(h, n, 0).len();
    loop {
        let cur = term_functions(h, n, depth);
        if cur.len() == prev {
            return cur;
        }
        prev = cur.len();
        depth += 1;
    }
}

pub type Mask = u64;

pub fn mask_of(points: &PointSet, size: usize, n: usize) -> Mask {
    let pts = all_points(size, n);
    points
        .iter()
        .map(|p| 1u64 << pts.iter().position(|q| *q == p.0).unwrap())
        .fold(0, |a, b| a | b)
}

pub fn set_of(mask: Mask, size: usize, n: usize) -> PointSet {
    all_points(size, n)
        .into_iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, p)| Point(p))
        .collect()
}

/// `(A')'` with `A'` restricted to pairs of the given term functions.
pub fn pair_oracle_closure(funcs: &[Vec<usize>], npoints: usize, a: Mask) -> Mask {
    // Functions agreeing on A form one class of A'; a point is in (A')' when
    // every class is constant there.
    let mut classes: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (i, f) in funcs.iter().enumerate() {
        let key: Vec<usize> = (0..npoints)
            .filter(|k| a >> k & 1 == 1)
            .map(|k| f[k])
            .collect();
        classes.entry(key).or_default().push(i);
    }
    let mut out = 0;
    for k in 0..npoints {
        let ok = classes
            .values()
            .all(|class| class.iter().all(|&i| funcs[i][k] == funcs[class[0]][k]));
        if ok {
            out |= 1 << k;
        }
    }
    out
}

/// All algebraic sets of `H^n`: intersections of single-equation solution
/// sets, where equations range over every pair of term functions.
pub fn algebraic_family(h: &FiniteAlgebra, n: usize) -> BTreeSet<Mask> {
    let funcs = clone_functions(h, n);
    let npoints = all_points(h.size(), n).len();
    let full: Mask = if npoints == 64 {
        u64::MAX
    } else {
        (1 << npoints) - 1
    };
    let mut basic: BTreeSet<Mask> = BTreeSet::new();
    for f in &funcs {
        for g in &funcs {
            let m = (0..npoints)
                .filter(|&k| f[k] == g[k])
                .fold(0, |acc, k| acc | 1 << k);
            basic.insert(m);
        }
    }
    let mut family: BTreeSet<Mask> = BTreeSet::from([full]);
    loop {
        let mut next = family.clone();
        for &a in &family {
            for &b in &basic {
                next.insert(a & b);
            }
        }
        if next.len() == family.len() {
            return family;
        }
        family = next;
    }
}

/// The least member of `family` containing `a`.
pub fn least_superset(family: &BTreeSet<Mask>, a: Mask) -> Mask {
    let supers: Vec<Mask> = family.iter().copied().filter(|&m| m & a == a).collect();
    let least = supers.iter().fold(!0, |acc, &m| acc & m);
    assert!(
        supers.contains(&least),
        "family is not closed under intersection"
    );
    least
}

/// A random term over `x1..xn` of height at most `depth`.
pub fn random_term<R: Rng>(rng: &mut R, sig: &Signature, n: usize, depth: usize) -> Term {
    let leaf_ops: Vec<usize> = sig.constants().collect();
    if depth == 0 || rng.gen_bool(0.3) {
        if !leaf_ops.is_empty() && rng.gen_bool(0.2) {
            return Term::Apply(leaf_ops[rng.gen_range(0..leaf_ops.len())], Vec::new());
        }
        return Term::Var(rng.gen_range(0..n));
    }
    let f = rng.gen_range(0..sig.len());
    let args = (0..sig.arity(f))
        .map(|_| random_term(rng, sig, n, depth - 1))
        .collect();
    Term::Apply(f, args)
}

pub fn random_equation<R: Rng>(rng: &mut R, sig: &Signature, n: usize, depth: usize) -> Equation {
    Equation::new(
        random_term(rng, sig, n, depth),
        random_term(rng, sig, n, depth),
    )
}

pub fn random_system<R: Rng>(
    rng: &mut R,
    h: &FiniteAlgebra,
    n: usize,
    max_len: usize,
    depth: usize,
) -> EquationSystem {
    let len = rng.gen_range(0..=max_len);
    let eqs: Vec<Equation> = (0..len)
        .map(|_| random_equation(rng, h.signature(), n, depth))
        .collect();
    EquationSystem::new(h.signature(), n, eqs).unwrap()
}

/// Group axioms and action homomorphy, checked from the raw tables.
pub fn representation_invariants(r: &FiniteRepresentation) -> Result<(), String> {
    let g = r.group();
    let n = g.order();
    let m = r.modulus();
    let mul = |a: usize, b: usize| g.table()[a * n + b];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                ensure!(
                    mul(mul(a, b), c) == mul(a, mul(b, c)),
                    "not associative at ({a},{b},{c})"
                );
            }
        }
    }
    let e = (0..n)
        .find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
        .ok_or("no identity")?;
    for a in 0..n {
        ensure!((0..n).any(|b| mul(a, b) == e), "{a} has no inverse");
    }
    let d = r.dim();
    let matmul = |x: &Matrix, y: &Matrix| -> Vec<u32> {
        let mut out = vec![0u32; d * d];
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = (0..d).map(|k| x.get(i, k) * y.get(k, j)).sum::<u32>() % m;
            }
        }
        out
    };
    let ident: Vec<u32> = (0..d * d)
        .map(|k| u32::from(k % (d + 1) == 0) % m)
        .collect();
    ensure!(
        r.matrix(e).entries() == ident.as_slice(),
        "identity does not act trivially"
    );
    for a in 0..n {
        for b in 0..n {
            ensure!(
                matmul(r.matrix(a), r.matrix(b)) == r.matrix(mul(a, b)).entries(),
                "action fails at ({a},{b})"
            );
        }
    }
    Ok(())
}
