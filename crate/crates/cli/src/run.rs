use std::fmt::Write as _;
use std::path::Path;

use algeo::{
    action_closure_contains, cross_check, format_points, identities_up_to, parse_equation,
    pullback_contains, pullback_set, reduce_system, solve_action_system, triangular_product,
    wreath_product, ActionTerm, AffineSpace, Bounds, Caps, ClosedSetLattice, EnumerationMode,
    Equation, EquationSystem, Error, FiniteAlgebra, FiniteGroup, FiniteRepresentation,
    QuasiIdentity, Substitution,
};

use crate::{Cli, Command, Common, Format, Mode, RepSpace, Space};

/// A failure with its exit code and one-line diagnostic.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

type Outcome<T> = std::result::Result<T, Failure>;

fn input(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Attaches the source (a file path or a flag name) to a library error.
fn at(source: &str, e: Error) -> Failure {
    let code = if e.is_size_limit() { 3 } else { 2 };
    let message = match e {
        Error::Parse { line, message } => format!("{source}:{line}: parse error: {message}"),
        Error::Table { line, message } => format!("{source}:{line}: table error: {message}"),
        Error::SizeLimitExceeded {
            cap,
            limit,
            required,
        } => {
            format!("size limit exceeded: --{cap} is {limit}, {required} needed")
        }
        other => format!("{source}: {other}"),
    };
    Failure { code, message }
}

/// Errors with no single input file behind them.
fn plain(e: Error) -> Failure {
    at("error", e)
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| input(format!("{}: {e}", path.display())))
}

fn load_algebra(path: &Path) -> Outcome<FiniteAlgebra> {
    FiniteAlgebra::parse(&read(path)?).map_err(|e| at(&path.display().to_string(), e))
}

fn load_system(path: Option<&Path>, h: &FiniteAlgebra, n: usize) -> Outcome<EquationSystem> {
    match path {
        None => Ok(EquationSystem::empty(n)),
        Some(p) => EquationSystem::parse(&read(p)?, h.signature(), n)
            .map_err(|e| at(&p.display().to_string(), e)),
    }
}

fn load_rep(path: &Path) -> Outcome<FiniteRepresentation> {
    FiniteRepresentation::parse(&read(path)?).map_err(|e| at(&path.display().to_string(), e))
}

fn equation(flag: &str, text: &str, h: &FiniteAlgebra, n: usize) -> Outcome<Equation> {
    parse_equation(text, h.signature(), n).map_err(|e| at(flag, e))
}

fn caps(c: &Common) -> Outcome<Caps> {
    let caps = Caps {
        max_terms: c.max_terms,
        max_points: c.max_points,
        max_elements: c.max_elements,
        max_systems: c.max_systems,
        max_exhaustive_points: c.max_exhaustive_points,
        max_group_order: c.max_group_order,
    };
    if caps.max_terms == 0
        || caps.max_points == 0
        || caps.max_elements == 0
        || caps.max_systems == 0
    {
        return Err(input("caps must be positive"));
    }
    Ok(caps)
}

/// Text output and its `key: value` form.
#[derive(Default)]
struct Output {
    text: String,
    report: Vec<(String, String)>,
}

impl Output {
    fn kv(mut self, key: &str, value: impl ToString) -> Self {
        self.report.push((key.to_string(), value.to_string()));
        self
    }

    /// Output whose text form is its report.
    fn fields(fields: &[(&str, String)]) -> Self {
        let mut out = Output::default();
        for (k, v) in fields {
            out = out.kv(k, v);
        }
        out.text = out.render_report();
        out
    }

    fn render_report(&self) -> String {
        self.report
            .iter()
            .map(|(k, v)| format!("{k}: {v}\n"))
            .collect()
    }
}

fn points_output(points: &algeo::PointSet) -> Output {
    let mut out = Output {
        text: format_points(points),
        ..Output::default()
    }
    .kv("points", points.len());
    for p in points {
        out = out.kv("point", p);
    }
    out
}

pub fn run(cli: &Cli) -> Outcome<()> {
    let common = &cli.common;
    if common.format == Format::Dot && !matches!(cli.command, Command::Lattice { .. }) {
        return Err(input("--format dot is only supported by `lattice`"));
    }
    let caps = caps(common)?;
    let out = dispatch(&cli.command, common, caps)?;
    let body = if common.report {
        out.render_report()
    } else {
        out.text
    };
    match &common.out {
        Some(path) => {
            std::fs::write(path, body).map_err(|e| input(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn dispatch(command: &Command, common: &Common, caps: Caps) -> Outcome<Output> {
    match command {
        Command::Solve { space, system } => {
            let h = load_algebra(&space.algebra)?;
            let t = load_system(system.as_deref(), &h, space.vars)?;
            let sols = AffineSpace::new(&h, space.vars, caps)
                .solve(&t)
                .map_err(plain)?;
            Ok(points_output(&sols.points))
        }
        Command::ClosureSet { space, points } => {
            let h = load_algebra(&space.algebra)?;
            let a = algeo::parse_points(&read(points)?, space.vars, h.size())
                .map_err(|e| at(&points.display().to_string(), e))?;
            let closed = AffineSpace::new(&h, space.vars, caps)
                .closure(&a)
                .map_err(plain)?;
            Ok(points_output(&closed.points))
        }
        Command::ClosurePair {
            space,
            system,
            pair,
        } => {
            let h = load_algebra(&space.algebra)?;
            let t = load_system(system.as_deref(), &h, space.vars)?;
            let pair = equation("--pair", pair, &h, space.vars)?;
            let member = AffineSpace::new(&h, space.vars, caps)
                .system_closure_contains(&t, &pair)
                .map_err(plain)?;
            Ok(Output::fields(&[("member", member.to_string())]))
        }
        Command::Algebraic { space, points } => {
            let h = load_algebra(&space.algebra)?;
            let a = algeo::parse_points(&read(points)?, space.vars, h.size())
                .map_err(|e| at(&points.display().to_string(), e))?;
            let closed = AffineSpace::new(&h, space.vars, caps)
                .closure(&a)
                .map_err(plain)?;
            Ok(Output::fields(&[
                ("algebraic", (closed.points == a).to_string()),
                ("closure-size", closed.points.len().to_string()),
            ]))
        }
        Command::Lattice { space, mode } => lattice(space, *mode, common.format, caps),
        Command::Equiv {
            algebras,
            vars,
            depth,
            system_limit,
        } => {
            let [first, second] = algebras.as_slice() else {
                return Err(input("`equiv` needs exactly two --algebra files"));
            };
            let h1 = load_algebra(first)?;
            let h2 = load_algebra(second)?
                .with_signature(h1.signature())
                .map_err(|e| at(&second.display().to_string(), e))?;
            let bounds = Bounds {
                vars: *vars,
                depth: *depth,
                system_limit: *system_limit,
            };
            let (separation, verdict) =
                cross_check(&h1, &h2, bounds, &caps).map_err(|e| match e {
                    Error::CriteriaConflict(m) => Failure {
                        code: 1,
                        message: format!("criteria conflict: {m}"),
                    },
                    other => plain(other),
                })?;
            let mut out = Output {
                text: format!(
                    "{}{}",
                    verdict.report(&h1, &h2),
                    separation.report(&h1, &h2)
                ),
                ..Output::default()
            }
            .kv(
                "status",
                if verdict.is_equivalent() {
                    "equivalent-up-to-bound"
                } else {
                    "distinguished"
                },
            )
            .kv("bounds", bounds);
            if let Some(w) = &verdict.witness {
                let holds = match w.holds_in {
                    algeo::Side::First => h1.name(),
                    algeo::Side::Second => h2.name(),
                };
                out = out
                    .kv("witness-vars", w.system.var_count())
                    .kv("witness-system-size", w.system.len());
                for e in w.system.equations() {
                    out = out.kv("witness-premise", e.display(h1.signature()));
                }
                out = out
                    .kv("witness-pair", w.pair.display(h1.signature()))
                    .kv("witness-holds-in", holds);
            }
            Ok(out
                .kv("first-embeds", separation.first_into_second.embeds)
                .kv("second-embeds", separation.second_into_first.embeds)
                .kv("separation-equivalent", separation.equivalent()))
        }
        Command::Identities { space, depth } => {
            let h = load_algebra(&space.algebra)?;
            let ids = identities_up_to(&h, space.vars, *depth, &caps).map_err(plain)?;
            let mut out = Output::default()
                .kv("depth", depth)
                .kv("identities", ids.len());
            for e in &ids {
                let line = e.display(h.signature()).to_string();
                let _ = writeln!(out.text, "{line}");
                out = out.kv("identity", line);
            }
            out.text = format!("# depth {depth}: {} identities\n{}", ids.len(), out.text);
            Ok(out)
        }
        Command::Quasi {
            space,
            system,
            conclusion,
        } => {
            let h = load_algebra(&space.algebra)?;
            let q = QuasiIdentity {
                premises: load_system(system.as_deref(), &h, space.vars)?,
                conclusion: equation("--conclusion", conclusion, &h, space.vars)?,
            };
            let holds = algeo::check_quasi_identity(&h, &q, &caps).map_err(plain)?;
            Ok(Output::fields(&[("holds", holds.to_string())]))
        }
        Command::Reduce { space, system } => {
            let h = load_algebra(&space.algebra)?;
            let t = load_system(Some(system), &h, space.vars)?;
            let reduced = reduce_system(&h, &t, &caps).map_err(plain)?;
            let mut out = Output {
                text: format!(
                    "# reduced {} equation(s) to {}\n{}",
                    t.len(),
                    reduced.len(),
                    reduced.to_text(h.signature())
                ),
                ..Output::default()
            }
            .kv("original", t.len())
            .kv("reduced", reduced.len());
            for e in reduced.equations() {
                out = out.kv("equation", e.display(h.signature()));
            }
            Ok(out)
        }
        Command::Pullback {
            space,
            system,
            substitution,
            pair,
        } => {
            let h = load_algebra(&space.algebra)?;
            let t = load_system(system.as_deref(), &h, space.vars)?;
            let source = substitution.display().to_string();
            let images = algeo::parse_term_lines(&read(substitution)?, h.signature(), space.vars)
                .map_err(|e| at(&source, e))?;
            let s = Substitution::new(h.signature(), images.len(), space.vars, images)
                .map_err(|e| at(&source, e))?;
            match pair {
                Some(p) => {
                    let pair = equation("--pair", p, &h, s.source_vars())?;
                    let member = pullback_contains(&h, &s, &t, &pair, &caps).map_err(plain)?;
                    Ok(Output::fields(&[("member", member.to_string())]))
                }
                None => Ok(points_output(
                    &pullback_set(&h, &s, &t, &caps).map_err(plain)?.points,
                )),
            }
        }
        Command::RepSolve { space } => {
            let (r, terms) = load_rep_space(space)?;
            let sols =
                solve_action_system(&r, space.xvars, space.yvars, &terms, &caps).map_err(plain)?;
            let mut out = Output::default().kv("points", sols.len());
            for p in &sols {
                let _ = writeln!(out.text, "{p}");
                out = out.kv("point", p);
            }
            Ok(out)
        }
        Command::RepClosure { space, term } => {
            let (r, terms) = load_rep_space(space)?;
            let w0 = ActionTerm::parse(term).map_err(|e| at("--term", e))?;
            let member = action_closure_contains(&r, space.xvars, space.yvars, &terms, &w0, &caps)
                .map_err(plain)?;
            Ok(Output::fields(&[("member", member.to_string())]))
        }
        Command::RepTriangular { reps } => {
            let [first, second] = reps.as_slice() else {
                return Err(input("`rep-triangular` needs exactly two --rep files"));
            };
            let tri =
                triangular_product(&load_rep(first)?, &load_rep(second)?, &caps).map_err(plain)?;
            Ok(rep_output(&tri.rep))
        }
        Command::RepWreath { rep, group } => {
            let g = FiniteGroup::parse(&read(group)?)
                .map_err(|e| at(&group.display().to_string(), e))?;
            let w = wreath_product(&load_rep(rep)?, &g, &caps).map_err(plain)?;
            Ok(rep_output(&w))
        }
    }
}

fn load_rep_space(space: &RepSpace) -> Outcome<(FiniteRepresentation, Vec<ActionTerm>)> {
    let r = load_rep(&space.rep)?;
    let mut terms = Vec::new();
    if let Some(path) = &space.terms {
        let source = path.display().to_string();
        for (i, line) in read(path)?.lines().enumerate() {
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let t = ActionTerm::parse(body).map_err(|e| match e {
                Error::Parse { message, .. } => at(
                    &source,
                    Error::Parse {
                        line: i + 1,
                        message,
                    },
                ),
                other => at(&format!("{source}:{}", i + 1), other),
            })?;
            terms.push(t);
        }
    }
    Ok((r, terms))
}

fn rep_output(r: &FiniteRepresentation) -> Output {
    Output {
        text: r.to_text(),
        ..Output::default()
    }
    .kv("name", r.name())
    .kv("modulus", r.modulus())
    .kv("dim", r.dim())
    .kv("group-order", r.group().order())
}

fn lattice(space: &Space, mode: Mode, format: Format, caps: Caps) -> Outcome<Output> {
    let h = load_algebra(&space.algebra)?;
    let mode = match mode {
        Mode::Exhaustive => EnumerationMode::Exhaustive,
        Mode::Generators => EnumerationMode::Generators,
        Mode::Auto => EnumerationMode::Auto,
    };
    let l: ClosedSetLattice =
        algeo::enumerate_closed_sets(&AffineSpace::new(&h, space.vars, caps), mode)
            .map_err(plain)?;
    let text = match format {
        Format::Dot => l.to_dot(),
        Format::Text => l.report(),
    };
    let mut out = Output {
        text,
        ..Output::default()
    }
    .kv("elements", l.len())
    .kv("atoms", l.atoms().len())
    .kv("height", l.height())
    .kv("distributive", l.is_distributive().holds)
    .kv("modular", l.is_modular().holds);
    for e in l.elements() {
        out = out.kv("element-size", e.len());
    }
    Ok(out)
}
