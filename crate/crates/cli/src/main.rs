use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};

use stablelat::completion::{canonical_extension, is_compact, is_dense, macneille, Completion};
use stablelat::io::{
    read_algebra, read_cxt, read_equations, read_family, read_lattice, read_polarity, write_algebra, write_cxt,
    write_dot, write_lattice, write_polarity, Family,
};
use stablelat::logic::{
    check_equation, definable_set_with, evaluate, parse_equation, parse_formula, Assignment, EquationOutcome,
    ExpandedPolarity, Point, Var,
};
use stablelat::order::FiniteLattice;
use stablelat::polarity::{stable_set_lattice, Polarity};
use stablelat::suites::{suite, SUITES};
use stablelat::ultra::{
    theta_stable, ultraproduct_algebras, ultraproduct_polarities, verify_theta, UltraContext, Ultrafilter,
};
use stablelat::{BitSet, Bounds, Error};

#[derive(Parser)]
#[command(name = "stablelat", version, about = "Stable-set lattices, completions and ultraproducts of finite polarities")]
struct Cli {
    /// Write the constructed structure to this file.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Seed for every sampled check.
    #[arg(long, global = true, value_parser = parse_u64)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    max_product: Option<usize>,
    #[arg(long, global = true)]
    max_extents: Option<usize>,
    /// Node budget for isomorphism and embedding searches.
    #[arg(long, global = true)]
    iso_budget: Option<u64>,
    /// Budget of value-class pairs for exhaustive compactness checks.
    #[arg(long, global = true)]
    compact_budget: Option<u128>,
    /// Budget of evaluations for equation checks.
    #[arg(long, global = true)]
    eval_budget: Option<u128>,
    /// Fail instead of sampling when a budget is exceeded.
    #[arg(long, global = true)]
    no_sampling: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lattice of stable sets of a polarity (context or JSON file).
    StableLattice { polarity: PathBuf },
    /// MacNeille completion of a lattice.
    Macneille { lattice: PathBuf },
    /// Canonical extension of a lattice, with its density and compactness report.
    Canext { lattice: PathBuf },
    /// Ultraproduct of a family at a principal ultrafilter.
    Ultraproduct {
        family: PathBuf,
        /// Principal index; overrides the file's "ultrafilter".
        #[arg(long)]
        at: Option<usize>,
    },
    /// The embedding of the ultraproduct of stable-set lattices, verified.
    Theta {
        family: PathBuf,
        #[arg(long)]
        at: Option<usize>,
    },
    /// Evaluate a formula, or print the set it defines when one variable is left free.
    Eval {
        polarity: PathBuf,
        #[arg(long)]
        formula: String,
        /// `v1=name`; prefix the name with `x:` or `y:` when both carriers have it.
        #[arg(long = "assign", value_name = "VAR=POINT")]
        assign: Vec<String>,
        /// `S=a,b`: interpret a symbol as a subset of X.
        #[arg(long = "set", value_name = "SYMBOL=NAMES")]
        set: Vec<String>,
        /// `T=m,n`: interpret a symbol as a subset of Y.
        #[arg(long = "set-y", value_name = "SYMBOL=NAMES")]
        set_y: Vec<String>,
    },
    /// Check equations `s = t` given inline or as a file.
    CheckEq {
        lattice: PathBuf,
        #[arg(long)]
        equation: String,
    },
    /// Run a named property suite, or `all`.
    Verify { suite: String },
    /// Hasse diagram in DOT.
    Dot { lattice: PathBuf },
    /// Convert a polarity between the context and JSON formats.
    Convert {
        polarity: PathBuf,
        #[arg(long, value_enum)]
        to: Format,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Cxt,
    Json,
}

fn parse_u64(s: &str) -> Result<u64, String> {
    let r = match s.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    r.map_err(|e| e.to_string())
}

/// Why a run did not succeed.
enum Failure {
    /// A checked property failed; the witness has been printed.
    Verification,
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn input_error(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {e}", path.display()))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(path, e))
}

fn load_polarity(path: &Path) -> Result<Polarity, Failure> {
    let text = read(path)?;
    let is_cxt = text.lines().find(|l| !l.trim().is_empty()).map(str::trim) == Some("B");
    let r = if is_cxt { read_cxt(&text) } else { read_polarity(&text) };
    r.map_err(|e| input_error(path, e))
}

fn load_lattice(path: &Path) -> Result<Arc<FiniteLattice>, Failure> {
    read_lattice(&read(path)?).map(Arc::new).map_err(|e| input_error(path, e))
}

struct Ctx {
    bounds: Bounds,
    output: Option<PathBuf>,
}

impl Ctx {
    /// Writes an artifact to `-o` or to stdout.
    fn emit(&self, text: &str) -> Outcome {
        match &self.output {
            Some(p) => fs::write(p, text).map_err(|e| input_error(p, e)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    /// Saves an artifact only when `-o` is given.
    fn save(&self, text: &str) -> Outcome {
        match &self.output {
            Some(p) => fs::write(p, text).map_err(|e| input_error(p, e)),
            None => Ok(()),
        }
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn print_embedding(c: &Completion) {
    let (s, t) = (c.source(), c.target());
    println!("embedding:");
    for a in s.elements() {
        println!("  {} -> {}", s.name(a), t.name(c.embed().apply(a)));
    }
}

fn principal(at: Option<usize>, file: Option<usize>, len: usize) -> Result<Ultrafilter, Failure> {
    let i = at
        .or(file)
        .ok_or_else(|| Failure::Input("no ultrafilter: pass --at or set \"ultrafilter\" in the family file".into()))?;
    Ok(Ultrafilter::principal(len, i)?)
}

fn point(p: &Polarity, text: &str) -> Result<Point, Failure> {
    let find = |names: &[String], n: &str| names.iter().position(|m| m == n);
    let (side, name) = match text.split_once(':') {
        Some(("x", n)) => (Some(true), n),
        Some(("y", n)) => (Some(false), n),
        _ => (None, text),
    };
    let x = find(p.x_names(), name).filter(|_| side != Some(false));
    let y = find(p.y_names(), name).filter(|_| side != Some(true));
    match (x, y) {
        (Some(i), None) => Ok(Point::X(i)),
        (None, Some(j)) => Ok(Point::Y(j)),
        (Some(_), Some(_)) => Err(Failure::Input(format!("`{name}` names points of both carriers; write x:{name} or y:{name}"))),
        (None, None) => Err(Error::UnknownElement(name.to_string()).into()),
    }
}

fn subset(names: &[String], spec: &str) -> Result<(String, BitSet), Failure> {
    let (sym, list) = spec
        .split_once('=')
        .ok_or_else(|| Failure::Input(format!("expected SYMBOL=NAMES, found `{spec}`")))?;
    let mut set = BitSet::new(names.len());
    for n in list.split(',').map(str::trim).filter(|n| !n.is_empty()) {
        let i = names
            .iter()
            .position(|m| m == n)
            .ok_or_else(|| Failure::from(Error::UnknownElement(n.to_string())))?;
        set.insert(i);
    }
    Ok((sym.trim().to_string(), set))
}

fn point_name(p: &Polarity, u: Point) -> String {
    match u {
        Point::X(i) => p.x_names()[i].clone(),
        Point::Y(j) => p.y_names()[j].clone(),
    }
}

fn run(cli: Cli) -> Outcome {
    let mut bounds = Bounds::default();
    if let Some(s) = cli.seed {
        bounds.seed = s;
    }
    if let Some(v) = cli.max_product {
        bounds.max_product = v;
    }
    if let Some(v) = cli.max_extents {
        bounds.max_extents = v;
    }
    if let Some(v) = cli.iso_budget {
        bounds.iso_budget = v;
    }
    if let Some(v) = cli.compact_budget {
        bounds.compact_budget = v;
    }
    if let Some(v) = cli.eval_budget {
        bounds.eval_budget = v;
    }
    bounds.allow_sampling = !cli.no_sampling;
    eprintln!(
        "config: seed={:#x} max_product={} max_extents={} iso_budget={} compact_budget={} eval_budget={} sampling={}",
        bounds.seed,
        bounds.max_product,
        bounds.max_extents,
        bounds.iso_budget,
        bounds.compact_budget,
        bounds.eval_budget,
        if bounds.allow_sampling { "on" } else { "off" }
    );
    let ctx = Ctx {
        bounds,
        output: cli.output,
    };
    let bounds = &ctx.bounds;

    match cli.command {
        Command::StableLattice { polarity } => {
            let p = load_polarity(&polarity)?;
            let s = stable_set_lattice(&p, bounds)?;
            ctx.emit(&write_lattice(&s.lattice))
        }
        Command::Macneille { lattice } => {
            let l = load_lattice(&lattice)?;
            let c = macneille(&l, bounds)?;
            let d = is_dense(&c);
            println!("target: {} elements", c.target().len());
            print_embedding(&c);
            println!("dense: {}", yes(d.dense));
            ctx.save(&write_lattice(c.target()))?;
            if d.dense {
                Ok(())
            } else {
                println!("witness: {}", c.target().name(d.witness().expect("not dense")));
                Err(Failure::Verification)
            }
        }
        Command::Canext { lattice } => {
            let l = load_lattice(&lattice)?;
            let c = canonical_extension(&l, bounds)?;
            let d = is_dense(&c);
            let k = is_compact(&c, bounds)?;
            let onto = c.embed().flags().surjective;
            println!("target: {} elements", c.target().len());
            print_embedding(&c);
            println!("dense: {}, compact: {}, embedding surjective: {}", yes(d.dense), yes(k.compact), yes(onto));
            ctx.save(&write_lattice(c.target()))?;
            if let Some(z) = d.witness() {
                println!("density witness: {}", c.target().name(z));
            }
            if let Some((s, t)) = &k.witness {
                let names = |v: &[usize]| v.iter().map(|&a| l.name(a).to_string()).collect::<Vec<_>>().join(", ");
                println!("compactness witness: S = {{{}}}, T = {{{}}}", names(s), names(t));
            }
            if d.dense && k.compact {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Ultraproduct { family, at } => {
            let f = read_family(&read(&family)?).map_err(|e| input_error(&family, e))?;
            let u = principal(at, f.ultrafilter, f.family.len())?;
            match f.family {
                Family::Polarities(ps) => {
                    let up = ultraproduct_polarities(&UltraContext::new(ps, u)?)?;
                    ctx.emit(&write_polarity(&up.polarity))
                }
                Family::Algebras(ls) => {
                    let ua = ultraproduct_algebras(&UltraContext::new(ls, u)?)?;
                    ctx.emit(&write_algebra(&ua.algebra))
                }
            }
        }
        Command::Theta { family, at } => {
            let f = read_family(&read(&family)?).map_err(|e| input_error(&family, e))?;
            let u = principal(at, f.ultrafilter, f.family.len())?;
            let Family::Polarities(ps) = f.family else {
                return Err(input_error(&family, "theta needs a family of polarities"));
            };
            let t = theta_stable(&UltraContext::new(ps, u)?, bounds)?;
            let r = verify_theta(&t)?;
            println!("theta:");
            for a in t.source.lattice.elements() {
                println!("  {} -> {}", t.source.lattice.name(a), t.target.lattice.name(t.map.apply(a)));
            }
            println!("{r}");
            ctx.save(&write_lattice(&t.target.lattice))?;
            if r.pass() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Eval {
            polarity,
            formula,
            assign,
            set,
            set_y,
        } => {
            let p = load_polarity(&polarity)?;
            let phi = parse_formula(&formula)?;
            let mut ep = ExpandedPolarity::new(p.clone());
            for s in &set {
                let (sym, bits) = subset(p.x_names(), s)?;
                ep = ep.with_x(&sym, bits);
            }
            for s in &set_y {
                let (sym, bits) = subset(p.y_names(), s)?;
                ep = ep.with_y(&sym, bits);
            }
            let mut assignment = Assignment::new();
            for a in &assign {
                let (v, name) = a
                    .split_once('=')
                    .ok_or_else(|| Failure::Input(format!("expected VAR=POINT, found `{a}`")))?;
                let v = v
                    .trim()
                    .strip_prefix('v')
                    .and_then(|n| n.parse().ok())
                    .ok_or_else(|| Failure::Input(format!("`{v}` is not a variable")))?;
                assignment.insert(Var(v), point(&p, name.trim())?);
            }
            let open: Vec<Var> = phi.free_vars().into_iter().filter(|v| !assignment.contains_key(v)).collect();
            match open.as_slice() {
                [] => println!("{}", evaluate(&ep, &phi, &assignment)?),
                [v] => {
                    let set = definable_set_with(&ep, &phi, *v, &assignment)?;
                    let names: Vec<String> = set.iter().map(|u| point_name(&p, ep.point(u))).collect();
                    println!("{{{}}}", names.join(", "));
                }
                more => {
                    return Err(Error::FreeVariableCount {
                        expected: 1,
                        found: more.len(),
                    }
                    .into())
                }
            }
            Ok(())
        }
        Command::CheckEq { lattice, equation } => {
            let a = read_algebra(&read(&lattice)?).map_err(|e| input_error(&lattice, e))?;
            let path = Path::new(&equation);
            let eqs = if path.is_file() {
                read_equations(&read(path)?).map_err(|e| input_error(path, e))?
            } else {
                vec![(1, parse_equation(&equation)?)]
            };
            let mut failed = false;
            for (_, eq) in &eqs {
                match check_equation(&a, eq, bounds)? {
                    EquationOutcome::Holds { assignments } => println!("{eq}: holds ({assignments} assignments)"),
                    EquationOutcome::Fails { witness, lhs, rhs } => {
                        failed = true;
                        let w: BTreeMap<&str, &str> =
                            witness.iter().map(|(k, &v)| (k.as_str(), a.lattice.name(v))).collect();
                        let w: Vec<String> = w.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                        println!(
                            "{eq}: fails at {}: lhs = {}, rhs = {}",
                            w.join(", "),
                            a.lattice.name(lhs),
                            a.lattice.name(rhs)
                        );
                    }
                }
            }
            if failed {
                Err(Failure::Verification)
            } else {
                Ok(())
            }
        }
        Command::Verify { suite: name } => {
            let chosen: Vec<_> = if name == "all" {
                SUITES.iter().collect()
            } else {
                let s = suite(&name).ok_or_else(|| {
                    let names: Vec<&str> = SUITES.iter().map(|s| s.name).collect();
                    Failure::Input(format!("unknown suite `{name}`; known: all, {}", names.join(", ")))
                })?;
                vec![s]
            };
            let mut pass = true;
            for s in chosen {
                let r = (s.run)(bounds);
                println!("{r}");
                pass &= r.pass;
            }
            if pass {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Command::Dot { lattice } => {
            let l = load_lattice(&lattice)?;
            ctx.emit(&write_dot(&l))
        }
        Command::Convert { polarity, to } => {
            let p = load_polarity(&polarity)?;
            ctx.emit(&match to {
                Format::Cxt => write_cxt(&p),
                Format::Json => write_polarity(&p),
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
