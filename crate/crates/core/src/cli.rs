//! Command-line front end. Results go to stdout as JSON, diagnostics to
//! stderr. Exit codes: 0 success, 2 invalid input, 3 negative verdict,
//! 4 numerical non-convergence.

use crate::colorful::{find_colorful, is_colorful, ColorfulCertificate, ColorfulSearch, DEFAULT_SEARCH_BUDGET};
use crate::gen;
use crate::geometry3::{colorful_simplex, hat_intersection_empty, GeometryError, TangentLine};
use crate::gp::{solve_gp, GpError, GpKktReport, GpProblem};
use crate::instance::{InstanceError, InstanceFile, MdpFile, PointsetFile, SystemFile};
use crate::mdp::{is_discounted, random_mdp, solve_mdp, value_iteration, MdpError};
use crate::rational::{format_q, format_vec, parse_exact, Q};
use crate::satgen::{cnf_to_classical, cnf_to_tropical, encode_assignment, sat_oracle, Cnf, GadgetKind};
use crate::system::{check_pointed, eval_classical, eval_tropical, ColoredSupport, PointednessCertificate, Tag};
use crate::tropical::{solve_tropical, TropicalError};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NEGATIVE: i32 = 3;
pub const EXIT_NONCONVERGENCE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "posysolve", version, about = "Exact and numerical solvers for square posynomial systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Tropical,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    Tropical,
    Classical,
    Mdp,
    Pointset,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve a tropical system exactly through its linear relaxation.
    SolveTropical {
        file: PathBuf,
        /// Comma-separated rationals; defaults to the file's `vector`, then to
        /// a vector found by the colorful search.
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
        #[arg(long)]
        no_colorful_check: bool,
    },
    /// Solve a classical system through the log-sum-exp geometric program.
    SolveClassical {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
        /// Feasibility and stationarity tolerance.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Decide whether a vector is colorful for the file's support.
    CheckColorful {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        vector: Option<String>,
    },
    /// Search one-exponent-per-color tuples for a colorful sum.
    FindColorful {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SEARCH_BUDGET)]
        budget: usize,
    },
    /// Tangent lines and colorful triangle of three planar point sets.
    ColorfulSimplex { file: PathBuf },
    /// Exact values of a discounted MDP, cross-checked by value iteration.
    MdpSolve {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Build the 3-SAT gadget system from a DIMACS or cnf-ref file.
    ReduceSat {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Kind::Tropical)]
        kind: Kind,
    },
    /// Pointedness of the file's support, with a witness direction.
    CheckPointed { file: PathBuf },
    /// Evaluate the file's system at a point (the `witness` field by default).
    Eval {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
    },
    /// Emit a random instance.
    Generate {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
}

struct Failure {
    code: i32,
    message: String,
    /// Printed on stdout for negative verdicts.
    payload: Option<Value>,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into(), payload: None }
    }
    fn negative(message: impl Into<String>, payload: Value) -> Self {
        Failure { code: EXIT_NEGATIVE, message: message.into(), payload: Some(payload) }
    }
}

impl From<InstanceError> for Failure {
    fn from(e: InstanceError) -> Self {
        Failure::invalid(e.to_string())
    }
}

type Outcome = Result<Value, Failure>;

/// Parses `argv` (program name first), runs the command and returns the exit
/// code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(Output::Json(v)) => {
            let _ = writeln!(out, "{}", to_text(&v));
            EXIT_OK
        }
        Ok(Output::Instance(inst)) => {
            let _ = write!(out, "{}", inst.to_json());
            EXIT_OK
        }
        Err(f) => {
            if let Some(p) = f.payload {
                let _ = writeln!(out, "{}", to_text(&p));
            }
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn to_text(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

enum Output {
    Json(Value),
    /// Instance files keep their canonical field order.
    Instance(InstanceFile),
}

fn dispatch(cmd: Command) -> Result<Output, Failure> {
    if let Command::ReduceSat { file, kind } = &cmd {
        return cmd_reduce_sat(file, *kind).map(Output::Instance);
    }
    if let Command::Generate { kind, seed, dim } = &cmd {
        return cmd_generate(*kind, *seed, *dim).map(Output::Instance);
    }
    let v = match cmd {
        Command::SolveTropical { file, vector, no_colorful_check } => cmd_solve_tropical(&file, vector.as_deref(), !no_colorful_check),
        Command::SolveClassical { file, vector, tol } => cmd_solve_classical(&file, vector.as_deref(), tol),
        Command::CheckColorful { file, vector } => cmd_check_colorful(&file, vector.as_deref()),
        Command::FindColorful { file, budget } => cmd_find_colorful(&file, budget),
        Command::ColorfulSimplex { file } => cmd_colorful_simplex(&file),
        Command::MdpSolve { file, tol } => cmd_mdp_solve(&file, tol),
        Command::CheckPointed { file } => cmd_check_pointed(&file),
        Command::Eval { file, point } => cmd_eval(&file, point.as_deref()),
        Command::ReduceSat { .. } | Command::Generate { .. } => unreachable!("handled above"),
    }?;
    Ok(Output::Json(v))
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::invalid(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<InstanceFile, Failure> {
    Ok(InstanceFile::parse(&read(path)?)?)
}

fn parse_vector(s: &str) -> Result<Vec<Q>, Failure> {
    s.split(',').map(|t| parse_exact(t).map_err(|e| Failure::invalid(format!("--vector: {e}")))).collect()
}

fn qs(v: &[Q]) -> Value {
    json!(format_vec(v))
}

fn tag_json(t: &Tag) -> Value {
    json!({"color": t.color, "index": t.local})
}

/// Support of any system-shaped file, regardless of tropical/classical kind.
fn support_of(inst: &InstanceFile) -> Result<(ColoredSupport, &SystemFile), Failure> {
    match inst {
        InstanceFile::Tropical(f) => Ok((f.tropical()?.support().clone(), f)),
        InstanceFile::Classical(f) => Ok((f.classical()?.support().clone(), f)),
        other => Err(Failure::invalid(format!("expected a tropical or classical instance, got `{}`", other.kind()))),
    }
}

fn chosen_vector(flag: Option<&str>, file: &SystemFile) -> Result<Option<Vec<Q>>, Failure> {
    match flag {
        Some(s) => Ok(Some(parse_vector(s)?)),
        None => Ok(file.vector()?),
    }
}

fn certificate_json(c: &ColorfulCertificate) -> Value {
    match c {
        ColorfulCertificate::Colorful { decomposition, separators } => json!({
            "verdict": c.verdict(),
            "decomposition": qs(decomposition),
            "separators": separators.iter().map(|s| qs(s)).collect::<Vec<_>>(),
        }),
        ColorfulCertificate::NotColorful { missing_color, decomposition } => json!({
            "verdict": c.verdict(),
            "missing_color": missing_color,
            "decomposition": qs(decomposition),
        }),
        ColorfulCertificate::NotInCone { separator } => json!({
            "verdict": c.verdict(),
            "separator": qs(separator),
        }),
    }
}

/// Explicit vector, or the first colorful tuple sum.
fn resolve_vector(flag: Option<&str>, file: &SystemFile, sup: &ColoredSupport) -> Result<Vec<Q>, Failure> {
    if let Some(y) = chosen_vector(flag, file)? {
        if y.len() != sup.dim() {
            return Err(Failure::invalid(format!("vector has dimension {}, expected {}", y.len(), sup.dim())));
        }
        return Ok(y);
    }
    match find_colorful(sup, DEFAULT_SEARCH_BUDGET) {
        ColorfulSearch::Found { vector, .. } => Ok(vector),
        _ => Err(Failure::negative("no vector given and the colorful search found none", json!({"verdict": "no-colorful-vector-found"}))),
    }
}

fn cmd_solve_tropical(path: &Path, flag: Option<&str>, check: bool) -> Outcome {
    let inst = load(path)?;
    let InstanceFile::Tropical(file) = &inst else {
        return Err(InstanceError::WrongKind { expected: "tropical", got: inst.kind() }.into());
    };
    let sys = file.tropical()?;
    let y = resolve_vector(flag, file, sys.support())?;
    match solve_tropical(&sys, &y, check) {
        Ok(r) => Ok(json!({
            "vector": qs(&y),
            "x": qs(&r.x),
            "objective": format_q(&r.objective),
            "dual": qs(&r.dual),
            "active": r.active.iter().map(|t| t.as_ref().map(tag_json).unwrap_or(Value::Null)).collect::<Vec<_>>(),
            "residual": qs(&r.residual),
            "exact_solution": r.is_exact_solution(),
            "colorful_checked": r.colorful_checked,
        })),
        Err(TropicalError::NotColorful { certificate, .. }) => Err(Failure::negative("vector is not colorful", certificate_json(&certificate))),
        Err(TropicalError::InfeasibleRelaxation { farkas }) => {
            Err(Failure::negative("relaxation is infeasible", json!({"verdict": "infeasible", "farkas": qs(&farkas)})))
        }
        Err(TropicalError::UnboundedRelaxation { ray }) => {
            Err(Failure::negative("relaxation is unbounded", json!({"verdict": "unbounded", "ray": qs(&ray)})))
        }
        Err(e @ TropicalError::DimensionMismatch { .. }) => Err(Failure::invalid(e.to_string())),
        Err(e @ TropicalError::Invariant(_)) => Err(Failure { code: EXIT_NONCONVERGENCE, message: e.to_string(), payload: None }),
    }
}

fn kkt_json(r: &GpKktReport, residual: &[f64]) -> Value {
    json!({
        "X": r.log_x,
        "x": r.x,
        "multipliers": r.multipliers,
        "barrier_multipliers": r.barrier_multipliers,
        "normalizers": r.normalizers,
        "stationarity": r.stationarity,
        "g": r.g,
        "residual": residual,
        "barrier_t": r.barrier_t,
        "newton_steps": r.newton_steps,
    })
}

fn cmd_solve_classical(path: &Path, flag: Option<&str>, tol: f64) -> Outcome {
    let inst = load(path)?;
    let InstanceFile::Classical(file) = &inst else {
        return Err(InstanceError::WrongKind { expected: "classical", got: inst.kind() }.into());
    };
    let sys = file.classical()?;
    let y = resolve_vector(flag, file, sys.support())?;
    let problem = match GpProblem::new(sys.clone(), y.clone()) {
        Ok(p) => p.with_tolerances(tol, tol),
        Err(GpError::NotPointed) => return Err(Failure::negative("exponents are not pointed", json!({"verdict": "not-pointed"}))),
        Err(GpError::NotColorful(v)) => return Err(Failure::negative("vector is not colorful", json!({"verdict": v}))),
        Err(e) => return Err(Failure::invalid(e.to_string())),
    };
    let residual = |r: &GpKktReport| -> Vec<f64> { eval_classical(&sys, &r.x).map(|v| v.iter().map(|p| p - 1.0).collect()).unwrap_or_default() };
    match solve_gp(&problem) {
        Ok(r) => {
            let mut v = kkt_json(&r, &residual(&r));
            v["vector"] = qs(&y);
            Ok(v)
        }
        Err(GpError::MaxIterations { best }) | Err(GpError::KktViolation { report: best }) => {
            let mut v = kkt_json(&best, &residual(&best));
            v["verdict"] = json!("not-converged");
            Err(Failure { code: EXIT_NONCONVERGENCE, message: "barrier method did not meet the KKT tolerances".into(), payload: Some(v) })
        }
        Err(e) => Err(Failure::invalid(e.to_string())),
    }
}

fn cmd_check_colorful(path: &Path, flag: Option<&str>) -> Outcome {
    let inst = load(path)?;
    let (sup, file) = support_of(&inst)?;
    let Some(y) = chosen_vector(flag, file)? else {
        return Err(Failure::invalid("no vector: pass --vector or add `vector` to the file"));
    };
    let cert = is_colorful(&y, &sup).map_err(|e| Failure::invalid(e.to_string()))?;
    let mut v = certificate_json(&cert);
    v["vector"] = qs(&y);
    if cert.is_colorful() {
        Ok(v)
    } else {
        Err(Failure::negative(format!("vector is {}", cert.verdict()), v))
    }
}

fn cmd_find_colorful(path: &Path, budget: usize) -> Outcome {
    let inst = load(path)?;
    let (sup, _) = support_of(&inst)?;
    match find_colorful(&sup, budget) {
        ColorfulSearch::Found { vector, tuple, certificate } => Ok(json!({
            "status": "found",
            "vector": qs(&vector),
            "tuple": tuple.iter().map(tag_json).collect::<Vec<_>>(),
            "certificate": certificate_json(&certificate),
        })),
        ColorfulSearch::Exhausted { examined } => Err(Failure::negative(
            "no tuple sum is colorful (this does not rule out other colorful vectors)",
            json!({"status": "exhausted", "examined": examined}),
        )),
        ColorfulSearch::Unknown { examined } => {
            Err(Failure::negative("search budget exhausted", json!({"status": "unknown", "examined": examined})))
        }
    }
}

fn tangent_json(t: &TangentLine) -> Value {
    json!({
        "color": t.color,
        "normal": qs(&t.line.normal),
        "offset": format_q(&t.line.offset),
        "affine_normal": t.line.affine_normal().map(|h| qs(&h)).unwrap_or(Value::Null),
        "touching": t.touching.iter().map(|(j, p)| json!({"color": j, "vertex": qs(p)})).collect::<Vec<_>>(),
    })
}

fn cmd_colorful_simplex(path: &Path) -> Outcome {
    let inst = load(path)?;
    let InstanceFile::Pointset(file) = &inst else {
        return Err(InstanceError::WrongKind { expected: "pointset", got: inst.kind() }.into());
    };
    let polys = file.polygons()?;
    let sets: Vec<Vec<Vec<Q>>> = polys.iter().map(|p| p.to_vecs()).collect();
    let separated = hat_intersection_empty(&sets).expect("three sets");
    match colorful_simplex(&polys) {
        Ok(Some(s)) => Ok(json!({
            "status": "simplex",
            "vertices": s.vertices.iter().map(|p| qs(p)).collect::<Vec<_>>(),
            "tangents": s.tangents.iter().map(tangent_json).collect::<Vec<_>>(),
            "bar_separated": separated,
        })),
        Ok(None) => Err(Failure::negative("colorful interior is empty", json!({"status": "empty", "bar_separated": separated}))),
        Err(GeometryError::NoTangent(i)) => Err(Failure::negative(
            format!("no tangent line for color {i}"),
            json!({"status": "no-tangent", "color": i, "bar_separated": separated}),
        )),
        Err(e) => Err(Failure::invalid(e.to_string())),
    }
}

fn cmd_mdp_solve(path: &Path, tol: f64) -> Outcome {
    let inst = load(path)?;
    let InstanceFile::Mdp(file) = &inst else {
        return Err(InstanceError::WrongKind { expected: "mdp", got: inst.kind() }.into());
    };
    let m = file.model()?;
    if !is_discounted(&m) {
        return Err(Failure::negative("model is not of discounted type", json!({"discounted": false})));
    }
    let exact = match solve_mdp(&m) {
        Ok(v) => v,
        Err(MdpError::Tropical(TropicalError::InfeasibleRelaxation { farkas })) => {
            return Err(Failure::negative("Bellman inequalities are infeasible", json!({"verdict": "infeasible", "farkas": qs(&farkas)})))
        }
        Err(e) => return Err(Failure { code: EXIT_NONCONVERGENCE, message: e.to_string(), payload: None }),
    };
    let approx = match value_iteration(&m, tol) {
        Ok(v) => Value::from(v),
        Err(e) => return Err(Failure { code: EXIT_NONCONVERGENCE, message: e.to_string(), payload: Some(json!({"values": qs(&exact)})) }),
    };
    Ok(json!({"discounted": true, "values": qs(&exact), "value_iteration": approx}))
}

fn load_cnf(path: &Path) -> Result<Cnf, Failure> {
    let text = read(path)?;
    if text.trim_start().starts_with('{') {
        match InstanceFile::parse(&text)? {
            InstanceFile::CnfRef(f) => Ok(f.cnf()?),
            other => Err(InstanceError::WrongKind { expected: "cnf-ref", got: other.kind() }.into()),
        }
    } else {
        Cnf::from_dimacs(&text).map_err(|e| Failure::invalid(e.to_string()))
    }
}

fn cmd_reduce_sat(path: &Path, kind: Kind) -> Result<InstanceFile, Failure> {
    let cnf = load_cnf(path)?;
    let assignment = sat_oracle(&cnf).ok().flatten();
    let gadget = match kind {
        Kind::Tropical => GadgetKind::Tropical,
        Kind::Classical => GadgetKind::Classical,
    };
    let witness = assignment.as_ref().map(|a| encode_assignment(&cnf, a, gadget).expect("oracle assignment satisfies the formula"));
    let inst = match kind {
        Kind::Tropical => InstanceFile::Tropical(SystemFile::from_tropical(&cnf_to_tropical(&cnf), None, witness.as_deref())),
        Kind::Classical => InstanceFile::Classical(SystemFile::from_classical(&cnf_to_classical(&cnf), None, witness.as_deref())),
    };
    Ok(inst)
}

fn cmd_check_pointed(path: &Path) -> Outcome {
    let inst = load(path)?;
    let (sup, _) = support_of(&inst)?;
    match check_pointed(&sup) {
        PointednessCertificate::Pointed { witness } => Ok(json!({"pointed": true, "witness": qs(&witness)})),
        PointednessCertificate::NotPointed { optimum } => {
            Err(Failure::negative("exponents are not pointed", json!({"pointed": false, "optimum": format_q(&optimum)})))
        }
    }
}

fn cmd_eval(path: &Path, point: Option<&str>) -> Outcome {
    let inst = load(path)?;
    let (_, file) = support_of(&inst)?;
    let x = match point {
        Some(s) => parse_vector(s)?,
        None => file.witness()?.ok_or_else(|| Failure::invalid("no point: pass --point or add `witness` to the file"))?,
    };
    match &inst {
        InstanceFile::Tropical(f) => {
            let r = eval_tropical(&f.tropical()?, &x).map_err(|e| Failure::invalid(e.to_string()))?;
            Ok(json!({"point": qs(&x), "values": qs(&r), "solves": r.iter().all(num_traits::Zero::is_zero)}))
        }
        InstanceFile::Classical(f) => {
            let sys = f.classical()?;
            let exact = crate::system::eval_classical_exact(&sys, &x).map_err(|e| Failure::invalid(e.to_string()))?;
            let floats = eval_classical(&sys, &crate::rational::to_f64_vec(&x)).map_err(|e| Failure::invalid(e.to_string()))?;
            Ok(json!({
                "point": qs(&x),
                "values": floats,
                "exact_values": exact.as_ref().map(|v| qs(v)).unwrap_or(Value::Null),
                "solves": exact.map(|v| v.iter().all(num_traits::One::is_one)),
            }))
        }
        _ => unreachable!("support_of accepted the kind"),
    }
}

fn cmd_generate(kind: GenKind, seed: u64, dim: usize) -> Result<InstanceFile, Failure> {
    if dim == 0 {
        return Err(Failure::invalid("--dim must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inst = match kind {
        GenKind::Tropical => {
            let (sys, y) = gen::random_tropical(&mut rng, dim, 3);
            InstanceFile::Tropical(SystemFile::from_tropical(&sys, Some(&y), None))
        }
        GenKind::Classical => {
            let g = gen::planted_classical(&mut rng, dim, 3, seed as usize);
            InstanceFile::Classical(SystemFile::from_classical(&g.system, Some(&g.y), None))
        }
        GenKind::Mdp => InstanceFile::Mdp(MdpFile::from_model(&random_mdp(&mut rng, dim, 3))),
        GenKind::Pointset => InstanceFile::Pointset(PointsetFile::from_polygons(&gen::random_polygons(&mut rng))),
    };
    Ok(inst)
}

