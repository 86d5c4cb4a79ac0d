//! Command-line front end. [`run`] is the whole program minus process I/O.

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::local_fields::text::{parse_element, parse_rational, render_element, render_rational};
use crate::local_fields::{invert_one_minus, FieldDescriptor, LaurentNumber, LocalElement, PAdicNumber};
use crate::measure::{
    admissible_ball, ball_relation, digit_set_analysis, haar_union_measure, hausdorff_alpha, image_measure,
    maximal_disjointify, scale_family, BallSpec, DimensionValue, Exponent,
};
use crate::parallel::ExecutionMode;
use crate::rootfind::{enumerate_roots, fixed_point_solve, hensel_solve, strassmann_bound, HenselProblem};
use crate::series::text::{parse_series, render_series};
use crate::series::{ConvergenceThreshold, TruncatedSeries};
use crate::special::{exp_eval, log_solve};
use crate::valuation::{factorial_valuation, require_prime, vp, ExtendedValuation};

#[derive(Parser, Debug)]
#[command(name = "localfield", version, about = "Arithmetic and analysis in Q_p and F_q((T))")]
struct Cli {
    /// Residue characteristic
    #[arg(short = 'p', global = true)]
    prime: Option<u64>,
    /// Work in F_p((T)) instead of Q_p
    #[arg(long, global = true)]
    laurent: bool,
    /// Absolute precision of parsed literals and results
    #[arg(short = 'N', global = true, default_value_t = 16)]
    precision: i64,
    /// Emit JSON instead of text
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Valuation of an element or rational
    Val {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// v_p(j!)
    Factval { j: u64 },
    /// Element arithmetic
    Elem {
        op: ElemOp,
        #[arg(allow_hyphen_values = true)]
        a: String,
        /// Second operand, or the modulus exponent for `reduce`
        #[arg(allow_hyphen_values = true)]
        b: Option<String>,
    },
    /// 1/(1 - x) by the geometric series
    Inv1m {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Solve f(x) = z near x0
    Hensel(HenselArgs),
    /// All roots of f in |x| <= q^-m
    Roots {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        m: Option<i64>,
        /// Extra digits to refine a class before giving up
        #[arg(long, default_value_t = 8)]
        depth: u32,
        /// Precision of the coefficients (default 2N + 8)
        #[arg(long)]
        work: Option<i64>,
        #[arg(long)]
        sequential: bool,
    },
    /// Zero count bound on |x| <= q^-m
    Strassmann {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        m: i64,
    },
    /// p-adic exponential
    Exp {
        #[arg(allow_hyphen_values = true)]
        x: String,
    },
    /// Inverse of the exponential
    Log {
        #[arg(allow_hyphen_values = true)]
        z: String,
    },
    /// Coefficients of f(X + x0)
    Recenter(CenterArgs),
    /// g with f(x) - f(x0) = (x - x0) g(x)
    Deflate(CenterArgs),
    /// Haar measure of ball families
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Hausdorff dimensions
    #[command(subcommand)]
    Dim(DimCmd),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ElemOp {
    Add,
    Sub,
    Mul,
    Div,
    Show,
    Residue,
    Reduce,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Method {
    Newton,
    Fixed,
}

#[derive(Args, Debug)]
struct HenselArgs {
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    z: String,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    #[arg(long, value_enum, default_value_t = Method::Newton)]
    method: Method,
    /// Precision of the inputs (default 2N + 8)
    #[arg(long)]
    work: Option<i64>,
}

#[derive(Args, Debug)]
struct CenterArgs {
    #[arg(long, allow_hyphen_values = true)]
    f: String,
    #[arg(long, allow_hyphen_values = true)]
    x0: String,
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
}

#[derive(Subcommand, Debug)]
enum MeasureCmd {
    /// Haar measure of a union of balls `center@j`
    Union {
        balls: Vec<String>,
    },
    /// Maximal balls of a family
    Disjoint {
        balls: Vec<String>,
    },
    /// Relation between two balls
    Relation {
        #[arg(allow_hyphen_values = true)]
        first: String,
        #[arg(allow_hyphen_values = true)]
        second: String,
    },
    /// Image of a family under x -> c x
    Scale {
        #[arg(long, allow_hyphen_values = true)]
        c: String,
        balls: Vec<String>,
    },
    /// Measure of f(E) for sub-balls E of an admissible ball
    Image {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        ball: String,
        balls: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum DimCmd {
    /// Cover of the set of p-adic integers with digits in S
    Digits {
        #[arg(long, value_delimiter = ',')]
        digits: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Rational exponent, or `log:a/b` for log(a)/log(b); defaults to the dimension
        #[arg(long)]
        beta: Option<String>,
    },
    /// Hausdorff dimension of the field with |.|^a
    Alpha {
        #[arg(long, default_value = "1")]
        a: String,
        #[arg(long, default_value_t = 1)]
        rho1: u32,
    },
}

struct Output {
    text: String,
    json: Value,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json }
    }
}

fn big_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn rat_json(r: &BigRational) -> Value {
    json!({ "num": big_json(r.numer()), "den": big_json(r.denom()), "text": render_rational(r) })
}

fn val_json(v: ExtendedValuation) -> Value {
    match v {
        ExtendedValuation::Finite(v) => json!(v),
        ExtendedValuation::Infinity => json!("inf"),
    }
}

fn elem_json<F: LocalElement>(x: &F) -> Value {
    json!({
        "valuation": val_json(x.valuation()),
        "digits": x.unit_digits(),
        "precision": x.abs_precision(),
        "text": render_element(x),
    })
}

fn ball_text<F: LocalElement>(b: &BallSpec<F>) -> String {
    format!("{}@{}", render_element(b.center()), b.radius_exponent())
}

fn ball_json<F: LocalElement>(b: &BallSpec<F>) -> Value {
    json!({ "center": elem_json(b.center()), "radius_exponent": b.radius_exponent(), "text": ball_text(b) })
}

fn dim_json(d: &DimensionValue) -> Value {
    json!({
        "count": d.count.to_string(),
        "scale": d.scale.to_string(),
        "exact": d.as_rational().map(|r| rat_json(&r)),
        "approx": d.approx(),
        "text": d.to_string(),
    })
}

fn dim_text(d: &DimensionValue) -> String {
    match d.as_rational() {
        Some(r) => render_rational(&r),
        None => format!("{d} ~ {:.12}", d.approx()),
    }
}

/// Parses `<element>@<j>`.
fn parse_ball<F: LocalElement>(s: &str, field: FieldDescriptor, prec: i64) -> Result<BallSpec<F>> {
    let at = s.rfind('@').ok_or(Error::Parse { position: s.len(), message: "expected @<radius exponent>".into() })?;
    let j: i64 = s[at + 1..]
        .trim()
        .parse()
        .map_err(|_| Error::Parse { position: at + 1, message: "expected an integer radius exponent".into() })?;
    let center: F = parse_element(&s[..at], field, prec.max(j))?;
    BallSpec::closed(&center, j)
}

fn parse_balls<F: LocalElement>(items: &[String], field: FieldDescriptor, prec: i64) -> Result<Vec<BallSpec<F>>> {
    items.iter().map(|s| parse_ball(s, field, prec)).collect()
}

fn default_radius<F: LocalElement>(f: &TruncatedSeries<F>, x0: Option<&F>) -> i64 {
    match f.convergence_threshold() {
        ConvergenceThreshold::AtLeast(e) => e,
        ConvergenceThreshold::Everywhere => x0.map_or(0, |x| x.valuation_bound().min(0)),
    }
}

fn lines(items: impl IntoIterator<Item = String>) -> String {
    items.into_iter().collect::<Vec<_>>().join("\n")
}

struct Ctx {
    field: FieldDescriptor,
    prec: i64,
}

impl Ctx {
    fn work(&self, explicit: Option<i64>) -> i64 {
        explicit.unwrap_or(2 * self.prec + 8)
    }
}

fn dispatch<F: LocalElement>(ctx: &Ctx, cmd: &Command) -> Result<Output> {
    let field = ctx.field;
    let n = ctx.prec;
    let elem = |s: &str, prec: i64| parse_element::<F>(s, field, prec);
    match cmd {
        Command::Val { x } => {
            let v = match (field.kind, parse_rational(x)) {
                (crate::local_fields::FieldKind::PAdic, Ok(r)) => vp(field.q, &r)?,
                _ => elem(x, n)?.valuation(),
            };
            Ok(Output::new(v.to_string(), val_json(v)))
        }
        Command::Factval { j } => {
            let v = factorial_valuation(field.q, *j);
            Ok(Output::new(v.to_string(), json!(v)))
        }
        Command::Elem { op, a, b } => {
            let x = elem(a, n)?;
            let second = || {
                b.as_deref().ok_or(Error::InvalidArgument("this operation needs a second operand".into()))
            };
            let r = match op {
                ElemOp::Add => x.add(&elem(second()?, n)?),
                ElemOp::Sub => x.sub(&elem(second()?, n)?),
                ElemOp::Mul => x.mul(&elem(second()?, n)?),
                ElemOp::Div => x.div(&elem(second()?, n)?)?,
                ElemOp::Show => x,
                ElemOp::Residue => {
                    let d = x.residue()?.value;
                    return Ok(Output::new(d.to_string(), json!(d)));
                }
                ElemOp::Reduce => {
                    let j: u32 = second()?
                        .parse()
                        .map_err(|_| Error::InvalidArgument("reduce needs a nonnegative exponent".into()))?;
                    let r = x.reduce_mod(j)?;
                    return Ok(Output::new(r.to_string(), json!(r.to_string())));
                }
            };
            Ok(Output::new(render_element(&r), elem_json(&r)))
        }
        Command::Inv1m { x } => {
            let r = invert_one_minus(&elem(x, n)?, n)?;
            Ok(Output::new(render_element(&r), elem_json(&r)))
        }
        Command::Hensel(h) => {
            let w = ctx.work(h.work);
            let f = parse_series::<F>(&h.f, field, w)?;
            let x0 = elem(&h.x0, w)?;
            let z = elem(&h.z, w)?;
            let m = h.m.unwrap_or_else(|| default_radius(&f, Some(&x0)));
            let problem = HenselProblem { f, x0, z, m, target_prec: n };
            let cert = match h.method {
                Method::Newton => hensel_solve(&problem)?,
                Method::Fixed => fixed_point_solve(&problem)?,
            };
            let trace: Vec<Value> = cert.b_trace.iter().map(|b| val_json(b.exponent)).collect();
            Ok(Output::new(
                render_element(&cert.root),
                json!({
                    "root": elem_json(&cert.root),
                    "residual_prec": cert.residual_prec,
                    "uniqueness_exponent": cert.uniqueness_exponent,
                    "b_trace_exponents": trace,
                }),
            ))
        }
        Command::Roots { f, m, depth, work, sequential } => {
            let f = parse_series::<F>(f, field, ctx.work(*work))?;
            let m = m.unwrap_or_else(|| default_radius(&f, None));
            let mode = if *sequential { ExecutionMode::Sequential } else { ExecutionMode::Parallel };
            let roots = enumerate_roots(&f, m, *depth, n, mode)?;
            Ok(Output::new(
                lines(roots.iter().map(|c| render_element(&c.root))),
                json!({ "count": roots.len(), "roots": roots.iter().map(|c| elem_json(&c.root)).collect::<Vec<_>>() }),
            ))
        }
        Command::Strassmann { f, m } => {
            let f = parse_series::<F>(f, field, n)?;
            let r = strassmann_bound(&f, *m)?;
            Ok(Output::new(
                r.bound_n.to_string(),
                json!({
                    "bound_n": r.bound_n,
                    "attaining_index": r.attaining_index,
                    "max_term_exponent": r.max_term,
                    "level_bound": r.level_bound,
                }),
            ))
        }
        Command::Recenter(a) | Command::Deflate(a) => {
            let f = parse_series::<F>(&a.f, field, n)?;
            let x0 = elem(&a.x0, n)?;
            let m = a.m.unwrap_or_else(|| default_radius(&f, Some(&x0)));
            let g = if matches!(cmd, Command::Recenter(_)) { f.recenter(&x0, m)? } else { f.deflate(&x0, m)? };
            Ok(Output::new(
                render_series(&g),
                json!({
                    "coefficients": g.coeffs().iter().map(elem_json).collect::<Vec<_>>(),
                    "tail": g.tail().map(|t| t.to_string()),
                    "text": render_series(&g),
                }),
            ))
        }
        Command::Measure(mc) => measure::<F>(ctx, mc),
        Command::Dim(dc) => dim(ctx, dc),
        Command::Exp { .. } | Command::Log { .. } => {
            Err(Error::DomainError("the exponential is defined over Q_p only".into()))
        }
    }
}

fn measure<F: LocalElement>(ctx: &Ctx, cmd: &MeasureCmd) -> Result<Output> {
    let (field, n) = (ctx.field, ctx.prec);
    match cmd {
        MeasureCmd::Union { balls } => {
            let h = haar_union_measure(&parse_balls::<F>(balls, field, n)?);
            Ok(Output::new(render_rational(&h), rat_json(&h)))
        }
        MeasureCmd::Disjoint { balls } => {
            let out = maximal_disjointify(&parse_balls::<F>(balls, field, n)?);
            Ok(Output::new(lines(out.iter().map(ball_text)), json!(out.iter().map(ball_json).collect::<Vec<_>>())))
        }
        MeasureCmd::Relation { first, second } => {
            let r = ball_relation(&parse_ball::<F>(first, field, n)?, &parse_ball::<F>(second, field, n)?)?;
            Ok(Output::new(r.to_string(), json!(r)))
        }
        MeasureCmd::Scale { c, balls } => {
            let c: F = parse_element(c, field, n)?;
            let (scaled, ratio) = scale_family(&c, &parse_balls::<F>(balls, field, n)?)?;
            let text = std::iter::once(format!("ratio {}", render_rational(&ratio))).chain(scaled.iter().map(ball_text));
            Ok(Output::new(
                lines(text),
                json!({ "ratio": rat_json(&ratio), "balls": scaled.iter().map(ball_json).collect::<Vec<_>>() }),
            ))
        }
        MeasureCmd::Image { f, ball, balls } => {
            let f = parse_series::<F>(f, field, n)?;
            let b = parse_ball::<F>(ball, field, n)?;
            let family = parse_balls::<F>(balls, field, n)?;
            let h = image_measure(&f, &b, &family)?;
            let adm = admissible_ball(&f, &b)?;
            Ok(Output::new(
                render_rational(&h),
                json!({ "measure": rat_json(&h), "image": ball_json(&adm.image), "scale_exponent": adm.scale_exponent }),
            ))
        }
    }
}

fn parse_exponent(s: &str) -> Result<Exponent> {
    match s.strip_prefix("log:") {
        Some(rest) => {
            let (a, b) = rest.split_once('/').ok_or(Error::Parse { position: 4, message: "expected log:a/b".into() })?;
            let num = |t: &str, pos: usize| {
                t.parse::<u64>().map_err(|_| Error::Parse { position: pos, message: "expected a positive integer".into() })
            };
            Ok(Exponent::LogRatio(DimensionValue::from_u64(num(a, 4)?, num(b, 5 + a.len())?)?))
        }
        None => Ok(Exponent::Rational(parse_rational(s)?)),
    }
}

fn dim(ctx: &Ctx, cmd: &DimCmd) -> Result<Output> {
    match cmd {
        DimCmd::Digits { digits, n, beta } => {
            let p = ctx.field.q;
            let beta = match beta {
                Some(s) => parse_exponent(s)?,
                None => {
                    let mut s = digits.clone();
                    s.sort_unstable();
                    s.dedup();
                    Exponent::LogRatio(DimensionValue::from_u64(s.len().max(1) as u64, p)?)
                }
            };
            let r = digit_set_analysis(p, digits, *n, &beta)?;
            Ok(Output::new(
                format!(
                    "ball_count {}\ncontent {}\ndimension {}",
                    r.ball_count,
                    r.content_estimate,
                    dim_text(&r.dimension)
                ),
                json!({
                    "ball_count": r.ball_count.to_string(),
                    "content_estimate": {
                        "radicand": rat_json(&r.content_estimate.radicand),
                        "root_index": r.content_estimate.root_index,
                        "approx": r.content_estimate.approx(),
                    },
                    "dimension": dim_json(&r.dimension),
                }),
            ))
        }
        DimCmd::Alpha { a, rho1 } => {
            let a = parse_rational(a)?;
            let d = hausdorff_alpha(ctx.field.with_rho1_exponent(*rho1)?, &a)?;
            Ok(Output::new(dim_text(&d), dim_json(&d)))
        }
    }
}

fn execute(cli: &Cli) -> Result<Output> {
    let p = cli.prime.ok_or(Error::InvalidArgument("missing -p <prime>".into()))?;
    require_prime(p)?;
    if cli.precision < 1 {
        return Err(Error::InvalidArgument("precision must be at least 1".into()));
    }
    let field = if cli.laurent { FieldDescriptor::laurent(p)? } else { FieldDescriptor::padic(p)? };
    let ctx = Ctx { field, prec: cli.precision };
    if cli.laurent {
        return dispatch::<LaurentNumber>(&ctx, &cli.command);
    }
    match &cli.command {
        Command::Exp { x } => {
            let r = exp_eval(&parse_element::<PAdicNumber>(x, field, ctx.prec)?, ctx.prec)?;
            Ok(Output::new(render_element(&r), elem_json(&r)))
        }
        Command::Log { z } => {
            let r = log_solve(&parse_element::<PAdicNumber>(z, field, ctx.prec)?, ctx.prec)?;
            Ok(Output::new(render_element(&r), elem_json(&r)))
        }
        cmd => dispatch::<PAdicNumber>(&ctx, cmd),
    }
}

/// Exit code for an error: 1 for malformed input, 2 for mathematical failures.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::InvalidArgument(_) => 1,
        _ => 2,
    }
}

/// Runs the program on `argv` (including the program name) and returns the
/// exit code and everything it would print.
pub fn run<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (code, e.to_string().trim_end().to_string());
        }
    };
    match execute(&cli) {
        Ok(out) if cli.json => (0, out.json.to_string()),
        Ok(out) => (0, out.text),
        Err(e) if cli.json => {
            let mut v = json!({ "error": e.name(), "message": e.to_string() });
            if let Error::Parse { position, .. } = &e {
                v["position"] = json!(position);
            }
            (exit_code(&e), v.to_string())
        }
        Err(e) => (exit_code(&e), e.to_string()),
    }
}
