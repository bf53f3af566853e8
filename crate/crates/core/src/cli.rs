//! Command-line surface: verification suites and computations, each printing
//! one JSON report. Exit status is 0 when every check passes, 1 when one
//! fails and 2 on usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::induced::Model;
use crate::moment::{self, Decimal, LevelData, Side};
use crate::numerics::{
    decimal_string, root_from_lambda, unit_from_angle, ApproxCtx, Ctx, ExactCtx, ExactScalar,
    Number, DEFAULT_PRECISION,
};
use crate::periods::{
    self, kappa_pi_in, local_ell_v, normalized_iv, steinberg_constant, IdentityReport,
    LocalCase, PeriodValue, TailMode, TruncationPlan, VectorChoice,
};
use crate::repn::{Backend, ReprDescriptor};

const DIGITS: usize = 24;

#[derive(Parser, Debug)]
#[command(name = "locperiod", version, about = "Local periods of GL(2) over Q_p")]
pub struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Working precision in bits of the approximate backend.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
    /// Truncation radius: shells up to this one are summed over K x K.
    #[arg(long, global = true, default_value_t = 60)]
    radius: u32,
    /// Absolute tolerance of identity checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Realize exact parameters approximately when set to `approx`.
    #[arg(long, global = true, value_enum, default_value_t = BackendArg::Exact)]
    backend: BackendArg,
    /// Past the radius: sum the cells in closed form, or drop them and bound them.
    #[arg(long, global = true, value_enum, default_value_t = TailArg::Closed)]
    tail: TailArg,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum BackendArg {
    Exact,
    Approx,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TailArg {
    Closed,
    Bound,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Identity checks.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Values without a pass criterion of their own.
    #[command(subcommand)]
    Compute(ComputeCmd),
    /// Moment assembly from spectral data files.
    #[command(subcommand)]
    Moment(MomentCmd),
}

/// Unramified parameters by slot: `pi` and `pi1`, `pi2`, `pi3`. Each slot
/// takes one of a Satake parameter, a Hecke eigenvalue, or an angle `theta`
/// with `alpha = exp(i theta)`; an empty slot means `lambda = 0`.
#[derive(Args, Debug, Clone)]
#[command(next_help_heading = "Representations")]
struct Params {
    /// Residue field size of the local field (a prime).
    #[arg(long)]
    q: u64,
    /// Satake parameter of pi, a rational.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Hecke eigenvalue of pi, a rational.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Angle of the Satake parameter of pi, a rational or decimal.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    /// Satake parameter of pi1, a rational.
    #[arg(long, allow_hyphen_values = true)]
    alpha1: Option<String>,
    /// Hecke eigenvalue of pi1, a rational.
    #[arg(long, allow_hyphen_values = true)]
    lambda1: Option<String>,
    /// Angle of the Satake parameter of pi1, a rational or decimal.
    #[arg(long, allow_hyphen_values = true)]
    theta1: Option<String>,
    /// Satake parameter of pi2, a rational.
    #[arg(long, allow_hyphen_values = true)]
    alpha2: Option<String>,
    /// Hecke eigenvalue of pi2, a rational.
    #[arg(long, allow_hyphen_values = true)]
    lambda2: Option<String>,
    /// Angle of the Satake parameter of pi2, a rational or decimal.
    #[arg(long, allow_hyphen_values = true)]
    theta2: Option<String>,
    /// Satake parameter of pi3, a rational.
    #[arg(long, allow_hyphen_values = true)]
    alpha3: Option<String>,
    /// Hecke eigenvalue of pi3, a rational.
    #[arg(long, allow_hyphen_values = true)]
    lambda3: Option<String>,
    /// Angle of the Satake parameter of pi3, a rational or decimal.
    #[arg(long, allow_hyphen_values = true)]
    theta3: Option<String>,
    /// Accept parameters outside the unitary range.
    #[arg(long = "override")]
    allow_non_unitary: bool,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// I(new vectors) = 1 for three unramified representations.
    Fact(Params),
    /// I(phi1^m, phi2, Steinberg new vector) = zeta(1)/zeta(2) q/(q+1)^2.
    Steinberg {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        twist: i64,
    },
    /// <phi, phi^m> = sqrt(q) lambda / (q + 1) through the Whittaker model.
    Kappa(Params),
    /// The basis-sum identity with the constant kappa.
    True(Params),
    /// The Hecke relation at one place.
    Hecke(Params),
    /// The Atkin-Lehner relation for Steinberg pi, or with `--eta` for unramified pi.
    Atkin {
        #[command(flatten)]
        params: Params,
        /// Twist of a Steinberg pi; omit to use the unramified slot `pi`.
        #[arg(long, allow_hyphen_values = true)]
        twist: Option<i64>,
        /// Atkin-Lehner sign to test against; required for unramified pi.
        #[arg(long, allow_hyphen_values = true)]
        eta: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum ComputeCmd {
    /// Normalized triple coefficient for slots pi1, pi2, pi3.
    Iv {
        #[command(flatten)]
        params: Params,
        /// Put a Steinberg representation in this slot (1, 2 or 3).
        #[arg(long)]
        steinberg_slot: Option<usize>,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        twist: i64,
        /// Vector per slot, e.g. `raised,new,new`.
        #[arg(long, value_delimiter = ',', default_value = "new,new,new")]
        vectors: Vec<VectorArg>,
    },
    /// The local factor at a place.
    Ellv {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        twist: i64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VectorArg {
    New,
    Raised,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CaseArg {
    Away,
    Unramified,
    Steinberg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SideArg {
    LevelQ,
    LevelP,
}

#[derive(Args, Debug, Clone)]
struct MomentArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    q: u64,
    /// The case constant C, a decimal or a fraction.
    #[arg(long, default_value = "1")]
    case_constant: String,
}

#[derive(Subcommand, Debug)]
enum MomentCmd {
    /// Assemble one side of the moment.
    Assemble {
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        args: MomentArgs,
        #[arg(long, value_enum, default_value_t = SideArg::LevelQ)]
        side: SideArg,
        /// Hecke eigenvalues of pi1, pi2 at the level prime, `l1,l2`.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        level_lambdas: String,
    },
    /// Assemble both sides and report their difference.
    Compare {
        /// Dataset with level q.
        #[arg(long)]
        data_q: PathBuf,
        /// Dataset with level p.
        #[arg(long)]
        data_p: PathBuf,
        #[command(flatten)]
        args: MomentArgs,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        lambdas_at_q: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        lambdas_at_p: String,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Period(#[from] periods::PeriodError),
    #[error(transparent)]
    Repr(#[from] crate::repn::ReprError),
    #[error(transparent)]
    Induced(#[from] crate::induced::InducedError),
    #[error(transparent)]
    Moment(#[from] moment::MomentError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A command's outcome: the report and whether its checks passed.
struct Outcome {
    report: Value,
    pass: bool,
}

fn parse_rational(s: &str) -> Result<BigRational, CliError> {
    if s.contains('/') {
        let r = BigRational::from_str(s).map_err(|_| CliError::Usage(format!("bad fraction {s:?}")))?;
        Ok(r)
    } else {
        Decimal::from_str(s).map(|d| d.0).map_err(CliError::Usage)
    }
}

fn parse_pair(s: &str) -> Result<LevelData, CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(CliError::Usage(format!("expected two values `l1,l2`, got {s:?}")));
    }
    Ok(LevelData {
        lambda1: parse_rational(parts[0].trim())?,
        lambda2: parse_rational(parts[1].trim())?,
    })
}

impl Params {
    fn slot(&self, i: usize) -> (&Option<String>, &Option<String>, &Option<String>) {
        match i {
            0 => (&self.alpha, &self.lambda, &self.theta),
            1 => (&self.alpha1, &self.lambda1, &self.theta1),
            2 => (&self.alpha2, &self.lambda2, &self.theta2),
            _ => (&self.alpha3, &self.lambda3, &self.theta3),
        }
    }

    fn rep(&self, i: usize, cfg: &RunConfig) -> Result<ReprDescriptor, CliError> {
        let q = self.q;
        let (alpha, lambda, theta) = self.slot(i);
        let given = [alpha, lambda, theta].iter().filter(|x| x.is_some()).count();
        if given > 1 {
            return Err(CliError::Usage(format!("slot {i}: give one of alpha, lambda, theta")));
        }
        if let Some(t) = theta {
            let t = parse_rational(t)?;
            return Ok(ReprDescriptor::unramified_approx(q, unit_from_angle(&t, cfg.precision))?);
        }
        let exact = match (alpha, lambda) {
            (Some(a), _) => {
                let a = parse_rational(a)?;
                if a.is_zero() {
                    return Err(CliError::Usage("alpha must be nonzero".into()));
                }
                if self.allow_non_unitary {
                    ReprDescriptor::unramified_override(q, a)?
                } else {
                    ReprDescriptor::unramified(q, a)?
                }
            }
            (None, l) => {
                let l = match l {
                    Some(l) => parse_rational(l)?,
                    None => BigRational::zero(),
                };
                let l = ExactScalar::from_rational(l, q);
                if self.allow_non_unitary {
                    ReprDescriptor::unramified_lambda_override(q, l)?
                } else {
                    ReprDescriptor::unramified_lambda(q, l)?
                }
            }
        };
        if cfg.backend == BackendArg::Approx {
            let l = exact.lambda_in(&ExactCtx::new(q))?;
            let a = root_from_lambda(l.rational_part(), cfg.precision);
            return Ok(if self.allow_non_unitary {
                ReprDescriptor::unramified_approx_override(q, a)?
            } else {
                ReprDescriptor::unramified_approx(q, a)?
            });
        }
        Ok(exact)
    }

    fn inputs(&self, slots: &[usize]) -> Value {
        let mut m = serde_json::Map::new();
        m.insert("q".into(), json!(self.q));
        let names = ["pi", "pi1", "pi2", "pi3"];
        for &i in slots {
            let (a, l, t) = self.slot(i);
            let v = match (a, l, t) {
                (Some(a), _, _) => json!({ "alpha": a }),
                (_, _, Some(t)) => json!({ "theta": t }),
                (_, Some(l), _) => json!({ "lambda": l }),
                _ => json!({ "lambda": "0" }),
            };
            m.insert(names[i].into(), v);
        }
        m.insert("override".into(), json!(self.allow_non_unitary));
        Value::Object(m)
    }
}

fn number_json(n: &Number) -> Value {
    let a = n.to_approx(DEFAULT_PRECISION);
    let mut m = serde_json::Map::new();
    if let Some(x) = n.as_exact() {
        m.insert("exact".into(), json!(x.to_string()));
    }
    m.insert("re".into(), json!(decimal_string(a.re(), DIGITS)));
    if !a.im().is_zero() {
        m.insert("im".into(), json!(decimal_string(a.im(), DIGITS)));
    }
    m.insert("err".into(), json!(format!("{:.3e}", n.err())));
    Value::Object(m)
}

fn period_number(v: &PeriodValue) -> Number {
    match &v.exact {
        Some(x) => Number::Exact(x.clone()),
        None => Number::Approx(v.value.clone()),
    }
}

fn period_json(v: &PeriodValue) -> Value {
    json!({
        "value": number_json(&period_number(v)),
        "tail_bound": format!("{:.3e}", v.tail_bound),
        "a_priori_bound": format!("{:.3e}", v.a_priori_bound),
        "radius": v.radius,
    })
}

fn identity_json(r: &IdentityReport) -> Value {
    json!({
        "instance": r.instance,
        "lhs": number_json(&r.lhs),
        "rhs": number_json(&r.rhs),
        "residual": format!("{:.3e}", r.residual),
        "tail_bound": format!("{:.3e}", r.tail_bound),
        "radius": r.radius,
    })
}

fn compare(value: &Number, expected: &Number, tol: f64) -> (f64, bool) {
    if let (Some(a), Some(b)) = (value.as_exact(), expected.as_exact()) {
        if a == b {
            return (0.0, true);
        }
    }
    let d = value
        .to_approx(DEFAULT_PRECISION)
        .sub(&expected.to_approx(DEFAULT_PRECISION));
    let residual = d.re_f64().hypot(d.im_f64());
    (residual, residual <= tol + value.err() + expected.err())
}

impl RunConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.tol.is_nan() || self.tol <= 0.0 || !self.tol.is_finite() {
            return Err(CliError::Usage("tolerance must be positive".into()));
        }
        if self.precision < 53 {
            return Err(CliError::Usage("precision must be at least 53 bits".into()));
        }
        Ok(())
    }

    fn plan(&self) -> TruncationPlan {
        let tail = match self.tail {
            TailArg::Closed => TailMode::ClosedForm,
            TailArg::Bound => TailMode::Bound,
        };
        TruncationPlan::new(self.radius, tail).with_precision(self.precision)
    }

    fn json(&self) -> Value {
        json!({
            "precision": self.precision,
            "radius": self.radius,
            "tol": self.tol,
            "backend": format!("{:?}", self.backend).to_lowercase(),
            "tail": format!("{:?}", self.tail).to_lowercase(),
            "output": self.output.as_ref().map(|p| p.display().to_string()),
        })
    }
}

fn check_value(
    command: &str,
    cfg: &RunConfig,
    inputs: Value,
    value: &PeriodValue,
    expected: Number,
) -> Outcome {
    let got = period_number(value);
    let (residual, pass) = compare(&got, &expected, cfg.tol);
    Outcome {
        report: json!({
            "command": command,
            "inputs": inputs,
            "values": period_json(value),
            "error_bound": format!("{:.3e}", got.err()),
            "expected": number_json(&expected),
            "residual": format!("{:.3e}", residual),
            "pass": pass,
        }),
        pass,
    }
}

fn identity_outcome(command: &str, inputs: Value, r: IdentityReport) -> Outcome {
    Outcome {
        report: json!({
            "command": command,
            "inputs": inputs,
            "values": identity_json(&r),
            "error_bound": format!("{:.3e}", r.err),
            "expected": "lhs = rhs",
            "pass": r.pass,
        }),
        pass: r.pass,
    }
}

fn kappa_outcome(params: &Params, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = params.rep(0, cfg)?;
    fn run<C: Ctx>(r: &ReprDescriptor, ctx: C) -> Result<(Number, Number), CliError> {
        let m = Model::new(r, ctx)?;
        let phi = m.new_vector()?;
        let phim = m.level_raise(&phi);
        let got = m.theta_inner(&phi, &phim)?;
        let want = kappa_pi_in(m.ctx(), &r.lambda_in(m.ctx())?);
        Ok((m.ctx().number(&got), m.ctx().number(&want)))
    }
    let (got, want) = match r.backend() {
        Backend::Exact => run(&r, ExactCtx::new(r.q()))?,
        Backend::Approx => run(&r, ApproxCtx::new(r.q(), cfg.precision))?,
    };
    let (residual, pass) = compare(&got, &want, cfg.tol);
    let exact_pass = got.as_exact().is_some();
    Ok(Outcome {
        report: json!({
            "command": "verify kappa",
            "inputs": params.inputs(&[0]),
            "values": { "inner_product": number_json(&got) },
            "error_bound": format!("{:.3e}", got.err()),
            "expected": number_json(&want),
            "residual": format!("{:.3e}", residual),
            "exact": exact_pass,
            "pass": pass,
        }),
        pass,
    })
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = &cli.config;
    cfg.validate()?;
    let plan = cfg.plan();
    match &cli.command {
        Command::Verify(v) => match v {
            VerifyCmd::Fact(p) => {
                let reps = [p.rep(1, cfg)?, p.rep(2, cfg)?, p.rep(3, cfg)?];
                let v = normalized_iv([&reps[0], &reps[1], &reps[2]], [VectorChoice::New; 3], &plan)?;
                Ok(check_value("verify fact", cfg, p.inputs(&[1, 2, 3]), &v, Number::Exact(ExactScalar::one(p.q))))
            }
            VerifyCmd::Steinberg { params: p, twist } => {
                let st = ReprDescriptor::steinberg(p.q, *twist)?;
                let (a, b) = (p.rep(1, cfg)?, p.rep(2, cfg)?);
                let v = normalized_iv(
                    [&a, &b, &st],
                    [VectorChoice::Raised, VectorChoice::New, VectorChoice::New],
                    &plan,
                )?;
                let mut inputs = p.inputs(&[1, 2]);
                inputs["twist"] = json!(twist);
                Ok(check_value("verify steinberg", cfg, inputs, &v, Number::Exact(steinberg_constant(p.q))))
            }
            VerifyCmd::Kappa(p) => kappa_outcome(p, cfg),
            VerifyCmd::True(p) => {
                let r = periods::verify_true_identity(&p.rep(0, cfg)?, &p.rep(1, cfg)?, &p.rep(2, cfg)?, &plan, cfg.tol)?;
                Ok(identity_outcome("verify true", p.inputs(&[0, 1, 2]), r))
            }
            VerifyCmd::Hecke(p) => {
                let r = periods::verify_prop_hecke(&p.rep(0, cfg)?, &p.rep(1, cfg)?, &p.rep(2, cfg)?, &plan, cfg.tol)?;
                Ok(identity_outcome("verify hecke", p.inputs(&[0, 1, 2]), r))
            }
            VerifyCmd::Atkin { params: p, twist, eta } => {
                let pi = match twist {
                    Some(t) => ReprDescriptor::steinberg(p.q, *t)?,
                    None => p.rep(0, cfg)?,
                };
                let r = periods::verify_prop_atkin(&pi, &p.rep(1, cfg)?, &p.rep(2, cfg)?, &plan, cfg.tol, *eta)?;
                let mut inputs = p.inputs(if twist.is_some() { &[1, 2] } else { &[0, 1, 2] });
                inputs["twist"] = json!(twist);
                inputs["eta"] = json!(eta);
                Ok(identity_outcome("verify atkin", inputs, r))
            }
        },
        Command::Compute(c) => match c {
            ComputeCmd::Iv { params: p, steinberg_slot, twist, vectors } => {
                if vectors.len() != 3 {
                    return Err(CliError::Usage("give three vectors".into()));
                }
                let mut reps = Vec::with_capacity(3);
                for i in 1..=3 {
                    reps.push(if *steinberg_slot == Some(i) {
                        ReprDescriptor::steinberg(p.q, *twist)?
                    } else {
                        p.rep(i, cfg)?
                    });
                }
                let vecs = [0, 1, 2].map(|i| match vectors[i] {
                    VectorArg::New => VectorChoice::New,
                    VectorArg::Raised => VectorChoice::Raised,
                });
                let v = normalized_iv([&reps[0], &reps[1], &reps[2]], vecs, &plan)?;
                let mut inputs = p.inputs(&[1, 2, 3]);
                inputs["steinberg_slot"] = json!(steinberg_slot);
                inputs["twist"] = json!(twist);
                inputs["vectors"] = json!(vectors.iter().map(|v| format!("{v:?}").to_lowercase()).collect::<Vec<_>>());
                let got = period_number(&v);
                Ok(Outcome {
                    report: json!({
                        "command": "compute iv",
                        "inputs": inputs,
                        "values": period_json(&v),
                        "error_bound": format!("{:.3e}", got.err()),
                        "expected": Value::Null,
                        "pass": true,
                    }),
                    pass: true,
                })
            }
            ComputeCmd::Ellv { case, params: p, twist } => {
                let lc = match case {
                    CaseArg::Away => LocalCase::Away,
                    CaseArg::Unramified => LocalCase::UnramifiedAtQ {
                        pi: p.rep(0, cfg)?,
                        pi1: p.rep(1, cfg)?,
                        pi2: p.rep(2, cfg)?,
                    },
                    CaseArg::Steinberg => LocalCase::SteinbergAtQ {
                        pi: ReprDescriptor::steinberg(p.q, *twist)?,
                        pi1: p.rep(1, cfg)?,
                        pi2: p.rep(2, cfg)?,
                    },
                };
                let r = local_ell_v(&lc, &plan, cfg.tol)?;
                let slots: &[usize] = match case {
                    CaseArg::Away => &[],
                    CaseArg::Unramified => &[0, 1, 2],
                    CaseArg::Steinberg => &[1, 2],
                };
                let mut inputs = p.inputs(slots);
                inputs["case"] = json!(r.case);
                if let CaseArg::Steinberg = case {
                    inputs["twist"] = json!(twist);
                }
                Ok(Outcome {
                    report: json!({
                        "command": "compute ellv",
                        "inputs": inputs,
                        "values": {
                            "value": number_json(&r.value),
                            "basis_ratio": r.basis_ratio.as_ref().map(number_json),
                            "tail_bound": format!("{:.3e}", r.tail_bound),
                        },
                        "error_bound": format!("{:.3e}", r.value.err()),
                        "expected": r.expected.as_ref().map(number_json),
                        "pass": r.pass,
                    }),
                    pass: r.pass,
                })
            }
        },
        Command::Moment(m) => match m {
            MomentCmd::Assemble { data, args, side, level_lambdas } => {
                let ds = moment::load_spectral_data(&std::fs::read_to_string(data)?)?;
                let c = parse_rational(&args.case_constant)?;
                let side = match side {
                    SideArg::LevelQ => Side::LevelQ,
                    SideArg::LevelP => Side::LevelP,
                };
                let level = parse_pair(level_lambdas)?;
                let r = moment::assemble_moment(&ds, args.p, args.q, &c, side, &level, &plan)?;
                Ok(Outcome {
                    report: json!({
                        "command": "moment assemble",
                        "inputs": {
                            "data": data.display().to_string(),
                            "p": args.p,
                            "q": args.q,
                            "case_constant": args.case_constant,
                            "level_lambdas": level_lambdas,
                        },
                        "values": serde_json::to_value(&r).expect("serializable"),
                        "error_bound": "0",
                        "expected": Value::Null,
                        "pass": true,
                    }),
                    pass: true,
                })
            }
            MomentCmd::Compare { data_q, data_p, args, lambdas_at_q, lambdas_at_p } => {
                let dq = moment::load_spectral_data(&std::fs::read_to_string(data_q)?)?;
                let dp = moment::load_spectral_data(&std::fs::read_to_string(data_p)?)?;
                let c = parse_rational(&args.case_constant)?;
                let r = moment::reciprocity_report(
                    &dq,
                    &dp,
                    args.p,
                    args.q,
                    &c,
                    &parse_pair(lambdas_at_q)?,
                    &parse_pair(lambdas_at_p)?,
                    &plan,
                )?;
                Ok(Outcome {
                    report: json!({
                        "command": "moment compare",
                        "inputs": {
                            "data_q": data_q.display().to_string(),
                            "data_p": data_p.display().to_string(),
                            "p": args.p,
                            "q": args.q,
                            "case_constant": args.case_constant,
                            "lambdas_at_q": lambdas_at_q,
                            "lambdas_at_p": lambdas_at_p,
                        },
                        "values": serde_json::to_value(&r).expect("serializable"),
                        "error_bound": "0",
                        "expected": Value::Null,
                        "pass": true,
                    }),
                    pass: true,
                })
            }
        },
    }
}

/// Runs the command line `argv` and returns the exit status.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                2
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match execute(&cli) {
        Ok(o) => {
            let mut report = serde_json::Map::new();
            report.insert("schema".into(), json!("1"));
            report.insert("config".into(), cli.config.json());
            if let Value::Object(m) = o.report {
                report.extend(m);
            }
            let text = serde_json::to_string_pretty(&Value::Object(report)).expect("serializable") + "\n";
            let written = match &cli.config.output {
                Some(path) => std::fs::write(path, &text),
                None => out.write_all(text.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "cannot write report: {e}");
                return 2;
            }
            if o.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let body = json!({ "schema": "1", "error": e.to_string() });
            let _ = writeln!(err, "{}", serde_json::to_string_pretty(&body).expect("serializable"));
            2
        }
    }
}
