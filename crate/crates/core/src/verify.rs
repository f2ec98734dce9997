//! End-to-end numerical certification of the `r = 163` and `r = 243`
//! series and the closed forms behind them.
//!
//! Each suite returns a [`VerificationReport`]. Equality checks use the
//! context tolerance `10^-(P-20)`; rate checks allow ±0.5 digits per term.
//! Every suite also has an injected-fault variant (see [`Fault`]) that must
//! fail, which the tests use to show the checks have teeth.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::algebra::{
    branch_search, parse_named, parse_polynomials, radical_eval, recognize_min_poly, root_by_spec,
    BranchAssignment, IntPolynomial, RadicalExpr, RootSpec,
};
use crate::elliptic::{lambda_star, pi_reference, LambdaMethod, SingularValueIndex};
use crate::error::{Error, Result};
use crate::params::{
    bg_coefficients, bg_j_t, params_negative, params_positive, singular_data, BgNormalization,
    Family, SeriesParams,
};
use crate::precision::{format_scientific, pow10, relative_difference, PrecReal, PrecisionContext};
use crate::series::{eval_level1_series, realized_digits_per_term};

const CLOSED_FORMS: &str = include_str!("../data/closed_forms.rad");
const R243_POLYS: &str = include_str!("../data/r243.poly");
const MIN_DIGITS: u32 = 40;
const RECOGNITION_MIN_DIGITS: u32 = 200;

/// The shipped closed forms: `J`, `J_grouped`, `T` and `lambda163`.
pub fn closed_forms() -> HashMap<String, RadicalExpr> {
    parse_named(CLOSED_FORMS).expect("shipped closed forms parse")
}

/// The printed `r = 243` polynomials for `z`, `a` and `b`, in that order.
pub fn r243_polynomials() -> [IntPolynomial; 3] {
    let mut v = parse_polynomials(R243_POLYS).expect("shipped polynomials parse");
    assert_eq!(v.len(), 3);
    let b = v.pop().expect("three");
    let a = v.pop().expect("three");
    let z = v.pop().expect("three");
    [z, a, b]
}

/// One named comparison.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub residual: PrecReal,
    pub tolerance: PrecReal,
    pub pass: bool,
    pub precision_used: u32,
}

impl CheckResult {
    fn new(name: &str, residual: Float, tolerance: Float, ctx: &PrecisionContext) -> Self {
        let pass = residual < tolerance;
        Self {
            name: name.to_string(),
            residual: PrecReal::from_float(residual, ctx),
            tolerance: PrecReal::from_float(tolerance, ctx),
            pass,
            precision_used: ctx.digits(),
        }
    }

    fn equality(name: &str, residual: Float, ctx: &PrecisionContext) -> Self {
        Self::new(name, residual, ctx.tolerance(), ctx)
    }
}

/// Checks plus informational notes. Timings are kept for display but are
/// not part of either serialized form, so reports are reproducible.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub precision: u32,
    pub checks: Vec<CheckResult>,
    pub overall: bool,
    pub notes: BTreeMap<String, String>,
    pub timings: Vec<(String, Duration)>,
}

#[derive(Serialize, Deserialize)]
struct CheckRecord {
    name: String,
    residual: String,
    tolerance: String,
    pass: bool,
    precision: u32,
}

#[derive(Serialize, Deserialize)]
struct ReportRecord {
    suite: String,
    precision: u32,
    overall: bool,
    checks: Vec<CheckRecord>,
    notes: BTreeMap<String, String>,
}

fn decimal(r: &PrecReal) -> String {
    format_scientific(r.value(), 6)
}

impl VerificationReport {
    fn new(suite: &str, ctx: &PrecisionContext) -> Self {
        Self {
            suite: suite.to_string(),
            precision: ctx.digits(),
            checks: Vec::new(),
            overall: true,
            notes: BTreeMap::new(),
            timings: Vec::new(),
        }
    }

    fn finish(mut self) -> Self {
        self.checks.sort_by(|a, b| a.name.cmp(&b.name));
        self.overall = self.checks.iter().all(|c| c.pass);
        self
    }

    fn note(&mut self, key: &str, value: impl Into<String>) {
        self.notes.insert(key.to_string(), value.into());
    }

    fn timed<T>(&mut self, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push((label.to_string(), start.elapsed()));
        out
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn record(&self) -> ReportRecord {
        ReportRecord {
            suite: self.suite.clone(),
            precision: self.precision,
            overall: self.overall,
            checks: self
                .checks
                .iter()
                .map(|c| CheckRecord {
                    name: c.name.clone(),
                    residual: decimal(&c.residual),
                    tolerance: decimal(&c.tolerance),
                    pass: c.pass,
                    precision: c.precision_used,
                })
                .collect(),
            notes: self.notes.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.record()).expect("report serializes")
    }

    /// Key/value text, one blank-line separated record per check.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = |p: bool| if p { "pass" } else { "FAIL" };
        let _ = writeln!(out, "suite: {}", self.suite);
        let _ = writeln!(out, "precision: {}", self.precision);
        let _ = writeln!(out, "overall: {}", verdict(self.overall));
        for (k, v) in &self.notes {
            let _ = writeln!(out, "note.{k}: {v}");
        }
        for c in &self.checks {
            let _ = writeln!(out);
            let _ = writeln!(out, "check: {}", c.name);
            let _ = writeln!(out, "residual: {}", decimal(&c.residual));
            let _ = writeln!(out, "tolerance: {}", decimal(&c.tolerance));
            let _ = writeln!(out, "result: {}", verdict(c.pass));
            let _ = writeln!(out, "precision: {}", c.precision_used);
        }
        out
    }

    fn merge(suite: &str, ctx: &PrecisionContext, parts: Vec<VerificationReport>) -> Self {
        let mut all = Self::new(suite, ctx);
        for p in parts {
            all.checks.extend(p.checks);
            all.notes.extend(p.notes);
            all.timings.extend(p.timings);
        }
        all.finish()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Deliberate perturbations, one per suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fault {
    /// `x · (1 + 10^-40)` in the fixed-point identity.
    TamperX,
    /// The middle term of the `α(163)` closed form with its sign flipped.
    FlipAlphaSign,
    /// `J · (1 + 10^-39)` (a change in the 40th digit) in the series.
    PerturbJ,
    /// Root index 2 instead of 1 for the `a` polynomial.
    WrongRootIndex,
    /// `x^(-1/20)` in place of `x^(-1/24)`.
    WrongGExponent,
}

/// The verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Lambda163,
    Alpha163,
    Bg163,
    R243,
    G163,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Lambda163,
        Suite::Alpha163,
        Suite::Bg163,
        Suite::R243,
        Suite::G163,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lambda163 => "lambda163",
            Suite::Alpha163 => "alpha163",
            Suite::Bg163 => "bg163",
            Suite::R243 => "r243",
            Suite::G163 => "g163",
        }
    }

    /// The fault that targets this suite.
    pub fn fault(self) -> Fault {
        match self {
            Suite::Lambda163 => Fault::TamperX,
            Suite::Alpha163 => Fault::FlipAlphaSign,
            Suite::Bg163 => Fault::PerturbJ,
            Suite::R243 => Fault::WrongRootIndex,
            Suite::G163 => Fault::WrongGExponent,
        }
    }

    pub fn run(self, ctx: &PrecisionContext) -> Result<VerificationReport> {
        self.run_with(ctx, None)
    }

    pub fn run_with(
        self,
        ctx: &PrecisionContext,
        fault: Option<Fault>,
    ) -> Result<VerificationReport> {
        if ctx.digits() < MIN_DIGITS {
            return Err(Error::InvalidArgument(format!(
                "verification needs at least {MIN_DIGITS} digits, got {}",
                ctx.digits()
            )));
        }
        match self {
            Suite::Lambda163 => lambda163(ctx, fault),
            Suite::Alpha163 => alpha163(ctx, fault),
            Suite::Bg163 => bg163(ctx, fault),
            Suite::R243 => r243(ctx, fault),
            Suite::G163 => g163(ctx, fault),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

pub fn verify_lambda163(ctx: &PrecisionContext) -> Result<VerificationReport> {
    Suite::Lambda163.run(ctx)
}

pub fn verify_alpha163(ctx: &PrecisionContext) -> Result<VerificationReport> {
    Suite::Alpha163.run(ctx)
}

pub fn verify_bg163(ctx: &PrecisionContext) -> Result<VerificationReport> {
    Suite::Bg163.run(ctx)
}

pub fn verify_r243(ctx: &PrecisionContext) -> Result<VerificationReport> {
    Suite::R243.run(ctx)
}

pub fn verify_g163(ctx: &PrecisionContext) -> Result<VerificationReport> {
    Suite::G163.run(ctx)
}

/// Every suite, run concurrently and merged in check-name order.
pub fn verify_all(ctx: &PrecisionContext) -> Result<VerificationReport> {
    let parts = Suite::ALL
        .par_iter()
        .map(|s| s.run(ctx))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::merge("all", ctx, parts))
}

fn r163() -> SingularValueIndex {
    SingularValueIndex::integer(163)
}

fn rel(a: &Float, b: &Float, ctx: &PrecisionContext) -> Float {
    relative_difference(a, b, ctx.bits())
}

fn lambda163(ctx: &PrecisionContext, fault: Option<Fault>) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("lambda163", ctx);
    let bits = ctx.bits();
    let r = r163();
    let theta = rep.timed("theta", || lambda_star(&r, LambdaMethod::Theta, ctx))?;
    let bisect = rep.timed("bisect", || lambda_star(&r, LambdaMethod::AgmBisect, ctx))?;
    rep.checks.push(CheckResult::equality(
        "lambda163.routes_agree",
        rel(theta.k().value(), bisect.k().value(), ctx),
        ctx,
    ));

    let k2 = Float::with_val(bits, theta.k().value().square_ref());
    let mut x = Float::with_val(bits, 1 - &k2) * k2 * 4u32;
    if fault == Some(Fault::TamperX) {
        x *= Float::with_val(bits, 1) + pow10(-40, bits);
    }
    let one_minus = Float::with_val(bits, 1 - Float::with_val(bits, &x * 4u32));
    let w = -(Float::with_val(bits, &x * 27u32) / one_minus.pow(3u32));
    let target = Float::with_val(bits, 53360u32).pow(3u32).recip();
    let residual = (w + &target).abs() / target;
    rep.checks.push(CheckResult::equality(
        "lambda163.fixed_point",
        residual,
        ctx,
    ));

    let forms = closed_forms();
    let e = &forms["lambda163"];
    let found = rep.timed("radical_search", || branch_search(e, theta.k(), ctx));
    rep.note(
        "lambda163.radical_branch",
        match &found {
            Some(br) => br.to_string(),
            None => "no match".into(),
        },
    );
    rep.note(
        "lambda163.radical_principal",
        if found.as_ref().is_some_and(BranchAssignment::is_default) {
            "match"
        } else {
            "no principal-branch match"
        },
    );
    Ok(rep.finish())
}

/// `13591409 sqrt(1-4x)/(426880 sqrt(10005)) + sqrt(163) sqrt(1-x)/(8x-2) + sqrt(163)/2`.
fn alpha163_closed_form(x: &Float, flip_middle: bool, bits: u32) -> Float {
    let s163 = Float::with_val(bits, 163u32).sqrt();
    let first = Float::with_val(bits, 1 - Float::with_val(bits, x * 4u32)).sqrt() * 13_591_409u32
        / (Float::with_val(bits, 10005u32).sqrt() * 426_880u32);
    let mut middle =
        Float::with_val(bits, 1 - x).sqrt() * &s163 / (Float::with_val(bits, x * 8u32) - 2u32);
    if flip_middle {
        middle = -middle;
    }
    first + middle + s163 / 2u32
}

fn alpha163(ctx: &PrecisionContext, fault: Option<Fault>) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("alpha163", ctx);
    let (_, x, alpha) = rep.timed("singular_data", || singular_data(&r163(), ctx))?;
    let closed = alpha163_closed_form(
        x.value().value(),
        fault == Some(Fault::FlipAlphaSign),
        ctx.bits(),
    );
    rep.checks.push(CheckResult::equality(
        "alpha163.closed_form",
        rel(alpha.value(), &closed, ctx),
        ctx,
    ));
    rep.note("alpha163.value", alpha.to_sci_string(30));
    Ok(rep.finish())
}

/// Evaluates a closed form against `target`, trying the listed variants in
/// order. Returns the variant name, assignment and value of the first match,
/// or the default evaluation of the first variant.
fn match_closed_form(
    forms: &HashMap<String, RadicalExpr>,
    variants: &[&str],
    target: &PrecReal,
    ctx: &PrecisionContext,
) -> Result<(String, Option<BranchAssignment>, PrecReal)> {
    for name in variants {
        let e = &forms[*name];
        if let Some(br) = branch_search(e, target, ctx) {
            let v = radical_eval(e, &br, ctx)?;
            return Ok((name.to_string(), Some(br), v.re));
        }
    }
    let e = &forms[variants[0]];
    let v = radical_eval(e, &BranchAssignment::default_for(e), ctx)?;
    Ok((variants[0].to_string(), None, v.re))
}

fn describe(name: &str, br: &Option<BranchAssignment>) -> String {
    match br {
        Some(b) => format!("{name} {b}"),
        None => format!("{name} no match"),
    }
}

fn bg163(ctx: &PrecisionContext, fault: Option<Fault>) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("bg163", ctx);
    let bits = ctx.bits();
    let r = r163();
    let p = rep.timed("params", || params_positive(&r, ctx))?;
    let bg = bg_j_t(&p, ctx)?;
    let forms = closed_forms();

    let (j_name, j_br, j_val) = rep.timed("J_search", || {
        match_closed_form(&forms, &["J", "J_grouped"], &bg.j, ctx)
    })?;
    rep.note("bg163.J_branch", describe(&j_name, &j_br));
    let j_residual = if j_br.is_some() {
        rel(j_val.value(), bg.j.value(), ctx)
    } else {
        Float::with_val(bits, 1)
    };
    rep.checks
        .push(CheckResult::equality("bg163.J_radical", j_residual, ctx));

    let (t_name, t_br, t_val) =
        rep.timed("T_search", || match_closed_form(&forms, &["T"], &bg.t, ctx))?;
    rep.note("bg163.T_branch", describe(&t_name, &t_br));
    let t_residual = if t_br.is_some() {
        rel(t_val.value(), bg.t.value(), ctx)
    } else {
        Float::with_val(bits, 1)
    };
    rep.checks
        .push(CheckResult::equality("bg163.T_radical", t_residual, ctx));

    let mut j = j_val.into_float();
    if fault == Some(Fault::PerturbJ) {
        j *= Float::with_val(bits, 1) + pow10(-39, bits);
    }
    let norm = BgNormalization {
        j: PrecReal::from_float(j, ctx),
        t: t_val,
    };
    let (a, b) = bg_coefficients(&norm, &r, ctx);
    let series = SeriesParams::new(r, Family::Positive, norm.j, a, b)?;
    let pi = pi_reference(ctx);
    let sum = rep.timed("series", || eval_level1_series(&series, ctx.digits(), ctx))?;
    let err = (Float::with_val(bits, sum.value.value() * pi.value()) - 1u32).abs();
    rep.checks
        .push(CheckResult::equality("bg163.series", err, ctx));
    rep.note("bg163.terms", sum.estimate.terms.to_string());

    rate_check(&mut rep, "bg163.digits_per_term", &series, &pi, 32.0, ctx)?;
    Ok(rep.finish())
}

fn rate_check(
    rep: &mut VerificationReport,
    name: &str,
    series: &SeriesParams,
    pi: &PrecReal,
    claimed: f64,
    ctx: &PrecisionContext,
) -> Result<()> {
    let rate = realized_digits_per_term(series, pi, ctx)?;
    rep.note(name, format!("{rate:.4}"));
    let bits = ctx.bits();
    rep.checks.push(CheckResult::new(
        name,
        Float::with_val(bits, (rate - claimed).abs()),
        Float::with_val(bits, 0.5),
        ctx,
    ));
    Ok(())
}

fn r243(ctx: &PrecisionContext, fault: Option<Fault>) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("r243", ctx);
    let bits = ctx.bits();
    let r = SingularValueIndex::integer(243);
    let a_index = if fault == Some(Fault::WrongRootIndex) {
        2
    } else {
        1
    };
    let printed = rep.timed("roots", || r243_params_with(ctx, a_index))?;
    let pi = pi_reference(ctx);
    let sum = rep.timed("series", || eval_level1_series(&printed, ctx.digits(), ctx))?;
    let err = (Float::with_val(bits, sum.value.value() * pi.value()) - 1u32).abs();
    rep.checks
        .push(CheckResult::equality("r243.series", err, ctx));
    rep.note("r243.terms", sum.estimate.terms.to_string());

    let computed = rep.timed("params", || params_negative(&r, ctx))?;
    for (name, lhs, rhs) in [
        ("r243.z_matches_params", &printed.z, &computed.z),
        ("r243.a_matches_params", &printed.a, &computed.a),
        ("r243.b_matches_params", &printed.b, &computed.b),
    ] {
        rep.checks.push(CheckResult::equality(
            name,
            rel(lhs.value(), rhs.value(), ctx),
            ctx,
        ));
    }

    if ctx.digits() >= RECOGNITION_MIN_DIGITS {
        let found = rep.timed("recognize", || recognize_min_poly(&computed.z, 3, ctx));
        let exact = found.as_ref() == Some(&r243_polynomials()[0].primitive());
        rep.note(
            "r243.recognized",
            found.map_or("none".into(), |q| q.to_text()),
        );
        rep.checks.push(CheckResult::equality(
            "r243.recognize_z",
            Float::with_val(bits, if exact { 0 } else { 1 }),
            ctx,
        ));
    } else {
        rep.note(
            "r243.recognized",
            format!("skipped below {RECOGNITION_MIN_DIGITS} digits"),
        );
    }

    rate_check(&mut rep, "r243.digits_per_term", &printed, &pi, 18.0, ctx)?;
    Ok(rep.finish())
}

fn r243_params_with(ctx: &PrecisionContext, a_index: usize) -> Result<SeriesParams> {
    let [zp, ap, bp] = r243_polynomials();
    SeriesParams::new(
        SingularValueIndex::integer(243),
        Family::Negative,
        root_by_spec(&RootSpec::new(zp, 1), ctx)?,
        -root_by_spec(&RootSpec::new(ap, a_index), ctx)?,
        -root_by_spec(&RootSpec::new(bp, 1), ctx)?,
    )
}

/// The `r = 243` series from the printed polynomials: `z` is the first real
/// root of the cubic, `a` and `b` are the negated first real roots of the
/// sextics.
pub fn r243_printed_params(ctx: &PrecisionContext) -> Result<SeriesParams> {
    r243_params_with(ctx, 1)
}

/// The `r = 163` positive series built from the `J` and `T` closed forms
/// under their default branches.
pub fn bg163_closed_form_params(ctx: &PrecisionContext) -> Result<SeriesParams> {
    let forms = closed_forms();
    let eval = |name: &str| -> Result<PrecReal> {
        let e = &forms[name];
        Ok(radical_eval(e, &BranchAssignment::default_for(e), ctx)?.re)
    };
    let norm = BgNormalization {
        j: eval("J")?,
        t: eval("T")?,
    };
    let r = r163();
    let (a, b) = bg_coefficients(&norm, &r, ctx);
    SeriesParams::new(r, Family::Positive, norm.j, a, b)
}

fn g163(ctx: &PrecisionContext, fault: Option<Fault>) -> Result<VerificationReport> {
    let mut rep = VerificationReport::new("g163", ctx);
    let bits = ctx.bits();
    let (_, x, _) = rep.timed("singular_data", || singular_data(&r163(), ctx))?;
    let x = Float::with_val(bits, x.value().value());
    let root = if fault == Some(Fault::WrongGExponent) {
        20
    } else {
        24
    };
    let g = Float::with_val(bits, x.recip_ref()).root(root);
    let xh = Float::with_val(bits, 2u32).root(4) * &g;
    let cubic = Float::with_val(bits, xh.clone().pow(3u32))
        - Float::with_val(bits, xh.square_ref()) * 6u32
        + Float::with_val(bits, &xh * 4u32)
        - 2u32;
    rep.checks
        .push(CheckResult::equality("g163.cubic", cubic.abs(), ctx));
    rep.note("g163.x_hat", format_scientific(&xh, 30));

    let via_g = Float::with_val(bits, 1 - g.pow(-24i32)).sqrt();
    let direct = Float::with_val(bits, 1 - &x).sqrt();
    rep.checks.push(CheckResult::equality(
        "g163.invariant_sqrt",
        rel(&via_g, &direct, ctx),
        ctx,
    ));
    Ok(rep.finish())
}
