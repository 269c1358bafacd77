//! Small demonstration suites for the three modes: sine/arcsine in forward
//! and backward mode, the reciprocal as an integrated-mode involution.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::pipeline::{
    ExecCtx, Fault, Judgement, ModeTag, MutationDescriptor, Mutator, ParamValue, RelationCtx,
    SuiteDefinition,
};
use crate::rng::Rng;

pub const SINE_VARIANTS: [&str; 2] = ["correct", "taylor3"];
pub const RECIPROCAL_VARIANTS: [&str; 2] = ["correct", "off_by_eps"];
/// Range of `k` for the `add_2kpi` mutation.
pub const K_RANGE: (i64, i64) = (-3, 3);
/// Reciprocal inputs with `|x|` below this are rejected at generation.
pub const RECIPROCAL_EXCLUSION: f64 = 1e-3;
pub const OFF_BY_EPS: f64 = 1e-6;

/// Domain a real sample was drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainTag {
    /// `[-pi/2, pi/2]`
    Arc,
    /// `[-1, 1]`
    Trig,
    NonZero,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealSample {
    pub value: f64,
    pub domain: DomainTag,
}

impl RealSample {
    pub fn new(value: f64, domain: DomainTag) -> Option<Self> {
        let ok = match domain {
            DomainTag::Arc => (-FRAC_PI_2..=FRAC_PI_2).contains(&value),
            DomainTag::Trig => (-1.0..=1.0).contains(&value),
            DomainTag::NonZero => value != 0.0 && value.is_finite(),
        };
        ok.then_some(Self { value, domain })
    }
}

/// Sine under test. `"taylor3"` truncates the series after the x^5 term.
pub fn sine(x: f64, variant: &str) -> f64 {
    match variant {
        "taylor3" => x - x.powi(3) / 6.0 + x.powi(5) / 120.0,
        _ => x.sin(),
    }
}

/// Reciprocal under test. `"off_by_eps"` adds 1e-6 to the result.
pub fn reciprocal(x: f64, variant: &str) -> f64 {
    match variant {
        "off_by_eps" => 1.0 / x + OFF_BY_EPS,
        _ => 1.0 / x,
    }
}

fn close(x: f64, x_prime: f64, tol: f64) -> Judgement {
    if x_prime.is_finite() && (x - x_prime).abs() <= tol {
        Judgement::Holds
    } else {
        Judgement::Broken(format!("|{x:?} - {x_prime:?}| exceeds {tol:e}"))
    }
}

fn sine_program(
    variant: &'static str,
) -> impl Fn(&f64, &mut ExecCtx<'_>) -> Result<f64, Fault> + Send + Sync {
    move |x: &f64, _: &mut ExecCtx<'_>| Ok(sine(*x, variant))
}

fn trusted_arcsin(t: &f64, _: &mut ExecCtx<'_>) -> Result<f64, Fault> {
    Ok(t.asin())
}

/// Forward mode: sine under test, trusted arcsine, relation
/// `|x - x'| <= eps * max(1, |x|)`.
pub fn sine_forward_suite() -> SuiteDefinition<f64, f64> {
    let mut builder = SuiteDefinition::builder("sine_forward", ModeTag::Forward)
        .generator(|rng: &mut Rng| Ok(rng.real_in(-FRAC_PI_2, FRAC_PI_2)))
        .relation(
            |x: &f64, xp: &f64, _: &MutationDescriptor, ctx: &RelationCtx| {
                Ok(close(*x, *xp, ctx.eps * x.abs().max(1.0)))
            },
        );
    for id in SINE_VARIANTS {
        builder = builder.variant(id, sine_program(id), trusted_arcsin);
    }
    builder.build().expect("sine_forward suite is complete")
}

/// Adds `2k*pi` for a fixed `k`.
pub fn add_2kpi_fixed(k: i64) -> Mutator<f64> {
    Mutator::new("add_2kpi", move |theta: &f64, _: &mut Rng| {
        Ok((
            theta + 2.0 * k as f64 * PI,
            MutationDescriptor::new("add_2kpi").with("k", ParamValue::Int(k)),
        ))
    })
}

/// Adds `2k*pi` with `k` drawn uniformly from [`K_RANGE`].
pub fn add_2kpi() -> Mutator<f64> {
    Mutator::new("add_2kpi", |theta: &f64, rng: &mut Rng| {
        let k = rng.i64_in(K_RANGE.0, K_RANGE.1);
        add_2kpi_fixed(k).apply(theta, rng)
    })
}

/// Backward-mode trig tolerance: ten times `eps` (1e-9 at the default eps),
/// since adding `2k*pi` costs argument-reduction accuracy.
pub fn trig_tolerance(eps: f64) -> f64 {
    10.0 * eps
}

/// Backward mode: trusted arcsine, `add_2kpi` mutation, sine under test.
pub fn sine_backward_suite() -> SuiteDefinition<f64, f64> {
    let mut builder = SuiteDefinition::builder("sine_backward", ModeTag::Backward)
        .generator(|rng: &mut Rng| Ok(rng.real_in(-1.0, 1.0)))
        .mutator(add_2kpi())
        .relation(
            |t: &f64, tp: &f64, _: &MutationDescriptor, ctx: &RelationCtx| {
                Ok(close(*t, *tp, trig_tolerance(ctx.eps)))
            },
        );
    for id in SINE_VARIANTS {
        builder = builder.variant(id, trusted_arcsin, sine_program(id));
    }
    builder.build().expect("sine_backward suite is complete")
}

fn reciprocal_program(
    variant: &'static str,
) -> impl Fn(&f64, &mut ExecCtx<'_>) -> Result<f64, Fault> + Send + Sync {
    move |x: &f64, _: &mut ExecCtx<'_>| {
        if *x == 0.0 {
            return Err(Fault::failed("reciprocal of zero"));
        }
        Ok(reciprocal(*x, variant))
    }
}

/// Uniform in `[-10, 10]` with `|x| < 1e-3` rejected.
pub fn gen_nonzero(rng: &mut Rng) -> f64 {
    loop {
        let x = rng.real_in(-10.0, 10.0);
        if x.abs() >= RECIPROCAL_EXCLUSION {
            return x;
        }
    }
}

/// Integrated mode: the reciprocal is applied twice, relation
/// `|x - x'| <= eps * max(1, x^2)`.
pub fn reciprocal_integrated_suite() -> SuiteDefinition<f64, f64> {
    let mut builder = SuiteDefinition::builder("reciprocal", ModeTag::Integrated)
        .generator(|rng: &mut Rng| Ok(gen_nonzero(rng)))
        .relation(
            |x: &f64, xp: &f64, _: &MutationDescriptor, ctx: &RelationCtx| {
                Ok(close(*x, *xp, ctx.eps * (x * x).max(1.0)))
            },
        );
    for id in RECIPROCAL_VARIANTS {
        builder = builder.variant(id, reciprocal_program(id), reciprocal_program(id));
    }
    builder.build().expect("reciprocal suite is complete")
}
