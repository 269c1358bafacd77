//! DFT/IDFT round-trip suite, with the manual, differential and metamorphic
//! checks it is compared against.
//!
//! The faulty variant `"coef_minus_1j"` uses `-j*pi` instead of `-j*2*pi` in
//! the exponent. Like the Python routine it mirrors, one function serves both
//! directions, so the inverse carries the same fault (`+j*pi`, scaled by 1/N).

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::ConfigError;
use crate::generators::gen_real_sequence;
use crate::pipeline::{
    Datum, ExecCtx, Fault, Judgement, ModeTag, MutationDescriptor, Mutator, ParamValue,
    RelationCtx, SuiteDefinition, Verdict,
};
use crate::rng::Rng;

pub const VARIANTS: [&str; 2] = ["correct", "coef_minus_1j"];
pub const DEFAULT_MAX_LEN: usize = 64;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexSeq(pub Vec<Complex64>);

impl ComplexSeq {
    pub fn from_reals(xs: &[f64]) -> Self {
        Self(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.0.iter().map(|z| z.re).collect()
    }
}

fn fmt_complex(z: &Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:?}{sign}{:?}j", z.re, z.im.abs())
}

impl fmt::Display for ComplexSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(fmt_complex).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

impl Datum for ComplexSeq {
    fn render(&self) -> String {
        self.to_string()
    }

    /// Accepts a JSON array of reals, e.g. `[1, 0, 1, 0]`.
    fn parse_repr(text: &str) -> Result<Self, String> {
        let xs: Vec<f64> = serde_json::from_str(text).map_err(|e| format!("`{text}`: {e}"))?;
        if xs.is_empty() {
            return Err("sequence must not be empty".to_owned());
        }
        Ok(Self::from_reals(&xs))
    }
}

fn exponent_coefficient(variant: &str) -> f64 {
    match variant {
        "coef_minus_1j" => PI,
        _ => 2.0 * PI,
    }
}

// Direct O(N^2) summation shared by both directions; `sign` is -1 forward, +1 inverse.
fn transform(x: &ComplexSeq, variant: &str, sign: f64) -> ComplexSeq {
    let n = x.len();
    let coef = sign * exponent_coefficient(variant) / n as f64;
    let out = (0..n)
        .map(|k| {
            x.0.iter()
                .enumerate()
                .map(|(i, &xi)| xi * Complex64::from_polar(1.0, coef * (k * i) as f64))
                .sum::<Complex64>()
        })
        .collect();
    ComplexSeq(out)
}

/// `X_k = sum_n x_n exp(-j 2 pi k n / N)` for `"correct"`; `-j pi` for
/// `"coef_minus_1j"`.
pub fn dft(x: &ComplexSeq, variant: &str) -> ComplexSeq {
    transform(x, variant, -1.0)
}

/// `x_n = (1/N) sum_k X_k exp(+j 2 pi k n / N)` for `"correct"`; `+j pi`
/// for `"coef_minus_1j"`.
pub fn idft(x: &ComplexSeq, variant: &str) -> ComplexSeq {
    let n = x.len() as f64;
    let mut out = transform(x, variant, 1.0);
    for z in &mut out.0 {
        *z /= n;
    }
    out
}

/// Iterative radix-2 Cooley-Tukey. The length must be a power of two.
pub fn fft(x: &ComplexSeq) -> Result<ComplexSeq, ConfigError> {
    let n = x.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(ConfigError::InvalidParameter(format!(
            "fft length {n} is not a power of two"
        )));
    }
    let bits = n.trailing_zeros();
    let mut a = vec![Complex64::new(0.0, 0.0); n];
    for (i, &v) in x.0.iter().enumerate() {
        let j = if bits == 0 {
            0
        } else {
            i.reverse_bits() >> (usize::BITS - bits)
        };
        a[j] = v;
    }
    let mut len = 2;
    while len <= n {
        let step = Complex64::from_polar(1.0, -2.0 * PI / len as f64);
        for start in (0..n).step_by(len) {
            let mut w = Complex64::new(1.0, 0.0);
            for k in 0..len / 2 {
                let u = a[start + k];
                let v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
                w *= step;
            }
        }
        len <<= 1;
    }
    Ok(ComplexSeq(a))
}

/// Zero-pads to the next power of two.
pub fn pad_pow2(x: &[f64]) -> Vec<f64> {
    let target = x.len().max(1).next_power_of_two();
    let mut out = x.to_vec();
    out.resize(target, 0.0);
    out
}

/// How the relation compares sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Comparison {
    /// Real parts only.
    #[default]
    RealPart,
    /// Both components.
    Complex,
}

/// What the forward program hands to the mutator and backward program.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Handoff {
    /// The full complex spectrum.
    #[default]
    Complex,
    /// Real parts truncated toward zero (`int(z.real)`), imaginary parts
    /// dropped. Reproduces hand-worked examples that read integer spectra
    /// off the printed output.
    TruncatedReal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierOptions {
    pub comparison: Comparison,
    pub handoff: Handoff,
    pub min_len: usize,
    pub max_len: usize,
}

impl Default for FourierOptions {
    fn default() -> Self {
        Self {
            comparison: Comparison::RealPart,
            handoff: Handoff::Complex,
            min_len: 1,
            max_len: DEFAULT_MAX_LEN,
        }
    }
}

/// Adds `c` to every spectrum element.
pub fn add_constant_fixed(c: f64) -> Mutator<ComplexSeq> {
    Mutator::new("add_constant", move |spectrum: &ComplexSeq, _: &mut Rng| {
        let shifted = ComplexSeq(spectrum.0.iter().map(|z| z + c).collect());
        Ok((
            shifted,
            MutationDescriptor::new("add_constant").with("c", ParamValue::Real(c)),
        ))
    })
}

/// `add_constant` with `c` uniform in `[0, 1)`.
pub fn add_constant() -> Mutator<ComplexSeq> {
    Mutator::new("add_constant", |spectrum: &ComplexSeq, rng: &mut Rng| {
        let c = rng.unit();
        add_constant_fixed(c).apply(spectrum, rng)
    })
}

/// Expected round-trip output: `x` itself, or `x + c * e_0` after
/// `add_constant(c)`.
pub fn expected_round_trip(x: &ComplexSeq, mutation: &MutationDescriptor) -> ComplexSeq {
    let mut expected = x.clone();
    if mutation.name == "add_constant" {
        if let (Some(c), Some(first)) = (mutation.real("c"), expected.0.first_mut()) {
            *first += c;
        }
    }
    expected
}

// Strict comparison; NaN is never within tolerance.
fn within(off: f64, eps: f64) -> bool {
    off < eps
}

pub fn round_trip_relation(
    x: &ComplexSeq,
    x_prime: &ComplexSeq,
    mutation: &MutationDescriptor,
    eps: f64,
    comparison: Comparison,
) -> Judgement {
    if x.len() != x_prime.len() {
        return Judgement::Broken(format!(
            "length changed from {} to {}",
            x.len(),
            x_prime.len()
        ));
    }
    let expected = expected_round_trip(x, mutation);
    for (i, (want, got)) in expected.0.iter().zip(&x_prime.0).enumerate() {
        let off = match comparison {
            Comparison::RealPart => (want.re - got.re).abs(),
            Comparison::Complex => (want - got).norm(),
        };
        if !within(off, eps) {
            return Judgement::Broken(format!(
                "element {i}: expected {}, got {} (off by {off:e})",
                fmt_complex(want),
                fmt_complex(got)
            ));
        }
    }
    Judgement::Holds
}

fn truncate_real(spectrum: ComplexSeq) -> ComplexSeq {
    ComplexSeq(
        spectrum
            .0
            .iter()
            .map(|z| Complex64::new(z.re.trunc(), 0.0))
            .collect(),
    )
}

fn cost(n: usize) -> u64 {
    (n as u64).saturating_mul(n as u64)
}

pub fn fourier_suite() -> SuiteDefinition<ComplexSeq, ComplexSeq> {
    fourier_suite_with(FourierOptions::default())
}

/// Integrated-mode suite: one implementation provides both the transform
/// and its inverse. Mutators: identity and `add_constant`.
pub fn fourier_suite_with(options: FourierOptions) -> SuiteDefinition<ComplexSeq, ComplexSeq> {
    let FourierOptions {
        comparison,
        handoff,
        min_len,
        max_len,
    } = options;
    let mut builder = SuiteDefinition::builder("fourier", ModeTag::Integrated)
        .generator(move |rng: &mut Rng| {
            let xs = gen_real_sequence(rng, min_len, max_len, -1.0, 1.0)
                .map_err(|e| Fault::failed(e.to_string()))?;
            Ok(ComplexSeq::from_reals(&xs))
        })
        .mutator(Mutator::identity())
        .mutator(add_constant())
        .relation(
            move |x: &ComplexSeq, xp: &ComplexSeq, m: &MutationDescriptor, ctx: &RelationCtx| {
                Ok(round_trip_relation(x, xp, m, ctx.eps, comparison))
            },
        );
    for id in VARIANTS {
        let forward = move |x: &ComplexSeq, ctx: &mut ExecCtx<'_>| {
            ctx.tick(cost(x.len()))?;
            let spectrum = dft(x, id);
            Ok(match handoff {
                Handoff::Complex => spectrum,
                Handoff::TruncatedReal => truncate_real(spectrum),
            })
        };
        let backward = move |spectrum: &ComplexSeq, ctx: &mut ExecCtx<'_>| {
            ctx.tick(cost(spectrum.len()))?;
            Ok(idft(spectrum, id))
        };
        builder = builder.variant(id, forward, backward);
    }
    builder.build().expect("fourier suite is complete")
}

/// Adding `c` to `x_0` must add `c` to the real part of every `X_k`.
pub fn metamorphic_baseline(x: &[f64], c: f64, variant: &str, eps: f64) -> Verdict {
    if x.is_empty() {
        return Verdict::Pass;
    }
    let base = dft(&ComplexSeq::from_reals(x), variant);
    let mut shifted_input = x.to_vec();
    shifted_input[0] += c;
    let shifted = dft(&ComplexSeq::from_reals(&shifted_input), variant);
    for (k, (a, b)) in base.0.iter().zip(&shifted.0).enumerate() {
        if !within((b.re - a.re - c).abs(), eps) {
            return Verdict::Violation {
                detail: format!("X_{k} moved by {} instead of {c}", b.re - a.re),
            };
        }
    }
    Verdict::Pass
}

/// Compares `dft(x, variant)` against the radix-2 FFT on real parts, after
/// zero-padding `x` to a power of two.
pub fn differential_baseline(x: &[f64], variant: &str, eps: f64) -> Verdict {
    let padded = ComplexSeq::from_reals(&pad_pow2(x));
    let direct = dft(&padded, variant);
    let reference = fft(&padded).expect("padded to a power of two");
    for (k, (a, b)) in direct.0.iter().zip(&reference.0).enumerate() {
        if !within((a.re - b.re).abs(), eps) {
            return Verdict::Violation {
                detail: format!("X_{k}: dft gives {:?}, fft gives {:?}", a.re, b.re),
            };
        }
    }
    Verdict::Pass
}

/// Hand-written fixture: the real parts of `dft([1, 0, 1, 0])`, truncated to
/// integers, must be `[2, 0, 2, 0]`.
pub fn manual_fixture_check(variant: &str) -> Verdict {
    let spectrum = dft(&ComplexSeq::from_reals(&[1.0, 0.0, 1.0, 0.0]), variant);
    let got: Vec<i64> = spectrum.0.iter().map(|z| z.re.trunc() as i64).collect();
    if got == [2, 0, 2, 0] {
        Verdict::Pass
    } else {
        Verdict::Violation {
            detail: format!("expected [2, 0, 2, 0], got {got:?}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn dft_of_alternating_sequence() {
        let x = ComplexSeq::from_reals(&[1.0, 0.0, 1.0, 0.0]);
        let spectrum = dft(&x, "correct");
        assert!(approx_eq(
            &spectrum.real_parts(),
            &[2.0, 0.0, 2.0, 0.0],
            1e-12
        ));
        assert!(spectrum.0.iter().all(|z| z.im.abs() <= 1e-12));
        let buggy = dft(&x, "coef_minus_1j");
        assert!(approx_eq(&buggy.real_parts(), &[2.0, 1.0, 0.0, 1.0], 1e-12));
    }

    #[test]
    fn single_element_is_identity() {
        let x = ComplexSeq(vec![Complex64::new(3.5, -1.0)]);
        for v in VARIANTS {
            assert_eq!(dft(&x, v), x);
            assert_eq!(idft(&x, v), x);
        }
        assert_eq!(fft(&x).unwrap(), x);
    }

    #[test]
    fn idft_of_spectrum() {
        let back = idft(&ComplexSeq::from_reals(&[2.0, 0.0, 2.0, 0.0]), "correct");
        assert!(approx_eq(&back.real_parts(), &[1.0, 0.0, 1.0, 0.0], 1e-12));
    }

    #[test]
    fn fft_rejects_non_power_of_two() {
        assert!(fft(&ComplexSeq::from_reals(&[1.0, 2.0, 3.0])).is_err());
        assert!(fft(&ComplexSeq::default()).is_err());
        let s = fft(&ComplexSeq::from_reals(&[1.0, 0.0, 1.0, 0.0])).unwrap();
        assert!(approx_eq(&s.real_parts(), &[2.0, 0.0, 2.0, 0.0], 1e-12));
    }

    #[test]
    fn padding() {
        assert_eq!(pad_pow2(&[1.0, 2.0, 3.0]), vec![1.0, 2.0, 3.0, 0.0]);
        assert_eq!(pad_pow2(&[1.0]), vec![1.0]);
        assert_eq!(pad_pow2(&[]), vec![0.0]);
    }

    #[test]
    fn baselines_on_alternating_sequence() {
        let x = [1.0, 0.0, 1.0, 0.0];
        assert_eq!(
            metamorphic_baseline(&x, 1.0, "coef_minus_1j", 1e-10),
            Verdict::Pass
        );
        assert_eq!(
            metamorphic_baseline(&x, 0.0, "coef_minus_1j", 1e-10),
            Verdict::Pass
        );
        assert!(differential_baseline(&x, "coef_minus_1j", 1e-10).is_violation());
        assert_eq!(differential_baseline(&x, "correct", 1e-10), Verdict::Pass);
        for v in VARIANTS {
            assert_eq!(differential_baseline(&[0.3], v, 1e-10), Verdict::Pass);
        }
    }

    #[test]
    fn manual_fixture() {
        assert_eq!(manual_fixture_check("correct"), Verdict::Pass);
        assert!(manual_fixture_check("coef_minus_1j").is_violation());
        let single = dft(&ComplexSeq::from_reals(&[5.0]), "correct");
        assert_eq!(single.real_parts(), vec![5.0]);
    }

    #[test]
    fn relation_handles_mutation_and_nan() {
        let x = ComplexSeq::from_reals(&[1.0, 0.0, 1.0, 0.0]);
        let m = MutationDescriptor::new("add_constant").with("c", ParamValue::Real(1.0));
        let shifted = ComplexSeq::from_reals(&[2.0, 0.0, 1.0, 0.0]);
        assert_eq!(
            round_trip_relation(&x, &shifted, &m, 1e-10, Comparison::RealPart),
            Judgement::Holds
        );
        let nan = ComplexSeq::from_reals(&[f64::NAN, 0.0, 1.0, 0.0]);
        assert!(matches!(
            round_trip_relation(
                &x,
                &nan,
                &MutationDescriptor::identity(),
                1e-10,
                Comparison::RealPart
            ),
            Judgement::Broken(_)
        ));
        let imag = ComplexSeq(vec![
            Complex64::new(1.0, 0.5),
            0.0.into(),
            1.0.into(),
            0.0.into(),
        ]);
        let id = MutationDescriptor::identity();
        assert_eq!(
            round_trip_relation(&x, &imag, &id, 1e-10, Comparison::RealPart),
            Judgement::Holds
        );
        assert!(matches!(
            round_trip_relation(&x, &imag, &id, 1e-10, Comparison::Complex),
            Judgement::Broken(_)
        ));
    }

    #[test]
    fn render_format() {
        let s = ComplexSeq(vec![Complex64::new(1.0, -0.5), Complex64::new(0.0, 2.0)]);
        assert_eq!(s.render(), "[1.0-0.5j, 0.0+2.0j]");
    }
}
