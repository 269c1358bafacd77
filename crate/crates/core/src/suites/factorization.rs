//! Forward-mode suite: Pollard's rho under test, multiplication as the
//! trusted backward program.

use std::fmt;

use crate::generators::{gen_integer, DEFAULT_INT_HI, DEFAULT_INT_LO};
use crate::pipeline::{
    Datum, ExecCtx, Fault, Judgement, ModeTag, MutationDescriptor, RelationCtx, StepBudget,
    SuiteDefinition,
};
use crate::rng::Rng;

pub const VARIANTS: [&str; 2] = ["correct", "gcd_x"];
/// Fresh `(x, c)` restarts the correct variant allows when the gcd collapses to `n`.
pub const MAX_RESTARTS: usize = 20;

/// Factors returned for `source_n`, in discovery order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorList {
    pub factors: Vec<u64>,
    pub source_n: u64,
}

impl FactorList {
    pub fn sorted(&self) -> Vec<u64> {
        let mut f = self.factors.clone();
        f.sort_unstable();
        f
    }
}

impl fmt::Display for FactorList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.factors)
    }
}

impl Datum for FactorList {
    fn render(&self) -> String {
        self.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("gcd(0, 0) is undefined")]
pub struct GcdDomainError;

pub fn gcd(a: u64, b: u64) -> Result<u64, GcdDomainError> {
    if a == 0 && b == 0 {
        return Err(GcdDomainError);
    }
    Ok(euclid(a, b))
}

// Same loop, but gcd(0, 0) = 0 as in the faulty listing the buggy variant mirrors.
fn euclid(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) * u128::from(b)) % u128::from(m)) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic Miller-Rabin; exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Product of all factors; `None` on `u128` overflow. Empty list gives 1.
pub fn multiply_product(f: &FactorList) -> Option<u128> {
    f.factors
        .iter()
        .try_fold(1u128, |acc, &p| acc.checked_mul(u128::from(p)))
}

fn rho_step(t: u64, c: u64, n: u64, budget: &mut StepBudget) -> Result<u64, Fault> {
    budget.tick(1)?;
    Ok(((u128::from(t) * u128::from(t) + u128::from(c)) % u128::from(n)) as u64)
}

fn rho_correct(
    n: u64,
    rng: &mut Rng,
    budget: &mut StepBudget,
    out: &mut Vec<u64>,
) -> Result<(), Fault> {
    budget.tick(1)?;
    if n == 1 {
        return Ok(());
    }
    if n.is_multiple_of(2) {
        out.push(2);
        return rho_correct(n / 2, rng, budget, out);
    }
    if is_prime(n) {
        out.push(n);
        return Ok(());
    }
    for _ in 0..=MAX_RESTARTS {
        let mut x = rng.u64_in(1, n - 1);
        let mut y = x;
        let c = rng.u64_in(1, n - 1);
        let mut d = 1;
        while d <= 1 {
            x = rho_step(x, c, n, budget)?;
            y = rho_step(y, c, n, budget)?;
            y = rho_step(y, c, n, budget)?;
            d = euclid(x.abs_diff(y), n);
        }
        if d != n {
            rho_correct(d, rng, budget, out)?;
            return rho_correct(n / d, rng, budget, out);
        }
    }
    out.push(n);
    Ok(())
}

// Faithful to the faulty listing: d = gcd(|x - y|, x), no restart, no primality check.
fn rho_gcd_x(
    n: u64,
    rng: &mut Rng,
    budget: &mut StepBudget,
    out: &mut Vec<u64>,
) -> Result<(), Fault> {
    budget.tick(1)?;
    if n == 1 {
        return Ok(());
    }
    if n.is_multiple_of(2) {
        out.push(2);
        return rho_gcd_x(n / 2, rng, budget, out);
    }
    let mut x = rng.u64_in(1, n - 1);
    let mut y = x;
    let c = rng.u64_in(1, n - 1);
    let mut d = 1;
    while d <= 1 {
        x = rho_step(x, c, n, budget)?;
        y = rho_step(y, c, n, budget)?;
        y = rho_step(y, c, n, budget)?;
        d = euclid(x.abs_diff(y), x);
    }
    if d == n {
        out.push(n);
        Ok(())
    } else {
        rho_gcd_x(d, rng, budget, out)?;
        rho_gcd_x(n / d, rng, budget, out)
    }
}

/// Pollard's rho with recursive splitting. Every rho evaluation and every
/// recursive call costs one step against `budget`.
pub fn factorize(
    n: u64,
    variant: &str,
    rng: &mut Rng,
    budget: &mut StepBudget,
) -> Result<FactorList, Fault> {
    if n == 0 {
        return Err(Fault::failed("cannot factor 0"));
    }
    let mut factors = Vec::new();
    match variant {
        "correct" => rho_correct(n, rng, budget, &mut factors)?,
        "gcd_x" => rho_gcd_x(n, rng, budget, &mut factors)?,
        other => {
            return Err(Fault::failed(format!(
                "unknown factorization variant `{other}`"
            )))
        }
    }
    Ok(FactorList {
        factors,
        source_n: n,
    })
}

pub fn pollards_rho(
    n: u64,
    variant: &str,
    rng: &mut Rng,
    step_cap: u64,
) -> Result<FactorList, Fault> {
    factorize(n, variant, rng, &mut StepBudget::new(step_cap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorProfile {
    /// The product of the factors equals the input.
    Product,
    /// Product relation plus every factor prime.
    Strict,
}

fn forward(
    variant: &'static str,
) -> impl Fn(&u64, &mut ExecCtx<'_>) -> Result<FactorList, Fault> + Send + Sync {
    move |n: &u64, ctx: &mut ExecCtx<'_>| factorize(*n, variant, ctx.rng, &mut ctx.budget)
}

fn multiply(f: &FactorList, _: &mut ExecCtx<'_>) -> Result<u64, Fault> {
    match multiply_product(f) {
        Some(p) => {
            u64::try_from(p).map_err(|_| Fault::failed(format!("product {p} exceeds 64 bits")))
        }
        None => Err(Fault::failed("product overflows 128 bits")),
    }
}

/// Relation over `(N, product)`. A product of 0 is the strict backward
/// program's marker for a composite factor.
pub fn product_relation(n: u64, product: u64) -> Judgement {
    if product == COMPOSITE_MARKER {
        Judgement::Broken("a returned factor is not prime".to_owned())
    } else if n == product {
        Judgement::Holds
    } else {
        Judgement::Broken(format!("product of factors is {product}, expected {n}"))
    }
}

pub fn factorization_suite() -> SuiteDefinition<u64, FactorList> {
    factorization_suite_with(FactorProfile::Product)
}

/// The backward program is integer multiplication. Under the strict profile
/// it also checks every factor with [`is_prime`].
pub fn factorization_suite_with(profile: FactorProfile) -> SuiteDefinition<u64, FactorList> {
    let name = match profile {
        FactorProfile::Product => "factorization",
        FactorProfile::Strict => "factorization_strict",
    };
    let mut builder = SuiteDefinition::builder(name, ModeTag::Forward)
        .generator(|rng: &mut Rng| {
            gen_integer(rng, DEFAULT_INT_LO, DEFAULT_INT_HI)
                .map_err(|e| Fault::failed(e.to_string()))
        })
        .relation(
            |n: &u64, product: &u64, _: &MutationDescriptor, _: &RelationCtx| {
                Ok(product_relation(*n, *product))
            },
        );
    for id in VARIANTS {
        match profile {
            FactorProfile::Product => builder = builder.variant(id, forward(id), multiply),
            FactorProfile::Strict => builder = builder.variant(id, forward(id), multiply_primes),
        }
    }
    builder.build().expect("factorization suite is complete")
}

const COMPOSITE_MARKER: u64 = 0;

// Strict backward program: any composite factor maps to COMPOSITE_MARKER,
// which never equals a generated N >= 2.
fn multiply_primes(f: &FactorList, ctx: &mut ExecCtx<'_>) -> Result<u64, Fault> {
    if f.factors.iter().any(|&p| !is_prime(p)) {
        return Ok(COMPOSITE_MARKER);
    }
    multiply(f, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{Forced, SuiteConfig, Verdict};

    fn is_prime_trial_division(n: u64) -> bool {
        n >= 2
            && (2..)
                .take_while(|d| d * d <= n)
                .all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(12, 8), Ok(4));
        assert_eq!(gcd(7, 1), Ok(1));
        assert_eq!(gcd(0, 5), Ok(5));
        assert_eq!(gcd(0, 0), Err(GcdDomainError));
    }

    #[test]
    fn primality_against_trial_division() {
        assert!(is_prime(2));
        assert!(!is_prime(561));
        assert!(!is_prime(1));
        for n in 2..100_000u64 {
            assert_eq!(is_prime(n), is_prime_trial_division(n), "{n}");
        }
        let big = 1_000_000_000_039u64;
        assert_eq!(is_prime(big), is_prime_trial_division(big));
        assert!(is_prime(big));
        assert!(!is_prime(1_000_000_000_037));
        assert!(is_prime(u64::MAX - 58)); // largest 64-bit prime
    }

    #[test]
    fn products() {
        let f = |v: &[u64]| FactorList {
            factors: v.to_vec(),
            source_n: 0,
        };
        assert_eq!(multiply_product(&f(&[2, 2, 3])), Some(12));
        assert_eq!(multiply_product(&f(&[])), Some(1));
        assert_eq!(multiply_product(&f(&[2, 2, 2])), Some(8));
        assert_eq!(multiply_product(&f(&[u64::MAX, u64::MAX, u64::MAX])), None);
    }

    #[test]
    fn correct_factorizations() {
        let mut rng = Rng::from_seed(1);
        assert_eq!(
            pollards_rho(12, "correct", &mut rng, 10_000)
                .unwrap()
                .sorted(),
            vec![2, 2, 3]
        );
        assert!(pollards_rho(1, "correct", &mut rng, 10)
            .unwrap()
            .factors
            .is_empty());
        assert_eq!(
            pollards_rho(2, "correct", &mut rng, 10).unwrap().factors,
            vec![2]
        );
        let n = 1_000_003u64 * 1_000_033; // two primes near 10^6
        let f = pollards_rho(n, "correct", &mut rng, 10_000_000).unwrap();
        assert_eq!(multiply_product(&f), Some(u128::from(n)));
        assert!(f.factors.iter().all(|&p| is_prime(p)));
    }

    #[test]
    fn step_cap_turns_into_fault() {
        let mut rng = Rng::from_seed(1);
        let err = pollards_rho(1_000_000_000_039 * 3, "correct", &mut rng, 5).unwrap_err();
        assert_eq!(err, Fault::StepCapExceeded { cap: 5 });

        let suite = factorization_suite();
        let cfg = SuiteConfig {
            step_cap: 3,
            ..SuiteConfig::default()
        };
        let (_, v) = suite.execute(&cfg, 0, 0, Forced::input(1_000_003 * 1_000_033));
        assert!(matches!(
            v,
            Verdict::ProgramError {
                stage: crate::pipeline::Stage::ForwardExec,
                ..
            }
        ));
    }

    #[test]
    fn prime_input_passes() {
        let suite = factorization_suite();
        let (t, v) = suite.execute(&SuiteConfig::default(), 0, 5, Forced::input(2));
        assert_eq!(v, Verdict::Pass);
        assert_eq!(t.m2.unwrap().factors, vec![2]);
    }

    #[test]
    fn strict_profile_flags_composites() {
        let suite = factorization_suite_with(FactorProfile::Strict);
        let ctx = RelationCtx { eps: 0.0, seed: 0 };
        let composite = FactorList {
            factors: vec![4, 3],
            source_n: 12,
        };
        let mut rng = Rng::from_seed(0);
        let mut ectx = ExecCtx::new(&mut rng, 10);
        let back = multiply_primes(&composite, &mut ectx).unwrap();
        assert!(matches!(
            suite.check(&12, &back, &MutationDescriptor::identity(), &ctx),
            Ok(Judgement::Broken(_))
        ));
    }
}
