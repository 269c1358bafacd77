//! Seeded input producers for the built-in suites.
//!
//! Distributions:
//! * real sequences: length uniform in `[min_len, max_len]`, elements uniform in `[lo, hi]`
//! * integers: uniform in `[lo, hi]`
//! * postfix strings: operator count uniform in `0..=max_internal_nodes`, tree
//!   shape by uniform left/right split, operators from `+-*/`, leaves from `[a-z0-9]`
//! * expression trees: leaf probability 0.3 below the root, forced at depth 1;
//!   leaves are half constants `0..=9`, half variables `a..=e`
//! * environments: every variable uniform in `[-9, 9]`

use std::collections::{BTreeMap, BTreeSet};

use crate::error::ConfigError;
use crate::rng::Rng;
use crate::suites::vm::{BinOp, Env, ExprAst};

pub const DEFAULT_MIN_LEN: usize = 1;
pub const DEFAULT_MAX_LEN: usize = 16;
pub const DEFAULT_INT_LO: u64 = 2;
pub const DEFAULT_INT_HI: u64 = 1_000_000_000_000;

const OPERATORS: [char; 4] = ['+', '-', '*', '/'];
const OPERAND_CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
pub const VARIABLES: [char; 5] = ['a', 'b', 'c', 'd', 'e'];

pub fn gen_real_sequence(
    rng: &mut Rng,
    min_len: usize,
    max_len: usize,
    lo: f64,
    hi: f64,
) -> Result<Vec<f64>, ConfigError> {
    if min_len == 0 || min_len > max_len {
        return Err(ConfigError::InvalidParameter(format!(
            "sequence length range [{min_len}, {max_len}] is empty or starts at zero"
        )));
    }
    if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less) || !lo.is_finite() || !hi.is_finite() {
        return Err(ConfigError::InvalidParameter(format!(
            "value range [{lo}, {hi}] must satisfy lo < hi"
        )));
    }
    let len = rng.u64_in(min_len as u64, max_len as u64) as usize;
    Ok((0..len).map(|_| rng.real_in(lo, hi)).collect())
}

pub fn gen_integer(rng: &mut Rng, lo: u64, hi: u64) -> Result<u64, ConfigError> {
    if lo < 2 || lo > hi {
        return Err(ConfigError::InvalidParameter(format!(
            "integer range [{lo}, {hi}] must satisfy 2 <= lo <= hi"
        )));
    }
    Ok(rng.u64_in(lo, hi))
}

fn random_operand(rng: &mut Rng) -> char {
    OPERAND_CHARS[rng.index(OPERAND_CHARS.len())] as char
}

fn push_postfix(rng: &mut Rng, internal: usize, out: &mut String) {
    if internal == 0 {
        out.push(random_operand(rng));
        return;
    }
    let left = rng.index(internal);
    let right = internal - 1 - left;
    push_postfix(rng, left, out);
    push_postfix(rng, right, out);
    out.push(OPERATORS[rng.index(OPERATORS.len())]);
}

/// Random postfix expression, one character per token, no separators.
pub fn gen_postfix(rng: &mut Rng, max_internal_nodes: usize) -> Result<String, ConfigError> {
    if max_internal_nodes == 0 {
        return Err(ConfigError::InvalidParameter(
            "max_internal_nodes must be at least 1".to_owned(),
        ));
    }
    let internal = rng.index(max_internal_nodes + 1);
    let mut out = String::with_capacity(2 * internal + 1);
    push_postfix(rng, internal, &mut out);
    Ok(out)
}

fn random_leaf(rng: &mut Rng) -> ExprAst {
    if rng.coin(0.5) {
        ExprAst::Const(rng.i64_in(0, 9))
    } else {
        ExprAst::Var(VARIABLES[rng.index(VARIABLES.len())])
    }
}

fn gen_expr_at(rng: &mut Rng, depth_left: usize, is_root: bool) -> ExprAst {
    if depth_left <= 1 || (!is_root && rng.coin(0.3)) {
        return random_leaf(rng);
    }
    let op = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div][rng.index(4)];
    let left = gen_expr_at(rng, depth_left - 1, false);
    let right = gen_expr_at(rng, depth_left - 1, false);
    ExprAst::bin(op, left, right)
}

/// Random expression tree of depth at most `max_depth` (a leaf has depth 1).
pub fn gen_expr_ast(rng: &mut Rng, max_depth: usize) -> Result<ExprAst, ConfigError> {
    if max_depth == 0 {
        return Err(ConfigError::InvalidParameter(
            "max_depth must be at least 1".to_owned(),
        ));
    }
    Ok(gen_expr_at(rng, max_depth, true))
}

pub fn gen_env(rng: &mut Rng, vars: &BTreeSet<char>) -> Env {
    let bindings: BTreeMap<char, i64> = vars.iter().map(|&v| (v, rng.i64_in(-9, 9))).collect();
    Env::new(bindings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::suites::notation::validate_postfix;

    #[test]
    fn fixed_length_sequence() {
        let mut rng = Rng::from_seed(1);
        for _ in 0..50 {
            let s = gen_real_sequence(&mut rng, 4, 4, -1.0, 1.0).unwrap();
            assert_eq!(s.len(), 4);
            assert!(s.iter().all(|x| (-1.0..=1.0).contains(x)));
        }
    }

    #[test]
    fn sequence_preconditions() {
        let mut rng = Rng::from_seed(1);
        assert!(gen_real_sequence(&mut rng, 1, 4, 1.0, 1.0).is_err());
        assert!(gen_real_sequence(&mut rng, 5, 4, 0.0, 1.0).is_err());
        assert!(gen_real_sequence(&mut rng, 0, 4, 0.0, 1.0).is_err());
    }

    #[test]
    fn sequence_reproducible() {
        let a = gen_real_sequence(&mut Rng::from_seed(99), 1, 16, -1.0, 1.0).unwrap();
        let b = gen_real_sequence(&mut Rng::from_seed(99), 1, 16, -1.0, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn integer_bounds() {
        let mut rng = Rng::from_seed(5);
        assert_eq!(gen_integer(&mut rng, 12, 12).unwrap(), 12);
        for _ in 0..1000 {
            assert!(gen_integer(&mut rng, DEFAULT_INT_LO, DEFAULT_INT_HI).unwrap() >= 2);
        }
        assert!(gen_integer(&mut rng, 1, 10).is_err());
        assert!(gen_integer(&mut rng, 10, 3).is_err());
        assert_eq!(
            gen_integer(&mut Rng::from_seed(8), 2, 1000).unwrap(),
            gen_integer(&mut Rng::from_seed(8), 2, 1000).unwrap()
        );
    }

    #[test]
    fn postfix_always_valid_and_balanced() {
        let mut rng = Rng::from_seed(2024);
        let mut saw_leaf = false;
        for _ in 0..10_000 {
            let s = gen_postfix(&mut rng, 8).unwrap();
            assert!(validate_postfix(&s), "{s}");
            let ops = s.chars().filter(|c| "+-*/".contains(*c)).count();
            assert_eq!(s.len() - ops, ops + 1);
            saw_leaf |= s.len() == 1;
        }
        assert!(saw_leaf);
        assert!(gen_postfix(&mut rng, 0).is_err());
    }

    #[test]
    fn depth_one_is_leaf() {
        let mut rng = Rng::from_seed(3);
        for _ in 0..100 {
            let t = gen_expr_ast(&mut rng, 1).unwrap();
            assert!(matches!(t, ExprAst::Const(_) | ExprAst::Var(_)));
        }
    }

    #[test]
    fn env_covers_exactly_the_variables() {
        let mut rng = Rng::from_seed(4);
        for _ in 0..200 {
            let t = gen_expr_ast(&mut rng, 4).unwrap();
            let vars = t.variables();
            let env = gen_env(&mut rng, &vars);
            assert_eq!(env.names(), vars);
            assert!(env.values().all(|v| (-9..=9).contains(&v)));
        }
    }
}
