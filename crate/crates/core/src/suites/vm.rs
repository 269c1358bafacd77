//! Compile/decompile suite over a tiny expression language.
//!
//! Source text is parsed and compiled to stack bytecode by a trusted compiler
//! (forward); a decompiler under test rebuilds source text (backward). The
//! relation compares execution output of both sources across sampled
//! environments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::generators::{gen_env, gen_expr_ast, VARIABLES};
use crate::pipeline::{
    Datum, ExecCtx, Fault, Judgement, ModeTag, MutationDescriptor, RelationCtx, SuiteDefinition,
};
use crate::rng::Rng;

pub const VARIANTS: [&str; 2] = ["correct", "swap_sub"];
pub const DEFAULT_MAX_DEPTH: usize = 4;
pub const ENVS_PER_TRIAL: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn from_symbol(c: char) -> Option<Self> {
        match c {
            '+' => Some(BinOp::Add),
            '-' => Some(BinOp::Sub),
            '*' => Some(BinOp::Mul),
            '/' => Some(BinOp::Div),
            _ => None,
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    fn apply(self, lhs: i64, rhs: i64) -> Result<i64, EvalError> {
        match self {
            BinOp::Add => lhs.checked_add(rhs).ok_or(EvalError::Overflow),
            BinOp::Sub => lhs.checked_sub(rhs).ok_or(EvalError::Overflow),
            BinOp::Mul => lhs.checked_mul(rhs).ok_or(EvalError::Overflow),
            // truncating division
            BinOp::Div => {
                if rhs == 0 {
                    Err(EvalError::DivByZero)
                } else {
                    lhs.checked_div(rhs).ok_or(EvalError::Overflow)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ExprAst {
    Const(i64),
    Var(char),
    BinOp(BinOp, Box<ExprAst>, Box<ExprAst>),
}

impl ExprAst {
    pub fn bin(op: BinOp, left: ExprAst, right: ExprAst) -> Self {
        ExprAst::BinOp(op, Box::new(left), Box::new(right))
    }

    pub fn depth(&self) -> usize {
        match self {
            ExprAst::Const(_) | ExprAst::Var(_) => 1,
            ExprAst::BinOp(_, l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    pub fn variables(&self) -> BTreeSet<char> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<char>) {
        match self {
            ExprAst::Const(_) => {}
            ExprAst::Var(v) => {
                out.insert(*v);
            }
            ExprAst::BinOp(_, l, r) => {
                l.collect_vars(out);
                r.collect_vars(out);
            }
        }
    }

    pub fn contains_op(&self, pred: impl Fn(BinOp) -> bool + Copy) -> bool {
        match self {
            ExprAst::Const(_) | ExprAst::Var(_) => false,
            ExprAst::BinOp(op, l, r) => pred(*op) || l.contains_op(pred) || r.contains_op(pred),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Env {
    bindings: BTreeMap<char, i64>,
}

impl Env {
    pub fn new(bindings: BTreeMap<char, i64>) -> Self {
        Self { bindings }
    }

    pub fn from_pairs(pairs: &[(char, i64)]) -> Self {
        Self::new(pairs.iter().copied().collect())
    }

    pub fn get(&self, name: char) -> Option<i64> {
        self.bindings.get(&name).copied()
    }

    pub fn names(&self) -> BTreeSet<char> {
        self.bindings.keys().copied().collect()
    }

    pub fn values(&self) -> impl Iterator<Item = i64> + '_ {
        self.bindings.values().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivByZero,
    #[error("unbound variable `{0}`")]
    UnboundVariable(char),
    #[error("stack underflow")]
    StackUnderflow,
    #[error("integer overflow")]
    Overflow,
}

impl EvalError {
    /// Errors of the same kind compare equal regardless of payload.
    pub fn same_kind(&self, other: &EvalError) -> bool {
        std::mem::discriminant(self) == std::mem::discriminant(other)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {position}: {message}")]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            chars: src
                .char_indices()
                .filter(|(_, c)| !c.is_whitespace())
                .collect(),
            pos: 0,
            src,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn offset(&self) -> usize {
        self.chars.get(self.pos).map_or(self.src.len(), |&(i, _)| i)
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.offset(),
            message: message.into(),
        }
    }

    fn expr(&mut self, min_prec: u8) -> Result<ExprAst, ParseError> {
        let mut lhs = self.atom()?;
        while let Some(op) = self.peek().and_then(BinOp::from_symbol) {
            if op.precedence() < min_prec {
                break;
            }
            self.pos += 1;
            // left associative: the right operand binds strictly tighter
            let rhs = self.expr(op.precedence() + 1)?;
            lhs = ExprAst::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        match self.peek() {
            Some(c @ '0'..='9') => {
                self.pos += 1;
                Ok(ExprAst::Const(i64::from(c as u8 - b'0')))
            }
            Some(c @ 'a'..='e') => {
                self.pos += 1;
                Ok(ExprAst::Var(c))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr(1)?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses infix source over digits `0-9`, variables `a-e`, `+ - * /` and
/// parentheses. `*` and `/` bind tighter than `+` and `-`; all are left
/// associative.
pub fn parse_infix(src: &str) -> Result<ExprAst, ParseError> {
    let mut parser = Parser::new(src);
    let ast = parser.expr(1)?;
    if let Some(c) = parser.peek() {
        return Err(parser.error(format!("unexpected `{c}` after expression")));
    }
    Ok(ast)
}

fn write_infix(ast: &ExprAst, out: &mut String) {
    match ast {
        ExprAst::Const(k) => out.push_str(&k.to_string()),
        ExprAst::Var(v) => out.push(*v),
        ExprAst::BinOp(op, l, r) => {
            let wrap = |child: &ExprAst, needs: &dyn Fn(u8) -> bool, out: &mut String| match child {
                ExprAst::BinOp(cop, _, _) if needs(cop.precedence()) => {
                    out.push('(');
                    write_infix(child, out);
                    out.push(')');
                }
                _ => write_infix(child, out),
            };
            let p = op.precedence();
            wrap(l, &|cp| cp < p, out);
            out.push(op.symbol());
            wrap(r, &|cp| cp <= p, out);
        }
    }
}

/// Minimally parenthesized infix rendering.
pub fn print_infix(ast: &ExprAst) -> String {
    let mut out = String::new();
    write_infix(ast, &mut out);
    out
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_infix(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instr {
    Push(i64),
    Load(char),
    Add,
    Sub,
    Mul,
    Div,
}

impl Instr {
    fn binop(self) -> Option<BinOp> {
        match self {
            Instr::Add => Some(BinOp::Add),
            Instr::Sub => Some(BinOp::Sub),
            Instr::Mul => Some(BinOp::Mul),
            Instr::Div => Some(BinOp::Div),
            Instr::Push(_) | Instr::Load(_) => None,
        }
    }

    fn from_binop(op: BinOp) -> Self {
        match op {
            BinOp::Add => Instr::Add,
            BinOp::Sub => Instr::Sub,
            BinOp::Mul => Instr::Mul,
            BinOp::Div => Instr::Div,
        }
    }
}

impl fmt::Display for Instr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instr::Push(k) => write!(f, "PUSH {k}"),
            Instr::Load(v) => write!(f, "LOAD {v}"),
            Instr::Add => f.write_str("ADD"),
            Instr::Sub => f.write_str("SUB"),
            Instr::Mul => f.write_str("MUL"),
            Instr::Div => f.write_str("DIV"),
        }
    }
}

/// Stack-machine program.
///
/// Text form: one instruction per line, `PUSH <int>`, `LOAD <var>`, `ADD`,
/// `SUB`, `MUL`, `DIV`, integers in decimal.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bytecode(pub Vec<Instr>);

impl Bytecode {
    /// True iff the stack never underflows and ends at height 1.
    pub fn is_balanced(&self) -> bool {
        let mut height: usize = 0;
        for instr in &self.0 {
            match instr {
                Instr::Push(_) | Instr::Load(_) => height += 1,
                _ => {
                    if height < 2 {
                        return false;
                    }
                    height -= 1;
                }
            }
        }
        height == 1
    }
}

impl fmt::Display for Bytecode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for instr in &self.0 {
            writeln!(f, "{instr}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad bytecode at line {line}: {message}")]
pub struct BytecodeParseError {
    pub line: usize,
    pub message: String,
}

impl FromStr for Bytecode {
    type Err = BytecodeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut out = Vec::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| BytecodeParseError {
                line: i + 1,
                message,
            };
            let mut parts = line.split_whitespace();
            let mnemonic = parts.next().unwrap_or_default();
            let operand = parts.next();
            if parts.next().is_some() {
                return Err(err(format!("trailing tokens in `{line}`")));
            }
            let instr = match (mnemonic, operand) {
                ("PUSH", Some(k)) => {
                    Instr::Push(k.parse().map_err(|_| err(format!("bad integer `{k}`")))?)
                }
                ("LOAD", Some(v)) => {
                    let mut cs = v.chars();
                    match (cs.next(), cs.next()) {
                        (Some(c), None) => Instr::Load(c),
                        _ => return Err(err(format!("bad variable `{v}`"))),
                    }
                }
                ("ADD", None) => Instr::Add,
                ("SUB", None) => Instr::Sub,
                ("MUL", None) => Instr::Mul,
                ("DIV", None) => Instr::Div,
                _ => return Err(err(format!("unknown instruction `{line}`"))),
            };
            out.push(instr);
        }
        Ok(Bytecode(out))
    }
}

impl Datum for Bytecode {
    fn render(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        format!("[{}]", parts.join(", "))
    }
}

fn emit(ast: &ExprAst, out: &mut Vec<Instr>) {
    match ast {
        ExprAst::Const(k) => out.push(Instr::Push(*k)),
        ExprAst::Var(v) => out.push(Instr::Load(*v)),
        ExprAst::BinOp(op, l, r) => {
            emit(l, out);
            emit(r, out);
            out.push(Instr::from_binop(*op));
        }
    }
}

/// Post-order code generation.
pub fn compile(ast: &ExprAst) -> Bytecode {
    let mut out = Vec::new();
    emit(ast, &mut out);
    Bytecode(out)
}

pub fn run_vm(code: &Bytecode, env: &Env) -> Result<i64, EvalError> {
    let mut stack: Vec<i64> = Vec::with_capacity(code.0.len());
    for instr in &code.0 {
        match *instr {
            Instr::Push(k) => stack.push(k),
            Instr::Load(v) => stack.push(env.get(v).ok_or(EvalError::UnboundVariable(v))?),
            other => {
                let op = other.binop().expect("arithmetic instruction");
                let rhs = stack.pop().ok_or(EvalError::StackUnderflow)?;
                let lhs = stack.pop().ok_or(EvalError::StackUnderflow)?;
                stack.push(op.apply(lhs, rhs)?);
            }
        }
    }
    match (stack.pop(), stack.is_empty()) {
        (Some(v), true) => Ok(v),
        _ => Err(EvalError::StackUnderflow),
    }
}

/// Reference tree-walking evaluator with the same operator semantics as
/// [`run_vm`].
pub fn eval_ast(ast: &ExprAst, env: &Env) -> Result<i64, EvalError> {
    match ast {
        ExprAst::Const(k) => Ok(*k),
        ExprAst::Var(v) => env.get(*v).ok_or(EvalError::UnboundVariable(*v)),
        ExprAst::BinOp(op, l, r) => {
            let lhs = eval_ast(l, env)?;
            let rhs = eval_ast(r, env)?;
            op.apply(lhs, rhs)
        }
    }
}

/// Rebuilds the expression tree by symbolic stack execution.
pub fn decompile_ast(code: &Bytecode, variant: &str) -> Result<ExprAst, EvalError> {
    let swap = variant == "swap_sub";
    let mut stack: Vec<ExprAst> = Vec::new();
    for instr in &code.0 {
        match *instr {
            Instr::Push(k) => stack.push(ExprAst::Const(k)),
            Instr::Load(v) => stack.push(ExprAst::Var(v)),
            other => {
                let op = other.binop().expect("arithmetic instruction");
                let rhs = stack.pop().ok_or(EvalError::StackUnderflow)?;
                let lhs = stack.pop().ok_or(EvalError::StackUnderflow)?;
                let node = if swap && matches!(op, BinOp::Sub | BinOp::Div) {
                    ExprAst::bin(op, rhs, lhs)
                } else {
                    ExprAst::bin(op, lhs, rhs)
                };
                stack.push(node);
            }
        }
    }
    match (stack.pop(), stack.is_empty()) {
        (Some(ast), true) => Ok(ast),
        _ => Err(EvalError::StackUnderflow),
    }
}

/// Decompiles to infix source. `"swap_sub"` reverses the operands of SUB and
/// DIV.
pub fn decompile(code: &Bytecode, variant: &str) -> Result<String, EvalError> {
    decompile_ast(code, variant).map(|ast| print_infix(&ast))
}

fn outcomes_agree(a: &Result<i64, EvalError>, b: &Result<i64, EvalError>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => x == y,
        (Err(x), Err(y)) => x.same_kind(y),
        _ => false,
    }
}

fn show(outcome: &Result<i64, EvalError>) -> String {
    match outcome {
        Ok(v) => v.to_string(),
        Err(e) => e.to_string(),
    }
}

/// Execution-output relation: both sources must evaluate identically (equal
/// values or same error kind) in every sampled environment.
pub fn execution_relation(
    m1: &str,
    m1_prime: &str,
    envs: usize,
    seed: u64,
) -> Result<Judgement, Fault> {
    let original = parse_infix(m1)
        .map_err(|e| Fault::failed(format!("original source does not parse: {e}")))?;
    let recovered = match parse_infix(m1_prime) {
        Ok(t) => t,
        Err(e) => {
            return Ok(Judgement::Broken(format!(
                "decompiled source does not parse: {e}"
            )))
        }
    };
    let all_vars: BTreeSet<char> = VARIABLES.iter().copied().collect();
    let mut rng = Rng::from_seed(seed);
    for _ in 0..envs {
        let env = gen_env(&mut rng, &all_vars);
        let a = eval_ast(&original, &env);
        let b = eval_ast(&recovered, &env);
        if !outcomes_agree(&a, &b) {
            return Ok(Judgement::Broken(format!(
                "outputs differ under {env:?}: {} vs {}",
                show(&a),
                show(&b)
            )));
        }
    }
    Ok(Judgement::Holds)
}

// Programs receive `&M1`, which is `&String` here.
#[allow(clippy::ptr_arg)]
fn compile_source(src: &String, ctx: &mut ExecCtx<'_>) -> Result<Bytecode, Fault> {
    ctx.tick(src.len() as u64)?;
    let ast = parse_infix(src).map_err(|e| Fault::failed(e.to_string()))?;
    Ok(compile(&ast))
}

fn decompiler(
    variant: &'static str,
) -> impl Fn(&Bytecode, &mut ExecCtx<'_>) -> Result<String, Fault> + Send + Sync {
    move |code: &Bytecode, ctx: &mut ExecCtx<'_>| {
        ctx.tick(code.0.len() as u64)?;
        decompile(code, variant).map_err(|e| Fault::failed(e.to_string()))
    }
}

/// Backward-mode suite: trusted compiler, decompiler under test.
pub fn vm_suite() -> SuiteDefinition<String, Bytecode> {
    let mut builder = SuiteDefinition::builder("vm", ModeTag::Backward)
        .generator(|rng: &mut Rng| {
            let ast =
                gen_expr_ast(rng, DEFAULT_MAX_DEPTH).map_err(|e| Fault::failed(e.to_string()))?;
            Ok(print_infix(&ast))
        })
        .relation(
            |m1: &String, m1p: &String, _: &MutationDescriptor, ctx: &RelationCtx| {
                execution_relation(m1, m1p, ENVS_PER_TRIAL, ctx.seed)
            },
        );
    for id in VARIANTS {
        builder = builder.variant(id, compile_source, decompiler(id));
    }
    builder.build().expect("vm suite is complete")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{Forced, SuiteConfig, Verdict};

    fn c(k: i64) -> ExprAst {
        ExprAst::Const(k)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_infix("(1+2)*4").unwrap(),
            ExprAst::bin(BinOp::Mul, ExprAst::bin(BinOp::Add, c(1), c(2)), c(4))
        );
        assert_eq!(
            parse_infix("1+2*4").unwrap(),
            ExprAst::bin(BinOp::Add, c(1), ExprAst::bin(BinOp::Mul, c(2), c(4)))
        );
        assert_eq!(
            parse_infix("1-2-3").unwrap(),
            ExprAst::bin(BinOp::Sub, ExprAst::bin(BinOp::Sub, c(1), c(2)), c(3))
        );
        let err = parse_infix("1+").unwrap_err();
        assert_eq!(err.position, 2);
        assert!(parse_infix("").is_err());
        assert!(parse_infix("(1").is_err());
        assert!(parse_infix("1 2").is_err());
        assert!(parse_infix("12").is_err());
        assert!(parse_infix("f").is_err());
        assert_eq!(
            parse_infix(" ( a + b ) ").unwrap(),
            ExprAst::bin(BinOp::Add, ExprAst::Var('a'), ExprAst::Var('b'))
        );
    }

    #[test]
    fn print_examples() {
        assert_eq!(
            print_infix(&ExprAst::bin(
                BinOp::Mul,
                ExprAst::bin(BinOp::Add, c(1), c(2)),
                c(4)
            )),
            "(1+2)*4"
        );
        assert_eq!(print_infix(&c(7)), "7");
        assert_eq!(
            print_infix(&ExprAst::bin(
                BinOp::Sub,
                c(5),
                ExprAst::bin(BinOp::Sub, c(3), c(1))
            )),
            "5-(3-1)"
        );
        assert_eq!(
            print_infix(&ExprAst::bin(
                BinOp::Add,
                c(5),
                ExprAst::bin(BinOp::Add, c(3), c(1))
            )),
            "5+(3+1)"
        );
        assert_eq!(
            print_infix(&ExprAst::bin(
                BinOp::Sub,
                ExprAst::bin(BinOp::Sub, c(5), c(3)),
                c(1)
            )),
            "5-3-1"
        );
    }

    #[test]
    fn compile_examples() {
        use Instr::*;
        assert_eq!(
            compile(&parse_infix("3*4").unwrap()).0,
            vec![Push(3), Push(4), Mul]
        );
        assert_eq!(compile(&parse_infix("a").unwrap()).0, vec![Load('a')]);
        assert_eq!(
            compile(&parse_infix("(1+2)*4").unwrap()).0,
            vec![Push(1), Push(2), Add, Push(4), Mul]
        );
    }

    #[test]
    fn vm_examples() {
        use Instr::*;
        let empty = Env::from_pairs(&[]);
        assert_eq!(
            run_vm(&Bytecode(vec![Push(8), Push(4), Add]), &empty),
            Ok(12)
        );
        assert_eq!(
            run_vm(&Bytecode(vec![Push(1), Push(0), Div]), &empty),
            Err(EvalError::DivByZero)
        );
        assert_eq!(
            run_vm(&Bytecode(vec![Load('q')]), &empty),
            Err(EvalError::UnboundVariable('q'))
        );
        assert_eq!(
            run_vm(&Bytecode(vec![Push(1), Add]), &empty),
            Err(EvalError::StackUnderflow)
        );
        assert_eq!(
            run_vm(&Bytecode(vec![Push(1), Push(1)]), &empty),
            Err(EvalError::StackUnderflow)
        );
        let env = Env::from_pairs(&[('a', 3), ('b', -4)]);
        assert_eq!(
            run_vm(&compile(&parse_infix("(1+2)*4").unwrap()), &env),
            Ok(12)
        );
        assert_eq!(
            run_vm(&Bytecode(vec![Push(-7), Push(2), Div]), &empty),
            Ok(-3)
        );
    }

    #[test]
    fn eval_examples() {
        let env = Env::from_pairs(&[('a', 3), ('b', 5)]);
        assert_eq!(eval_ast(&parse_infix("(1+2)*4").unwrap(), &env), Ok(12));
        assert_eq!(eval_ast(&parse_infix("a-b").unwrap(), &env), Ok(-2));
        assert_eq!(
            eval_ast(&parse_infix("7/(2-2)").unwrap(), &env),
            Err(EvalError::DivByZero)
        );
        assert_eq!(
            eval_ast(&parse_infix("c").unwrap(), &env),
            Err(EvalError::UnboundVariable('c'))
        );
    }

    #[test]
    fn decompile_examples() {
        use Instr::*;
        let code = Bytecode(vec![Push(1), Push(2), Add, Push(4), Mul]);
        assert_eq!(decompile(&code, "correct").unwrap(), "(1+2)*4");
        assert_eq!(
            decompile(&Bytecode(vec![Push(5), Push(3), Sub]), "swap_sub").unwrap(),
            "3-5"
        );
        for v in VARIANTS {
            assert_eq!(decompile(&Bytecode(vec![Load('a')]), v).unwrap(), "a");
        }
        assert_eq!(
            decompile(&Bytecode(vec![Add]), "correct"),
            Err(EvalError::StackUnderflow)
        );
    }

    #[test]
    fn bytecode_text_form() {
        let code = compile(&parse_infix("(a+2)/b").unwrap());
        let text = code.to_string();
        assert_eq!(text, "LOAD a\nPUSH 2\nADD\nLOAD b\nDIV\n");
        assert_eq!(text.parse::<Bytecode>().unwrap(), code);
        assert!(code.is_balanced());
        assert!("PUSH x".parse::<Bytecode>().is_err());
        assert!("JMP 3".parse::<Bytecode>().is_err());
        assert!(!Bytecode(vec![Instr::Add]).is_balanced());
    }

    fn verdict_for(src: &str, variant: &str) -> Verdict {
        let suite = vm_suite();
        let cfg = SuiteConfig::default().variant(variant);
        suite.execute(&cfg, 0, 1, Forced::input(src.to_owned())).1
    }

    #[test]
    fn suite_examples() {
        assert_eq!(verdict_for("(1+2)*4", "correct"), Verdict::Pass);
        assert!(verdict_for("5-3", "swap_sub").is_violation());
        assert_eq!(verdict_for("a+b", "swap_sub"), Verdict::Pass);
        assert_eq!(verdict_for("a-a", "swap_sub"), Verdict::Pass);
    }
}
