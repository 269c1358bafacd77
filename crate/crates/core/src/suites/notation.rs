//! Postfix -> prefix -> postfix round trip.
//!
//! Tokens are single characters: alphanumeric operands and the operators
//! `+ - * /`. No separators.

use crate::generators::gen_postfix;
use crate::pipeline::{
    ExecCtx, Fault, Judgement, ModeTag, MutationDescriptor, RelationCtx, SuiteDefinition,
};
use crate::rng::Rng;

pub const VARIANTS: [&str; 2] = ["correct", "operand_swap"];
pub const DEFAULT_MAX_OPERATORS: usize = 8;

fn is_operator(c: char) -> bool {
    matches!(c, '+' | '-' | '*' | '/')
}

fn is_operand(c: char) -> bool {
    c.is_ascii_alphanumeric()
}

fn stack_valid(chars: impl Iterator<Item = char>) -> bool {
    let mut height: usize = 0;
    for c in chars {
        if is_operand(c) {
            height += 1;
        } else if is_operator(c) {
            if height < 2 {
                return false;
            }
            height -= 1;
        } else {
            return false;
        }
    }
    height == 1
}

/// Stack simulation: never underflows and ends with exactly one item.
pub fn validate_postfix(s: &str) -> bool {
    stack_valid(s.chars())
}

/// Same as [`validate_postfix`] but scanning right to left.
pub fn validate_prefix(s: &str) -> bool {
    stack_valid(s.chars().rev())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed {kind} expression `{text}`")]
pub struct NotationError {
    pub kind: &'static str,
    pub text: String,
}

/// Converts postfix to prefix. `"operand_swap"` pops the operands in the
/// wrong order.
pub fn postfix_to_prefix(s: &str, variant: &str) -> Result<String, NotationError> {
    if !validate_postfix(s) {
        return Err(NotationError {
            kind: "postfix",
            text: s.to_owned(),
        });
    }
    let swap = variant == "operand_swap";
    let mut stack: Vec<String> = Vec::new();
    for c in s.chars() {
        if is_operand(c) {
            stack.push(c.to_string());
        } else {
            let (operand1, operand2) = if swap {
                let first = stack.pop().expect("validated");
                let second = stack.pop().expect("validated");
                (first, second)
            } else {
                let second = stack.pop().expect("validated");
                let first = stack.pop().expect("validated");
                (first, second)
            };
            stack.push(format!("{c}{operand1}{operand2}"));
        }
    }
    Ok(stack.pop().expect("validated"))
}

pub fn prefix_to_postfix(s: &str) -> Result<String, NotationError> {
    if !validate_prefix(s) {
        return Err(NotationError {
            kind: "prefix",
            text: s.to_owned(),
        });
    }
    let mut stack: Vec<String> = Vec::new();
    for c in s.chars().rev() {
        if is_operand(c) {
            stack.push(c.to_string());
        } else {
            let operand1 = stack.pop().expect("validated");
            let operand2 = stack.pop().expect("validated");
            stack.push(format!("{operand1}{operand2}{c}"));
        }
    }
    Ok(stack.pop().expect("validated"))
}

fn forward(
    variant: &'static str,
) -> impl Fn(&String, &mut ExecCtx<'_>) -> Result<String, Fault> + Send + Sync {
    move |s: &String, ctx: &mut ExecCtx<'_>| {
        ctx.tick(s.len() as u64)?;
        postfix_to_prefix(s, variant).map_err(|e| Fault::failed(e.to_string()))
    }
}

// Programs receive `&M1`, which is `&String` here.
#[allow(clippy::ptr_arg)]
fn backward(s: &String, ctx: &mut ExecCtx<'_>) -> Result<String, Fault> {
    ctx.tick(s.len() as u64)?;
    prefix_to_postfix(s).map_err(|e| Fault::failed(e.to_string()))
}

/// Integrated-mode suite: the converter pair is checked by `S == Q(P(S))`.
pub fn notation_suite() -> SuiteDefinition<String, String> {
    let mut builder = SuiteDefinition::builder("notation", ModeTag::Integrated)
        .generator(|rng: &mut Rng| {
            gen_postfix(rng, DEFAULT_MAX_OPERATORS).map_err(|e| Fault::failed(e.to_string()))
        })
        .relation(
            |m1: &String, m1p: &String, _: &MutationDescriptor, _: &RelationCtx| {
                Ok(if m1 == m1p {
                    Judgement::Holds
                } else {
                    Judgement::Broken(format!("round trip changed `{m1}` into `{m1p}`"))
                })
            },
        );
    for id in VARIANTS {
        builder = builder.variant(id, forward(id), backward);
    }
    builder.build().expect("notation suite is complete")
}
