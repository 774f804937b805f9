//! Arithmetic rules over `n`, such as `n^2` or `sqrt(n)*ln(n)`.

use std::fmt;
use std::str::FromStr;

use evalexpr::{
    build_operator_tree, ContextWithMutableFunctions, ContextWithMutableVariables,
    DefaultNumericTypes, EvalexprError, Function, HashMapContext, Node, Value,
};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A parsed expression in one variable `n`.
///
/// Supports `+ - * / ^`, parentheses, decimal literals and the functions
/// `sqrt`, `ln` (alias `log`) and `log2`. `n` is bound as a float, so
/// `n/2` is real division; a literal-only quotient like `1/2` is integer division.
#[derive(Clone, Debug)]
pub struct Expr {
    source: String,
    tree: Node<DefaultNumericTypes>,
}

type Ctx = HashMapContext<DefaultNumericTypes>;

fn unary(f: fn(f64) -> f64) -> Function<DefaultNumericTypes> {
    Function::new(move |arg: &Value<DefaultNumericTypes>| Ok(Value::Float(f(arg.as_number()?))))
}

fn context(n: f64) -> Result<Ctx, EvalexprError<DefaultNumericTypes>> {
    let mut ctx = Ctx::new();
    ctx.set_value("n".into(), Value::Float(n))?;
    ctx.set_function("sqrt".into(), unary(f64::sqrt))?;
    ctx.set_function("ln".into(), unary(f64::ln))?;
    ctx.set_function("log".into(), unary(f64::ln))?;
    ctx.set_function("log2".into(), unary(f64::log2))?;
    Ok(ctx)
}

impl Expr {
    pub fn parse(source: &str) -> Result<Self> {
        let tree = build_operator_tree::<DefaultNumericTypes>(source)
            .map_err(|e| Error::config(format!("cannot parse `{source}`: {e}")))?;
        if let Some(v) = tree.iter_variable_identifiers().find(|v| *v != "n") {
            return Err(Error::config(format!(
                "`{source}` uses unknown variable `{v}`; only n is bound"
            )));
        }
        if let Some(f) = tree
            .iter_function_identifiers()
            .find(|f| !matches!(*f, "sqrt" | "ln" | "log" | "log2"))
        {
            return Err(Error::config(format!(
                "`{source}` calls unknown function `{f}`"
            )));
        }
        // some malformed input (a dangling operator) only surfaces on evaluation
        let ctx = context(16.0).map_err(|e| Error::config(e.to_string()))?;
        tree.eval_number_with_context(&ctx)
            .map_err(|e| Error::config(format!("cannot parse `{source}`: {e}")))?;
        Ok(Expr {
            source: source.trim().to_string(),
            tree,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Value at `n`; must be finite.
    pub fn eval(&self, n: usize) -> Result<f64> {
        let ctx = context(n as f64).map_err(|e| Error::config(e.to_string()))?;
        let v = self
            .tree
            .eval_number_with_context(&ctx)
            .map_err(|e| Error::config(format!("evaluating `{}` at n={n}: {e}", self.source)))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::config(format!(
                "`{}` is not finite at n={n}",
                self.source
            )))
        }
    }

    /// Value at `n` rounded to a whole iteration count of at least 1.
    pub fn eval_count(&self, n: usize) -> Result<u64> {
        let v = self.eval(n)?.round();
        if v < 1.0 || v > u64::MAX as f64 {
            return Err(Error::config(format!(
                "`{}` gives {v} at n={n}; need a count >= 1",
                self.source
            )));
        }
        Ok(v as u64)
    }
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl Serialize for Expr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.source)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Expr::parse(&s).map_err(serde::de::Error::custom)
    }
}
