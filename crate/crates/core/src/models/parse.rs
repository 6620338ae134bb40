//! Parser for the CLI model mini-language.
//!
//! Copulas are colon-delimited prefix expressions with fixed arity, so
//! nesting needs no brackets:
//!
//!   product | m | w
//!   frank:THETA
//!   convex:WEIGHT:C1:C2
//!   glue:THETA:C1:C2
//!
//! e.g. `glue:0.5:frank:-30:frank:30`. Marginals take comma-separated
//! parameters after the family name:
//!
//!   uniform:A,B  kumaraswamy:A,B  studentt:LOC,SCALE,DF
//!   pareto:SHAPE,SCALE  normal:MU,SIGMA

use crate::error::{Error, Result};
use crate::models::copula::CopulaModel;
use crate::models::marginal::MarginalModel;

fn parse_err(spec: &str, reason: impl Into<String>) -> Error {
    Error::ModelParse {
        spec: spec.to_string(),
        reason: reason.into(),
    }
}

fn take<'a>(tokens: &mut std::slice::Iter<'a, &'a str>, spec: &str) -> Result<&'a str> {
    tokens
        .next()
        .copied()
        .ok_or_else(|| parse_err(spec, "unexpected end of spec"))
}

fn take_number(tokens: &mut std::slice::Iter<'_, &str>, spec: &str, what: &str) -> Result<f64> {
    let tok = take(tokens, spec)?;
    tok.parse::<f64>()
        .map_err(|_| parse_err(spec, format!("expected a number for {what}, got {tok:?}")))
}

fn parse_copula_tokens(tokens: &mut std::slice::Iter<'_, &str>, spec: &str) -> Result<CopulaModel> {
    let head = take(tokens, spec)?.to_ascii_lowercase();
    match head.as_str() {
        "product" | "pi" | "independence" => Ok(CopulaModel::Product),
        "m" | "upper" | "comonotone" => Ok(CopulaModel::UpperBound),
        "w" | "lower" | "countermonotone" => Ok(CopulaModel::LowerBound),
        "frank" => CopulaModel::frank(take_number(tokens, spec, "frank theta")?),
        "convex" => {
            let weight = take_number(tokens, spec, "convex weight")?;
            let first = parse_copula_tokens(tokens, spec)?;
            let second = parse_copula_tokens(tokens, spec)?;
            CopulaModel::convex(weight, first, second)
        }
        "glue" | "glued" => {
            let theta = take_number(tokens, spec, "gluing point")?;
            let first = parse_copula_tokens(tokens, spec)?;
            let second = parse_copula_tokens(tokens, spec)?;
            CopulaModel::glued(theta, first, second)
        }
        other => Err(parse_err(spec, format!("unknown copula family {other:?}"))),
    }
}

pub fn parse_copula_spec(spec: &str) -> Result<CopulaModel> {
    let tokens: Vec<&str> = spec.split(':').map(str::trim).collect();
    let mut iter = tokens.iter();
    let model = parse_copula_tokens(&mut iter, spec)?;
    if iter.next().is_some() {
        return Err(parse_err(spec, "trailing tokens after a complete spec"));
    }
    Ok(model)
}

pub fn parse_marginal_spec(spec: &str) -> Result<MarginalModel> {
    let (name, params) = match spec.split_once(':') {
        Some((n, p)) => (n.trim().to_ascii_lowercase(), p.trim()),
        None => (spec.trim().to_ascii_lowercase(), ""),
    };
    let values: Vec<f64> = if params.is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| parse_err(spec, format!("bad parameter {tok:?}")))
            })
            .collect::<Result<_>>()?
    };
    let arity = |k: usize| -> Result<()> {
        if values.len() == k {
            Ok(())
        } else {
            Err(parse_err(
                spec,
                format!("{name} takes {k} parameters, got {}", values.len()),
            ))
        }
    };
    match name.as_str() {
        "uniform" => {
            arity(2)?;
            MarginalModel::uniform(values[0], values[1])
        }
        "kumaraswamy" => {
            arity(2)?;
            MarginalModel::kumaraswamy(values[0], values[1])
        }
        "studentt" | "t" | "student" => {
            arity(3)?;
            MarginalModel::student_t(values[0], values[1], values[2])
        }
        "pareto" => {
            arity(2)?;
            MarginalModel::pareto(values[0], values[1])
        }
        "normal" | "gaussian" => {
            arity(2)?;
            MarginalModel::normal(values[0], values[1])
        }
        other => Err(parse_err(spec, format!("unknown marginal family {other:?}"))),
    }
}
