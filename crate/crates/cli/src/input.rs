//! Loading signatures, documents and formulas from arguments and files.

use std::fs;
use std::path::{Path, PathBuf};

use evlogic::evidence::Distribution;
use evlogic::formula::{parse, parse_hyp, parse_term, Polynomial};
use evlogic::io::{from_json, SignatureDoc};
use evlogic::scalar::parse_rational;
use evlogic::{Formula, HypFormula, Rational, Signature};
use serde::de::DeserializeOwned;

/// A failure before any computation: unreadable input or invalid content.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub type Input<T> = Result<T, InputError>;

pub fn read(path: &Path) -> Input<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn document<D: DeserializeOwned>(path: &Path) -> Input<D> {
    from_json(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// `NxM` for `h1..hN` and `ob1..obM`, or a JSON signature file.
pub fn signature(spec: &str) -> Input<Signature> {
    if let Some((n, m)) = spec.split_once(['x', 'X']) {
        if let (Ok(n), Ok(m)) = (n.parse::<usize>(), m.parse::<usize>()) {
            return Ok(Signature::numbered(n, m)?);
        }
    }
    let doc: SignatureDoc = document(Path::new(spec))?;
    Ok(doc.into_signature()?)
}

/// The formula text from the positional argument or from `--file`.
pub fn text(inline: &Option<String>, file: &Option<PathBuf>) -> Input<String> {
    match (inline, file) {
        (Some(t), None) => Ok(t.clone()),
        (None, Some(p)) => Ok(read(p)?.trim().to_string()),
        _ => Err(InputError(
            "give the formula either inline or with --file".into(),
        )),
    }
}

pub fn formula(text: &str, sig: &Signature) -> Input<Formula> {
    parse(text, sig).map_err(|e| InputError(format!("{e}\n  {text}\n  {}^", " ".repeat(e.pos))))
}

pub fn term(text: &str, sig: &Signature) -> Input<Polynomial> {
    parse_term(text, sig)
        .map_err(|e| InputError(format!("{e}\n  {text}\n  {}^", " ".repeat(e.pos))))
}

pub fn hyp(text: &str, sig: &Signature) -> Input<HypFormula> {
    parse_hyp(text, sig).map_err(|e| InputError(format!("{e}\n  {text}\n  {}^", " ".repeat(e.pos))))
}

pub fn rational(text: &str) -> Input<Rational> {
    Ok(parse_rational(text)?)
}

/// Comma-separated rationals.
pub fn rationals(text: &str) -> Input<Vec<Rational>> {
    text.split(',').map(rational).collect()
}

pub fn distribution(text: &str) -> Input<Distribution<Rational>> {
    Ok(Distribution::new(rationals(text)?)?)
}

pub fn observation(sig: &Signature, name: &str) -> Input<usize> {
    sig.observation_index(name)
        .ok_or_else(|| InputError(format!("unknown observation {name:?}")))
}

pub fn hypothesis(sig: &Signature, name: &str) -> Input<usize> {
    sig.hypothesis_index(name)
        .ok_or_else(|| InputError(format!("unknown hypothesis {name:?}")))
}
