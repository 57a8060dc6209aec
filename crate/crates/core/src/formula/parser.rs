//! Recursive-descent parser for the concrete syntax documented in
//! `docs/GRAMMAR.md`.
//!
//! Arithmetic is expanded into a flat sum of monomials while parsing:
//! products distribute over sums, integer powers are multiplied out, and
//! constant factors fold into the coefficient. Constant monomials are moved
//! to the bound side of the comparison.

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::lexer::{is_reserved, tokenize, Spanned, Tok};
use super::{
    BasicTerm, Factor, Formula, HypFormula, Inequality, Monomial, Polynomial, Rational, Signature,
};

const MAX_MONOMIALS: usize = 4096;
const MAX_VAR_EXPONENT: u32 = 16;
const MAX_CONST_EXPONENT: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("{0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("at byte {pos}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: usize,
}

impl ParseError {
    pub(super) fn new(kind: ParseErrorKind, pos: usize) -> Self {
        ParseError { kind, pos }
    }
}

type PResult<T> = Result<T, ParseError>;

/// Parses a formula over `sig`.
pub fn parse(text: &str, sig: &Signature) -> PResult<Formula> {
    let mut p = Parser::new(text, sig)?;
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses a hypothesis formula (the argument of `Pr0`, `Pr`, `we`).
pub fn parse_hyp(text: &str, sig: &Signature) -> PResult<HypFormula> {
    let mut p = Parser::new(text, sig)?;
    let f = p.hyp()?;
    p.expect_end()?;
    Ok(f)
}

/// Parses a polynomial term. A nonzero constant summand is rejected since
/// terms carry no constant part.
pub fn parse_term(text: &str, sig: &Signature) -> PResult<Polynomial> {
    let mut p = Parser::new(text, sig)?;
    let e = p.expr()?;
    p.expect_end()?;
    let (poly, constant) = e.split();
    if !constant.is_zero() {
        return Err(ParseError::new(
            ParseErrorKind::Shape("a polynomial term cannot have a constant summand".into()),
            0,
        ));
    }
    Ok(poly)
}

/// Sum of monomials with possibly empty factor lists (constants).
#[derive(Debug, Clone)]
struct Expr(Vec<(Rational, Vec<Factor>)>);

impl Expr {
    fn constant(q: Rational) -> Self {
        Expr(vec![(q, Vec::new())])
    }

    fn factor(f: Factor) -> Self {
        Expr(vec![(Rational::one(), vec![f])])
    }

    fn as_constant(&self) -> Option<Rational> {
        if self.0.iter().all(|(_, fs)| fs.is_empty()) {
            Some(self.0.iter().map(|(c, _)| c.clone()).sum())
        } else {
            None
        }
    }

    fn neg(self) -> Self {
        Expr(self.0.into_iter().map(|(c, f)| (-c, f)).collect())
    }

    fn add(mut self, other: Expr) -> Self {
        self.0.extend(other.0);
        self
    }

    fn mul(&self, other: &Expr, pos: usize) -> PResult<Expr> {
        if self.0.len() * other.0.len() > MAX_MONOMIALS {
            return Err(ParseError::new(
                ParseErrorKind::Shape("product expands to too many monomials".into()),
                pos,
            ));
        }
        let mut out = Vec::with_capacity(self.0.len() * other.0.len());
        for (c1, f1) in &self.0 {
            for (c2, f2) in &other.0 {
                let mut fs = f1.clone();
                fs.extend(f2.iter().cloned());
                out.push((c1 * c2, fs));
            }
        }
        Ok(Expr(out))
    }

    /// Monomials in order, constants folded into one number.
    fn split(self) -> (Polynomial, Rational) {
        let mut constant = Rational::zero();
        let mut monomials = Vec::new();
        for (c, fs) in self.0 {
            if fs.is_empty() {
                constant += c;
            } else {
                monomials.push(Monomial::new(c, fs));
            }
        }
        (Polynomial::new(monomials), constant)
    }
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    end: usize,
    sig: &'a Signature,
}

#[derive(Clone, Copy)]
enum Cmp {
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
}

impl<'a> Parser<'a> {
    fn new(text: &str, sig: &'a Signature) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            end: text.len(),
            sig,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |s| s.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(
            ParseErrorKind::Syntax(msg.into()),
            self.here(),
        ))
    }

    fn shape<T>(&self, msg: impl Into<String>, pos: usize) -> PResult<T> {
        Err(ParseError::new(ParseErrorKind::Shape(msg.into()), pos))
    }

    fn found(&self) -> String {
        self.peek()
            .map_or_else(|| "end of input".to_string(), Tok::describe)
    }

    fn expect(&mut self, t: Tok, what: &str) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            self.syntax(format!("expected {what}, found {}", self.found()))
        }
    }

    fn expect_end(&self) -> PResult<()> {
        if self.peek().is_some() {
            self.syntax(format!("unexpected {}", self.found()))
        } else {
            Ok(())
        }
    }

    // ---- formulas ----

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.implication()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.implication()?;
            return Ok(lhs.clone().implies(rhs.clone()).and(rhs.implies(lhs)));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.implication()?;
            return Ok(lhs.implies(rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Or) {
            let rhs = self.conjunction()?;
            f = f.or(rhs);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::And) {
            let rhs = self.unary()?;
            f = f.and(rhs);
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat(&Tok::Not) {
            return Ok(self.unary()?.not());
        }
        if let Some(Tok::Ident(w)) = self.peek() {
            if w == "forall" || w == "exists" {
                let universal = w == "forall";
                self.bump();
                let var = self.binder()?;
                let body = self.unary()?;
                return Ok(if universal {
                    Formula::forall(var, body)
                } else {
                    Formula::exists(var, body)
                });
            }
        }
        self.primary()
    }

    fn binder(&mut self) -> PResult<String> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Ident(v)) if !is_reserved(&v) => {
                if self.sig.contains(&v) {
                    self.shape(format!("{v:?} is a signature name, not a variable"), pos)
                } else {
                    Ok(v)
                }
            }
            _ => Err(ParseError::new(
                ParseErrorKind::Syntax("expected a variable after quantifier".into()),
                pos,
            )),
        }
    }

    fn primary(&mut self) -> PResult<Formula> {
        let start = self.pos;
        if let Some(Tok::Ident(name)) = self.peek() {
            let arithmetic_follows = matches!(
                self.peek_at(1),
                Some(
                    Tok::Plus
                        | Tok::Minus
                        | Tok::Star
                        | Tok::Caret
                        | Tok::Ge
                        | Tok::Le
                        | Tok::Gt
                        | Tok::Lt
                        | Tok::Eq
                )
            );
            if !is_reserved(name) && !arithmetic_follows {
                let name = name.clone();
                let pos = self.here();
                self.bump();
                if self.sig.hypothesis_index(&name).is_some() {
                    return Ok(Formula::Hyp(name));
                }
                if self.sig.observation_index(&name).is_some() {
                    return Ok(Formula::Obs(name));
                }
                return Err(ParseError::new(
                    ParseErrorKind::UnknownIdentifier(name),
                    pos,
                ));
            }
            if name == "true" {
                return self.shape("`true` is only allowed inside Pr0, Pr and we", self.here());
            }
        }
        let cmp_err = match self.comparison() {
            Ok(f) => return Ok(f),
            Err(e) => e,
        };
        if self.toks.get(start).map(|s| &s.tok) == Some(&Tok::LParen) {
            self.pos = start + 1;
            let paren = self.formula().and_then(|f| {
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            });
            match paren {
                Ok(f) => return Ok(f),
                Err(e) if e.pos > cmp_err.pos => return Err(e),
                Err(_) => {}
            }
        }
        Err(cmp_err)
    }

    fn comparison(&mut self) -> PResult<Formula> {
        let lhs = self.expr()?;
        let op = match self.peek() {
            Some(Tok::Ge) => Cmp::Ge,
            Some(Tok::Le) => Cmp::Le,
            Some(Tok::Gt) => Cmp::Gt,
            Some(Tok::Lt) => Cmp::Lt,
            Some(Tok::Eq) => Cmp::Eq,
            _ => {
                return self.syntax(format!(
                    "expected a comparison operator, found {}",
                    self.found()
                ))
            }
        };
        self.bump();
        let rhs = self.expr()?;
        let (lp, lc) = lhs.split();
        let (rp, rc) = rhs.split();
        let ge = || {
            let mut m = lp.monomials.clone();
            m.extend(rp.negated().monomials);
            Inequality::new(Polynomial::new(m), &rc - &lc)
        };
        let le = || {
            let mut m = lp.negated().monomials;
            m.extend(rp.monomials.iter().cloned());
            Inequality::new(Polynomial::new(m), &lc - &rc)
        };
        Ok(match op {
            Cmp::Ge => Formula::Ineq(ge()),
            Cmp::Le => Formula::Ineq(le()),
            Cmp::Gt => Formula::Ineq(le()).not(),
            Cmp::Lt => Formula::Ineq(ge()).not(),
            Cmp::Eq => Formula::Ineq(ge()).and(Formula::Ineq(le())),
        })
    }

    // ---- arithmetic ----

    fn expr(&mut self) -> PResult<Expr> {
        let negate = if self.eat(&Tok::Minus) {
            true
        } else {
            self.eat(&Tok::Plus);
            false
        };
        let mut e = self.product()?;
        if negate {
            e = e.neg();
        }
        loop {
            if self.eat(&Tok::Plus) {
                e = e.add(self.product()?);
            } else if self.eat(&Tok::Minus) {
                e = e.add(self.product()?.neg());
            } else {
                return Ok(e);
            }
        }
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut e = self.power()?;
        while self.peek() == Some(&Tok::Star) {
            let pos = self.here();
            self.bump();
            let rhs = self.power()?;
            e = e.mul(&rhs, pos)?;
        }
        Ok(e)
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.operand()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let pos = self.here();
        self.bump();
        let negative = self.eat(&Tok::Minus);
        let exp = match self.bump() {
            Some(Tok::Num(n)) => n,
            _ => return self.syntax("expected an integer exponent"),
        };
        if let Some(c) = base.as_constant() {
            let e = match exp.to_u64() {
                Some(e) if e <= MAX_CONST_EXPONENT => e,
                _ => return self.shape("exponent too large", pos),
            };
            if negative && c.is_zero() {
                return self.shape("zero raised to a negative power", pos);
            }
            let mut value = pow_rational(&c, e);
            if negative {
                value = value.recip();
            }
            return Ok(Expr::constant(value));
        }
        if negative {
            return self.shape("negative exponents are only allowed on numbers", pos);
        }
        let e = match exp.to_u32() {
            Some(e) if e <= MAX_VAR_EXPONENT => e,
            _ => return self.shape("exponent too large for a non-constant base", pos),
        };
        let mut out = Expr::constant(Rational::one());
        for _ in 0..e {
            out = out.mul(&base, pos)?;
        }
        Ok(out)
    }

    fn operand(&mut self) -> PResult<Expr> {
        let pos = self.here();
        match self.bump() {
            Some(Tok::Num(n)) => {
                if self.peek() == Some(&Tok::Slash) {
                    self.bump();
                    let dpos = self.here();
                    match self.bump() {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            Ok(Expr::constant(Rational::new(n, d)))
                        }
                        Some(Tok::Num(_)) => self.shape("division by zero", dpos),
                        _ => self.shape(
                            "`/` is only allowed between two integer literals; \
                             cross-multiply to clear denominators",
                            dpos,
                        ),
                    }
                } else {
                    Ok(Expr::constant(Rational::from_integer(n)))
                }
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Ident(w)) => match w.as_str() {
                "Pr0" | "Pr" => {
                    self.expect(Tok::LParen, "`(`")?;
                    let rho = self.hyp()?;
                    self.expect(Tok::RParen, "`)`")?;
                    let t = if w == "Pr0" {
                        BasicTerm::Prior(rho)
                    } else {
                        BasicTerm::Posterior(rho)
                    };
                    Ok(Expr::factor(Factor::Basic(t)))
                }
                "we" => {
                    self.expect(Tok::LParen, "`(`")?;
                    let opos = self.here();
                    let ob = match self.bump() {
                        Some(Tok::Ident(o)) => o,
                        _ => {
                            return self.shape("first argument of we must be an observation", opos)
                        }
                    };
                    if self.sig.observation_index(&ob).is_none() {
                        if self.sig.hypothesis_index(&ob).is_some() {
                            return self.shape(
                                format!("first argument of we must be an observation, {ob:?} is a hypothesis"),
                                opos,
                            );
                        }
                        return Err(ParseError::new(ParseErrorKind::UnknownIdentifier(ob), opos));
                    }
                    self.expect(Tok::Comma, "`,`")?;
                    let rho = self.hyp()?;
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Expr::factor(Factor::Basic(BasicTerm::Weight(ob, rho))))
                }
                "true" | "forall" | "exists" => {
                    self.shape(format!("`{w}` cannot appear in an arithmetic term"), pos)
                }
                _ => {
                    if self.sig.contains(&w) {
                        self.shape(
                            format!("{w:?} is a proposition and cannot be used as a number"),
                            pos,
                        )
                    } else {
                        Ok(Expr::factor(Factor::Var(w)))
                    }
                }
            },
            Some(t) => Err(ParseError::new(
                ParseErrorKind::Syntax(format!("expected a term, found {}", t.describe())),
                pos,
            )),
            None => Err(ParseError::new(
                ParseErrorKind::Syntax("expected a term, found end of input".into()),
                pos,
            )),
        }
    }

    // ---- hypothesis formulas ----

    fn hyp(&mut self) -> PResult<HypFormula> {
        let lhs = self.hyp_implication()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.hyp_implication()?;
            let fwd = lhs.clone().and(rhs.clone().not()).not();
            let bwd = rhs.and(lhs.not()).not();
            return Ok(fwd.and(bwd));
        }
        Ok(lhs)
    }

    fn hyp_implication(&mut self) -> PResult<HypFormula> {
        let lhs = self.hyp_disjunction()?;
        if self.eat(&Tok::Implies) {
            let rhs = self.hyp_implication()?;
            return Ok(lhs.and(rhs.not()).not());
        }
        Ok(lhs)
    }

    fn hyp_disjunction(&mut self) -> PResult<HypFormula> {
        let mut f = self.hyp_conjunction()?;
        while self.eat(&Tok::Or) {
            f = f.or(self.hyp_conjunction()?);
        }
        Ok(f)
    }

    fn hyp_conjunction(&mut self) -> PResult<HypFormula> {
        let mut f = self.hyp_unary()?;
        while self.eat(&Tok::And) {
            f = f.and(self.hyp_unary()?);
        }
        Ok(f)
    }

    fn hyp_unary(&mut self) -> PResult<HypFormula> {
        if self.eat(&Tok::Not) {
            return Ok(self.hyp_unary()?.not());
        }
        let pos = self.here();
        match self.bump() {
            Some(Tok::LParen) => {
                let f = self.hyp()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::Ident(w)) if w == "true" => Ok(HypFormula::True),
            Some(Tok::Ident(w)) => {
                if self.sig.hypothesis_index(&w).is_some() {
                    Ok(HypFormula::Atom(w))
                } else if self.sig.observation_index(&w).is_some() {
                    self.shape(
                        format!("{w:?} is an observation; only hypotheses may appear here"),
                        pos,
                    )
                } else {
                    Err(ParseError::new(ParseErrorKind::UnknownIdentifier(w), pos))
                }
            }
            Some(t) => Err(ParseError::new(
                ParseErrorKind::Syntax(format!(
                    "expected a hypothesis formula, found {}",
                    t.describe()
                )),
                pos,
            )),
            None => Err(ParseError::new(
                ParseErrorKind::Syntax("expected a hypothesis formula, found end of input".into()),
                pos,
            )),
        }
    }
}

fn pow_rational(base: &Rational, exp: u64) -> Rational {
    let numer = num_traits::pow::pow(base.numer().clone(), exp as usize);
    let denom = num_traits::pow::pow(base.denom().clone(), exp as usize);
    let (numer, denom) = if denom.is_negative() {
        (-numer, -denom)
    } else {
        (numer, denom)
    };
    Rational::new(numer, denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::numbered(2, 1).unwrap()
    }

    fn q(s: &str) -> Rational {
        crate::scalar::parse_rational(s).unwrap()
    }

    #[test]
    fn smallest_atom() {
        let f = parse("we(ob1, h1) >= 0", &sig()).unwrap();
        let Formula::Ineq(i) = f else { panic!() };
        assert_eq!(i.bound, q("0"));
        assert_eq!(i.lhs.monomials.len(), 1);
        assert_eq!(
            i.lhs.monomials[0].factors,
            vec![Factor::Basic(BasicTerm::Weight(
                "ob1".into(),
                HypFormula::atom("h1")
            ))]
        );
    }

    #[test]
    fn powers_expand_exactly() {
        let f = parse("Pr(h1) >= 2^100", &sig()).unwrap();
        let Formula::Ineq(i) = f else { panic!() };
        assert_eq!(i.bound, q("1267650600228229401496703205376"));
        let f = parse("Pr(h1) >= 2^-3", &sig()).unwrap();
        let Formula::Ineq(i) = f else { panic!() };
        assert_eq!(i.bound, q("1/8"));
    }

    #[test]
    fn division_is_not_in_the_grammar() {
        let s = Signature::new(["fair", "dh"], ["heads100"]).unwrap();
        let bad =
            "Pr0(fair) = a & we(heads100, fair) = 1/(1+2^100) => Pr(fair) = a/(a + (1-a)*2^100)";
        let err = parse(bad, &s).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Shape(_)), "{err}");
        let good =
            "Pr0(fair) = a & we(heads100, fair)*(1+2^100) = 1 => Pr(fair)*(a + (1-a)*2^100) = a";
        let f = parse(good, &s).unwrap();
        assert!(!f.is_closed());
    }

    #[test]
    fn quantified_formula() {
        let f = parse("forall x (x * Pr(h1) >= 0)", &sig()).unwrap();
        assert!(matches!(f, Formula::Forall(ref v, _) if v == "x"));
        assert!(f.is_closed());
    }

    #[test]
    fn products_distribute_and_constants_move() {
        let f = parse("(1 + Pr(h1))*2 + 3 >= Pr0(h2)", &sig()).unwrap();
        let Formula::Ineq(i) = f else { panic!() };
        // 2 + 2Pr(h1) + 3 - Pr0(h2) >= 0  ==>  2Pr(h1) - Pr0(h2) >= -5
        assert_eq!(i.bound, q("-5"));
        let coeffs: Vec<_> = i.lhs.monomials.iter().map(|m| m.coeff.clone()).collect();
        assert_eq!(coeffs, vec![q("2"), q("-1")]);
    }

    #[test]
    fn sugar_expansions() {
        let s = sig();
        let le = parse("Pr(h1) <= 1/2", &s).unwrap();
        let Formula::Ineq(i) = le else { panic!() };
        assert_eq!(i.bound, q("-1/2"));
        assert_eq!(i.lhs.monomials[0].coeff, q("-1"));
        let lt = parse("Pr(h1) < 1/2", &s).unwrap();
        assert!(matches!(lt, Formula::Not(_)));
        let eq = parse("Pr(h1) = 1/2", &s).unwrap();
        assert!(eq.as_equation().is_some());
        let ex = parse("exists y (y >= 1)", &s).unwrap();
        assert!(matches!(ex, Formula::Not(ref b) if matches!(**b, Formula::Forall(..))));
    }

    #[test]
    fn error_kinds_and_positions() {
        let s = sig();
        let e = parse("h9", &s).unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("h9".into()));
        assert_eq!(e.pos, 0);
        let e = parse("we(h1, h1) >= 0", &s).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Shape(_)));
        assert_eq!(e.pos, 3);
        let e = parse("Pr(ob1) >= 0", &s).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Shape(_)));
        let e = parse("h1 &", &s).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(e.pos, 4);
        let e = parse("Pr(h1) >= 0 )", &s).unwrap_err();
        assert_eq!(e.pos, 12);
        let e = parse("h1 * 2 >= 0", &s).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Shape(_)));
        let e = parse("forall h1 (Pr(h1) >= 0)", &s).unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Shape(_)));
        assert!(parse("true", &s).is_err());
        assert!(parse("Pr(h1) >= 1/0", &s).is_err());
    }

    #[test]
    fn parenthesised_formula_versus_term() {
        let s = sig();
        assert!(matches!(parse("(h1 & h2)", &s).unwrap(), Formula::And(..)));
        assert!(matches!(
            parse("(1 - Pr(h1))*2 >= 0", &s).unwrap(),
            Formula::Ineq(_)
        ));
        assert!(matches!(
            parse("(Pr(h1) >= 0)", &s).unwrap(),
            Formula::Ineq(_)
        ));
        assert!(matches!(
            parse("((h1) | (Pr(h2) >= 1))", &s).unwrap(),
            Formula::Not(_)
        ));
    }

    #[test]
    fn terms() {
        let s = sig();
        let t = parse_term("Pr(h1) + 2*we(ob1, true)", &s).unwrap();
        assert_eq!(t.monomials.len(), 2);
        assert!(parse_term("Pr(h1) + 1", &s).is_err());
        assert!(parse_term("1 - 1 + Pr(h1)", &s).is_ok());
    }
}
