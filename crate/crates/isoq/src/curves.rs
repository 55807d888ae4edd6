//! # Curve families on the three-quadric
//!
//! A curve is presented as a descriptor ([`CurveModel`]) that evaluates, at
//! any admissible base point, to a pair of jet 4-vectors (u₁, u₂) spanning a
//! moving Lagrangian plane [u₁ ∧ u₂].  The families:
//!
//! * `WCurve(m, n)` — monomial components with exponents built from the
//!   reduced ratio q = m/n > 1,
//! * `StandardCycle` — the rational normal cycle u₁ = e₁ + (z³/3)e₃ − (z²/2)e₄,
//!   u₂ = e₂ − (z²/2)e₃ + z·e₄,
//! * `ConstantBending(κ)` — exponential curves with prescribed bending,
//! * `Exceptional1` — the embedded curve with bending 1,
//! * `Bryant(g, h)` — the curve tamed by the Legendre lift
//!   ξ = (2g′, 2gg′, 2hg′ − gh′, h′) of two meromorphic potentials,
//! * `LagrangianPair` — eight user expressions, validated on evaluation,
//! * `Goursat(X, inner)` — the image of a curve under constant X ∈ Sp(2,ℂ),
//! * `Synthesized` — germs produced by the frame integrator.
//!
//! The module also computes the Legendre associate
//! ξ = −ṁ₂₂u₁ + ṁ₁₂u₂ (with ṁᵢⱼ = ω(uᵢ, uⱼ′) and a common valuation
//! strip), the ramification indices (k₁, k₂) of a curve and its associate,
//! and provides a small parser/evaluator for meromorphic expressions in one
//! variable with an optional path-following (analytic continuation) mode for
//! multivalued potentials.

use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::jets::{Jet, C};
use crate::quadric::{self, JVec4};
use crate::symplin::{self, Mat4};
use crate::tol;

// ---------------------------------------------------------------------------
// Rational exponents
// ---------------------------------------------------------------------------

/// Exponent of a power factor: a reduced fraction num/den with den ≥ 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl Rational {
    /// Reduced fraction with positive denominator. `den` must be nonzero.
    pub fn new(num: i64, den: i64) -> Rational {
        assert!(den != 0, "rational exponent with zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i64;
        Rational { num: num / g, den: den / g }
    }

    pub fn integer(n: i64) -> Rational {
        Rational { num: n, den: 1 }
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    /// The exponent as a complex scalar (exact for integers; the fraction
    /// rounds to the nearest double otherwise).
    pub fn value(&self) -> C {
        C::from(self.num as f64 / self.den as f64)
    }

    /// self − 1, used by the power rule d(u^r) = r·u^(r−1)·u′.
    fn pred(&self) -> Rational {
        Rational { num: self.num - self.den, den: self.den }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 && self.num >= 0 {
            write!(f, "{}", self.num)
        } else if self.den == 1 {
            write!(f, "({})", self.num)
        } else {
            write!(f, "({}/{})", self.num, self.den)
        }
    }
}

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

/// AST of a meromorphic expression in the variable z.
///
/// Powers carry rational exponents; `exp`/`log` are the only named
/// functions.  Non-integer powers and logarithms take principal branches at
/// the evaluation point; [`Expr::eval_continued`] instead follows a
/// user-supplied path and returns the analytically continued germ at the
/// path's endpoint.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(C),
    Z,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Exp(Box<Expr>),
    Log(Box<Expr>),
}

/// Parses the grammar
///
/// ```text
/// expr   := ('-')? term (('+'|'-') term)*
/// term   := factor (('*'|'/') factor)*
/// factor := base ('^' exponent)?
/// base   := number | 'z' | 'i' | '(' expr ')' | ('exp'|'log') '(' expr ')'
/// exponent := digits | '(' int ('/' int)? ')'
/// ```
///
/// Rational exponents must be parenthesized (`z^(-3/5)`); the leading unary
/// minus is accepted as a convenience superset of the grammar.  Errors carry
/// the byte offset of the offending character.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, message: &str) -> Error {
        Error::SyntaxError { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", b as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = if self.eat(b'-') {
            // unary minus on the leading term
            fold(Expr::Sub(Box::new(Expr::Const(C::ZERO)), Box::new(self.term()?)))
        } else {
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = fold(Expr::Add(Box::new(acc), Box::new(self.term()?)));
            } else if self.eat(b'-') {
                acc = fold(Expr::Sub(Box::new(acc), Box::new(self.term()?)));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = fold(Expr::Mul(Box::new(acc), Box::new(self.factor()?)));
            } else if self.eat(b'/') {
                acc = fold(Expr::Div(Box::new(acc), Box::new(self.factor()?)));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if self.eat(b'^') {
            let r = self.exponent()?;
            Ok(fold(Expr::Pow(Box::new(base), r)))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() || b == b'.' => self.number(),
            Some(b) if b.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(|c| c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match word {
                    "z" => Ok(Expr::Z),
                    "i" => Ok(Expr::Const(C::I)),
                    "exp" | "log" => {
                        self.expect(b'(')?;
                        let inner = self.expr()?;
                        self.expect(b')')?;
                        Ok(if word == "exp" {
                            Expr::Exp(Box::new(inner))
                        } else {
                            Expr::Log(Box::new(inner))
                        })
                    }
                    _ => {
                        self.pos = start;
                        Err(self.err(&format!("unknown identifier '{word}'")))
                    }
                }
            }
            _ => Err(self.err("expected a number, 'z', 'i', '(' or a function")),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                // not an exponent suffix after all (e.g. "2*exp(z)")
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<f64>() {
            Ok(x) => Ok(Expr::Const(C::from(x))),
            Err(_) => {
                self.pos = start;
                Err(self.err("malformed number"))
            }
        }
    }

    /// Exponent after '^': a bare unsigned integer, or a parenthesized
    /// signed integer with an optional '/denominator'.
    fn exponent(&mut self) -> Result<Rational> {
        match self.peek() {
            Some(b) if b.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(Rational::integer(n))
            }
            Some(b'(') => {
                self.pos += 1;
                let num = self.signed_integer()?;
                let r = if self.eat(b'/') {
                    let den = self.signed_integer()?;
                    if den == 0 {
                        return Err(self.err("zero denominator in exponent"));
                    }
                    Rational::new(num, den)
                } else {
                    Rational::integer(num)
                };
                self.expect(b')')?;
                Ok(r)
            }
            _ => Err(self.err("expected an integer or parenthesized rational exponent")),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| {
                Error::SyntaxError { offset: start, message: "integer out of range".into() }
            })
    }

    fn signed_integer(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        if !neg {
            self.eat(b'+');
        }
        let n = self.integer()?;
        Ok(if neg { -n } else { n })
    }
}

// --- evaluation -------------------------------------------------------------

/// Outcome of one path step during analytic continuation.
enum WalkErr {
    /// The base of a branch node moved too far; subdivide the step.
    TooFar,
    /// A denominator or branch-node base passed through zero.
    Singular,
}

/// Branch bookkeeping along a path: for every branch-carrying node (DFS
/// order) the last base value and its continuously tracked argument.
#[derive(Clone)]
struct WalkState {
    vals: Vec<C>,
    args: Vec<f64>,
}

/// Integer power of a scalar by repeated squaring (0⁰ = 1).
fn cpow_int(u: C, n: i64) -> std::result::Result<C, WalkErr> {
    if n < 0 {
        if u.norm() < 1e-290 {
            return Err(WalkErr::Singular);
        }
        return cpow_int(u.finv(), -n);
    }
    let mut acc = C::ONE;
    let mut b = u;
    let mut n = n as u64;
    while n > 0 {
        if n & 1 == 1 {
            acc *= b;
        }
        n >>= 1;
        if n > 0 {
            b *= b;
        }
    }
    Ok(acc)
}

impl Expr {
    /// Number of branch-carrying nodes (non-integer powers and logarithms).
    fn branch_nodes(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Z => 0,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.branch_nodes() + b.branch_nodes()
            }
            Expr::Pow(b, r) => usize::from(!r.is_integer()) + b.branch_nodes(),
            Expr::Exp(a) => a.branch_nodes(),
            Expr::Log(a) => 1 + a.branch_nodes(),
        }
    }

    /// Principal-branch jet evaluation at the germ `z` (usually
    /// `Jet::variable(z0, order)`).
    pub fn eval(&self, z: &Jet) -> Result<Jet> {
        self.eval_with(z, &mut 0, &[])
    }

    /// Jet evaluation with per-node branch offsets: branch node k takes the
    /// branch `offsets[k]` sheets above the principal one.
    fn eval_with(&self, z: &Jet, cursor: &mut usize, offsets: &[i64]) -> Result<Jet> {
        match self {
            Expr::Const(c) => Ok(Jet::constant(z.base(), *c, z.order())),
            Expr::Z => Ok(z.clone()),
            Expr::Add(a, b) => Ok(a.eval_with(z, cursor, offsets)? + b.eval_with(z, cursor, offsets)?),
            Expr::Sub(a, b) => Ok(a.eval_with(z, cursor, offsets)? - b.eval_with(z, cursor, offsets)?),
            Expr::Mul(a, b) => Ok(a.eval_with(z, cursor, offsets)? * b.eval_with(z, cursor, offsets)?),
            Expr::Div(a, b) => {
                let num = a.eval_with(z, cursor, offsets)?;
                let den = b.eval_with(z, cursor, offsets)?;
                if den.valuation().is_none() {
                    return Err(Error::PoleAtPoint);
                }
                if den.valuation() == Some(0)
                    && den.value().norm() <= 1e-12 * den.max_abs()
                {
                    // a nonzero-but-noise constant term: numerically a pole
                    return Err(Error::PoleAtPoint);
                }
                num.binary(&den, crate::jets::JetOp::Div).map_err(|e| match e {
                    Error::LaurentQuotient(_) | Error::DivisionByIdenticallyZero => {
                        Error::PoleAtPoint
                    }
                    other => other,
                })
            }
            Expr::Pow(b, r) => {
                if r.is_integer() {
                    let base = b.eval_with(z, cursor, offsets)?;
                    base.powi(r.num).map_err(|e| match e {
                        Error::LaurentQuotient(_) | Error::DivisionByIdenticallyZero => {
                            Error::PoleAtPoint
                        }
                        other => other,
                    })
                } else {
                    let k = offsets.get(*cursor).copied().unwrap_or(0);
                    *cursor += 1;
                    let base = b.eval_with(z, cursor, offsets)?;
                    if base.value().norm() <= 1e-12 * base.max_abs().max(f64::MIN_POSITIVE) {
                        return Err(Error::BranchPointAtPoint);
                    }
                    let p = base.pow(r.value()).map_err(|e| match e {
                        Error::BranchPointAtBase => Error::BranchPointAtPoint,
                        other => other,
                    })?;
                    if k == 0 {
                        Ok(p)
                    } else {
                        // k extra turns of the base multiply the power by
                        // exp(2πik·num/den)
                        let phase = C::from_polar(
                            1.0,
                            std::f64::consts::TAU * (k as f64) * r.num as f64 / r.den as f64,
                        );
                        Ok(p * phase)
                    }
                }
            }
            Expr::Exp(a) => Ok(a.eval_with(z, cursor, offsets)?.exp()),
            Expr::Log(a) => {
                let k = offsets.get(*cursor).copied().unwrap_or(0);
                *cursor += 1;
                let inner = a.eval_with(z, cursor, offsets)?;
                if inner.value().norm() <= 1e-12 * inner.max_abs().max(f64::MIN_POSITIVE) {
                    return Err(Error::BranchPointAtPoint);
                }
                let l = inner.log().map_err(|e| match e {
                    Error::BranchPointAtBase => Error::BranchPointAtPoint,
                    other => other,
                })?;
                if k == 0 {
                    Ok(l)
                } else {
                    let shift = C::new(0.0, std::f64::consts::TAU * k as f64);
                    Ok(l + Jet::constant(z.base(), shift, z.order()))
                }
            }
        }
    }

    /// Scalar value at z, updating the branch state `next` from `prev`
    /// (`prev = None` initializes every branch node on its principal sheet).
    fn walk_value(
        &self,
        z: C,
        cursor: &mut usize,
        prev: Option<&WalkState>,
        next: &mut WalkState,
    ) -> std::result::Result<C, WalkErr> {
        match self {
            Expr::Const(c) => Ok(*c),
            Expr::Z => Ok(z),
            Expr::Add(a, b) => {
                Ok(a.walk_value(z, cursor, prev, next)? + b.walk_value(z, cursor, prev, next)?)
            }
            Expr::Sub(a, b) => {
                Ok(a.walk_value(z, cursor, prev, next)? - b.walk_value(z, cursor, prev, next)?)
            }
            Expr::Mul(a, b) => {
                Ok(a.walk_value(z, cursor, prev, next)? * b.walk_value(z, cursor, prev, next)?)
            }
            Expr::Div(a, b) => {
                let num = a.walk_value(z, cursor, prev, next)?;
                let den = b.walk_value(z, cursor, prev, next)?;
                if den.norm() < 1e-290 {
                    return Err(WalkErr::Singular);
                }
                Ok(num / den)
            }
            Expr::Pow(b, r) if r.is_integer() => {
                let u = b.walk_value(z, cursor, prev, next)?;
                cpow_int(u, r.num)
            }
            Expr::Pow(b, r) => {
                let idx = *cursor;
                *cursor += 1;
                let u = b.walk_value(z, cursor, prev, next)?;
                let arg = track_branch(idx, u, prev, next)?;
                let t = r.num as f64 / r.den as f64;
                Ok(C::from_polar(u.norm().powf(t), t * arg))
            }
            Expr::Exp(a) => Ok(a.walk_value(z, cursor, prev, next)?.exp()),
            Expr::Log(a) => {
                let idx = *cursor;
                *cursor += 1;
                let u = a.walk_value(z, cursor, prev, next)?;
                let arg = track_branch(idx, u, prev, next)?;
                Ok(C::new(u.norm().ln(), arg))
            }
        }
    }

    /// Walks the polyline `path`, bisecting segments until every branch
    /// node's base moves slowly enough to track its winding unambiguously.
    fn continue_branches(&self, path: &[C]) -> Result<WalkState> {
        let nb = self.branch_nodes();
        let mut st = WalkState { vals: vec![C::ZERO; nb], args: vec![0.0; nb] };
        let start = *path.first().ok_or_else(|| Error::Usage("empty continuation path".into()))?;
        let mut init = st.clone();
        self.walk_value(start, &mut 0, None, &mut init)
            .map_err(|_| Error::SingularityOnPath(start))?;
        st = init;
        for seg in path.windows(2) {
            self.advance(seg[0], seg[1], &mut st, 0)?;
        }
        Ok(st)
    }

    fn advance(&self, from: C, to: C, st: &mut WalkState, depth: u32) -> Result<()> {
        let mut next = st.clone();
        match self.walk_value(to, &mut 0, Some(st), &mut next) {
            Ok(_) => {
                *st = next;
                Ok(())
            }
            Err(WalkErr::Singular) => Err(Error::SingularityOnPath(to)),
            Err(WalkErr::TooFar) => {
                if depth >= 48 {
                    return Err(Error::SingularityOnPath(to));
                }
                let mid = (from + to) * 0.5;
                self.advance(from, mid, st, depth + 1)?;
                self.advance(mid, to, st, depth + 1)
            }
        }
    }

    /// Analytic continuation along the polyline `path`: starts on principal
    /// branches at `path[0]` and returns the continued germ (jet of the
    /// given order) at the endpoint.
    pub fn eval_continued(&self, path: &[C], order: usize) -> Result<Jet> {
        let st = self.continue_branches(path)?;
        // how many sheets above principal each branch node ends on
        let offsets: Vec<i64> = st
            .vals
            .iter()
            .zip(&st.args)
            .map(|(v, a)| ((a - v.arg()) / std::f64::consts::TAU).round() as i64)
            .collect();
        let z = Jet::variable(*path.last().unwrap(), order);
        self.eval_with(&z, &mut 0, &offsets)
    }

    /// Symbolic derivative with respect to z.
    pub fn derivative(&self) -> Expr {
        match self {
            Expr::Const(_) => Expr::Const(C::ZERO),
            Expr::Z => Expr::Const(C::ONE),
            Expr::Add(a, b) => mk_add(a.derivative(), b.derivative()),
            Expr::Sub(a, b) => mk_sub(a.derivative(), b.derivative()),
            Expr::Mul(a, b) => mk_add(
                mk_mul(a.derivative(), (**b).clone()),
                mk_mul((**a).clone(), b.derivative()),
            ),
            Expr::Div(a, b) => Expr::Div(
                Box::new(mk_sub(
                    mk_mul(a.derivative(), (**b).clone()),
                    mk_mul((**a).clone(), b.derivative()),
                )),
                Box::new(Expr::Pow(b.clone(), Rational::integer(2))),
            ),
            Expr::Pow(b, r) => {
                if r.num == 0 {
                    return Expr::Const(C::ZERO);
                }
                // power rule: d(u^r) = r·u^(r−1)·u′
                let scaled = mk_mul(Expr::Const(r.value()), b.derivative());
                if r.pred().num == 0 {
                    scaled
                } else {
                    mk_mul(scaled, Expr::Pow(b.clone(), r.pred()))
                }
            }
            Expr::Exp(a) => mk_mul(Expr::Exp(a.clone()), a.derivative()),
            Expr::Log(a) => Expr::Div(Box::new(a.derivative()), a.clone()),
        }
    }
}

/// Parse-time constant folding.  This canonicalizes constant subtrees
/// (e.g. `1*i`, `-3`, `(2+3*i)`) into single `Const` nodes so the printed
/// form of an expression reparses to an identical AST.  Folding never
/// changes semantics: constants have no branch monodromy, and foldings
/// that could fail (division by zero, log of zero, negative powers of
/// zero) are left untouched for evaluation to report.
fn fold(e: Expr) -> Expr {
    let two = |a: &Expr, b: &Expr| -> Option<(C, C)> {
        match (a, b) {
            (Expr::Const(x), Expr::Const(y)) => Some((*x, *y)),
            _ => None,
        }
    };
    match &e {
        Expr::Add(a, b) => {
            if let Some((x, y)) = two(a, b) {
                return Expr::Const(x + y);
            }
        }
        Expr::Sub(a, b) => {
            if let Some((x, y)) = two(a, b) {
                return Expr::Const(x - y);
            }
        }
        Expr::Mul(a, b) => {
            if let Some((x, y)) = two(a, b) {
                return Expr::Const(x * y);
            }
        }
        Expr::Div(a, b) => {
            if let Some((x, y)) = two(a, b) {
                if y.norm() > 0.0 {
                    return Expr::Const(x / y);
                }
            }
        }
        Expr::Pow(b, r) => {
            if let Expr::Const(x) = &**b {
                let t = r.num as f64 / r.den as f64;
                if r.is_integer() {
                    if let Ok(v) = cpow_int(*x, r.num) {
                        return Expr::Const(v);
                    }
                } else if x.norm() > 0.0 {
                    // principal branch; a constant base never winds
                    return Expr::Const(C::from_polar(x.norm().powf(t), t * x.arg()));
                }
            }
        }
        Expr::Exp(a) => {
            if let Expr::Const(x) = &**a {
                return Expr::Const(x.exp());
            }
        }
        Expr::Log(a) => {
            if let Expr::Const(x) = &**a {
                if x.norm() > 0.0 {
                    return Expr::Const(C::new(x.norm().ln(), x.arg()));
                }
            }
        }
        _ => {}
    }
    e
}

fn is_const(e: &Expr, v: C) -> bool {
    matches!(e, Expr::Const(c) if *c == v)
}

fn mk_add(a: Expr, b: Expr) -> Expr {
    if is_const(&a, C::ZERO) {
        b
    } else if is_const(&b, C::ZERO) {
        a
    } else {
        Expr::Add(Box::new(a), Box::new(b))
    }
}

fn mk_sub(a: Expr, b: Expr) -> Expr {
    if is_const(&b, C::ZERO) {
        a
    } else {
        Expr::Sub(Box::new(a), Box::new(b))
    }
}

fn mk_mul(a: Expr, b: Expr) -> Expr {
    if is_const(&a, C::ZERO) || is_const(&b, C::ZERO) {
        Expr::Const(C::ZERO)
    } else if is_const(&a, C::ONE) {
        b
    } else if is_const(&b, C::ONE) {
        a
    } else {
        Expr::Mul(Box::new(a), Box::new(b))
    }
}

/// Updates the continuous argument of branch node `idx` whose base moved to
/// `u`, erroring when the move is too large to resolve the winding.
fn track_branch(
    idx: usize,
    u: C,
    prev: Option<&WalkState>,
    next: &mut WalkState,
) -> std::result::Result<f64, WalkErr> {
    if u.norm() < 1e-290 {
        return Err(WalkErr::Singular);
    }
    let arg = match prev {
        None => u.arg(),
        Some(p) => {
            let ratio = u / p.vals[idx];
            if (ratio - C::ONE).norm() > 0.7 {
                return Err(WalkErr::TooFar);
            }
            p.args[idx] + ratio.arg()
        }
    };
    next.vals[idx] = u;
    next.args[idx] = arg;
    Ok(arg)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_const(f, *c),
            Expr::Z => write!(f, "z"),
            Expr::Add(a, b) => write!(f, "({a}+{b})"),
            Expr::Sub(a, b) => write!(f, "({a}-{b})"),
            Expr::Mul(a, b) => write!(f, "({a}*{b})"),
            Expr::Div(a, b) => write!(f, "({a}/{b})"),
            Expr::Pow(b, r) => write!(f, "({b}^{r})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
        }
    }
}

/// Writes a complex constant in re-parseable form (the shortest-roundtrip
/// float format keeps descriptor round trips exact).
fn write_const(f: &mut fmt::Formatter<'_>, c: C) -> fmt::Result {
    if c.im == 0.0 {
        if c.re >= 0.0 {
            write!(f, "{}", c.re)
        } else {
            write!(f, "(-{})", -c.re)
        }
    } else if c.re == 0.0 {
        if c.im >= 0.0 {
            write!(f, "({}*i)", c.im)
        } else {
            write!(f, "(-{}*i)", -c.im)
        }
    } else if c.im >= 0.0 {
        write!(f, "({}+{}*i)", c.re, c.im)
    } else {
        write!(f, "({}-{}*i)", c.re, -c.im)
    }
}

// ---------------------------------------------------------------------------
// Curve models
// ---------------------------------------------------------------------------

/// Opaque germ evaluator used by the synthesis integrator: maps a base
/// point and jet order to a Lagrangian pair.
#[derive(Clone)]
pub struct GermEvaluator(Arc<dyn Fn(C, usize) -> Result<(JVec4, JVec4)> + Send + Sync>);

impl GermEvaluator {
    pub fn new(f: impl Fn(C, usize) -> Result<(JVec4, JVec4)> + Send + Sync + 'static) -> Self {
        GermEvaluator(Arc::new(f))
    }

    pub fn eval(&self, z0: C, order: usize) -> Result<(JVec4, JVec4)> {
        (self.0)(z0, order)
    }
}

impl fmt::Debug for GermEvaluator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GermEvaluator(..)")
    }
}

/// Descriptor of an isotropic curve; see the module docs for the families.
#[derive(Clone, Debug)]
pub enum CurveModel {
    WCurve { m: i64, n: i64 },
    StandardCycle,
    ConstantBending { kappa: C },
    Exceptional1,
    Bryant { g: Expr, h: Expr },
    LagrangianPair { u1: Box<[Expr; 4]>, u2: Box<[Expr; 4]> },
    Goursat { inner: Box<CurveModel>, x: Mat4 },
    Synthesized(GermEvaluator),
}

/// Reduces (m, n) and moves the ratio into the canonical chamber q = m/n > 1
/// (the four curves with ratios ±q, ±1/q are congruent).  Returns the
/// canonical pair and whether the input was changed.
pub fn wcurve_canonical(m: i64, n: i64) -> Result<(i64, i64, bool)> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidModel("wcurve parameters must be nonzero".into()));
    }
    let g = gcd(m.unsigned_abs(), n.unsigned_abs()) as i64;
    let (mut cm, mut cn) = (m / g, n / g);
    if cm.abs() == cn.abs() {
        return Err(Error::InvalidModel("wcurve ratio q = ±1 is excluded".into()));
    }
    if cn < 0 {
        (cm, cn) = (-cm, -cn);
    }
    cm = cm.abs();
    if cm < cn {
        (cm, cn) = (cn, cm);
    }
    Ok((cm, cn, (cm, cn) != (m, n)))
}

impl CurveModel {
    /// W-curve with canonicalized parameters (silently reduces; use
    /// [`wcurve_canonical`] to learn whether the input changed).
    pub fn wcurve(m: i64, n: i64) -> Result<CurveModel> {
        let (m, n, _) = wcurve_canonical(m, n)?;
        Ok(CurveModel::WCurve { m, n })
    }

    /// Exponential model with prescribed constant bending κ ∉ {1, −16/9}.
    pub fn constant_bending(kappa: C) -> Result<CurveModel> {
        cb_lambdas(kappa)?;
        Ok(CurveModel::ConstantBending { kappa })
    }

    pub fn bryant(g: Expr, h: Expr) -> CurveModel {
        CurveModel::Bryant { g, h }
    }

    /// Symplectic image of `inner` (X must satisfy XᵀJX = J).
    pub fn goursat(inner: CurveModel, x: Mat4) -> Result<CurveModel> {
        symplin::check_symplectic(&x)?;
        Ok(CurveModel::Goursat { inner: Box::new(inner), x })
    }

    /// True when the model is a conformal cycle (the standard cycle, a
    /// W-curve with ratio 3, or a symplectic image of either).
    pub fn is_cycle(&self) -> bool {
        match self {
            CurveModel::StandardCycle => true,
            CurveModel::WCurve { m, n } => *m == 3 * *n,
            CurveModel::Goursat { inner, .. } => inner.is_cycle(),
            _ => false,
        }
    }

    /// Evaluates the model into a Lagrangian pair of jets of exactly the
    /// requested order at z0.
    pub fn eval(&self, z0: C, order: usize) -> Result<(JVec4, JVec4)> {
        match self {
            CurveModel::WCurve { m, n } => Ok(eval_wcurve(*m, *n, z0, order)),
            CurveModel::StandardCycle => Ok(eval_cycle(z0, order)),
            CurveModel::ConstantBending { kappa } => eval_constant_bending(*kappa, z0, order),
            CurveModel::Exceptional1 => Ok(eval_exceptional1(z0, order)),
            CurveModel::Bryant { g, h } => eval_bryant(g, h, z0, order),
            CurveModel::LagrangianPair { u1, u2 } => eval_pair(u1, u2, z0, order),
            CurveModel::Goursat { inner, x } => {
                let (u1, u2) = inner.eval(z0, order)?;
                Ok((apply_mat(x, &u1), apply_mat(x, &u2)))
            }
            CurveModel::Synthesized(h) => h.eval(z0, order),
        }
    }

    /// Germ used when extracting the differential invariants of the model.
    ///
    /// This equals [`eval`](Self::eval) for every family except W-curves
    /// with m+n even, which are returned in the doubled chart z ↦ z²
    /// (component exponents 2m, m+n, 2n).  That chart is defined for every
    /// parameter — odd m+n forces it, since the exponents are half-integers
    /// otherwise — and it is the one in which the family's classical
    /// constant-coefficient formulas for the quartic and quadratic
    /// differentials hold uniformly.  Weight-zero quantities (the bending)
    /// are the same either way.
    pub fn invariant_germ(&self, z0: C, order: usize) -> Result<(JVec4, JVec4)> {
        match self {
            CurveModel::WCurve { m, n } => Ok(eval_wcurve_chart(*m, *n, 2, z0, order)),
            CurveModel::Goursat { inner, x } => {
                let (u1, u2) = inner.invariant_germ(z0, order)?;
                Ok((apply_mat(x, &u1), apply_mat(x, &u2)))
            }
            _ => self.eval(z0, order),
        }
    }

    /// The curve precomposed with the holomorphic map h, as a germ-backed
    /// model: the pair of the reparametrized curve at z₀ is the pair of
    /// this model at h(z₀) composed with the jet of h.  The inner germ is
    /// the invariant-extraction germ, so differential invariants of the
    /// result transport those of `self` by the usual change-of-chart law.
    pub fn reparametrized(&self, h: &Expr) -> CurveModel {
        let inner = self.clone();
        let h = h.clone();
        CurveModel::Synthesized(GermEvaluator::new(move |z0, order| {
            let hjet = h.eval(&Jet::variable(z0, order + 1))?;
            let (u1, u2) = inner.invariant_germ(hjet.value(), order)?;
            let comp = |u: &JVec4| -> Result<JVec4> {
                let mut out = Vec::with_capacity(4);
                for j in u {
                    out.push(Jet::compose(j, &hjet)?);
                }
                Ok(out.try_into().expect("four components"))
            };
            Ok((comp(&u1)?, comp(&u2)?))
        }))
    }

    /// Legendre associate ξ = −ṁ₂₂u₁ + ṁ₁₂u₂ after stripping the common
    /// vanishing order of the four components; swaps the roles of u₁ and u₂
    /// when ṁ₂₂ vanishes identically.
    pub fn legendre_associate(&self, z0: C, order: usize) -> Result<JVec4> {
        let mut guard = tol::GUARD_ORDER;
        for _ in 0..2 {
            let (u1, u2) = self.eval(z0, order + guard)?;
            let m = quadric::mdot(&u1, &u2)?;
            let scale = m.iter().flatten().map(Jet::max_abs).fold(0.0, f64::max)
                * u1.iter().chain(u2.iter()).map(Jet::max_abs).fold(0.0, f64::max);

            let mut cand = associate_combination(&m[1][1], &m[0][1], &u1, &u2);
            if cand.iter().all(|j| j.is_zero_rel(scale)) {
                // ṁ₂₂ ≡ 0: with the pair order swapped the diagonal roles
                // exchange, so the associate becomes −ṁ₁₁u₂ + ṁ₁₂u₁
                cand = associate_combination(&m[0][0], &m[0][1], &u2, &u1);
            }
            if cand.iter().all(|j| j.is_zero_rel(scale)) {
                return Err(Error::BothDiagonalEntriesVanish);
            }

            let s = cand.iter().filter_map(Jet::valuation).min().unwrap();
            let avail = cand.iter().map(Jet::order).min().unwrap() - s;
            if avail < order {
                // deep common zero: retry once with a wider guard
                guard = s + 2 + tol::GUARD_ORDER;
                continue;
            }
            let xi = cand.map(|j| shift_down(&j, s).truncated(order));
            return Ok(xi);
        }
        Err(Error::OrderExhausted { requested: order, order: 0 })
    }

    /// Ramification indices (k₁, k₂) at z0: k₁ is the common vanishing
    /// order of ṁ (identically-zero entries do not count), and k₂ is the
    /// ramification index of the Legendre associate — the vanishing order
    /// of ξ ∧ ξ′ for the stripped associate germ ξ.
    pub fn ramification_indices(&self, z0: C) -> Result<(usize, usize)> {
        let n = tol::default_order() + tol::GUARD_ORDER;
        let (u1, u2) = self.eval(z0, n)?;
        let m = quadric::mdot(&u1, &u2)?;
        let k1 = m
            .iter()
            .flatten()
            .filter_map(Jet::valuation)
            .min()
            .ok_or(Error::ZeroJet)?;
        let xi = self.legendre_associate(z0, n)?;
        let dxi = quadric::jvec_derive(&xi);
        let wedge = quadric::plucker_jet_unchecked(&xi, &dxi);
        let k2 = wedge
            .iter()
            .filter_map(Jet::valuation)
            .min()
            .ok_or_else(|| Error::FrameUnavailable("the Legendre associate is constant".into()))?;
        Ok((k1, k2))
    }

    /// Loads a model from its JSON descriptor.
    pub fn from_json(v: &Value) -> Result<CurveModel> {
        from_json_at(v, "")
    }

    pub fn from_json_str(s: &str) -> Result<CurveModel> {
        let v: Value = serde_json::from_str(s).map_err(|e| Error::SchemaError {
            pointer: String::new(),
            message: format!("invalid JSON: {e}"),
        })?;
        CurveModel::from_json(&v)
    }

    /// Canonical JSON descriptor (synthesized germs are not serializable).
    pub fn to_json(&self) -> Result<Value> {
        Ok(match self {
            CurveModel::WCurve { m, n } => json!({"type": "wcurve", "m": m, "n": n}),
            CurveModel::StandardCycle => json!({"type": "cycle"}),
            CurveModel::ConstantBending { kappa } => {
                json!({"type": "constant_bending", "kappa": [kappa.re, kappa.im]})
            }
            CurveModel::Exceptional1 => json!({"type": "exceptional1"}),
            CurveModel::Bryant { g, h } => {
                json!({"type": "bryant", "g": g.to_string(), "h": h.to_string()})
            }
            CurveModel::LagrangianPair { u1, u2 } => json!({
                "type": "lagrangian_pair",
                "u1": u1.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "u2": u2.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            }),
            CurveModel::Goursat { inner, x } => {
                let mut entries = Vec::with_capacity(16);
                for i in 0..4 {
                    for j in 0..4 {
                        entries.push(json!([x[(i, j)].re, x[(i, j)].im]));
                    }
                }
                json!({"type": "goursat", "X": entries, "inner": inner.to_json()?})
            }
            CurveModel::Synthesized(_) => {
                return Err(Error::InvalidModel(
                    "synthesized germs have no JSON descriptor".into(),
                ))
            }
        })
    }
}

/// Meromorphic-potential model of the flat-front family with `n` smooth
/// ends: g = z⁻¹(zⁿ−1)^((2−n)/n), h = z⁻²(1+zⁿ)(zⁿ−1)^((2−n)/n).
pub fn kuy_example(n: i64) -> Result<CurveModel> {
    if n < 3 {
        return Err(Error::InvalidModel(format!("kuy family needs n ≥ 3, got {n}")));
    }
    let r = Rational::new(2 - n, n);
    let g = parse_expr(&format!("z^(-1)*(z^{n}-1)^({}/{})", r.num, r.den))?;
    let h = parse_expr(&format!("z^(-2)*(1+z^{n})*(z^{n}-1)^({}/{})", r.num, r.den))?;
    Ok(CurveModel::Bryant { g, h })
}

/// Builds the curve [ξ ∧ ξ′] from an explicit Legendre lift ξ given as four
/// expressions; u₂ = ξ′ is derived symbolically.  The lift is validated at
/// probe points (ω(ξ, ξ′) ≈ 0).
pub fn curve_from_legendre(xi: [Expr; 4]) -> Result<CurveModel> {
    let dxi: [Expr; 4] = [
        xi[0].derivative(),
        xi[1].derivative(),
        xi[2].derivative(),
        xi[3].derivative(),
    ];
    // probe a few generic points; poles of individual components are fine
    // as long as one probe evaluates
    let probes = [C::new(0.37, 0.21), C::new(1.13, -0.4), C::new(-0.62, 0.83)];
    let mut checked = false;
    for &p in &probes {
        let z = Jet::variable(p, 6);
        let vals: Result<Vec<Jet>> = xi.iter().map(|e| e.eval(&z)).collect();
        let Ok(vals) = vals else { continue };
        let xi_jets: JVec4 = [vals[0].clone(), vals[1].clone(), vals[2].clone(), vals[3].clone()];
        let res = quadric::contact_residual(&xi_jets);
        let scale = xi_jets.iter().map(Jet::max_abs).fold(0.0, f64::max);
        if res.max_abs() > tol::PFAFFIAN_RESIDUAL * (scale * scale).max(f64::MIN_POSITIVE) {
            return Err(Error::NotLegendre(res.max_abs()));
        }
        checked = true;
        break;
    }
    if !checked {
        return Err(Error::InvalidModel(
            "legendre lift could not be evaluated at any probe point".into(),
        ));
    }
    Ok(CurveModel::LagrangianPair { u1: Box::new(xi), u2: Box::new(dxi) })
}

// --- family evaluators ------------------------------------------------------

/// Drops the first `s` (vanishing) coefficients: the germ divided by
/// (z−z₀)^s.
fn shift_down(j: &Jet, s: usize) -> Jet {
    Jet::new(j.base(), j.coeffs()[s.min(j.order())..].to_vec())
}

/// −m₂₂·a + m₁₂·b componentwise.
fn associate_combination(m22: &Jet, m12: &Jet, a: &JVec4, b: &JVec4) -> JVec4 {
    std::array::from_fn(|i| &(m12 * &b[i]) - &(m22 * &a[i]))
}

/// (X·u) componentwise on jets for constant X.
fn apply_mat(x: &Mat4, u: &JVec4) -> JVec4 {
    std::array::from_fn(|i| {
        let mut acc = &u[0] * x[(i, 0)];
        for j in 1..4 {
            acc = acc + &u[j] * x[(i, j)];
        }
        acc
    })
}

fn eval_wcurve(m: i64, n: i64, z0: C, order: usize) -> (JVec4, JVec4) {
    // ε = (m+n) mod 2 doubles every exponent when m+n is odd
    eval_wcurve_chart(m, n, 1 + (m + n) % 2, z0, order)
}

fn eval_wcurve_chart(m: i64, n: i64, e: i64, z0: C, order: usize) -> (JVec4, JVec4) {
    let z = Jet::variable(z0, order);
    let zero = Jet::zero(z0, order);
    let dm = C::from((m - n) as f64);
    let dp = C::from((m + n) as f64);
    let s = C::new(0.0, 2.0 * ((m * n) as f64).sqrt()); // 2i√(mn)
    let zem = z.powi(e * m).unwrap();
    let zh = z.powi(e * (m + n) / 2).unwrap();
    let zen = z.powi(e * n).unwrap();
    let u1 = [
        Jet::constant(z0, dm, order),
        zero.clone(),
        -(&zem * dp),
        -(&zh * s),
    ];
    let u2 = [
        zero,
        Jet::constant(z0, dm, order),
        -(&zh * s),
        &zen * dp,
    ];
    (u1, u2)
}

fn eval_cycle(z0: C, order: usize) -> (JVec4, JVec4) {
    let z = Jet::variable(z0, order);
    let zero = Jet::zero(z0, order);
    let z2 = &z * &z;
    let z3 = &z2 * &z;
    let u1 = [
        Jet::constant(z0, C::ONE, order),
        zero.clone(),
        &z3 * (1.0 / 3.0),
        &z2 * (-0.5),
    ];
    let u2 = [
        zero,
        Jet::constant(z0, C::ONE, order),
        &z2 * (-0.5),
        z,
    ];
    (u1, u2)
}

/// λ₁, λ₂ = ½(5c ∓ 4√(c²−1))^½ with c = √κ; the excluded bendings are
/// exactly where λ₁ = λ₂ (κ = 1) or λ₁λ₂ = 0 (κ = −16/9).
fn cb_lambdas(kappa: C) -> Result<(C, C)> {
    if (kappa - C::ONE).norm() < 1e-12 || (kappa + C::from(16.0 / 9.0)).norm() < 1e-12 {
        return Err(Error::ExceptionalKappa);
    }
    let c = kappa.sqrt();
    let s = (kappa - C::ONE).sqrt(); // √(c²−1)
    let l1 = (c * 5.0 - s * 4.0).sqrt() * 0.5;
    let l2 = (c * 5.0 + s * 4.0).sqrt() * 0.5;
    Ok((l1, l2))
}

fn eval_constant_bending(kappa: C, z0: C, order: usize) -> Result<(JVec4, JVec4)> {
    let (l1, l2) = cb_lambdas(kappa)?;
    let p = (l1 + l2) / (l1 - l2);
    let q = C::new(0.0, 2.0) * l1.sqrt() * l2.sqrt() / (l1 - l2);
    let z = Jet::variable(z0, order);
    let zero = Jet::zero(z0, order);
    let e1 = (&z * (l1 * 2.0)).exp();
    let e2 = (&z * (l2 * 2.0)).exp();
    let em = (&z * (l1 + l2)).exp();
    let u1 = [
        Jet::constant(z0, C::ONE, order),
        zero.clone(),
        -(&e1 * p),
        -(&em * q),
    ];
    let u2 = [
        zero,
        Jet::constant(z0, C::ONE, order),
        -(&em * q),
        &e2 * p,
    ];
    Ok((u1, u2))
}

fn eval_exceptional1(z0: C, order: usize) -> (JVec4, JVec4) {
    let z = Jet::variable(z0, order);
    let zero = Jet::zero(z0, order);
    let u1 = [
        Jet::constant(z0, C::ONE, order),
        zero.clone(),
        z.exp(),
        z.clone(),
    ];
    let u2 = [
        zero,
        Jet::constant(z0, C::ONE, order),
        z.clone(),
        -((&z * (-1.0)).exp()),
    ];
    (u1, u2)
}

/// Legendre lift of two potentials: ξ = (2g′, 2gg′, 2hg′ − gh′, h′).
pub fn bryant_lift(g: &Jet, h: &Jet) -> JVec4 {
    let gp = g.d();
    let hp = h.d();
    [
        &gp * 2.0,
        &(g * &gp) * 2.0,
        &(&(h * &gp) * 2.0) - &(g * &hp),
        hp.clone(),
    ]
}

fn eval_bryant(g: &Expr, h: &Expr, z0: C, order: usize) -> Result<(JVec4, JVec4)> {
    let z = Jet::variable(z0, order + 2);
    let gj = g.eval(&z)?;
    let hj = h.eval(&z)?;
    // the lift only moves if g does
    if gj.d().is_zero_rel(gj.max_abs()) {
        return Err(Error::InvalidModel("bryant potential g is constant".into()));
    }
    let xi = bryant_lift(&gj, &hj);
    let u2 = quadric::jvec_derive(&xi);
    let u1 = xi.map(|j| j.truncated(order));
    Ok((u1, u2.map(|j| j.truncated(order))))
}

fn eval_pair(u1e: &[Expr; 4], u2e: &[Expr; 4], z0: C, order: usize) -> Result<(JVec4, JVec4)> {
    let z = Jet::variable(z0, order + 1);
    let ev = |es: &[Expr; 4]| -> Result<JVec4> {
        Ok([
            es[0].eval(&z)?,
            es[1].eval(&z)?,
            es[2].eval(&z)?,
            es[3].eval(&z)?,
        ])
    };
    let u1 = ev(u1e)?;
    let u2 = ev(u2e)?;
    // user data: enforce the plane conditions here
    let scale = u1.iter().map(Jet::max_abs).fold(0.0, f64::max)
        * u2.iter().map(Jet::max_abs).fold(0.0, f64::max);
    let om = quadric::omega_jet(&u1, &u2);
    if om.max_abs() > tol::EXACT_LINEAR * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotLagrangian(om.max_abs()));
    }
    let m = quadric::mdot(&u1, &u2)?;
    let mscale = m.iter().flatten().map(Jet::max_abs).fold(0.0, f64::max);
    let det = &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]);
    if det.max_abs() > tol::ISOTROPY_REL * (mscale * mscale).max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidModel(format!(
            "pair is not isotropic (det residual {:.3e})",
            det.max_abs()
        )));
    }
    Ok((u1.map(|j| j.truncated(order)), u2.map(|j| j.truncated(order))))
}

// --- JSON loading ------------------------------------------------------------

fn schema_err(pointer: &str, message: impl Into<String>) -> Error {
    Error::SchemaError { pointer: pointer.to_string(), message: message.into() }
}

fn get_i64(obj: &serde_json::Map<String, Value>, key: &str, ptr: &str) -> Result<i64> {
    obj.get(key)
        .and_then(Value::as_i64)
        .ok_or_else(|| schema_err(&format!("{ptr}/{key}"), "expected an integer"))
}

fn get_str<'v>(
    obj: &'v serde_json::Map<String, Value>,
    key: &str,
    ptr: &str,
) -> Result<&'v str> {
    obj.get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| schema_err(&format!("{ptr}/{key}"), "expected a string"))
}

/// Accepts `[re, im]` or a bare number.
fn complex_from(v: &Value, ptr: &str) -> Result<C> {
    if let Some(x) = v.as_f64() {
        return Ok(C::from(x));
    }
    let arr = v
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| schema_err(ptr, "expected [re, im]"))?;
    let re = arr[0].as_f64().ok_or_else(|| schema_err(&format!("{ptr}/0"), "expected a number"))?;
    let im = arr[1].as_f64().ok_or_else(|| schema_err(&format!("{ptr}/1"), "expected a number"))?;
    Ok(C::new(re, im))
}

fn parse_expr_field(src: &str, ptr: &str) -> Result<Expr> {
    parse_expr(src).map_err(|e| match e {
        Error::SyntaxError { offset, message } => {
            schema_err(ptr, format!("{message} (offset {offset})"))
        }
        other => other,
    })
}

fn from_json_at(v: &Value, ptr: &str) -> Result<CurveModel> {
    let obj = v.as_object().ok_or_else(|| schema_err(ptr, "expected an object"))?;
    let ty = get_str(obj, "type", ptr)?;
    match ty {
        "cycle" => Ok(CurveModel::StandardCycle),
        "exceptional1" => Ok(CurveModel::Exceptional1),
        "wcurve" => {
            let m = get_i64(obj, "m", ptr)?;
            let n = get_i64(obj, "n", ptr)?;
            CurveModel::wcurve(m, n).map_err(|e| schema_err(ptr, e.to_string()))
        }
        "constant_bending" => {
            let k = obj
                .get("kappa")
                .ok_or_else(|| schema_err(&format!("{ptr}/kappa"), "missing"))?;
            let kappa = complex_from(k, &format!("{ptr}/kappa"))?;
            CurveModel::constant_bending(kappa)
                .map_err(|e| schema_err(&format!("{ptr}/kappa"), e.to_string()))
        }
        "bryant" => {
            let g = parse_expr_field(get_str(obj, "g", ptr)?, &format!("{ptr}/g"))?;
            let h = parse_expr_field(get_str(obj, "h", ptr)?, &format!("{ptr}/h"))?;
            Ok(CurveModel::Bryant { g, h })
        }
        "kuy" => {
            let n = get_i64(obj, "n", ptr)?;
            kuy_example(n).map_err(|e| schema_err(&format!("{ptr}/n"), e.to_string()))
        }
        "lagrangian_pair" => {
            let lift = |key: &str| -> Result<Box<[Expr; 4]>> {
                let arr = obj
                    .get(key)
                    .and_then(Value::as_array)
                    .filter(|a| a.len() == 4)
                    .ok_or_else(|| {
                        schema_err(&format!("{ptr}/{key}"), "expected an array of 4 strings")
                    })?;
                let mut out = Vec::with_capacity(4);
                for (i, item) in arr.iter().enumerate() {
                    let p = format!("{ptr}/{key}/{i}");
                    let s = item.as_str().ok_or_else(|| schema_err(&p, "expected a string"))?;
                    out.push(parse_expr_field(s, &p)?);
                }
                Ok(Box::new([
                    out[0].clone(),
                    out[1].clone(),
                    out[2].clone(),
                    out[3].clone(),
                ]))
            };
            Ok(CurveModel::LagrangianPair { u1: lift("u1")?, u2: lift("u2")? })
        }
        "goursat" => {
            let xs = obj
                .get("X")
                .and_then(Value::as_array)
                .ok_or_else(|| schema_err(&format!("{ptr}/X"), "expected an array"))?;
            // flat 16 entries or 4 rows of 4, row-major either way
            let flat: Vec<&Value> = if xs.len() == 4 && xs.iter().all(|r| r.is_array() && r.as_array().unwrap().len() == 4 && r.as_array().unwrap()[0].is_array())
            {
                xs.iter().flat_map(|r| r.as_array().unwrap().iter()).collect()
            } else {
                xs.iter().collect()
            };
            if flat.len() != 16 {
                return Err(schema_err(&format!("{ptr}/X"), "expected 16 complex entries"));
            }
            let mut x = Mat4::zeros();
            for (k, v) in flat.iter().enumerate() {
                x[(k / 4, k % 4)] = complex_from(v, &format!("{ptr}/X/{k}"))?;
            }
            let inner_v = obj
                .get("inner")
                .ok_or_else(|| schema_err(&format!("{ptr}/inner"), "missing"))?;
            let inner = from_json_at(inner_v, &format!("{ptr}/inner"))?;
            CurveModel::goursat(inner, x).map_err(|e| schema_err(&format!("{ptr}/X"), e.to_string()))
        }
        other => Err(schema_err(&format!("{ptr}/type"), format!("unknown curve type '{other}'"))),
    }
}
