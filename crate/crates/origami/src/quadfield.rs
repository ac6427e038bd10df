//! Exact arithmetic for the imaginary quadratic field `Q(sqrt(m))`.
//!
//! Everything downstream works with three value types: arbitrary-precision
//! [`Rational`] scalars, field elements [`QuadElem`] written as
//! `re + co*sqrt(m)`, and fold [`Direction`]s, which are nonzero elements
//! taken modulo real scaling. Directions are canonicalized to a primitive
//! integer vector with a fixed sign, which models the quotient of the unit
//! circle by `{±1}` without ever leaving the field.
//!
//! All values are immutable and all operations are pure.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Arbitrary-precision rational scalar, always in canonical form
/// (reduced, denominator positive).
pub type Rational = num_rational::BigRational;

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("m must be a negative integer, got {0}")]
    NotNegative(i64),
    #[error("m must be squarefree, got {0} (divisible by {1}^2)")]
    NotSquarefree(i64, i64),
    #[error("|m| = {0} exceeds the supported limit {1}")]
    LimitExceeded(i64, i64),
    #[error("a direction needs a nonzero representative")]
    ZeroDirection,
    #[error("parse error: {0}")]
    Parse(String),
}

/// Which field we are working in: `Q(sqrt(m))` for squarefree `m < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldTag {
    m: i64,
}

impl FieldTag {
    /// Largest |m| accepted by [`FieldTag::new`].
    pub const DEFAULT_ABS_LIMIT: i64 = 1_000_000;

    pub fn new(m: i64) -> Result<Self, FieldError> {
        Self::with_limit(m, Self::DEFAULT_ABS_LIMIT)
    }

    /// Like [`FieldTag::new`] with a caller-chosen bound on |m|.
    pub fn with_limit(m: i64, abs_limit: i64) -> Result<Self, FieldError> {
        if m >= 0 {
            return Err(FieldError::NotNegative(m));
        }
        let a = m.unsigned_abs() as i64;
        if a > abs_limit {
            return Err(FieldError::LimitExceeded(a, abs_limit));
        }
        let mut d = 2i64;
        while d * d <= a {
            if a % (d * d) == 0 {
                return Err(FieldError::NotSquarefree(m, d));
            }
            d += 1;
        }
        Ok(FieldTag { m })
    }

    pub fn m(&self) -> i64 {
        self.m
    }
}

/// An element `re + co*sqrt(m)` of `Q(sqrt(m))`.
///
/// Elements carry their [`FieldTag`]; combining elements of different fields
/// is a logic error and panics. Ordering is lexicographic on `(re, co)`,
/// which gives every point set a canonical enumeration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadElem {
    re: Rational,
    co: Rational,
    tag: FieldTag,
}

impl QuadElem {
    pub fn new(re: Rational, co: Rational, tag: FieldTag) -> Self {
        QuadElem { re, co, tag }
    }

    /// `a + b*sqrt(m)` from integer coefficients.
    pub fn from_ints(a: i64, b: i64, tag: FieldTag) -> Self {
        QuadElem::new(rat_int(a), rat_int(b), tag)
    }

    /// `(a + b*sqrt(m)) / 2` from integer coefficients.
    pub fn from_half_ints(a: i64, b: i64, tag: FieldTag) -> Self {
        QuadElem::new(rat(a, 2), rat(b, 2), tag)
    }

    pub fn zero(tag: FieldTag) -> Self {
        QuadElem::from_ints(0, 0, tag)
    }

    pub fn one(tag: FieldTag) -> Self {
        QuadElem::from_ints(1, 0, tag)
    }

    /// The element `sqrt(m)` itself.
    pub fn sqrt_m(tag: FieldTag) -> Self {
        QuadElem::from_ints(0, 1, tag)
    }

    pub fn re(&self) -> &Rational {
        &self.re
    }

    pub fn co(&self) -> &Rational {
        &self.co
    }

    pub fn tag(&self) -> FieldTag {
        self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.co.is_zero()
    }

    /// Complex conjugate: negates the `sqrt(m)` coefficient.
    pub fn conj(&self) -> Self {
        QuadElem::new(self.re.clone(), -self.co.clone(), self.tag)
    }

    /// Multiply by a rational scalar.
    pub fn scale(&self, r: &Rational) -> Self {
        QuadElem::new(&self.re * r, &self.co * r, self.tag)
    }

    /// `|z|^2 = re^2 - m*co^2`, an exact nonnegative rational.
    pub fn norm_sq(&self) -> Rational {
        &self.re * &self.re - &(&self.co * &self.co) * rat_int(self.tag.m)
    }

    /// Floating-point coordinates `(re, co*sqrt(|m|))` in the plane.
    pub fn to_xy(&self) -> (f64, f64) {
        let s = (self.tag.m.unsigned_abs() as f64).sqrt();
        (rational_to_f64(&self.re), rational_to_f64(&self.co) * s)
    }

    /// Parse the textual form `a/b+c/d*sqrt(m)`; see the module docs of
    /// [`crate::cli`] for the accepted grammar. The `sqrt` argument, when
    /// present, must equal `tag.m()`.
    pub fn parse(s: &str, tag: FieldTag) -> Result<Self, FieldError> {
        parse_quad(s, tag)
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn assert_same_tag(a: &QuadElem, b: &QuadElem) {
    assert_eq!(
        a.tag, b.tag,
        "cannot combine elements of Q(sqrt({})) and Q(sqrt({}))",
        a.tag.m, b.tag.m
    );
}

impl std::ops::Add for &QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: &QuadElem) -> QuadElem {
        assert_same_tag(self, rhs);
        QuadElem::new(&self.re + &rhs.re, &self.co + &rhs.co, self.tag)
    }
}

impl std::ops::Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: &QuadElem) -> QuadElem {
        assert_same_tag(self, rhs);
        QuadElem::new(&self.re - &rhs.re, &self.co - &rhs.co, self.tag)
    }
}

impl std::ops::Mul for &QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: &QuadElem) -> QuadElem {
        assert_same_tag(self, rhs);
        let m = rat_int(self.tag.m);
        QuadElem::new(
            &self.re * &rhs.re + &(&self.co * &rhs.co) * &m,
            &self.re * &rhs.co + &self.co * &rhs.re,
            self.tag,
        )
    }
}

impl std::ops::Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(-self.re.clone(), -self.co.clone(), self.tag)
    }
}

impl std::ops::Add for QuadElem {
    type Output = QuadElem;
    fn add(self, rhs: QuadElem) -> QuadElem {
        &self + &rhs
    }
}

impl std::ops::Sub for QuadElem {
    type Output = QuadElem;
    fn sub(self, rhs: QuadElem) -> QuadElem {
        &self - &rhs
    }
}

impl std::ops::Mul for QuadElem {
    type Output = QuadElem;
    fn mul(self, rhs: QuadElem) -> QuadElem {
        &self * &rhs
    }
}

impl std::ops::Neg for QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        -&self
    }
}

/// The antisymmetric form underlying the intersection operator.
///
/// For `x, y` in `Q(sqrt(m))` the complex value `conj(x)*y - x*conj(y)` is
/// always a rational multiple of `sqrt(m)`; this returns that rational,
/// namely `2*(re(x)*co(y) - co(x)*re(y))`. Only ratios of brackets are ever
/// consumed, so the common `sqrt(m)` factor never needs to be materialized.
pub fn bracket(x: &QuadElem, y: &QuadElem) -> Rational {
    assert_same_tag(x, y);
    (&x.re * &y.co - &x.co * &y.re) * rat_int(2)
}

/// A fold direction: a nonzero element of `Q(sqrt(m))` modulo nonzero real
/// scaling.
///
/// The canonical representative is the primitive integer vector obtained by
/// clearing denominators and dividing by the gcd, with the sign fixed so the
/// first nonzero coordinate in `(co, re)` order is positive. Two directions
/// are equal iff their canonical representatives are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Direction {
    rep: QuadElem,
}

impl Direction {
    pub fn new(x: &QuadElem) -> Result<Self, FieldError> {
        if x.is_zero() {
            return Err(FieldError::ZeroDirection);
        }
        let l = Rational::from_integer(x.re.denom().lcm(x.co.denom()));
        let mut nr = (&x.re * &l).to_integer();
        let mut nc = (&x.co * &l).to_integer();
        let g = nr.gcd(&nc);
        nr /= &g;
        nc /= &g;
        if nc.is_negative() || (nc.is_zero() && nr.is_negative()) {
            nr = -nr;
            nc = -nc;
        }
        Ok(Direction {
            rep: QuadElem::new(
                Rational::from_integer(nr),
                Rational::from_integer(nc),
                x.tag,
            ),
        })
    }

    /// The canonical representative (a primitive integer vector).
    pub fn rep(&self) -> &QuadElem {
        &self.rep
    }

    pub fn tag(&self) -> FieldTag {
        self.rep.tag
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.rep.fmt(f)
    }
}

/// Canonicalize a nonzero element into a [`Direction`].
pub fn canonical_direction(x: &QuadElem) -> Result<Direction, FieldError> {
    Direction::new(x)
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.co.is_zero() {
            return write!(f, "{}", self.re);
        }
        if !self.re.is_zero() {
            write!(f, "{}", self.re)?;
            write!(f, "{}", if self.co.is_negative() { "-" } else { "+" })?;
        } else if self.co.is_negative() {
            write!(f, "-")?;
        }
        write!(f, "{}*sqrt({})", self.co.abs(), self.tag.m)
    }
}

/// Parse a rational written as `n` or `n/d`.
pub fn parse_rational(s: &str) -> Result<Rational, FieldError> {
    let bad = || FieldError::Parse(format!("invalid rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n).map_err(|_| bad())?;
            let d = BigInt::from_str(d).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(FieldError::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

fn parse_quad(input: &str, tag: FieldTag) -> Result<QuadElem, FieldError> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(FieldError::Parse("empty element".into()));
    }
    // Split into signed terms at top-level +/-.
    let mut terms: Vec<String> = Vec::new();
    let mut cur = String::new();
    let mut depth = 0u32;
    for (i, ch) in s.chars().enumerate() {
        match ch {
            '(' => depth += 1,
            ')' => {
                if depth == 0 {
                    return Err(FieldError::Parse(format!("unbalanced parens in {input:?}")));
                }
                depth -= 1;
            }
            '+' | '-' if depth == 0 && i > 0 => {
                terms.push(std::mem::take(&mut cur));
            }
            _ => {}
        }
        cur.push(ch);
    }
    if depth != 0 {
        return Err(FieldError::Parse(format!("unbalanced parens in {input:?}")));
    }
    terms.push(cur);

    let mut re: Option<Rational> = None;
    let mut co: Option<Rational> = None;
    for term in &terms {
        let t = term.strip_prefix('+').unwrap_or(term);
        if let Some(pos) = t.find("sqrt(") {
            if !t.ends_with(')') {
                return Err(FieldError::Parse(format!("malformed sqrt term {term:?}")));
            }
            let inner = &t[pos + 5..t.len() - 1];
            let m: i64 = inner
                .parse()
                .map_err(|_| FieldError::Parse(format!("invalid sqrt argument {inner:?}")))?;
            if m != tag.m() {
                return Err(FieldError::Parse(format!(
                    "sqrt({m}) does not belong to Q(sqrt({}))",
                    tag.m()
                )));
            }
            let coef = match &t[..pos] {
                "" => Rational::one(),
                "-" => -Rational::one(),
                c => {
                    let c = c.strip_suffix('*').ok_or_else(|| {
                        FieldError::Parse(format!("expected '*' before sqrt in {term:?}"))
                    })?;
                    parse_rational(c)?
                }
            };
            if co.replace(coef).is_some() {
                return Err(FieldError::Parse(format!("duplicate sqrt term in {input:?}")));
            }
        } else {
            let val = parse_rational(t)?;
            if re.replace(val).is_some() {
                return Err(FieldError::Parse(format!("duplicate rational term in {input:?}")));
            }
        }
    }
    Ok(QuadElem::new(
        re.unwrap_or_else(Rational::zero),
        co.unwrap_or_else(Rational::zero),
        tag,
    ))
}
