//! Exact arithmetic in real quadratic fields Q(√d).
//!
//! Every real quantity in the crate is a [`QuadReal`]. Rationals carry
//! `d = 0` and mix freely with any field; two irrationals over different
//! radicands are rejected.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `a + b·√d`, kept canonical: `d` squarefree, and `d = 0, b = 0` for rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadReal {
    a: Rat,
    b: Rat,
    d: u64,
}

/// Split `n` into `s² · r` with `r` squarefree.
fn squarefree_split_u64(mut n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut r = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            r *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (s, r * n)
}

impl QuadReal {
    pub fn zero() -> Self {
        Self::from_rat(Rat::zero())
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn int(n: i64) -> Self {
        Self::from_rat(rat_int(n))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_rat(Rat::from_integer(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::from_rat(rat(n, d))
    }

    pub fn from_rat(a: Rat) -> Self {
        QuadReal { a, b: Rat::zero(), d: 0 }
    }

    /// `a + b√d` for any non-negative `d`; square factors of `d` are pulled out.
    pub fn new(a: Rat, b: Rat, d: u64) -> Self {
        if b.is_zero() || d == 0 {
            return Self::from_rat(a);
        }
        let (s, r) = squarefree_split_u64(d);
        let b = b * rat_int(s as i64);
        if r == 1 {
            return Self::from_rat(a + b);
        }
        QuadReal { a, b, d: r }
    }

    /// `√d`.
    pub fn sqrt(d: u64) -> Self {
        Self::new(Rat::zero(), Rat::one(), d)
    }

    /// `(an/ad) + (bn/bd)·√d`.
    pub fn surd(an: i64, ad: i64, bn: i64, bd: i64, d: u64) -> Self {
        Self::new(rat(an, ad), rat(bn, bd), d)
    }

    pub fn a(&self) -> &Rat {
        &self.a
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.a.is_integer()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn as_rat(&self) -> Option<&Rat> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    /// Galois conjugate `a − b√d`.
    pub fn conj(&self) -> Self {
        QuadReal { a: self.a.clone(), b: -self.b.clone(), d: self.d }
    }

    /// Field norm `a² − b²d`.
    pub fn norm(&self) -> Rat {
        &self.a * &self.a - &self.b * &self.b * rat_int(self.d as i64)
    }

    pub fn trace(&self) -> Rat {
        &self.a * rat_int(2)
    }

    fn field(&self, other: &Self) -> Result<u64> {
        match (self.d, other.d) {
            (0, e) => Ok(e),
            (d, 0) => Ok(d),
            (d, e) if d == e => Ok(d),
            (d, e) => Err(Error::IncompatibleFields(d, e)),
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        Ok(Self::new(&self.a + &o.a, &self.b + &o.b, d))
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        Ok(Self::new(&self.a - &o.a, &self.b - &o.b, d))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        let d = self.field(o)?;
        let dd = rat_int(d as i64);
        let a = &self.a * &o.a + &self.b * &o.b * dd;
        let b = &self.a * &o.b + &self.b * &o.a;
        Ok(Self::new(a, b, d))
    }

    pub fn try_div(&self, o: &Self) -> Result<Self> {
        if o.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let d = self.field(o)?;
        let n = o.norm();
        let num = self.try_mul(&o.conj())?;
        Ok(Self::new(num.a / &n, num.b / &n, d))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::one().try_div(self)
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Self::new(&self.a * r, &self.b * r, self.d)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact sign: −1, 0 or 1.
    pub fn signum(&self) -> i32 {
        let sa = sgn(&self.a);
        let sb = sgn(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // opposite signs: compare a² with b²d
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * rat_int(self.d as i64);
        if a2 > b2d {
            sa
        } else {
            sb
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Largest integer `n` with `n ≤ self`.
    pub fn floor(&self) -> BigInt {
        if self.is_rational() {
            return self.a.floor().to_integer();
        }
        let t = &self.b * &self.b * rat_int(self.d as i64);
        let r = floor_sqrt_rat(&t);
        let fa = self.a.floor().to_integer();
        let mut n = if self.b.is_positive() { fa + r } else { fa - r - 1 };
        loop {
            let diff = self - &QuadReal::from_bigint(n.clone());
            if diff.signum() < 0 {
                n -= 1;
                continue;
            }
            let diff1 = &diff - &QuadReal::one();
            if diff1.signum() >= 0 {
                n += 1;
                continue;
            }
            return n;
        }
    }

    pub fn ceil(&self) -> BigInt {
        -((-self).floor())
    }

    /// `⌊x⌋ + 1/2`, defined only off the integers.
    pub fn round_half(&self) -> Result<Rat> {
        if self.is_integer() {
            return Err(Error::HalfPointUndefined);
        }
        Ok(Rat::from_integer(self.floor()) + rat(1, 2))
    }

    /// Nearest integer, ties rounded up.
    pub fn round_nearest(&self) -> BigInt {
        (self + &QuadReal::frac(1, 2)).floor()
    }

    /// Fractional part `x − ⌊x⌋ ∈ [0,1)`.
    pub fn fract(&self) -> Self {
        self - &QuadReal::from_bigint(self.floor())
    }

    pub fn floor_i64(&self) -> i64 {
        self.floor().to_i64().expect("floor fits in i64")
    }

    pub fn ceil_i64(&self) -> i64 {
        self.ceil().to_i64().expect("ceil fits in i64")
    }

    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    pub fn max(self, o: Self) -> Self {
        if compare(&self, &o).expect("comparable") == Ordering::Less {
            o
        } else {
            self
        }
    }

    pub fn min(self, o: Self) -> Self {
        if compare(&self, &o).expect("comparable") == Ordering::Greater {
            o
        } else {
            self
        }
    }
}

fn sgn(r: &Rat) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

/// `⌊√t⌋` for a non-negative rational.
fn floor_sqrt_rat(t: &Rat) -> BigInt {
    let n = t.numer() * t.denom();
    n.sqrt() / t.denom()
}

/// Exact ordering of `x` and `y`.
pub fn compare(x: &QuadReal, y: &QuadReal) -> Result<Ordering> {
    let diff = x.try_sub(y)?;
    Ok(diff.signum().cmp(&0))
}

impl PartialOrd for QuadReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        compare(self, other).ok()
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $f:ident) => {
        impl<'a> $tr<&'a QuadReal> for &'a QuadReal {
            type Output = QuadReal;
            fn $m(self, o: &'a QuadReal) -> QuadReal {
                self.$f(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<QuadReal> for QuadReal {
            type Output = QuadReal;
            fn $m(self, o: QuadReal) -> QuadReal {
                (&self).$f(&o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<'a> $tr<&'a QuadReal> for QuadReal {
            type Output = QuadReal;
            fn $m(self, o: &'a QuadReal) -> QuadReal {
                (&self).$f(o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl<'a> $tr<QuadReal> for &'a QuadReal {
            type Output = QuadReal;
            fn $m(self, o: QuadReal) -> QuadReal {
                self.$f(&o).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);
binop!(Div, div, try_div);

impl Neg for QuadReal {
    type Output = QuadReal;
    fn neg(self) -> QuadReal {
        QuadReal { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Neg for &QuadReal {
    type Output = QuadReal;
    fn neg(self) -> QuadReal {
        -(self.clone())
    }
}

impl From<i64> for QuadReal {
    fn from(n: i64) -> Self {
        QuadReal::int(n)
    }
}

impl From<Rat> for QuadReal {
    fn from(r: Rat) -> Self {
        QuadReal::from_rat(r)
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for QuadReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", fmt_rat(&self.a));
        }
        let babs = fmt_rat(&self.b.abs());
        if self.a.is_zero() {
            let sign = if self.b.is_negative() { "-" } else { "" };
            write!(f, "{sign}{babs}*sqrt({})", self.d)
        } else {
            let sign = if self.b.is_negative() { '-' } else { '+' };
            write!(f, "{} {sign} {babs}*sqrt({})", fmt_rat(&self.a), self.d)
        }
    }
}

fn perr(pos: usize, msg: &str) -> Error {
    Error::Parse { pos, msg: msg.to_string() }
}

fn parse_rat(s: &str, pos: usize) -> Result<Rat> {
    let s = s.trim();
    if s.is_empty() {
        return Err(perr(pos, "expected a number"));
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| perr(pos, "bad numerator"))?;
            let d: BigInt = d.trim().parse().map_err(|_| perr(pos, "bad denominator"))?;
            if d.is_zero() {
                return Err(perr(pos, "zero denominator"));
            }
            Ok(Rat::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| perr(pos, "bad integer"))?;
            Ok(Rat::from_integer(n))
        }
    }
}

impl FromStr for QuadReal {
    type Err = Error;

    /// Accepts sums of terms `p/q` and `p/q*sqrt(d)` (also `sqrt(d)` alone).
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(perr(0, "empty input"));
        }
        let bytes = s.as_bytes();
        let mut terms: Vec<(usize, bool, String)> = Vec::new();
        let mut start = 0;
        let mut neg = false;
        let mut depth = 0;
        let mut i = 0;
        if bytes[0] == b'+' || bytes[0] == b'-' {
            neg = bytes[0] == b'-';
            start = 1;
            i = 1;
        }
        while i < bytes.len() {
            match bytes[i] {
                b'(' => depth += 1,
                b')' => depth -= 1,
                b'+' | b'-' if depth == 0 => {
                    terms.push((start, neg, s[start..i].to_string()));
                    neg = bytes[i] == b'-';
                    start = i + 1;
                }
                _ => {}
            }
            i += 1;
        }
        terms.push((start, neg, s[start..].to_string()));
        let mut acc = QuadReal::zero();
        for (pos, neg, t) in terms {
            let v = if let Some(idx) = t.find("sqrt(") {
                let close = t.rfind(')').ok_or_else(|| perr(pos + idx, "unclosed sqrt("))?;
                let d: u64 = t[idx + 5..close]
                    .parse()
                    .map_err(|_| perr(pos + idx + 5, "bad radicand"))?;
                let coef = t[..idx].trim_end_matches('*');
                let c = if coef.is_empty() { Rat::one() } else { parse_rat(coef, pos)? };
                QuadReal::new(Rat::zero(), c, d)
            } else {
                QuadReal::from_rat(parse_rat(&t, pos)?)
            };
            let v = if neg { -v } else { v };
            acc = acc.try_add(&v)?;
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Continued fractions
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum CfKind {
    /// `x = d0 + 1/(d1 + 1/(d2 + …))`.
    Regular,
    /// `x = d0 − 1/(d1 − 1/(d2 − …))`; a head of `0` means `x = 1/(d1 − …)` in (0,1).
    Negative,
}

/// Digits of a continued fraction. `preperiod[0]` is the integer head.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContinuedFraction {
    pub kind: CfKind,
    pub preperiod: Vec<i64>,
    pub period: Vec<i64>,
    /// Radicand of the value's field, when known; speeds up evaluation.
    pub radicand: Option<u64>,
}

/// Value of a CF plus, for a purely periodic tail, the convergent matrix of one period.
#[derive(Clone, Debug, PartialEq)]
pub struct CfValue {
    pub value: QuadReal,
    pub matrix: Option<[[BigInt; 2]; 2]>,
}

/// `x = (m + n√d)/k` with integers, `k > 0`.
fn integral_form(x: &QuadReal) -> (BigInt, BigInt, BigInt) {
    let k = x.a.denom().lcm(x.b.denom());
    let m = x.a.numer() * (&k / x.a.denom());
    let n = x.b.numer() * (&k / x.b.denom());
    (m, n, k)
}

/// Surd state `(P + √D)/Q` with `Q | D − P²`.
fn surd_state(x: &QuadReal) -> (BigInt, BigInt, BigInt) {
    let (m, n, k) = integral_form(x);
    let dd = &n * &n * BigInt::from(x.d) * &k * &k;
    if n.is_positive() {
        (&m * &k, &k * &k, dd)
    } else {
        (-(&m * &k), -(&k * &k), dd)
    }
}

/// `⌊(P + √D)/Q⌋` for non-square `D`.
fn floor_surd(p: &BigInt, q: &BigInt, s: &BigInt) -> BigInt {
    if q.is_positive() {
        (p + s).div_floor(q)
    } else {
        (-p - s - BigInt::one()).div_floor(&(-q))
    }
}

fn to_i64(n: &BigInt) -> Result<i64> {
    n.to_i64().ok_or_else(|| Error::Domain(format!("digit {n} exceeds i64")))
}

/// Streams CF digits of `x`; the first item is the head.
pub struct CfDigits {
    kind: CfKind,
    state: DigitState,
    first: bool,
}

enum DigitState {
    Rational(Rat),
    Surd { p: BigInt, q: BigInt, d: BigInt, s: BigInt, head: Option<BigInt> },
    Done,
}

impl CfDigits {
    pub fn new(x: &QuadReal, kind: CfKind) -> Self {
        let state = if x.is_rational() {
            DigitState::Rational(x.a.clone())
        } else {
            let (p, q, d) = surd_state(x);
            let s = d.sqrt();
            DigitState::Surd { p, q, d, s, head: None }
        };
        CfDigits { kind, state, first: true }
    }

    /// Current surd state `(P, Q)` of the tail after the last emitted digit.
    fn surd_key(&self) -> Option<(BigInt, BigInt)> {
        match &self.state {
            DigitState::Surd { p, q, .. } => Some((p.clone(), q.clone())),
            _ => None,
        }
    }
}

impl Iterator for CfDigits {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let first = std::mem::replace(&mut self.first, false);
        match (&mut self.state, self.kind) {
            (DigitState::Done, _) => None,
            (DigitState::Rational(r), CfKind::Regular) => {
                let dgt = r.floor().to_integer();
                let rest = &*r - Rat::from_integer(dgt.clone());
                if rest.is_zero() {
                    self.state = DigitState::Done;
                } else {
                    *r = rest.recip();
                }
                Some(dgt)
            }
            (DigitState::Rational(r), CfKind::Negative) => {
                if r.is_integer() {
                    let dgt = r.to_integer();
                    self.state = DigitState::Done;
                    return Some(dgt);
                }
                let dgt = if first && r.is_positive() && *r < Rat::one() {
                    BigInt::zero()
                } else {
                    r.floor().to_integer() + 1
                };
                if dgt.is_zero() {
                    *r = r.recip();
                } else {
                    *r = (Rat::from_integer(dgt.clone()) - &*r).recip();
                }
                Some(dgt)
            }
            (DigitState::Surd { p, q, d, s, .. }, CfKind::Regular) => {
                let a = floor_surd(p, q, s);
                let p1 = &a * &*q - &*p;
                let q1 = (&*d - &p1 * &p1) / &*q;
                *p = p1;
                *q = q1;
                Some(a)
            }
            (DigitState::Surd { p, q, d, s, head }, CfKind::Negative) => {
                let fl = floor_surd(p, q, s);
                if first && fl.is_zero() && head.is_none() {
                    // x ∈ (0,1): tail is 1/x
                    let p1 = -p.clone();
                    let q1 = (&*d - &*p * &*p) / &*q;
                    *p = p1;
                    *q = q1;
                    *head = Some(BigInt::zero());
                    return Some(BigInt::zero());
                }
                let a = fl + 1;
                let p1 = &a * &*q - &*p;
                let q1 = (&p1 * &p1 - &*d) / &*q;
                *p = p1;
                *q = q1;
                Some(a)
            }
        }
    }
}

/// Expand `x` with exact period detection on the surd state `(P, Q)`.
pub fn cf_expand(x: &QuadReal, kind: CfKind) -> Result<ContinuedFraction> {
    if x.signum() <= 0 {
        return Err(Error::Domain("continued fraction input must be positive".into()));
    }
    let mut it = CfDigits::new(x, kind);
    if x.is_rational() {
        let digits = it.map(|n| to_i64(&n)).collect::<Result<Vec<_>>>()?;
        return Ok(ContinuedFraction { kind, preperiod: digits, period: vec![], radicand: None });
    }
    let head = it.next().ok_or(Error::NonQuadraticInput)?;
    let mut digits = vec![to_i64(&head)?];
    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    // Lagrange bounds the period by O(D); guard against runaway input anyway.
    for _ in 0..10_000_000usize {
        let key = it.surd_key().ok_or(Error::NonQuadraticInput)?;
        if let Some(&start) = seen.get(&key) {
            let period = digits.split_off(start);
            return Ok(ContinuedFraction {
                kind,
                preperiod: digits,
                period,
                radicand: Some(x.d),
            });
        }
        seen.insert(key, digits.len());
        let dgt = it.next().ok_or(Error::NonQuadraticInput)?;
        digits.push(to_i64(&dgt)?);
    }
    Err(Error::NonQuadraticInput)
}

/// First `n` digits (head included) of `x`.
pub fn cf_prefix(x: &QuadReal, kind: CfKind, n: usize) -> Vec<BigInt> {
    CfDigits::new(x, kind).take(n).collect()
}

fn mat_mul(x: &[[BigInt; 2]; 2], y: &[[BigInt; 2]; 2]) -> [[BigInt; 2]; 2] {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

fn digit_matrix(kind: CfKind, dgt: i64) -> [[BigInt; 2]; 2] {
    let lower = match kind {
        CfKind::Regular => 1,
        CfKind::Negative => -1,
    };
    [
        [BigInt::zero(), BigInt::one()],
        [BigInt::from(lower), BigInt::from(dgt)],
    ]
}

/// `∏ [[0,1],[±1,d_j]]` over the digits (sign `+` regular, `−` negative).
pub fn convergent_matrix(kind: CfKind, digits: &[i64]) -> [[BigInt; 2]; 2] {
    let mut m = [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]];
    for &dgt in digits {
        m = mat_mul(&m, &digit_matrix(kind, dgt));
    }
    m
}

/// Square root of a non-negative integer inside Q(√hint) or a fresh field.
fn sqrt_integer(n: &BigInt, hint: Option<u64>) -> Result<QuadReal> {
    if n.is_negative() {
        return Err(Error::NonQuadraticInput);
    }
    let s = n.sqrt();
    if &s * &s == *n {
        return Ok(QuadReal::from_bigint(s));
    }
    if let Some(d) = hint.filter(|&d| d > 1) {
        let bd = BigInt::from(d);
        if (n % &bd).is_zero() {
            let q = n / &bd;
            let r = q.sqrt();
            if &r * &r == q {
                return Ok(QuadReal::new(Rat::zero(), Rat::from_integer(r), d));
            }
        }
    }
    // Trial division, then the unfactored cofactor r has no prime below B:
    // r < B³ is squarefree unless a perfect square.
    const B: u64 = 100_000;
    let mut rest = n.clone();
    let mut sq = BigInt::one();
    let mut free = BigInt::one();
    let mut p = 2u64;
    while p < B {
        let bp = BigInt::from(p);
        if &bp * &bp > rest {
            break;
        }
        let mut e = 0;
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            e += 1;
        }
        for _ in 0..e / 2 {
            sq *= &bp;
        }
        if e % 2 == 1 {
            free *= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    let r = rest.sqrt();
    if &r * &r == rest {
        sq *= r;
    } else if rest < BigInt::from(B).pow(3) || &BigInt::from(p) * BigInt::from(p) > rest {
        free *= rest;
    } else {
        return Err(Error::NonQuadraticInput);
    }
    let d = free.to_u64().ok_or(Error::NonQuadraticInput)?;
    Ok(QuadReal::new(Rat::zero(), Rat::from_integer(sq), d))
}

/// Evaluate a CF exactly; purely periodic tails also report their period matrix.
pub fn cf_eval(cf: &ContinuedFraction) -> Result<CfValue> {
    if cf.preperiod.is_empty() && cf.period.is_empty() {
        return Err(Error::EmptyExpansion);
    }
    let (head, pre) = if cf.preperiod.is_empty() {
        (None, &cf.preperiod[..])
    } else {
        (Some(cf.preperiod[0]), &cf.preperiod[1..])
    };
    let mut matrix = None;
    // value of the tail [t1, t2, ...] as a number in [0,1)
    let mut t = if cf.period.is_empty() {
        QuadReal::zero()
    } else {
        let m = convergent_matrix(cf.kind, &cf.period);
        // t = (A t + B)/(C t + D)  ⇒  C t² + (D − A) t − B = 0
        let (a, b, c, d) = (&m[0][0], &m[0][1], &m[1][0], &m[1][1]);
        let disc = (d - a) * (d - a) + BigInt::from(4) * b * c;
        let root = sqrt_integer(&disc, cf.radicand)?;
        let two_c = QuadReal::from_bigint(BigInt::from(2) * c);
        let base = QuadReal::from_bigint(a - d);
        let cands = [(&base + &root) / &two_c, (&base - &root) / &two_c];
        let zero = QuadReal::zero();
        let one = QuadReal::one();
        let t = cands
            .into_iter()
            .find(|v| *v > zero && *v < one)
            .ok_or(Error::NonQuadraticInput)?;
        matrix = Some(m);
        t
    };
    for &dgt in pre.iter().rev() {
        let dq = QuadReal::int(dgt);
        t = match cf.kind {
            CfKind::Regular => (&dq + &t).recip()?,
            CfKind::Negative => (&dq - &t).recip()?,
        };
    }
    let value = match (head, cf.kind) {
        (None, _) => t,
        (Some(h), CfKind::Regular) => &QuadReal::int(h) + &t,
        (Some(0), CfKind::Negative) => t,
        (Some(h), CfKind::Negative) => &QuadReal::int(h) - &t,
    };
    let purely_periodic = pre.is_empty() && head.map_or(true, |h| h == 0);
    if !purely_periodic {
        matrix = None;
    }
    Ok(CfValue { value, matrix })
}

impl fmt::Display for ContinuedFraction {
    /// `[d0; d1, d2, (p1 p2)]`, with a trailing `*` for negative expansions.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        let mut parts: Vec<String> = Vec::new();
        let mut iter = self.preperiod.iter();
        let head = iter.next();
        if let Some(h) = head {
            write!(f, "{h}; ")?;
        } else {
            write!(f, "; ")?;
        }
        parts.extend(iter.map(|d| d.to_string()));
        if !self.period.is_empty() {
            let p: Vec<String> = self.period.iter().map(|d| d.to_string()).collect();
            parts.push(format!("({})", p.join(" ")));
        }
        write!(f, "{}]", parts.join(", "))?;
        if self.kind == CfKind::Negative {
            write!(f, "*")?;
        }
        Ok(())
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let (t, kind) = match t.strip_suffix('*') {
            Some(r) => (r.trim_end(), CfKind::Negative),
            None => (t, CfKind::Regular),
        };
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| perr(0, "continued fraction must be bracketed"))?;
        let (head, tail) = match inner.split_once(';') {
            Some((h, r)) => (Some(h.trim()), r),
            None => (None, inner),
        };
        let mut preperiod = Vec::new();
        if let Some(h) = head.filter(|h| !h.is_empty()) {
            preperiod.push(h.parse().map_err(|_| perr(1, "bad head digit"))?);
        }
        let mut period = Vec::new();
        let (plain, per) = match tail.find('(') {
            Some(i) => {
                let close = tail.rfind(')').ok_or_else(|| perr(i, "unclosed period"))?;
                (&tail[..i], Some(&tail[i + 1..close]))
            }
            None => (tail, None),
        };
        for tok in plain.split([',', ' ']).map(str::trim).filter(|x| !x.is_empty()) {
            preperiod.push(tok.parse().map_err(|_| perr(0, "bad digit"))?);
        }
        if let Some(p) = per {
            for tok in p.split([',', ' ']).map(str::trim).filter(|x| !x.is_empty()) {
                period.push(tok.parse().map_err(|_| perr(0, "bad period digit"))?);
            }
        }
        Ok(ContinuedFraction { kind, preperiod, period, radicand: None })
    }
}

/// Purely periodic regular CF `[(d1 … dk)]` in (0,1).
pub fn periodic_cf(period: &[i64]) -> ContinuedFraction {
    ContinuedFraction {
        kind: CfKind::Regular,
        preperiod: vec![0],
        period: period.to_vec(),
        radicand: None,
    }
}

/// Root of `x² + u x + v` lying in `(0,1)`, if any.
pub fn quad_root_in_unit(u: &Rat, v: &Rat) -> Result<QuadReal> {
    // x = (−u ± √(u² − 4v))/2 ; write the discriminant over a square denominator
    let disc = u * u - v * rat_int(4);
    if disc.is_negative() {
        return Err(Error::Domain("no real root".into()));
    }
    let den = disc.denom().clone();
    let num = disc.numer() * &den;
    let root = sqrt_integer(&num, None)?.scale(&Rat::new(BigInt::one(), den));
    let base = QuadReal::from_rat(-u.clone());
    let half = rat(1, 2);
    let zero = QuadReal::zero();
    let one = QuadReal::one();
    [(&base + &root).scale(&half), (&base - &root).scale(&half)]
        .into_iter()
        .find(|x| *x > zero && *x < one)
        .ok_or_else(|| Error::Domain("no root in (0,1)".into()))
}
