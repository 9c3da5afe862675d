//! Exact arithmetic in cyclotomic fields.
//!
//! Evaluation parameters are restricted to scalars of the form `q * zeta_L^e`
//! with `q` a nonzero rational and `zeta_L = exp(2 pi i / L)`. Products,
//! quotients and integer powers of such scalars stay in the class, and finite
//! sums of them are tested for zero by reduction modulo the `L`-th cyclotomic
//! polynomial. General elements of `Q(zeta_L)` are available as [`CycNum`],
//! which the realizer uses for exact row reduction.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("cyclotomic order mismatch: {0} vs {1}")]
    OrderMismatch(u32, u32),
    #[error("scalar must be nonzero")]
    Zero,
    #[error("cyclotomic order must be positive")]
    BadOrder,
    #[error("cannot lift order {from} to {to}: not a multiple")]
    NotAMultiple { from: u32, to: u32 },
    #[error("zero denominator")]
    ZeroDenominator,
}

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// Integer polynomial helpers, coefficients low degree first.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    // den is monic
    let mut rem: Vec<BigInt> = num.to_vec();
    let dd = den.len() - 1;
    if rem.len() <= dd {
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
        quot[k] = c;
    }
    debug_assert!(rem.iter().all(|c| c.is_zero()));
    quot
}

/// The `l`-th cyclotomic polynomial, obtained by dividing `x^l - 1` by
/// `Phi_d` for every proper divisor `d` of `l`.
pub fn cyclotomic_polynomial(l: u32) -> Vec<BigInt> {
    assert!(l > 0, "cyclotomic order must be positive");
    let mut p = vec![BigInt::zero(); l as usize + 1];
    p[0] = BigInt::from(-1);
    p[l as usize] = BigInt::one();
    for d in 1..l {
        if l % d == 0 {
            p = poly_div_exact(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

pub fn euler_phi(l: u32) -> usize {
    (1..=l).filter(|k| k.gcd(&l) == 1).count()
}

pub fn lcm(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

/// The field `Q(zeta_L)` with its defining polynomial.
#[derive(Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    order: u32,
    modulus: Vec<Rational>,
}

impl CyclotomicField {
    pub fn new(order: u32) -> Arc<Self> {
        let modulus = cyclotomic_polynomial(order)
            .into_iter()
            .map(BigRational::from_integer)
            .collect();
        Arc::new(CyclotomicField { order, modulus })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Degree of the field over `Q`.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Reduce an arbitrary coefficient vector (powers of zeta) modulo `Phi_L`.
    fn reduce(&self, mut c: Vec<Rational>) -> Vec<Rational> {
        let deg = self.degree();
        for k in (deg..c.len()).rev() {
            if c[k].is_zero() {
                continue;
            }
            let lead = c[k].clone();
            for j in 0..=deg {
                let t = &lead * &self.modulus[j];
                c[k - deg + j] -= t;
            }
        }
        c.truncate(deg);
        c.resize(deg, Rational::zero());
        c
    }
}

/// An element of `Q(zeta_L)`, stored as its reduced coefficient vector.
#[derive(Clone, PartialEq, Eq)]
pub struct CycNum {
    field: Arc<CyclotomicField>,
    coeffs: Vec<Rational>,
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| match j {
                0 => format!("{c}"),
                _ => format!("{c}*z{}^{j}", self.field.order),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + "))
        }
    }
}

impl CycNum {
    pub fn zero(field: &Arc<CyclotomicField>) -> Self {
        CycNum {
            field: field.clone(),
            coeffs: vec![Rational::zero(); field.degree()],
        }
    }

    pub fn one(field: &Arc<CyclotomicField>) -> Self {
        Self::from_rational(field, Rational::one())
    }

    pub fn from_rational(field: &Arc<CyclotomicField>, q: Rational) -> Self {
        let mut z = Self::zero(field);
        z.coeffs[0] = q;
        z
    }

    /// `q * zeta_L^e` for any integer `e`.
    pub fn monomial(field: &Arc<CyclotomicField>, q: Rational, e: i64) -> Self {
        let l = field.order as i64;
        let e = e.rem_euclid(l) as usize;
        let mut c = vec![Rational::zero(); e + 1];
        c[e] = q;
        CycNum {
            field: field.clone(),
            coeffs: field.reduce(c),
        }
    }

    pub fn field(&self) -> &Arc<CyclotomicField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        CycNum {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        CycNum {
            field: self.field.clone(),
            coeffs,
        }
    }

    pub fn neg(&self) -> Self {
        CycNum {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn scale(&self, q: &Rational) -> Self {
        CycNum {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let deg = self.field.degree();
        if deg == 1 {
            return self.scale(&other.coeffs[0]);
        }
        let mut prod = vec![Rational::zero(); 2 * deg - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        CycNum {
            field: self.field.clone(),
            coeffs: self.field.reduce(prod),
        }
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in `Q[x]`.
    /// Returns `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        if self.field.degree() == 1 {
            return Some(Self::from_rational(&self.field, self.coeffs[0].recip()));
        }
        // invariant: s * self == r (mod Phi)
        let mut r0 = trim(self.field.modulus.clone());
        let mut r1 = trim(self.coeffs.clone());
        let mut s0: Vec<Rational> = vec![];
        let mut s1: Vec<Rational> = vec![Rational::one()];
        while r1.len() != 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s2 = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                unreachable!("cyclotomic polynomial is irreducible");
            }
        }
        let c = r1[0].recip();
        let s: Vec<Rational> = s1.iter().map(|x| x * &c).collect();
        Some(CycNum {
            field: self.field.clone(),
            coeffs: self.field.reduce(s),
        })
    }

    /// Floating-point value, for cross-checks only.
    pub fn to_complex(&self) -> (f64, f64) {
        let l = self.field.order as f64;
        let mut re = 0.0;
        let mut im = 0.0;
        for (j, c) in self.coeffs.iter().enumerate() {
            let x = c.to_f64().unwrap_or(f64::NAN);
            let ang = 2.0 * std::f64::consts::PI * j as f64 / l;
            re += x * ang.cos();
            im += x * ang.sin();
        }
        (re, im)
    }
}

fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let out = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect();
    trim(out)
}

fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    let lead = b[db].clone();
    for k in (0..q.len()).rev() {
        let c = &r[k + db] / &lead;
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let t = &c * bj;
            r[k + j] -= t;
        }
        q[k] = c;
    }
    (trim(q), trim(r))
}

/// Nonzero scalar `q * zeta_L^e` in canonical form.
///
/// Canonical form: `0 <= e < L`, and for even `L` the exponent is folded into
/// `[0, L/2)` by absorbing `zeta_L^{L/2} = -1` into the sign of `q`. In that
/// form two scalars are equal as complex numbers iff their `(q, e)` agree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycScalar {
    q: Rational,
    e: u32,
    order: u32,
}

impl fmt::Debug for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 0 {
            write!(f, "{}", self.q)
        } else {
            write!(f, "{}*z{}^{}", self.q, self.order, self.e)
        }
    }
}

impl CycScalar {
    pub fn new(q: Rational, e: i64, order: u32) -> Result<Self, ScalarError> {
        if order == 0 {
            return Err(ScalarError::BadOrder);
        }
        if q.is_zero() {
            return Err(ScalarError::Zero);
        }
        Ok(Self::canonical(q, e, order))
    }

    pub fn rational(q: Rational, order: u32) -> Result<Self, ScalarError> {
        Self::new(q, 0, order)
    }

    pub fn from_int(n: i64, order: u32) -> Result<Self, ScalarError> {
        Self::new(rat_int(n), 0, order)
    }

    pub fn one(order: u32) -> Self {
        Self::canonical(Rational::one(), 0, order)
    }

    fn canonical(mut q: Rational, e: i64, order: u32) -> Self {
        let l = order as i64;
        let mut e = e.rem_euclid(l);
        if l % 2 == 0 && e >= l / 2 {
            q = -q;
            e -= l / 2;
        }
        CycScalar {
            q,
            e: e as u32,
            order,
        }
    }

    /// `exp(2 pi i / r)` when it lies in `Q(zeta_L)` (i.e. `r` divides `L`,
    /// or `r` divides `2L` for odd `L`).
    pub fn primitive_root(r: u32, order: u32) -> Option<Self> {
        if r == 0 {
            return None;
        }
        let l = order as i64;
        let two_l = 2 * l;
        if two_l % r as i64 != 0 {
            return None;
        }
        let j = two_l / r as i64;
        if j % 2 == 0 {
            Some(Self::canonical(Rational::one(), j / 2, order))
        } else if l % 2 == 1 {
            // exp(i pi j / L) = -zeta_L^{(j - L)/2}
            Some(Self::canonical(-Rational::one(), (j - l) / 2, order))
        } else {
            None
        }
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn check(&self, other: &Self) -> Result<(), ScalarError> {
        if self.order != other.order {
            Err(ScalarError::OrderMismatch(self.order, other.order))
        } else {
            Ok(())
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        Ok(self.mul_same(other))
    }

    pub fn div(&self, other: &Self) -> Result<Self, ScalarError> {
        self.check(other)?;
        Ok(self.mul_same(&other.inv()))
    }

    pub(crate) fn mul_same(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order, other.order);
        Self::canonical(
            &self.q * &other.q,
            self.e as i64 + other.e as i64,
            self.order,
        )
    }

    pub fn inv(&self) -> Self {
        Self::canonical(self.q.recip(), -(self.e as i64), self.order)
    }

    pub fn neg(&self) -> Self {
        Self::canonical(-self.q.clone(), self.e as i64, self.order)
    }

    pub fn pow(&self, m: i64) -> Self {
        let base = if m < 0 { self.inv() } else { self.clone() };
        let k = m.unsigned_abs();
        let q = num_traits::pow::pow(base.q.clone(), k as usize);
        let e = (base.e as u64 * (k % self.order as u64)) % self.order as u64;
        Self::canonical(q, e as i64, self.order)
    }

    pub fn is_one(&self) -> bool {
        self.e == 0 && self.q.is_one()
    }

    /// Re-express in a larger cyclotomic field.
    pub fn lift(&self, to: u32) -> Result<Self, ScalarError> {
        if to == 0 || to % self.order != 0 {
            return Err(ScalarError::NotAMultiple {
                from: self.order,
                to,
            });
        }
        Ok(Self::canonical(
            self.q.clone(),
            self.e as i64 * (to / self.order) as i64,
            to,
        ))
    }

    /// True iff `self^k == 1`.
    pub fn root_of_unity_order_divides(&self, k: u32) -> bool {
        k > 0 && self.q.abs().is_one() && self.pow(k as i64).is_one()
    }

    pub fn to_num(&self, field: &Arc<CyclotomicField>) -> CycNum {
        debug_assert_eq!(field.order(), self.order);
        CycNum::monomial(field, self.q.clone(), self.e as i64)
    }

    /// Floating-point value, for cross-checks only.
    pub fn to_complex(&self) -> (f64, f64) {
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let ang = 2.0 * std::f64::consts::PI * self.e as f64 / self.order as f64;
        (q * ang.cos(), q * ang.sin())
    }

    /// Lexicographic order on the canonical `(q, e)` pair.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.q.cmp(&other.q).then(self.e.cmp(&other.e))
    }
}

/// Unreduced accumulator `sum_j coeffs[j] * zeta_L^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycVector {
    coeffs: Vec<Rational>,
}

impl CycVector {
    pub fn new(order: u32) -> Self {
        CycVector {
            coeffs: vec![Rational::zero(); order as usize],
        }
    }

    pub fn order(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Adds `weight * s`.
    pub fn add_scalar(&mut self, s: &CycScalar, weight: &Rational) {
        debug_assert_eq!(s.order(), self.order());
        if weight.is_zero() {
            return;
        }
        self.coeffs[s.e() as usize] += s.q() * weight;
    }

    pub fn add(&mut self, other: &CycVector) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    pub fn reduce(&self, field: &Arc<CyclotomicField>) -> CycNum {
        CycNum {
            field: field.clone(),
            coeffs: field.reduce(self.coeffs.clone()),
        }
    }

    pub fn is_zero(&self, field: &Arc<CyclotomicField>) -> bool {
        if self.coeffs.iter().all(|c| c.is_zero()) {
            return true;
        }
        self.reduce(field).is_zero()
    }
}

/// Decides whether `sum q_j * w_j * zeta^{e_j}` vanishes.
pub fn sum_is_zero(terms: &[(CycScalar, Rational)]) -> Result<bool, ScalarError> {
    let Some((first, _)) = terms.first() else {
        return Ok(true);
    };
    let order = first.order();
    let mut acc = CycVector::new(order);
    for (s, w) in terms {
        if s.order() != order {
            return Err(ScalarError::OrderMismatch(order, s.order()));
        }
        acc.add_scalar(s, w);
    }
    Ok(acc.is_zero(&CyclotomicField::new(order)))
}

// JSON: {"num": int, "den": int, "zeta_pow": int, "zeta_order": int}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    num: BigIntJson,
    den: BigIntJson,
    zeta_pow: i64,
    zeta_order: u32,
}

/// Integers serialize as JSON numbers when they fit in `i64`, otherwise as
/// decimal strings.
#[derive(Clone, Debug)]
pub(crate) struct BigIntJson(pub BigInt);

impl Serialize for BigIntJson {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for BigIntJson {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(BigIntJson(BigInt::from(v))),
            Raw::Str(s) => s
                .trim()
                .parse::<BigInt>()
                .map(BigIntJson)
                .map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for CycScalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ScalarRepr {
            num: BigIntJson(self.q.numer().clone()),
            den: BigIntJson(self.q.denom().clone()),
            zeta_pow: self.e as i64,
            zeta_order: self.order,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ScalarRepr::deserialize(d)?;
        if r.den.0.is_zero() {
            return Err(serde::de::Error::custom(ScalarError::ZeroDenominator));
        }
        let q = BigRational::new(r.num.0, r.den.0);
        CycScalar::new(q, r.zeta_pow, r.zeta_order).map_err(serde::de::Error::custom)
    }
}

/// Rationals serialize as a JSON integer when integral, else as `"p/q"`.
pub mod rational_json {
    use super::*;

    pub fn to_value(q: &Rational) -> serde_json::Value {
        if q.is_integer() {
            if let Some(v) = q.numer().to_i64() {
                return serde_json::Value::from(v);
            }
        }
        serde_json::Value::from(q.to_string())
    }

    pub fn parse_str(s: &str) -> Result<Rational, String> {
        let s = s.trim();
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| format!("bad rational {s:?}"))?;
        let d: BigInt = d.parse().map_err(|_| format!("bad rational {s:?}"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        Ok(BigRational::new(n, d))
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        to_value(q).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(rat_int(v)),
            Raw::Str(s) => parse_str(&s).map_err(serde::de::Error::custom),
        }
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
            let vals: Vec<serde_json::Value> = v.iter().map(to_value).collect();
            vals.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
            let raws = Vec::<Raw>::deserialize(d)?;
            raws.into_iter()
                .map(|r| match r {
                    Raw::Int(v) => Ok(rat_int(v)),
                    Raw::Str(s) => parse_str(&s).map_err(serde::de::Error::custom),
                })
                .collect()
        }
    }
}
