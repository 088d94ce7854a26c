use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which field a [`Scalar`] lives in.
///
/// Extension moduli are stored low degree first and are always monic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldDescriptor {
    Rationals,
    Prime { p: u64 },
    Extension { p: u64, modulus: Vec<u64> },
}

impl fmt::Display for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldDescriptor::Rationals => write!(f, "Q"),
            FieldDescriptor::Prime { p } => write!(f, "F_{p}"),
            FieldDescriptor::Extension { p, modulus } => {
                write!(f, "F_{p}^{} mod {:?}", modulus.len() - 1, modulus)
            }
        }
    }
}

struct FieldInner {
    desc: FieldDescriptor,
    // 0 for the rationals
    p: u64,
    degree: usize,
    // monic, low first, length degree + 1
    modulus: Vec<u64>,
}

/// A shared handle to an exact field: the rationals or a finite field of odd
/// characteristic.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}
impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.desc.hash(state)
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.0.desc)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.desc.fmt(f)
    }
}

fn field_cache() -> &'static Mutex<HashMap<FieldDescriptor, Field>> {
    static CACHE: OnceLock<Mutex<HashMap<FieldDescriptor, Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn canonical_cache() -> &'static Mutex<HashMap<(u64, usize), Vec<u64>>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, usize), Vec<u64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

impl Field {
    fn intern(desc: FieldDescriptor, p: u64, degree: usize, modulus: Vec<u64>) -> Field {
        let mut cache = field_cache().lock().expect("field cache poisoned");
        cache
            .entry(desc.clone())
            .or_insert_with(|| {
                Field(Arc::new(FieldInner {
                    desc,
                    p,
                    degree,
                    modulus,
                }))
            })
            .clone()
    }

    pub fn rationals() -> Field {
        Field::intern(FieldDescriptor::Rationals, 0, 1, vec![0, 1])
    }

    pub fn prime(p: u64) -> Result<Field> {
        if !is_odd_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not an odd prime")));
        }
        if p >= 1 << 31 {
            return Err(Error::InvalidField(format!("prime {p} too large")));
        }
        Ok(Field::intern(FieldDescriptor::Prime { p }, p, 1, vec![0, 1]))
    }

    /// `F_{p^k}` represented modulo the lexicographically smallest monic
    /// irreducible of degree `k` (non-leading coefficients compared from the
    /// constant term up). `k = 1` gives the prime field.
    pub fn extension(p: u64, k: usize) -> Result<Field> {
        if k == 0 {
            return Err(Error::InvalidField("extension degree 0".into()));
        }
        if k == 1 {
            return Field::prime(p);
        }
        Field::prime(p)?;
        let modulus = canonical_modulus(p, k);
        Ok(Field::intern(
            FieldDescriptor::Extension {
                p,
                modulus: modulus.clone(),
            },
            p,
            k,
            modulus,
        ))
    }

    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Field> {
        Field::prime(p)?;
        let mut m = modulus;
        while m.len() > 1 && *m.last().unwrap() == 0 {
            m.pop();
        }
        if m.len() < 2 || *m.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic of degree >= 1".into()));
        }
        if m.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField("modulus coefficients must lie in [0, p)".into()));
        }
        if m.len() == 2 {
            return Field::prime(p);
        }
        if !modp::is_irreducible(&m, p) {
            return Err(Error::InvalidField(format!("modulus {m:?} is reducible mod {p}")));
        }
        let k = m.len() - 1;
        Ok(Field::intern(
            FieldDescriptor::Extension {
                p,
                modulus: m.clone(),
            },
            p,
            k,
            m,
        ))
    }

    pub fn from_descriptor(desc: &FieldDescriptor) -> Result<Field> {
        match desc {
            FieldDescriptor::Rationals => Ok(Field::rationals()),
            FieldDescriptor::Prime { p } => Field::prime(*p),
            FieldDescriptor::Extension { p, modulus } => Field::with_modulus(*p, modulus.clone()),
        }
    }

    /// Reads a descriptor object. Extensions may give `"degree": k` instead of
    /// a modulus, selecting the canonical modulus.
    pub fn from_json(value: &serde_json::Value) -> Result<Field> {
        let is_ext = value.get("kind").and_then(|k| k.as_str()) == Some("extension");
        if is_ext && value.get("modulus").is_none() {
            let p = value.get("p").and_then(|v| v.as_u64());
            let k = value.get("degree").and_then(|v| v.as_u64());
            return match (p, k) {
                (Some(p), Some(k)) => Field::extension(p, k as usize),
                _ => Err(Error::Parse("extension needs p and modulus or degree".into())),
            };
        }
        let desc: FieldDescriptor = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("field descriptor: {e}")))?;
        Field::from_descriptor(&desc)
    }

    /// Short names: `Q`, `F_p` (or `Fp`), `F_p^k` with the canonical modulus,
    /// or a JSON descriptor.
    pub fn parse(s: &str) -> Result<Field> {
        let s = s.trim();
        if s.starts_with('{') {
            let v: serde_json::Value =
                serde_json::from_str(s).map_err(|e| Error::Parse(format!("field descriptor: {e}")))?;
            return Field::from_json(&v);
        }
        if s == "Q" || s == "QQ" {
            return Ok(Field::rationals());
        }
        let body = s
            .strip_prefix("F_")
            .or_else(|| s.strip_prefix('F'))
            .ok_or_else(|| Error::Parse(format!("unknown field {s:?}")))?;
        let num = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::Parse(format!("field {s:?}: {e}")))
        };
        match body.split_once('^') {
            Some((p, k)) => Field::extension(num(p)?, num(k)? as usize),
            None => Field::prime(num(body)?),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(&self.0.desc).expect("descriptor serializes")
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0.desc
    }

    /// 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        self.0.p
    }

    /// Degree over the prime field (1 for the rationals).
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn is_finite(&self) -> bool {
        self.0.p != 0
    }

    pub fn is_rationals(&self) -> bool {
        self.0.p == 0
    }

    pub fn order(&self) -> Option<BigUint> {
        if self.is_finite() {
            Some(BigUint::from(self.0.p).pow(self.0.degree as u32))
        } else {
            None
        }
    }

    /// Field size as a machine integer, if it fits.
    pub fn order_u64(&self) -> Option<u64> {
        self.order().and_then(|q| q.to_u64())
    }

    pub fn prime_field(&self) -> Field {
        if self.is_finite() {
            Field::prime(self.0.p).expect("characteristic already validated")
        } else {
            self.clone()
        }
    }

    pub fn zero(&self) -> Scalar {
        match self.0.p {
            0 => Scalar::rat(self, BigRational::zero()),
            _ => Scalar::fin(self, vec![0; self.0.degree]),
        }
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Scalar {
        match self.0.p {
            0 => Scalar::rat(self, BigRational::from_integer(BigInt::from(n))),
            p => {
                let mut v = vec![0; self.0.degree];
                v[0] = n.rem_euclid(p as i64) as u64;
                Scalar::fin(self, v)
            }
        }
    }

    pub fn bigint(&self, n: &BigInt) -> Scalar {
        match self.0.p {
            0 => Scalar::rat(self, BigRational::from_integer(n.clone())),
            p => {
                let r = (n % BigInt::from(p) + BigInt::from(p)) % BigInt::from(p);
                let mut v = vec![0; self.0.degree];
                v[0] = r.to_u64().expect("reduced residue fits");
                Scalar::fin(self, v)
            }
        }
    }

    pub fn fraction(&self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::DivisionByZero);
        }
        self.int(num).try_div(&self.int(den))
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<Scalar> {
        match self.0.p {
            0 => Ok(Scalar::rat(self, q.clone())),
            _ => self.bigint(q.numer()).try_div(&self.bigint(q.denom())),
        }
    }

    /// Element with the given coefficient vector (low degree first). Shorter
    /// vectors are zero-padded.
    pub fn elem(&self, coeffs: &[u64]) -> Result<Scalar> {
        let p = self.0.p;
        if p == 0 {
            return Err(Error::UnsupportedField("coefficient vectors need a finite field".into()));
        }
        if coeffs.len() > self.0.degree {
            return Err(Error::InvalidInput(format!(
                "coefficient vector of length {} for a field of degree {}",
                coeffs.len(),
                self.0.degree
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= p) {
            return Err(Error::InvalidInput(format!("coefficient {c} not in [0, {p})")));
        }
        let mut v = coeffs.to_vec();
        v.resize(self.0.degree, 0);
        Ok(Scalar::fin(self, v))
    }

    /// The class of `t` in an extension field given by its modulus.
    pub fn generator(&self) -> Option<Scalar> {
        if self.is_finite() && self.0.degree >= 2 {
            let mut v = vec![0; self.0.degree];
            v[1] = 1;
            Some(Scalar::fin(self, v))
        } else {
            None
        }
    }

    /// Finite-field element from its base-`p` index `sum c_i p^i`.
    pub fn from_index(&self, mut idx: u64) -> Scalar {
        let p = self.0.p;
        assert!(p != 0, "from_index on the rationals");
        let mut v = vec![0; self.0.degree];
        for c in v.iter_mut() {
            *c = idx % p;
            idx /= p;
        }
        Scalar::fin(self, v)
    }

    /// All elements of a finite field in index order.
    pub fn elements(&self) -> Result<impl Iterator<Item = Scalar> + '_> {
        let q = self
            .order_u64()
            .ok_or_else(|| Error::UnsupportedField("cannot enumerate an infinite field".into()))?;
        Ok((0..q).map(move |i| self.from_index(i)))
    }

    fn check(&self, other: &Field) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch(
                self.0.desc.to_string(),
                other.0.desc.to_string(),
            ))
        }
    }
}

fn canonical_modulus(p: u64, k: usize) -> Vec<u64> {
    if let Some(m) = canonical_cache().lock().expect("cache poisoned").get(&(p, k)) {
        return m.clone();
    }
    // Enumerate (c_0, ..., c_{k-1}) in lexicographic order, c_0 most significant.
    let mut lower = vec![0u64; k];
    let found = loop {
        let mut cand = lower.clone();
        cand.push(1);
        if cand[0] != 0 && modp::is_irreducible(&cand, p) {
            break cand;
        }
        // increment with c_{k-1} as the least significant digit
        let mut i = k;
        loop {
            i -= 1;
            lower[i] += 1;
            if lower[i] < p {
                break;
            }
            lower[i] = 0;
            assert!(i > 0, "an irreducible polynomial of every degree exists");
        }
    };
    canonical_cache()
        .lock()
        .expect("cache poisoned")
        .insert((p, k), found.clone());
    found
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Rational(BigRational),
    Finite(Vec<u64>),
}

/// An element of a [`Field`].
///
/// Rationals are kept in lowest terms; finite-field elements are coefficient
/// vectors of length `degree` with entries in `[0, p)`.
#[derive(Clone)]
pub struct Scalar {
    field: Field,
    repr: Repr,
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.repr == other.repr && self.field == other.field
    }
}
impl Eq for Scalar {}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.repr.hash(state)
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric order on the rationals, lexicographic order on finite-field
/// coefficient vectors.
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => a.cmp(b),
            (Repr::Finite(a), Repr::Finite(b)) => (self.field.0.p, a.len(), a)
                .cmp(&(other.field.0.p, b.len(), b))
                .then_with(|| self.field.0.modulus.cmp(&other.field.0.modulus)),
            (Repr::Rational(_), Repr::Finite(_)) => Ordering::Less,
            (Repr::Finite(_), Repr::Rational(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Rational(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.numer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            Repr::Finite(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Repr::Finite(v) => {
                write!(f, "[")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, "]")
            }
        }
    }
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

impl Scalar {
    fn rat(field: &Field, q: BigRational) -> Scalar {
        Scalar {
            field: field.clone(),
            repr: Repr::Rational(q),
        }
    }

    fn fin(field: &Field, v: Vec<u64>) -> Scalar {
        Scalar {
            field: field.clone(),
            repr: Repr::Finite(v),
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.repr {
            Repr::Rational(q) => q.is_zero(),
            Repr::Finite(v) => v.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.repr {
            Repr::Rational(q) => q.is_one(),
            Repr::Finite(v) => v[0] == 1 && v[1..].iter().all(|&c| c == 0),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.repr {
            Repr::Rational(q) => Some(q),
            Repr::Finite(_) => None,
        }
    }

    pub fn coeffs(&self) -> Option<&[u64]> {
        match &self.repr {
            Repr::Rational(_) => None,
            Repr::Finite(v) => Some(v),
        }
    }

    /// Base-`p` index of a finite-field element.
    pub fn to_index(&self) -> Option<u64> {
        let p = self.field.0.p;
        self.coeffs().map(|v| v.iter().rev().fold(0u64, |acc, &c| acc * p + c))
    }

    /// True when the element lies in the prime subfield.
    pub fn in_prime_field(&self) -> bool {
        match &self.repr {
            Repr::Rational(_) => true,
            Repr::Finite(v) => v[1..].iter().all(|&c| c == 0),
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.field.check(&other.field)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => Scalar::rat(&self.field, a + b),
            (Repr::Finite(a), Repr::Finite(b)) => {
                let p = self.field.0.p;
                let v = a.iter().zip(b).map(|(x, y)| (x + y) % p).collect();
                Scalar::fin(&self.field, v)
            }
            _ => unreachable!("fields already matched"),
        })
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.field.check(&other.field)?;
        Ok(match (&self.repr, &other.repr) {
            (Repr::Rational(a), Repr::Rational(b)) => Scalar::rat(&self.field, a * b),
            (Repr::Finite(a), Repr::Finite(b)) => {
                let f = &self.field.0;
                Scalar::fin(&self.field, modp::mul_reduce(a, b, &f.modulus, f.p))
            }
            _ => unreachable!("fields already matched"),
        })
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        self.try_mul(&other.inv()?)
    }

    fn neg_ref(&self) -> Scalar {
        match &self.repr {
            Repr::Rational(q) => Scalar::rat(&self.field, -q),
            Repr::Finite(v) => {
                let p = self.field.0.p;
                Scalar::fin(&self.field, v.iter().map(|&c| (p - c) % p).collect())
            }
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.repr {
            Repr::Rational(q) => Scalar::rat(&self.field, q.recip()),
            Repr::Finite(v) => {
                let f = &self.field.0;
                Scalar::fin(&self.field, modp::inverse_mod(v, &f.modulus, f.p))
            }
        })
    }

    pub fn square(&self) -> Scalar {
        self * self
    }

    pub fn pow(&self, e: u64) -> Scalar {
        self.pow_big(&BigUint::from(e))
    }

    pub fn pow_big(&self, e: &BigUint) -> Scalar {
        let mut acc = self.field.one();
        for i in (0..e.bits()).rev() {
            acc = &acc * &acc;
            if e.bit(i) {
                acc = &acc * self;
            }
        }
        acc
    }

    /// Signed integer power; negative exponents invert.
    pub fn powi(&self, e: i64) -> Result<Scalar> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// Euler's criterion `a^((q-1)/2) = 1` in a finite field.
    pub fn is_square(&self) -> Result<bool> {
        let q = self
            .field
            .order()
            .ok_or_else(|| Error::UnsupportedField("is_square needs a finite field".into()))?;
        if self.is_zero() {
            return Err(Error::DegenerateInput("is_square of zero".into()));
        }
        let e = (q - 1u32) >> 1;
        Ok(self.pow_big(&e).is_one())
    }

    /// JSON form is the display string: `"3/4"` over Q, `"4"` over a prime
    /// field, `"[c0,c1,...]"` over an extension field.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(self.to_string())
    }

    pub fn from_json(field: &Field, value: &serde_json::Value) -> Result<Scalar> {
        use serde_json::Value;
        match value {
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(field.int(i))
                } else if let Some(u) = n.as_u64() {
                    Ok(field.bigint(&BigInt::from(u)))
                } else {
                    Err(Error::Parse(format!("non-integer number {n}; use a \"p/q\" string")))
                }
            }
            Value::String(s) => Scalar::parse(field, s),
            Value::Array(items) => {
                let coeffs = items
                    .iter()
                    .map(|v| {
                        v.as_u64()
                            .ok_or_else(|| Error::Parse(format!("bad coefficient {v}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                field.elem(&coeffs)
            }
            other => Err(Error::Parse(format!("cannot read a scalar from {other}"))),
        }
    }

    pub fn parse(field: &Field, s: &str) -> Result<Scalar> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let coeffs = inner
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|e| Error::Parse(format!("bad coefficient {t:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return field.elem(&coeffs);
        }
        let parse_int = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse_int(d)?;
                if d.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                field.bigint(&parse_int(n)?).try_div(&field.bigint(&d))
            }
            None => Ok(field.bigint(&parse_int(s)?)),
        }
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar addition across fields")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar subtraction across fields")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar multiplication across fields")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

/// Raw polynomial arithmetic over `F_p` on `u64` coefficient vectors (low
/// degree first). Backs extension-field multiplication and the irreducibility
/// test used to pick canonical moduli.
pub(crate) mod modp {
    use super::mulmod;

    pub fn trim(v: &mut Vec<u64>) {
        while v.last() == Some(&0) {
            v.pop();
        }
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        // Fermat
        let mut base = a % p;
        let mut e = p - 2;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mulmod(acc, base, p);
            }
            base = mulmod(base, base, p);
            e >>= 1;
        }
        acc
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder modulo a nonzero polynomial.
    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = inv(m[dm], p);
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = mulmod(*r.last().unwrap(), lead_inv, p);
            for (j, &mj) in m.iter().enumerate() {
                let t = mulmod(c, mj, p);
                r[shift + j] = (r[shift + j] + p - t) % p;
            }
            trim(&mut r);
        }
        r
    }

    /// Product reduced modulo a monic modulus, padded to the field degree.
    pub fn mul_reduce(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let k = modulus.len() - 1;
        if k == 1 {
            return vec![mulmod(a[0], b[0], p)];
        }
        let mut r = rem(&mul(a, b, p), modulus, p);
        r.resize(k, 0);
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut out);
        out
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(&x, &y, p);
            x = y;
            y = r;
        }
        if let Some(&lead) = x.last() {
            let li = inv(lead, p);
            for c in x.iter_mut() {
                *c = mulmod(*c, li, p);
            }
        }
        x
    }

    /// `a^{-1}` modulo an irreducible modulus via the extended Euclidean
    /// algorithm.
    pub fn inverse_mod(a: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let k = modulus.len() - 1;
        if k == 1 {
            return vec![inv(a[0], p)];
        }
        let (mut r0, mut r1) = (modulus.to_vec(), a.to_vec());
        trim(&mut r1);
        let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s2 = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        // r0 is a nonzero constant because the modulus is irreducible
        let c = inv(r0[0], p);
        let mut out: Vec<u64> = s0.iter().map(|&x| mulmod(x, c, p)).collect();
        out = rem(&out, modulus, p);
        out.resize(k, 0);
        out
    }

    pub fn divrem(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        if r.len() <= dm {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - dm];
        let lead_inv = inv(m[dm], p);
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = mulmod(*r.last().unwrap(), lead_inv, p);
            q[shift] = c;
            for (j, &mj) in m.iter().enumerate() {
                let t = mulmod(c, mj, p);
                r[shift + j] = (r[shift + j] + p - t) % p;
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    fn pow_p_mod(a: &[u64], p: u64, m: &[u64]) -> Vec<u64> {
        let mut acc = vec![1u64];
        let mut base = rem(a, m, p);
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = rem(&mul(&acc, &base, p), m, p);
            }
            base = rem(&mul(&base, &base, p), m, p);
            e >>= 1;
        }
        acc
    }

    fn prime_divisors(mut n: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            if n % d == 0 {
                out.push(d);
                while n % d == 0 {
                    n /= d;
                }
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    }

    /// Rabin's irreducibility test for a monic polynomial over `F_p`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        if k == 0 {
            return false;
        }
        if k == 1 {
            return true;
        }
        let x = vec![0u64, 1];
        // frob[i] = x^(p^i) mod f
        let mut frob = vec![x.clone()];
        for i in 0..k {
            let next = pow_p_mod(&frob[i], p, f);
            frob.push(next);
        }
        if rem(&frob[k], f, p) != rem(&x, f, p) {
            return false;
        }
        prime_divisors(k).into_iter().all(|r| {
            let g = gcd(f, &sub(&frob[k / r], &x, p), p);
            g.len() == 1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sum() {
        let q = Field::rationals();
        let a = q.fraction(1, 2).unwrap();
        let b = q.fraction(1, 3).unwrap();
        assert_eq!(&a + &b, q.fraction(5, 6).unwrap());
        assert_eq!((&a + &b).to_string(), "5/6");
    }

    #[test]
    fn prime_inverse() {
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.int(2).inv().unwrap(), f5.int(3));
    }

    #[test]
    fn extension_modulus_reduction() {
        let f9 = Field::extension(3, 2).unwrap();
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        let t = f9.elem(&[0, 1]).unwrap();
        assert_eq!(&t * &t, f9.int(2));
        assert_eq!(&t * &t, f9.int(-1));
    }

    #[test]
    fn division_by_zero() {
        let q = Field::rationals();
        assert_eq!(q.zero().inv(), Err(Error::DivisionByZero));
        let f7 = Field::prime(7).unwrap();
        assert_eq!(f7.int(3).try_div(&f7.int(7)), Err(Error::DivisionByZero));
    }

    #[test]
    fn mixed_fields_rejected() {
        let f5 = Field::prime(5).unwrap();
        let f7 = Field::prime(7).unwrap();
        assert!(matches!(
            f5.int(1).try_add(&f7.int(1)),
            Err(Error::DescriptorMismatch(_, _))
        ));
        assert!(matches!(
            Field::rationals().one().try_mul(&f5.one()),
            Err(Error::DescriptorMismatch(_, _))
        ));
    }

    #[test]
    fn invalid_fields() {
        assert!(Field::prime(2).is_err());
        assert!(Field::prime(9).is_err());
        assert!(Field::with_modulus(3, vec![2, 0, 1]).is_err()); // t^2 - 1
        assert!(Field::with_modulus(3, vec![1, 0, 1]).is_ok());
    }

    #[test]
    fn squares_in_f5() {
        let f5 = Field::prime(5).unwrap();
        assert!(f5.int(4).is_square().unwrap());
        // exhaustive squares of F_5 are {0, 1, 4}
        assert!(!f5.int(2).is_square().unwrap());
        assert!(f5.zero().is_square().is_err());
        for a in 1..5 {
            assert!(f5.int(a).square().is_square().unwrap());
        }
    }

    #[test]
    fn is_square_matches_exhaustive_squaring() {
        for (p, k) in [(3, 1), (3, 2), (3, 3), (3, 5), (5, 1), (5, 2), (5, 3), (7, 1), (7, 2), (7, 3), (11, 2), (13, 2)] {
            let f = Field::extension(p, k).unwrap();
            if f.order_u64().unwrap() > 343 {
                continue;
            }
            let squares: std::collections::HashSet<Scalar> =
                f.elements().unwrap().map(|x| x.square()).collect();
            for a in f.elements().unwrap().filter(|a| !a.is_zero()) {
                assert_eq!(a.is_square().unwrap(), squares.contains(&a), "{a} in {f}");
            }
        }
    }

    #[test]
    fn field_axioms_small_extension() {
        let f = Field::extension(5, 2).unwrap();
        for a in f.elements().unwrap().filter(|a| !a.is_zero()) {
            assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn canonical_moduli_are_smallest() {
        for (p, k) in [(3, 2), (3, 3), (5, 2), (5, 3), (7, 2)] {
            let m = canonical_modulus(p, k);
            assert!(modp::is_irreducible(&m, p));
            // every lexicographically smaller candidate is reducible
            let mut lower = vec![0u64; k];
            loop {
                if lower == m[..k] {
                    break;
                }
                let mut cand = lower.clone();
                cand.push(1);
                assert!(!modp::is_irreducible(&cand, p) || cand[0] == 0);
                let mut i = k;
                loop {
                    i -= 1;
                    lower[i] += 1;
                    if lower[i] < p {
                        break;
                    }
                    lower[i] = 0;
                }
            }
        }
    }

    #[test]
    fn short_names() {
        assert_eq!(Field::parse("Q").unwrap(), Field::rationals());
        assert_eq!(Field::parse("F_7").unwrap(), Field::prime(7).unwrap());
        assert_eq!(Field::parse("F5").unwrap(), Field::prime(5).unwrap());
        assert_eq!(Field::parse("F_3^2").unwrap(), Field::extension(3, 2).unwrap());
        assert_eq!(Field::parse(r#"{"kind":"prime","p":11}"#).unwrap(), Field::prime(11).unwrap());
        assert!(Field::parse("F_4").is_err());
        assert!(Field::parse("R").is_err());
    }

    #[test]
    fn json_round_trip() {
        let q = Field::rationals();
        let x = q.fraction(3, 4).unwrap();
        assert_eq!(x.to_json(), serde_json::json!("3/4"));
        assert_eq!(Scalar::from_json(&q, &x.to_json()).unwrap(), x);
        let f9 = Field::extension(3, 2).unwrap();
        let y = f9.elem(&[2, 1]).unwrap();
        assert_eq!(y.to_json(), serde_json::json!("[2,1]"));
        assert_eq!(Scalar::from_json(&f9, &y.to_json()).unwrap(), y);
        let f5 = Field::prime(5).unwrap();
        assert_eq!(f5.int(3).to_json(), serde_json::json!("3"));
        assert_eq!(Scalar::from_json(&f5, &serde_json::json!(-2)).unwrap(), f5.int(3));
    }
}
