//! Igusa invariants of binary sextics in exact rational arithmetic, and the
//! loci of genus-2 curves with extra automorphisms.
//!
//! J₂..J₁₀ are the Igusa–Clebsch invariants, built from the Clebsch
//! invariants A, B, C, D via transvectants. With this normalization the
//! L₂ polynomial evaluated at y² = x(x−1)(x−a₁)(x−a₂)(x−a₃) equals
//! [`L2_FACTOR_CONSTANT`] times the square of the fifteen Table 2.1 factors.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// f(X, Z) = Σ a_i X^i Z^{6−i}; `coeffs[i]` is a_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinarySextic {
    coeffs: [Q; 7],
}

impl BinarySextic {
    pub fn new(coeffs: [Q; 7]) -> Result<Self> {
        if coeffs.iter().all(Zero::is_zero) {
            return Err(Error::domain("zero polynomial"));
        }
        Ok(BinarySextic { coeffs })
    }

    /// Ascending coefficients of a polynomial in x of degree ≤ 6.
    pub fn from_affine(coeffs: &[Q]) -> Result<Self> {
        if coeffs.len() > 7 && coeffs[7..].iter().any(|c| !c.is_zero()) {
            return Err(Error::domain(format!("degree {} exceeds 6", coeffs.len() - 1)));
        }
        let mut a: [Q; 7] = Default::default();
        for (slot, c) in a.iter_mut().zip(coeffs) {
            *slot = c.clone();
        }
        Self::new(a)
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::from_affine(&coeffs.iter().map(|&c| q(c)).collect::<Vec<_>>())
    }

    /// lead · Π (x − r).
    pub fn from_roots(lead: Q, roots: &[Q]) -> Result<Self> {
        let mut p = vec![lead];
        for r in roots {
            p = poly_mul(&p, &[-r.clone(), Q::one()]);
        }
        Self::from_affine(&p)
    }

    pub fn coeffs(&self) -> &[Q; 7] {
        &self.coeffs
    }

    /// Degree in x; below 6 means ∞ is a root of the binary form.
    pub fn degree(&self) -> usize {
        (0..7).rev().find(|&i| !self.coeffs[i].is_zero()).unwrap_or(0)
    }

    /// f(X, Z) ↦ f(Z, X).
    pub fn swap_xz(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        BinarySextic { coeffs: c }
    }

    /// f(uX, Z).
    pub fn scale_x(&self, u: &Q) -> Self {
        let mut c = self.coeffs.clone();
        let mut p = Q::one();
        for a in c.iter_mut() {
            *a = &*a * &p;
            p = &p * u;
        }
        BinarySextic { coeffs: c }
    }

    /// Whether the binary form has a repeated linear factor.
    pub fn has_repeated_root(&self) -> bool {
        if self.coeffs[6].is_zero() && self.coeffs[5].is_zero() {
            return true; // double root at ∞
        }
        let f: Vec<Q> = self.coeffs[..=self.degree()].to_vec();
        let df: Vec<Q> = f.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect();
        poly_gcd(&f, &df).len() > 1
    }

    /// Parses expressions such as `x^6-1`, `x(x^4-1)` or `3/2x^2 + (x-1)^3`.
    pub fn parse(text: &str) -> Result<Self> {
        Self::from_affine(&parse_univariate(text, &BTreeMap::new(), 6)?)
    }
}

impl FromStr for BinarySextic {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl fmt::Display for BinarySextic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for i in (0..7).rev() {
            let c = &self.coeffs[i];
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = mag.is_one();
            if !unit || i == 0 {
                if mag.is_integer() {
                    write!(f, "{}", mag.numer())?;
                } else {
                    write!(f, "({mag})")?;
                }
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// A coefficient in JSON: integer or "p/q" string.
#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffJson {
    Int(i64),
    Text(String),
}

fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::domain(format!("bad rational {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl Serialize for BinarySextic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>().serialize(s)
    }
}

impl<'de> Deserialize<'de> for BinarySextic {
    /// An ascending coefficient list a₀..a_d (d ≤ 6) or a polynomial string.
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            List(Vec<CoeffJson>),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => BinarySextic::parse(&t).map_err(D::Error::custom),
            Raw::List(v) => {
                let cs = v
                    .into_iter()
                    .map(|c| match c {
                        CoeffJson::Int(n) => Ok(q(n)),
                        CoeffJson::Text(t) => parse_rational(&t),
                    })
                    .collect::<Result<Vec<_>>>()
                    .map_err(D::Error::custom)?;
                BinarySextic::from_affine(&cs).map_err(D::Error::custom)
            }
        }
    }
}

/// Parses a polynomial in `x` with rational coefficients. Other identifiers
/// are looked up in `params`; exponents above `max_exp` are rejected.
pub(crate) fn parse_univariate(text: &str, params: &BTreeMap<String, Q>, max_exp: u64) -> Result<Vec<Q>> {
    let mut p = Parser { s: text.as_bytes(), i: 0, params, max_exp };
    let poly = p.expr()?;
    p.skip_ws();
    if p.i != p.s.len() {
        return Err(Error::domain(format!("unexpected {:?} in {text:?}", &text[p.i..])));
    }
    Ok(trim(poly))
}

struct Parser<'a> {
    s: &'a [u8],
    i: usize,
    params: &'a BTreeMap<String, Q>,
    max_exp: u64,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn err(&self, what: &str) -> Error {
        Error::domain(format!("{what} at offset {}", self.i))
    }

    fn expr(&mut self) -> Result<Vec<Q>> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.i += 1;
            let t = self.term()?;
            acc = if c == b'+' { poly_add(&acc, &t) } else { poly_sub(&acc, &t) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Vec<Q>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.i += 1;
                    acc = poly_mul(&acc, &self.unary()?);
                }
                Some(b'(' | b'0'..=b'9' | b'a'..=b'z' | b'A'..=b'Z' | b'_') => acc = poly_mul(&acc, &self.unary()?),
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Vec<Q>> {
        if self.peek() == Some(b'-') {
            self.i += 1;
            return Ok(poly_neg(&self.unary()?));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.i += 1;
            let n = self.uint()?;
            if n > self.max_exp {
                return Err(self.err(&format!("exponent above {}", self.max_exp)));
            }
            let mut out = vec![Q::one()];
            for _ in 0..n {
                out = poly_mul(&out, &base);
            }
            return Ok(out);
        }
        Ok(base)
    }

    fn uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().map_err(|_| self.err("expected an integer"))
    }

    fn atom(&mut self) -> Result<Vec<Q>> {
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.i;
                while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'_') {
                    self.i += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                if name == "x" || name == "X" {
                    return Ok(vec![Q::zero(), Q::one()]);
                }
                match self.params.get(name) {
                    Some(v) => Ok(vec![v.clone()]),
                    None => {
                        self.i = start;
                        Err(self.err(&format!("unknown symbol {name:?}")))
                    }
                }
            }
            Some(b'(') => {
                self.i += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.i += 1;
                Ok(e)
            }
            Some(b'0'..=b'9') => {
                let n = self.uint()?;
                let mut v = q(n as i64);
                if self.peek() == Some(b'/') {
                    self.i += 1;
                    let d = self.uint()?;
                    if d == 0 {
                        return Err(self.err("zero denominator"));
                    }
                    v /= q(d as i64);
                }
                Ok(vec![v])
            }
            _ => Err(self.err("expected x, a number or '('")),
        }
    }
}

pub(crate) fn trim(mut p: Vec<Q>) -> Vec<Q> {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub(crate) fn poly_add(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    trim((0..n).map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default()).collect())
}

pub(crate) fn poly_neg(a: &[Q]) -> Vec<Q> {
    a.iter().map(|c| -c).collect()
}

pub(crate) fn poly_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    poly_add(a, &poly_neg(b))
}

pub(crate) fn poly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    trim(r)
}

pub(crate) fn poly_rem(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let k = r.len() - 1 - db;
        let f = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[k + i] -= &f * c;
        }
        r.pop();
        r = trim(r);
    }
    if r.is_empty() {
        r.push(Q::zero());
    }
    r
}

pub(crate) fn poly_gcd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !(b.len() == 1 && b[0].is_zero()) {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a
}

/// Binary forms as c[0..=n] with f = Σ c[k] x^{n−k} y^k.
fn form_dx(f: &[Q]) -> Vec<Q> {
    let n = f.len() - 1;
    (0..n).map(|i| &f[i] * q((n - i) as i64)).collect()
}

fn form_dy(f: &[Q]) -> Vec<Q> {
    let n = f.len() - 1;
    (0..n).map(|i| &f[i + 1] * q(i as i64 + 1)).collect()
}

fn form_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

fn binom(n: usize, k: usize) -> BigInt {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// k-th transvectant (f, g)_k, normalized by (m−k)!(n−k)!/(m!n!).
fn transvectant(f: &[Q], g: &[Q], k: usize) -> Vec<Q> {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let mut r = vec![Q::zero(); m + n - 2 * k + 1];
    for i in 0..=k {
        let mut a = f.to_vec();
        for _ in 0..k - i {
            a = form_dx(&a);
        }
        for _ in 0..i {
            a = form_dy(&a);
        }
        let mut b = g.to_vec();
        for _ in 0..i {
            b = form_dx(&b);
        }
        for _ in 0..k - i {
            b = form_dy(&b);
        }
        let mut s = Q::from_integer(binom(k, i));
        if i % 2 == 1 {
            s = -s;
        }
        for (acc, t) in r.iter_mut().zip(form_mul(&a, &b)) {
            *acc += &s * t;
        }
    }
    let c = Q::new(factorial(m - k) * factorial(n - k), factorial(m) * factorial(n));
    r.into_iter().map(|u| u * &c).collect()
}

/// Clebsch invariants (A, B, C, D).
pub fn clebsch(f: &BinarySextic) -> [Q; 4] {
    let form: Vec<Q> = f.coeffs.iter().rev().cloned().collect();
    let i = transvectant(&form, &form, 4);
    let delta = transvectant(&i, &i, 2);
    let a = transvectant(&form, &form, 6)[0].clone();
    let b = transvectant(&i, &i, 4)[0].clone();
    let c = transvectant(&i, &delta, 4)[0].clone();
    let y1 = transvectant(&form, &i, 4);
    let y2 = transvectant(&i, &y1, 2);
    let y3 = transvectant(&i, &y2, 2);
    let d = transvectant(&y3, &y1, 2)[0].clone();
    [a, b, c, d]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IgusaInvariants {
    pub j2: Q,
    pub j4: Q,
    pub j6: Q,
    pub j10: Q,
}

impl IgusaInvariants {
    pub fn from_i64(j: [i64; 4]) -> Self {
        IgusaInvariants { j2: q(j[0]), j4: q(j[1]), j6: q(j[2]), j10: q(j[3]) }
    }

    fn powers(&self) -> [Vec<Q>; 4] {
        let pw = |x: &Q, n: usize| {
            let mut v = vec![Q::one()];
            for _ in 0..n {
                let next = v.last().unwrap() * x;
                v.push(next);
            }
            v
        };
        [pw(&self.j2, 7), pw(&self.j4, 7), pw(&self.j6, 5), pw(&self.j10, 3)]
    }

    fn eval(&self, terms: &[([usize; 4], i64)]) -> Q {
        let p = self.powers();
        terms.iter().fold(Q::zero(), |acc, (e, c)| acc + q(*c) * &p[0][e[0]] * &p[1][e[1]] * &p[2][e[2]] * &p[3][e[3]])
    }
}

impl Serialize for IgusaInvariants {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("IgusaInvariants", 4)?;
        st.serialize_field("J2", &self.j2.to_string())?;
        st.serialize_field("J4", &self.j4.to_string())?;
        st.serialize_field("J6", &self.j6.to_string())?;
        st.serialize_field("J10", &self.j10.to_string())?;
        st.end()
    }
}

pub fn igusa(f: &BinarySextic) -> IgusaInvariants {
    let [a, b, c, d] = clebsch(f);
    let a2 = &a * &a;
    let a3 = &a2 * &a;
    let a5 = &a3 * &a2;
    IgusaInvariants {
        j2: q(-120) * &a,
        j4: q(-720) * &a2 + q(6750) * &b,
        j6: q(8640) * &a3 - q(108000) * &a * &b + q(202500) * &c,
        j10: q(-62208) * &a5 + q(972000) * &a3 * &b + q(1620000) * &a2 * &c
            - q(3037500) * &a * &b * &b
            - q(6075000) * &b * &c
            - q(4556250) * &d,
    }
}

/// (i₁, i₂, i₃) = (144 J₄/J₂², −1728 (J₂J₄ − 3J₆)/J₂³, 486 J₁₀/J₂⁵).
pub fn absolute_invariants(j: &IgusaInvariants) -> Result<[Q; 3]> {
    if j.j2.is_zero() {
        return Err(Error::domain("absolute invariants are undefined on J2 = 0"));
    }
    let j2_2 = &j.j2 * &j.j2;
    let j2_3 = &j2_2 * &j.j2;
    let j2_5 = &j2_3 * &j2_2;
    Ok([
        q(144) * &j.j4 / j2_2,
        q(-1728) * (&j.j2 * &j.j4 - q(3) * &j.j6) / j2_3,
        q(486) * &j.j10 / j2_5,
    ])
}

/// Terms of the L₂ equation as exponents of (J₂, J₄, J₆, J₁₀) and coefficient.
pub const L2_TERMS: [([usize; 4], i64); 34] = [
    ([0, 0, 0, 3], -125971200000),
    ([0, 0, 5, 0], 31104),
    ([0, 1, 1, 2], -2099520000),
    ([0, 2, 2, 1], -9331200),
    ([0, 3, 3, 0], -6912),
    ([0, 5, 0, 1], 41472),
    ([0, 6, 1, 0], 384),
    ([1, 0, 3, 1], -3499200),
    ([1, 1, 4, 0], -47952),
    ([1, 2, 0, 2], 507384000),
    ([1, 3, 1, 1], 4743360),
    ([1, 4, 2, 0], 6048),
    ([1, 7, 0, 0], -80),
    ([2, 0, 1, 2], 104976000),
    ([2, 1, 2, 1], 3090960),
    ([2, 2, 3, 0], 29376),
    ([2, 4, 0, 1], -592272),
    ([2, 5, 1, 0], -1728),
    ([3, 0, 4, 0], -81),
    ([3, 1, 0, 2], -19245600),
    ([3, 2, 1, 1], -870912),
    ([3, 3, 2, 0], -8910),
    ([3, 6, 0, 0], 159),
    ([4, 0, 2, 1], 8748),
    ([4, 1, 3, 0], 108),
    ([4, 3, 0, 1], 77436),
    ([4, 4, 1, 0], 1332),
    ([5, 0, 0, 2], -236196),
    ([5, 1, 1, 1], -5832),
    ([5, 2, 2, 0], -54),
    ([5, 5, 0, 0], -78),
    ([6, 2, 0, 1], 972),
    ([6, 3, 1, 0], 12),
    ([7, 4, 0, 0], -1),
];

const D8_TERMS: [([usize; 4], i64); 6] = [
    ([2, 2, 0, 0], 1706),
    ([0, 3, 0, 0], 2560),
    ([4, 1, 0, 0], 27),
    ([3, 0, 1, 0], -81),
    ([1, 1, 1, 0], -14880),
    ([0, 0, 2, 0], 28800),
];

const D12A_TERMS: [([usize; 4], i64); 6] = [
    ([4, 1, 0, 0], -1),
    ([3, 0, 1, 0], 12),
    ([2, 2, 0, 0], -52),
    ([0, 3, 0, 0], 80),
    ([1, 1, 1, 0], 960),
    ([0, 0, 2, 0], -3600),
];

const D12B_TERMS: [([usize; 4], i64); 8] = [
    ([5, 0, 0, 1], 864),
    ([1, 2, 0, 1], 3456000),
    ([3, 1, 0, 1], -43200),
    ([0, 0, 0, 2], -2332800000),
    ([6, 2, 0, 0], -1),
    ([2, 4, 0, 0], -768),
    ([4, 3, 0, 0], 48),
    ([0, 5, 0, 0], 4096),
];

/// Weight of a monomial J₂^a J₄^b J₆^c J₁₀^d.
pub fn weight(e: &[usize; 4]) -> usize {
    2 * e[0] + 4 * e[1] + 6 * e[2] + 10 * e[3]
}

pub fn l2_polynomial(j: &IgusaInvariants) -> Q {
    j.eval(&L2_TERMS)
}

pub fn d8_polynomial(j: &IgusaInvariants) -> Q {
    j.eval(&D8_TERMS)
}

pub fn d12_polynomials(j: &IgusaInvariants) -> [Q; 2] {
    [j.eval(&D12A_TERMS), j.eval(&D12B_TERMS)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocusFlags {
    pub generic: bool,
    pub l2: bool,
    pub d8: bool,
    pub d12: bool,
}

impl LocusFlags {
    pub fn names(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.generic {
            v.push("generic");
        }
        if self.l2 {
            v.push("L2");
        }
        if self.d8 {
            v.push("D8");
        }
        if self.d12 {
            v.push("D12");
        }
        v
    }
}

/// Exact-zero tests; D₈ and D₁₂ are only reported inside L₂.
pub fn locus_membership(j: &IgusaInvariants) -> LocusFlags {
    let l2 = l2_polynomial(j).is_zero();
    let d8 = l2 && d8_polynomial(j).is_zero();
    let d12 = l2 && d12_polynomials(j).iter().all(Zero::is_zero);
    LocusFlags { generic: !l2, l2, d8, d12 }
}

/// The fifteen factors of Table 2.1 for y² = x(x−1)(x−a₁)(x−a₂)(x−a₃), in
/// row order.
pub fn table21_factors<T>(a1: &T, a2: &T, a3: &T) -> [T; 15]
where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
{
    let m = |x: &T, y: &T| x.clone() * y.clone();
    let (a12, a13, a23) = (m(a1, a2), m(a3, a1), m(a3, a2));
    let (a1, a2, a3) = (a1.clone(), a2.clone(), a3.clone());
    [
        a12.clone() + a1.clone() - a13.clone() - a2.clone(),
        a12.clone() - a1.clone() + a13.clone() - a23.clone(),
        a12.clone() - a1.clone() - a13.clone() + a3.clone(),
        a12.clone() - a2.clone() - a23.clone() + a3.clone(),
        a12.clone() - a1.clone() + a2.clone() - a23.clone(),
        a12.clone() - a13.clone() - a2.clone() + a23.clone(),
        a12.clone() - a13.clone() - a23.clone() + a3.clone(),
        a13.clone() - a1.clone() - a23.clone() + a3.clone(),
        a13.clone() + a2.clone() - a3.clone() - a23.clone(),
        a13.clone() - a1.clone() + a2.clone() - a3.clone(),
        a12.clone() - a1.clone() - a2.clone() + a3.clone(),
        a1.clone() - a2.clone() + a23.clone() - a3.clone(),
        a12 - a3,
        a1 - a23,
        a13 - a2,
    ]
}

/// L₂(J(f)) / Π (Table 2.1 factors)² for y² = x(x−1)(x−a₁)(x−a₂)(x−a₃).
pub const L2_FACTOR_CONSTANT: i64 = -40310784;

#[derive(Debug, Clone, Serialize)]
pub struct L2Check {
    pub l2_value: String,
    pub factor_product: String,
    /// Rows of Table 2.1 whose factor vanishes.
    pub vanishing_rows: Vec<usize>,
    pub consistent: bool,
}

/// Compares the L₂ polynomial with the factored form at one point.
pub fn l2_factorization_check(a1: &Q, a2: &Q, a3: &Q) -> Result<L2Check> {
    let pts = [Q::zero(), Q::one(), a1.clone(), a2.clone(), a3.clone()];
    for i in 0..5 {
        for j in i + 1..5 {
            if pts[i] == pts[j] {
                return Err(Error::degenerate("a1, a2, a3 must be distinct and avoid 0 and 1"));
            }
        }
    }
    let f = BinarySextic::from_roots(Q::one(), &pts)?;
    let l2 = l2_polynomial(&igusa(&f));
    let factors = table21_factors(a1, a2, a3);
    let product = factors.iter().fold(Q::one(), |acc, t| acc * t * t);
    let vanishing_rows = (1..=15).filter(|&r| factors[r - 1].is_zero()).collect();
    let consistent = l2 == q(L2_FACTOR_CONSTANT) * &product;
    Ok(L2Check { l2_value: l2.to_string(), factor_product: product.to_string(), vanishing_rows, consistent })
}
