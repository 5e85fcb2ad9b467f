//! Genus-2 automorphism loci read off theta constants.
//!
//! θ₁..θ₁₀ are the even genus-2 thetanulls in the `labels` order; θ₁..θ₄
//! are the fundamental ones. Locus tests report the smallest normalized
//! factor: |f| divided by the sum of the magnitudes of f's terms, so 0 means
//! the factor vanishes and values near 1 mean no cancellation.

use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::igusa;

type C = Complex64;

pub const LOCUS_TOL: f64 = 1e-6;

/// A polynomial in θ₁..θ₁₀: terms (coefficient, [(label, exponent)]).
pub struct ThetaPoly {
    pub terms: &'static [(i64, &'static [(usize, u32)])],
}

impl ThetaPoly {
    /// (value, Σ |term|) with `th[l]` the value of θ_l (index 0 unused).
    pub fn eval(&self, th: &[C]) -> (C, f64) {
        let mut v = C::new(0.0, 0.0);
        let mut mag = 0.0;
        for (c, mono) in self.terms {
            let t = mono.iter().fold(C::new(*c as f64, 0.0), |acc, &(l, e)| acc * th[l].powu(e));
            v += t;
            mag += t.norm();
        }
        (v, mag)
    }

    pub fn normalized(&self, th: &[C]) -> f64 {
        let (v, m) = self.eval(th);
        if m == 0.0 {
            0.0
        } else {
            v.norm() / m
        }
    }
}

macro_rules! poly {
    ($($c:expr => [$(($l:expr, $e:expr)),*]),* $(,)?) => {
        ThetaPoly { terms: &[$(($c, &[$(($l, $e)),*])),*] }
    };
}

/// Column 4 of Table 2.1: the theta expression vanishing on each row's
/// cross-ratio condition. Row 8 is printed as θ₈⁴ − θ₁₀⁴, a repeat of row
/// 13; the expression below is the one that vanishes on row 8's variety.
pub const TABLE21_TAGS: [ThetaPoly; 15] = [
    poly!(-1 => [(1, 2), (3, 2), (8, 2), (2, 2)], -1 => [(1, 2), (2, 2), (4, 2), (10, 2)], 1 => [(1, 4), (3, 2), (10, 2)], 1 => [(3, 2), (2, 4), (10, 2)]),
    poly!(1 => [(3, 2), (8, 2), (2, 2), (4, 2)], -1 => [(2, 2), (4, 4), (10, 2)], 1 => [(1, 2), (3, 2), (4, 2), (10, 2)], -1 => [(3, 4), (2, 2), (10, 2)]),
    poly!(-1 => [(8, 4), (3, 2), (2, 2)], 1 => [(8, 2), (2, 2), (10, 2), (4, 2)], 1 => [(1, 2), (3, 2), (8, 2), (10, 2)], -1 => [(3, 2), (2, 2), (10, 4)]),
    poly!(-1 => [(1, 2), (8, 4), (4, 2)], -1 => [(1, 2), (10, 4), (4, 2)], 1 => [(8, 2), (2, 2), (10, 2), (4, 2)], 1 => [(1, 2), (3, 2), (8, 2), (10, 2)]),
    poly!(-1 => [(1, 2), (8, 2), (3, 2), (4, 2)], 1 => [(1, 2), (10, 2), (4, 4)], 1 => [(1, 2), (3, 4), (10, 2)], -1 => [(3, 2), (2, 2), (10, 2), (4, 2)]),
    poly!(-1 => [(1, 2), (8, 2), (2, 2), (4, 2)], 1 => [(1, 4), (10, 2), (4, 2)], -1 => [(1, 2), (3, 2), (2, 2), (10, 2)], 1 => [(2, 4), (4, 2), (10, 2)]),
    poly!(-1 => [(8, 4), (2, 2), (4, 2)], 1 => [(1, 2), (8, 2), (10, 2), (4, 2)], -1 => [(2, 2), (10, 4), (4, 2)], 1 => [(3, 2), (8, 2), (2, 2), (10, 2)]),
    poly!(1 => [(1, 2), (3, 2), (4, 2), (8, 2)], -1 => [(2, 2), (4, 4), (8, 2)], -1 => [(2, 2), (3, 4), (8, 2)], 1 => [(2, 2), (3, 2), (4, 2), (10, 2)]),
    poly!(1 => [(1, 4), (8, 2), (4, 2)], -1 => [(1, 2), (2, 2), (4, 2), (10, 2)], -1 => [(1, 2), (3, 2), (8, 2), (2, 2)], 1 => [(8, 2), (2, 4), (4, 2)]),
    poly!(1 => [(1, 4), (3, 2), (8, 2)], -1 => [(1, 2), (8, 2), (2, 2), (4, 2)], -1 => [(1, 2), (3, 2), (2, 2), (10, 2)], 1 => [(3, 2), (8, 2), (2, 4)]),
    poly!(1 => [(1, 2), (8, 4), (3, 2)], -1 => [(1, 2), (8, 2), (10, 2), (4, 2)], 1 => [(1, 2), (3, 2), (10, 4)], -1 => [(3, 2), (8, 2), (2, 2), (10, 2)]),
    poly!(1 => [(1, 2), (8, 2), (4, 4)], -1 => [(1, 2), (3, 2), (4, 2), (10, 2)], 1 => [(1, 2), (3, 4), (8, 2)], -1 => [(3, 2), (8, 2), (2, 2), (4, 2)]),
    poly!(1 => [(8, 4)], -1 => [(10, 4)]),
    poly!(1 => [(3, 4)], -1 => [(4, 4)]),
    poly!(1 => [(1, 4)], -1 => [(2, 4)]),
];

pub const TABLE21_TAG_TEXT: [&str; 15] = [
    "-t1^2 t3^2 t8^2 t2^2 - t1^2 t2^2 t4^2 t10^2 + t1^4 t3^2 t10^2 + t3^2 t2^4 t10^2",
    "t3^2 t8^2 t2^2 t4^2 - t2^2 t4^4 t10^2 + t1^2 t3^2 t4^2 t10^2 - t3^4 t2^2 t10^2",
    "-t8^4 t3^2 t2^2 + t8^2 t2^2 t10^2 t4^2 + t1^2 t3^2 t8^2 t10^2 - t3^2 t2^2 t10^4",
    "-t1^2 t8^4 t4^2 - t1^2 t10^4 t4^2 + t8^2 t2^2 t10^2 t4^2 + t1^2 t3^2 t8^2 t10^2",
    "-t1^2 t8^2 t3^2 t4^2 + t1^2 t10^2 t4^4 + t1^2 t3^4 t10^2 - t3^2 t2^2 t10^2 t4^2",
    "-t1^2 t8^2 t2^2 t4^2 + t1^4 t10^2 t4^2 - t1^2 t3^2 t2^2 t10^2 + t2^4 t4^2 t10^2",
    "-t8^4 t2^2 t4^2 + t1^2 t8^2 t10^2 t4^2 - t2^2 t10^4 t4^2 + t3^2 t8^2 t2^2 t10^2",
    "t1^2 t3^2 t4^2 t8^2 - t2^2 t4^4 t8^2 - t2^2 t3^4 t8^2 + t2^2 t3^2 t4^2 t10^2",
    "t1^4 t8^2 t4^2 - t1^2 t2^2 t4^2 t10^2 - t1^2 t3^2 t8^2 t2^2 + t8^2 t2^4 t4^2",
    "t1^4 t3^2 t8^2 - t1^2 t8^2 t2^2 t4^2 - t1^2 t3^2 t2^2 t10^2 + t3^2 t8^2 t2^4",
    "t1^2 t8^4 t3^2 - t1^2 t8^2 t10^2 t4^2 + t1^2 t3^2 t10^4 - t3^2 t8^2 t2^2 t10^2",
    "t1^2 t8^2 t4^4 - t1^2 t3^2 t4^2 t10^2 + t1^2 t3^4 t8^2 - t3^2 t8^2 t2^2 t4^2",
    "t8^4 - t10^4",
    "t3^4 - t4^4",
    "t1^4 - t2^4",
];

pub const TABLE21_FACTOR_TEXT: [&str; 15] = [
    "a1a2 + a1 - a3a1 - a2",
    "a1a2 - a1 + a3a1 - a3a2",
    "a1a2 - a1 - a3a1 + a3",
    "a1a2 - a2 - a3a2 + a3",
    "a1a2 - a1 + a2 - a3a2",
    "a1a2 - a3a1 - a2 + a3a2",
    "a1a2 - a3a1 - a3a2 + a3",
    "a3a1 - a1 - a3a2 + a3",
    "a3a1 + a2 - a3 - a3a2",
    "-a1 + a3a1 + a2 - a3",
    "a1a2 - a1 - a2 + a3",
    "a1 - a2 + a3a2 - a3",
    "a1a2 - a3",
    "a1 - a3a2",
    "a3a1 - a2",
];

#[derive(Debug, Clone, Serialize)]
pub struct Table21Row {
    pub row: usize,
    pub factor: String,
    pub value: String,
    pub theta_tag: &'static str,
}

/// Exact Table 2.1 factors at y² = x(x−1)(x−a₁)(x−a₂)(x−a₃).
pub fn table21(a1: &BigRational, a2: &BigRational, a3: &BigRational) -> Vec<Table21Row> {
    igusa::table21_factors(a1, a2, a3)
        .iter()
        .enumerate()
        .map(|(i, v)| Table21Row {
            row: i + 1,
            factor: TABLE21_FACTOR_TEXT[i].into(),
            value: v.to_string(),
            theta_tag: TABLE21_TAG_TEXT[i],
        })
        .collect()
}

/// θ₁..θ₁₀ with a dummy slot 0 so labels index directly.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenThetas(pub [C; 11]);

impl EvenThetas {
    pub fn from_slice(v: &[C]) -> Result<Self> {
        if v.len() != 10 {
            return Err(Error::Dimension { expected: 10, got: v.len() });
        }
        let mut a = [C::new(0.0, 0.0); 11];
        a[1..].copy_from_slice(v);
        Ok(EvenThetas(a))
    }

    pub fn get(&self, l: usize) -> C {
        self.0[l]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundamentalThetas {
    pub t: [C; 4],
}

impl FundamentalThetas {
    pub fn new(t1: C, t2: C, t3: C, t4: C) -> Self {
        FundamentalThetas { t: [t1, t2, t3, t4] }
    }

    pub fn from_even(th: &EvenThetas) -> Self {
        Self::new(th.get(1), th.get(2), th.get(3), th.get(4))
    }

    fn squares(&self) -> [C; 4] {
        self.t.map(|x| x * x)
    }
}

/// One of the pairs (θ5, θ6), (θ7, θ9), (θ8, θ10) recovered from θ₁..θ₄.
#[derive(Debug, Clone, Serialize)]
pub struct DerivedPair {
    pub labels: (usize, usize),
    /// θ_a²θ_b² and θ_a⁴ + θ_b⁴ from the group (i) identities.
    pub product_of_squares: [f64; 2],
    pub sum_of_fourths: [f64; 2],
    /// The two fourth powers; which label gets which is not fixed by θ₁..θ₄.
    pub fourth_powers: [[f64; 2]; 2],
    /// Squares with the convention θ_a² = principal √(first fourth power),
    /// θ_b² = product / θ_a².
    pub squares: [[f64; 2]; 2],
}

fn pair(c: C) -> [f64; 2] {
    [c.re, c.im]
}

/// θ₅..θ₁₀ from the fundamental thetanulls via the identities of the
/// all-even group {0, [00;0½], [00;½0], [00;½½]}.
pub fn derive_even_thetanulls(ft: &FundamentalThetas) -> Result<Vec<DerivedPair>> {
    if ft.t.iter().any(|t| t.norm() == 0.0) {
        return Err(Error::domain("fundamental thetanulls must be nonzero"));
    }
    let [s1, s2, s3, s4] = ft.squares();
    let (q1, q2, q3, q4) = (s1 * s1, s2 * s2, s3 * s3, s4 * s4);
    let rows = [
        ((5, 6), s1 * s4 - s2 * s3, q1 - q2 - q3 + q4),
        ((7, 9), s1 * s3 - s2 * s4, q1 - q2 + q3 - q4),
        ((8, 10), s1 * s2 - s3 * s4, q1 + q2 - q3 - q4),
    ];
    Ok(rows
        .into_iter()
        .map(|(labels, p, s)| {
            // θ_a⁴, θ_b⁴ are the roots of t² − s t + p².
            let disc = (s * s - 4.0 * p * p).sqrt();
            let (r1, r2) = ((s + disc) / 2.0, (s - disc) / 2.0);
            let (r1, r2) = if r1.norm() >= r2.norm() { (r1, r2) } else { (r2, r1) };
            let a = r1.sqrt();
            let b = if a.norm() > 0.0 { p / a } else { r2.sqrt() };
            DerivedPair {
                labels,
                product_of_squares: pair(p),
                sum_of_fourths: pair(s),
                fourth_powers: [pair(r1), pair(r2)],
                squares: [pair(a), pair(b)],
            }
        })
        .collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveCandidate {
    pub alpha: [f64; 2],
    /// (λ, μ, ν) with y² = x(x−1)(x−λ)(x−μ)(x−ν).
    pub lambda: [f64; 2],
    pub mu: [f64; 2],
    pub nu: [f64; 2],
    /// Ascending coefficients of the quintic.
    pub coefficients: Vec<[f64; 2]>,
    pub v4: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FundamentalCurve {
    pub alpha_roots: [[f64; 2]; 2],
    pub candidates: Vec<CurveCandidate>,
}

fn poly_mul_c(a: &[C], b: &[C]) -> Vec<C> {
    let mut r = vec![C::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    r
}

/// The curve x(x−1)(x−λ)(x² − σαx + λα²) with λ = θ₁²θ₃²/(θ₂²θ₄²),
/// σ = (θ₂²θ₃² + θ₁²θ₄²)/(θ₂²θ₄²), for both roots α of
/// α² + ((θ₁⁴+θ₂⁴−θ₃⁴−θ₄⁴)/(θ₃²θ₄²−θ₁²θ₂²)) α + 1 = 0.
pub fn curve_from_fundamentals(ft: &FundamentalThetas, tol: f64) -> Result<FundamentalCurve> {
    let [s1, s2, s3, s4] = ft.squares();
    let scale = s1.norm() * s2.norm() + s3.norm() * s4.norm();
    let den = s3 * s4 - s1 * s2;
    if den.norm() <= tol * scale || (s2 * s4).norm() <= tol * scale {
        return Err(Error::degenerate("θ3²θ4² = θ1²θ2² or θ2θ4 = 0"));
    }
    let b = (s1 * s1 + s2 * s2 - s3 * s3 - s4 * s4) / den;
    let disc = (b * b - 4.0).sqrt();
    let roots = [(-b + disc) / 2.0, (-b - disc) / 2.0];
    let lambda = s1 * s3 / (s2 * s4);
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let candidates = roots
        .iter()
        .map(|&alpha| {
            let mu = s3 / s4 * alpha;
            let nu = s1 / s2 * alpha;
            let mut p = vec![zero, one];
            for r in [one, lambda, mu, nu] {
                p = poly_mul_c(&p, &[-r, one]);
            }
            let v4 = (alpha - one).norm() < tol || (alpha + one).norm() < tol;
            CurveCandidate {
                alpha: pair(alpha),
                lambda: pair(lambda),
                mu: pair(mu),
                nu: pair(nu),
                coefficients: p.into_iter().map(pair).collect(),
                v4,
            }
        })
        .collect();
    Ok(FundamentalCurve { alpha_roots: roots.map(pair), candidates })
}

#[derive(Debug, Clone, Serialize)]
pub struct LocusResidual {
    /// Smallest normalized factor.
    pub residual: f64,
    /// 1-based index of that factor.
    pub factor: usize,
    pub factors: Vec<f64>,
}

fn min_factor(factors: Vec<f64>) -> LocusResidual {
    let (i, r) = factors
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((0, f64::INFINITY));
    LocusResidual { residual: r, factor: i + 1, factors }
}

/// V₄ ⊂ Aut test on θ₁..θ₁₀: the fifteen Table 2.1 theta expressions.
pub fn v4_theta_test(th: &EvenThetas) -> LocusResidual {
    min_factor(TABLE21_TAGS.iter().map(|p| p.normalized(&th.0)).collect())
}

/// Index of the V₄ test factors as printed in the locus lemma: every
/// Table 2.1 row except 8.
pub const V4_PRINTED_ROWS: [usize; 14] = [1, 2, 3, 4, 5, 6, 7, 9, 10, 11, 12, 13, 14, 15];

/// The lemma's printed product, which lacks the row-8 factor.
pub fn v4_theta_test_printed(th: &EvenThetas) -> LocusResidual {
    min_factor(V4_PRINTED_ROWS.iter().map(|&r| TABLE21_TAGS[r - 1].normalized(&th.0)).collect())
}

const V4_FUNDAMENTAL: [ThetaPoly; 14] = [
    poly!(1 => [(3, 4)], -1 => [(4, 4)]),
    poly!(1 => [(1, 4)], -1 => [(3, 4)]),
    poly!(1 => [(2, 4)], -1 => [(4, 4)]),
    poly!(1 => [(1, 4)], -1 => [(4, 4)]),
    poly!(1 => [(3, 4)], -1 => [(2, 4)]),
    poly!(1 => [(1, 4)], -1 => [(2, 4)]),
    poly!(-1 => [(4, 2)], 1 => [(3, 2)], 1 => [(1, 2)], -1 => [(2, 2)]),
    poly!(1 => [(4, 2)], -1 => [(3, 2)], 1 => [(1, 2)], -1 => [(2, 2)]),
    poly!(-1 => [(4, 2)], -1 => [(3, 2)], 1 => [(2, 2)], 1 => [(1, 2)]),
    poly!(1 => [(4, 2)], 1 => [(3, 2)], 1 => [(2, 2)], 1 => [(1, 2)]),
    poly!(1 => [(1, 4), (2, 4)], 1 => [(3, 4), (2, 4)], 1 => [(1, 4), (3, 4)], -2 => [(1, 2), (2, 2), (3, 2), (4, 2)]),
    poly!(-1 => [(3, 4), (2, 4)], -1 => [(2, 4), (4, 4)], -1 => [(3, 4), (4, 4)], 2 => [(1, 2), (2, 2), (3, 2), (4, 2)]),
    poly!(1 => [(2, 4), (4, 4)], 1 => [(1, 4), (2, 4)], 1 => [(1, 4), (4, 4)], -2 => [(1, 2), (2, 2), (3, 2), (4, 2)]),
    poly!(1 => [(1, 4), (4, 4)], 1 => [(3, 4), (4, 4)], 1 => [(1, 4), (3, 4)], -2 => [(1, 2), (2, 2), (3, 2), (4, 2)]),
];

fn fundamental_slots(ft: &FundamentalThetas) -> [C; 5] {
    [C::new(0.0, 0.0), ft.t[0], ft.t[1], ft.t[2], ft.t[3]]
}

/// V₄ ⊂ Aut test on θ₁..θ₄ alone.
pub fn v4_fundamental_test(ft: &FundamentalThetas) -> LocusResidual {
    let th = fundamental_slots(ft);
    min_factor(V4_FUNDAMENTAL.iter().map(|p| p.normalized(&th)).collect())
}

const D8_REMARK_PLUS: [ThetaPoly; 7] = [
    poly!(1 => [(1, 4)], -1 => [(2, 4)]),
    poly!(1 => [(1, 2), (2, 2)], -1 => [(3, 4)]),
    poly!(1 => [(2, 2)], 1 => [(1, 2)], 2 => [(3, 2)]),
    poly!(1 => [(2, 2)], 1 => [(1, 2)], -2 => [(3, 2)]),
    poly!(2 => [(1, 4)], -2 => [(1, 2), (2, 2)], 1 => [(3, 4)]),
    poly!(-2 => [(2, 4)], -1 => [(3, 4)], 2 => [(1, 2), (2, 2)]),
    poly!(
        -10 => [(1, 4), (2, 12), (3, 8)], 206 => [(1, 4), (2, 4), (3, 16)], 8 => [(1, 8), (2, 16)],
        -34 => [(1, 4), (2, 8), (3, 12)], -126 => [(1, 2), (2, 6), (3, 16)], 18 => [(1, 2), (2, 10), (3, 12)],
        27 => [(1, 8), (3, 16)], -132 => [(1, 8), (2, 8), (3, 8)], -34 => [(1, 8), (2, 4), (3, 12)],
        -16 => [(1, 8), (2, 12), (3, 4)], -16 => [(1, 6), (2, 14), (3, 4)], -126 => [(1, 6), (2, 2), (3, 16)],
        24 => [(1, 6), (2, 6), (3, 12)], 68 => [(1, 6), (2, 10), (3, 8)], -24 => [(1, 12), (2, 12)],
        8 => [(1, 16), (2, 8)], -10 => [(1, 12), (2, 4), (3, 8)], -16 => [(1, 12), (2, 8), (3, 4)],
        88 => [(1, 10), (2, 10), (3, 4)], 18 => [(1, 10), (2, 2), (3, 12)], 68 => [(1, 10), (2, 6), (3, 8)],
        27 => [(2, 8), (3, 16)], -16 => [(1, 14), (2, 6), (3, 4)],
    ),
];

const D8_REMARK_MINUS: [ThetaPoly; 7] = [
    poly!(1 => [(1, 4)], -1 => [(2, 4)]),
    poly!(1 => [(3, 4)], 1 => [(1, 2), (2, 2)]),
    poly!(-1 => [(2, 2)], 1 => [(1, 2)], -2 => [(3, 2)]),
    poly!(-1 => [(2, 2)], 1 => [(1, 2)], 2 => [(3, 2)]),
    poly!(1 => [(3, 4)], 2 => [(1, 2), (2, 2)], 2 => [(1, 4)]),
    poly!(2 => [(2, 4)], 1 => [(3, 4)], 2 => [(1, 2), (2, 2)]),
    poly!(
        206 => [(1, 4), (2, 4), (3, 16)], -10 => [(1, 4), (2, 12), (3, 8)], 27 => [(2, 8), (3, 16)],
        -34 => [(1, 4), (2, 8), (3, 12)], 126 => [(1, 2), (2, 6), (3, 16)], -18 => [(1, 2), (2, 10), (3, 12)],
        -68 => [(1, 10), (2, 6), (3, 8)], 8 => [(1, 8), (2, 16)], 27 => [(1, 8), (3, 16)],
        -132 => [(1, 8), (2, 8), (3, 8)], -34 => [(1, 8), (2, 4), (3, 12)], -16 => [(1, 8), (2, 12), (3, 4)],
        16 => [(1, 6), (2, 14), (3, 4)], 126 => [(1, 6), (2, 2), (3, 16)], -24 => [(1, 6), (2, 6), (3, 12)],
        -68 => [(1, 6), (2, 10), (3, 8)], -24 => [(1, 12), (2, 12)], 16 => [(1, 14), (2, 6), (3, 4)],
        -10 => [(1, 12), (2, 4), (3, 8)], -16 => [(1, 12), (2, 8), (3, 4)], -88 => [(1, 10), (2, 10), (3, 4)],
        -18 => [(1, 10), (2, 2), (3, 12)], 8 => [(1, 16), (2, 8)],
    ),
];

/// The simplified D₈ conditions for θ₄² = θ₃² (`plus`) or θ₄² = −θ₃².
/// They have no curve family to check against; treat as weakly verified.
pub fn d8_remark_test(ft: &FundamentalThetas, plus: bool) -> LocusResidual {
    let th = fundamental_slots(ft);
    let polys = if plus { &D8_REMARK_PLUS } else { &D8_REMARK_MINUS };
    min_factor(polys.iter().map(|p| p.normalized(&th)).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct AbcdeReport {
    /// A..E = (θ₂/θ₁)⁴, (θ₃/θ₁)⁴, (θ₄/θ₁)⁴, (θ₈/θ₁)⁴, (θ₁₀/θ₁)⁴.
    pub values: [[f64; 2]; 5],
    /// Normalized residual of 1 + A − B − C − D − E.
    pub linear: f64,
    /// Normalized residual of A² − 2ADE − 2ABC + B²C² − 2BCDE + D²E².
    pub quadratic: f64,
    /// V₄ criterion in A..E, smallest normalized factor.
    pub v4: LocusResidual,
    /// Normalized value of the sextic factor as printed in the lemma.
    pub printed_sextic: f64,
}

fn normalized_sum(terms: &[C]) -> f64 {
    let s: C = terms.iter().sum();
    let m: f64 = terms.iter().map(|t| t.norm()).sum();
    if m == 0.0 {
        0.0
    } else {
        s.norm() / m
    }
}

pub fn abcde_residuals(th: &EvenThetas) -> Result<AbcdeReport> {
    let t1 = th.get(1);
    if t1.norm() == 0.0 {
        return Err(Error::domain("θ1 = 0"));
    }
    let r = |l: usize| (th.get(l) / t1).powu(4);
    let (a, b, c, d, e) = (r(2), r(3), r(4), r(8), r(10));
    let one = C::new(1.0, 0.0);
    let de = d * e;
    let linear = normalized_sum(&[one, a, -b, -c, -d, -e]);
    let quadratic = normalized_sum(&[a * a, -2.0 * de * a, -2.0 * a * b * c, b * b * c * c, -2.0 * de * b * c, de * de]);
    let factors: Vec<Vec<C>> = vec![
        vec![b, -a],
        vec![a, -c],
        vec![b, -c],
        vec![one, -a],
        vec![one, -b],
        vec![one, -c],
        vec![
            a * a,
            -2.0 * a * b,
            -2.0 * a * c,
            2.0 * a,
            b * b,
            2.0 * b * c,
            -2.0 * b,
            c * c,
            -2.0 * c,
            -4.0 * de,
            one,
        ],
        vec![a * b, -b * c, b, de],
        vec![-a, b, c, de],
        vec![
            -de * b * c,
            -4.0 * a * b * c,
            b * b * c * c,
            a * c,
            a * b * b * c,
            -a * de * b,
            a * a,
            a * a * c,
            a * b * c * c,
            -de * c,
            -2.0 * a * de * c,
            -a * a * c * c,
            -a * a * b * c,
            -a * c * c,
            -a * de,
        ],
    ];
    let v4 = min_factor(factors.iter().map(|f| normalized_sum(f)).collect());
    let printed_sextic = normalized_sum(&[
        one,
        -2.0 * c,
        2.0 * a,
        a * a * c * c,
        -4.0 * de,
        -a * c,
        -2.0 * a * a * b * c,
        2.0 * a * de * b * c,
        a * b * b,
        de * b * c,
        a * de * b,
        -a * a,
        4.0 * a * b * c,
        -2.0 * a * b * b * c * c,
        -a * a * b,
        a * de,
        -b * b * c * c,
        -2.0 * b * c * c,
        b * b * c,
    ]);
    Ok(AbcdeReport { values: [a, b, c, d, e].map(pair), linear, quadratic, v4, printed_sextic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    fn qi(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn table21_rows() {
        let rows = table21(&qi(2), &qi(3), &qi(6));
        assert_eq!(rows[12].value, "0");
        assert_eq!(rows[12].theta_tag, "t8^4 - t10^4");
        let rows = table21(&qi(2), &qi(6), &qi(3));
        assert_eq!(rows[14].value, "0");
        assert_eq!(rows[14].theta_tag, "t1^4 - t2^4");
        let generic = table21(&qi(2), &qi(3), &qi(7));
        assert!(generic.iter().all(|r| r.value != "0"));
        let half = BigRational::new(1.into(), 2.into());
        assert!(igusa::table21_factors(&half, &qi(5), &qi(-3)).iter().all(|v| !v.is_zero()));
    }

    #[test]
    fn tag_text_matches_polynomials() {
        for (poly, text) in TABLE21_TAGS.iter().zip(TABLE21_TAG_TEXT) {
            assert_eq!(poly.terms.len(), text.split(['+', '-']).filter(|s| !s.trim().is_empty()).count());
        }
    }

    #[test]
    fn derived_fourth_powers_satisfy_identities() {
        let ft = FundamentalThetas::new(c(1.3), C::new(0.9, 0.1), c(0.7), C::new(0.4, -0.2));
        let d = derive_even_thetanulls(&ft).unwrap();
        let p8 = &d[2];
        let f = |v: [f64; 2]| C::new(v[0], v[1]);
        let [s1, s2, s3, s4] = ft.t.map(|x| x.powu(4));
        let sum = f(p8.fourth_powers[0]) + f(p8.fourth_powers[1]);
        assert!((sum - (s1 + s2 - s3 - s4)).norm() < 1e-12);
        let prod = f(p8.squares[0]) * f(p8.squares[1]);
        assert!((prod - f(p8.product_of_squares)).norm() < 1e-12);
        // θ3 = θ4 collapses the (7, 9) sum to θ1⁴ − θ2⁴.
        let sym = FundamentalThetas::new(c(1.3), c(0.9), c(0.6), c(0.6));
        let d = derive_even_thetanulls(&sym).unwrap();
        let s79 = f(d[1].fourth_powers[0]) + f(d[1].fourth_powers[1]);
        assert!((s79 - c(1.3f64.powi(4) - 0.9f64.powi(4))).norm() < 1e-12);
    }

    #[test]
    fn alpha_roots_multiply_to_one() {
        let ft = FundamentalThetas::new(c(1.3), C::new(0.9, 0.1), c(0.7), C::new(0.4, -0.2));
        let fc = curve_from_fundamentals(&ft, 1e-9).unwrap();
        let [a, b] = fc.alpha_roots.map(|v| C::new(v[0], v[1]));
        assert!((a * b - c(1.0)).norm() < 1e-12);
        let bad = FundamentalThetas::new(c(1.0), c(1.0), c(1.0), c(1.0));
        assert!(curve_from_fundamentals(&bad, 1e-9).is_err());
    }

    #[test]
    fn alpha_one_gives_elliptic_involution() {
        // α = 1 is a double root exactly when (θ1² − θ2²)² = (θ3² − θ4²)².
        let (t1, t2, t3) = (1.2f64, 0.8f64, 0.5f64);
        let t4sq = t3 * t3 + t1 * t1 - t2 * t2;
        let ft = FundamentalThetas::new(c(t1), c(t2), c(t3), c(t4sq.sqrt()));
        let fc = curve_from_fundamentals(&ft, 1e-6).unwrap();
        let cand = &fc.candidates[0];
        assert!(cand.v4);
        let f = |v: [f64; 2]| C::new(v[0], v[1]);
        assert!((f(cand.mu) * f(cand.nu) - f(cand.lambda)).norm() < 1e-9);
    }

    #[test]
    fn theta8_equals_theta10_is_on_the_v4_locus() {
        let mut v = [c(0.7); 10];
        v[7] = c(0.55);
        v[9] = c(-0.55);
        let th = EvenThetas::from_slice(&v).unwrap();
        let r = v4_theta_test(&th);
        assert_eq!(r.residual, 0.0);
    }

    #[test]
    fn abcde_linear_factor() {
        let mut v = [c(1.0); 10];
        v[1] = c(0.8);
        v[2] = c(0.8);
        let th = EvenThetas::from_slice(&v).unwrap();
        let rep = abcde_residuals(&th).unwrap();
        assert_eq!(rep.v4.factor, 1);
        assert_eq!(rep.v4.residual, 0.0);
    }

    #[test]
    fn d8_remark_cases_are_related_by_sign_flip() {
        // The θ4² = −θ3² polynomial is the θ4² = θ3² one with θ1² ↦ −θ1².
        let (t1, t2, t3) = (C::new(1.1, 0.2), C::new(0.7, -0.1), C::new(0.5, 0.3));
        let i_t1 = t1 * C::new(0.0, 1.0);
        let plus = d8_remark_test(&FundamentalThetas::new(i_t1, t2, t3, t3), true);
        let minus = d8_remark_test(&FundamentalThetas::new(t1, t2, t3, t3), false);
        for (a, b) in plus.factors.iter().zip(&minus.factors) {
            assert!((a - b).abs() < 1e-12, "{plus:?} vs {minus:?}");
        }
    }
}
