//! Cyclic curves yⁿ = f(x) beyond the hyperelliptic case.
//!
//! Picard curves y³ = x(x−1)(x−s)(x−t) get (s, t) from three thetanulls with
//! sixth-order characteristics. Genus-4 trigonal curves
//! y³ = x(x−1)(x−a₁)(x−a₂)(x−a₃) get fifteen θ⁶ relations indexed by the
//! perfect matchings of six points. These thetanulls are unrelated to the
//! hyperelliptic θ₁..θ₆₄ labels; the numbering here is local to this module.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::igusa::{parse_univariate, poly_gcd, trim};
use crate::theta::{theta_raw, thetanull, EvalParams, RatChar, SiegelPoint};
use crate::thomae::{ser_c, ser_cv};

type C = Complex64;
type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn ser_c3<S: Serializer>(v: &[C; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    ser_cv(v, s)
}

fn ser_q<S: Serializer, T: AsRef<[Q]>>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.as_ref().iter().map(ToString::to_string).collect::<Vec<_>>().serialize(s)
}

fn ser_q1<S: Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.to_string().serialize(s)
}

fn ser_qopt<S: Serializer>(v: &[Option<Q>; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|x| x.as_ref().map(ToString::to_string)).collect::<Vec<_>>().serialize(s)
}

// Picard curves

/// [0,⅙,0; 0,⅙,0], [0,⅙,0; ⅓,⅙,⅓] and [0,⅙,0; ⅔,⅙,⅔].
pub fn sixth_characteristics() -> [RatChar; 3] {
    let top = [(0, 1), (1, 6), (0, 1)];
    [[(0, 1), (1, 6), (0, 1)], [(1, 3), (1, 6), (1, 3)], [(2, 3), (1, 6), (2, 3)]]
        .map(|b| RatChar::from_fractions(&top, &b).expect("valid characteristic"))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SixthThetaTriple {
    #[serde(serialize_with = "ser_c")]
    pub t1: C,
    #[serde(serialize_with = "ser_c")]
    pub t2: C,
    #[serde(serialize_with = "ser_c")]
    pub t3: C,
}

impl SixthThetaTriple {
    pub fn new(t1: C, t2: C, t3: C) -> Self {
        SixthThetaTriple { t1, t2, t3 }
    }

    /// Thetanulls at the three [`sixth_characteristics`] for a genus-3 τ.
    pub fn at(tau: &SiegelPoint, p: &EvalParams) -> Result<Self> {
        if tau.genus() != 3 {
            return Err(Error::Dimension { expected: 3, got: tau.genus() });
        }
        let [a, b, c] = sixth_characteristics();
        Ok(Self::new(thetanull(tau, &a, p)?, thetanull(tau, &b, p)?, thetanull(tau, &c, p)?))
    }

    /// λ₁, λ₂, λ₃: the cubes of the three values.
    pub fn cubes(&self) -> [C; 3] {
        [self.t1.powu(3), self.t2.powu(3), self.t3.powu(3)]
    }

    pub fn scaled(&self, c: C) -> Self {
        Self::new(self.t1 * c, self.t2 * c, self.t3 * c)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PicardParams {
    #[serde(serialize_with = "ser_c")]
    pub s: C,
    #[serde(serialize_with = "ser_c")]
    pub t: C,
    pub triple: SixthThetaTriple,
}

/// s = t₂³/t₁³ and t = t₃³/t₁³. Fails when |t₁| < `tol`.
pub fn picard_params_from(triple: &SixthThetaTriple, tol: f64) -> Result<PicardParams> {
    if !(triple.t1.norm() >= tol) {
        return Err(Error::degenerate(format!("|t1| = {:.3e} is below {tol:.1e}", triple.t1.norm())));
    }
    let [l1, l2, l3] = triple.cubes();
    Ok(PicardParams { s: l2 / l1, t: l3 / l1, triple: *triple })
}

/// Picard-curve parameters at a user-supplied genus-3 period matrix.
pub fn picard_params(tau: &SiegelPoint, p: &EvalParams) -> Result<PicardParams> {
    picard_params_from(&SixthThetaTriple::at(tau, p)?, 10.0 * p.target_abs_tol)
}

/// t₂³ − t₁³ + t₃³, which vanishes on the s = 1 − t family.
pub fn c6_residual(triple: &SixthThetaTriple) -> C {
    let [l1, l2, l3] = triple.cubes();
    l2 - l1 + l3
}

// Partitions of six points

pub type Matching = [[u8; 2]; 3];

/// θ₁..θ₁₅ of the genus-4 trigonal family.
pub const PARTITIONS: [Matching; 15] = [
    [[1, 2], [3, 4], [5, 6]],
    [[1, 2], [3, 5], [4, 6]],
    [[1, 2], [3, 6], [4, 5]],
    [[1, 3], [2, 4], [5, 6]],
    [[1, 3], [2, 5], [4, 6]],
    [[1, 3], [2, 6], [4, 5]],
    [[1, 4], [2, 3], [5, 6]],
    [[1, 4], [2, 5], [3, 6]],
    [[1, 4], [2, 6], [3, 5]],
    [[1, 5], [2, 3], [4, 6]],
    [[1, 5], [2, 4], [3, 6]],
    [[1, 5], [2, 6], [3, 4]],
    [[1, 6], [2, 3], [4, 5]],
    [[1, 6], [2, 4], [3, 5]],
    [[1, 6], [2, 5], [3, 4]],
];

pub fn partition_of(label: usize) -> Result<Matching> {
    label
        .checked_sub(1)
        .and_then(|i| PARTITIONS.get(i))
        .copied()
        .ok_or_else(|| Error::domain(format!("partition label {label} outside 1..=15")))
}

/// 1-based label of a matching given in any order.
pub fn label_of(m: &Matching) -> Option<usize> {
    let mut norm = m.map(|[a, b]| [a.min(b), a.max(b)]);
    norm.sort();
    PARTITIONS.iter().position(|p| *p == norm).map(|i| i + 1)
}

/// All perfect matchings of {1..n} in lexicographic order.
pub fn perfect_matchings(n: usize) -> Vec<Vec<[usize; 2]>> {
    fn rec(rest: &[usize], acc: &mut Vec<[usize; 2]>, out: &mut Vec<Vec<[usize; 2]>>) {
        let Some((&first, tail)) = rest.split_first() else {
            out.push(acc.clone());
            return;
        };
        for (k, &partner) in tail.iter().enumerate() {
            let mut remaining = tail.to_vec();
            remaining.remove(k);
            acc.push([first, partner]);
            rec(&remaining, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if n.is_multiple_of(2) {
        rec(&(1..=n).collect::<Vec<_>>(), &mut Vec::new(), &mut out);
    }
    out
}

// Genus-4 trigonal relations θᵢ⁶ = cᵢ · monomialᵢ(a₁, a₂, a₃)

pub const GENUS4_FACTOR_NAMES: [&str; 9] = ["a1-a2", "a1-a3", "a2-a3", "a1", "a2", "a3", "a1-1", "a2-1", "a3-1"];

/// Indices into [`GENUS4_FACTOR_NAMES`] of the factors cubed in θᵢ⁶; every
/// other factor appears to the first power.
pub const GENUS4_CUBED: [&[usize]; 15] = [
    &[0, 8],
    &[0, 5],
    &[0],
    &[1, 7],
    &[1, 4],
    &[1],
    &[2, 6],
    &[4, 6],
    &[5, 6],
    &[2, 3],
    &[3, 7],
    &[3, 8],
    &[2],
    &[5, 7],
    &[4, 8],
];

/// Labels (numerator, denominator) whose sixth-power ratio gives a₁², a₂², a₃².
pub const RATIO_LABELS: [(usize, usize); 3] = [(10, 13), (5, 6), (2, 3)];

pub fn genus4_factors(a: &[C; 3]) -> [C; 9] {
    let one = C::new(1.0, 0.0);
    [a[0] - a[1], a[0] - a[2], a[1] - a[2], a[0], a[1], a[2], a[0] - one, a[1] - one, a[2] - one]
}

pub fn genus4_monomials(a: &[C; 3]) -> [C; 15] {
    let f = genus4_factors(a);
    let base: C = f.iter().product();
    std::array::from_fn(|i| GENUS4_CUBED[i].iter().fold(base, |acc, &k| acc * f[k] * f[k]))
}

#[derive(Debug, Clone, Serialize)]
pub struct TrigonalRatios {
    /// (θ₁₀/θ₁₃)⁶, (θ₅/θ₆)⁶, (θ₂/θ₃)⁶, with a_i² = δ_i · ratio_i.
    #[serde(serialize_with = "ser_c3")]
    pub ratios: [C; 3],
    /// δ₁ = c₁₃/c₁₀, δ₂ = c₆/c₅, δ₃ = c₃/c₂; not determined by the thetanulls.
    pub multipliers: [&'static str; 3],
}

/// Sixth-power ratios from thetanulls keyed by partition label.
pub fn genus4_trigonal_ratios(thetas: &BTreeMap<usize, C>, tol: f64) -> Result<TrigonalRatios> {
    let get = |l: usize| thetas.get(&l).copied().ok_or_else(|| Error::domain(format!("missing theta {l}")));
    let mut ratios = [C::zero(); 3];
    for (r, &(num, den)) in ratios.iter_mut().zip(&RATIO_LABELS) {
        let d = get(den)?;
        if !(d.norm() >= tol) {
            return Err(Error::degenerate(format!("theta {den} vanishes (|θ| = {:.3e})", d.norm())));
        }
        *r = (get(num)? / d).powu(6);
    }
    Ok(TrigonalRatios { ratios, multipliers: ["c13/c10", "c6/c5", "c3/c2"] })
}

#[derive(Debug, Clone, Serialize)]
pub struct Genus4Fit {
    /// cᵢ = θᵢ⁶ / monomialᵢ.
    #[serde(serialize_with = "ser_cv")]
    pub constants: Vec<C>,
    /// δ₁, δ₂, δ₃ built from the fitted constants, δ₁ = c₁₃/c₁₀ and so on.
    #[serde(serialize_with = "ser_c3")]
    pub deltas: [C; 3],
    /// |a_i² − δ_i · ratio_i| / |a_i²|.
    pub ratio_residuals: [f64; 3],
    /// max_i |cᵢ⁶ − c₁⁶| / |c₁⁶|; zero when the constants share their sixth power.
    pub sixth_power_spread: f64,
}

fn check_factors(a: &[C; 3], tol: f64) -> Result<[C; 15]> {
    for (f, name) in genus4_factors(a).iter().zip(GENUS4_FACTOR_NAMES) {
        if !(f.norm() >= tol) {
            return Err(Error::degenerate(format!("factor {name} vanishes")));
        }
    }
    Ok(genus4_monomials(a))
}

/// Fits one constant per relation and checks the ratio formulas against them.
pub fn fit_genus4_constants(thetas: &[C; 15], a: &[C; 3], tol: f64) -> Result<Genus4Fit> {
    let mono = check_factors(a, tol)?;
    let constants: Vec<C> = thetas.iter().zip(&mono).map(|(t, m)| t.powu(6) / m).collect();
    let mut deltas = [C::zero(); 3];
    let mut ratio_residuals = [0.0; 3];
    for (i, &(num, den)) in RATIO_LABELS.iter().enumerate() {
        deltas[i] = constants[den - 1] / constants[num - 1];
        let ratio = (thetas[num - 1] / thetas[den - 1]).powu(6);
        let a2 = a[i] * a[i];
        ratio_residuals[i] = (a2 - deltas[i] * ratio).norm() / a2.norm();
    }
    let c1 = constants[0].powu(6);
    let sixth_power_spread = constants.iter().map(|c| (c.powu(6) - c1).norm() / c1.norm()).fold(0.0, f64::max);
    Ok(Genus4Fit { constants, deltas, ratio_residuals, sixth_power_spread })
}

/// |θᵢ⁶ − cᵢ · monomialᵢ| / |θᵢ⁶| for given constants.
pub fn genus4_residuals(thetas: &[C; 15], a: &[C; 3], constants: &[C; 15]) -> [f64; 15] {
    let mono = genus4_monomials(a);
    std::array::from_fn(|i| {
        let lhs = thetas[i].powu(6);
        (lhs - constants[i] * mono[i]).norm() / lhs.norm().max(f64::MIN_POSITIVE)
    })
}

// Genus-4 case 2: y³ = (x²−1)(x²−α₁)(x²−α₂)

fn qdiv(n: Q, d: Q, what: impl Into<String>) -> Result<Q> {
    if d.is_zero() {
        Err(Error::domain(format!("denominator {} vanishes", what.into())))
    } else {
        Ok(n / d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case2Chain {
    #[serde(serialize_with = "ser_q")]
    pub gamma: [Q; 4],
    #[serde(serialize_with = "ser_q")]
    pub delta: [Q; 4],
    #[serde(serialize_with = "ser_q")]
    pub beta: [Q; 3],
}

/// Images of the roots s₁, −s₁, s₂, −s₂ (s_i = √α_i) under
/// x ↦ (x−1)/(2x−1), then x ↦ (−2x+1)/(3x−2), then the map sending δ₁ to 1.
pub fn case2_chain(s1: &Q, s2: &Q) -> Result<Case2Chain> {
    let (one, two, three) = (q(1), q(2), q(3));
    let roots = [s1.clone(), -s1, s2.clone(), -s2];
    let names = ["2√α1 − 1", "−2√α1 − 1", "2√α2 − 1", "−2√α2 − 1"];
    let mut gamma: [Q; 4] = Default::default();
    let mut delta: [Q; 4] = Default::default();
    for i in 0..4 {
        gamma[i] = qdiv(&roots[i] - &one, &two * &roots[i] - &one, names[i])?;
        delta[i] = qdiv(-&two * &gamma[i] + &one, &three * &gamma[i] - &two, format!("3γ{} − 2", i + 1))?;
    }
    let d1 = &delta[0];
    let mut beta: [Q; 3] = Default::default();
    for i in 0..3 {
        let d = &delta[i + 1];
        beta[i] = qdiv((d1 + &one) * (d + &one), d1 * d + &two * d1 + &one, format!("δ1δ{} + 2δ1 + 1", i + 2))?;
    }
    Ok(Case2Chain { gamma, delta, beta })
}

/// β₁ = s₁/(s₁−2), β₂ = s₁s₂/(s₁s₂+s₁−s₂), β₃ = s₁s₂/(s₁s₂−s₁−s₂).
pub fn case2_beta(s1: &Q, s2: &Q) -> Result<[Q; 3]> {
    let p = s1 * s2;
    Ok([
        qdiv(s1.clone(), s1 - q(2), "√α1 − 2")?,
        qdiv(p.clone(), &p + s1 - s2, "√(α1α2) + √α1 − √α2")?,
        qdiv(p.clone(), &p - s1 - s2, "√(α1α2) − √α1 − √α2")?,
    ])
}

/// Inverse of [`case2_beta`]: √α₁ = 2β₁/(β₁−1), √α₂ = 2β₂β₃/(β₃−β₂).
pub fn case2_inverse(beta: &[Q; 3]) -> Result<[Q; 2]> {
    let [b1, b2, b3] = beta;
    Ok([
        qdiv(q(2) * b1, b1 - q(1), "β1 − 1")?,
        qdiv(q(2) * b2 * b3, b3 - b2, "β3 − β2")?,
    ])
}

/// β₁β₂ + β₁β₃ − β₁β₂β₃ − β₂β₃, zero exactly on images of [`case2_beta`].
pub fn case2_constraint(beta: &[Q; 3]) -> Q {
    let [b1, b2, b3] = beta;
    b1 * b2 + b1 * b3 - b1 * b2 * b3 - b2 * b3
}

/// The rational expressions for α₁, α₂ as published; `None` on a zero denominator.
pub fn case2_printed_alpha(beta: &[Q; 3]) -> [Option<Q>; 2] {
    let [b1, b2, b3] = beta;
    let (two, three, four, six) = (q(2), q(3), q(4), q(6));
    let n1 = &two * b1 * b2 * (b2 - b3);
    let d1 = &two * b1 * b3 + &two * b1 * b2 + b2 * b2 * b3 - &six * b1 * b2 * b3 - &two * b1 * b2 * b2
        + &three * b1 * b2 * b2 * b3;
    let n2 = &two * b1 * (b3 - b2);
    let d2 = -&four * b1 - b2 * b3 + &four * b1 * b3 + &four * b1 * b2 - &three * b1 * b2 * b3;
    let f = |n: Q, d: Q| (!d.is_zero()).then(|| n / d);
    [f(n1, d1), f(n2, d2)]
}

/// The compatibility polynomial on (β₁, β₂, β₃) as published.
pub fn case2_printed_constraint(beta: &[Q; 3]) -> Q {
    let [b1, b2, b3] = beta;
    let (two, three, four) = (q(2), q(3), q(4));
    let first = b1 * b3 * b3 + &two * b1 * b2 * b3 + b1 * b2 * b2 + b2 * b2 * b3 * b3
        - &four * b1 * b2 * b3 * b3
        - &four * b1 * b2 * b2 * b3
        + &three * b1 * b2 * b2 * b3 * b3;
    let second = -b3 - b2 + &two * b2 * b3;
    first * second
}

/// Square root of a non-negative rational square.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let (n, d) = (x.numer().sqrt(), x.denom().sqrt());
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Q::new(n, d))
}

#[derive(Debug, Clone, Serialize)]
pub struct Case2Reduction {
    #[serde(serialize_with = "ser_q")]
    pub alpha: [Q; 2],
    #[serde(serialize_with = "ser_q")]
    pub sqrt_alpha: [Q; 2],
    pub chain: Case2Chain,
    /// [`case2_constraint`] at the β's.
    #[serde(serialize_with = "ser_q1")]
    pub constraint: Q,
    /// α recovered by [`case2_inverse`] equals the input.
    pub round_trip: bool,
    #[serde(serialize_with = "ser_qopt")]
    pub printed_alpha: [Option<Q>; 2],
    #[serde(serialize_with = "ser_q1")]
    pub printed_constraint: Q,
}

/// Forward map from the square roots s_i = √α_i, with inverse and constraint checks.
pub fn genus4_case2_from_roots(s1: &Q, s2: &Q) -> Result<Case2Reduction> {
    let chain = case2_chain(s1, s2)?;
    let back = case2_inverse(&chain.beta)?;
    let sqrt_alpha = [s1.clone(), s2.clone()];
    Ok(Case2Reduction {
        alpha: [s1 * s1, s2 * s2],
        round_trip: back == sqrt_alpha,
        constraint: case2_constraint(&chain.beta),
        printed_alpha: case2_printed_alpha(&chain.beta),
        printed_constraint: case2_printed_constraint(&chain.beta),
        sqrt_alpha,
        chain,
    })
}

/// Exact reduction for α₁, α₂ that are squares of rationals; the positive
/// roots are used.
pub fn genus4_case2_reduction(alpha1: &Q, alpha2: &Q) -> Result<Case2Reduction> {
    let root = |a: &Q, name: &str| {
        rational_sqrt(a).ok_or_else(|| Error::domain(format!("{name} = {a} is not a rational square; pass its square root")))
    };
    genus4_case2_from_roots(&root(alpha1, "α1")?, &root(alpha2, "α2")?)
}

/// y³ = (x²−1)(x⁴−αx²+1) as the α₁α₂ = 1 slice of case 2: α = α₁ + α₂.
pub fn case4_alpha(alpha1: &Q, alpha2: &Q) -> Result<Q> {
    if !(alpha1 * alpha2).is_one() {
        return Err(Error::domain(format!("α1·α2 = {} is not 1", alpha1 * alpha2)));
    }
    Ok(alpha1 + alpha2)
}

// Theta-quotient formula for f(P₁)⋯f(P_g)

/// Π_k θ(u − b_k − Δ) / θ(u − c_k − Δ), which equals E·f(P₁)⋯f(P_g) when
/// `u` is the Abel image of P₁ + … + P_g, `zeros`/`poles` are images of the
/// divisor of f and `riemann` is Riemann's constant. The images are supplied
/// by the caller.
pub fn shiga_product(
    tau: &SiegelPoint,
    u: &[C],
    zeros: &[Vec<C>],
    poles: &[Vec<C>],
    riemann: &[C],
    p: &EvalParams,
) -> Result<C> {
    let g = tau.genus();
    if zeros.len() != poles.len() {
        return Err(Error::domain(format!("{} zeros but {} poles", zeros.len(), poles.len())));
    }
    for len in std::iter::once(u.len()).chain(Some(riemann.len())).chain(zeros.iter().chain(poles).map(Vec::len)) {
        if len != g {
            return Err(Error::Dimension { expected: g, got: len });
        }
    }
    let zero = vec![0.0; g];
    let eval = |w: &[C]| -> Result<C> {
        let z: Vec<C> = (0..g).map(|i| u[i] - w[i] - riemann[i]).collect();
        theta_raw(&z, tau, &zero, &zero, p)
    };
    let mut acc = C::new(1.0, 0.0);
    for (b, c) in zeros.iter().zip(poles) {
        let den = eval(c)?;
        if den.norm() < p.target_abs_tol {
            return Err(Error::degenerate("theta in the denominator vanishes"));
        }
        acc *= eval(b)? / den;
    }
    Ok(acc)
}

// Dispatch for yⁿ = f(x)

/// Generic values substituted for symbolic parameters before the structure
/// of f is analysed.
const GENERIC_VALUES: [(i64, i64); 6] = [(97, 13), (211, 29), (389, 41), (557, 53), (719, 67), (907, 83)];

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicCurveSpec {
    pub equation: String,
    pub n: u32,
    /// Coefficients of f, constant term first, with symbols replaced by generic values.
    pub f: Vec<Q>,
    pub symbols: Vec<String>,
    /// Order of the chosen element of G/⟨σ⟩; detected when `None`.
    pub reduced_order: Option<usize>,
}

impl CyclicCurveSpec {
    /// Parses `y^n = f(x)`. Identifiers other than `x` are treated as generic parameters.
    pub fn parse(equation: &str) -> Result<Self> {
        let (lhs, rhs) = equation
            .split_once('=')
            .ok_or_else(|| Error::domain(format!("expected y^n = f(x), got {equation:?}")))?;
        let lhs: String = lhs.chars().filter(|c| !c.is_whitespace()).collect();
        let n: u32 = match lhs.strip_prefix('y') {
            Some("") => 1,
            Some(e) => e
                .strip_prefix('^')
                .and_then(|e| e.parse().ok())
                .ok_or_else(|| Error::domain(format!("left side {lhs:?} is not y^n")))?,
            None => return Err(Error::domain(format!("left side {lhs:?} is not y^n"))),
        };
        let mut symbols: Vec<String> = Vec::new();
        for word in rhs.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')) {
            let starts_alpha = word.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_');
            if starts_alpha && word != "x" && word != "X" && !symbols.iter().any(|s| s == word) {
                symbols.push(word.to_string());
            }
        }
        if symbols.len() > GENERIC_VALUES.len() {
            return Err(Error::Unsupported(format!("more than {} parameters", GENERIC_VALUES.len())));
        }
        let params: BTreeMap<String, Q> = symbols
            .iter()
            .zip(GENERIC_VALUES)
            .map(|(s, (a, b))| (s.clone(), Q::new(a.into(), b.into())))
            .collect();
        let f = parse_univariate(rhs, &params, 64)?;
        Ok(CyclicCurveSpec { equation: equation.trim().to_string(), n, f, symbols, reduced_order: None })
    }

    pub fn with_reduced_order(mut self, m: usize) -> Self {
        self.reduced_order = Some(m);
        self
    }

    pub fn degree(&self) -> usize {
        self.f.len() - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispatchTarget {
    /// y² = f(x): Thomae's formula and its inversions.
    Thomae,
    /// Squarefree f whose branch points split evenly into n sets.
    PartitionThomae,
    /// y³ = quartic: the three sixth-characteristic thetanulls.
    PicardThetanulls,
    /// f with roots of multiplicities 1 and n−1.
    RepeatedRoots,
    /// Theta-quotient formula; needs Abel-map images.
    ThetaQuotient,
}

#[derive(Debug, Clone, Serialize)]
pub struct CyclicPlan {
    pub equation: String,
    pub n: u32,
    pub symbols: Vec<String>,
    pub degree: usize,
    pub genus: usize,
    /// Multiplicity → number of distinct roots of f with it.
    pub root_multiplicities: BTreeMap<usize, usize>,
    pub infinity_branch: bool,
    /// Number of branch points on the line, ∞ included.
    pub branch_points: usize,
    pub reduced_order: usize,
    pub normal_form: &'static str,
    pub quotient: String,
    pub dispatch: DispatchTarget,
    pub operation: &'static str,
    pub status: &'static str,
}

fn derivative(f: &[Q]) -> Vec<Q> {
    if f.len() <= 1 {
        return vec![Q::zero()];
    }
    trim(f.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64)).collect())
}

fn is_zero_poly(f: &[Q]) -> bool {
    f.iter().all(Zero::is_zero)
}

/// Multiplicity → count, from degrees of gcd(f, f′, …, f⁽ʲ⁾).
fn multiplicities(f: &[Q]) -> BTreeMap<usize, usize> {
    let mut degs = vec![f.len() - 1];
    let (mut g, mut d) = (f.to_vec(), f.to_vec());
    while degs.last() != Some(&0) {
        d = derivative(&d);
        g = if is_zero_poly(&d) { vec![Q::one()] } else { trim(poly_gcd(&g, &d)) };
        degs.push(g.len() - 1);
    }
    // at_least[j-1] = number of roots of multiplicity ≥ j
    let at_least: Vec<usize> = degs.windows(2).map(|w| w[0] - w[1]).collect();
    let mut out = BTreeMap::new();
    for j in 0..at_least.len() {
        let c = at_least[j] - at_least.get(j + 1).copied().unwrap_or(0);
        if c > 0 {
            out.insert(j + 1, c);
        }
    }
    out
}

/// Normal form tag when f(x) = g(xᵐ) or f(x) = x·g(xᵐ).
fn normal_form(f: &[Q], m: usize) -> Option<&'static str> {
    let support: Vec<usize> = (0..f.len()).filter(|&i| !f[i].is_zero()).collect();
    if support.iter().all(|i| i % m == 0) {
        Some("y^n = f(x^m)")
    } else if support.iter().all(|i| i % m == 1 % m) {
        Some("y^n = x f(x^m)")
    } else {
        None
    }
}

/// Steps 1 to 3 of the theta-relation algorithm: reduced group data, normal
/// form and which inversion formula applies. Relations among thetas are not
/// derived.
pub fn algorithm1_scaffold(spec: &CyclicCurveSpec) -> Result<CyclicPlan> {
    let n = spec.n as usize;
    if n < 2 {
        return Err(Error::Unsupported(format!("y^{n} is not a cyclic cover")));
    }
    let k = spec.degree();
    if k == 0 {
        return Err(Error::Unsupported("f is constant".into()));
    }
    let mults = multiplicities(&spec.f);
    let common = mults.keys().fold(n.gcd(&k), |acc, m| acc.gcd(m));
    if common > 1 {
        return Err(Error::Unsupported(format!("y^{n} = f(x) is reducible (common factor {common})")));
    }
    let infinity_branch = !k.is_multiple_of(n);
    let branch_points = mults.values().sum::<usize>() + usize::from(infinity_branch);
    let ramification: usize = mults.iter().map(|(m, c)| c * (n - n.gcd(m))).sum::<usize>() + (n - n.gcd(&k));
    // Riemann-Hurwitz: 2g − 2 = −2n + Σ (n − gcd(n, e_P)).
    let genus = (ramification + 2).saturating_sub(2 * n) / 2;

    let (reduced_order, normal) = match spec.reduced_order {
        Some(0) => return Err(Error::Unsupported("reduced order 0".into())),
        Some(m) => match normal_form(&spec.f, m) {
            Some(tag) => (m, tag),
            None => return Err(Error::Unsupported(format!("f is not of the form g(x^{m}) or x·g(x^{m})"))),
        },
        None => (1..=k).rev().find_map(|m| normal_form(&spec.f, m).map(|t| (m, t))).expect("m = 1 always applies"),
    };

    let squarefree = mults.keys().all(|&m| m == 1);
    let (dispatch, operation, status) = if n == 2 {
        if !squarefree {
            return Err(Error::Unsupported("singular hyperelliptic model".into()));
        }
        match genus {
            2 => (DispatchTarget::Thomae, "thomae::picard_branch_points", "evaluable"),
            3 => (DispatchTarget::Thomae, "thomae::genus3_branch_points", "evaluable"),
            _ => return Err(Error::Unsupported(format!("hyperelliptic genus {genus}"))),
        }
    } else if squarefree {
        if n == 3 && k == 4 {
            (DispatchTarget::PicardThetanulls, "cyclic::picard_params", "evaluable from a supplied period matrix")
        } else if branch_points % n == 0 && branch_points / n >= 2 {
            if n == 3 && branch_points == 6 {
                (DispatchTarget::PartitionThomae, "cyclic::genus4_trigonal_ratios", "ratios known up to constants")
            } else {
                (DispatchTarget::PartitionThomae, "none", "partition constants not fixed")
            }
        } else {
            (DispatchTarget::ThetaQuotient, "cyclic::shiga_product", "integrals not evaluated")
        }
    } else {
        let simple = mults.get(&1).copied().unwrap_or(0);
        let heavy = mults.get(&(n - 1)).copied().unwrap_or(0);
        if mults.keys().all(|&m| m == 1 || m == n - 1) && simple == heavy + 1 {
            (DispatchTarget::RepeatedRoots, "none", "closed form needs the determinants det A_i")
        } else {
            return Err(Error::Unsupported(format!("root multiplicities {mults:?} for n = {n}")));
        }
    };

    Ok(CyclicPlan {
        equation: spec.equation.clone(),
        n: spec.n,
        symbols: spec.symbols.clone(),
        degree: k,
        genus,
        root_multiplicities: mults,
        infinity_branch,
        branch_points,
        reduced_order,
        normal_form: normal,
        quotient: format!("G/<sigma> with an element of order {reduced_order}"),
        dispatch,
        operation,
        status,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theta::{quasi_periodicity_residual, random_siegel_point};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn qq(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn sixth_characteristics_quasi_periodic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let p = EvalParams::default();
        for _ in 0..5 {
            let tau = random_siegel_point(3, &mut rng);
            let z: Vec<C> = (0..3).map(|_| c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5))).collect();
            let m: Vec<i64> = (0..3).map(|_| rng.random_range(-1..=1)).collect();
            let n: Vec<i64> = (0..3).map(|_| rng.random_range(-1..=1)).collect();
            for ch in sixth_characteristics() {
                assert!(quasi_periodicity_residual(&z, &tau, &ch, &m, &n, &p).unwrap() < 1e-9);
            }
        }
    }

    #[test]
    fn picard_params_are_cube_ratios() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let p = EvalParams::default();
        for _ in 0..10 {
            let tau = random_siegel_point(3, &mut rng);
            let pp = picard_params(&tau, &p).unwrap();
            let [l1, l2, l3] = pp.triple.cubes();
            assert!((pp.s - l2 / l1).norm() < 1e-12 && (pp.t - l3 / l1).norm() < 1e-12);
            assert!(pp.s.is_finite() && pp.t.is_finite());
            assert!((pp.s - pp.t).norm() > 1e-8);
        }
    }

    #[test]
    fn picard_rejects_vanishing_t1() {
        let tr = SixthThetaTriple::new(C::zero(), c(1.0, 0.0), c(2.0, 0.0));
        assert!(matches!(picard_params_from(&tr, 1e-10), Err(Error::Degenerate(_))));
    }

    #[test]
    fn c6_residual_examples() {
        let one = c(1.0, 0.0);
        assert_eq!(c6_residual(&SixthThetaTriple::new(one, one, C::zero())), C::zero());
        let h = c(0.5f64.cbrt(), 0.0);
        assert!(c6_residual(&SixthThetaTriple::new(one, h, h)).norm() < 1e-15);
        assert!(c6_residual(&SixthThetaTriple::new(one, c(0.3, 0.2), c(-0.7, 0.1))).norm() > 1e-3);
    }

    #[test]
    fn partition_table_is_all_matchings() {
        let all = perfect_matchings(6);
        assert_eq!(all.len(), 15);
        for (i, m) in all.iter().enumerate() {
            let as_u8: Matching = std::array::from_fn(|k| [m[k][0] as u8, m[k][1] as u8]);
            assert_eq!(PARTITIONS[i], as_u8);
        }
        assert_eq!(partition_of(1).unwrap(), [[1, 2], [3, 4], [5, 6]]);
        assert_eq!(label_of(&[[6, 5], [2, 1], [4, 3]]), Some(1));
        assert_eq!(label_of(&[[1, 5], [2, 6], [3, 4]]), Some(12));
        assert!(partition_of(16).is_err());
    }

    #[test]
    fn cubed_factors_follow_the_matching() {
        // Points 1..6 are a1, a2, a3, 1, 0, ∞; a pair of finite points is cubed.
        let factor = |i: u8, j: u8| -> Option<usize> {
            match (i.min(j), i.max(j)) {
                (_, 6) | (4, 5) => None,
                (1, 2) => Some(0),
                (1, 3) => Some(1),
                (2, 3) => Some(2),
                (a, 5) => Some(2 + a as usize),
                (a, 4) => Some(5 + a as usize),
                _ => unreachable!(),
            }
        };
        for (i, m) in PARTITIONS.iter().enumerate() {
            let mut got: Vec<usize> = m.iter().filter_map(|&[a, b]| factor(a, b)).collect();
            got.sort();
            assert_eq!(got, GENUS4_CUBED[i].to_vec(), "theta {}", i + 1);
        }
    }

    #[test]
    fn ratio_formulas_match_relations() {
        let a = [c(2.0, 0.0), c(3.0, 0.0), c(5.0, 0.0)];
        let m = genus4_monomials(&a);
        for (i, &(num, den)) in RATIO_LABELS.iter().enumerate() {
            let r = m[num - 1] / m[den - 1];
            assert!((r - a[i] * a[i]).norm() < 1e-9 * r.norm());
        }
        let one = c(1.0, 0.0);
        let thetas: BTreeMap<usize, C> = (1..=15).map(|l| (l, one * l as f64)).collect();
        let r = genus4_trigonal_ratios(&thetas, 1e-12).unwrap();
        assert!((r.ratios[0] * (13.0f64 / 10.0).powi(6) - one).norm() < 1e-12);
        let mut bad = thetas.clone();
        bad.insert(13, C::zero());
        assert!(genus4_trigonal_ratios(&bad, 1e-12).is_err());
    }

    #[test]
    fn constant_fit_on_synthetic_thetas() {
        let a = [c(2.0, 0.0), c(3.0, 0.0), c(5.0, 0.0)];
        let consts: [C; 15] = std::array::from_fn(|i| c(1.0 + i as f64 * 0.1, 0.3));
        let mono = genus4_monomials(&a);
        let thetas: [C; 15] = std::array::from_fn(|i| (consts[i] * mono[i]).powf(1.0 / 6.0));
        let fit = fit_genus4_constants(&thetas, &a, 1e-12).unwrap();
        for (x, y) in fit.constants.iter().zip(&consts) {
            assert!((x - y).norm() < 1e-9 * y.norm());
        }
        assert!(fit.ratio_residuals.iter().all(|&r| r < 1e-9));
        assert!(genus4_residuals(&thetas, &a, &consts).iter().all(|&r| r < 1e-9));
        assert!(fit_genus4_constants(&thetas, &[a[0], a[0], a[2]], 1e-12).is_err());
    }

    #[test]
    fn case2_chain_matches_closed_form() {
        let (s1, s2) = (qq(3, 1), qq(5, 2));
        let chain = case2_chain(&s1, &s2).unwrap();
        assert_eq!(chain.beta, case2_beta(&s1, &s2).unwrap());
        assert!(case2_constraint(&chain.beta).is_zero());
        assert_eq!(case2_inverse(&chain.beta).unwrap(), [s1.clone(), s2]);
        // The published β₁ in terms of α₁.
        let a1 = &s1 * &s1;
        assert_eq!(chain.beta[0], &a1 / (&a1 - q(2) - q(2) * (&s1 - q(1))));
    }

    #[test]
    fn published_inverse_disagrees_with_chain() {
        let chain = case2_chain(&q(3), &qq(5, 2)).unwrap();
        let [a1, a2] = case2_printed_alpha(&chain.beta);
        assert_eq!((a1.unwrap(), a2.unwrap()), (qq(36, 17), qq(180, 97)));
        assert!(!case2_printed_constraint(&chain.beta).is_zero());
    }

    #[test]
    fn case2_domain_errors_name_the_factor() {
        let err = case2_chain(&qq(1, 2), &q(3)).unwrap_err();
        assert!(err.to_string().contains("2√α1 − 1"), "{err}");
        assert!(genus4_case2_reduction(&q(2), &q(9)).is_err());
        let r = genus4_case2_reduction(&q(9), &qq(25, 4)).unwrap();
        assert!(r.round_trip && r.constraint.is_zero());
    }

    #[test]
    fn case4_slice() {
        assert_eq!(case4_alpha(&q(4), &qq(1, 4)).unwrap(), qq(17, 4));
        assert!(case4_alpha(&q(2), &q(3)).is_err());
        // √α = 1/2 is sent to ∞ by the first coordinate change.
        assert!(genus4_case2_reduction(&q(4), &qq(1, 4)).is_err());
        let r = genus4_case2_reduction(&qq(9, 4), &qq(4, 9)).unwrap();
        assert!(r.round_trip);
        assert_eq!(case4_alpha(&r.alpha[0], &r.alpha[1]).unwrap(), qq(97, 36));
    }

    #[test]
    fn shiga_product_trivial_divisor() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let tau = random_siegel_point(2, &mut rng);
        let u = vec![c(0.1, 0.05), c(-0.2, 0.1)];
        let w = vec![vec![c(0.3, 0.0), c(0.1, 0.2)]];
        let delta = vec![c(0.5, 0.0), c(0.0, 0.0)];
        let v = shiga_product(&tau, &u, &w, &w, &delta, &EvalParams::default()).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-12);
        assert!(shiga_product(&tau, &u, &w, &[], &delta, &EvalParams::default()).is_err());
    }

    fn plan(eq: &str) -> Result<CyclicPlan> {
        algorithm1_scaffold(&CyclicCurveSpec::parse(eq)?)
    }

    #[test]
    fn dispatch_examples() {
        let p = plan("y^2 = x(x-1)(x-2)(x-3)(x-5)").unwrap();
        assert_eq!((p.dispatch, p.genus, p.operation), (DispatchTarget::Thomae, 2, "thomae::picard_branch_points"));

        let p = plan("y^3=x(x-1)(x-s)(x-t)").unwrap();
        assert_eq!(p.dispatch, DispatchTarget::PicardThetanulls);
        assert_eq!((p.genus, p.branch_points, p.operation), (3, 5, "cyclic::picard_params"));
        assert_eq!(p.symbols, ["s", "t"]);

        let p = plan("y^4 = x(x-1)(x-t)").unwrap();
        assert_eq!((p.dispatch, p.genus, p.status), (DispatchTarget::ThetaQuotient, 3, "integrals not evaluated"));

        let p = plan("y^3 = x(x-1)(x-a1)(x-a2)(x-a3)").unwrap();
        assert_eq!((p.dispatch, p.genus, p.operation), (DispatchTarget::PartitionThomae, 4, "cyclic::genus4_trigonal_ratios"));

        let p = plan("y^3 = (x^2-1)(x^4 - a x^2 + 1)").unwrap();
        assert_eq!((p.reduced_order, p.normal_form, p.genus), (2, "y^n = f(x^m)", 4));

        let p = plan("y^2 = x(x^4-1)").unwrap();
        assert_eq!((p.reduced_order, p.normal_form), (4, "y^n = x f(x^m)"));

        let p = plan("y^3 = (x-1)(x-2)^2(x-3)").unwrap();
        assert_eq!(p.dispatch, DispatchTarget::RepeatedRoots);
        assert_eq!(p.root_multiplicities, BTreeMap::from([(1, 2), (2, 1)]));
    }

    #[test]
    fn dispatch_rejections() {
        assert!(matches!(plan("y^2 = (x-1)^2 (x-2)(x-3)(x-4)"), Err(Error::Unsupported(_))));
        assert!(matches!(plan("y^3 = (x-1)^3"), Err(Error::Unsupported(_))));
        assert!(matches!(plan("y = x^2"), Err(Error::Unsupported(_))));
        assert!(matches!(plan("y^2 = x^3 - x"), Err(Error::Unsupported(_))));
        let spec = CyclicCurveSpec::parse("y^3=x(x-1)(x-s)(x-t)").unwrap().with_reduced_order(2);
        assert!(matches!(algorithm1_scaffold(&spec), Err(Error::Unsupported(_))));
        assert!(CyclicCurveSpec::parse("x^2 = y").is_err());
    }

    proptest! {
        #[test]
        fn picard_homogeneity(re in -2.0f64..2.0, im in -2.0f64..2.0, seed in 0u64..1000) {
            prop_assume!(re.hypot(im) > 0.05);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut draw = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let tr = SixthThetaTriple::new(draw() + c(1.5, 0.0), draw(), draw());
            let a = picard_params_from(&tr, 1e-12).unwrap();
            let b = picard_params_from(&tr.scaled(c(re, im)), 1e-12).unwrap();
            prop_assert!((a.s - b.s).norm() < 1e-10 * (1.0 + a.s.norm()));
            prop_assert!((a.t - b.t).norm() < 1e-10 * (1.0 + a.t.norm()));
        }

        #[test]
        fn case2_round_trip(n1 in -40i64..40, d1 in 1i64..12, n2 in -40i64..40, d2 in 1i64..12) {
            let (s1, s2) = (qq(n1, d1), qq(n2, d2));
            // distinct nonzero roots ±1, ±s1, ±s2
            prop_assume!(!s1.is_zero() && !s2.is_zero() && s1.abs() != s2.abs());
            prop_assume!(!s1.abs().is_one() && !s2.abs().is_one());
            if let Ok(chain) = case2_chain(&s1, &s2) {
                prop_assert!(case2_constraint(&chain.beta).is_zero());
                prop_assert_eq!(case2_inverse(&chain.beta).unwrap(), [s1.clone(), s2.clone()]);
                prop_assert_eq!(&chain.beta, &case2_beta(&s1, &s2).unwrap());
            }
        }
    }
}
