//! Riemann theta functions with rational characteristics.
//!
//! θ[a;b](z, τ) = Σ_{u ∈ Z^g} exp(πi (u+a)ᵀτ(u+a) + 2πi (u+a)ᵀ(z+b)).
//!
//! The lattice sum is truncated to an ellipsoid around the dominant term.
//! The radius comes from the Gaussian tail bound of Deconinck, Heil,
//! Bobenko, van Hoeij and Schmies, so the absolute truncation error is at
//! most `target_abs_tol`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use statrs::function::gamma::gamma_ui;

use crate::charspace::HalfChar;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_RADIUS: usize = 60;
/// Asymmetry above this is rejected outright rather than symmetrized away.
pub const SYMMETRY_REJECT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalParams {
    pub target_abs_tol: f64,
    pub max_radius: usize,
}

impl Default for EvalParams {
    fn default() -> Self {
        EvalParams { target_abs_tol: DEFAULT_TOL, max_radius: DEFAULT_MAX_RADIUS }
    }
}

impl EvalParams {
    pub fn new(target_abs_tol: f64, max_radius: usize) -> Result<Self> {
        if !(target_abs_tol > 0.0) || !target_abs_tol.is_finite() {
            return Err(Error::domain(format!("tolerance {target_abs_tol} must be positive")));
        }
        if max_radius == 0 {
            return Err(Error::domain("max_radius must be positive"));
        }
        Ok(EvalParams { target_abs_tol, max_radius })
    }
}

/// Characteristic with exact rational entries reduced to [0, 1).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RatChar {
    top: Vec<BigRational>,
    bottom: Vec<BigRational>,
}

fn reduce_mod1(q: &BigRational) -> BigRational {
    q - q.floor()
}

impl RatChar {
    pub fn new(top: Vec<BigRational>, bottom: Vec<BigRational>) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::Dimension { expected: top.len(), got: bottom.len() });
        }
        if top.is_empty() {
            return Err(Error::domain("characteristic of genus 0"));
        }
        Ok(RatChar { top: top.iter().map(reduce_mod1).collect(), bottom: bottom.iter().map(reduce_mod1).collect() })
    }

    /// From `(numerator, denominator)` pairs.
    pub fn from_fractions(top: &[(i64, i64)], bottom: &[(i64, i64)]) -> Result<Self> {
        let conv = |v: &[(i64, i64)]| -> Result<Vec<BigRational>> {
            v.iter()
                .map(|&(n, d)| {
                    if d == 0 {
                        Err(Error::domain("zero denominator in characteristic"))
                    } else {
                        Ok(BigRational::new(n.into(), d.into()))
                    }
                })
                .collect()
        };
        Self::new(conv(top)?, conv(bottom)?)
    }

    pub fn zero(g: usize) -> Self {
        RatChar { top: vec![BigRational::zero(); g], bottom: vec![BigRational::zero(); g] }
    }

    pub fn genus(&self) -> usize {
        self.top.len()
    }

    pub fn top(&self) -> &[BigRational] {
        &self.top
    }

    pub fn bottom(&self) -> &[BigRational] {
        &self.bottom
    }

    pub fn top_f64(&self) -> Vec<f64> {
        self.top.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn bottom_f64(&self) -> Vec<f64> {
        self.bottom.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Back to a half-integer characteristic when every entry is 0 or ½.
    pub fn to_half(&self) -> Option<HalfChar> {
        let half = BigRational::new(1.into(), 2.into());
        let bits = |v: &[BigRational]| -> Option<Vec<u8>> {
            v.iter()
                .map(|q| {
                    if q.is_zero() {
                        Some(0)
                    } else if *q == half {
                        Some(1)
                    } else {
                        None
                    }
                })
                .collect()
        };
        HalfChar::from_rows(&bits(&self.top)?, &bits(&self.bottom)?).ok()
    }
}

impl From<HalfChar> for RatChar {
    fn from(c: HalfChar) -> Self {
        let half = |row: Vec<u8>| row.into_iter().map(|b| BigRational::new(b.into(), 2.into())).collect();
        RatChar { top: half(c.top_row()), bottom: half(c.bottom_row()) }
    }
}

impl From<&HalfChar> for RatChar {
    fn from(c: &HalfChar) -> Self {
        RatChar::from(*c)
    }
}

#[derive(Serialize, Deserialize)]
struct RatCharJson {
    g: usize,
    top_num: Vec<i64>,
    top_den: Vec<i64>,
    bottom_num: Vec<i64>,
    bottom_den: Vec<i64>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyCharJson {
    Rational(RatCharJson),
    Half(HalfChar),
}

impl Serialize for RatChar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let split = |v: &[BigRational]| -> (Vec<i64>, Vec<i64>) {
            v.iter().map(|q| (q.numer().to_i64().unwrap_or(0), q.denom().to_i64().unwrap_or(1))).unzip()
        };
        let (top_num, top_den) = split(&self.top);
        let (bottom_num, bottom_den) = split(&self.bottom);
        RatCharJson { g: self.genus(), top_num, top_den, bottom_num, bottom_den }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatChar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match AnyCharJson::deserialize(d)? {
            AnyCharJson::Half(h) => Ok(h.into()),
            AnyCharJson::Rational(j) => {
                let g = j.g;
                if [j.top_num.len(), j.top_den.len(), j.bottom_num.len(), j.bottom_den.len()].iter().any(|&l| l != g) {
                    return Err(D::Error::custom(format!("all rows must have length g = {g}")));
                }
                let zip = |n: &[i64], d: &[i64]| n.iter().copied().zip(d.iter().copied()).collect::<Vec<_>>();
                RatChar::from_fractions(&zip(&j.top_num, &j.top_den), &zip(&j.bottom_num, &j.bottom_den))
                    .map_err(D::Error::custom)
            }
        }
    }
}

/// Lowest common denominator of all entries.
pub fn common_denominator(ch: &RatChar) -> BigInt {
    ch.top.iter().chain(ch.bottom.iter()).fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// A validated point of the Siegel upper half space.
#[derive(Debug, Clone, PartialEq)]
pub struct SiegelPoint {
    tau: DMatrix<Complex64>,
    /// max |τ − τᵀ| of the input before symmetrization.
    pub sym_residual: f64,
    /// Smallest eigenvalue of Im τ.
    pub min_im_eigenvalue: f64,
}

impl SiegelPoint {
    pub fn genus(&self) -> usize {
        self.tau.nrows()
    }

    pub fn tau(&self) -> &DMatrix<Complex64> {
        &self.tau
    }

    pub fn from_re_im(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        let g = re.len();
        if im.len() != g || re.iter().chain(im.iter()).any(|r| r.len() != g) {
            return Err(Error::domain("re and im must both be g×g"));
        }
        validate_siegel(&DMatrix::from_fn(g, g, |i, j| Complex64::new(re[i][j], im[i][j])))
    }

    pub fn diagonal_imag(diag: &[f64]) -> Result<Self> {
        let g = diag.len();
        validate_siegel(&DMatrix::from_fn(g, g, |i, j| if i == j { Complex64::new(0.0, diag[i]) } else { Complex64::zero() }))
    }

    pub fn imag(&self) -> DMatrix<f64> {
        self.tau.map(|c| c.im)
    }

    pub fn real(&self) -> DMatrix<f64> {
        self.tau.map(|c| c.re)
    }
}

#[derive(Serialize, Deserialize)]
struct SiegelJson {
    g: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl Serialize for SiegelPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let g = self.genus();
        let rows = |f: fn(&Complex64) -> f64| (0..g).map(|i| (0..g).map(|j| f(&self.tau[(i, j)])).collect()).collect();
        SiegelJson { g, re: rows(|c| c.re), im: rows(|c| c.im) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SiegelPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SiegelJson::deserialize(d)?;
        if j.re.len() != j.g {
            return Err(serde::de::Error::custom(format!("expected {} rows", j.g)));
        }
        SiegelPoint::from_re_im(&j.re, &j.im).map_err(serde::de::Error::custom)
    }
}

/// Symmetrizes τ and certifies that Im τ is positive definite.
pub fn validate_siegel(tau_raw: &DMatrix<Complex64>) -> Result<SiegelPoint> {
    let g = tau_raw.nrows();
    if g == 0 || tau_raw.ncols() != g {
        return Err(Error::Dimension { expected: g, got: tau_raw.ncols() });
    }
    if tau_raw.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::domain("τ has non-finite entries"));
    }
    let asym = (0..g)
        .flat_map(|i| (0..g).map(move |j| (i, j)))
        .map(|(i, j)| (tau_raw[(i, j)] - tau_raw[(j, i)]).norm())
        .fold(0.0, f64::max);
    if asym > SYMMETRY_REJECT {
        return Err(Error::domain(format!("τ is not symmetric: max |τ - τᵀ| = {asym:.3e}")));
    }
    let tau = (tau_raw + tau_raw.transpose()).map(|c| c * 0.5);
    let im = tau.map(|c| c.im);
    if im.clone().cholesky().is_none() {
        let ev = im.symmetric_eigenvalues().min();
        return Err(Error::domain(format!("Im τ is not positive definite (smallest eigenvalue {ev:.3e})")));
    }
    let min_ev = im.symmetric_eigenvalues().min();
    if min_ev <= 0.0 {
        return Err(Error::domain(format!("Im τ is not positive definite (smallest eigenvalue {min_ev:.3e})")));
    }
    Ok(SiegelPoint { tau, sym_residual: asym, min_im_eigenvalue: min_ev })
}

/// Random τ with Re τ entries in [-½, ½] and Im τ = MMᵀ + shift·I.
pub fn random_siegel_point<R: Rng + ?Sized>(g: usize, rng: &mut R) -> SiegelPoint {
    let m = DMatrix::from_fn(g, g, |_, _| rng.random_range(-0.5..0.5));
    let y = &m * m.transpose() + DMatrix::identity(g, g) * 0.8;
    let x = DMatrix::from_fn(g, g, |_, _| rng.random_range(-0.5..0.5));
    let x = (&x + x.transpose()) * 0.5;
    let tau = DMatrix::from_fn(g, g, |i, j| Complex64::new(x[(i, j)], y[(i, j)]));
    validate_siegel(&tau).expect("constructed point is in the Siegel space")
}

/// Neumaier's compensated summation on each real component.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: &mut (f64, f64), x: f64) {
    let (s, c) = acc;
    let t = *s + x;
    if s.abs() >= x.abs() {
        *c += (*s - t) + x;
    } else {
        *c += (x - t) + *s;
    }
    *s = t;
}

impl CompensatedSum {
    fn add(&mut self, z: Complex64) {
        neumaier(&mut self.re, z.re);
        neumaier(&mut self.im, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// Everything the lattice sum needs from τ, computed once per evaluation.
struct Lattice {
    g: usize,
    /// Upper-triangular T with Im τ = TᵀT.
    t: DMatrix<f64>,
    y_inv: DMatrix<f64>,
    /// Half the square root of the smallest eigenvalue of Im τ.
    r: f64,
}

impl Lattice {
    fn new(tau: &SiegelPoint) -> Result<Self> {
        let g = tau.genus();
        let y = tau.imag();
        let chol = y.clone().cholesky().ok_or_else(|| Error::domain("Im τ lost positive definiteness"))?;
        let t = chol.l().transpose();
        let y_inv = chol.inverse();
        let r = tau.min_im_eigenvalue.sqrt() / 2.0;
        Ok(Lattice { g, t, y_inv, r })
    }

    /// Upper bound on the tail Σ_{‖Tw‖ > R} |term| with the exponential
    /// prefactor removed.
    fn tail_bound(&self, radius: f64) -> f64 {
        let g = self.g;
        let r = self.r;
        let x = PI * (radius - 2.0 * r).powi(2);
        let mut s = 0.0;
        let mut binom = 1.0;
        for k in 0..g {
            let a = (k as f64 + 1.0) / 2.0;
            s += binom * r.powi((g - 1 - k) as i32) * 0.5 * PI.powf(-a) * gamma_ui(a, x);
            binom = binom * (g - 1 - k) as f64 / (k as f64 + 1.0);
        }
        g as f64 / r.powi(g as i32) * s
    }

    /// Smallest radius whose tail bound, times `scale`, is below `tol`.
    fn radius_for(&self, tol: f64, scale: f64) -> f64 {
        let target = tol / scale;
        let lo0 = 2.0 * self.r;
        let mut hi = lo0 + 1.0;
        while self.tail_bound(hi) > target {
            hi = lo0 + 2.0 * (hi - lo0);
            if hi > 1e6 {
                return f64::INFINITY;
            }
        }
        let mut lo = lo0;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.tail_bound(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// θ with real (not necessarily reduced) characteristic vectors `a`, `b`.
///
/// Shifting a characteristic by an integer vector changes θ by a phase, so
/// callers that rely on the unreduced values use this entry point.
pub fn theta_raw(z: &[Complex64], tau: &SiegelPoint, a: &[f64], b: &[f64], p: &EvalParams) -> Result<Complex64> {
    let g = tau.genus();
    for len in [z.len(), a.len(), b.len()] {
        if len != g {
            return Err(Error::Dimension { expected: g, got: len });
        }
    }
    let lat = Lattice::new(tau)?;
    let y = DVector::from_iterator(g, z.iter().map(|c| c.im));
    let c = &lat.y_inv * &y;
    let scale = (PI * y.dot(&c)).exp();
    let radius = lat.radius_for(p.target_abs_tol, scale);

    let box_half = (0..g).map(|i| radius * lat.y_inv[(i, i)].sqrt()).fold(0.0, f64::max);
    if !box_half.is_finite() || box_half > p.max_radius as f64 {
        let required = if box_half.is_finite() { box_half.ceil() as usize } else { usize::MAX };
        return Err(Error::PrecisionUnreachable { required, max_radius: p.max_radius });
    }

    // w = u + a + Y⁻¹y is the lattice point measured from the Gaussian centre.
    let shift: Vec<f64> = (0..g).map(|i| a[i] + c[i]).collect();
    let tau_m = tau.tau();
    let zb: Vec<Complex64> = (0..g).map(|i| z[i] + b[i]).collect();
    let mut sum = CompensatedSum::default();
    let mut u = vec![0i64; g];
    let mut w = vec![0.0f64; g];
    enumerate(&lat.t, &shift, radius * radius, g, 0.0, &mut u, &mut w, &mut |u| {
        let n: Vec<f64> = (0..g).map(|i| u[i] as f64 + a[i]).collect();
        let mut quad = Complex64::zero();
        for i in 0..g {
            let mut row = Complex64::zero();
            for j in 0..g {
                row += tau_m[(i, j)] * n[j];
            }
            quad += row * n[i];
        }
        let lin: Complex64 = (0..g).map(|i| zb[i] * n[i]).sum();
        sum.add((Complex64::i() * PI * (quad + lin * 2.0)).exp());
    });
    Ok(sum.value())
}

/// Fincke–Pohst style enumeration of u ∈ Z^g with ‖T(u + shift)‖² ≤ r2,
/// last coordinate outermost, each coordinate in increasing order.
#[allow(clippy::too_many_arguments)]
fn enumerate(
    t: &DMatrix<f64>,
    shift: &[f64],
    r2: f64,
    level: usize,
    partial: f64,
    u: &mut [i64],
    w: &mut [f64],
    visit: &mut dyn FnMut(&[i64]),
) {
    if level == 0 {
        visit(u);
        return;
    }
    let i = level - 1;
    let g = shift.len();
    let rem = r2 - partial;
    if rem < 0.0 {
        return;
    }
    let tail: f64 = (i + 1..g).map(|j| t[(i, j)] * w[j]).sum();
    let tii = t[(i, i)];
    let half_width = rem.sqrt() / tii;
    let centre = -tail / tii - shift[i];
    let lo = (centre - half_width).ceil() as i64;
    let hi = (centre + half_width).floor() as i64;
    for k in lo..=hi {
        u[i] = k;
        w[i] = k as f64 + shift[i];
        let row = tii * w[i] + tail;
        enumerate(t, shift, r2, i, partial + row * row, u, w, visit);
    }
}

pub fn theta(z: &[Complex64], tau: &SiegelPoint, ch: &RatChar, p: &EvalParams) -> Result<Complex64> {
    if ch.genus() != tau.genus() {
        return Err(Error::Dimension { expected: tau.genus(), got: ch.genus() });
    }
    theta_raw(z, tau, &ch.top_f64(), &ch.bottom_f64(), p)
}

pub fn thetanull(tau: &SiegelPoint, ch: &RatChar, p: &EvalParams) -> Result<Complex64> {
    theta(&vec![Complex64::zero(); tau.genus()], tau, ch, p)
}

pub fn thetanulls(tau: &SiegelPoint, chars: &[RatChar], p: &EvalParams) -> Result<Vec<Complex64>> {
    crate::parallel::map(chars, |c| thetanull(tau, c, p)).into_iter().collect()
}

pub fn half_thetanulls(tau: &SiegelPoint, chars: &[HalfChar], p: &EvalParams) -> Result<Vec<Complex64>> {
    let rc: Vec<RatChar> = chars.iter().map(RatChar::from).collect();
    thetanulls(tau, &rc, p)
}

fn scaled_gap(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1.0)
}

/// Worst of the three quasi-periodicity identities:
/// θ[a+m; b+n](z) = e^{2πi aᵀn} θ[a;b](z),
/// θ[a;b](z+n) = e^{2πi aᵀn} θ[a;b](z),
/// θ[a;b](z+τm) = e^{πi(−2bᵀm − mᵀτm − 2mᵀz)} θ[a;b](z).
///
/// Differences are divided by max(1, |LHS|, |RHS|).
pub fn quasi_periodicity_residual(
    z: &[Complex64],
    tau: &SiegelPoint,
    ch: &RatChar,
    m: &[i64],
    n: &[i64],
    p: &EvalParams,
) -> Result<f64> {
    let g = tau.genus();
    for len in [m.len(), n.len(), z.len(), ch.genus()] {
        if len != g {
            return Err(Error::Dimension { expected: g, got: len });
        }
    }
    if m.iter().chain(n.iter()).all(|&v| v == 0) {
        return Ok(0.0);
    }
    let a = ch.top_f64();
    let b = ch.bottom_f64();
    let base = theta_raw(z, tau, &a, &b, p)?;
    let an: f64 = (0..g).map(|i| a[i] * n[i] as f64).sum();
    let phase_an = Complex64::from_polar(1.0, 2.0 * PI * an);

    let a_shift: Vec<f64> = (0..g).map(|i| a[i] + m[i] as f64).collect();
    let b_shift: Vec<f64> = (0..g).map(|i| b[i] + n[i] as f64).collect();
    let r1 = scaled_gap(theta_raw(z, tau, &a_shift, &b_shift, p)?, phase_an * base);

    let z_n: Vec<Complex64> = (0..g).map(|i| z[i] + n[i] as f64).collect();
    let r2 = scaled_gap(theta_raw(&z_n, tau, &a, &b, p)?, phase_an * base);

    let t = tau.tau();
    let tm: Vec<Complex64> = (0..g).map(|i| (0..g).map(|j| t[(i, j)] * m[j] as f64).sum()).collect();
    let z_tm: Vec<Complex64> = (0..g).map(|i| z[i] + tm[i]).collect();
    let bm: f64 = (0..g).map(|i| b[i] * m[i] as f64).sum();
    let mtm: Complex64 = (0..g).map(|i| tm[i] * m[i] as f64).sum();
    let mz: Complex64 = (0..g).map(|i| z[i] * m[i] as f64).sum();
    let phase = (Complex64::i() * PI * (-2.0 * bm - mtm - mz * 2.0)).exp();
    let r3 = scaled_gap(theta_raw(&z_tm, tau, &a, &b, p)?, phase * base);

    Ok(r1.max(r2).max(r3))
}

/// |θ[γ](−z) − e_*(γ) θ[γ](z)|, scaled as in [`quasi_periodicity_residual`].
pub fn parity_residual(z: &[Complex64], tau: &SiegelPoint, ch: &HalfChar, p: &EvalParams) -> Result<f64> {
    let rc = RatChar::from(ch);
    let neg: Vec<Complex64> = z.iter().map(|c| -c).collect();
    let lhs = theta(&neg, tau, &rc, p)?;
    let rhs = theta(z, tau, &rc, p)? * ch.sign() as f64;
    Ok(scaled_gap(lhs, rhs))
}

/// θ₃(0, i) = π^{1/4} / Γ(3/4).
pub fn theta3_at_i() -> f64 {
    PI.powf(0.25) / statrs::function::gamma::gamma(0.75)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charspace::{all_chars, odd_chars};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p() -> EvalParams {
        EvalParams::default()
    }

    fn zero(g: usize) -> Vec<Complex64> {
        vec![Complex64::zero(); g]
    }

    /// Plain box summation, used as an independent oracle.
    fn brute(z: &[Complex64], tau: &SiegelPoint, a: &[f64], b: &[f64], n: i64) -> Complex64 {
        let g = tau.genus();
        let mut total = Complex64::zero();
        let count = (2 * n + 1).pow(g as u32);
        for idx in 0..count {
            let mut k = idx;
            let u: Vec<f64> = (0..g)
                .map(|_| {
                    let v = (k % (2 * n + 1)) - n;
                    k /= 2 * n + 1;
                    v as f64
                })
                .collect();
            let nv: Vec<f64> = (0..g).map(|i| u[i] + a[i]).collect();
            let mut e = Complex64::zero();
            for i in 0..g {
                for j in 0..g {
                    e += tau.tau()[(i, j)] * nv[i] * nv[j];
                }
                e += (z[i] + b[i]) * nv[i] * 2.0;
            }
            total += (Complex64::i() * PI * e).exp();
        }
        total
    }

    #[test]
    fn closed_form_at_identity() {
        let expected = theta3_at_i();
        assert_abs_diff_eq!(expected, 1.086_434_811_213_308, epsilon = 1e-12);
        for g in 1..=3 {
            let tau = SiegelPoint::diagonal_imag(&vec![1.0; g]).unwrap();
            let v = thetanull(&tau, &RatChar::zero(g), &p()).unwrap();
            assert_abs_diff_eq!(v.re, expected.powi(g as i32), epsilon = 1e-10);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn odd_thetanulls_vanish() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tau = random_siegel_point(2, &mut rng);
        for c in odd_chars(2) {
            assert!(thetanull(&tau, &c.into(), &p()).unwrap().norm() < 1e-11);
        }
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for g in 1..=3 {
            let tau = random_siegel_point(g, &mut rng);
            let z: Vec<Complex64> = (0..g).map(|_| Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.3..0.3))).collect();
            let a: Vec<f64> = (0..g).map(|_| rng.random_range(0.0..1.0)).collect();
            let b: Vec<f64> = (0..g).map(|_| rng.random_range(0.0..1.0)).collect();
            let fast = theta_raw(&z, &tau, &a, &b, &p()).unwrap();
            let slow = brute(&z, &tau, &a, &b, if g == 3 { 7 } else { 12 });
            assert!((fast - slow).norm() < 1e-11, "g={g} {fast} vs {slow}");
        }
    }

    #[test]
    fn diagonal_tau_factorizes() {
        let tau2 = SiegelPoint::diagonal_imag(&[0.9, 1.7]).unwrap();
        let ch = RatChar::from_fractions(&[(1, 6), (1, 2)], &[(1, 3), (0, 1)]).unwrap();
        let z = [Complex64::new(0.1, 0.05), Complex64::new(-0.2, 0.1)];
        let full = theta(&z, &tau2, &ch, &p()).unwrap();
        let t1 = SiegelPoint::diagonal_imag(&[0.9]).unwrap();
        let t2 = SiegelPoint::diagonal_imag(&[1.7]).unwrap();
        let f1 = theta_raw(&z[..1], &t1, &[1.0 / 6.0], &[1.0 / 3.0], &p()).unwrap();
        let f2 = theta_raw(&z[1..], &t2, &[0.5], &[0.0], &p()).unwrap();
        assert!((full - f1 * f2).norm() < 1e-10);
    }

    #[test]
    fn doubling_radius_certificate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let tau = random_siegel_point(3, &mut rng);
        let ch: RatChar = all_chars(3)[9].into();
        let a = thetanull(&tau, &ch, &p()).unwrap();
        let tight = EvalParams::new(1e-15, 60).unwrap();
        let b = thetanull(&tau, &ch, &tight).unwrap();
        assert!((a - b).norm() < p().target_abs_tol);
    }

    #[test]
    fn precision_unreachable_reports_radius() {
        let tau = SiegelPoint::diagonal_imag(&[1e-4, 1.0]).unwrap();
        let err = thetanull(&tau, &RatChar::zero(2), &EvalParams::new(1e-12, 20).unwrap()).unwrap_err();
        match err {
            Error::PrecisionUnreachable { required, max_radius } => {
                assert!(required > 20);
                assert_eq!(max_radius, 20);
            }
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn validation_rejects_bad_tau() {
        let bad = DMatrix::from_row_slice(1, 1, &[Complex64::new(0.0, -1.0)]);
        assert!(validate_siegel(&bad).is_err());
        let asym = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 1.0),
            Complex64::new(0.1, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 1.0),
        ]);
        assert!(validate_siegel(&asym).is_err());
        let sq = DMatrix::from_element(2, 3, Complex64::new(0.0, 1.0));
        assert!(validate_siegel(&sq).is_err());
    }

    #[test]
    fn batch_matches_single_calls() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let tau = random_siegel_point(2, &mut rng);
        let chars: Vec<RatChar> = all_chars(2).into_iter().map(RatChar::from).collect();
        let batch = thetanulls(&tau, &chars, &p()).unwrap();
        for (c, v) in chars.iter().zip(&batch) {
            assert_eq!(*v, thetanull(&tau, c, &p()).unwrap());
        }
    }

    #[test]
    fn ratchar_json_and_reduction() {
        let ch = RatChar::from_fractions(&[(7, 6)], &[(-1, 3)]).unwrap();
        assert_eq!(ch.top()[0], BigRational::new(1.into(), 6.into()));
        assert_eq!(ch.bottom()[0], BigRational::new(2.into(), 3.into()));
        let s = serde_json::to_string(&ch).unwrap();
        assert_eq!(serde_json::from_str::<RatChar>(&s).unwrap(), ch);
        let h: RatChar = serde_json::from_str(r#"{"g":1,"top":[1],"bottom":[0]}"#).unwrap();
        assert_eq!(h.to_half().unwrap(), HalfChar::from_digits("10").unwrap());
    }

    #[test]
    fn siegel_json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let tau = random_siegel_point(2, &mut rng);
        let s = serde_json::to_string(&tau).unwrap();
        let back: SiegelPoint = serde_json::from_str(&s).unwrap();
        assert!((back.tau() - tau.tau()).iter().all(|c| c.norm() < 1e-15));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn quasi_periodicity_holds(seed in 0u64..1000, m0 in -1i64..=1, m1 in -1i64..=1, n0 in -1i64..=1, n1 in -1i64..=1) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tau = random_siegel_point(2, &mut rng);
            let ch = RatChar::from_fractions(&[(rng.random_range(0..6), 6), (1, 2)], &[(1, 3), (rng.random_range(0..6), 6)]).unwrap();
            let z: Vec<Complex64> = (0..2).map(|_| Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.2..0.2))).collect();
            let r = quasi_periodicity_residual(&z, &tau, &ch, &[m0, m1], &[n0, n1], &p()).unwrap();
            prop_assert!(r < 1e-9, "residual {}", r);
        }

        #[test]
        fn parity_identity_holds(seed in 0u64..1000, idx in 0usize..16) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tau = random_siegel_point(2, &mut rng);
            let z: Vec<Complex64> = (0..2).map(|_| Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.2..0.2))).collect();
            let r = parity_residual(&z, &tau, &all_chars(2)[idx], &p()).unwrap();
            prop_assert!(r < 1e-9);
        }
    }

    #[test]
    fn zero_shift_residual_is_exactly_zero() {
        let tau = SiegelPoint::diagonal_imag(&[1.0, 1.0]).unwrap();
        let r = quasi_periodicity_residual(&zero(2), &tau, &RatChar::zero(2), &[0, 0], &[0, 0], &p()).unwrap();
        assert_eq!(r, 0.0);
    }
}
