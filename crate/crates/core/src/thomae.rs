//! Thomae's formula in both directions.
//!
//! Forward: θ[η_T]⁴ = A · Π_{i<j ∈ T△U} (b_i − b_j) · Π_{i<j ∉ T△U} (b_i − b_j)
//! for even #T with #(T△U) = g+1, products over finite points only. With
//! this homology basis the relation holds with one constant A and no
//! (−1)^{#T∩U} sign; see [`thomae_rhs`].
//!
//! Inverse: genus-2 branch points from Picard's ratios and genus-3 ones from
//! fixed θ²-ratio expressions, with signs chosen by the forward residual.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::charspace::{eta_assignment, thomae_subsets, vanishing_even_set, EtaAssignment, HalfChar};
use crate::error::{Error, Result};
use crate::labels;
use crate::periods::PeriodData;
use crate::theta::{half_thetanulls, theta_raw, EvalParams, SiegelPoint};

#[derive(Debug, Clone, Serialize)]
pub struct ThomaeReport {
    /// Fitted constant A, as [re, im].
    #[serde(serialize_with = "ser_c")]
    pub constant: Complex64,
    /// Relative residual |θ⁴ − A·rhs| / |θ⁴| per nonvanishing even η_T.
    pub residuals: BTreeMap<String, f64>,
    pub max_residual: f64,
    /// Largest |θ| over the even characteristics that must vanish.
    pub max_vanishing: f64,
}

pub(crate) fn ser_c<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

pub(crate) fn ser_cv<S: serde::Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

fn genus_of(n_points: usize) -> Result<usize> {
    if n_points < 3 {
        return Err(Error::domain(format!("{n_points} branch points do not define a curve")));
    }
    Ok((n_points - 1) / 2)
}

/// Right-hand side of Thomae's formula without the constant.
///
/// `points` are the finite branch points in η order: 2g+1 of them when ∞ is a
/// branch point, 2g+2 otherwise (the last then takes η = 0 and is never in U).
pub fn thomae_rhs(t: &[usize], points: &[Complex64]) -> Result<Complex64> {
    let g = genus_of(points.len())?;
    if t.len() % 2 == 1 {
        return Err(Error::domain(format!("#T = {} is odd", t.len())));
    }
    if t.iter().any(|&k| k == 0 || k > 2 * g + 1) {
        return Err(Error::domain(format!("T = {t:?} must lie in 1..={}", 2 * g + 1)));
    }
    let n = points.len();
    let in_tu = |k: usize| t.contains(&k) ^ (k <= 2 * g + 1 && k % 2 == 1);
    let mut prod = Complex64::new(1.0, 0.0);
    for i in 1..=n {
        for j in i + 1..=n {
            if in_tu(i) == in_tu(j) {
                prod *= points[i - 1] - points[j - 1];
            }
        }
    }
    Ok(prod)
}

/// Fits A and measures how well the given thetanulls satisfy Thomae's formula.
/// `theta` maps a characteristic to θ[c](0).
pub fn thomae_fit(points: &[Complex64], theta: &dyn Fn(&HalfChar) -> Complex64) -> Result<ThomaeReport> {
    let g = genus_of(points.len())?;
    let subsets = thomae_subsets(g)?;
    let mut pairs = Vec::with_capacity(subsets.len());
    for (t, c) in &subsets {
        pairs.push((*c, theta(c).powi(4), thomae_rhs(t, points)?));
    }
    let (_, th0, r0) = pairs
        .iter()
        .find(|(_, th, r)| th.norm() > 0.0 && r.norm() > 0.0)
        .ok_or_else(|| Error::degenerate("every Thomae product vanishes"))?;
    let constant = th0 / r0;
    let mut residuals = BTreeMap::new();
    let mut max_residual = 0.0f64;
    for (c, th4, rhs) in &pairs {
        let res = (th4 - constant * rhs).norm() / th4.norm().max(f64::MIN_POSITIVE);
        max_residual = max_residual.max(res);
        residuals.insert(c.digits(), res);
    }
    let max_vanishing = vanishing_even_set(g)?.iter().map(|c| theta(c).norm()).fold(0.0, f64::max);
    Ok(ThomaeReport { constant, residuals, max_residual, max_vanishing })
}

/// Evaluates every even thetanull at the curve's τ and checks Thomae's formula.
pub fn verify_thomae(pd: &PeriodData, p: &EvalParams) -> Result<ThomaeReport> {
    let g = pd.curve.genus();
    if !(2..=3).contains(&g) {
        return Err(Error::Unsupported(format!("Thomae verification implemented for genus 2 and 3, not {g}")));
    }
    let values = even_thetanull_map(&pd.tau, p)?;
    thomae_fit(pd.curve.branch_points(), &|c| values[c])
}

fn even_thetanull_map(tau: &SiegelPoint, p: &EvalParams) -> Result<BTreeMap<HalfChar, Complex64>> {
    let chars = crate::charspace::even_chars(tau.genus());
    let vals = half_thetanulls(tau, &chars, p)?;
    Ok(chars.into_iter().zip(vals).collect())
}

#[derive(Debug, Clone, Serialize)]
pub struct BranchSolution {
    /// Recovered branch points: (λ, μ, ν) for genus 2, a₁..a₅ for genus 3.
    #[serde(serialize_with = "ser_cv")]
    pub values: Vec<Complex64>,
    pub method: String,
    /// Thomae residual of the curve built from `values`.
    pub thomae_residual: f64,
    /// Signs applied to the θ²-ratios; the other candidate is the negation.
    pub signs: Vec<i8>,
    /// Largest relative disagreement between alternative ratio expressions.
    pub ratio_spread: f64,
}

fn labelled(g: usize, tau: &SiegelPoint, p: &EvalParams, n: usize) -> Result<Vec<Complex64>> {
    let chars: Vec<HalfChar> = (1..=n).map(|i| labels::theta_char(g, i)).collect::<Result<_>>()?;
    let mut v = half_thetanulls(tau, &chars, p)?;
    v.insert(0, Complex64::new(f64::NAN, 0.0)); // 1-based
    Ok(v)
}

fn check_denominators(th: &[Complex64], labels: &[usize], p: &EvalParams) -> Result<()> {
    for &l in labels {
        if th[l].norm() < 10.0 * p.target_abs_tol {
            return Err(Error::degenerate(format!("θ{l} = {:.3e} is too small to divide by", th[l].norm())));
        }
    }
    Ok(())
}

/// Chooses signs for `ratios` minimizing the Thomae residual of the curve
/// `build(values)`.
fn best_signs(
    ratios: &[Complex64],
    build: &dyn Fn(&[Complex64]) -> Vec<Complex64>,
    th: &dyn Fn(&HalfChar) -> Complex64,
) -> Result<(Vec<Complex64>, Vec<i8>, f64)> {
    let n = ratios.len();
    let mut best: Option<(Vec<Complex64>, Vec<i8>, f64)> = None;
    for mask in 0u32..1 << n {
        let signs: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        let vals: Vec<Complex64> = ratios.iter().zip(&signs).map(|(r, &s)| r * s as f64).collect();
        let res = match thomae_fit(&build(&vals), th) {
            Ok(r) => r.max_residual,
            Err(_) => continue,
        };
        if best.as_ref().is_none_or(|b| res < b.2) {
            best = Some((vals, signs, res));
        }
    }
    best.ok_or_else(|| Error::degenerate("no sign choice gives distinct branch points"))
}

fn ratio(th: &[Complex64], (a, b, c, d): (usize, usize, usize, usize)) -> Complex64 {
    (th[a] * th[b] / (th[c] * th[d])).powi(2)
}

/// Principal root of the squared ratio; the sign is left to [`best_signs`].
fn unsigned_root(r: Complex64) -> Complex64 {
    r.powi(2).sqrt()
}

fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

/// Genus-2 branch points (λ, μ, ν) from τ, for the curve
/// y² = x(x−1)(x−λ)(x−μ)(x−ν) with points in η order (ν, μ, λ, 1, 0).
pub fn picard_branch_points(tau: &SiegelPoint, p: &EvalParams) -> Result<BranchSolution> {
    if tau.genus() != 2 {
        return Err(Error::domain("Picard inversion needs genus 2"));
    }
    let th = labelled(2, tau, p, 10)?;
    check_denominators(&th, &[2, 4, 10], p)?;
    let ratios = [ratio(&th, (1, 3, 2, 4)), ratio(&th, (3, 8, 4, 10)), ratio(&th, (1, 8, 2, 10))]
        .map(unsigned_root);
    let evens = even_thetanull_map(tau, p)?;
    let build = |v: &[Complex64]| picard_ordering(v[0], v[1], v[2]);
    let (values, signs, res) = best_signs(&ratios, &build, &|c| evens[c])?;
    Ok(BranchSolution { values, method: "picard-g2".into(), thomae_residual: res, signs, ratio_spread: 0.0 })
}

/// (ν, μ, λ, 1, 0): the η order under which Picard's ratios hold.
pub fn picard_ordering(lambda: Complex64, mu: Complex64, nu: Complex64) -> Vec<Complex64> {
    vec![nu, mu, lambda, Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]
}

/// θ-label quadruples (p, q, r, s) with a_i = θp²θq² / (θr²θs²); three
/// alternatives per branch point.
pub const GENUS3_RATIOS: [[(usize, usize, usize, usize); 3]; 5] = [
    [(36, 22, 33, 19), (31, 21, 34, 24), (29, 1, 26, 2)],
    [(4, 29, 2, 17), (36, 7, 15, 19), (31, 13, 9, 24)],
    [(4, 22, 33, 17), (11, 31, 24, 6), (7, 1, 26, 15)],
    [(11, 29, 2, 6), (21, 7, 15, 34), (22, 13, 9, 33)],
    [(4, 21, 34, 17), (11, 36, 19, 6), (13, 1, 26, 9)],
];

/// Which column of [`GENUS3_RATIOS`] is used for each a_i.
pub const GENUS3_PRIMARY: [usize; 5] = [1, 1, 1, 1, 2];

/// (a₁..a₅, 1, 0): the η order the genus-3 ratio table refers to; ∞ last.
pub fn genus3_ordering(a: &[Complex64]) -> Vec<Complex64> {
    let mut v = a.to_vec();
    v.extend([Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
    v
}

pub fn genus3_branch_points(tau: &SiegelPoint, p: &EvalParams) -> Result<BranchSolution> {
    if tau.genus() != 3 {
        return Err(Error::domain("genus-3 inversion needs genus 3"));
    }
    let th = labelled(3, tau, p, labels::GENUS3_EVEN)?;
    let mut ratios = Vec::with_capacity(5);
    let mut spread = 0.0f64;
    for (row, &primary) in GENUS3_RATIOS.iter().zip(&GENUS3_PRIMARY) {
        check_denominators(&th, &[row[primary].2, row[primary].3], p)?;
        let vals: Vec<Option<Complex64>> = row
            .iter()
            .map(|&q| {
                let ok = th[q.2].norm() >= 10.0 * p.target_abs_tol && th[q.3].norm() >= 10.0 * p.target_abs_tol;
                ok.then(|| ratio(&th, q))
            })
            .collect();
        let main = vals[primary].expect("checked above");
        for v in vals.iter().flatten() {
            spread = spread.max(rel_diff(main, *v));
        }
        ratios.push(unsigned_root(main));
    }
    let evens = even_thetanull_map(tau, p)?;
    let (values, signs, res) = best_signs(&ratios, &genus3_ordering, &|c| evens[c])?;
    Ok(BranchSolution { values, method: "thm-g3".into(), thomae_residual: res, signs, ratio_spread: spread })
}

/// One factor θ[b](z) of Frobenius' identity, with the characteristic given
/// as unreduced real vectors.
#[derive(Debug, Clone)]
pub struct FrobeniusFactor {
    pub z: Vec<Complex64>,
    pub top: Vec<f64>,
    pub bottom: Vec<f64>,
}

/// Σ_{j ∈ S ∪ ∞} ε_U(j) Π_{i=1}^4 θ[b_i + η(j)](z_i); zero on the
/// hyperelliptic locus when Σ z_i = 0 and Σ b_i = 0.
pub fn frobenius_residual(
    tau: &SiegelPoint,
    factors: &[FrobeniusFactor],
    assignment: &EtaAssignment,
    p: &EvalParams,
) -> Result<Complex64> {
    let g = tau.genus();
    if factors.len() != 4 {
        return Err(Error::domain(format!("Frobenius' identity takes 4 factors, got {}", factors.len())));
    }
    if assignment.genus != g {
        return Err(Error::Dimension { expected: g, got: assignment.genus });
    }
    for f in factors {
        for len in [f.z.len(), f.top.len(), f.bottom.len()] {
            if len != g {
                return Err(Error::Dimension { expected: g, got: len });
            }
        }
    }
    for i in 0..g {
        let zs: Complex64 = factors.iter().map(|f| f.z[i]).sum();
        let ts: f64 = factors.iter().map(|f| f.top[i]).sum();
        let bs: f64 = factors.iter().map(|f| f.bottom[i]).sum();
        if zs.norm() > 1e-12 || ts.abs() > 1e-12 || bs.abs() > 1e-12 {
            return Err(Error::domain("Frobenius' identity needs Σz_i = 0 and Σb_i = 0"));
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for j in 1..=assignment.infinity_index() {
        let (et, eb) = assignment.eta(j)?.as_halves();
        let mut prod = Complex64::new(1.0, 0.0);
        for f in factors {
            let a: Vec<f64> = f.top.iter().zip(&et).map(|(x, y)| x + y).collect();
            let b: Vec<f64> = f.bottom.iter().zip(&eb).map(|(x, y)| x + y).collect();
            prod *= theta_raw(&f.z, tau, &a, &b, p)?;
        }
        total += prod * assignment.epsilon_u(j) as f64;
    }
    Ok(total)
}

/// Frobenius residual with the standard η assignment for τ's genus.
pub fn frobenius_residual_default(tau: &SiegelPoint, factors: &[FrobeniusFactor], p: &EvalParams) -> Result<Complex64> {
    frobenius_residual(tau, factors, &eta_assignment(tau.genus())?, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::{period_matrix, HyperellipticCurve};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn pd(g: usize, pts: &[Complex64]) -> PeriodData {
        period_matrix(&HyperellipticCurve::new(g, pts.to_vec()).unwrap(), 128).unwrap()
    }

    #[test]
    fn rhs_rejects_odd_t() {
        let pts = picard_ordering(c(2.0), c(3.0), c(5.0));
        assert!(thomae_rhs(&[1], &pts).is_err());
        assert!(thomae_rhs(&[1, 9], &pts).is_err());
    }

    #[test]
    fn rhs_matches_genus2_table() {
        // At (λ, μ, ν) = (2, 3, 5); T = ∅ gives U = {ν, λ, 0} against {μ, 1}.
        let (l, m, n) = (2.0, 3.0, 5.0);
        let pts = picard_ordering(c(l), c(m), c(n));
        let want = (n - l) * n * l * (m - 1.0);
        assert!((thomae_rhs(&[], &pts).unwrap() - c(want)).norm() < 1e-12);
        // Swapping two points inside T△U leaves the value unchanged.
        let swapped = vec![pts[2], pts[1], pts[0], pts[3], pts[4]];
        assert!((thomae_rhs(&[], &swapped).unwrap().norm() - want.abs()).abs() < 1e-12);
    }

    #[test]
    fn genus2_thomae_and_picard() {
        let p = EvalParams::default();
        let data = pd(2, &picard_ordering(c(2.0), c(3.0), c(5.0)));
        let rep = verify_thomae(&data, &p).unwrap();
        assert!(rep.max_residual < 1e-6, "{rep:?}");
        assert_eq!(rep.residuals.len(), 10);
        let sol = picard_branch_points(&data.tau, &p).unwrap();
        for (got, want) in sol.values.iter().zip([2.0, 3.0, 5.0]) {
            assert!((got - c(want)).norm() < 1e-6 * want, "{sol:?}");
        }
    }

    #[test]
    fn genus3_thomae_and_inversion() {
        let p = EvalParams::default();
        let a: Vec<Complex64> = [2.0, 3.0, 5.0, 7.0, 11.0].map(c).to_vec();
        let data = pd(3, &genus3_ordering(&a));
        let rep = verify_thomae(&data, &p).unwrap();
        assert_eq!(rep.residuals.len(), 35);
        assert!(rep.max_residual < 1e-5, "{rep:?}");
        assert!(rep.max_vanishing < 1e-6);
        let sol = genus3_branch_points(&data.tau, &p).unwrap();
        assert!(sol.ratio_spread < 1e-5);
        for (got, want) in sol.values.iter().zip(&a) {
            assert!((got - want).norm() < 1e-5 * want.norm(), "{sol:?}");
        }
    }

    #[test]
    fn ratio_table_avoids_vanishing_theta() {
        for row in GENUS3_RATIOS {
            for (a, b, c, d) in row {
                assert!(![a, b, c, d].contains(&labels::GENUS3_VANISHING_LABEL));
            }
        }
    }

    #[test]
    fn six_finite_points_satisfy_thomae() {
        let p = EvalParams::default();
        let pts = [2.0, 3.0, 5.0, 1.0, 0.0, -2.0].map(c);
        let rep = verify_thomae(&pd(2, &pts), &p).unwrap();
        assert!(rep.max_residual < 1e-6, "{rep:?}");
    }

    #[test]
    fn frobenius_at_zero() {
        let p = EvalParams::default();
        let data = pd(2, &picard_ordering(c(2.0), c(3.0), c(5.0)));
        let zero = FrobeniusFactor { z: vec![Complex64::new(0.0, 0.0); 2], top: vec![0.0; 2], bottom: vec![0.0; 2] };
        let r = frobenius_residual_default(&data.tau, &vec![zero.clone(); 4], &p).unwrap();
        assert!(r.norm() < 1e-8, "{r}");
        let mut bad = vec![zero; 4];
        bad[0].top[0] = 0.5;
        assert!(frobenius_residual_default(&data.tau, &bad, &p).is_err());
    }
}
