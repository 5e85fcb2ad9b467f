//! Period matrices of hyperelliptic curves y² = Π (x − b_k).
//!
//! The branch points are joined by an x-monotone polygonal arc (sorted by
//! real part, then imaginary part), so no segment passes near a third
//! branch point. On that arc the chain cycles c_k encircle consecutive
//! points and their periods are twice the segment integrals. Half twists
//! then carry the arc order back to the input order, and the A- and
//! B-cycles are built from the transformed chain so that cycle A_i
//! encircles (b_{2i-1}, b_{2i}) of the input ordering. This is the homology
//! convention under which the η-map labels satisfy Thomae's formula.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::theta::{validate_siegel, SiegelPoint};

pub const DEFAULT_QUAD_ORDER: usize = 128;
pub const MIN_QUAD_ORDER: usize = 32;
/// Relative separation below which branch points count as coincident.
pub const MIN_SEPARATION: f64 = 1e-10;
pub const SYMMETRY_TOL: f64 = 1e-8;

pub const BASIS_TAG: &str = "x-monotone arc, half twists to input order; \
A_i encircles (b_{2i-1}, b_{2i}), B_i encircles b_{2i}..b_{2g+1}";

#[derive(Debug, Clone, PartialEq)]
pub struct HyperellipticCurve {
    genus: usize,
    branch_points: Vec<Complex64>,
    infinity_branch: bool,
}

impl HyperellipticCurve {
    /// With `2g+1` points ∞ is a branch point; with `2g+2` it is not.
    pub fn new(genus: usize, branch_points: Vec<Complex64>) -> Result<Self> {
        if genus == 0 {
            return Err(Error::domain("genus must be positive"));
        }
        let n = branch_points.len();
        let infinity_branch = if n == 2 * genus + 1 {
            true
        } else if n == 2 * genus + 2 {
            false
        } else {
            return Err(Error::domain(format!(
                "genus {genus} needs {} or {} finite branch points, got {n}",
                2 * genus + 1,
                2 * genus + 2
            )));
        };
        if branch_points.iter().any(|b| !b.re.is_finite() || !b.im.is_finite()) {
            return Err(Error::domain("branch points must be finite"));
        }
        let scale = branch_points.iter().map(|b| b.norm()).fold(1.0, f64::max);
        for i in 0..n {
            for j in i + 1..n {
                let d = (branch_points[i] - branch_points[j]).norm();
                if d <= MIN_SEPARATION * scale {
                    return Err(Error::IllConditioned(format!(
                        "branch points {} and {} are {d:.3e} apart",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(HyperellipticCurve { genus, branch_points, infinity_branch })
    }

    pub fn from_real(genus: usize, pts: &[f64]) -> Result<Self> {
        Self::new(genus, pts.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn branch_points(&self) -> &[Complex64] {
        &self.branch_points
    }

    pub fn infinity_branch(&self) -> bool {
        self.infinity_branch
    }
}

#[derive(Serialize, Deserialize)]
struct CurveJson {
    genus: usize,
    branch_points: Vec<[f64; 2]>,
    #[serde(default)]
    infinity_branch: Option<bool>,
}

impl Serialize for HyperellipticCurve {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CurveJson {
            genus: self.genus,
            branch_points: self.branch_points.iter().map(|b| [b.re, b.im]).collect(),
            infinity_branch: Some(self.infinity_branch),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HyperellipticCurve {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = CurveJson::deserialize(d)?;
        let curve = HyperellipticCurve::new(j.genus, j.branch_points.iter().map(|p| Complex64::new(p[0], p[1])).collect())
            .map_err(D::Error::custom)?;
        if let Some(flag) = j.infinity_branch {
            if flag != curve.infinity_branch {
                return Err(D::Error::custom(format!(
                    "infinity_branch = {flag} contradicts {} finite branch points",
                    curve.branch_points.len()
                )));
            }
        }
        Ok(curve)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodData {
    pub curve: HyperellipticCurve,
    /// Row j, column i: ∫_{A_i} x^j dx / y.
    #[serde(serialize_with = "ser_cmat")]
    pub a_periods: DMatrix<Complex64>,
    #[serde(serialize_with = "ser_cmat")]
    pub b_periods: DMatrix<Complex64>,
    pub tau: SiegelPoint,
    pub basis_tag: String,
    /// max |τ − τᵀ| before symmetrization.
    pub symmetry_residual: f64,
}

fn ser_cmat<S: Serializer>(m: &DMatrix<Complex64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    rows.serialize(s)
}

/// ∫_{p_k}^{p_{k+1}} x^j dx / y along each arc segment, j < g, with one
/// continuous branch of y along the whole arc.
fn segment_integrals(pts: &[Complex64], g: usize, nodes: usize) -> Vec<Vec<Complex64>> {
    let n = pts.len();
    let arg = |z: Complex64| z.arg();
    let mut th: Vec<f64> = (0..n).map(|j| if j == 0 { arg(pts[1] - pts[0]) } else { arg(pts[0] - pts[j]) }).collect();
    let t: Vec<f64> = (1..=nodes).map(|m| ((2 * m - 1) as f64 * PI / (2 * nodes) as f64).cos()).collect();
    let mut out = Vec::with_capacity(n - 1);
    for k in 0..n - 1 {
        let (a0, a1) = (pts[k], pts[k + 1]);
        let d = a1 - a0;
        if k > 0 {
            // Turning at vertex k: the factor (x − b_k) swings from the
            // incoming direction to the outgoing one, clockwise.
            let din = pts[k] - pts[k - 1];
            th[k] -= (arg(-din) - arg(d)).rem_euclid(2.0 * PI);
        }
        let mid = (a0 + a1) * 0.5;
        let mut acc = vec![Complex64::new(0.0, 0.0); g];
        for &tm in &t {
            let x = mid + d * (0.5 * tm);
            let mut logy = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let phase = if j == k || j == k + 1 { th[j] } else { th[j] + ((x - pts[j]) / (a0 - pts[j])).arg() };
                logy += Complex64::new((x - pts[j]).norm().ln(), phase) * 0.5;
            }
            let w = (1.0 - tm * tm).sqrt() * (-logy).exp();
            let mut xp = Complex64::new(1.0, 0.0);
            for a in acc.iter_mut() {
                *a += w * xp;
                xp *= x;
            }
        }
        let scale = d * 0.5 * (PI / nodes as f64);
        out.push(acc.into_iter().map(|v| v * scale).collect());
        for j in 0..n {
            if j != k && j != k + 1 {
                th[j] += ((a1 - pts[j]) / (a0 - pts[j])).arg();
            }
        }
    }
    out
}

fn chain_pairing(x: &[i64], y: &[i64]) -> i64 {
    (0..x.len().saturating_sub(1)).map(|k| x[k] * y[k + 1] - x[k + 1] * y[k]).sum()
}

pub fn period_matrix(curve: &HyperellipticCurve, quad_order: usize) -> Result<PeriodData> {
    if quad_order < MIN_QUAD_ORDER {
        return Err(Error::domain(format!("quad_order {quad_order} is below {MIN_QUAD_ORDER}")));
    }
    let g = curve.genus;
    let b = &curve.branch_points;
    let n = b.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| b[i].re.total_cmp(&b[j].re).then(b[i].im.total_cmp(&b[j].im)));
    let pts: Vec<Complex64> = order.iter().map(|&i| b[i]).collect();
    let seg = segment_integrals(&pts, g, quad_order);

    let m = n - 1;
    let per: Vec<Vec<Complex64>> = seg.iter().map(|row| row.iter().map(|v| v * 2.0).collect()).collect();
    let mut cyc: Vec<Vec<i64>> = (0..m).map(|k| (0..m).map(|j| (j == k) as i64).collect()).collect();

    // Bubble the arc order into the input order; each adjacent swap is a
    // half twist acting on every cycle by c ↦ c + ⟨c, c_k⟩ c_k.
    let mut cur = order.clone();
    for goal in 0..n {
        let mut j = cur.iter().position(|&v| v == goal).expect("permutation");
        while j > goal {
            let k = j - 1;
            let ck = cyc[k].clone();
            for c in cyc.iter_mut() {
                let s = chain_pairing(c, &ck);
                if s != 0 {
                    for (ci, &cki) in c.iter_mut().zip(&ck) {
                        *ci += s * cki;
                    }
                }
            }
            cur.swap(k, k + 1);
            j -= 1;
        }
    }

    let integrate = |c: &[i64]| -> Vec<Complex64> {
        (0..g).map(|p| c.iter().zip(&per).map(|(&ck, row)| row[p] * ck as f64).sum()).collect()
    };
    let mut a_per = DMatrix::<Complex64>::zeros(g, g);
    let mut b_per = DMatrix::<Complex64>::zeros(g, g);
    for i in 0..g {
        let av = integrate(&cyc[2 * i]);
        let mut bv = vec![Complex64::new(0.0, 0.0); g];
        for k in (2 * i + 1..2 * g).step_by(2) {
            for (acc, v) in bv.iter_mut().zip(integrate(&cyc[k])) {
                *acc += v;
            }
        }
        for p in 0..g {
            a_per[(p, i)] = av[p];
            b_per[(p, i)] = bv[p];
        }
    }

    let lu = a_per.clone().lu();
    let mut tau = lu.solve(&b_per).ok_or_else(|| Error::BasisFailure {
        reason: "A-period matrix is singular".into(),
        residual: f64::INFINITY,
    })?;
    let im_sym = DMatrix::from_fn(g, g, |i, j| 0.5 * (tau[(i, j)].im + tau[(j, i)].im));
    if im_sym.symmetric_eigenvalues().min() < 0.0 {
        tau = -tau;
    }
    let asym = (0..g)
        .flat_map(|i| (0..g).map(move |j| (i, j)))
        .map(|(i, j)| (tau[(i, j)] - tau[(j, i)]).norm())
        .fold(0.0, f64::max);
    if !asym.is_finite() || asym > SYMMETRY_TOL {
        return Err(Error::BasisFailure { reason: "τ is not symmetric".into(), residual: asym });
    }
    let tau = validate_siegel(&tau).map_err(|e| Error::BasisFailure { reason: e.to_string(), residual: asym })?;
    Ok(PeriodData {
        curve: curve.clone(),
        a_periods: a_per,
        b_periods: b_per,
        tau,
        basis_tag: BASIS_TAG.into(),
        symmetry_residual: asym,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &SiegelPoint, b: &SiegelPoint) -> f64 {
        (a.tau() - b.tau()).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn curve_validation() {
        assert!(HyperellipticCurve::from_real(2, &[1.0, 2.0, 3.0, 4.0]).is_err());
        assert!(matches!(
            HyperellipticCurve::from_real(2, &[1.0, 2.0, 3.0, 4.0, 4.0]),
            Err(Error::IllConditioned(_))
        ));
        let c6 = HyperellipticCurve::from_real(2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!(!c6.infinity_branch());
        assert!(period_matrix(&c6, 16).is_err());
    }

    #[test]
    fn curve_json() {
        let j = r#"{"genus":2,"branch_points":[[2,0],[3,0],[5,0],[1,0],[0,0]],"infinity_branch":true}"#;
        let curve: HyperellipticCurve = serde_json::from_str(j).unwrap();
        assert_eq!(curve.branch_points()[2], c(5.0, 0.0));
        let bad = r#"{"genus":2,"branch_points":[[2,0],[3,0],[5,0],[1,0],[0,0]],"infinity_branch":false}"#;
        assert!(serde_json::from_str::<HyperellipticCurve>(bad).is_err());
    }

    #[test]
    fn genus1_square_lattice() {
        // λ = 1/2: with A around [0, 1/2] the lattice is the square one.
        let curve = HyperellipticCurve::from_real(1, &[0.0, 0.5, 1.0]).unwrap();
        let t = period_matrix(&curve, 128).unwrap().tau.tau()[(0, 0)];
        assert!(t.re.abs() < 1e-8, "tau = {t}");
        assert!((t.im - 1.0).abs() < 1e-10, "tau = {t}");
        // Listing the points as {0, 1, 1/2} puts 1/2 inside A; τ = (1 + i)/2,
        // which is S·T⁻¹-equivalent to i.
        let curve = HyperellipticCurve::from_real(1, &[0.0, 1.0, 0.5]).unwrap();
        let t = period_matrix(&curve, 128).unwrap().tau.tau()[(0, 0)];
        let back = -1.0 / t + 1.0;
        assert!((back - Complex64::i()).norm() < 1e-10, "tau = {t}");
    }

    #[test]
    fn symmetric_and_convergent() {
        let curve = HyperellipticCurve::new(2, vec![c(2.0, 0.0), c(3.0, 0.0), c(5.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let a = period_matrix(&curve, 128).unwrap();
        let b = period_matrix(&curve, 256).unwrap();
        assert!(a.symmetry_residual < 1e-10);
        assert!(max_diff(&a.tau, &b.tau) < 1e-9);
    }

    #[test]
    fn complex_branch_points() {
        let curve = HyperellipticCurve::new(
            3,
            vec![c(1.0, 1.0), c(3.0, -1.0), c(2.0, 0.5), c(-1.0, 0.0), c(0.0, 0.3), c(4.0, 2.0), c(-2.0, -1.5)],
        )
        .unwrap();
        let pd = period_matrix(&curve, 128).unwrap();
        assert!(pd.symmetry_residual < 1e-8);
        assert!(pd.tau.min_im_eigenvalue > 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn affine_maps_preserve_tau(shift in -3.0f64..3.0, scale in 0.3f64..4.0) {
            let base = [c(2.0, 0.0), c(3.0, 0.0), c(5.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
            let moved: Vec<Complex64> = base.iter().map(|b| b * scale + shift).collect();
            let t0 = period_matrix(&HyperellipticCurve::new(2, base.to_vec()).unwrap(), 128).unwrap();
            let t1 = period_matrix(&HyperellipticCurve::new(2, moved).unwrap(), 128).unwrap();
            prop_assert!(max_diff(&t0.tau, &t1.tau) < 1e-6);
        }
    }
}
