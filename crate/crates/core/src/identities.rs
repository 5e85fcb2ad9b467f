//! Identities among theta constants generated from an all-even Göpel group.
//!
//! For 𝔥 in the group and a suitable 𝔞, the addition formula gives
//!
//! 2^{g-1} θ²[𝔞]θ²[𝔞𝔥] = Σ_𝔢 (−1)^{|𝔞𝔢|} (𝔥 choose 𝔞𝔢) θ²[𝔢]θ²[𝔢𝔥]
//!
//! and the fourth-power companion
//!
//! 2^{g-1}(θ⁴[𝔞] + s θ⁴[𝔞𝔥]) = Σ_𝔢 (−1)^{|𝔞𝔢|} (θ⁴[𝔢] + s θ⁴[𝔢𝔥]),
//!
//! with s = (−1)^{|𝔞,𝔥|}. The sum runs over one 𝔢 from each orbit {𝔢, 𝔢𝔥}
//! of characteristics with 𝔢, 𝔢𝔥 even and |𝔞𝔢, 𝔥| ≡ 0.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::charspace::{all_chars, bracket, pairing, GopelGroup, HalfChar};
use crate::error::{Error, Result};
use crate::labels;
use crate::theta::{half_thetanulls, EvalParams, SiegelPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdentityKind {
    SquaredProduct,
    FourthPower,
}

/// coeff · Π θ[c]^exp over the factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: i64,
    pub factors: Vec<(HalfChar, u32)>,
}

/// Σ terms = 0, normalized so terms are sorted, the coefficients have no
/// common factor and the first coefficient is positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityInstance {
    pub kind: IdentityKind,
    pub h: Option<HalfChar>,
    pub a: Option<HalfChar>,
    pub terms: Vec<Term>,
}

fn char_key(c: &HalfChar) -> usize {
    labels::theta_label(c).unwrap_or(c.index() + 1)
}

fn factor_key(f: &[(HalfChar, u32)]) -> Vec<(usize, u32)> {
    f.iter().map(|(c, e)| (char_key(c), *e)).collect()
}

impl IdentityInstance {
    /// Combines like terms and fixes the presentation.
    pub fn normalized(kind: IdentityKind, h: Option<HalfChar>, a: Option<HalfChar>, raw: Vec<Term>) -> Self {
        let mut acc: BTreeMap<Vec<(usize, u32)>, (i64, Vec<(HalfChar, u32)>)> = BTreeMap::new();
        for t in raw {
            let mut merged: BTreeMap<usize, (HalfChar, u32)> = BTreeMap::new();
            for (c, e) in t.factors {
                merged.entry(char_key(&c)).and_modify(|x| x.1 += e).or_insert((c, e));
            }
            let factors: Vec<(HalfChar, u32)> = merged.into_values().collect();
            acc.entry(factor_key(&factors)).or_insert((0, factors)).0 += t.coeff;
        }
        let mut terms: Vec<Term> =
            acc.into_values().filter(|(c, _)| *c != 0).map(|(coeff, factors)| Term { coeff, factors }).collect();
        let g = terms.iter().fold(0i64, |g, t| g.gcd(&t.coeff));
        if g != 0 {
            let sign = if terms[0].coeff < 0 { -1 } else { 1 };
            for t in &mut terms {
                t.coeff = t.coeff / g * sign;
            }
        }
        IdentityInstance { kind, h, a, terms }
    }

    pub fn is_trivial(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn chars(&self) -> impl Iterator<Item = &HalfChar> {
        self.terms.iter().flat_map(|t| t.factors.iter().map(|(c, _)| c))
    }

    /// Shape used for golden comparisons: (sorted labels with exponents, coefficient).
    pub fn signature(&self) -> Vec<(Vec<(usize, u32)>, i64)> {
        self.terms.iter().map(|t| (factor_key(&t.factors), t.coeff)).collect()
    }

    /// (LHS, RHS) with positive terms on the left and the rest moved right.
    pub fn sides(&self, values: &HashMap<HalfChar, Complex64>) -> Result<(Complex64, Complex64)> {
        let mut lhs = Complex64::new(0.0, 0.0);
        let mut rhs = Complex64::new(0.0, 0.0);
        for t in &self.terms {
            let mut v = Complex64::new(t.coeff.unsigned_abs() as f64, 0.0);
            for (c, e) in &t.factors {
                let th = values.get(c).ok_or_else(|| Error::domain(format!("no value for {c}")))?;
                v *= th.powu(*e);
            }
            if t.coeff > 0 {
                lhs += v;
            } else {
                rhs += v;
            }
        }
        Ok((lhs, rhs))
    }

    /// |LHS − RHS| / (1 + |LHS| + |RHS|).
    pub fn residual(&self, values: &HashMap<HalfChar, Complex64>) -> Result<f64> {
        let (l, r) = self.sides(values)?;
        Ok((l - r).norm() / (1.0 + l.norm() + r.norm()))
    }
}

impl fmt::Display for IdentityInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |pos: bool| -> String {
            let parts: Vec<String> = self
                .terms
                .iter()
                .filter(|t| (t.coeff > 0) == pos)
                .map(|t| {
                    let c = t.coeff.unsigned_abs();
                    let body: Vec<String> =
                        t.factors.iter().map(|(ch, e)| format!("{}^{}", char_key(ch), e)).collect();
                    if c == 1 {
                        body.join(" ")
                    } else {
                        format!("{c} {}", body.join(" "))
                    }
                })
                .collect();
            if parts.is_empty() {
                "0".into()
            } else {
                parts.join(" + ")
            }
        };
        write!(f, "{} = {}", side(true), side(false))
    }
}

/// Parses `"3 13^2 23^2 - 28^2 11^2 = 3^2 1^2 - ..."` where the integers
/// before `^` are θ labels of the genus-g table.
pub fn parse_label_equation(g: usize, text: &str) -> Result<IdentityInstance> {
    let (l, r) = text.split_once('=').ok_or_else(|| Error::domain("equation needs '='"))?;
    let mut terms = Vec::new();
    let mut max_exp = 0;
    for (side, sign) in [(l, 1i64), (r, -1i64)] {
        let mut coeff: Option<i64> = None;
        let mut factors: Vec<(HalfChar, u32)> = Vec::new();
        let mut pending_sign = 1i64;
        let flush = |coeff: &mut Option<i64>, factors: &mut Vec<(HalfChar, u32)>, s: i64, terms: &mut Vec<Term>| {
            if !factors.is_empty() {
                terms.push(Term { coeff: s * coeff.unwrap_or(1), factors: std::mem::take(factors) });
            }
            *coeff = None;
        };
        for tok in side.split_whitespace() {
            match tok {
                "+" | "-" => {
                    flush(&mut coeff, &mut factors, sign * pending_sign, &mut terms);
                    pending_sign = if tok == "-" { -1 } else { 1 };
                }
                _ => {
                    if let Some((i, e)) = tok.split_once('^') {
                        let i: usize = i.parse().map_err(|_| Error::domain(format!("bad label in {tok:?}")))?;
                        let e: u32 = e.parse().map_err(|_| Error::domain(format!("bad exponent in {tok:?}")))?;
                        max_exp = max_exp.max(e);
                        factors.push((labels::theta_char(g, i)?, e));
                    } else {
                        coeff = Some(tok.parse().map_err(|_| Error::domain(format!("bad token {tok:?}")))?);
                    }
                }
            }
        }
        flush(&mut coeff, &mut factors, sign * pending_sign, &mut terms);
    }
    let kind = if max_exp >= 4 { IdentityKind::FourthPower } else { IdentityKind::SquaredProduct };
    Ok(IdentityInstance::normalized(kind, None, None, terms))
}

/// 𝔢 representatives, one per orbit {𝔢, 𝔢𝔥}, in index order.
pub fn admissible_e(a: &HalfChar, h: &HalfChar) -> Vec<HalfChar> {
    let g = h.genus();
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for e in all_chars(g) {
        let eh = e * *h;
        if !e.is_even() || !eh.is_even() || pairing(&(*a * e), h).unwrap() != 0 {
            continue;
        }
        if seen.insert(e) {
            seen.insert(eh);
            out.push(e);
        }
    }
    out
}

/// The squared-product and fourth-power identities for one (𝔥, 𝔞).
pub fn identities_for(h: &HalfChar, a: &HalfChar) -> Result<[IdentityInstance; 2]> {
    if h.genus() != a.genus() {
        return Err(Error::Dimension { expected: h.genus(), got: a.genus() });
    }
    let ah = pairing(a, h)?;
    let hp = if h.is_even() { 0 } else { 1 };
    if (ah + hp) % 2 != 0 {
        return Err(Error::domain(format!("|a,h| + |h| is odd for a = {a}, h = {h}")));
    }
    let g = h.genus() as u32;
    let lead = 1i64 << (g - 1);
    let s: i64 = if ah == 0 { 1 } else { -1 };
    let es = admissible_e(a, h);

    let mut sq = vec![Term { coeff: lead, factors: vec![(*a, 2), (*a * *h, 2)] }];
    let mut fourth = vec![
        Term { coeff: lead, factors: vec![(*a, 4)] },
        Term { coeff: lead * s, factors: vec![(*a * *h, 4)] },
    ];
    for e in &es {
        let ae = *a * *e;
        let pe: i64 = ae.sign() as i64;
        let br = bracket(h, &ae) as i64;
        sq.push(Term { coeff: -pe * br, factors: vec![(*e, 2), (*e * *h, 2)] });
        fourth.push(Term { coeff: -pe, factors: vec![(*e, 4)] });
        fourth.push(Term { coeff: -pe * s, factors: vec![(*e * *h, 4)] });
    }
    Ok([
        IdentityInstance::normalized(IdentityKind::SquaredProduct, Some(*h), Some(*a), sq),
        IdentityInstance::normalized(IdentityKind::FourthPower, Some(*h), Some(*a), fourth),
    ])
}

/// Default 𝔞 for each nonzero 𝔥: the first even characteristic outside the
/// group (in θ-label order) with |𝔞, 𝔥| + |𝔥| ≡ 0.
pub fn default_a_choices(group: &GopelGroup) -> Vec<(HalfChar, HalfChar)> {
    let mut chars = all_chars(group.genus);
    chars.sort_by_key(char_key);
    let mut hs: Vec<HalfChar> = group.nonzero().copied().collect();
    hs.sort_by_key(char_key);
    hs.into_iter()
        .filter_map(|h| {
            chars
                .iter()
                .find(|a| a.is_even() && !group.contains(a) && (pairing(a, &h).unwrap() + (!h.is_even()) as u8).is_multiple_of(2))
                .map(|a| (h, *a))
        })
        .collect()
}

/// Two identities per (𝔥, 𝔞) pair, squared-product first.
pub fn generate_identities(group: &GopelGroup, a_choices: &[(HalfChar, HalfChar)]) -> Result<Vec<IdentityInstance>> {
    if !group.all_even() {
        return Err(Error::domain("identity generation needs an all-even Göpel group"));
    }
    let mut out = Vec::new();
    for (h, a) in a_choices {
        if h.is_zero() || !group.contains(h) {
            return Err(Error::domain(format!("{h} is not a nonzero element of the group")));
        }
        out.extend(identities_for(h, a)?);
    }
    Ok(out)
}

/// Six identities for each of the six all-even genus-2 groups.
pub fn genus2_suite() -> Result<Vec<IdentityInstance>> {
    let mut out = Vec::new();
    for (name, _) in labels::GENUS2_EVEN_GROUPS {
        let grp = labels::genus2_even_group(name)?;
        out.extend(generate_identities(&grp, &default_a_choices(&grp))?);
    }
    Ok(out)
}

/// The fourteen identities of the genus-3 reference group.
pub fn genus3_reference_suite() -> Result<Vec<IdentityInstance>> {
    generate_identities(&labels::genus3_reference_group(), &labels::genus3_reference_pairs())
}

/// Every admissible (𝔥, 𝔞) over every all-even group of rank g, with
/// duplicates after normalization removed.
pub fn full_catalog(g: usize) -> Result<Vec<IdentityInstance>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for grp in crate::charspace::all_even_gopel_groups(g, g)? {
        for h in grp.nonzero() {
            for a in all_chars(g) {
                if !(pairing(&a, h)? + (!h.is_even()) as u8).is_multiple_of(2) {
                    continue;
                }
                for inst in identities_for(h, &a)? {
                    if !inst.is_trivial() && seen.insert(inst.signature()) {
                        out.push(inst);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Thetanulls of every characteristic referenced by the instances.
pub fn evaluate_chars(
    instances: &[IdentityInstance],
    tau: &SiegelPoint,
    p: &EvalParams,
) -> Result<HashMap<HalfChar, Complex64>> {
    let mut chars: Vec<HalfChar> = instances.iter().flat_map(|i| i.chars().copied()).collect();
    chars.sort();
    chars.dedup();
    if let Some(c) = chars.iter().find(|c| c.genus() != tau.genus()) {
        return Err(Error::Dimension { expected: tau.genus(), got: c.genus() });
    }
    let vals = half_thetanulls(tau, &chars, p)?;
    Ok(chars.into_iter().zip(vals).collect())
}

pub fn identity_residuals(instances: &[IdentityInstance], tau: &SiegelPoint, p: &EvalParams) -> Result<Vec<f64>> {
    let values = evaluate_chars(instances, tau, p)?;
    instances.iter().map(|i| i.residual(&values)).collect()
}

/// Worst relative residual over the instances.
pub fn verify_identities(instances: &[IdentityInstance], tau: &SiegelPoint, p: &EvalParams) -> Result<f64> {
    Ok(identity_residuals(instances, tau, p)?.into_iter().fold(0.0, f64::max))
}
