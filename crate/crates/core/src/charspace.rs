//! Half-integer characteristics, Göpel groups and the hyperelliptic η-map.
//!
//! A characteristic of genus g is stored as two g-bit masks. Bit `i` of
//! `top` is the numerator of the ½ in column `i + 1` of the upper row, and
//! likewise for `bottom`. Products are XOR, so the whole group is
//! `(Z/2)^{2g}` with the symplectic pairing below.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_GENUS: usize = 8;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfChar {
    genus: u8,
    top: u16,
    bottom: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl HalfChar {
    pub fn new(genus: usize, top: u16, bottom: u16) -> Result<Self> {
        if genus == 0 || genus > MAX_GENUS {
            return Err(Error::domain(format!("genus {genus} outside 1..={MAX_GENUS}")));
        }
        let mask = Self::mask(genus);
        if top & !mask != 0 || bottom & !mask != 0 {
            return Err(Error::domain("characteristic bits exceed the genus"));
        }
        Ok(HalfChar { genus: genus as u8, top, bottom })
    }

    /// Builds from row vectors of 0/1 entries (column 1 first).
    pub fn from_rows(top: &[u8], bottom: &[u8]) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::Dimension { expected: top.len(), got: bottom.len() });
        }
        let pack = |row: &[u8]| -> Result<u16> {
            row.iter().enumerate().try_fold(0u16, |acc, (i, &b)| match b {
                0 => Ok(acc),
                1 => Ok(acc | (1 << i)),
                _ => Err(Error::domain(format!("entry {b} is not 0 or 1"))),
            })
        };
        Self::new(top.len(), pack(top)?, pack(bottom)?)
    }

    /// Parses a compact string such as `"111101"`: g top digits then g bottom digits.
    pub fn from_digits(s: &str) -> Result<Self> {
        let d: Vec<u8> = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ';' && *c != '|')
            .map(|c| c.to_digit(2).map(|v| v as u8).ok_or_else(|| Error::domain(format!("bad digit {c:?}"))))
            .collect::<Result<_>>()?;
        if d.is_empty() || !d.len().is_multiple_of(2) {
            return Err(Error::domain(format!("{s:?} needs an even number of digits")));
        }
        let g = d.len() / 2;
        Self::from_rows(&d[..g], &d[g..])
    }

    pub fn zero(genus: usize) -> Self {
        Self::new(genus, 0, 0).expect("valid genus")
    }

    fn mask(genus: usize) -> u16 {
        ((1u32 << genus) - 1) as u16
    }

    pub fn genus(&self) -> usize {
        self.genus as usize
    }

    pub fn top_bits(&self) -> u16 {
        self.top
    }

    pub fn bottom_bits(&self) -> u16 {
        self.bottom
    }

    pub fn top_row(&self) -> Vec<u8> {
        (0..self.genus()).map(|i| ((self.top >> i) & 1) as u8).collect()
    }

    pub fn bottom_row(&self) -> Vec<u8> {
        (0..self.genus()).map(|i| ((self.bottom >> i) & 1) as u8).collect()
    }

    /// Dense index in `0..4^g`, handy for lookup tables.
    pub fn index(&self) -> usize {
        (self.top as usize) | ((self.bottom as usize) << self.genus)
    }

    pub fn from_index(genus: usize, idx: usize) -> Self {
        let mask = Self::mask(genus) as usize;
        HalfChar { genus: genus as u8, top: (idx & mask) as u16, bottom: ((idx >> genus) & mask) as u16 }
    }

    pub fn is_zero(&self) -> bool {
        self.top == 0 && self.bottom == 0
    }

    pub fn parity(&self) -> Parity {
        if (self.top & self.bottom).count_ones().is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    /// `e_*` as a sign: +1 for even, -1 for odd.
    pub fn sign(&self) -> i32 {
        if self.is_even() {
            1
        } else {
            -1
        }
    }

    /// Entries as reals in {0, 1/2}, top row then bottom row.
    pub fn as_halves(&self) -> (Vec<f64>, Vec<f64>) {
        let half = |row: Vec<u8>| row.into_iter().map(|b| b as f64 * 0.5).collect();
        (half(self.top_row()), half(self.bottom_row()))
    }

    pub fn digits(&self) -> String {
        self.top_row().iter().chain(self.bottom_row().iter()).map(|b| char::from(b'0' + b)).collect()
    }

    fn check(&self, other: &HalfChar) -> Result<()> {
        if self.genus != other.genus {
            return Err(Error::Dimension { expected: self.genus(), got: other.genus() });
        }
        Ok(())
    }
}

impl fmt::Debug for HalfChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |r: Vec<u8>| r.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "[{}; {}]", row(self.top_row()), row(self.bottom_row()))
    }
}

impl fmt::Display for HalfChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct HalfCharJson {
    g: usize,
    top: Vec<u8>,
    bottom: Vec<u8>,
}

impl Serialize for HalfChar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        HalfCharJson { g: self.genus(), top: self.top_row(), bottom: self.bottom_row() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for HalfChar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = HalfCharJson::deserialize(d)?;
        if j.top.len() != j.g || j.bottom.len() != j.g {
            return Err(serde::de::Error::custom(format!("rows must have length g = {}", j.g)));
        }
        HalfChar::from_rows(&j.top, &j.bottom).map_err(serde::de::Error::custom)
    }
}

pub fn char_product(a: &HalfChar, b: &HalfChar) -> Result<HalfChar> {
    a.check(b)?;
    Ok(HalfChar { genus: a.genus, top: a.top ^ b.top, bottom: a.bottom ^ b.bottom })
}

impl std::ops::Mul for HalfChar {
    type Output = HalfChar;

    /// Panics on genus mismatch; use [`char_product`] for the checked form.
    fn mul(self, rhs: HalfChar) -> HalfChar {
        char_product(&self, &rhs).expect("genus mismatch in characteristic product")
    }
}

pub fn parity(m: &HalfChar) -> Parity {
    m.parity()
}

/// |m, a| mod 2. Syzygetic iff 0.
pub fn pairing(m: &HalfChar, a: &HalfChar) -> Result<u8> {
    m.check(a)?;
    Ok(pairing_bits(m, a))
}

fn pairing_bits(m: &HalfChar, a: &HalfChar) -> u8 {
    (((m.bottom & a.top).count_ones() + (m.top & a.bottom).count_ones()) % 2) as u8
}

pub fn triple_syzygy(m: &HalfChar, a: &HalfChar, b: &HalfChar) -> Result<u8> {
    Ok(pairing(a, b)? ^ pairing(b, m)? ^ pairing(m, a)?)
}

/// (h choose x) = (-1)^{4 h'·x''}, the sign in the addition formula.
pub fn bracket(h: &HalfChar, x: &HalfChar) -> i32 {
    if (h.top & x.bottom).count_ones().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn all_chars(g: usize) -> Vec<HalfChar> {
    (0..1usize << (2 * g)).map(|i| HalfChar::from_index(g, i)).collect()
}

pub fn even_chars(g: usize) -> Vec<HalfChar> {
    all_chars(g).into_iter().filter(HalfChar::is_even).collect()
}

pub fn odd_chars(g: usize) -> Vec<HalfChar> {
    all_chars(g).into_iter().filter(|c| !c.is_even()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GopelGroup {
    pub genus: usize,
    pub rank: usize,
    /// Sorted by dense index; the zero characteristic comes first.
    pub elements: Vec<HalfChar>,
    /// Reduced echelon basis, which makes the generators canonical.
    pub generators: Vec<HalfChar>,
}

impl GopelGroup {
    /// Span of the given generators; fails if they are dependent or not
    /// pairwise syzygetic.
    pub fn from_generators(gens: &[HalfChar]) -> Result<Self> {
        let g = gens.first().map(|c| c.genus()).ok_or_else(|| Error::domain("no generators"))?;
        for a in gens {
            for b in gens {
                if pairing(a, b)? != 0 {
                    return Err(Error::domain(format!("{a} and {b} are azygetic")));
                }
            }
        }
        let elems = span(g, gens.iter().map(|c| c.index()));
        if elems.len() != 1 << gens.len() {
            return Err(Error::domain("generators are linearly dependent"));
        }
        Ok(Self::from_span(g, elems))
    }

    fn from_span(g: usize, elems: BTreeSet<usize>) -> Self {
        let elements: Vec<HalfChar> = elems.iter().map(|&i| HalfChar::from_index(g, i)).collect();
        let generators = echelon_basis(&elems).into_iter().map(|i| HalfChar::from_index(g, i)).collect::<Vec<_>>();
        GopelGroup { genus: g, rank: generators.len(), elements, generators }
    }

    pub fn contains(&self, c: &HalfChar) -> bool {
        self.elements.binary_search_by_key(&c.index(), HalfChar::index).is_ok()
    }

    pub fn all_even(&self) -> bool {
        self.elements.iter().all(HalfChar::is_even)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &HalfChar> {
        self.elements.iter().filter(|c| !c.is_zero())
    }
}

fn span(g: usize, gens: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut s = BTreeSet::from([0usize]);
    for v in gens {
        let shifted: Vec<usize> = s.iter().map(|x| x ^ v).collect();
        s.extend(shifted);
    }
    debug_assert!(s.iter().all(|&x| x < 1 << (2 * g)));
    s
}

fn echelon_basis(elems: &BTreeSet<usize>) -> Vec<usize> {
    // Gaussian elimination over GF(2), pivots on the highest bit, then
    // back-substitution so each pivot bit appears in exactly one row.
    let mut rows: Vec<usize> = Vec::new();
    for &e in elems {
        let mut v = e;
        for &r in &rows {
            v = v.min(v ^ r);
        }
        if v != 0 {
            rows.push(v);
            rows.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    for i in 0..rows.len() {
        let pivot = 1usize << (usize::BITS - 1 - rows[i].leading_zeros());
        for j in 0..rows.len() {
            if j != i && rows[j] & pivot != 0 {
                rows[j] ^= rows[i];
            }
        }
    }
    rows.sort_unstable();
    rows
}

fn binom_gauss_count(g: usize, r: usize) -> u128 {
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for k in 0..r {
        num *= (1u128 << (2 * g - 2 * k)) - 1;
        den *= (1u128 << (r - k)) - 1;
    }
    num / den
}

/// Number of Göpel groups of rank r in genus g, by the counting formula.
pub fn gopel_group_count(g: usize, r: usize) -> u128 {
    binom_gauss_count(g, r)
}

pub fn enumerate_gopel_groups(g: usize, r: usize) -> Result<Vec<GopelGroup>> {
    if g == 0 || g > 4 {
        return Err(Error::domain(format!("genus {g} outside 1..=4")));
    }
    if r == 0 || r > g {
        return Err(Error::domain(format!("rank {r} must lie in 1..={g}")));
    }
    let n = 1usize << (2 * g);
    let chars: Vec<HalfChar> = (0..n).map(|i| HalfChar::from_index(g, i)).collect();
    let syz = |a: usize, b: usize| pairing_bits(&chars[a], &chars[b]) == 0;

    // Level-by-level extension of isotropic subspaces, deduplicated by their
    // element sets (equivalently by the canonical echelon basis).
    let mut level: BTreeSet<BTreeSet<usize>> = BTreeSet::from([BTreeSet::from([0usize])]);
    for _ in 0..r {
        let next: Vec<BTreeSet<BTreeSet<usize>>> = crate::parallel::map(&level.iter().collect::<Vec<_>>(), |s| {
            let mut out = BTreeSet::new();
            for v in 1..n {
                if s.contains(&v) || !s.iter().all(|&x| syz(x, v)) {
                    continue;
                }
                let mut t = (*s).clone();
                t.extend(s.iter().map(|x| x ^ v).collect::<Vec<_>>());
                out.insert(t);
            }
            out
        });
        level = next.into_iter().flatten().collect();
    }
    Ok(level.into_iter().map(|s| GopelGroup::from_span(g, s)).collect())
}

pub fn all_even_gopel_groups(g: usize, r: usize) -> Result<Vec<GopelGroup>> {
    Ok(enumerate_gopel_groups(g, r)?.into_iter().filter(GopelGroup::all_even).collect())
}

/// All-even groups that also avoid every even characteristic whose
/// thetanull vanishes on hyperelliptic period matrices. In genus 3 this
/// drops the six groups through the vanishing characteristic.
pub fn hyperelliptic_even_gopel_groups(g: usize, r: usize) -> Result<Vec<GopelGroup>> {
    let vanishing = vanishing_even_set(g)?;
    Ok(all_even_gopel_groups(g, r)?
        .into_iter()
        .filter(|grp| !grp.elements.iter().any(|c| vanishing.contains(c)))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GopelSystem {
    pub coset_rep: HalfChar,
    pub members: Vec<HalfChar>,
}

impl GopelSystem {
    pub fn parity_census(&self) -> (usize, usize) {
        let even = self.members.iter().filter(|c| c.is_even()).count();
        (even, self.members.len() - even)
    }
}

/// All cosets of the group; the representative is the member of smallest index.
pub fn gopel_systems(group: &GopelGroup) -> Vec<GopelSystem> {
    let g = group.genus;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in all_chars(g) {
        if seen.contains(&c) {
            continue;
        }
        let mut members: Vec<HalfChar> = group.elements.iter().map(|e| c * *e).collect();
        members.sort_by_key(HalfChar::index);
        seen.extend(members.iter().copied());
        out.push(GopelSystem { coset_rep: members[0], members });
    }
    out
}

/// Expected (all-even, all-odd) system counts with σ = g - r.
pub fn expected_system_census(g: usize, r: usize) -> (usize, usize) {
    let s = g - r;
    if s == 0 {
        return (1, 0);
    }
    let a = 1usize << (s - 1);
    (a * ((1 << s) + 1), a * ((1 << s) - 1))
}

/// Branch-point to characteristic assignment for y² = f(x) with ∞ a branch
/// point. Finite branch points carry indices 1..=2g+1; index 2g+2 is ∞.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtaAssignment {
    pub genus: usize,
    /// Branch labels in η order; the last entry is ∞.
    pub ordering: Vec<String>,
    /// `eta[k - 1]` is η(k) for k = 1..=2g+2.
    pub eta: Vec<HalfChar>,
}

impl EtaAssignment {
    pub fn infinity_index(&self) -> usize {
        2 * self.genus + 2
    }

    pub fn eta(&self, k: usize) -> Result<HalfChar> {
        if k == 0 || k > self.eta.len() {
            return Err(Error::domain(format!("branch index {k} outside 1..={}", self.eta.len())));
        }
        Ok(self.eta[k - 1])
    }

    /// XOR of η over a set of 1-based indices (∞ allowed).
    pub fn eta_t(&self, t: &[usize]) -> Result<HalfChar> {
        t.iter().try_fold(HalfChar::zero(self.genus), |acc, &k| Ok(acc * self.eta(k)?))
    }

    /// U: the odd finite indices 1, 3, ..., 2g+1.
    pub fn u_set(&self) -> Vec<usize> {
        (1..=2 * self.genus + 1).step_by(2).collect()
    }

    /// ε_U(j) in Frobenius' identity: -1 on U, +1 elsewhere (∞ included).
    pub fn epsilon_u(&self, j: usize) -> i32 {
        if j <= 2 * self.genus + 1 && j % 2 == 1 {
            -1
        } else {
            1
        }
    }
}

pub fn eta_assignment(g: usize) -> Result<EtaAssignment> {
    if g == 0 || g > MAX_GENUS {
        return Err(Error::domain(format!("genus {g} outside 1..={MAX_GENUS}")));
    }
    let mut eta = Vec::with_capacity(2 * g + 2);
    for k in 1..=2 * g + 1 {
        let i = k.div_ceil(2); // 1-based column of the top-row half
        let top = if i <= g { 1u16 << (i - 1) } else { 0 };
        let ones = if k % 2 == 1 { i - 1 } else { i }.min(g);
        let bottom = ((1u32 << ones) - 1) as u16;
        eta.push(HalfChar::new(g, top, bottom)?);
    }
    eta.push(HalfChar::zero(g));
    let mut ordering: Vec<String> = (1..=2 * g + 1).map(|k| k.to_string()).collect();
    ordering.push("inf".into());
    Ok(EtaAssignment { genus: g, ordering, eta })
}

pub fn eta_t(assignment: &EtaAssignment, t: &[usize]) -> Result<HalfChar> {
    assignment.eta_t(t)
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (1..=n).filter(|&k| m & (1 << (k - 1)) != 0).collect())
}

fn sym_diff_len(t: &[usize], u: &[usize]) -> usize {
    let a: BTreeSet<_> = t.iter().collect();
    let b: BTreeSet<_> = u.iter().collect();
    a.symmetric_difference(&b).count()
}

/// Even-size subsets T of the finite indices with #(T△U) = g+1, paired with
/// η_T. These index the nonvanishing even thetanulls, each exactly once.
pub fn thomae_subsets(g: usize) -> Result<Vec<(Vec<usize>, HalfChar)>> {
    let asg = eta_assignment(g)?;
    let u = asg.u_set();
    subsets(2 * g + 1)
        .filter(|t| t.len() % 2 == 0 && sym_diff_len(t, &u) == g + 1)
        .map(|t| {
            let c = asg.eta_t(&t)?;
            Ok((t, c))
        })
        .collect()
}

/// Even characteristics whose thetanull vanishes at every hyperelliptic τ.
pub fn vanishing_even_set(g: usize) -> Result<BTreeSet<HalfChar>> {
    if !(1..=MAX_GENUS).contains(&g) {
        return Err(Error::domain(format!("genus {g} outside 1..={MAX_GENUS}")));
    }
    let asg = eta_assignment(g)?;
    let u = asg.u_set();
    let mut out = BTreeSet::new();
    for t in subsets(2 * g + 1) {
        if t.len() % 2 == 0 && sym_diff_len(&t, &u) != g + 1 {
            let c = asg.eta_t(&t)?;
            if c.is_even() {
                out.insert(c);
            }
        }
    }
    Ok(out)
}

/// 2^{g-1}(2^g+1) - C(2g+1, g): the size the vanishing theorem predicts.
pub fn expected_vanishing_count(g: usize) -> usize {
    let even = (1usize << (g - 1)) * ((1 << g) + 1);
    let mut c = 1usize;
    for k in 0..g {
        c = c * (2 * g + 1 - k) / (k + 1);
    }
    even - c
}
