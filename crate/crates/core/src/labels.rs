//! Fixed θ-index tables for genus 2 and genus 3, and the reference Göpel
//! groups used by the identity goldens.
//!
//! Each entry is written as g top digits followed by g bottom digits, so
//! `"0011"` is the genus-2 characteristic [0 0; ½ ½]. The even
//! characteristics come first in both tables.

use crate::charspace::{GopelGroup, HalfChar};
use crate::error::{Error, Result};

pub const GENUS2: [&str; 16] = [
    "0000", "0011", "0010", "0001", "1000", "1001", "0100", "1100", "0110", "1111", "0101", "0111", "1010", "1110",
    "1011", "1101",
];

pub const GENUS3: [&str; 64] = [
    "000000", "101111", "111000", "000100", "100010", "110001", "011100", "001010", "000001", "100000", "110110",
    "111101", "000110", "010000", "011011", "010101", "000011", "001000", "110111", "010001", "000010", "011000",
    "111110", "101101", "100001", "000111", "010100", "001110", "101000", "111011", "101010", "001100", "011111",
    "000101", "100011", "110000", "100100", "110010", "111001", "010110", "011101", "001011", "111100", "011010",
    "001001", "010011", "110101", "100110", "101110", "100101", "110011", "001111", "011001", "010010", "101001",
    "111111", "110100", "111010", "101100", "100111", "101011", "001101", "011110", "010111",
];

pub const GENUS2_EVEN: usize = 10;
pub const GENUS3_EVEN: usize = 36;
/// θ₁₂ vanishes at every hyperelliptic genus-3 period matrix.
pub const GENUS3_VANISHING_LABEL: usize = 12;

fn table(g: usize) -> Result<&'static [&'static str]> {
    match g {
        2 => Ok(&GENUS2),
        3 => Ok(&GENUS3),
        _ => Err(Error::Unsupported(format!("no θ-index table for genus {g}"))),
    }
}

/// θ_i's characteristic, `i` 1-based.
pub fn theta_char(g: usize, i: usize) -> Result<HalfChar> {
    let t = table(g)?;
    if i == 0 || i > t.len() {
        return Err(Error::domain(format!("θ index {i} outside 1..={}", t.len())));
    }
    HalfChar::from_digits(t[i - 1])
}

/// Inverse of [`theta_char`].
pub fn theta_label(c: &HalfChar) -> Result<usize> {
    let t = table(c.genus())?;
    let d = c.digits();
    Ok(t.iter().position(|s| *s == d).expect("tables are complete") + 1)
}

pub fn even_labels(g: usize) -> Result<Vec<usize>> {
    match g {
        2 => Ok((1..=GENUS2_EVEN).collect()),
        3 => Ok((1..=GENUS3_EVEN).collect()),
        _ => Err(Error::Unsupported(format!("no θ-index table for genus {g}"))),
    }
}

/// Generators of the six all-even genus-2 Göpel groups, in the order the
/// tables are usually listed (i)..(vi).
pub const GENUS2_EVEN_GROUPS: [(&str, [&str; 2]); 6] = [
    ("i", ["0001", "0010"]),
    ("ii", ["0011", "1111"]),
    ("iii", ["0010", "0100"]),
    ("iv", ["0001", "1000"]),
    ("v", ["1000", "0100"]),
    ("vi", ["1001", "0110"]),
];

pub fn genus2_even_group(name: &str) -> Result<GopelGroup> {
    let (_, gens) = GENUS2_EVEN_GROUPS
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| Error::domain(format!("unknown genus-2 group {name:?}")))?;
    let gens = gens.iter().map(|s| HalfChar::from_digits(s)).collect::<Result<Vec<_>>>()?;
    GopelGroup::from_generators(&gens)
}

/// The all-even genus-3 group {c1..c8} with c2 = [½½½;000], c3 = [½00;000],
/// c4 = [0½0;000].
pub fn genus3_reference_group() -> GopelGroup {
    let gens = ["111000", "100000", "010000"].map(|s| HalfChar::from_digits(s).unwrap());
    GopelGroup::from_generators(&gens).unwrap()
}

/// (𝔥, 𝔞) pairs that reproduce the fourteen genus-3 reference identities,
/// listed as h = c2, c3, c4, c8, c5, c6, c7.
///
/// With b1 = [000;½½0], b2 = [000;0½0], b3 = [000;½0½].
pub fn genus3_reference_pairs() -> Vec<(HalfChar, HalfChar)> {
    let c = |s: &str| HalfChar::from_digits(s).unwrap();
    let (b1, b2, b3) = (c("000110"), c("000010"), c("000101"));
    vec![
        (c("111000"), b1),
        (c("100000"), b2),
        (c("010000"), b3),
        (c("001000"), b1 * b2),
        (c("011000"), b1 * b3),
        (c("101000"), b2 * b3),
        (c("110000"), b1 * b2 * b3),
    ]
}
