use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitsError {
    #[error("element {value} at position {index} is not a bit")]
    NotABit { index: usize, value: u8 },
    #[error("basis string must be non-empty")]
    EmptyBasis,
    #[error("cannot parse {0:?} as a bit string")]
    Parse(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

/// A string over {0,1}, one byte per bit.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BitString(Vec<u8>);

impl BitString {
    pub fn new(bits: Vec<u8>) -> Result<Self, BitsError> {
        if let Some((index, &value)) = bits.iter().enumerate().find(|(_, &b)| b > 1) {
            return Err(BitsError::NotABit { index, value });
        }
        Ok(Self(bits))
    }

    pub fn zeros(len: usize) -> Self {
        Self(vec![0; len])
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self((0..len).map(|_| rng.gen_range(0..2u8)).collect())
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= 64);
        Self((0..len).map(|i| ((value >> (len - 1 - i)) & 1) as u8).collect())
    }

    /// Inverse of [`BitString::from_u64`]; panics past 64 bits.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len() <= 64, "bit string too long for u64");
        self.0.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> u8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, bit: u8) {
        assert!(bit <= 1);
        self.0[i] = bit;
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.0.iter().copied()
    }

    pub fn push(&mut self, bit: u8) {
        assert!(bit <= 1);
        self.0.push(bit);
    }

    pub fn xor(&self, other: &BitString) -> Result<BitString, BitsError> {
        if self.len() != other.len() {
            return Err(BitsError::LengthMismatch { left: self.len(), right: other.len() });
        }
        Ok(Self(self.0.iter().zip(&other.0).map(|(a, b)| a ^ b).collect()))
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self(v)
    }

    /// `x_{|c}`: the bits of `self` at positions where `bases` selects `c`.
    pub fn restrict(&self, bases: &BasisString, c: Basis) -> Result<BitString, BitsError> {
        if self.len() != bases.len() {
            return Err(BitsError::LengthMismatch { left: self.len(), right: bases.len() });
        }
        Ok(Self(
            self.0
                .iter()
                .zip(bases.iter())
                .filter(|(_, b)| *b == c)
                .map(|(x, _)| *x)
                .collect(),
        ))
    }

    /// Right-pads with zeros up to `len` bits. Longer strings are returned unchanged.
    pub fn padded(&self, len: usize) -> BitString {
        let mut v = self.0.clone();
        if v.len() < len {
            v.resize(len, 0);
        }
        Self(v)
    }

    /// Packs the bits MSB-first into bytes; the final byte is zero-filled.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0
            .chunks(8)
            .map(|chunk| {
                chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (b << (7 - i)))
            })
            .collect()
    }

    pub fn to_hex(&self) -> String {
        self.to_bytes().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl std::str::FromStr for BitString {
    type Err = BitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|ch| match ch {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(BitsError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<u8>, _>>()
            .map(Self)
    }
}

impl TryFrom<String> for BitString {
    type Error = BitsError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

/// Conjugate coding bases: `+` is the computational basis (0), `×` the Hadamard basis (1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Computational,
    Hadamard,
}

impl Basis {
    pub fn from_bit(bit: u8) -> Basis {
        match bit {
            0 => Basis::Computational,
            _ => Basis::Hadamard,
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Basis::Computational => 0,
            Basis::Hadamard => 1,
        }
    }

    pub fn flip(self) -> Basis {
        Basis::from_bit(1 - self.bit())
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Basis::Computational => "+",
            Basis::Hadamard => "x",
        })
    }
}

/// A non-empty string of bases, stored as bits (0 = `+`, 1 = `×`).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "BitString", into = "BitString")]
pub struct BasisString(BitString);

impl BasisString {
    pub fn new(bits: BitString) -> Result<Self, BitsError> {
        if bits.is_empty() {
            return Err(BitsError::EmptyBasis);
        }
        Ok(Self(bits))
    }

    pub fn uniform(len: usize, basis: Basis) -> Self {
        assert!(len > 0, "basis string must be non-empty");
        Self(BitString(vec![basis.bit(); len]))
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        assert!(len > 0, "basis string must be non-empty");
        Self(BitString::random(len, rng))
    }

    pub fn from_bases(bases: &[Basis]) -> Result<Self, BitsError> {
        Self::new(BitString(bases.iter().map(|b| b.bit()).collect()))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> Basis {
        Basis::from_bit(self.0.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = Basis> + '_ {
        self.0.iter().map(Basis::from_bit)
    }

    pub fn as_bits(&self) -> &BitString {
        &self.0
    }

    pub fn count(&self, basis: Basis) -> usize {
        self.iter().filter(|&b| b == basis).count()
    }
}

impl TryFrom<BitString> for BasisString {
    type Error = BitsError;

    fn try_from(b: BitString) -> Result<Self, Self::Error> {
        Self::new(b)
    }
}

impl From<BasisString> for BitString {
    fn from(b: BasisString) -> BitString {
        b.0
    }
}

impl fmt::Display for BasisString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_bits() {
        assert_eq!(BitString::new(vec![0, 2]), Err(BitsError::NotABit { index: 1, value: 2 }));
        assert!(BasisString::new(BitString::zeros(0)).is_err());
    }

    #[test]
    fn restrict_and_pad() {
        let x: BitString = "1011".parse().unwrap();
        let b = BasisString::new("0110".parse().unwrap()).unwrap();
        assert_eq!(x.restrict(&b, Basis::Computational).unwrap().to_string(), "11");
        assert_eq!(x.restrict(&b, Basis::Hadamard).unwrap().to_string(), "01");
        assert_eq!(x.restrict(&b, Basis::Hadamard).unwrap().padded(4).to_string(), "0100");
    }

    #[test]
    fn hex_packs_msb_first() {
        let x: BitString = "101000001".parse().unwrap();
        assert_eq!(x.to_hex(), "a080");
        assert_eq!(BitString::from_u64(5, 4).to_string(), "0101");
        assert_eq!(BitString::from_u64(5, 4).to_u64(), 5);
    }

    #[test]
    fn serde_as_string() {
        let x: BitString = "0110".parse().unwrap();
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"0110\"");
        let back: BitString = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }
}
