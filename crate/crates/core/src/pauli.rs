//! Pauli strings modulo phase, packed as a pair of bit masks.
//!
//! Slot `i` lives in bit `i` of both masks. `(x, z)` = `(0,0)`, `(1,0)`, `(1,1)`,
//! `(0,1)` encode `I`, `X`, `Y`, `Z`. Slot 0 is the kept (unmeasured) pair; the
//! text form is written with slot 0 as the leftmost character.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Position of this Pauli in a Bell-diagonal probability vector.
    pub fn index(self) -> usize {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// An `n`-qubit Pauli operator with its phase discarded.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    n: u8,
    x: u32,
    z: u32,
}

#[inline]
pub(crate) fn low_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount { n, min: 1, max: MAX_QUBITS });
    }
    Ok(())
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Self { n: n as u8, x: 0, z: 0 })
    }

    /// Builds a string from raw masks; bits above `n` are rejected.
    pub fn from_bits(n: usize, x: u32, z: u32) -> Result<Self> {
        check_n(n)?;
        let m = low_mask(n);
        if x & !m != 0 || z & !m != 0 {
            return Err(Error::Precondition(format!("mask bits above qubit count {n}")));
        }
        Ok(Self { n: n as u8, x, z })
    }

    /// Infallible constructor for internal hot loops; masks are truncated.
    #[inline]
    pub(crate) fn from_bits_unchecked(n: usize, x: u32, z: u32) -> Self {
        let m = low_mask(n);
        Self { n: n as u8, x: x & m, z: z & m }
    }

    /// The `index`-th element of a fixed enumeration of all `4^n` strings:
    /// the low `n` bits give the X mask and the next `n` bits the Z mask.
    #[inline]
    pub fn from_index(n: usize, index: u64) -> Self {
        let m = low_mask(n) as u64;
        Self::from_bits_unchecked(n, (index & m) as u32, ((index >> n) & m) as u32)
    }

    #[inline]
    pub fn to_index(&self) -> u64 {
        self.x as u64 | ((self.z as u64) << self.n)
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Result<Self> {
        check_n(paulis.len())?;
        let (mut x, mut z) = (0u32, 0u32);
        for (i, p) in paulis.iter().enumerate() {
            let (px, pz) = p.bits();
            x |= (px as u32) << i;
            z |= (pz as u32) << i;
        }
        Ok(Self { n: paulis.len() as u8, x, z })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let chars: Vec<char> = text.chars().collect();
        if chars.is_empty() {
            return Err(Error::EmptyPauli);
        }
        if chars.len() > MAX_QUBITS {
            return Err(Error::QubitCount { n: chars.len(), min: 1, max: MAX_QUBITS });
        }
        let mut paulis = Vec::with_capacity(chars.len());
        for (index, &ch) in chars.iter().enumerate() {
            paulis.push(match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::InvalidPauliChar { index, ch }),
            });
        }
        Self::from_paulis(&paulis)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn x_bits(&self) -> u32 {
        self.x
    }

    #[inline]
    pub fn z_bits(&self) -> u32 {
        self.z
    }

    #[inline]
    pub fn get(&self, slot: usize) -> Pauli {
        Pauli::from_bits(self.x >> slot & 1 == 1, self.z >> slot & 1 == 1)
    }

    pub fn paulis(&self) -> Vec<Pauli> {
        (0..self.num_qubits()).map(|i| self.get(i)).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of non-identity slots.
    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Number of slots carrying the given Pauli.
    pub fn count(&self, pauli: Pauli) -> u32 {
        let m = low_mask(self.num_qubits());
        match pauli {
            Pauli::I => (!(self.x | self.z) & m).count_ones(),
            Pauli::X => (self.x & !self.z).count_ones(),
            Pauli::Y => (self.x & self.z).count_ones(),
            Pauli::Z => (!self.x & self.z).count_ones(),
        }
    }

    fn same_len(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::LengthMismatch { left: self.num_qubits(), right: other.num_qubits() });
        }
        Ok(())
    }

    /// Product modulo phase.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_len(other)?;
        Ok(self.mul_unchecked(other))
    }

    #[inline]
    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        Self { n: self.n, x: self.x ^ other.x, z: self.z ^ other.z }
    }

    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.same_len(other)?;
        Ok(self.commutes_unchecked(other))
    }

    /// Symplectic form `<x, z'> + <z, x'>` over GF(2) is zero.
    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()).is_multiple_of(2)
    }

    /// Appends `m` identity slots after the existing ones.
    pub fn pad_identity(&self, m: usize) -> Result<Self> {
        check_n(self.num_qubits() + m)?;
        Ok(Self { n: self.n + m as u8, x: self.x, z: self.z })
    }

    /// Prepends a single-slot Pauli at slot 0, shifting the rest right.
    pub fn prepend(&self, head: Pauli) -> Result<Self> {
        check_n(self.num_qubits() + 1)?;
        let (hx, hz) = head.bits();
        Ok(Self { n: self.n + 1, x: self.x << 1 | hx as u32, z: self.z << 1 | hz as u32 })
    }

    pub fn classify(&self) -> Result<StringClass> {
        StringClass::of(self)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.num_qubits() {
            write!(f, "{}", self.get(i).as_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        Self::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Coarse type of a string relative to the kept slot 0. For `n >= 2` every
/// string falls in exactly one of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StringKind {
    /// Slot 0 is `I`, measured slots are all in `{I, Z}`.
    Correct,
    /// Some measured slot carries `X` or `Y`: the parity check fails.
    Incorrect,
    /// Slot 0 is not `I`, measured slots are all in `{I, Z}`.
    Undetectable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StringClass {
    pub single_noiseless: bool,
    pub kind: StringKind,
}

impl StringClass {
    pub fn of(p: &PauliString) -> Result<Self> {
        let n = p.num_qubits();
        if n < 2 {
            return Err(Error::QubitCount { n, min: 2, max: MAX_QUBITS });
        }
        Ok(Self::of_unchecked(p))
    }

    #[inline]
    pub(crate) fn of_unchecked(p: &PauliString) -> Self {
        let n = p.num_qubits();
        let measured = low_mask(n) & !1;
        let kind = if p.x & measured != 0 {
            StringKind::Incorrect
        } else if (p.x | p.z) & 1 == 0 {
            StringKind::Correct
        } else {
            StringKind::Undetectable
        };
        Self { single_noiseless: (p.x | p.z) != low_mask(n), kind }
    }

    pub fn correct(&self) -> bool {
        self.kind == StringKind::Correct
    }

    pub fn incorrect(&self) -> bool {
        self.kind == StringKind::Incorrect
    }

    pub fn undetectable(&self) -> bool {
        self.kind == StringKind::Undetectable
    }

    pub fn harmless(&self) -> bool {
        self.kind != StringKind::Undetectable
    }

    /// Passes the equal-parity test on every measured pair.
    pub fn succeeds(&self) -> bool {
        self.kind != StringKind::Incorrect
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassSelector {
    SingleNoiseless,
    Harmless,
    Correct,
    Incorrect,
    Undetectable,
}

impl ClassSelector {
    pub fn matches(self, class: &StringClass) -> bool {
        match self {
            ClassSelector::SingleNoiseless => class.single_noiseless,
            ClassSelector::Harmless => class.harmless(),
            ClassSelector::Correct => class.correct(),
            ClassSelector::Incorrect => class.incorrect(),
            ClassSelector::Undetectable => class.undetectable(),
        }
    }

    /// Closed-form cardinality of the class among `n`-qubit strings.
    pub fn count(self, n: usize) -> u64 {
        let (p4, p3, p2) = (4u64.pow(n as u32), 3u64.pow(n as u32), 2u64.pow(n as u32 - 1));
        match self {
            ClassSelector::SingleNoiseless => p4 - p3,
            ClassSelector::Harmless => p4 - 3 * p2,
            ClassSelector::Correct => p2,
            ClassSelector::Incorrect => p4 - 4 * p2,
            ClassSelector::Undetectable => 3 * p2,
        }
    }
}

/// All `n`-qubit strings of the selected class, in enumeration-index order.
pub fn enumerate_class(n: usize, which: ClassSelector) -> Result<Vec<PauliString>> {
    if !(2..=10).contains(&n) {
        return Err(Error::QubitCount { n, min: 2, max: 10 });
    }
    Ok((0..4u64.pow(n as u32))
        .map(|i| PauliString::from_index(n, i))
        .filter(|p| which.matches(&StringClass::of_unchecked(p)))
        .collect())
}

/// Iterator over all `4^n` strings.
pub fn all_strings(n: usize) -> impl Iterator<Item = PauliString> {
    (0..4u64.pow(n as u32)).map(move |i| PauliString::from_index(n, i))
}
