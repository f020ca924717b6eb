use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Single-qubit Pauli, phase ignored. The discriminant is the index used by
/// [`crate::decoder::PriorVector`]: `[I, X, Y, Z]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

/// Encoded operation on a `k = 1` block, up to stabilizers.
pub type LogicalClass = Pauli;

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i & 3]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn z_bit(self) -> bool {
        matches!(self, Pauli::Y | Pauli::Z)
    }

    pub fn is_identity(self) -> bool {
        self == Pauli::I
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        (self.x_bit() & other.z_bit()) ^ (self.z_bit() & other.x_bit())
    }

    pub fn letter(self) -> char {
        ['I', 'X', 'Y', 'Z'][self.index()]
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'I' | '_' | '.' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Phaseless product.
impl std::ops::Mul for Pauli {
    type Output = Pauli;

    fn mul(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit())
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

const WORD: usize = 64;

fn words(n: usize) -> usize {
    n.div_ceil(WORD)
}

/// Phaseless `n`-qubit Pauli operator as packed X and Z bit vectors.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: Vec<u64>,
    z: Vec<u64>,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self { n, x: vec![0; words(n)], z: vec![0; words(n)] }
    }

    pub fn from_paulis(letters: &[Pauli]) -> Self {
        let mut op = Self::identity(letters.len());
        for (i, &p) in letters.iter().enumerate() {
            op.set(i, p);
        }
        op
    }

    /// Single-qubit operator `p` on `qubit`.
    pub fn single(n: usize, qubit: usize, p: Pauli) -> Self {
        let mut op = Self::identity(n);
        op.set(qubit, p);
        op
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize) -> Pauli {
        assert!(i < self.n, "qubit {i} out of range for n = {}", self.n);
        let (w, b) = (i / WORD, i % WORD);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    pub fn set(&mut self, i: usize, p: Pauli) {
        assert!(i < self.n, "qubit {i} out of range for n = {}", self.n);
        let (w, b) = (i / WORD, i % WORD);
        let mask = 1u64 << b;
        self.x[w] = (self.x[w] & !mask) | ((p.x_bit() as u64) << b);
        self.z[w] = (self.z[w] & !mask) | ((p.z_bit() as u64) << b);
    }

    pub fn paulis(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.n).map(move |i| self.get(i))
    }

    pub fn x_bits(&self) -> Vec<bool> {
        self.paulis().map(Pauli::x_bit).collect()
    }

    pub fn z_bits(&self) -> Vec<bool> {
        self.paulis().map(Pauli::z_bit).collect()
    }

    pub fn weight(&self) -> usize {
        self.x.iter().zip(&self.z).map(|(x, z)| (x | z).count_ones() as usize).sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// Qubit indices carrying a non-identity Pauli.
    pub fn support(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| !self.get(i).is_identity()).collect()
    }

    fn check_size(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SizeMismatch { expected: self.n, actual: other.n });
        }
        Ok(())
    }

    /// Symplectic inner product: `true` iff the operators commute.
    pub fn commutes(&self, other: &Self) -> Result<bool> {
        self.check_size(other)?;
        Ok(!self.anticommutes_unchecked(other))
    }

    pub(crate) fn anticommutes_unchecked(&self, other: &Self) -> bool {
        let mut parity = 0u32;
        for w in 0..self.x.len() {
            parity ^= ((self.x[w] & other.z[w]) ^ (self.z[w] & other.x[w])).count_ones();
        }
        parity & 1 == 1
    }

    /// Phaseless product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        Self {
            n: self.n,
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    /// Lexicographic order on `(x_bits, z_bits)`, qubit 0 first, `I < non-I`.
    pub fn cmp_lex(&self, other: &Self) -> Ordering {
        self.x_bits().cmp(&other.x_bits()).then_with(|| self.z_bits().cmp(&other.z_bits()))
    }
}

impl fmt::Display for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.paulis() {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliOperator({self})")
    }
}

impl FromStr for PauliOperator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(Pauli::from_letter)
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::ParsePauli(s.to_string()))?;
        if letters.is_empty() {
            return Err(Error::ParsePauli(s.to_string()));
        }
        Ok(Self::from_paulis(&letters))
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(s: &str) -> PauliOperator {
        s.parse().unwrap()
    }

    #[test]
    fn commutation_examples() {
        assert!(op("XI").commutes(&op("XI")).unwrap());
        assert!(!op("XI").commutes(&op("ZI")).unwrap());
        // X0 Z1 against Z0 X1: two anticommuting positions cancel.
        assert!(op("XZ").commutes(&op("ZX")).unwrap());
        assert!(op("X").commutes(&op("XX")).is_err());
    }

    #[test]
    fn multiply_examples() {
        let p = op("XYZIY");
        assert_eq!(p.multiply(&PauliOperator::identity(5)).unwrap(), p);
        assert_eq!(op("X").multiply(&op("Z")).unwrap(), op("Y"));
        assert!(p.multiply(&p).unwrap().is_identity());
        assert!(op("XX").multiply(&op("X")).is_err());
    }

    #[test]
    fn letters_round_trip_and_weight() {
        let p = op("IXYZI");
        assert_eq!(p.to_string(), "IXYZI");
        assert_eq!(p.weight(), 3);
        assert_eq!(p.support(), vec![1, 2, 3]);
        assert_eq!(p.get(2), Pauli::Y);
        assert!("XQ".parse::<PauliOperator>().is_err());
        assert!("".parse::<PauliOperator>().is_err());
    }

    #[test]
    fn wide_operators_span_words() {
        let mut p = PauliOperator::identity(130);
        p.set(0, Pauli::X);
        p.set(64, Pauli::Z);
        p.set(129, Pauli::Y);
        assert_eq!(p.weight(), 3);
        let mut q = PauliOperator::identity(130);
        q.set(64, Pauli::X);
        assert!(!p.commutes(&q).unwrap());
        q.set(129, Pauli::X);
        assert!(p.commutes(&q).unwrap());
    }

    #[test]
    fn single_qubit_table() {
        for a in Pauli::ALL {
            assert_eq!(a * a, Pauli::I);
            for b in Pauli::ALL {
                let anti = !a.is_identity() && !b.is_identity() && a != b;
                assert_eq!(a.anticommutes(b), anti);
            }
        }
        assert_eq!(Pauli::X * Pauli::Z, Pauli::Y);
    }

    #[test]
    fn lex_order() {
        assert_eq!(op("IX").cmp_lex(&op("XI")), Ordering::Less);
        assert_eq!(op("XZ").cmp_lex(&op("XY")), Ordering::Less);
        assert_eq!(op("ZI").cmp_lex(&op("XI")), Ordering::Less);
    }
}
