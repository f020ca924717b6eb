//! Knill-Laflamme correctability of Pauli error sets on `k = 1` stabilizer
//! codes, and the located/unlocated equivalence check built on it.
//!
//! For a stabilizer code a set `{E_i}` is correctable iff no product
//! `E_i E_j` is a nontrivial logical operator. Two errors have a nontrivial
//! logical product exactly when they share a syndrome but land in different
//! logical classes after the table recovery, so the check reduces to one
//! hash-map pass over `(syndrome, class)` signatures.

use std::collections::HashMap;

use serde::Serialize;

use super::code::{StabilizerCode, Syndrome};
use super::pauli::{LogicalClass, Pauli, PauliOperator};
use crate::error::{Error, Result};

/// Default cap on the number of operators a correctability check may enumerate.
pub const DEFAULT_ENUMERATION_CAP: u128 = 10_000_000;

/// Qubits known to have suffered a located error.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
pub struct LocatedSet(Vec<usize>);

impl LocatedSet {
    pub fn new(mut indices: Vec<usize>, n: usize) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&index) = indices.iter().find(|&&i| i >= n) {
            return Err(Error::LocatedOutOfRange { index, n });
        }
        Ok(Self(indices))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// `4^|L| * sum_{i<=w} C(n-|L|, i) 3^i`.
pub fn error_set_size(n: usize, located: usize, w: usize) -> u128 {
    let outside = n - located;
    let sum: u128 = (0..=w.min(outside)).map(|i| binomial(outside, i) * 3u128.pow(i as u32)).sum();
    4u128.pow(located as u32) * sum
}

/// Lexicographic `r`-subsets of `0..n`.
#[derive(Clone)]
struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    fn new(n: usize, r: usize) -> Self {
        Self { n, idx: (0..r).collect(), done: r > n }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let r = self.idx.len();
        let mut i = r;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - r + i {
                self.idx[i] += 1;
                for j in i + 1..r {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Every Pauli that is arbitrary on `located` and has weight at most `w` on
/// the remaining qubits.
pub fn enumerate_error_set(
    n: usize,
    located: &LocatedSet,
    w: usize,
) -> Result<impl Iterator<Item = PauliOperator> + Clone> {
    if located.indices().iter().any(|&i| i >= n) {
        return Err(Error::LocatedOutOfRange { index: *located.indices().last().unwrap(), n });
    }
    if w > n - located.len() {
        return Err(Error::InvalidArgument(format!(
            "outside weight {w} exceeds the {} unlocated qubits",
            n - located.len()
        )));
    }
    let outside: Vec<usize> = (0..n).filter(|&i| !located.contains(i)).collect();
    let located: Vec<usize> = located.indices().to_vec();
    let located_patterns = 1usize << (2 * located.len());

    let iter = (0..=w).flat_map(move |weight| {
        let outside = outside.clone();
        let located = located.clone();
        Combinations::new(outside.len(), weight).flat_map(move |subset| {
            let support: Vec<usize> = subset.iter().map(|&j| outside[j]).collect();
            let located = located.clone();
            (0..3usize.pow(support.len() as u32)).flat_map(move |letters| {
                let mut base = PauliOperator::identity(n);
                let mut code = letters;
                for &q in &support {
                    base.set(q, Pauli::NON_IDENTITY[code % 3]);
                    code /= 3;
                }
                let located = located.clone();
                (0..located_patterns).map(move |pattern| {
                    let mut op = base.clone();
                    for (j, &q) in located.iter().enumerate() {
                        op.set(q, Pauli::from_index(pattern >> (2 * j)));
                    }
                    op
                })
            })
        })
    });
    Ok(iter)
}

/// Signature-hashing correctability check (`k = 1`).
pub fn is_correctable_set<I>(code: &StabilizerCode, errors: I) -> Result<bool>
where
    I: IntoIterator<Item = PauliOperator>,
{
    if code.k() != 1 {
        return Err(Error::UnsupportedK(code.k()));
    }
    let mut seen: HashMap<Syndrome, LogicalClass> = HashMap::new();
    for e in errors {
        let (s, class) = code.logical_class(&e)?;
        match seen.get(&s) {
            Some(&prior) if prior != class => return Ok(false),
            Some(_) => {}
            None => {
                seen.insert(s, class);
            }
        }
    }
    Ok(true)
}

/// Direct pairwise Knill-Laflamme check: no product `E_i E_j` may have zero
/// syndrome and a non-identity logical class.
pub fn is_correctable_set_pairwise(code: &StabilizerCode, errors: &[PauliOperator]) -> Result<bool> {
    if code.k() != 1 {
        return Err(Error::UnsupportedK(code.k()));
    }
    for (i, a) in errors.iter().enumerate() {
        for b in &errors[i..] {
            let product = a.multiply(b)?;
            if code.syndrome(&product)?.is_zero() && code.class_of_centralizer(&product) != Pauli::I {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub t: usize,
    pub m: usize,
    /// All patterns of `t` unlocated errors are correctable.
    pub unlocated_correctable: bool,
    /// For every set of `2m` locations, all patterns of those located errors
    /// plus `t - m` unlocated errors are correctable.
    pub located_correctable: bool,
    pub operators_checked: u128,
}

impl EquivalenceReport {
    pub fn equivalent(&self) -> bool {
        self.unlocated_correctable == self.located_correctable
    }
}

/// Total enumeration cost of [`verify_located_unlocated_equivalence`].
pub fn equivalence_enumeration_size(n: usize, t: usize, m: usize) -> u128 {
    let lhs = error_set_size(n, 0, t.min(n));
    let per_set = error_set_size(n, 2 * m, (t - m).min(n - 2 * m));
    lhs + binomial(n, 2 * m) * per_set
}

fn checked_correctable<I>(code: &StabilizerCode, errors: I, expected: u128) -> Result<bool>
where
    I: Iterator<Item = PauliOperator>,
{
    let mut count = 0u128;
    let verdict = is_correctable_set(code, errors.inspect(|_| count += 1))?;
    // An early exit stops the stream, so the count is only complete on success.
    if verdict {
        assert_eq!(count, expected, "enumerated error-set size differs from its closed form");
    }
    Ok(verdict)
}

/// Compares correctability of all `t`-weight unlocated patterns with
/// correctability of `2m` located plus `t - m` unlocated errors over every
/// choice of the `2m` locations. The two verdicts always agree for a valid
/// code.
pub fn verify_located_unlocated_equivalence(
    code: &StabilizerCode,
    t: usize,
    m: usize,
    cap: u128,
) -> Result<EquivalenceReport> {
    let n = code.n();
    if m > t {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds t = {t}")));
    }
    if 2 * m > n {
        return Err(Error::InvalidArgument(format!("2m = {} exceeds n = {n}", 2 * m)));
    }
    let requested = equivalence_enumeration_size(n, t, m);
    if requested > cap {
        return Err(Error::EnumerationCap { requested, cap });
    }

    let w_lhs = t.min(n);
    let unlocated_correctable = checked_correctable(
        code,
        enumerate_error_set(n, &LocatedSet::empty(), w_lhs)?,
        error_set_size(n, 0, w_lhs),
    )?;

    let w_rhs = (t - m).min(n - 2 * m);
    let expected = error_set_size(n, 2 * m, w_rhs);
    let mut located_correctable = true;
    for locations in Combinations::new(n, 2 * m) {
        let located = LocatedSet::new(locations, n)?;
        if !checked_correctable(code, enumerate_error_set(n, &located, w_rhs)?, expected)? {
            located_correctable = false;
            break;
        }
    }

    Ok(EquivalenceReport { t, m, unlocated_correctable, located_correctable, operators_checked: requested })
}

/// Lowest-weight operator (first in enumeration order) with zero syndrome in
/// logical class `class`. For `class = I` this is the identity.
pub fn min_weight_in_class(code: &StabilizerCode, class: LogicalClass) -> Result<PauliOperator> {
    if code.k() != 1 {
        return Err(Error::UnsupportedK(code.k()));
    }
    let n = code.n();
    for w in 0..=n {
        let found = enumerate_error_set(n, &LocatedSet::empty(), w)?
            .filter(|p| p.weight() == w)
            .find(|p| code.syndrome_unchecked(p).is_zero() && code.class_of_centralizer(p) == class);
        if let Some(p) = found {
            return Ok(p);
        }
    }
    unreachable!("every logical class has a representative")
}

/// A minimum-weight nontrivial logical operator; its weight is the distance.
pub fn min_weight_logical(code: &StabilizerCode) -> Result<PauliOperator> {
    let mut best: Option<PauliOperator> = None;
    for class in Pauli::NON_IDENTITY {
        let p = min_weight_in_class(code, class)?;
        if best.as_ref().is_none_or(|b| p.weight() < b.weight()) {
            best = Some(p);
        }
    }
    Ok(best.expect("three classes searched"))
}

pub fn distance(code: &StabilizerCode) -> Result<usize> {
    min_weight_logical(code).map(|p| p.weight())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stabilizer::{five_qubit_code, steane_code};

    fn located(ix: &[usize], n: usize) -> LocatedSet {
        LocatedSet::new(ix.to_vec(), n).unwrap()
    }

    #[test]
    fn error_set_cardinalities() {
        let count = |n, l: &LocatedSet, w| enumerate_error_set(n, l, w).unwrap().count() as u128;
        assert_eq!(count(5, &LocatedSet::empty(), 0), 1);
        assert_eq!(count(5, &LocatedSet::empty(), 1), 16);
        assert_eq!(count(5, &located(&[0, 1], 5), 0), 16);
        let set: Vec<_> = enumerate_error_set(5, &LocatedSet::empty(), 0).unwrap().collect();
        assert!(set[0].is_identity());
        for (n, l, w) in [(5, vec![], 2), (7, vec![2, 5], 1), (6, vec![0, 1, 2], 3)] {
            let l = located(&l, n);
            assert_eq!(count(n, &l, w), error_set_size(n, l.len(), w));
        }
        assert!(enumerate_error_set(5, &located(&[0, 1], 5), 4).is_err());
    }

    #[test]
    fn error_sets_have_no_duplicates() {
        let all: Vec<_> = enumerate_error_set(6, &located(&[1, 4], 6), 2).unwrap().collect();
        let unique: std::collections::HashSet<_> = all.iter().cloned().collect();
        assert_eq!(unique.len(), all.len());
        assert!(all.iter().all(|p| p.support().iter().filter(|&&q| q != 1 && q != 4).count() <= 2));
    }

    #[test]
    fn located_set_validation() {
        assert_eq!(located(&[3, 1, 3], 5).indices(), &[1, 3]);
        assert!(LocatedSet::new(vec![5], 5).is_err());
    }

    #[test]
    fn five_qubit_correctability() {
        let five = five_qubit_code();
        let t1: Vec<_> = enumerate_error_set(5, &LocatedSet::empty(), 1).unwrap().collect();
        assert!(is_correctable_set(&five, t1.clone()).unwrap());
        assert!(is_correctable_set_pairwise(&five, &t1).unwrap());
        let t2: Vec<_> = enumerate_error_set(5, &LocatedSet::empty(), 2).unwrap().collect();
        assert!(!is_correctable_set(&five, t2.clone()).unwrap());
        assert!(!is_correctable_set_pairwise(&five, &t2).unwrap());
        for pair in Combinations::new(5, 2) {
            let set: Vec<_> = enumerate_error_set(5, &located(&pair, 5), 0).unwrap().collect();
            assert!(is_correctable_set(&five, set.clone()).unwrap());
            assert!(is_correctable_set_pairwise(&five, &set).unwrap());
        }
    }

    #[test]
    fn equivalence_examples() {
        let five = five_qubit_code();
        let r = verify_located_unlocated_equivalence(&five, 1, 1, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(r.unlocated_correctable && r.located_correctable && r.equivalent());
        let r = verify_located_unlocated_equivalence(&five, 2, 1, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(!r.unlocated_correctable && !r.located_correctable && r.equivalent());
        let r = verify_located_unlocated_equivalence(&steane_code(), 1, 1, DEFAULT_ENUMERATION_CAP).unwrap();
        assert!(r.unlocated_correctable && r.equivalent());
    }

    #[test]
    fn equivalence_guards() {
        let five = five_qubit_code();
        assert!(matches!(
            verify_located_unlocated_equivalence(&five, 3, 3, DEFAULT_ENUMERATION_CAP),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            verify_located_unlocated_equivalence(&five, 1, 2, DEFAULT_ENUMERATION_CAP),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            verify_located_unlocated_equivalence(&five, 2, 1, 10),
            Err(Error::EnumerationCap { cap: 10, .. })
        ));
    }

    #[test]
    fn distances() {
        for code in [five_qubit_code(), steane_code()] {
            let l = min_weight_logical(&code).unwrap();
            assert_eq!(l.weight(), 3);
            let (s, class) = code.logical_class(&l).unwrap();
            assert!(s.is_zero());
            assert_ne!(class, Pauli::I);
            for c in Pauli::NON_IDENTITY {
                let rep = min_weight_in_class(&code, c).unwrap();
                assert_eq!(code.logical_class(&rep).unwrap(), (Syndrome(0), c));
                assert_eq!(rep.weight(), 3);
            }
        }
    }
}
