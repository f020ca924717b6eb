use std::fmt;

use serde::{Deserialize, Serialize};

use super::pauli::{LogicalClass, Pauli, PauliOperator};
use crate::error::{Error, Result};

/// Recovery tables are dense over all `2^(n-k)` syndromes.
pub const MAX_SYNDROME_BITS: usize = 20;

/// Minimum-weight recovery tables are found by scanning all `4^n` Paulis.
pub const MAX_TABLE_SEARCH_QUBITS: usize = 12;

/// Generator commutation outcomes; bit `i` is set iff the error anticommutes
/// with generator `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Syndrome(pub u64);

impl Syndrome {
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn bit(self, i: usize) -> bool {
        (self.0 >> i) & 1 == 1
    }

    pub fn to_bits(self, len: usize) -> Vec<bool> {
        (0..len).map(|i| self.bit(i)).collect()
    }
}

impl std::ops::BitXor for Syndrome {
    type Output = Syndrome;

    fn bitxor(self, rhs: Self) -> Self {
        Syndrome(self.0 ^ rhs.0)
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#x}", self.0)
    }
}

/// An `[[n, k]]` stabilizer code with a syndrome-indexed recovery table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    generators: Vec<PauliOperator>,
    logical_x: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
    recovery_table: Vec<PauliOperator>,
}

/// Serialized form used for golden files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilizerCodeJson {
    pub n: usize,
    pub k: usize,
    pub generators: Vec<PauliOperator>,
    pub logical_x: Vec<PauliOperator>,
    pub logical_z: Vec<PauliOperator>,
    /// Entry `s` is the recovery for syndrome value `s`.
    pub recovery_table: Vec<PauliOperator>,
}

fn parse_all(ops: &[&str]) -> Vec<PauliOperator> {
    ops.iter().map(|s| s.parse().expect("built-in operator strings are valid")).collect()
}

/// `[[5,1,3]]` perfect code, cyclic `XZZXI` presentation.
pub fn five_qubit_code() -> StabilizerCode {
    StabilizerCode::new(
        parse_all(&["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]),
        parse_all(&["XXXXX"]),
        parse_all(&["ZZZZZ"]),
    )
    .expect("five-qubit code is valid")
}

/// `[[7,1,3]]` Steane code from the `[7,4]` Hamming parity checks.
pub fn steane_code() -> StabilizerCode {
    StabilizerCode::new(
        parse_all(&["IIIXXXX", "IXXIIXX", "XIXIXIX", "IIIZZZZ", "IZZIIZZ", "ZIZIZIZ"]),
        parse_all(&["XXXXXXX"]),
        parse_all(&["ZZZZZZZ"]),
    )
    .expect("Steane code is valid")
}

/// GF(2) rank of operators viewed as `2n`-bit symplectic vectors.
fn symplectic_rank(ops: &[PauliOperator]) -> usize {
    let mut rows: Vec<Vec<bool>> = ops
        .iter()
        .map(|p| {
            let mut v = p.x_bits();
            v.extend(p.z_bits());
            v
        })
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] {
                for (a, b) in row.iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

impl StabilizerCode {
    /// Builds a code and fills its recovery table with a minimum-weight Pauli
    /// per syndrome, ties broken by [`PauliOperator::cmp_lex`].
    pub fn new(
        generators: Vec<PauliOperator>,
        logical_x: Vec<PauliOperator>,
        logical_z: Vec<PauliOperator>,
    ) -> Result<Self> {
        let mut code = Self::unchecked_without_table(generators, logical_x, logical_z)?;
        if code.n > MAX_TABLE_SEARCH_QUBITS {
            return Err(Error::InvalidStabilizerCode(format!(
                "minimum-weight table search limited to n <= {MAX_TABLE_SEARCH_QUBITS}"
            )));
        }
        code.recovery_table = code.min_weight_table();
        Ok(code)
    }

    fn unchecked_without_table(
        generators: Vec<PauliOperator>,
        logical_x: Vec<PauliOperator>,
        logical_z: Vec<PauliOperator>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidStabilizerCode(msg));
        let Some(first) = generators.first().or(logical_x.first()) else {
            return invalid("code has no operators".into());
        };
        let n = first.num_qubits();
        let k = logical_x.len();
        if logical_z.len() != k {
            return invalid(format!("{k} logical X but {} logical Z operators", logical_z.len()));
        }
        if generators.len() + k != n {
            return invalid(format!("{} generators for n = {n}, k = {k}", generators.len()));
        }
        if generators.len() > MAX_SYNDROME_BITS {
            return invalid(format!("more than {MAX_SYNDROME_BITS} generators"));
        }
        for p in generators.iter().chain(&logical_x).chain(&logical_z) {
            if p.num_qubits() != n {
                return Err(Error::SizeMismatch { expected: n, actual: p.num_qubits() });
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if a.anticommutes_unchecked(b) {
                    return invalid(format!("generators {a} and {b} anticommute"));
                }
            }
        }
        if symplectic_rank(&generators) != generators.len() {
            return invalid("generators are not independent".into());
        }
        for l in logical_x.iter().chain(&logical_z) {
            if let Some(g) = generators.iter().find(|g| l.anticommutes_unchecked(g)) {
                return invalid(format!("logical {l} anticommutes with generator {g}"));
            }
        }
        for i in 0..k {
            for j in 0..k {
                let anti = logical_x[i].anticommutes_unchecked(&logical_z[j]);
                if anti != (i == j) {
                    return invalid(format!("logical X{i} / Z{j} commutation is wrong"));
                }
                if i != j
                    && (logical_x[i].anticommutes_unchecked(&logical_x[j])
                        || logical_z[i].anticommutes_unchecked(&logical_z[j]))
                {
                    return invalid(format!("logicals {i} and {j} anticommute"));
                }
            }
        }
        Ok(Self { n, k, generators, logical_x, logical_z, recovery_table: Vec::new() })
    }

    fn min_weight_table(&self) -> Vec<PauliOperator> {
        let mut table: Vec<Option<PauliOperator>> = vec![None; 1 << self.generators.len()];
        let total = 1usize << (2 * self.n);
        for code in 0..total {
            let letters: Vec<Pauli> = (0..self.n).map(|i| Pauli::from_index(code >> (2 * i))).collect();
            let p = PauliOperator::from_paulis(&letters);
            let s = self.syndrome_unchecked(&p).0 as usize;
            let better = match &table[s] {
                None => true,
                Some(best) => p.weight().cmp(&best.weight()).then_with(|| p.cmp_lex(best)).is_lt(),
            };
            if better {
                table[s] = Some(p);
            }
        }
        table.into_iter().map(|p| p.expect("every syndrome is attained")).collect()
    }

    /// Replaces the recovery table; entry `s` must have syndrome `s` and entry
    /// 0 must be the identity.
    pub fn with_recovery_table(mut self, table: Vec<PauliOperator>) -> Result<Self> {
        if table.len() != 1 << self.generators.len() {
            return Err(Error::InvalidStabilizerCode(format!(
                "recovery table has {} entries, expected {}",
                table.len(),
                1usize << self.generators.len()
            )));
        }
        for (s, r) in table.iter().enumerate() {
            if r.num_qubits() != self.n {
                return Err(Error::SizeMismatch { expected: self.n, actual: r.num_qubits() });
            }
            if self.syndrome_unchecked(r).0 as usize != s {
                return Err(Error::InvalidStabilizerCode(format!("recovery {r} does not have syndrome {s}")));
            }
        }
        if !table[0].is_identity() {
            return Err(Error::InvalidStabilizerCode("recovery for the zero syndrome must be identity".into()));
        }
        self.recovery_table = table;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn logical_x(&self) -> &[PauliOperator] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliOperator] {
        &self.logical_z
    }

    pub fn recovery_table(&self) -> &[PauliOperator] {
        &self.recovery_table
    }

    pub fn num_syndromes(&self) -> usize {
        1 << self.generators.len()
    }

    pub fn recovery(&self, s: Syndrome) -> &PauliOperator {
        &self.recovery_table[s.0 as usize]
    }

    fn check_size(&self, e: &PauliOperator) -> Result<()> {
        if e.num_qubits() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, actual: e.num_qubits() });
        }
        Ok(())
    }

    pub(crate) fn syndrome_unchecked(&self, e: &PauliOperator) -> Syndrome {
        let mut s = 0u64;
        for (i, g) in self.generators.iter().enumerate() {
            s |= (e.anticommutes_unchecked(g) as u64) << i;
        }
        Syndrome(s)
    }

    pub fn syndrome(&self, e: &PauliOperator) -> Result<Syndrome> {
        self.check_size(e)?;
        Ok(self.syndrome_unchecked(e))
    }

    /// Class of a zero-syndrome operator `g` by its commutation with the
    /// logical operators.
    pub(crate) fn class_of_centralizer(&self, g: &PauliOperator) -> LogicalClass {
        Pauli::from_bits(
            g.anticommutes_unchecked(&self.logical_z[0]),
            g.anticommutes_unchecked(&self.logical_x[0]),
        )
    }

    /// Syndrome of `e` and the logical class of `e` times the table recovery.
    pub fn logical_class(&self, e: &PauliOperator) -> Result<(Syndrome, LogicalClass)> {
        if self.k != 1 {
            return Err(Error::UnsupportedK(self.k));
        }
        self.check_size(e)?;
        let s = self.syndrome_unchecked(e);
        let g = e.mul_unchecked(self.recovery(s));
        Ok((s, self.class_of_centralizer(&g)))
    }

    /// Representative of logical class `c` (`k = 1`): `I`, `X̄`, `X̄Z̄`, `Z̄`.
    pub fn logical_representative(&self, c: LogicalClass) -> Result<PauliOperator> {
        if self.k != 1 {
            return Err(Error::UnsupportedK(self.k));
        }
        let mut out = PauliOperator::identity(self.n);
        if c.x_bit() {
            out = out.mul_unchecked(&self.logical_x[0]);
        }
        if c.z_bit() {
            out = out.mul_unchecked(&self.logical_z[0]);
        }
        Ok(out)
    }

    /// All `2^(n-k)` stabilizer group elements, indexed by generator subset.
    pub fn stabilizer_group(&self) -> Vec<PauliOperator> {
        let m = self.generators.len();
        (0..1usize << m)
            .map(|mask| {
                self.generators
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| (mask >> i) & 1 == 1)
                    .fold(PauliOperator::identity(self.n), |acc, (_, g)| acc.mul_unchecked(g))
            })
            .collect()
    }

    pub fn to_json_value(&self) -> StabilizerCodeJson {
        StabilizerCodeJson {
            n: self.n,
            k: self.k,
            generators: self.generators.clone(),
            logical_x: self.logical_x.clone(),
            logical_z: self.logical_z.clone(),
            recovery_table: self.recovery_table.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("code serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: StabilizerCodeJson =
            serde_json::from_str(s).map_err(|e| Error::InvalidStabilizerCode(e.to_string()))?;
        let code = Self::unchecked_without_table(raw.generators, raw.logical_x, raw.logical_z)?;
        if code.n != raw.n || code.k != raw.k {
            return Err(Error::InvalidStabilizerCode("declared n/k do not match operators".into()));
        }
        code.with_recovery_table(raw.recovery_table)
    }
}
