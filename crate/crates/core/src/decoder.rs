//! Maximum-likelihood message-passing decoder for concatenated `k = 1` codes.
//!
//! Decoding runs in the Pauli frame: the true error is known to the simulator,
//! syndromes are computed from it, and no quantum state is represented. Each
//! pass decodes every block of the current level independently; a block's
//! posterior over logical classes becomes the prior of one "qubit" at the next
//! level, and its true residual class becomes that qubit's error.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stabilizer::{LogicalClass, Pauli, PauliOperator, StabilizerCode};

/// Tolerance on `sum(p) = 1` at every normalization point.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Probability of each Pauli `[I, X, Y, Z]` on one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriorVector(pub [f64; 4]);

impl PriorVector {
    pub const UNIFORM: PriorVector = PriorVector([0.25; 4]);
    pub const NOISELESS: PriorVector = PriorVector([1.0, 0.0, 0.0, 0.0]);

    /// `[1 - p, p/3, p/3, p/3]`.
    pub fn depolarizing(p: f64) -> Self {
        PriorVector([1.0 - p, p / 3.0, p / 3.0, p / 3.0])
    }

    pub fn new(values: [f64; 4]) -> Result<Self> {
        let v = PriorVector(values);
        if values.iter().any(|&x| x.is_nan() || x < 0.0) || !v.is_normalized() {
            return Err(Error::InvalidArgument(format!("{values:?} is not a probability vector")));
        }
        Ok(v)
    }

    pub fn prob(&self, p: Pauli) -> f64 {
        self.0[p.index()]
    }

    pub fn is_normalized(&self) -> bool {
        (self.0.iter().sum::<f64>() - 1.0).abs() <= NORMALIZATION_TOLERANCE
    }

    /// Argmax with ties resolved in the order `I, X, Y, Z`.
    pub fn argmax(&self) -> LogicalClass {
        let mut best = 0;
        for i in 1..4 {
            if self.0[i] > self.0[best] {
                best = i;
            }
        }
        Pauli::from_index(best)
    }
}

/// The logical operation applied as the final correction.
pub fn final_decision(posterior: &PriorVector) -> LogicalClass {
    posterior.argmax()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockOutcome {
    /// True logical class of the block's error times its recovery.
    pub effective_class: LogicalClass,
    pub posterior: PriorVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeOutcome {
    pub chosen: LogicalClass,
    pub residual: LogicalClass,
    pub success: bool,
}

/// Per-block decoding tables derived from a base code.
///
/// For syndrome `s` and class `c`, `cosets[s][c]` lists, for every stabilizer
/// `M`, the single-qubit Paulis of `R_s L_c M`.
#[derive(Debug, Clone)]
pub struct BlockDecoder {
    code: StabilizerCode,
    block: usize,
    group_size: usize,
    /// `[syndrome][class][stabilizer * block + qubit]`, stored as Pauli indices.
    cosets: Vec<[Vec<u8>; 4]>,
}

impl BlockDecoder {
    pub fn new(code: &StabilizerCode) -> Result<Self> {
        if code.k() != 1 {
            return Err(Error::UnsupportedK(code.k()));
        }
        let group = code.stabilizer_group();
        let logicals: Vec<PauliOperator> =
            Pauli::ALL.iter().map(|&c| code.logical_representative(c)).collect::<Result<_>>()?;
        let cosets = code
            .recovery_table()
            .iter()
            .map(|r| {
                let mut per_class: [Vec<u8>; 4] = Default::default();
                for (c, l) in logicals.iter().enumerate() {
                    let base = r.mul_unchecked(l);
                    per_class[c] = group
                        .iter()
                        .flat_map(|m| base.mul_unchecked(m).paulis().map(|p| p as u8).collect::<Vec<_>>())
                        .collect();
                }
                per_class
            })
            .collect();
        Ok(Self { code: code.clone(), block: code.n(), group_size: group.len(), cosets })
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    fn syndrome_of(&self, errors: &[Pauli]) -> usize {
        let mut s = 0usize;
        for (i, g) in self.code.generators().iter().enumerate() {
            let anti = errors.iter().enumerate().fold(false, |acc, (q, e)| acc ^ e.anticommutes(g.get(q)));
            s |= (anti as usize) << i;
        }
        s
    }

    fn residual_class(&self, errors: &[Pauli], s: usize) -> LogicalClass {
        let recovery = &self.code.recovery_table()[s];
        let lx = &self.code.logical_x()[0];
        let lz = &self.code.logical_z()[0];
        let (mut anti_z, mut anti_x) = (false, false);
        for (q, &e) in errors.iter().enumerate() {
            let g = e * recovery.get(q);
            anti_z ^= g.anticommutes(lz.get(q));
            anti_x ^= g.anticommutes(lx.get(q));
        }
        Pauli::from_bits(anti_z, anti_x)
    }

    /// Decodes one block given per-qubit priors and the true per-qubit errors.
    pub fn decode_block(&self, priors: &[PriorVector], errors: &[Pauli]) -> Result<BlockOutcome> {
        if priors.len() != self.block || errors.len() != self.block {
            return Err(Error::SizeMismatch { expected: self.block, actual: priors.len().min(errors.len()) });
        }
        let s = self.syndrome_of(errors);
        let effective_class = self.residual_class(errors, s);

        let mut mass = [0.0f64; 4];
        for (c, coset) in self.cosets[s].iter().enumerate() {
            let mut total = 0.0;
            for element in coset.chunks_exact(self.block) {
                let mut prod = 1.0;
                for (prior, &p) in priors.iter().zip(element) {
                    prod *= prior.0[p as usize];
                }
                total += prod;
            }
            mass[c] = total;
        }
        let norm: f64 = mass.iter().sum();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::Contradiction);
        }
        let posterior = PriorVector(mass.map(|m| m / norm));
        debug_assert!(posterior.is_normalized());
        Ok(BlockOutcome { effective_class, posterior })
    }

    /// Number of stabilizer elements summed per class.
    pub fn group_size(&self) -> usize {
        self.group_size
    }
}

/// Free-function form of [`BlockDecoder::decode_block`].
pub fn block_decode(base: &StabilizerCode, priors: &[PriorVector], true_error: &[Pauli]) -> Result<BlockOutcome> {
    BlockDecoder::new(base)?.decode_block(priors, true_error)
}

/// `levels`-fold concatenation of a `k = 1` base code.
#[derive(Debug, Clone)]
pub struct ConcatenatedCode {
    decoder: BlockDecoder,
    levels: u32,
    n: usize,
}

impl ConcatenatedCode {
    pub fn new(base: &StabilizerCode, levels: u32) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidArgument("concatenation needs at least one level".into()));
        }
        let n = base
            .n()
            .checked_pow(levels)
            .ok_or_else(|| Error::InvalidArgument(format!("{}^{levels} qubits overflows", base.n())))?;
        Ok(Self { decoder: BlockDecoder::new(base)?, levels, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn base(&self) -> &StabilizerCode {
        self.decoder.code()
    }

    pub fn block_decoder(&self) -> &BlockDecoder {
        &self.decoder
    }

    /// Runs all passes, decoding blocks of a pass on the current rayon pool.
    /// The result does not depend on the pool size.
    pub fn decode(&self, priors: &[PriorVector], true_error: &[Pauli]) -> Result<DecodeOutcome> {
        self.decode_with(priors, true_error, true)
    }

    pub fn decode_serial(&self, priors: &[PriorVector], true_error: &[Pauli]) -> Result<DecodeOutcome> {
        self.decode_with(priors, true_error, false)
    }

    fn decode_with(&self, priors: &[PriorVector], true_error: &[Pauli], parallel: bool) -> Result<DecodeOutcome> {
        if priors.len() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, actual: priors.len() });
        }
        if true_error.len() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, actual: true_error.len() });
        }
        let b = self.decoder.block;
        let mut outcomes = self.pass(priors, true_error, parallel)?;
        while outcomes.len() > 1 {
            let priors: Vec<PriorVector> = outcomes.iter().map(|o| o.posterior).collect();
            let errors: Vec<Pauli> = outcomes.iter().map(|o| o.effective_class).collect();
            debug_assert_eq!(priors.len() % b, 0);
            outcomes = self.pass(&priors, &errors, parallel)?;
        }
        let top = outcomes[0];
        let chosen = final_decision(&top.posterior);
        Ok(DecodeOutcome { chosen, residual: top.effective_class, success: chosen == top.effective_class })
    }

    fn pass(&self, priors: &[PriorVector], errors: &[Pauli], parallel: bool) -> Result<Vec<BlockOutcome>> {
        let b = self.decoder.block;
        // Small passes are not worth the scheduling overhead.
        if parallel && priors.len() >= 4096 {
            priors
                .par_chunks(b)
                .zip(errors.par_chunks(b))
                .map(|(p, e)| self.decoder.decode_block(p, e))
                .collect()
        } else {
            priors.chunks(b).zip(errors.chunks(b)).map(|(p, e)| self.decoder.decode_block(p, e)).collect()
        }
    }

    /// A nontrivial logical operator of the concatenated code whose weight is
    /// the product of the base-code minimum weights: each non-identity letter
    /// of a level's logical is replaced by a minimum-weight representative of
    /// that class on the corresponding sub-block.
    pub fn min_weight_logical(&self) -> Result<Vec<Pauli>> {
        let base = self.base();
        let reps: Vec<PauliOperator> = Pauli::ALL
            .iter()
            .map(|&c| crate::stabilizer::min_weight_in_class(base, c))
            .collect::<Result<_>>()?;
        let top = crate::stabilizer::min_weight_logical(base)?;
        let mut current: Vec<Pauli> = top.paulis().collect();
        for _ in 1..self.levels {
            current = current.iter().flat_map(|&c| reps[c.index()].paulis().collect::<Vec<_>>()).collect();
        }
        Ok(current)
    }
}
