//! Correctability bounds for nondegenerate codes under a mix of located
//! (erasure) and unlocated (depolarizing) errors.
//!
//! Three discrete bounds are provided:
//!
//! * the quantum Hamming bound, `sum_{i<=t} C(n,i) 3^i 2^k <= 2^n`;
//! * the generalized bound, `4^{t_l} sum_{i<=t_u} C(n-t_l,i) 3^i 2^k <= 2^n`;
//! * the tighter bound, the Hamming bound at `t = t_u + floor(t_l/2)`.
//!
//! Counting sums are evaluated with exact big integers for `n <= 64` and in
//! the base-2 log domain (log-gamma binomials) above that. Log-domain results
//! that land within [`GUARD_BAND_BITS`] of equality are re-checked exactly when
//! `n <= EXACT_FALLBACK_MAX_N`, and are flagged otherwise.
//!
//! The large-`n` limit of the generalized bound is the coherent-information
//! condition `I(p, q) >= r`; see [`coherent_information`] and
//! [`asymptotic_boundary`].

use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `n` for which exact big-integer evaluation is the primary path.
pub const EXACT_MAX_N: usize = 64;

/// Half-width (in bits) of the band around `log2(LHS) = n` where the
/// log-domain verdict is not trusted.
pub const GUARD_BAND_BITS: f64 = 1e-6;

/// Largest `n` for which a guard-band hit is re-evaluated exactly.
pub const EXACT_FALLBACK_MAX_N: usize = 8192;

/// Terms more than this many nats below the peak are dropped from log sums.
const LOG_SUM_CUTOFF_NATS: f64 = 80.0;

const LOG2_3: f64 = 1.584_962_500_721_156_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
}

impl CodeParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n == 0 || k > n {
            return Err(Error::InvalidCode { n, k });
        }
        Ok(Self { n, k })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ErrorWeights {
    /// Unlocated error count.
    pub t_u: usize,
    /// Located error count.
    pub t_l: usize,
}

impl ErrorWeights {
    pub fn new(t_u: usize, t_l: usize) -> Self {
        Self { t_u, t_l }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.t_l > n || self.t_u > n - self.t_l {
            return Err(Error::InvalidWeights { n, t_u: self.t_u, t_l: self.t_l });
        }
        Ok(())
    }

    /// Rate coordinates `(p, q)` with `p = t_u / (n - t_l)` and `q = t_l / n`.
    /// When every qubit is located, `p` is reported as 0.
    pub fn to_rates(&self, n: usize) -> (f64, f64) {
        let q = self.t_l as f64 / n as f64;
        let rest = n - self.t_l;
        let p = if rest == 0 { 0.0 } else { self.t_u as f64 / rest as f64 };
        (p, q)
    }
}

/// Asymptotic noise parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRates {
    /// Unlocated depolarizing rate, `t_u / (n - t_l)`.
    pub p: f64,
    /// Located rate, `t_l / n`.
    pub q: f64,
    /// Code rate, `k / n`.
    pub r: f64,
}

impl ErrorRates {
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        check_unit("p", p)?;
        check_unit("q", q)?;
        check_unit("r", r)?;
        Ok(Self { p, q, r })
    }
}

fn check_unit(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::RateOutOfRange { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    /// Quantum Hamming bound on `t_u`; says nothing about located errors, so
    /// only `t_l = 0` can satisfy it.
    Original,
    Generalized,
    Tighter,
    /// Conjunction of generalized and tighter.
    Combined,
}

impl std::str::FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" => Ok(Self::Original),
            "generalized" => Ok(Self::Generalized),
            "tighter" => Ok(Self::Tighter),
            "combined" => Ok(Self::Combined),
            other => Err(Error::InvalidArgument(format!("unknown bound kind {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Arithmetic {
    Exact,
    LogDomain,
}

/// Outcome of evaluating one counting inequality.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub holds: bool,
    /// `log2(LHS) - n`; non-positive exactly when the bound holds.
    pub margin_bits: f64,
    /// Arithmetic that decided `holds`.
    pub arithmetic: Arithmetic,
    /// Set when the verdict came from log-domain arithmetic inside the guard
    /// band and could not be confirmed exactly.
    pub unconfirmed: bool,
}

/// Exact evaluation of `4^{t_l} sum_{i<=t_u} C(n-t_l,i) 3^i 2^k`.
pub fn counting_lhs_exact(n: usize, k: usize, t_u: usize, t_l: usize) -> BigUint {
    let m = n - t_l;
    let mut term = BigUint::one();
    let mut sum = BigUint::zero();
    for i in 0..=t_u {
        if i > 0 {
            // term_i = C(m,i) 3^i, built from term_{i-1} with an exact division.
            term = term * 3u32 * (m - i + 1) / i;
        }
        sum += &term;
    }
    sum << (2 * t_l + k)
}

/// Exact verdict for the generalized counting inequality.
pub fn counting_holds_exact(n: usize, k: usize, t_u: usize, t_l: usize) -> bool {
    counting_lhs_exact(n, k, t_u, t_l) <= (BigUint::one() << n)
}

fn ln_choose(m: usize, i: usize) -> f64 {
    libm::lgamma(m as f64 + 1.0) - libm::lgamma(i as f64 + 1.0) - libm::lgamma((m - i) as f64 + 1.0)
}

/// Natural log of `sum_{i<=t} C(m,i) 3^i`, summed outward from the largest term.
fn ln_hamming_sum(m: usize, t: usize) -> f64 {
    let ln3 = 3f64.ln();
    let ln_term = |i: usize| ln_choose(m, i) + i as f64 * ln3;

    // Terms increase while i < (3m - 1) / 4.
    let mut peak = ((3 * m) / 4).min(t);
    for candidate in [peak.saturating_sub(1), (peak + 1).min(t)] {
        if ln_term(candidate) > ln_term(peak) {
            peak = candidate;
        }
    }
    let top = ln_term(peak);

    let mut acc = 1.0;
    let mut i = peak;
    while i > 0 {
        i -= 1;
        let d = ln_term(i) - top;
        if d < -LOG_SUM_CUTOFF_NATS {
            break;
        }
        acc += d.exp();
    }
    let mut i = peak;
    while i < t {
        i += 1;
        let d = ln_term(i) - top;
        if d < -LOG_SUM_CUTOFF_NATS {
            break;
        }
        acc += d.exp();
    }
    top + acc.ln()
}

/// `log2(LHS) - n` for the generalized counting inequality, computed in the log
/// domain.
pub fn counting_margin_log2(n: usize, k: usize, t_u: usize, t_l: usize) -> f64 {
    let m = n - t_l;
    let log2_sum = ln_hamming_sum(m, t_u) / std::f64::consts::LN_2;
    (2 * t_l + k) as f64 + log2_sum - n as f64
}

fn big_log2(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().map(f64::log2).unwrap_or(f64::INFINITY);
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap_or(f64::INFINITY);
    top.log2() + shift as f64
}

fn evaluate_counting(n: usize, k: usize, t_u: usize, t_l: usize) -> BoundCheck {
    if n <= EXACT_MAX_N {
        let lhs = counting_lhs_exact(n, k, t_u, t_l);
        let holds = lhs <= (BigUint::one() << n);
        return BoundCheck {
            holds,
            margin_bits: big_log2(&lhs) - n as f64,
            arithmetic: Arithmetic::Exact,
            unconfirmed: false,
        };
    }
    let margin_bits = counting_margin_log2(n, k, t_u, t_l);
    if margin_bits.abs() >= GUARD_BAND_BITS {
        return BoundCheck {
            holds: margin_bits <= 0.0,
            margin_bits,
            arithmetic: Arithmetic::LogDomain,
            unconfirmed: false,
        };
    }
    if n <= EXACT_FALLBACK_MAX_N {
        BoundCheck {
            holds: counting_holds_exact(n, k, t_u, t_l),
            margin_bits,
            arithmetic: Arithmetic::Exact,
            unconfirmed: false,
        }
    } else {
        BoundCheck {
            holds: margin_bits <= 0.0,
            margin_bits,
            arithmetic: Arithmetic::LogDomain,
            unconfirmed: true,
        }
    }
}

/// Quantum Hamming bound for `t` unlocated errors.
pub fn check_hamming(params: CodeParams, t: usize) -> Result<BoundCheck> {
    if t > params.n {
        return Err(Error::InvalidWeights { n: params.n, t_u: t, t_l: 0 });
    }
    Ok(evaluate_counting(params.n, params.k, t, 0))
}

pub fn check_generalized(params: CodeParams, w: ErrorWeights) -> Result<BoundCheck> {
    w.validate(params.n)?;
    Ok(evaluate_counting(params.n, params.k, w.t_u, w.t_l))
}

pub fn check_tighter(params: CodeParams, w: ErrorWeights) -> Result<BoundCheck> {
    w.validate(params.n)?;
    check_hamming(params, w.t_u + w.t_l / 2)
}

pub fn satisfies_hamming(params: CodeParams, t: usize) -> Result<bool> {
    check_hamming(params, t).map(|c| c.holds)
}

pub fn satisfies_generalized(params: CodeParams, w: ErrorWeights) -> Result<bool> {
    check_generalized(params, w).map(|c| c.holds)
}

pub fn satisfies_tighter(params: CodeParams, w: ErrorWeights) -> Result<bool> {
    check_tighter(params, w).map(|c| c.holds)
}

pub fn satisfies(params: CodeParams, w: ErrorWeights, kind: BoundKind) -> Result<bool> {
    w.validate(params.n)?;
    match kind {
        BoundKind::Original => Ok(w.t_l == 0 && satisfies_hamming(params, w.t_u)?),
        BoundKind::Generalized => satisfies_generalized(params, w),
        BoundKind::Tighter => satisfies_tighter(params, w),
        BoundKind::Combined => {
            Ok(satisfies_generalized(params, w)? && satisfies_tighter(params, w)?)
        }
    }
}

/// Largest `t` in `[0, hi]` with `pred(t)`, assuming `pred` is downward closed.
fn largest_satisfying(hi: usize, mut pred: impl FnMut(usize) -> Result<bool>) -> Result<Option<usize>> {
    if !pred(0)? {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0, hi);
    while lo < hi {
        let mid = lo + (hi - lo).div_ceil(2);
        if pred(mid)? {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    Ok(Some(lo))
}

/// Largest `t_l` such that `(t_u, t_l)` satisfies `kind`; `None` if even
/// `t_l = 0` fails.
pub fn max_correctable_located(params: CodeParams, t_u: usize, kind: BoundKind) -> Result<Option<usize>> {
    if t_u > params.n {
        return Err(Error::InvalidWeights { n: params.n, t_u, t_l: 0 });
    }
    largest_satisfying(params.n - t_u, |t_l| satisfies(params, ErrorWeights::new(t_u, t_l), kind))
}

/// Largest `t_u` such that `(t_u, t_l)` satisfies `kind`; `None` if even
/// `t_u = 0` fails.
pub fn max_correctable_unlocated(params: CodeParams, t_l: usize, kind: BoundKind) -> Result<Option<usize>> {
    if t_l > params.n {
        return Err(Error::InvalidWeights { n: params.n, t_u: 0, t_l });
    }
    largest_satisfying(params.n - t_l, |t_u| satisfies(params, ErrorWeights::new(t_u, t_l), kind))
}

/// Boundary of a bound's feasible region: for each `t_u` from 0, the largest
/// admissible `t_l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionCurve {
    pub points: Vec<(usize, usize)>,
}

impl RegionCurve {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_u,max_t_l\n");
        for (t_u, t_l) in &self.points {
            let _ = writeln!(out, "{t_u},{t_l}");
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.points).expect("integer pairs always serialize")
    }

    /// Boundary points in `(p, q)` rate coordinates.
    pub fn to_rates(&self, n: usize) -> Vec<(f64, f64)> {
        self.points.iter().map(|&(t_u, t_l)| ErrorWeights::new(t_u, t_l).to_rates(n)).collect()
    }
}

pub fn bound_region(params: CodeParams, kind: BoundKind) -> Result<RegionCurve> {
    let mut points = Vec::new();
    for t_u in 0..=params.n {
        match max_correctable_located(params, t_u, kind)? {
            Some(t_l) => points.push((t_u, t_l)),
            None => break,
        }
    }
    Ok(RegionCurve { points })
}

/// The boundary sampled at `t_u = 0, step, 2 step, ...` plus its last point,
/// for overlays at block lengths where the full curve is too costly.
pub fn bound_region_strided(params: CodeParams, kind: BoundKind, step: usize) -> Result<RegionCurve> {
    if step == 0 {
        return Err(Error::InvalidArgument("stride must be positive".into()));
    }
    if step == 1 {
        return bound_region(params, kind);
    }
    let last = match max_correctable_unlocated(params, 0, kind)? {
        Some(t) => t,
        None => return Ok(RegionCurve { points: Vec::new() }),
    };
    let mut points = Vec::new();
    let mut t_u = 0;
    loop {
        let t_u_here = t_u.min(last);
        if let Some(t_l) = max_correctable_located(params, t_u_here, kind)? {
            points.push((t_u_here, t_l));
        }
        if t_u_here == last {
            break;
        }
        t_u += step;
    }
    Ok(RegionCurve { points })
}

/// `x log2 x` with the continuous extension `0 log 0 = 0`.
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// Shannon entropy in bits.
pub fn shannon_entropy(dist: &[f64]) -> f64 {
    -dist.iter().map(|&x| xlog2x(x)).sum::<f64>()
}

fn check_pq(p: f64, q: f64) -> Result<()> {
    check_unit("p", p)?;
    check_unit("q", q)
}

/// Closed-form coherent information of the maximally mixed qubit sent through
/// the combined located/unlocated depolarizing channel.
pub fn coherent_information(p: f64, q: f64) -> Result<f64> {
    check_pq(p, q)?;
    Ok(1.0 + (1.0 - q) * (xlog2x(1.0 - p) + xlog2x(p)) - p * (1.0 - q) * LOG2_3 - 2.0 * q)
}

/// Coherent information as the output entropy minus the joint
/// system/reference entropy, each computed as a Shannon entropy.
pub fn coherent_information_from_entropies(p: f64, q: f64) -> Result<f64> {
    check_pq(p, q)?;
    // Channel output: maximally mixed qubit, tensored with the located flag.
    let output = [(1.0 - q) / 2.0, (1.0 - q) / 2.0, q / 2.0, q / 2.0];
    // Joint output with the reference: Bell-basis weights, split by flag.
    let u = (1.0 - q) * p / 3.0;
    let joint = [(1.0 - q) * (1.0 - p), u, u, u, q / 4.0, q / 4.0, q / 4.0, q / 4.0];
    Ok(shannon_entropy(&output) - shannon_entropy(&joint))
}

/// Per-qubit form of the generalized bound's log after Stirling's
/// approximation; the bound holds asymptotically iff the result is `<= 0`.
pub fn asymptotic_margin(rates: ErrorRates) -> f64 {
    let ErrorRates { p, q, r } = rates;
    2.0 * q - (1.0 - q) * xlog2x(p) + p * (1.0 - q) * LOG2_3 - (1.0 - q) * xlog2x(1.0 - p) - 1.0 + r
}

/// Largest unlocated rate `p` with `I(p, q) >= r`, by bisection on `[0, 3/4]`
/// where `I` is decreasing in `p`. `None` when `p = 0` already fails.
pub fn asymptotic_boundary(q: f64, r: f64) -> Result<Option<f64>> {
    check_unit("q", q)?;
    check_unit("r", r)?;
    let info = |p: f64| coherent_information(p, q).expect("p stays in [0, 3/4]");
    if info(0.0) < r {
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0f64, 0.75f64);
    if info(hi) >= r {
        return Ok(Some(hi));
    }
    // Run to f64 resolution; this is well inside the 1e-9 contract.
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if info(mid) >= r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(Some(lo))
}

/// `(q, p_boundary)` rows over `q = 0, step, 2 step, ... <= 1`.
pub fn asymptotic_curve(r: f64, q_step: f64) -> Result<Vec<(f64, Option<f64>)>> {
    if !(q_step > 0.0 && q_step <= 1.0) {
        return Err(Error::InvalidArgument(format!("q step {q_step} must lie in (0, 1]")));
    }
    let count = (1.0 / q_step + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| {
            let q = (i as f64 * q_step).min(1.0);
            asymptotic_boundary(q, r).map(|p| (q, p))
        })
        .collect()
}

pub fn asymptotic_curve_csv(rows: &[(f64, Option<f64>)]) -> String {
    let mut out = String::from("q,p_boundary\n");
    for (q, p) in rows {
        match p {
            Some(p) => {
                let _ = writeln!(out, "{q:.6},{p:.12}");
            }
            None => {
                let _ = writeln!(out, "{q:.6},");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, k: usize) -> CodeParams {
        CodeParams::new(n, k).unwrap()
    }

    // Largest t with the Hamming bound, k = 1, from an independent big-integer
    // evaluation.
    const HAMMING_TMAX_K1: [(usize, usize); 6] = [(5, 1), (10, 2), (20, 4), (30, 6), (40, 8), (50, 9)];

    const P_STAR: f64 = 0.189_289_624_915_231_76;

    #[test]
    fn hamming_small_cases() {
        let c = check_hamming(params(5, 1), 1).unwrap();
        assert!(c.holds);
        assert_eq!(counting_lhs_exact(5, 1, 1, 0), BigUint::from(32u32));
        assert_eq!(c.margin_bits, 0.0);
        assert!(!satisfies_hamming(params(5, 1), 2).unwrap());
        assert_eq!(counting_lhs_exact(5, 1, 2, 0), BigUint::from(212u32));
        assert!(satisfies_hamming(params(5, 5), 0).unwrap());
        assert_eq!(counting_lhs_exact(5, 5, 0, 0), BigUint::from(32u32));
        assert!(matches!(satisfies_hamming(params(5, 1), 6), Err(Error::InvalidWeights { .. })));
    }

    #[test]
    fn code_params_rejects_bad_shapes() {
        assert!(CodeParams::new(0, 0).is_err());
        assert!(CodeParams::new(3, 4).is_err());
    }

    #[test]
    fn generalized_small_cases() {
        assert!(!satisfies_generalized(params(5, 1), ErrorWeights::new(1, 1)).unwrap());
        assert_eq!(counting_lhs_exact(5, 1, 1, 1), BigUint::from(104u32));
        assert!(satisfies_generalized(params(5, 1), ErrorWeights::new(0, 2)).unwrap());
        assert!(!satisfies_generalized(params(5, 1), ErrorWeights::new(0, 3)).unwrap());
        assert!(satisfies_generalized(params(5, 1), ErrorWeights::new(3, 3)).is_err());
        assert!(satisfies_generalized(params(5, 1), ErrorWeights::new(0, 6)).is_err());
    }

    #[test]
    fn tighter_small_cases() {
        assert!(satisfies_tighter(params(5, 1), ErrorWeights::new(1, 1)).unwrap());
        assert!(!satisfies_tighter(params(5, 1), ErrorWeights::new(0, 4)).unwrap());
        for n in 1..=20 {
            for t_u in 0..=n - 1 {
                for t_l in 0..=1 {
                    let w = ErrorWeights::new(t_u, t_l);
                    assert_eq!(
                        satisfies_tighter(params(n, 1), w).unwrap(),
                        satisfies_hamming(params(n, 1), t_u).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn max_located_examples() {
        assert_eq!(max_correctable_located(params(5, 1), 0, BoundKind::Generalized).unwrap(), Some(2));
        assert_eq!(max_correctable_located(params(5, 1), 1, BoundKind::Combined).unwrap(), Some(0));
        assert_eq!(max_correctable_located(params(5, 1), 2, BoundKind::Combined).unwrap(), None);
        assert_eq!(max_correctable_located(params(50, 1), 0, BoundKind::Generalized).unwrap(), Some(24));
        assert_eq!(max_correctable_located(params(5, 1), 1, BoundKind::Original).unwrap(), Some(0));
    }

    #[test]
    fn region_curves_match_oracle() {
        assert_eq!(bound_region(params(5, 1), BoundKind::Generalized).unwrap().points, vec![(0, 2), (1, 0)]);
        assert_eq!(
            bound_region(params(20, 1), BoundKind::Generalized).unwrap().points,
            vec![(0, 9), (1, 6), (2, 4), (3, 2), (4, 0)]
        );
        assert_eq!(
            bound_region(params(50, 1), BoundKind::Generalized).unwrap().points,
            vec![(0, 24), (1, 21), (2, 18), (3, 15), (4, 13), (5, 10), (6, 8), (7, 6), (8, 4), (9, 1)]
        );
        for (n, tmax) in HAMMING_TMAX_K1 {
            let original = bound_region(params(n, 1), BoundKind::Original).unwrap();
            assert_eq!(original.points.len(), tmax + 1, "n = {n}");
            assert!(original.points.iter().all(|&(_, t_l)| t_l == 0));
        }
    }

    #[test]
    fn region_csv_and_json() {
        let curve = bound_region(params(5, 1), BoundKind::Generalized).unwrap();
        assert_eq!(curve.to_csv(), "t_u,max_t_l\n0,2\n1,0\n");
        assert_eq!(curve.to_json(), "[[0,2],[1,0]]");
    }

    #[test]
    fn combined_is_pointwise_min_of_curves() {
        let p = params(50, 1);
        let g = bound_region(p, BoundKind::Generalized).unwrap();
        let t = bound_region(p, BoundKind::Tighter).unwrap();
        let c = bound_region(p, BoundKind::Combined).unwrap();
        for (i, &(t_u, t_l)) in c.points.iter().enumerate() {
            assert_eq!(t_u, i);
            assert_eq!(t_l, g.points[i].1.min(t.points[i].1));
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn monotone_region_exhaustive() {
        for n in 1..=30 {
            for k in [0, 1, n / 3, n] {
                let p = params(n, k);
                for kind in [BoundKind::Original, BoundKind::Generalized, BoundKind::Tighter, BoundKind::Combined] {
                    let mut grid = vec![vec![false; n + 1]; n + 1];
                    for t_u in 0..=n {
                        for t_l in 0..=n - t_u {
                            grid[t_u][t_l] = satisfies(p, ErrorWeights::new(t_u, t_l), kind).unwrap();
                        }
                    }
                    for t_u in 0..=n {
                        for t_l in 0..=n - t_u {
                            if grid[t_u][t_l] {
                                if t_u > 0 {
                                    assert!(grid[t_u - 1][t_l]);
                                }
                                if t_l > 0 {
                                    assert!(grid[t_u][t_l - 1]);
                                }
                            }
                        }
                    }
                    let curve = bound_region(p, kind).unwrap();
                    assert!(curve.points.windows(2).all(|w| w[1].1 <= w[0].1));
                    for &(t_u, t_l) in &curve.points {
                        assert!(grid[t_u][t_l]);
                        if t_l < n - t_u {
                            assert!(!grid[t_u][t_l + 1]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn neither_bound_dominates() {
        let p = params(50, 1);
        let mut gen_only = 0;
        for t_u in 0..=50 {
            for t_l in 0..=50 - t_u {
                let w = ErrorWeights::new(t_u, t_l);
                let g = satisfies_generalized(p, w).unwrap();
                let t = satisfies_tighter(p, w).unwrap();
                assert_eq!(satisfies(p, w, BoundKind::Combined).unwrap(), g && t);
                gen_only += (g && !t) as usize;
            }
        }
        assert!(gen_only > 0);
        // t_u = 0: generalized allows up to 24, tighter only up to 2 * 9 + 1.
        assert!(satisfies_generalized(p, ErrorWeights::new(0, 22)).unwrap());
        assert!(!satisfies_tighter(p, ErrorWeights::new(0, 22)).unwrap());
        assert!(satisfies_tighter(params(5, 1), ErrorWeights::new(1, 1)).unwrap());
        assert!(!satisfies_generalized(params(5, 1), ErrorWeights::new(1, 1)).unwrap());
    }

    #[test]
    fn log_domain_agrees_with_exact() {
        for n in 1..=64 {
            for k in 0..=n {
                for t_l in 0..=n {
                    for t_u in 0..=n - t_l {
                        let exact = counting_holds_exact(n, k, t_u, t_l);
                        let margin = counting_margin_log2(n, k, t_u, t_l);
                        if margin.abs() >= GUARD_BAND_BITS {
                            assert_eq!(exact, margin <= 0.0, "n={n} k={k} t_u={t_u} t_l={t_l}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn log_path_above_64_matches_big_integers() {
        for n in [65, 80, 127, 200] {
            for t_l in (0..=n).step_by(7) {
                for t_u in (0..=n - t_l).step_by(3) {
                    let c = check_generalized(params(n, 1), ErrorWeights::new(t_u, t_l)).unwrap();
                    assert!(!c.unconfirmed);
                    assert_eq!(c.holds, counting_holds_exact(n, 1, t_u, t_l));
                }
            }
        }
    }

    #[test]
    fn coherent_information_examples() {
        assert_eq!(coherent_information(0.0, 0.0).unwrap(), 1.0);
        for q in [0.0, 0.1, 0.25, 0.5, 0.9] {
            assert!((coherent_information(0.0, q).unwrap() - (1.0 - 2.0 * q)).abs() < 1e-15);
        }
        assert!((coherent_information(1.0, 0.0).unwrap() - (1.0 - LOG2_3)).abs() < 1e-15);
        assert!((coherent_information_from_entropies(1.0, 0.0).unwrap() - (1.0 - LOG2_3)).abs() < 1e-12);
        assert!((coherent_information_from_entropies(0.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(coherent_information(-0.1, 0.0).is_err());
        assert!(coherent_information_from_entropies(0.5, 1.5).is_err());
    }

    #[test]
    fn boundary_at_q0_is_pinned_root() {
        let p = asymptotic_boundary(0.0, 0.0).unwrap().unwrap();
        assert!((p - P_STAR).abs() < 1e-9);
        assert!(coherent_information(p, 0.0).unwrap().abs() < 1e-10);
        assert!(asymptotic_boundary(0.5, 0.0).unwrap().unwrap() < 1e-9);
        assert_eq!(asymptotic_boundary(0.3, 0.5).unwrap(), None);
        assert!(asymptotic_boundary(0.0, 1.0).unwrap().unwrap() < 1e-9);
    }

    #[test]
    fn margin_examples() {
        assert_eq!(asymptotic_margin(ErrorRates::new(0.0, 0.0, 1.0).unwrap()), 0.0);
        assert!(asymptotic_margin(ErrorRates::new(0.0, 0.25, 0.5).unwrap()).abs() < 1e-15);
        assert!(ErrorRates::new(0.2, 1.2, 0.0).is_err());
    }

    #[test]
    fn asymptotic_curve_rows() {
        let rows = asymptotic_curve(0.0, 0.25).unwrap();
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[2].0, 0.5);
        assert!(rows[2].1.unwrap() < 1e-9);
        assert_eq!(rows[3].1, None);
        let csv = asymptotic_curve_csv(&rows);
        assert!(csv.starts_with("q,p_boundary\n0.000000,0.189289624915"));
        assert!(csv.ends_with("1.000000,\n"));
        assert!(asymptotic_curve(0.0, 0.0).is_err());
    }
}
