//! Phaseless Pauli algebra, small stabilizer codes and exact correctability
//! checks.

mod code;
mod correctability;
mod pauli;

pub use code::{five_qubit_code, steane_code, StabilizerCode, StabilizerCodeJson, Syndrome};
pub use correctability::{
    distance, enumerate_error_set, equivalence_enumeration_size, error_set_size, is_correctable_set,
    is_correctable_set_pairwise, min_weight_in_class, min_weight_logical, verify_located_unlocated_equivalence,
    EquivalenceReport, LocatedSet, DEFAULT_ENUMERATION_CAP,
};
pub use pauli::{LogicalClass, Pauli, PauliOperator};
