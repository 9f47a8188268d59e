//! Finite fields and the extension `F_q ⊂ F_{q^m}`.

mod galois;
mod tower;

pub use galois::{is_prime, FieldId, GaloisField, LOG_TABLE_LIMIT, MAX_FIELD_ORDER};
pub use tower::{prime_power, FieldDescription, FieldTower, FqSpan};

pub(crate) use galois::prime_factors;
