//! Perfect state transfer on Cayley graphs of GL(2,q), GU(2,q), SL(2,q)
//! and on the orbital graph GL(2,q²)⫽GL(2,q): exact spectra from
//! character sums, mod-4 certificates and quantum-walk simulation.

pub mod cayley;
pub mod charring;
pub mod ctqw;
pub mod error;
pub mod gf;
pub mod graph;
pub mod grp;
pub mod orbital;
pub mod pipeline;
pub mod report;
pub mod scalar;
pub mod scheme;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type WalkSystemF64 = ctqw::WalkSystem<f64>;
pub type WalkSystemF32 = ctqw::WalkSystem<f32>;
pub type IdempotentBasisF64 = scheme::IdempotentBasis<f64>;
pub type IdempotentBasisF32 = scheme::IdempotentBasis<f32>;
pub type CharacterDataF64 = scheme::GroupCharacterData<f64>;
pub type CharacterDataF32 = scheme::GroupCharacterData<f32>;
