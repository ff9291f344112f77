//! Symmetric moment tensors, surface tensors Φ^s, trace reduction, and the
//! linear bijection between tensor components and harmonic intrinsic volumes.

mod harmonic;
mod set;
mod symtensor;

pub use harmonic::{harmonic_vector, harmonic_vector_with, HarmonicVector, MomentHarmonicMap};
pub use set::{TensorSet, ORDERING};
pub use symtensor::{
    moment_tensor, multi_indices, multiplicity, reduce_to, scaled_surface_tensor, surface_tensor,
    surface_tensor_factor, trace_constant, SymTensor,
};
