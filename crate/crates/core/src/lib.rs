//! Type-logical parsing and tensor semantics for compositional
//! distributional models.
//!
//! Sentences are parsed either with pregroup reductions or with cut-free
//! Lambek proofs, the result is compiled into a tensor contraction program,
//! and the program is run on word tensors built from a corpus.

pub mod diagrams;
pub mod distributional;
pub mod evaluation;
pub mod lambek;
pub mod lexicon;
pub mod pregroup;
pub mod semantics;
pub mod tensor;
pub mod types;

pub use distributional::{DependencyTriple, VectorSpaceModel, VerbMethod, Weighting};
pub use evaluation::{Composer, Report, SentencePair};
pub use lambek::Derivation;
pub use lexicon::{Grammar, LexiconEntry};
pub use pregroup::Reduction;
pub use semantics::{ContractionPlan, Logic, SpaceAssignment, TensorSource};
pub use tensor::Tensor;
pub use types::{BasicType, LambekType, PregroupType, SimpleType};
