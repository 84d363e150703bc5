pub mod formula;
pub mod parser;
pub mod printer;
pub mod signature;
pub mod structure;

pub use formula::{Formula, Term};
pub use parser::parse_formula;
pub use signature::{Signature, XorSet};
pub use structure::{Assignment, TemporalStructure, World};
