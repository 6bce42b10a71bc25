//! Assembly spaces over strings, their exact and approximate assembly indices,
//! and the compression schemes they induce.
//!
//! The crate is organised by concern:
//!
//! * [`object`], [`space`] and [`index`] model assembly spaces and compute
//!   assembly indices together with minimal witnesses.
//! * [`grammar`] turns a minimal witness into a straight-line context-free
//!   grammar and checks the size identity between the two.
//! * [`codecs`] holds the classical baselines (LZ77/LZ78/LZW, RLE, Huffman,
//!   empirical entropy).
//! * [`sat`] is the enumeration-based LZ-style encoding of minimal witnesses
//!   and the vertex-set / path based object recovery procedures.
//! * [`ensemble`] covers the assembly number, its prefix code and the
//!   selection simulator.
//! * [`bench`] runs corpus-level evaluations and correlation reports.

pub mod bench;
pub mod bits;
pub mod codecs;
pub mod ensemble;
pub mod grammar;
pub mod index;
pub mod object;
pub mod sat;
pub mod space;

pub use index::{
    assembly_index_exact, assembly_index_split_branch, ExactLimits, IndexError, IndexResult,
};
pub use object::{basis_of, ObjectError, ObjectString};
pub use space::{extract_paths, validate_space, AssemblySpace, Edge, MinimalSubspace, RootedPath, Side};
