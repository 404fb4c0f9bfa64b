//! Numerical certification of the query lower bound for unitary time-reversal.
//!
//! The crate builds every object that appears in the lower-bound argument and
//! checks the relevant identities and Löwner-order inequalities at desk scale:
//!
//! * [`young`]: partitions, standard tableaux, hook lengths, Kerov interlacing
//!   sequences and exact rational identities between tableau counts.
//! * [`symrep`]: irreducible representations of the symmetric group in Young's
//!   orthogonal form, characters and isotypic projectors.
//! * [`operator`]: dense complex operators over labeled tensor factors with
//!   partial trace, partial transpose and the link product.
//! * [`schurweyl`]: the Schur basis of `(C^d)^{⊗n}` and block embeddings.
//! * [`comb`]: quantum combs, Choi operators and channel distances.
//! * [`haarmoment`]: the Haar moment `E[|U⟩⟩⟨⟨U|^{⊗k}]` by three routes.
//! * [`stair`]: stair operators and their Löwner-order checks.
//! * [`certify`]: scoring protocol combs and the implied query bounds.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line driver and thread-level parallelism live in the `combforge` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod budget;
pub mod certify;
pub mod check;
pub mod comb;
pub mod error;
pub mod haarmoment;
pub mod linalg;
pub mod operator;
pub mod rng;
pub mod schurweyl;
pub mod stair;
pub mod symrep;
pub mod young;

pub use budget::Budget;
pub use check::{Check, Relation};
pub use error::{Error, Result};
pub use linalg::{CMat, C64};
pub use operator::{LabeledOperator, SystemLabel};
