//! Decision-tree complexity, evasiveness criteria, randomized query games and
//! graph packing, computed exactly at small sizes.

// Index loops over truth tables and subcube tables read better than zips.
#![allow(clippy::needless_range_loop)]

pub mod boolfn;
pub mod criteria;
pub mod det;
pub mod error;
pub mod formula;
pub mod game;
pub mod lp;
pub mod nand;
pub mod packing;
pub mod par;
pub mod props;
pub mod rational;
pub mod sw;

pub use boolfn::{PartialAssignment, Permutation, PermutationGroup, TruthTable};
pub use error::{Error, Result};
pub use formula::Formula;
pub use par::ExecPolicy;
pub use rational::Q;
