//! Deferred acceptance under fixed priorities: which priority sets admit an
//! obviously strategyproof implementation, how to build one, and how to
//! certify that none exists.
//!
//! ```
//! use osp_da::{classify::classify, synth::synthesize, PrioritySet};
//! use osp_da::mechanism::{check_osp, check_implements, CheckMode};
//!
//! let q = PrioritySet::from_letters(&["abc", "acb", "bac"]).unwrap();
//! assert!(classify(&q).is_limited_cyclic());
//! let tree = synthesize(&q).unwrap();
//! assert!(check_osp(&tree).unwrap().ok());
//! assert!(check_implements(&tree, &q, &CheckMode::Exhaustive).unwrap().ok());
//! ```

pub mod canon;
pub mod classify;
pub mod cli;
pub mod da;
pub mod error;
pub mod io;
pub mod market;
pub mod mechanism;
pub mod order;
pub mod patterns;
pub mod synth;
pub mod witness;

pub use error::{Error, Result};
pub use market::{Matching, PreferenceProfile, PrioritySet, Restriction};
pub use order::Order;
