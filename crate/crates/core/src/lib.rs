//! Hidden-variable models and the statistical tests that separate them.
//!
//! * [`bertrand`]: the three classic random-chord protocols and their
//!   different answers to the same question.
//! * [`hv`]: finite non-contextual and contextual hidden-variable models,
//!   coincidence and Bell-protocol simulation, CHSH.
//! * [`collision`]: a deterministic two-ball collision whose detector
//!   statistics violate a Bell-type inequality.
//! * [`marginal`]: exact rational feasibility of pair-moment (marginal)
//!   problems with a joint witness or a separating inequality.
//!
//! All randomness flows through [`stats::SeededStream`], so every estimate is
//! reproducible from a seed regardless of thread count.

pub mod bertrand;
pub mod collision;
pub mod density;
pub mod error;
pub mod hv;
pub mod marginal;
pub mod rational;
pub mod stats;

pub use density::Density;
pub use error::{Error, Result};
pub use stats::{Estimate, PairSampleSummary, SeededStream};

// The book chapters are compiled as doc-tests so their snippets track the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/streams.md")]
    mod streams {}
    #[doc = include_str!("../../../book/src/bertrand.md")]
    mod bertrand {}
    #[doc = include_str!("../../../book/src/hidden-variables.md")]
    mod hidden_variables {}
    #[doc = include_str!("../../../book/src/collision.md")]
    mod collision {}
    #[doc = include_str!("../../../book/src/feasibility.md")]
    mod feasibility {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
