pub mod error;
pub mod jarzynski;
pub mod linalg;
pub mod measurement;
pub mod policy;
pub mod relaxation;
pub mod sampling;
pub mod scheme;
pub mod superselection;

pub use error::{Error, Result};
pub use policy::NumericPolicy;

/// Book chapters compiled as doctests so their snippets stay in sync.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/linear-algebra.md")]
    mod linear_algebra {}
    #[doc = include_str!("../../../book/src/superselection.md")]
    mod superselection {}
    #[doc = include_str!("../../../book/src/measurement.md")]
    mod measurement {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/relaxation.md")]
    mod relaxation {}
    #[doc = include_str!("../../../book/src/jarzynski.md")]
    mod jarzynski {}
    #[doc = include_str!("../../../book/src/scheme.md")]
    mod scheme {}
    #[doc = include_str!("../../../book/src/reproducibility.md")]
    mod reproducibility {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/output-formats.md")]
    mod output_formats {}
}
