pub mod branches;
pub mod cli;
pub mod error;
pub mod counter;
pub mod homsys;
pub mod jetalg;
pub mod symbolics;
pub mod zeta;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/jets.md")]
    mod jets {}
    #[doc = include_str!("../../../book/src/auto-arcs.md")]
    mod auto_arcs {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/zeta.md")]
    mod zeta {}
    #[doc = include_str!("../../../book/src/branches.md")]
    mod branches {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
