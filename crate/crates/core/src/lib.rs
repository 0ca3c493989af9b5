pub mod acceptance;
pub mod blocks;
pub mod blocktools;
pub mod bounds;
pub mod error;
pub mod explorer;
pub mod families;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod planar;
pub mod rng;
pub mod spectrum;
pub mod sphere;

pub use error::{Error, Result};
pub use graph::{GraphWithBoundary, Vertex};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/block-tools.md")]
    mod block_tools {}
    #[doc = include_str!("../../../book/src/embedding.md")]
    mod embedding {}
    #[doc = include_str!("../../../book/src/explorer.md")]
    mod explorer {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/acceptance.md")]
    mod acceptance {}
}
