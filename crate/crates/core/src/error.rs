use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("graph is disconnected: infinite diameter")]
    InfiniteDiameter,
    #[error("graph is disconnected")]
    Disconnected,
    #[error("no unique extension: a component has no boundary vertex")]
    NoUniqueExtension,
    #[error("undefined quotient: field vanishes on the boundary")]
    UndefinedQuotient,
    #[error("need at least {need} boundary vertices, got {got}")]
    TooFewBoundary { need: usize, got: usize },
    #[error("not a block graph")]
    NotBlockGraph,
    #[error("graph is not planar")]
    NotPlanar,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate geodesic: no boundary pair at distance >= 2")]
    DegenerateGeodesic,
    #[error("no balanced subgraph: {0}")]
    NoBalancedSubgraph(String),
    #[error("not a subtree: {0}")]
    NotSubtree(String),
    #[error("edge ({0}, {1}) is not an interior edge")]
    EdgeNotInterior(usize, usize),
    #[error("{what} did not converge (residual {residual:e})")]
    NonConvergence { what: &'static str, residual: f64 },
    #[error("caps are not well-behaved: a point lies in {depth} of {count} boundary caps")]
    NotWellBehaved { depth: usize, count: usize },
    #[error("re-normalize packing: a disk contains the projection pole")]
    PoleInDisk,
    #[error("linear algebra failure: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of an iterative or numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Numerical(_) | Error::PoleInDisk | Error::NotWellBehaved { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
