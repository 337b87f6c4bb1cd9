use alloc::boxed::Box;
use alloc::string::String;

/// Pipeline stage tags carried by [`Error::Stage`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Subspace,
    Ellipsoid,
    Parallelotope,
    Reduction,
    Unimodular,
    Box,
    Certify,
}

impl core::fmt::Display for Stage {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Stage::Subspace => "subspace",
            Stage::Ellipsoid => "ellipsoid",
            Stage::Parallelotope => "parallelotope",
            Stage::Reduction => "reduction",
            Stage::Unimodular => "unimodular",
            Stage::Box => "box",
            Stage::Certify => "certify",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("rank deficient: rank {rank} < {expected}")]
    Rank { rank: usize, expected: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("lattices differ: {0}")]
    LatticesDiffer(String),
    #[error("no convergence after {0} iterations")]
    Convergence(usize),
    #[error("certification failed: {0}")]
    Certification(String),
    #[error("budget exceeded: {needed} > {cap}")]
    Budget { needed: u128, cap: u128 },
    #[error("invalid representation: {0}")]
    Representation(String),
    #[error("unsupported dimension {0}")]
    Unsupported(usize),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, stage: Stage) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Strips any stage tag.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    pub fn is_budget(&self) -> bool {
        matches!(self.root(), Error::Budget { .. })
    }
}

pub type Result<T> = core::result::Result<T, Error>;
