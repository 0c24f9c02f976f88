use std::path::PathBuf;

use thiserror::Error;

use crate::operator_ir::{Atom, Constant};

#[derive(Debug, Error)]
pub enum Error {
    #[error("no commutation rule registered for the pair ({left}, {right})")]
    UnknownAtomPair { left: Atom, right: Atom },

    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("unknown symbol `{name}` at column {column}")]
    UnknownSymbol { name: String, column: usize },

    #[error("cannot differentiate momentum atom {0} with respect to a coordinate")]
    MomentumDerivative(Atom),

    #[error("expression is not polynomial in the expected variables: {0}")]
    NonPolynomial(String),

    #[error("field atom {0} cannot be Bopp-shifted; expand the field polynomial first")]
    FieldInShiftedCoordinates(Atom),

    #[error("constant `{0}` has no numerical binding")]
    UnboundConstant(Constant),

    #[error("atom {atom} refers to an axis outside the {dim}-dimensional basis")]
    AxisOutOfRange { atom: Atom, dim: usize },

    #[error("invalid atom {0}")]
    InvalidAtom(Atom),

    #[error("invalid basis configuration: {0}")]
    InvalidBasis(String),

    #[error("operator is not Hermitian (relative residual {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("wavepacket leaks probability {probability:.3e} into the guard band")]
    OccupancySpill { probability: f64 },

    #[error("eigensolver failed with LAPACK info {0}")]
    Eigensolver(i32),

    #[error("trajectory has no column `{0}`")]
    MissingColumn(String),

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
