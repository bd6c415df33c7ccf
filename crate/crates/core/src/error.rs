use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is singular: smallest singular value {0:.3e}")]
    SingularMatrix(f64),
    #[error("matrix is not A_o-admissible: residual {residual:.3e}")]
    NotAoAdmissible { residual: f64 },
    #[error("matrix is not normalized: |c| = {0}")]
    NotNormalized(f64),
    #[error("eigenvalues of |F| do not pair as lambda <-> 1/lambda: {0}")]
    DegenerateEigenpairing(String),
    #[error("infeasible request: {0}")]
    Infeasible(String),
    #[error("morphism space between levels of different parity is zero: {0} vs {1}")]
    OddParity(usize, usize),
    #[error("level {level} exceeds the configured cap {cap}")]
    LevelCapExceeded { level: usize, cap: usize },
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("zero morphism space: {0}")]
    ZeroSpace(String),
    #[error("fusion multiplicity mismatch: {0}")]
    MultiplicityMismatch(String),
    #[error("zigzag scalars differ: {0} vs {1}")]
    BetaMismatch(f64, f64),
    #[error("realizations are not monoidally equivalent: {0}")]
    NotMonoidallyEquivalent(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("missing cocycle block for labels ({0}, {1})")]
    MissingBlock(String, String),
    #[error("coefficient algebra for the {0} side was not built from that realization")]
    SideNotBuilt(&'static str),
    #[error("matrix is not positive definite: smallest eigenvalue {0:.3e}")]
    NotPositive(f64),
    #[error("realizations have different variants")]
    VariantMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Name of the variant, for reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularMatrix(_) => "SingularMatrix",
            Error::NotAoAdmissible { .. } => "NotAoAdmissible",
            Error::NotNormalized(_) => "NotNormalized",
            Error::DegenerateEigenpairing(_) => "DegenerateEigenpairing",
            Error::Infeasible(_) => "Infeasible",
            Error::OddParity(..) => "OddParity",
            Error::LevelCapExceeded { .. } => "LevelCapExceeded",
            Error::NumericalDegeneracy(_) => "NumericalDegeneracy",
            Error::ZeroSpace(_) => "ZeroSpace",
            Error::MultiplicityMismatch(_) => "MultiplicityMismatch",
            Error::BetaMismatch(..) => "BetaMismatch",
            Error::NotMonoidallyEquivalent(_) => "NotMonoidallyEquivalent",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::MissingBlock(..) => "MissingBlock",
            Error::SideNotBuilt(_) => "SideNotBuilt",
            Error::NotPositive(_) => "NotPositive",
            Error::VariantMismatch => "VariantMismatch",
            Error::InvalidInput(_) => "InvalidInput",
        }
    }

    /// Whether the error reflects a failed numerical computation rather than
    /// unusable input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalDegeneracy(_)
                | Error::NotPositive(_)
                | Error::MultiplicityMismatch(_)
                | Error::DegenerateEigenpairing(_)
                | Error::MissingBlock(..)
        )
    }
}
