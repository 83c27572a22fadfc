use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("basis is linearly dependent (singular value ratio {ratio:.3e})")]
    DependentBasis { ratio: f64 },
    #[error("empty basis")]
    EmptyBasis,
    #[error("invalid space kind: {0}")]
    InvalidKind(String),
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("tensor is zero")]
    ZeroTensor,
    #[error("map is zero")]
    ZeroMap,
    #[error("optimizer budget exceeded before convergence")]
    OptimizerBudgetExceeded,
    #[error("product identity violated (residual {residual:.3e})")]
    IdentityViolated { residual: f64 },
    #[error("dimension {n} too large for sign enumeration (max {max})")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("complex input not supported: {0}")]
    ComplexInput(String),
    #[error("singular matrix")]
    Singular,
}

pub type Result<T> = core::result::Result<T, Error>;
