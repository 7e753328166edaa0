//! Phase-space (Stratonovich–Weyl) methods for spin systems.

pub mod bopp;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod scalar;
pub mod sparse;
pub mod sphere;
pub mod su2;
pub mod sw;

pub use error::{Error, Result};
pub use scalar::{Complex, Real};

/// Double-precision aliases.
pub type Symbol = sphere::SymbolCoefficients<f64>;
pub type PhaseOperator = sphere::PhaseSpaceOperator<f64>;
pub type Operator = su2::OperatorMatrix<f64>;
pub type BoppOps = bopp::BoppOperators<f64>;
pub type Expression = expr::PolynomialSpinExpression<f64>;

/// Single-precision aliases.
pub type Symbol32 = sphere::SymbolCoefficients<f32>;
pub type PhaseOperator32 = sphere::PhaseSpaceOperator<f32>;
pub type Operator32 = su2::OperatorMatrix<f32>;
pub type BoppOps32 = bopp::BoppOperators<f32>;
pub type Expression32 = expr::PolynomialSpinExpression<f32>;
