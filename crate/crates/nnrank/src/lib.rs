//! Exact-arithmetic toolkit for nonnegative-rank gadgets.
//!
//! The library builds and verifies the matrix gadgets that couple
//! nonnegative rank to clique covers, drives the graph -> matrix
//! NP-hardness reduction, and machine-checks the 21x21 integer matrix
//! whose real nonnegative rank is 19 while every rational nonnegative
//! factorization needs at least 20 terms.
//!
//! All core arithmetic is exact, over Q or Q(sqrt 2); floating point is
//! confined to the heuristic upper-bound search in [`bounds`].

pub mod bounds;
pub mod cohen_rothblum;
pub mod gadgets;
pub mod graphred;
pub mod matrix;
pub mod poly;
pub mod scalar;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed scalar: {0}")]
    MalformedScalar(String),
    #[error("wrong domain: {0}")]
    WrongDomain(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("bad permutation: {0}")]
    BadPermutation(String),
    #[error("negative input: {0}")]
    NegativeInput(String),
    #[error("alpha out of range: {0}")]
    AlphaOutOfRange(String),
    #[error("precondition not certified: {0}")]
    PreconditionNotCertified(String),
    #[error("variable `{0}` occurs in more than one row")]
    VarSpansMultipleRows(String),
    #[error("unknown variable `{0}`")]
    UnknownVar(String),
    #[error("xi out of range: {0}")]
    XiOutOfRange(String),
    #[error("factorization does not validate: {0}")]
    ValidationFailure(String),
    #[error("unresolved variables remain: {0}")]
    UnresolvedVariables(String),
    #[error("malformed matrix file: {0}")]
    MalformedMatrix(String),
    #[error("malformed factorization file: {0}")]
    MalformedFactorization(String),
    #[error("malformed partial-matrix file: {0}")]
    MalformedPartial(String),
    #[error("malformed trace file: {0}")]
    MalformedTrace(String),
    #[error("malformed graph file: {0}")]
    MalformedGraph(String),
    #[error("loop edge at vertex {0}")]
    LoopEdge(usize),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("invalid clique cover: {0}")]
    InvalidCover(String),
    #[error("factorization terms do not cover every vertex")]
    NotACover,
    #[error("vertices {0} and {1} share a term but are not adjacent")]
    NotAClique(usize, usize),
    #[error("gadget reconstruction mismatch at ({0},{1})")]
    ReconstructionMismatch(usize, usize),
    #[error("certificate failure: {0}")]
    CertificateFailure(String),
}
