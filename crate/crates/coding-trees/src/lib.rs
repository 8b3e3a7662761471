//! Monte Carlo solver for fully nonlinear parabolic PDEs
//!
//! ```text
//!   d/dt u + (1/2) d2/dx2 u + f(u, du/dx, ..., d^n u/dx^n) = 0,   u(T, .) = phi
//! ```
//!
//! driven by random *coding trees*: branching processes whose branches carry
//! derivative operators ("codes") generated by Faà di Bruno combinatorics.
//! The solution is recovered as the expectation of a multiplicative
//! functional of the tree, extending the classical Feynman-Kac representation
//! to nonlinearities in derivatives of arbitrary order.
//!
//! Module map:
//!
//! - [`expr`] — formula parsing, symbolic differentiation, evaluation;
//! - [`fdb`] — Faà di Bruno term enumeration with exact coefficients;
//! - [`codes`] — branch codes, the branching mechanism, terminal values and
//!   the sufficient-condition check for `|H| <= 1`;
//! - [`tree`] — sampling one coding tree and its multiplicative functional;
//! - [`mc`] — deterministic parallel sampling with mergeable statistics;
//! - [`dsem`] — d-dimensional engine for semilinear problems;
//! - [`mod@bench`] — preset problem catalog with closed-form references,
//!   reports, and the pieces behind the `ct` command line tool.
//!
//! The `examples/` directory has one runnable program per capability; start
//! with `cargo run --example custom_pde`.

pub mod bench;
pub mod codes;
pub mod dsem;
pub mod expr;
pub mod fdb;
pub mod mc;
pub mod rng;
pub mod tree;
