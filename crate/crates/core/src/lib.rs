//! Sharp-threshold machinery for functions `f: [q]^n -> [q]` under product
//! measures, and the social-choice experiments built on it.
//!
//! * [`qfun`]: tables, oracles, product measures and exact expectations.
//! * [`decomposition`]: Efron–Stein components, influences, `L_p` norms,
//!   the noise operator and the hypercontractive inequality checks.
//! * [`structure`]: the orders `<=_a` and certified monotonicity, symmetry
//!   and fairness checks.
//! * [`threshold`]: Russo-type derivatives, threshold curves and windows,
//!   simplex sweeps, Monte Carlo estimates and jury experiments.
//! * [`families`]: plurality, recursive plurality, graph properties, the
//!   antisymmetric majority and dictators.
//! * [`social_choice`]: choice functions, McGarvey and Saari realizations,
//!   indeterminacy experiments, out-degree and Borda rules.
//! * [`io`]: the JSON file formats shared by the CLI and bindings.

pub mod decomposition;
pub mod error;
pub mod families;
pub mod io;
pub mod qfun;
pub mod rng;
pub mod social_choice;
pub mod structure;
pub mod threshold;

pub use error::{Error, Result};
pub use families::{FamilySpec, GraphPropertyKind, TieBreak};
pub use qfun::{Codomain, MeasurePath, ProductMeasure, QaryFunction, SimplexSampler};
