//! Exact construction and verification of bipartite Bell-type inequalities,
//! with and without non-local machines as a resource.
//!
//! Behaviors are points of the no-signaling polytope in Collins-Gisin
//! coordinates ([`behavior`]); inequalities are integer coefficient tables
//! ([`functional`]) acted on by relabelling symmetries ([`symmetry`]).
//! [`machine`] builds PR-type boxes and their wirings, [`strategy`] enumerates
//! and optimizes over strategies using at most one box, [`polytope`] checks
//! facets and classifies no-signaling vertices, and [`quantum`] runs a see-saw
//! over two-qubit states.

// Dense index loops read closer to the formulas than iterator chains here.
#![allow(clippy::needless_range_loop)]

pub mod behavior;
pub mod error;
pub mod functional;
pub mod linalg;
pub mod machine;
pub mod polytope;
pub mod quantum;
pub mod scalar;
pub mod strategy;
pub mod symmetry;

pub use behavior::{
    convex_combine, AnyBehavior, BehaviorPoint, ExactPoint, FullTable, Scenario, ValidityReport,
};
pub use error::{Error, Result};
pub use functional::{chsh, make_c1, make_c2, make_chsh, make_inn22, make_mnn22, BellFunctional};
pub use machine::{
    machine_behavior, make_prn_wiring, pr3_formula_check, recipe, wire_pr_boxes, MachineSpec,
    WiringTable,
};
pub use quantum::{
    quantum_behavior, seesaw_maximize, theta_sweep, BlochDomain, MeasurementSet, SeesawOptions,
    SeesawResult, SweepCurve, TwoQubitState,
};
pub use scalar::{Rational, Scalar};
pub use strategy::{
    enumerate_local, enumerate_one_machine, max_over_one_machine, strategy_behavior, Choice,
    PartyChoice, WiringStrategy,
};
pub use symmetry::{orbit, transform, transform_point, SymmetryElement};
