//! Closed-form network constructions.

pub mod gadget;
pub mod grid;
pub mod relu;
pub mod step;

pub use gadget::{gadget_params, gadget_terms, relu_threshold_gadget, Direction, GadgetParams, GadgetTerm};
pub use grid::{build_grid_plan, Cell, CellRep, GridPlan, RepPolicy, Resolution};
pub use relu::{oscillation_net, relu_approximator, relu_memorizer};
pub use step::{step_approximator, step_cube_indicator, step_memorizer};
