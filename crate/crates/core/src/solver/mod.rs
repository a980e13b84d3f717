//! Solutions of lambda + mu = 1 in S-units.

mod descent;
mod obstruction;
mod search;

pub use descent::{descent_step, DescentOutput};
pub use obstruction::{obstructions, Obstruction, ObstructionReport};
pub use search::{solve, solve_with, verify_solution, Solution, SolutionSet, SolveOptions};
