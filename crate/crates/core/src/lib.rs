//! Exact F2 computations for `Z/2`-equivariant cohomology graded on `RO(Z/2)`:
//! the cohomology of a point, Mackey functors, free-module charts of spaces,
//! and Serre spectral sequence pages with a forced-differential solver.

pub mod charts;
pub mod checks;
pub mod f2;
pub mod ground;
pub mod mackey;
pub mod serre;
pub mod spaces;
pub mod spectra;

pub use charts::{Generator, MackeyRank, ModulePresentation};
pub use ground::{Bidegree, GroundElement, OrbitElement};
pub use mackey::{Decomposition, MackeyShape, NamedFunctor};
pub use spectra::{Abutment, DifferentialAssignment, Page, SolverOutcome};
