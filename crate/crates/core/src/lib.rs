//! Generalized disjunctive programs, their mixed-integer reformulations
//! (big-M, hull and reaggregated hull), case-study builders and a small
//! LP-based branch-and-bound solver to compare them.

pub mod bench;
pub mod builders;
pub mod gdp;
pub mod milp;
pub mod oracles;
pub mod reformulate;
