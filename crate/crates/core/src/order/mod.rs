//! Compatible orders (cycling machines) and order systems (general machines).

mod compatible;
mod search;
mod system;
mod two;

pub use compatible::{
    find_compatible_order, order_from_state_permutation, verify_compatible_order, CompatibleOrder,
    OrderCheck, OrderViolation,
};
pub use search::{
    copy_elements, find_order_system, verify_order_system, SearchMode, SystemCheck, SystemViolation,
};
pub use system::{count_order_systems, enumerate_order_systems, OrderSystem, OrderSystemFile};
pub use two::{
    check_paths_good, decide_cycling_2machine, default_path_cap, weighted_state_digraph,
    PathsVerdict, TwoMachineDecision, ZeroWalkObstruction,
};
