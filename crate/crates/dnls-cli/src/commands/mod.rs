pub mod conservation;
pub mod decay_scan;
pub mod flow_nearness;
pub mod gauge_suite;
pub mod invariance;
pub mod liouville;

pub use conservation::cmd_conservation;
pub use decay_scan::cmd_decay_scan;
pub use flow_nearness::cmd_flow_nearness;
pub use gauge_suite::cmd_gauge_suite;
pub use invariance::cmd_invariance;
pub use liouville::cmd_liouville;
