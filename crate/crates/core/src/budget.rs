//! Work limits, overridable through the environment.

/// Default cap on enumerated assignments (`|A|^p`).
pub const DEFAULT_ASSIGNMENT_BUDGET: u64 = 100_000_000;
/// Default cap on candidate tuples when building interpreted domains.
pub const DEFAULT_TUPLE_BUDGET: u64 = 10_000_000;

pub const ASSIGNMENT_BUDGET_VAR: &str = "POLYSEQ_ASSIGNMENT_BUDGET";
pub const TUPLE_BUDGET_VAR: &str = "POLYSEQ_TUPLE_BUDGET";

fn from_env(var: &str, default: u64) -> u64 {
    std::env::var(var)
        .ok()
        .and_then(|v| v.trim().replace('_', "").parse().ok())
        .unwrap_or(default)
}

pub fn assignment_budget() -> u64 {
    from_env(ASSIGNMENT_BUDGET_VAR, DEFAULT_ASSIGNMENT_BUDGET)
}

pub fn tuple_budget() -> u64 {
    from_env(TUPLE_BUDGET_VAR, DEFAULT_TUPLE_BUDGET)
}
