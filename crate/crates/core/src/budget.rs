//! Desk-scale budget caps, overridable through `HOGNN_BUDGET_OVERRIDE`.
//!
//! The override raises the vertex-count caps (never the tuple arity caps)
//! at the user's risk; it is read once per process.

use std::sync::OnceLock;

static OVERRIDE: OnceLock<Option<usize>> = OnceLock::new();

pub const BUDGET_ENV: &str = "HOGNN_BUDGET_OVERRIDE";

fn override_value() -> Option<usize> {
    *OVERRIDE.get_or_init(|| {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

/// The effective cap: the default, raised to the override when one is set
/// and larger.
pub fn cap(default: usize) -> usize {
    match override_value() {
        Some(v) if v > default => v,
        _ => default,
    }
}
