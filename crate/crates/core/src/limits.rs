//! Size caps that keep the exponential solvers from running away.

/// Environment variable that lifts every cap when set to `off` or `0`.
pub const SCALE_GUARD_VAR: &str = "TWVRP_SCALE_GUARD";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vertices: usize,
    pub max_edge_copies: usize,
    pub max_clients: usize,
    pub max_vehicles: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_vertices: 8, max_edge_copies: 14, max_clients: 6, max_vehicles: 3 }
    }
}

impl OracleLimits {
    pub fn unlimited() -> Self {
        OracleLimits { max_vertices: usize::MAX, max_edge_copies: usize::MAX, max_clients: usize::MAX, max_vehicles: usize::MAX }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScaleLimits {
    pub client_cap: usize,
    /// Widest decomposition the uncapacitated DP is tried on.
    pub vrp_width_cap: usize,
    /// Widest decomposition the capacitated DP is tried on.
    pub cvrp_width_cap: usize,
    pub oracle: OracleLimits,
}

impl Default for ScaleLimits {
    fn default() -> Self {
        ScaleLimits { client_cap: 9, vrp_width_cap: 6, cvrp_width_cap: 3, oracle: OracleLimits::default() }
    }
}

impl ScaleLimits {
    pub fn unlimited() -> Self {
        ScaleLimits { client_cap: usize::MAX, vrp_width_cap: usize::MAX, cvrp_width_cap: usize::MAX, oracle: OracleLimits::unlimited() }
    }

    /// Defaults, or no caps at all when the guard variable says so.
    pub fn from_env() -> Self {
        match std::env::var(SCALE_GUARD_VAR) {
            Ok(v) if guard_disabled(&v) => ScaleLimits::unlimited(),
            _ => ScaleLimits::default(),
        }
    }
}

pub fn guard_disabled(value: &str) -> bool {
    matches!(value.trim().to_ascii_lowercase().as_str(), "off" | "0" | "false" | "no")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_values() {
        assert!(guard_disabled("off"));
        assert!(guard_disabled("0"));
        assert!(!guard_disabled("on"));
        assert_eq!(ScaleLimits::default().client_cap, 9);
    }
}
