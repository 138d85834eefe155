//! Execution time of gate sequences in loop-time units.
//!
//! A two-qubit module is a loop with four interior control points (5 time
//! units); a three-qubit module has twelve (13 time units).

/// Duration of a two-qubit module (`ν = 4`).
pub const UNIT_TIME_TWO: u64 = 5;
/// Duration of a three-qubit module (`ν = 12`).
pub const UNIT_TIME_THREE: u64 = 13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CircuitCost {
    pub two_qubit_gates: u64,
    pub three_qubit_gates: u64,
}

impl CircuitCost {
    pub fn new(two_qubit_gates: u64, three_qubit_gates: u64) -> Self {
        Self {
            two_qubit_gates,
            three_qubit_gates,
        }
    }

    pub fn two_qubit(count: u64) -> Self {
        Self::new(count, 0)
    }

    pub fn three_qubit(count: u64) -> Self {
        Self::new(0, count)
    }
}

pub fn execution_time(cost: CircuitCost) -> u64 {
    UNIT_TIME_TWO * cost.two_qubit_gates + UNIT_TIME_THREE * cost.three_qubit_gates
}

/// One column of the decomposition-vs-direct comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostEntry {
    pub gate: &'static str,
    pub realization: &'static str,
    pub cost: CircuitCost,
}

impl CostEntry {
    pub fn execution_time(&self) -> u64 {
        execution_time(self.cost)
    }
}

/// Two-qubit decomposition counts of the reference gates, plus a direct
/// three-qubit module for comparison.
pub fn reference_comparison() -> Vec<CostEntry> {
    vec![
        CostEntry {
            gate: "Fredkin",
            realization: "two-qubit decomposition",
            cost: CircuitCost::two_qubit(5),
        },
        CostEntry {
            gate: "Toffoli",
            realization: "two-qubit decomposition",
            cost: CircuitCost::two_qubit(3),
        },
        CostEntry {
            gate: "QFT",
            realization: "two-qubit decomposition",
            cost: CircuitCost::two_qubit(3),
        },
        CostEntry {
            gate: "U in SU(8)",
            realization: "two-qubit decomposition",
            cost: CircuitCost::two_qubit(206),
        },
        CostEntry {
            gate: "U in SU(8)",
            realization: "three-qubit module",
            cost: CircuitCost::three_qubit(1),
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_times() {
        let times: Vec<u64> = reference_comparison()
            .iter()
            .map(CostEntry::execution_time)
            .collect();
        assert_eq!(times, vec![25, 15, 15, 1030, 13]);
    }

    #[test]
    fn arithmetic() {
        assert_eq!(execution_time(CircuitCost::default()), 0);
        assert_eq!(execution_time(CircuitCost::three_qubit(2)), 26);
        assert_eq!(execution_time(CircuitCost::new(2, 1)), 23);
    }
}
