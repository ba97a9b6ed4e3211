//! Named example networks with their known classification.

use crate::network::{ReactionNetwork, Tempering};
use crate::parse::parse_network;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expected {
    pub weakly_reversible: bool,
    pub endotactic: bool,
    pub strongly_endotactic: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
    pub expected: Expected,
}

impl Fixture {
    pub fn network(&self) -> ReactionNetwork {
        parse_network(self.text).expect("fixture parses").network
    }

    pub fn tempering(&self) -> Option<Tempering> {
        parse_network(self.text).expect("fixture parses").tempering
    }
}

const fn exp(weakly_reversible: bool, endotactic: bool, strongly_endotactic: bool) -> Expected {
    Expected { weakly_reversible, endotactic, strongly_endotactic }
}

pub const REVERSE_LOTKA_VOLTERRA: Fixture = Fixture {
    name: "reverse_lotka_volterra",
    text: "2X -> X\n0 -> Y\n2Y -> X + Y\n",
    expected: exp(false, true, true),
};

pub const TWO_CLASS_ENDOTACTIC: Fixture = Fixture {
    name: "two_class_endotactic",
    text: "2A <-> A + B\nB -> 0\n0 -> 2B\n",
    expected: exp(false, true, false),
};

pub const TRIANGLE_STRONG: Fixture = Fixture {
    name: "triangle_strong",
    text: "0 -> 3A + B rate [1,2]\n2A -> B rate [3,3]\n2B -> A + B rate [4,5]\n",
    expected: exp(false, true, true),
};

/// `w = (1,0)`-endotactic but fails for `(-1,1)`.
pub const TILTED_THREE_REACTIONS: Fixture = Fixture {
    name: "tilted_three_reactions",
    text: "A + B -> A + 2B\n9/4A + B -> 3A + 2B\n11/2A + 3/2B -> 19/4A + 3/4B\n",
    expected: exp(false, false, false),
};

pub const SINGLE_CONVERSION: Fixture = Fixture { name: "single_conversion", text: "A -> B\n", expected: exp(false, false, false) };

/// Enzyme futile cycle; species order `(S0, S1, S2, E, F)`.
pub const FUTILE_CYCLE: Fixture = Fixture {
    name: "futile_cycle",
    text: "species: S0 S1 S2 E F\nS0 + F -> S1 + E\nS1 + E -> S2 + F\nS2 -> S1\nS1 -> S0\n",
    expected: exp(false, false, false),
};

pub const INFLOW_CHAIN: Fixture = Fixture {
    name: "inflow_chain",
    text: "0 -> A\nA -> B\nB -> C\nC -> 0\n",
    expected: exp(true, true, true),
};

pub const DIMERIZATION_RING: Fixture = Fixture {
    name: "dimerization_ring",
    text: "2A <-> B\n2B <-> C\n2C <-> A\n",
    expected: exp(true, true, true),
};

pub const TETRAHEDRON_CYCLE: Fixture = Fixture {
    name: "tetrahedron_cycle",
    text: "4A -> A + B + C\nA + B + C -> 4B\n4B -> 4C\n4C -> 2A + 2C\n",
    expected: exp(false, true, true),
};

/// Endotactic; `(0,-1)` breaks the strong condition.
pub const INFLOW_AUTOCATALYSIS: Fixture = Fixture {
    name: "inflow_autocatalysis",
    text: "0 <-> A\nB <-> 2B\n",
    expected: exp(true, true, false),
};

pub const CYCLE_WITH_PAIR: Fixture = Fixture {
    name: "cycle_with_pair",
    text: "A -> B\nB -> C\nC -> A\n2A <-> 3B\n",
    expected: exp(true, true, false),
};

pub const ISOMERIZATION: Fixture = Fixture { name: "isomerization", text: "A <-> B\n", expected: exp(true, true, true) };

/// Every named fixture.
pub const ALL: [Fixture; 12] = [
    REVERSE_LOTKA_VOLTERRA,
    TWO_CLASS_ENDOTACTIC,
    TRIANGLE_STRONG,
    TILTED_THREE_REACTIONS,
    SINGLE_CONVERSION,
    FUTILE_CYCLE,
    INFLOW_CHAIN,
    DIMERIZATION_RING,
    TETRAHEDRON_CYCLE,
    INFLOW_AUTOCATALYSIS,
    CYCLE_WITH_PAIR,
    ISOMERIZATION,
];

/// Strongly endotactic fixtures used by permanence-style experiments.
pub const STRONG: [Fixture; 4] = [TRIANGLE_STRONG, INFLOW_CHAIN, DIMERIZATION_RING, TETRAHEDRON_CYCLE];

pub fn by_name(name: &str) -> Option<Fixture> {
    ALL.iter().find(|f| f.name == name).copied()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_parse() {
        for f in ALL {
            assert!(f.network().reactions().len() > 0, "{}", f.name);
        }
    }

    #[test]
    fn triangle_tempering() {
        let t = TRIANGLE_STRONG.tempering().unwrap();
        assert_eq!(t.intervals()[1].lo, 3.0);
        assert_eq!(t.intervals()[2].hi, 5.0);
    }
}
