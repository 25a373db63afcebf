//! Ground-truth domains and initial states bundled with the crate.

use crate::pddl::{parse_domain, parse_problem, Domain, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fixture {
    Gripper,
    Blocksworld,
    PegSolitaire,
    NegElevator,
}

impl Fixture {
    pub const ALL: [Fixture; 4] = [
        Fixture::Gripper,
        Fixture::Blocksworld,
        Fixture::PegSolitaire,
        Fixture::NegElevator,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Fixture::Gripper => "gripper",
            Fixture::Blocksworld => "blocksworld",
            Fixture::PegSolitaire => "peg-solitaire",
            Fixture::NegElevator => "neg-elevator",
        }
    }

    pub fn from_name(name: &str) -> Option<Fixture> {
        Fixture::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn domain_text(self) -> &'static str {
        match self {
            Fixture::Gripper => include_str!("../fixtures/gripper-domain.pddl"),
            Fixture::Blocksworld => include_str!("../fixtures/blocksworld-domain.pddl"),
            Fixture::PegSolitaire => include_str!("../fixtures/peg-solitaire-domain.pddl"),
            Fixture::NegElevator => include_str!("../fixtures/neg-elevator-domain.pddl"),
        }
    }

    pub fn problem_texts(self) -> [&'static str; 3] {
        match self {
            Fixture::Gripper => [
                include_str!("../fixtures/gripper-p1.pddl"),
                include_str!("../fixtures/gripper-p2.pddl"),
                include_str!("../fixtures/gripper-p3.pddl"),
            ],
            Fixture::Blocksworld => [
                include_str!("../fixtures/blocksworld-p1.pddl"),
                include_str!("../fixtures/blocksworld-p2.pddl"),
                include_str!("../fixtures/blocksworld-p3.pddl"),
            ],
            Fixture::PegSolitaire => [
                include_str!("../fixtures/peg-solitaire-p1.pddl"),
                include_str!("../fixtures/peg-solitaire-p2.pddl"),
                include_str!("../fixtures/peg-solitaire-p3.pddl"),
            ],
            Fixture::NegElevator => [
                include_str!("../fixtures/neg-elevator-p1.pddl"),
                include_str!("../fixtures/neg-elevator-p2.pddl"),
                include_str!("../fixtures/neg-elevator-p3.pddl"),
            ],
        }
    }

    pub fn domain(self) -> Domain {
        parse_domain(self.domain_text()).expect("bundled domain parses")
    }

    /// The three bundled initial states.
    pub fn problems(self) -> Vec<Problem> {
        let d = self.domain();
        self.problem_texts()
            .iter()
            .map(|t| parse_problem(t, &d).expect("bundled problem parses"))
            .collect()
    }
}

/// Two balls in opposite rooms that must trade places.
pub fn gripper_swap() -> Problem {
    parse_problem(
        include_str!("../fixtures/gripper-swap.pddl"),
        &Fixture::Gripper.domain(),
    )
    .expect("bundled problem parses")
}
