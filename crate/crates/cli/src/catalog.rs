//! Built-in scenarios, embedded at compile time.

use crate::config::Scenario;
use anyhow::{anyhow, Result};

pub const SCENARIOS: [(&str, &str); 7] = [
    ("play1d", include_str!("../scenarios/play1d.toml")),
    ("ball_complement_drag", include_str!("../scenarios/ball_complement_drag.toml")),
    ("ball_complement_oscillation", include_str!("../scenarios/ball_complement_oscillation.toml")),
    ("rotating_crescent", include_str!("../scenarios/rotating_crescent.toml")),
    ("two_balls_transfer", include_str!("../scenarios/two_balls_transfer.toml")),
    ("cusp_negative", include_str!("../scenarios/cusp_negative.toml")),
    ("bv_case_two", include_str!("../scenarios/bv_case_two.toml")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    SCENARIOS.iter().map(|(n, _)| *n)
}

pub fn source(name: &str) -> Option<&'static str> {
    SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn load(name: &str) -> Result<Scenario> {
    let text = source(name).ok_or_else(|| anyhow!("no built-in scenario named {name:?}"))?;
    Scenario::parse(text)
}

pub fn all() -> Result<Vec<Scenario>> {
    names().map(load).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_scenario_parses_with_its_own_name() {
        for (name, _) in SCENARIOS {
            assert_eq!(load(name).unwrap().name, name);
        }
    }
}
