//! Shipped example models and their property-violating mutants.

use vpnet_core::compose::MultiComponentNet;

use crate::model::{parse_model, ModelDocument};

pub const E1_TEXT: &str = include_str!("../fixtures/e1.vpn");
pub const E2_TEXT: &str = include_str!("../fixtures/e2.vpn");
pub const E1_FINAL_MUTANT_TEXT: &str = include_str!("../fixtures/e1_final_mutant.vpn");
pub const DOUBLE_SEND_TEXT: &str = include_str!("../fixtures/mutant_double_send.vpn");
pub const STRANDED_TOKEN_TEXT: &str = include_str!("../fixtures/mutant_stranded_token.vpn");

pub struct Fixture {
    pub name: &'static str,
    pub document: ModelDocument,
    pub mcn: MultiComponentNet,
}

pub struct Fixtures {
    pub e1: Fixture,
    pub e2: Fixture,
    /// Property-violating variants: an unreachable final place, a repeated
    /// send into a loaded interface, and interface data nothing consumes.
    pub mutants: Vec<Fixture>,
}

fn load(name: &'static str, text: &str) -> Fixture {
    let document = match parse_model(text) {
        Ok(doc) => doc,
        Err(diags) => {
            let msgs: Vec<String> = diags.iter().map(|d| d.to_string()).collect();
            panic!("fixture `{name}` does not parse: {}", msgs.join("; "));
        }
    };
    let mcn = document
        .to_mcn()
        .unwrap_or_else(|e| panic!("fixture `{name}` does not compose: {e}"));
    Fixture {
        name,
        document,
        mcn,
    }
}

/// Parses and composes every shipped model.
pub fn fixtures() -> Fixtures {
    Fixtures {
        e1: load("e1", E1_TEXT),
        e2: load("e2", E2_TEXT),
        mutants: vec![
            load("e1_final_mutant", E1_FINAL_MUTANT_TEXT),
            load("mutant_double_send", DOUBLE_SEND_TEXT),
            load("mutant_stranded_token", STRANDED_TOKEN_TEXT),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_parse_and_validate() {
        let fx = fixtures();
        for f in [&fx.e1, &fx.e2]
            .into_iter()
            .chain(fx.mutants.iter())
        {
            let report = f.mcn.net.validate();
            assert!(
                report.is_valid(),
                "fixture `{}` has violations: {:?}",
                f.name,
                report.violations
            );
        }
    }

    #[test]
    fn e1_interface_places_are_the_services() {
        let fx = fixtures();
        let net = &fx.e1.mcn.net;
        let interface_places: Vec<&str> = net
            .places()
            .filter(|(_, p)| p.class == vpnet_core::net::PlaceClass::Interface)
            .map(|(id, _)| net.universe().name(id))
            .collect();
        assert_eq!(interface_places, vec!["S1", "S2", "S3"]);
    }

    #[test]
    fn e1_declares_the_expected_interface_set() {
        let fx = fixtures();
        let net = &fx.e1.mcn.net;
        let names: Vec<&str> = net
            .interfaces()
            .iter()
            .map(|&i| net.universe().name(i))
            .collect();
        assert_eq!(names, vec!["S1", "S2", "S3"]);
    }

    #[test]
    fn e1_initial_marking_details() {
        let fx = fixtures();
        let net = &fx.e1.mcn.net;
        let cfg = net.initial_configuration();
        let loc = net.universe().lookup("Loc").unwrap();
        let tokens = cfg.tokens(loc);
        assert_eq!(tokens.total(), 2, "Loc holds the two location names");
    }
}
