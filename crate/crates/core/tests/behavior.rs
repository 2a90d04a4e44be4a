//! Behavior-artifact properties checked over randomly generated nets:
//! replayability of the tree, prefix closure and alignment of the languages,
//! and stability of the graph quotient.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use vpnet_core::kernel::fire;
use vpnet_core::space::{
    build_ct, ct_to_cg, languages, languages_with_options, reachability_set, Anchor,
    ExplorationBounds,
};
use vpnet_core::testkit::{random_vpn, VpnGenConfig};

fn bounds() -> ExplorationBounds {
    ExplorationBounds {
        max_configs: 600,
        max_depth: 40,
        ..Default::default()
    }
}

fn prefix_closed<T: Ord + Clone>(language: &BTreeSet<Vec<T>>) -> bool {
    language.iter().all(|seq| {
        (0..seq.len()).all(|k| language.contains(&seq[..k].to_vec()))
    })
}

#[test]
fn tree_edges_replay_and_languages_are_prefix_closed() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe01);
    for _ in 0..40 {
        let net = random_vpn(&mut rng, &VpnGenConfig::default());
        let ct = build_ct(&net, &bounds()).expect("explores");

        for (parent, child, t, binding) in ct.edges() {
            let replayed = fire(&net, t, binding, &ct.node(parent).config).expect("replays");
            assert_eq!(replayed, ct.node(child).config, "edge does not replay");
        }

        let langs = languages(&ct, 5);
        assert!(prefix_closed(&langs.control));
        assert!(prefix_closed(&langs.data));
        assert!(prefix_closed(&langs.connectivity));
        assert!(prefix_closed(&langs.new_link));
        assert!(prefix_closed(&langs.broken_link));

        // Every firing contributes one transition and one binding, so the
        // two languages realize exactly the same sequence lengths. The
        // collapsed sets themselves may differ in size in either direction:
        // one control sequence can carry several binding sequences and one
        // binding sequence can label several transition sequences.
        let control_lens: BTreeSet<usize> = langs.control.iter().map(Vec::len).collect();
        let data_lens: BTreeSet<usize> = langs.data.iter().map(Vec::len).collect();
        assert_eq!(control_lens, data_lens);
    }
}

#[test]
fn graph_quotient_and_reachability_are_stable() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe02);
    for _ in 0..40 {
        let net = random_vpn(&mut rng, &VpnGenConfig::default());
        let ct = build_ct(&net, &bounds()).expect("explores");
        let cg = ct_to_cg(&ct);
        assert!(cg.node_count() <= ct.len());

        let root = net.initial_configuration();
        let r1 = reachability_set(&cg, &root).expect("reaches");
        let r2 = reachability_set(&cg, &root).expect("reaches");
        assert_eq!(r1, r2, "reachability is a pure function of the graph");
        assert!(r1.contains(&root), "a configuration reaches itself");
    }
}

#[test]
fn any_anchor_language_contains_root_anchored() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe03);
    for _ in 0..20 {
        let net = random_vpn(&mut rng, &VpnGenConfig::default());
        let ct = build_ct(&net, &bounds()).expect("explores");
        let rooted = languages_with_options(&ct, 3, 100_000, Anchor::Root);
        let anywhere = languages_with_options(&ct, 3, 100_000, Anchor::Any);
        assert!(rooted.control.is_subset(&anywhere.control));
        assert!(rooted.data.is_subset(&anywhere.data));
    }
}

#[test]
fn language_cap_sets_truncation() {
    // A branchy net with more than four sequences under a tiny cap.
    let mut rng = ChaCha8Rng::seed_from_u64(0xbe04);
    loop {
        let net = random_vpn(&mut rng, &VpnGenConfig::default());
        let ct = build_ct(&net, &bounds()).expect("explores");
        let full = languages_with_options(&ct, 6, 100_000, Anchor::Root);
        if full.control.len() > 4 {
            let capped = languages_with_options(&ct, 6, 4, Anchor::Root);
            assert!(capped.truncated);
            assert!(capped.control.len() <= 4);
            return;
        }
    }
}
