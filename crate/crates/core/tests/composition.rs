//! Desk-scale regression for the merge operators: liveness verdicts of the
//! merged nets match the expected correlations for each merge style.

use vpnet_core::compose::{
    check_liveness, check_liveness_excluding, merge_shared_virtual, merge_sync, LivenessVerdict,
    SharedPlaceSpec, SyncMergeSpec,
};
use vpnet_core::decl::{ArcDecl, NetDecl, TransDecl};
use vpnet_core::net::PlaceClass;
use vpnet_core::space::{build_ct, binding_function, ExplorationBounds};
use vpnet_core::term::Guard;
use vpnet_core::VpnNet;

/// Component holding one tuple token that its transition keeps cycling.
fn tuple_loop(place: &str, trans: &str, var: &str, token: &str) -> NetDecl {
    let mut d = NetDecl::new();
    d.constant(token, 1).variable(var);
    d.place(place, 1, PlaceClass::Process);
    let mut t = TransDecl::new(trans);
    t.inputs.push(ArcDecl::tuples(place, &[&[var]]));
    t.outputs.push(ArcDecl::tuples(place, &[&[var]]));
    d.transition(t);
    d.mark(place, &[&[token]]);
    d
}

#[test]
fn sync_merge_with_disjoint_variables_is_live() {
    let n1 = tuple_loop("a", "t1", "x", "c1");
    let n2 = tuple_loop("b", "t2", "y", "c2");
    let spec = SyncMergeSpec {
        bridge: "t".into(),
        guard: Guard::True,
        take_left: ("a".into(), vec![(1, vec!["x".into()])]),
        take_right: ("b".into(), vec![(1, vec!["y".into()])]),
        give_left: Some(("a".into(), vec![(1, vec!["x".into()])])),
        give_right: Some(("b".into(), vec![(1, vec!["y".into()])])),
    };
    let merged = merge_sync(&n1, &n2, &spec).expect("merges");
    assert!(merged.validate().is_valid());
    let verdict = check_liveness(&merged, &ExplorationBounds::default()).expect("checks");
    assert_eq!(verdict, LivenessVerdict::Live);
}

#[test]
fn sync_merge_with_incompatible_vocabularies_is_not_live() {
    // Both expressions share the variable x, but the components' tokens can
    // never agree, so the bridge stays dead.
    let n1 = tuple_loop("a", "t1", "x", "c1");
    let n2 = tuple_loop("b", "t2", "x", "c2");
    let spec = SyncMergeSpec {
        bridge: "t".into(),
        guard: Guard::True,
        take_left: ("a".into(), vec![(1, vec!["x".into()])]),
        take_right: ("b".into(), vec![(1, vec!["x".into()])]),
        give_left: Some(("a".into(), vec![(1, vec!["x".into()])])),
        give_right: Some(("b".into(), vec![(1, vec!["x".into()])])),
    };
    let merged = merge_sync(&n1, &n2, &spec).expect("merges");
    let net = &merged;
    let ct = build_ct(net, &ExplorationBounds::default()).expect("explores");
    let bridge = net.transition_id("t").unwrap();
    assert!(
        binding_function(&ct, bridge).unwrap().is_empty(),
        "the bridge never fires"
    );
    let verdict = check_liveness(net, &ExplorationBounds::default()).expect("checks");
    assert!(matches!(
        verdict,
        LivenessVerdict::NotLive { transition, .. } if transition == bridge
    ));
}

#[test]
fn sync_merge_with_empty_partner_marking_leaves_bridge_dead() {
    let n1 = tuple_loop("a", "t1", "x", "c1");
    let mut n2 = tuple_loop("b", "t2", "y", "c2");
    n2.marking.clear();
    let spec = SyncMergeSpec {
        bridge: "t".into(),
        guard: Guard::True,
        take_left: ("a".into(), vec![(1, vec!["x".into()])]),
        take_right: ("b".into(), vec![(1, vec!["y".into()])]),
        give_left: None,
        give_right: None,
    };
    let merged = merge_sync(&n1, &n2, &spec).expect("merges");
    let ct = build_ct(&merged, &ExplorationBounds::default()).expect("explores");
    let bridge = merged.transition_id("t").unwrap();
    assert!(binding_function(&ct, bridge).unwrap().is_empty());
}

/// Requester half of the request-response pattern: sends a request tagged
/// `req` into the shared virtual place, then waits for a `res` reply.
fn requester() -> NetDecl {
    let mut d = NetDecl::new();
    d.constant("chan", 1)
        .constant("rq", 1)
        .constant("rs", 1)
        .variable("S");
    d.place("p1", 1, PlaceClass::Process)
        .place("wait1", 1, PlaceClass::Process)
        .place("dir1", 1, PlaceClass::Data);
    let mut t1 = TransDecl::new("t1");
    t1.inputs.push(ArcDecl::tuples("p1", &[&["eps"]]));
    t1.inputs.push(ArcDecl::tuples("dir1", &[&["S"]]));
    t1.inputs.push(ArcDecl::empty("S"));
    t1.outputs.push(ArcDecl::tuples("dir1", &[&["S"]]));
    t1.outputs.push(ArcDecl::tuples("S", &[&["rq"]]));
    t1.outputs.push(ArcDecl::tuples("wait1", &[&["eps"]]));
    d.transition(t1);
    let mut t2 = TransDecl::new("t2");
    t2.inputs.push(ArcDecl::tuples("wait1", &[&["eps"]]));
    t2.inputs.push(ArcDecl::tuples("S", &[&["rs"]]));
    t2.outputs.push(ArcDecl::tuples("p1", &[&["eps"]]));
    d.transition(t2);
    d.gamma_entry("S", &["chan"]);
    d.mark("p1", &[&["eps"]]);
    d.mark("dir1", &[&["chan"]]);
    d
}

/// Responder half: consumes the request and answers through the same shared
/// virtual place. `reject` swaps the guard so no request is ever accepted.
fn responder(reject: bool) -> NetDecl {
    let mut d = NetDecl::new();
    d.constant("chan", 1)
        .constant("rq", 1)
        .constant("rs", 1)
        .variable("S");
    d.place("chan", 1, PlaceClass::Interface)
        .place("p2", 1, PlaceClass::Process)
        .place("busy2", 1, PlaceClass::Process)
        .place("dir2", 1, PlaceClass::Data);
    let mut t3 = TransDecl::new("t3");
    t3.inputs.push(ArcDecl::tuples("p2", &[&["eps"]]));
    t3.inputs.push(ArcDecl::tuples("S", &[&["rq"]]));
    t3.outputs.push(ArcDecl::tuples("busy2", &[&["eps"]]));
    if reject {
        t3.guard = Guard::Ne("rq".into(), "rq".into());
    }
    d.transition(t3);
    let mut t4 = TransDecl::new("t4");
    t4.inputs.push(ArcDecl::tuples("busy2", &[&["eps"]]));
    t4.inputs.push(ArcDecl::tuples("dir2", &[&["S"]]));
    t4.inputs.push(ArcDecl::empty("S"));
    t4.outputs.push(ArcDecl::tuples("dir2", &[&["S"]]));
    t4.outputs.push(ArcDecl::tuples("S", &[&["rs"]]));
    t4.outputs.push(ArcDecl::tuples("p2", &[&["eps"]]));
    d.transition(t4);
    d.gamma_entry("S", &["chan"]);
    d.mark("p2", &[&["eps"]]);
    d.mark("dir2", &[&["chan"]]);
    d
}

fn shared_spec() -> SharedPlaceSpec {
    SharedPlaceSpec {
        shared: "S".into(),
        requester_send: "t1".into(),
        requester_recv: "t2".into(),
        responder_recv: "t3".into(),
        responder_send: "t4".into(),
    }
}

#[test]
fn request_response_over_shared_virtual_place_is_live() {
    let merged = merge_shared_virtual(&requester(), &responder(false), &shared_spec())
        .expect("merges");
    assert!(merged.validate().is_valid());
    let verdict = check_liveness(&merged, &ExplorationBounds::default()).expect("checks");
    assert_eq!(verdict, LivenessVerdict::Live);
}

#[test]
fn rejecting_responder_makes_the_pair_not_live() {
    let merged = merge_shared_virtual(&requester(), &responder(true), &shared_spec())
        .expect("merges");
    let verdict = check_liveness(&merged, &ExplorationBounds::default()).expect("checks");
    assert!(matches!(verdict, LivenessVerdict::NotLive { .. }));
}

#[test]
fn empty_constraint_sets_kill_the_request_transition() {
    let mut n1 = requester();
    n1.gamma.clear();
    let mut n2 = responder(false);
    n2.gamma.clear();
    let merged = merge_shared_virtual(&n1, &n2, &shared_spec()).expect("merges");
    let ct = build_ct(&merged, &ExplorationBounds::default()).expect("explores");
    let t1 = merged.transition_id("t1").unwrap();
    assert!(
        binding_function(&ct, t1).unwrap().is_empty(),
        "no constraint entry, no instantiation"
    );
    assert!(matches!(
        check_liveness(&merged, &ExplorationBounds::default()).unwrap(),
        LivenessVerdict::NotLive { .. }
    ));
}

#[test]
fn shared_transition_names_are_rejected() {
    let n1 = requester();
    let mut n2 = responder(false);
    n2.transitions[0].name = "t1".into();
    let err = merge_shared_virtual(&n1, &n2, &shared_spec()).unwrap_err();
    assert!(err.to_string().contains("share transition"));
}

#[test]
fn terminating_workflows_are_not_live_but_final_exclusion_accepts_the_end() {
    // A single step from start to end: dead after one firing, unless the end
    // configuration is declared final and excluded.
    let mut d = NetDecl::new();
    d.place("start", 1, PlaceClass::InitialFinal)
        .place("end", 1, PlaceClass::InitialFinal);
    let mut t = TransDecl::new("go");
    t.inputs.push(ArcDecl::tuples("start", &[&["eps"]]));
    t.outputs.push(ArcDecl::tuples("end", &[&["eps"]]));
    d.transition(t);
    d.mark("start", &[&["eps"]]);
    let net = VpnNet::from_decl(&d).unwrap();
    let plain = check_liveness(&net, &ExplorationBounds::default()).unwrap();
    assert!(matches!(plain, LivenessVerdict::NotLive { .. }));

    let end = net.universe().lookup("end").unwrap();
    let verdict =
        check_liveness_excluding(&net, &ExplorationBounds::default(), &[end].into()).unwrap();
    // The end state is exempt, but the start state still never re-enables
    // `go` on any continuation that matters: it does reach an enabled state
    // (itself), so the workflow body passes.
    assert_eq!(verdict, LivenessVerdict::Live);
}
