//! Scheme invariants on the mock backend, where every element is its own
//! discrete log and the verification equation can be recomputed with plain
//! integers.

use mtao_core::engine::{MockG1, MockScalar, TAG_H0, TAG_H1};
use mtao_core::scheme::{self, h0_input, h1_input, AggregateBundle, BundleSigner};
use mtao_core::{Envelope, Mock1009, MockEngine, PairingEngine};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const Q: u64 = 1009;

/// Signers as (TA index, identity, message).
type Shape = Vec<(usize, Vec<u8>, Vec<u8>)>;

fn shape() -> impl Strategy<Value = (usize, Shape)> {
    (1usize..=4).prop_flat_map(|l| {
        let signer =
            (0..l, proptest::collection::vec(any::<u8>(), 1..12), proptest::collection::vec(any::<u8>(), 0..24));
        (Just(l), proptest::collection::vec(signer, 0..12)).prop_map(|(l, mut extra)| {
            // One signer per TA first, then the rest; identities are made
            // unique by prefixing their position.
            let mut all: Shape = (0..l).map(|t| (t, vec![b'S'], vec![t as u8])).collect();
            all.append(&mut extra);
            for (i, s) in all.iter_mut().enumerate() {
                let mut id = format!("{i}:").into_bytes();
                id.extend_from_slice(&s.1);
                s.1 = id;
            }
            (l, all)
        })
    })
}

struct Built {
    engine: MockEngine,
    params: scheme::SystemParams<Mock1009>,
    kappas: Vec<u64>,
    bundle: AggregateBundle<Mock1009>,
}

fn build(seed: u64, l: usize, signers: &Shape) -> Built {
    let engine = MockEngine::new();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let (master, params) = scheme::root_setup(&engine, &mut rng);
    let tas: Vec<_> = (0..l)
        .map(|t| scheme::lowerlevel_setup(&engine, &params, &master, format!("T{t}").as_bytes(), &mut rng).unwrap())
        .collect();
    let mut groups: Vec<_> = tas.iter().map(|(_, r)| (r.clone(), Vec::new())).collect();
    for (t, id, msg) in signers {
        let key = scheme::extract(&engine, &tas[*t].0, &tas[*t].1, id).unwrap();
        let sig = scheme::sign(&engine, &key, &tas[*t].1, msg).unwrap();
        groups[*t].1.push((BundleSigner::new(id.clone(), msg.clone()), sig));
    }
    let kappas = tas.iter().map(|(s, _)| s.scalar().value() as u64).collect();
    Built { engine, params, kappas, bundle: AggregateBundle::assemble(groups).unwrap() }
}

/// sum_i kappa_i * sum_j (H0(ID_j, 0) + h_j * H0(ID_j, 1)) mod q, with every
/// value read back from the engine as an integer.
fn integer_omega(b: &Built) -> u64 {
    let e = &b.engine;
    let mut total = 0u64;
    for (g, kappa) in b.bundle.groups.iter().zip(&b.kappas) {
        let mut inner = 0u64;
        for s in &g.signers {
            let a0 = e.hash_to_g1(TAG_H0, &h0_input(&s.identity, 0)).value() as u64;
            let a1 = e.hash_to_g1(TAG_H0, &h0_input(&s.identity, 1)).value() as u64;
            let h: MockScalar = e.hash_to_scalar(TAG_H1, &h1_input(&s.message, &s.identity, &g.ta));
            inner = (inner + a0 + h.value() as u64 * a1) % Q;
        }
        total = (total + kappa * inner) % Q;
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn honest_bundles_verify_at_l_plus_one((l, signers) in shape(), seed in any::<u64>()) {
        let b = build(seed, l, &signers);
        let r = scheme::verify(&b.engine, &b.params, &b.bundle).unwrap();
        prop_assert!(r.valid);
        prop_assert_eq!(r.main_equation_pairings, l as u64 + 1);
        prop_assert_eq!(r.certificate_pairings, 2 * l as u64);
        prop_assert_eq!(r.signers, signers.len());
    }

    #[test]
    fn aggregate_matches_the_integer_oracle((l, signers) in shape(), seed in any::<u64>()) {
        let b = build(seed, l, &signers);
        prop_assert_eq!(b.bundle.aggregate.value() as u64, integer_omega(&b));
    }

    #[test]
    fn any_other_omega_is_rejected((l, signers) in shape(), seed in any::<u64>(), shift in 1u64..Q) {
        let mut b = build(seed, l, &signers);
        let v = (b.bundle.aggregate.value() as u64 + shift) % Q;
        b.bundle.aggregate = MockG1::new(v);
        prop_assert!(!scheme::verify(&b.engine, &b.params, &b.bundle).unwrap().valid);
    }

    #[test]
    fn order_within_a_group_does_not_matter((l, signers) in shape(), seed in any::<u64>()) {
        let mut b = build(seed, l, &signers);
        for g in &mut b.bundle.groups {
            g.signers.reverse();
        }
        b.bundle.groups.reverse();
        prop_assert!(scheme::verify(&b.engine, &b.params, &b.bundle).unwrap().valid);
    }

    #[test]
    fn bundles_survive_both_envelopes((l, signers) in shape(), seed in any::<u64>()) {
        let b = build(seed, l, &signers);
        let via_json = AggregateBundle::<Mock1009>::from_json(&b.bundle.to_json()).unwrap();
        let via_bin = AggregateBundle::<Mock1009>::from_binary(&b.bundle.to_binary()).unwrap();
        prop_assert_eq!(&via_json, &b.bundle);
        prop_assert_eq!(&via_bin, &b.bundle);
        prop_assert_eq!(via_bin.to_binary(), b.bundle.to_binary());
    }
}

#[test]
fn moving_a_signer_to_another_ta_is_rejected() {
    let signers: Shape = vec![
        (0, b"a".to_vec(), b"m1".to_vec()),
        (1, b"b".to_vec(), b"m2".to_vec()),
        (1, b"c".to_vec(), b"m3".to_vec()),
    ];
    let mut b = build(5, 2, &signers);
    let moved = b.bundle.groups[1].signers.pop().unwrap();
    b.bundle.groups[0].signers.push(moved);
    assert!(!scheme::verify(&b.engine, &b.params, &b.bundle).unwrap().valid);
}
