//! End-to-end use of the library on the production backend.

use mtao_core::keystore::KeyStore;
use mtao_core::scheme::{self, AggregateBundle, BundleSigner, Rejection, SignerKey, TaRecord};
use mtao_core::{Bls12, Bls12Engine, Envelope, KeystoreError, PairingEngine, SchemeError};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[test]
fn two_tas_through_a_store_and_the_codec() {
    let engine = Bls12Engine::new();
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let (master, params) = scheme::root_setup(&engine, &mut rng);
    let (s1, t1) = scheme::lowerlevel_setup(&engine, &params, &master, b"hospital", &mut rng).unwrap();
    let (s2, t2) = scheme::lowerlevel_setup(&engine, &params, &master, b"registry", &mut rng).unwrap();
    assert!(scheme::verify_certificate(&engine, &params, &t1));

    let dir = tempfile::tempdir().unwrap();
    let store = KeyStore::<Bls12>::open(dir.path().join("keys.jnl")).unwrap();
    let plan: [(&[u8], &TaRecord<Bls12>, &[u8]); 3] =
        [(b"alice", &t1, b"reading 1"), (b"bob", &t1, b"reading 2"), (b"carol", &t2, b"record 9")];
    let mut slots = vec![(t1.clone(), Vec::new()), (t2.clone(), Vec::new())];
    for (id, ta, msg) in plan {
        let secret = if ta == &t1 { &s1 } else { &s2 };
        let key = scheme::extract(&engine, secret, ta, id).unwrap();
        assert!(scheme::check_key(&engine, &key, ta));
        // Keys travel as envelopes.
        let key = SignerKey::<Bls12>::from_json(&key.to_json()).unwrap();
        let entry = store.store_key(key).unwrap();
        let sig = store.sign_once(&engine, entry, ta, msg).unwrap();
        assert!(matches!(store.sign_once(&engine, entry, ta, b"other"), Err(KeystoreError::KeyAlreadyUsed(_))));
        slots[usize::from(ta != &t1)].1.push((BundleSigner::new(id, msg), sig));
    }
    let bundle = AggregateBundle::assemble(slots).unwrap();
    let bundle = AggregateBundle::<Bls12>::from_binary(&bundle.to_binary()).unwrap();
    let before = engine.pairing_count();
    let report = scheme::verify(&engine, &params, &bundle).unwrap();
    assert!(report.valid);
    assert_eq!(report.main_equation_pairings, 3);
    assert_eq!(report.certificate_pairings, 4);
    assert_eq!(engine.pairing_count() - before, 7);
}

#[test]
fn a_ta_not_certified_by_this_root_is_rejected() {
    let engine = Bls12Engine::new();
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let (_master, params) = scheme::root_setup(&engine, &mut rng);
    let (other_master, other_params) = scheme::root_setup(&engine, &mut rng);
    let (secret, rogue) = scheme::lowerlevel_setup(&engine, &other_params, &other_master, b"rogue", &mut rng).unwrap();
    let key = scheme::extract(&engine, &secret, &rogue, b"mallory").unwrap();
    let sig = scheme::sign(&engine, &key, &rogue, b"m").unwrap();
    let bundle = AggregateBundle::assemble(vec![(rogue, vec![(BundleSigner::new("mallory", "m"), sig)])]).unwrap();
    let r = scheme::verify(&engine, &params, &bundle).unwrap();
    assert!(!r.valid);
    assert_eq!(r.rejection, Some(Rejection::InvalidCertificate { group: 0 }));
    assert_eq!(r.main_equation_pairings, 0);
}

#[test]
fn a_key_for_one_ta_cannot_sign_under_another() {
    let engine = Bls12Engine::new();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let (master, params) = scheme::root_setup(&engine, &mut rng);
    let (s1, t1) = scheme::lowerlevel_setup(&engine, &params, &master, b"one", &mut rng).unwrap();
    let (_, t2) = scheme::lowerlevel_setup(&engine, &params, &master, b"two", &mut rng).unwrap();
    let key = scheme::extract(&engine, &s1, &t1, b"alice").unwrap();
    assert_eq!(scheme::sign(&engine, &key, &t2, b"m"), Err(SchemeError::KeyMismatch));
    assert!(!scheme::check_key(&engine, &key, &t2));
    // A TA secret that does not match the record is refused outright.
    assert_eq!(scheme::extract(&engine, &s1, &t2, b"alice").unwrap_err(), SchemeError::KeyMismatch);
}

#[test]
fn aggregating_nothing_is_an_error() {
    assert_eq!(scheme::aggregate::<Bls12>(&[]), Err(SchemeError::EmptyInput));
}
