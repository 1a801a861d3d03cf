//! Fixtures shared by the benchmarks: a production setup with `l` TAs and
//! `n` signers spread round-robin across them.

use mtao_core::engine::TAG_H0;
use mtao_core::scheme::{self, AggregateBundle, BundleSigner, Signature, SignerKey, SystemParams, TaRecord};
use mtao_core::{Bls12, Bls12Engine, PairingEngine};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub struct Fixture {
    pub engine: Bls12Engine,
    pub params: SystemParams<Bls12>,
    pub tas: Vec<TaRecord<Bls12>>,
    /// (TA index, key, message) per signer.
    pub signers: Vec<(usize, SignerKey<Bls12>, Vec<u8>)>,
    pub signatures: Vec<Signature<Bls12>>,
    pub bundle: AggregateBundle<Bls12>,
}

pub fn fixture(n: usize, l: usize) -> Fixture {
    assert!(l >= 1 && n >= l, "every TA needs a signer");
    let engine = Bls12Engine::new();
    let mut rng = ChaCha20Rng::seed_from_u64(((n as u64) << 8) | l as u64);
    let (master, params) = scheme::root_setup(&engine, &mut rng);
    let tas: Vec<_> = (0..l)
        .map(|t| {
            scheme::lowerlevel_setup(&engine, &params, &master, format!("bench-TA-{t}").as_bytes(), &mut rng).unwrap()
        })
        .collect();
    let mut signers = Vec::new();
    let mut signatures = Vec::new();
    let mut groups: Vec<_> = tas.iter().map(|(_, r)| (r.clone(), Vec::new())).collect();
    for i in 0..n {
        let t = i % l;
        let (secret, record) = &tas[t];
        let id = format!("bench-signer-{i}");
        let msg = format!("bench message {i}").into_bytes();
        let key = scheme::extract(&engine, secret, record, id.as_bytes()).unwrap();
        let sig = scheme::sign(&engine, &key, record, &msg).unwrap();
        groups[t].1.push((BundleSigner::new(id, msg.clone()), sig));
        signers.push((t, key, msg));
        signatures.push(sig);
    }
    let bundle = AggregateBundle::assemble(groups).unwrap();
    Fixture { engine, params, tas: tas.into_iter().map(|(_, r)| r).collect(), signers, signatures, bundle }
}

/// One H0 evaluation, the dominant hashing cost in extract and verify.
pub fn hash_identity(engine: &Bls12Engine, identity: &[u8]) -> <Bls12 as mtao_core::PairingGroups>::G1 {
    engine.hash_to_g1(TAG_H0, &scheme::h0_input(identity, 0))
}
