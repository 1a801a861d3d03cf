//! The six algorithms: root setup, lower-level TA setup (with the root's
//! certificate), key extraction, signing, aggregation and verification.
//!
//! With groups written additively, the relations are
//!
//! * `y = kappa*g2`, `y_i = kappa_i*g2`, `cert_i = kappa*H_cert(ID_Ti, y_i)`
//! * `s_b = kappa_i*H0(ID, b)` for `b` in {0, 1}
//! * `sigma = s_0 + h*s_1` with `h = H1(m, ID, cert_i)`
//! * `Omega = sum(sigma)`, accepted iff
//!   `e(Omega, g2) = prod_i e(sum_{j in group i} (id_j0 + h_j*id_j1), y_i)`.

mod oracles;
mod types;

use std::collections::HashSet;

use rand::RngCore;
use thiserror::Error;

use crate::engine::{GroupElement, PairingEngine, PairingError, PairingGroups, ScalarField, TAG_CERT};

pub use oracles::{RandomOracles, StandardOracles};
pub use types::{
    certified_payload, h0_input, h1_input, AggregateBundle, BundleGroup, BundleSigner, MasterSecret, Signature,
    SignerKey, SystemParams, TaFingerprint, TaRecord, TaSecret,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemeError {
    #[error("identity must be non-empty")]
    EmptyIdentity,
    #[error("empty input")]
    EmptyInput,
    #[error("secret scalar must be non-zero")]
    ZeroSecret,
    #[error("key or secret does not belong to this TA")]
    KeyMismatch,
    #[error("parameters are for engine {found}, expected {expected}")]
    EngineMismatch { expected: String, found: String },
    #[error(transparent)]
    Pairing(#[from] PairingError),
    #[error("random oracle failure: {0}")]
    Oracle(String),
}

type G1<E> = <<E as PairingEngine>::Groups as PairingGroups>::G1;
type G2<E> = <<E as PairingEngine>::Groups as PairingGroups>::G2;

pub fn root_setup<E: PairingEngine, R: RngCore + ?Sized>(
    engine: &E,
    rng: &mut R,
) -> (MasterSecret<E::Groups>, SystemParams<E::Groups>) {
    let master = MasterSecret::new(ScalarField::random_nonzero(rng)).expect("sampled from Z_q^*");
    let params = root_setup_with_secret(engine, &master);
    (master, params)
}

/// Root setup with a caller-chosen kappa (test vectors, key ceremonies).
pub fn root_setup_with_secret<E: PairingEngine>(
    engine: &E,
    master: &MasterSecret<E::Groups>,
) -> SystemParams<E::Groups> {
    SystemParams {
        engine_id: engine.id().to_string(),
        g1: engine.g1(),
        g2: engine.g2(),
        master_public: engine.g2().scalar_mul(master.scalar()),
    }
}

fn check_engine<E: PairingEngine>(engine: &E, params: &SystemParams<E::Groups>) -> Result<(), SchemeError> {
    if params.engine_id != engine.id() || params.g1 != engine.g1() || params.g2 != engine.g2() {
        return Err(SchemeError::EngineMismatch { expected: engine.id().into(), found: params.engine_id.clone() });
    }
    Ok(())
}

pub fn lowerlevel_setup<E: PairingEngine, R: RngCore + ?Sized>(
    engine: &E,
    params: &SystemParams<E::Groups>,
    master: &MasterSecret<E::Groups>,
    ta_identity: &[u8],
    rng: &mut R,
) -> Result<(TaSecret<E::Groups>, TaRecord<E::Groups>), SchemeError> {
    let secret = TaSecret::new(ScalarField::random_nonzero(rng))?;
    let record = lowerlevel_setup_with_secret(engine, params, master, ta_identity, &secret)?;
    Ok((secret, record))
}

/// TA side computes y_i from its own kappa_i; the root certifies it.
pub fn lowerlevel_setup_with_secret<E: PairingEngine>(
    engine: &E,
    params: &SystemParams<E::Groups>,
    master: &MasterSecret<E::Groups>,
    ta_identity: &[u8],
    secret: &TaSecret<E::Groups>,
) -> Result<TaRecord<E::Groups>, SchemeError> {
    check_engine(engine, params)?;
    let public_key = engine.g2().scalar_mul(secret.scalar());
    certify(engine, master, ta_identity, public_key)
}

/// The root's half of enrollment: sign (ID_Ti, y_i) with the master key.
pub fn certify<E: PairingEngine>(
    engine: &E,
    master: &MasterSecret<E::Groups>,
    ta_identity: &[u8],
    public_key: G2<E>,
) -> Result<TaRecord<E::Groups>, SchemeError> {
    if ta_identity.is_empty() {
        return Err(SchemeError::EmptyIdentity);
    }
    let digest = engine.hash_to_g1(TAG_CERT, &types::certified_payload::<E::Groups>(ta_identity, &public_key));
    Ok(TaRecord { identity: ta_identity.to_vec(), public_key, certificate: digest.scalar_mul(master.scalar()) })
}

/// `e(cert, g2) = e(H_cert(payload), y)`, evaluated as one two-term product.
pub fn verify_certificate<E: PairingEngine>(
    engine: &E,
    params: &SystemParams<E::Groups>,
    ta: &TaRecord<E::Groups>,
) -> bool {
    if ta.identity.is_empty() || ta.public_key.is_identity() || ta.certificate.is_identity() {
        return false;
    }
    let digest = engine.hash_to_g1(TAG_CERT, &ta.certified_payload());
    engine
        .multi_pair(&[(ta.certificate, params.g2), (-digest, params.master_public)])
        .map(|gt| gt.ct_eq(&GroupElement::identity()))
        .unwrap_or(false)
}

pub fn extract<E: PairingEngine>(
    engine: &E,
    ta_secret: &TaSecret<E::Groups>,
    ta: &TaRecord<E::Groups>,
    signer_id: &[u8],
) -> Result<SignerKey<E::Groups>, SchemeError> {
    if engine.g2().scalar_mul(ta_secret.scalar()) != ta.public_key {
        return Err(SchemeError::KeyMismatch);
    }
    extract_with(&mut StandardOracles::new(engine), ta_secret, ta, signer_id)
}

/// Extraction against arbitrary oracles. Does not check that `ta_secret`
/// matches `ta`.
pub fn extract_with<P: PairingGroups, O: RandomOracles<P> + ?Sized>(
    oracles: &mut O,
    ta_secret: &TaSecret<P>,
    ta: &TaRecord<P>,
    signer_id: &[u8],
) -> Result<SignerKey<P>, SchemeError> {
    if signer_id.is_empty() {
        return Err(SchemeError::EmptyIdentity);
    }
    let id0 = oracles.h0(signer_id, 0)?;
    let id1 = oracles.h0(signer_id, 1)?;
    Ok(SignerKey {
        identity: signer_id.to_vec(),
        ta_fingerprint: ta.fingerprint(),
        s0: id0.scalar_mul(ta_secret.scalar()),
        s1: id1.scalar_mul(ta_secret.scalar()),
    })
}

/// Public well-formedness of a key: `e(s_b, g2) = e(H0(ID, b), y_i)`.
pub fn check_key<E: PairingEngine>(engine: &E, key: &SignerKey<E::Groups>, ta: &TaRecord<E::Groups>) -> bool {
    check_key_with(engine, &mut StandardOracles::new(engine), key, ta).unwrap_or(false)
}

pub fn check_key_with<E: PairingEngine, O: RandomOracles<E::Groups> + ?Sized>(
    engine: &E,
    oracles: &mut O,
    key: &SignerKey<E::Groups>,
    ta: &TaRecord<E::Groups>,
) -> Result<bool, SchemeError> {
    if key.ta_fingerprint != ta.fingerprint() {
        return Ok(false);
    }
    let g2 = engine.g2();
    for (bit, s) in [(0u8, key.s0), (1u8, key.s1)] {
        let id = oracles.h0(&key.identity, bit)?;
        let gt = engine.multi_pair(&[(s, g2), (-id, ta.public_key)])?;
        if !gt.ct_eq(&GroupElement::identity()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The raw signing algorithm. One-time use is enforced by the keystore,
/// not here.
pub fn sign<E: PairingEngine>(
    engine: &E,
    key: &SignerKey<E::Groups>,
    ta: &TaRecord<E::Groups>,
    message: &[u8],
) -> Result<Signature<E::Groups>, SchemeError> {
    sign_with(&mut StandardOracles::new(engine), key, ta, message)
}

pub fn sign_with<P: PairingGroups, O: RandomOracles<P> + ?Sized>(
    oracles: &mut O,
    key: &SignerKey<P>,
    ta: &TaRecord<P>,
    message: &[u8],
) -> Result<Signature<P>, SchemeError> {
    if key.ta_fingerprint != ta.fingerprint() {
        return Err(SchemeError::KeyMismatch);
    }
    let h = oracles.h1(message, &key.identity, ta)?;
    Ok(Signature(key.s0 + key.s1.scalar_mul(&h)))
}

/// Omega, the group sum of all signatures.
pub fn aggregate<P: PairingGroups>(signatures: &[Signature<P>]) -> Result<P::G1, SchemeError> {
    let (first, rest) = signatures.split_first().ok_or(SchemeError::EmptyInput)?;
    Ok(rest.iter().fold(first.0, |acc, s| acc + s.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Check every TA certificate against the master public key. Disable
    /// only when the caller already validated the TA registry.
    pub check_certificates: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { check_certificates: true }
    }
}

impl VerifyOptions {
    pub fn trusted_registry() -> Self {
        VerifyOptions { check_certificates: false }
    }
}

/// Why a bundle was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    EmptyBundle,
    EmptyGroup { group: usize },
    EmptyIdentity { group: usize, index: usize },
    DuplicateSigner { group: usize, index: usize },
    InvalidCertificate { group: usize },
    EquationMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyReport {
    pub valid: bool,
    pub rejection: Option<Rejection>,
    /// n.
    pub signers: usize,
    /// l.
    pub ta_groups: usize,
    /// Pairings spent on the main equation: l + 1 when it is reached.
    pub main_equation_pairings: u64,
    /// Pairings spent on certificate checks: 2 per distinct TA.
    pub certificate_pairings: u64,
}

impl VerifyReport {
    fn reject(bundle_signers: usize, groups: usize, cert_pairings: u64, why: Rejection) -> Self {
        VerifyReport {
            valid: false,
            rejection: Some(why),
            signers: bundle_signers,
            ta_groups: groups,
            main_equation_pairings: 0,
            certificate_pairings: cert_pairings,
        }
    }

    pub fn total_pairings(&self) -> u64 {
        self.main_equation_pairings + self.certificate_pairings
    }
}

pub fn verify<E: PairingEngine>(
    engine: &E,
    params: &SystemParams<E::Groups>,
    bundle: &AggregateBundle<E::Groups>,
) -> Result<VerifyReport, SchemeError> {
    verify_with(engine, &mut StandardOracles::new(engine), params, bundle, VerifyOptions::default())
}

/// Verification against arbitrary oracles.
///
/// Pairing counts in the report are deltas of the engine's shared counter
/// and are exact only when no other thread uses the engine concurrently.
pub fn verify_with<E: PairingEngine, O: RandomOracles<E::Groups> + ?Sized>(
    engine: &E,
    oracles: &mut O,
    params: &SystemParams<E::Groups>,
    bundle: &AggregateBundle<E::Groups>,
    options: VerifyOptions,
) -> Result<VerifyReport, SchemeError> {
    check_engine(engine, params)?;
    let n = bundle.signer_count();
    let l = bundle.group_count();
    if n == 0 {
        return Ok(VerifyReport::reject(n, l, 0, Rejection::EmptyBundle));
    }

    let mut seen = HashSet::new();
    for (gi, group) in bundle.groups.iter().enumerate() {
        if group.signers.is_empty() {
            return Ok(VerifyReport::reject(n, l, 0, Rejection::EmptyGroup { group: gi }));
        }
        let fp = group.ta.fingerprint();
        for (si, s) in group.signers.iter().enumerate() {
            if s.identity.is_empty() {
                return Ok(VerifyReport::reject(n, l, 0, Rejection::EmptyIdentity { group: gi, index: si }));
            }
            if !seen.insert((s.identity.as_slice(), fp)) {
                return Ok(VerifyReport::reject(n, l, 0, Rejection::DuplicateSigner { group: gi, index: si }));
            }
        }
    }

    let before = engine.pairing_count();
    if options.check_certificates {
        let mut checked = HashSet::new();
        for (gi, group) in bundle.groups.iter().enumerate() {
            if checked.insert(group.ta.fingerprint()) && !verify_certificate(engine, params, &group.ta) {
                let spent = engine.pairing_count() - before;
                return Ok(VerifyReport::reject(n, l, spent, Rejection::InvalidCertificate { group: gi }));
            }
        }
    }
    let certificate_pairings = engine.pairing_count() - before;

    // e(-Omega, g2) * prod_i e(sum_j (id_j0 + h_j id_j1), y_i) == 1
    let mut terms: Vec<(G1<E>, G2<E>)> = Vec::with_capacity(l + 1);
    terms.push((-bundle.aggregate, params.g2));
    for group in &bundle.groups {
        let mut acc = G1::<E>::identity();
        for s in &group.signers {
            let h = oracles.h1(&s.message, &s.identity, &group.ta)?;
            let id0 = oracles.h0(&s.identity, 0)?;
            let id1 = oracles.h0(&s.identity, 1)?;
            acc = acc + id0 + id1.scalar_mul(&h);
        }
        terms.push((acc, group.ta.public_key));
    }
    let mid = engine.pairing_count();
    let holds = engine.multi_pair(&terms)?.ct_eq(&GroupElement::identity());
    let main_equation_pairings = engine.pairing_count() - mid;

    Ok(VerifyReport {
        valid: holds,
        rejection: (!holds).then_some(Rejection::EquationMismatch),
        signers: n,
        ta_groups: l,
        main_equation_pairings,
        certificate_pairings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Bls12Engine, Mock1009, MockEngine, MockG1, MockHashTable, MockScalar, TAG_H0, TAG_H1};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    // kappa = 7, kappa_1 = 11, CERT-hash = 9, id = (3, 5), h = 4.
    fn mock_single() -> (MockEngine, SystemParams<Mock1009>, TaSecret<Mock1009>, TaRecord<Mock1009>) {
        let ta_payload = types::certified_payload::<Mock1009>(b"T1", &crate::engine::MockG2::new(11));
        let mut table = MockHashTable::new();
        table.program_g1(TAG_CERT, &ta_payload, 9);
        table.program_g1(TAG_H0, &h0_input(b"ID-A", 0), 3);
        table.program_g1(TAG_H0, &h0_input(b"ID-A", 1), 5);
        let engine = MockEngine::with_table(table);
        let master = MasterSecret::new(MockScalar::new(7)).unwrap();
        let params = root_setup_with_secret(&engine, &master);
        let secret = TaSecret::new(MockScalar::new(11)).unwrap();
        let ta = lowerlevel_setup_with_secret(&engine, &params, &master, b"T1", &secret).unwrap();
        (engine, params, secret, ta)
    }

    #[test]
    fn mock_setup_and_certificate() {
        let (engine, params, _, ta) = mock_single();
        assert_eq!(params.master_public.value(), 7);
        assert_eq!(ta.public_key.value(), 11);
        assert_eq!(ta.certificate.value(), 63);
        assert!(verify_certificate(&engine, &params, &ta));
    }

    #[test]
    fn tampered_certificate_rejected_for_every_offset() {
        let (engine, params, _, ta) = mock_single();
        for delta in 1..1009u64 {
            let mut bad = ta.clone();
            bad.certificate = bad.certificate + MockG1::new(delta);
            assert!(!verify_certificate(&engine, &params, &bad), "offset {delta}");
        }
    }

    #[test]
    fn mock_extract_and_sign() {
        let (engine, params, secret, ta) = mock_single();
        let key = extract(&engine, &secret, &ta, b"ID-A").unwrap();
        assert_eq!((key.s0.value(), key.s1.value()), (33, 55));
        assert!(check_key(&engine, &key, &ta));

        let mut table = engine.table().clone();
        table.program_scalar(TAG_H1, &h1_input(b"m", b"ID-A", &ta), 4);
        let engine = MockEngine::with_table(table);
        let sig = sign(&engine, &key, &ta, b"m").unwrap();
        assert_eq!(sig.0.value(), 253);
        assert_eq!(sign(&engine, &key, &ta, b"m").unwrap(), sig);

        let bundle = AggregateBundle::assemble(vec![(ta, vec![(BundleSigner::new("ID-A", "m"), sig)])]).unwrap();
        let report = verify(&engine, &params, &bundle).unwrap();
        assert!(report.valid);
        assert_eq!(report.main_equation_pairings, 2);
        assert_eq!(report.certificate_pairings, 2);
    }

    #[test]
    fn error_paths() {
        let (engine, params, secret, ta) = mock_single();
        assert_eq!(extract(&engine, &secret, &ta, b""), Err(SchemeError::EmptyIdentity));
        let other = TaSecret::new(MockScalar::new(12)).unwrap();
        assert_eq!(extract(&engine, &other, &ta, b"x"), Err(SchemeError::KeyMismatch));
        assert!(MasterSecret::<Mock1009>::new(MockScalar::new(0)).is_err());
        assert_eq!(aggregate::<Mock1009>(&[]), Err(SchemeError::EmptyInput));

        let ta2 = lowerlevel_setup_with_secret(
            &engine,
            &params,
            &MasterSecret::new(MockScalar::new(7)).unwrap(),
            b"T2",
            &secret,
        )
        .unwrap();
        let key = extract(&engine, &secret, &ta, b"ID-A").unwrap();
        assert_eq!(sign(&engine, &key, &ta2, b"m"), Err(SchemeError::KeyMismatch));
    }

    #[test]
    fn duplicate_and_empty_bundles_rejected() {
        let (engine, params, secret, ta) = mock_single();
        let key = extract(&engine, &secret, &ta, b"ID-A").unwrap();
        let s1 = sign(&engine, &key, &ta, b"one").unwrap();
        let s2 = sign(&engine, &key, &ta, b"two").unwrap();
        let dup = AggregateBundle::assemble(vec![(
            ta.clone(),
            vec![(BundleSigner::new("ID-A", "one"), s1), (BundleSigner::new("ID-A", "two"), s2)],
        )])
        .unwrap();
        let r = verify(&engine, &params, &dup).unwrap();
        assert_eq!(r.rejection, Some(Rejection::DuplicateSigner { group: 0, index: 1 }));

        let empty = AggregateBundle::<Mock1009> { groups: vec![], aggregate: MockG1::new(0) };
        assert_eq!(verify(&engine, &params, &empty).unwrap().rejection, Some(Rejection::EmptyBundle));
    }

    #[test]
    fn empty_message_is_legal() {
        let (engine, params, secret, ta) = mock_single();
        let key = extract(&engine, &secret, &ta, b"ID-A").unwrap();
        let sig = sign(&engine, &key, &ta, b"").unwrap();
        let bundle = AggregateBundle::assemble(vec![(ta, vec![(BundleSigner::new("ID-A", ""), sig)])]).unwrap();
        assert!(verify(&engine, &params, &bundle).unwrap().valid);
    }

    #[test]
    fn same_identity_under_two_tas() {
        let engine = Bls12Engine::new();
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let (master, params) = root_setup(&engine, &mut rng);
        let (k1, t1) = lowerlevel_setup(&engine, &params, &master, b"T1", &mut rng).unwrap();
        let (k2, t2) = lowerlevel_setup(&engine, &params, &master, b"T2", &mut rng).unwrap();
        let a = extract(&engine, &k1, &t1, b"alice").unwrap();
        let b = extract(&engine, &k2, &t2, b"alice").unwrap();
        assert_ne!(a.s0, b.s0);
        let bundle = AggregateBundle::assemble(vec![
            (t1.clone(), vec![(BundleSigner::new("alice", "x"), sign(&engine, &a, &t1, b"x").unwrap())]),
            (t2.clone(), vec![(BundleSigner::new("alice", "y"), sign(&engine, &b, &t2, b"y").unwrap())]),
        ])
        .unwrap();
        let report = verify(&engine, &params, &bundle).unwrap();
        assert!(report.valid);
        assert_eq!(report.main_equation_pairings, 3);
        assert_eq!(report.certificate_pairings, 4);
    }

    #[test]
    fn wrong_engine_params_rejected() {
        let (engine, mut params, _, _) = mock_single();
        params.engine_id = "bls12-381".into();
        let empty = AggregateBundle::<Mock1009> { groups: vec![], aggregate: MockG1::new(0) };
        assert!(matches!(verify(&engine, &params, &empty), Err(SchemeError::EngineMismatch { .. })));
    }
}
