//! A fixed mock-backend scenario with hand-computed answers: a root, two TAs
//! and three signers, every hash output programmed.
//!
//! | signer | TA | H0 bits | h  | key       | sigma |
//! |--------|----|---------|----|-----------|-------|
//! | ID-A   | T1 | (3, 5)  | 4  | (33, 55)  | 253   |
//! | ID-B   | T1 | (2, 6)  | 9  | (22, 66)  | 616   |
//! | ID-C   | T2 | (4, 8)  | 2  | (52, 104) | 260   |
//!
//! Root kappa = 7, T1 kappa = 11, T2 kappa = 13. The certificate hashes are
//! 9 and 10, so the certificates are 63 and 70. The aggregate is
//! 253 + 616 + 260 = 1129 = 120 mod 1009.

use crate::engine::{
    GroupElement, Mock1009, MockEngine, MockG1, MockG2, MockHashTable, MockScalar, ScalarField, TAG_CERT, TAG_H0,
    TAG_H1,
};
use crate::scheme::{certified_payload, h0_input, h1_input, MasterSecret, TaRecord, TaSecret};
use crate::vectors::VectorRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KatTa {
    pub identity: &'static str,
    pub secret: u16,
    pub cert_hash: u16,
    pub certificate: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KatSigner {
    pub identity: &'static str,
    pub ta: usize,
    pub h0: (u16, u16),
    pub message: &'static str,
    pub h1: u16,
    pub key: (u16, u16),
    pub signature: u16,
}

pub const MASTER_SECRET: u16 = 7;

pub const TAS: [KatTa; 2] = [
    KatTa { identity: "T1", secret: 11, cert_hash: 9, certificate: 63 },
    KatTa { identity: "T2", secret: 13, cert_hash: 10, certificate: 70 },
];

pub const SIGNERS: [KatSigner; 3] = [
    KatSigner { identity: "ID-A", ta: 0, h0: (3, 5), message: "msg-A", h1: 4, key: (33, 55), signature: 253 },
    KatSigner { identity: "ID-B", ta: 0, h0: (2, 6), message: "msg-B", h1: 9, key: (22, 66), signature: 616 },
    KatSigner { identity: "ID-C", ta: 1, h0: (4, 8), message: "msg-C", h1: 2, key: (52, 104), signature: 260 },
];

pub const AGGREGATE: u16 = 120;

pub fn master_secret() -> MasterSecret<Mock1009> {
    MasterSecret::new(MockScalar::new(MASTER_SECRET.into())).expect("non-zero")
}

pub fn ta_secret(index: usize) -> TaSecret<Mock1009> {
    TaSecret::new(MockScalar::new(TAS[index].secret.into())).expect("non-zero")
}

/// The TA record the programmed engine produces for `TAS[index]`.
pub fn ta_record(index: usize) -> TaRecord<Mock1009> {
    let ta = &TAS[index];
    TaRecord {
        identity: ta.identity.as_bytes().to_vec(),
        public_key: MockG2::new(ta.secret.into()),
        certificate: MockG1::new(ta.certificate.into()),
    }
}

/// All programmed hash evaluations, as a vector file would list them.
pub fn vectors() -> Vec<VectorRecord> {
    let mut out = Vec::new();
    let enc = |v: u16| v.to_be_bytes().to_vec();
    for (i, ta) in TAS.iter().enumerate() {
        let payload = certified_payload::<Mock1009>(ta.identity.as_bytes(), &ta_record(i).public_key);
        out.push(VectorRecord::new("hash_to_g1", vec![TAG_CERT.to_vec(), payload], enc(ta.cert_hash)));
    }
    for s in &SIGNERS {
        for (bit, v) in [(0u8, s.h0.0), (1, s.h0.1)] {
            out.push(VectorRecord::new(
                "hash_to_g1",
                vec![TAG_H0.to_vec(), h0_input(s.identity.as_bytes(), bit)],
                enc(v),
            ));
        }
        let input = h1_input(s.message.as_bytes(), s.identity.as_bytes(), &ta_record(s.ta));
        out.push(VectorRecord::new("hash_to_scalar", vec![TAG_H1.to_vec(), input], enc(s.h1)));
    }
    for s in &SIGNERS {
        let kappa = MockScalar::new(TAS[s.ta].secret.into());
        out.push(VectorRecord::new("scalar_mul_g1", vec![enc(s.h0.0), kappa.to_bytes()], enc(s.key.0)));
    }
    // Aggregate against g2, and the product side of the main equation.
    out.push(VectorRecord::new("pair", vec![enc(AGGREGATE), MockG2::generator().to_bytes()], enc(AGGREGATE)));
    out.push(VectorRecord::new(
        "multi_pair",
        vec![enc(3 + 4 * 5 + 2 + 9 * 6), enc(11), enc(4 + 2 * 8), enc(13)],
        enc(AGGREGATE),
    ));
    out
}

pub fn table() -> MockHashTable {
    crate::vectors::mock_table(&vectors()).expect("reference vectors are well formed")
}

pub fn engine() -> MockEngine {
    MockEngine::with_table(table())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{MockG1 as G1, PairingEngine};
    use crate::scheme::{self, AggregateBundle, BundleSigner, Signature};

    // Independent integer recomputation of the table above.
    #[test]
    fn table_arithmetic() {
        let q = 1009u32;
        for s in &SIGNERS {
            let k = TAS[s.ta].secret as u32;
            assert_eq!((s.h0.0 as u32 * k % q, s.h0.1 as u32 * k % q), (s.key.0 as u32, s.key.1 as u32));
            assert_eq!((s.key.0 as u32 + s.h1 as u32 * s.key.1 as u32) % q, s.signature as u32);
        }
        for ta in &TAS {
            assert_eq!(ta.cert_hash as u32 * MASTER_SECRET as u32 % q, ta.certificate as u32);
        }
        assert_eq!(SIGNERS.iter().map(|s| s.signature as u32).sum::<u32>() % q, AGGREGATE as u32);
    }

    #[test]
    fn scheme_reproduces_reference() {
        let e = engine();
        crate::vectors::check(&e, &vectors()).unwrap();
        let params = scheme::root_setup_with_secret(&e, &master_secret());
        assert_eq!(params.master_public, MockG2::new(7));
        let mut groups: Vec<(TaRecord<Mock1009>, Vec<(BundleSigner, Signature<Mock1009>)>)> = Vec::new();
        for (i, ta) in TAS.iter().enumerate() {
            let record = scheme::lowerlevel_setup_with_secret(
                &e,
                &params,
                &master_secret(),
                ta.identity.as_bytes(),
                &ta_secret(i),
            )
            .unwrap();
            assert_eq!(record, ta_record(i));
            assert!(scheme::verify_certificate(&e, &params, &record));
            groups.push((record, Vec::new()));
        }
        for s in &SIGNERS {
            let key = scheme::extract(&e, &ta_secret(s.ta), &ta_record(s.ta), s.identity.as_bytes()).unwrap();
            assert_eq!((key.s0, key.s1), (G1::new(s.key.0.into()), G1::new(s.key.1.into())));
            let sig = scheme::sign(&e, &key, &ta_record(s.ta), s.message.as_bytes()).unwrap();
            assert_eq!(sig.0, G1::new(s.signature.into()));
            groups[s.ta].1.push((BundleSigner::new(s.identity, s.message), sig));
        }
        let bundle = AggregateBundle::assemble(groups).unwrap();
        assert_eq!(bundle.aggregate, G1::new(AGGREGATE.into()));
        let before = e.pairing_count();
        let report = scheme::verify(&e, &params, &bundle).unwrap();
        assert!(report.valid);
        assert_eq!(report.main_equation_pairings, 3);
        assert_eq!(e.pairing_count() - before, report.total_pairings());
    }
}
