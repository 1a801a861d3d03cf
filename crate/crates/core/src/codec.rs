//! Versioned envelopes for every public artifact.
//!
//! Binary layout: `"MTAO" | version u8 | type tag u8 | field*`, each field a
//! u32 big-endian length followed by its bytes, in declaration order. The
//! JSON form carries the same fields as lowercase hex under their names.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{GroupElement, PairingError, PairingGroups, ScalarField};
use crate::scheme::{
    AggregateBundle, BundleGroup, BundleSigner, MasterSecret, Signature, SignerKey, SystemParams, TaFingerprint,
    TaRecord, TaSecret,
};

pub const MAGIC: &[u8; 4] = b"MTAO";
pub const VERSION: u8 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("bad magic bytes")]
    BadMagic,
    #[error("unsupported envelope version {0}")]
    UnsupportedVersion(u8),
    #[error("expected a {expected} envelope, found {found}")]
    WrongType { expected: String, found: String },
    #[error("envelope truncated")]
    Truncated,
    #[error("trailing bytes after envelope")]
    TrailingBytes,
    #[error("envelope is for backend {found}, expected {expected}")]
    BackendMismatch { expected: String, found: String },
    #[error("missing field {0}")]
    MissingField(String),
    #[error("invalid field {field}: {reason}")]
    InvalidField { field: String, reason: String },
    #[error(transparent)]
    InvalidElement(#[from] PairingError),
    #[error("malformed JSON: {0}")]
    Json(String),
}

fn invalid(field: &str, reason: impl Into<String>) -> CodecError {
    CodecError::InvalidField { field: field.into(), reason: reason.into() }
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CodecError> {
        if self.bytes.len() < n {
            return Err(CodecError::Truncated);
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32, CodecError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn lp(&mut self) -> Result<&'a [u8], CodecError> {
        let n = self.u32()? as usize;
        self.take(n)
    }

    fn finish(&self) -> Result<(), CodecError> {
        if self.bytes.is_empty() {
            Ok(())
        } else {
            Err(CodecError::TrailingBytes)
        }
    }
}

fn push_lp(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

#[derive(Serialize, Deserialize)]
struct JsonEnvelope {
    magic: String,
    version: u8,
    #[serde(rename = "type")]
    kind: String,
    backend: String,
    fields: BTreeMap<String, String>,
}

/// A serializable artifact with a fixed field list.
pub trait Envelope: Sized {
    const TYPE_TAG: u8;
    const KIND: &'static str;
    const FIELDS: &'static [&'static str];

    /// Engine identifier the artifact belongs to.
    fn backend_id() -> &'static str;
    fn encode_fields(&self) -> Vec<Vec<u8>>;
    /// Called with exactly `FIELDS.len()` entries.
    fn decode_fields(fields: &[&[u8]]) -> Result<Self, CodecError>;

    fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.push(VERSION);
        out.push(Self::TYPE_TAG);
        for f in self.encode_fields() {
            push_lp(&mut out, &f);
        }
        out
    }

    fn from_binary(bytes: &[u8]) -> Result<Self, CodecError> {
        let mut r = Reader { bytes };
        if r.take(4)? != MAGIC {
            return Err(CodecError::BadMagic);
        }
        let version = r.take(1)?[0];
        if version != VERSION {
            return Err(CodecError::UnsupportedVersion(version));
        }
        let tag = r.take(1)?[0];
        if tag != Self::TYPE_TAG {
            return Err(CodecError::WrongType { expected: Self::KIND.into(), found: format!("tag {tag}") });
        }
        let fields = Self::FIELDS.iter().map(|_| r.lp()).collect::<Result<Vec<_>, _>>()?;
        r.finish()?;
        Self::decode_fields(&fields)
    }

    fn to_json(&self) -> String {
        let fields = Self::FIELDS
            .iter()
            .zip(self.encode_fields())
            .map(|(name, bytes)| (name.to_string(), hex::encode(bytes)))
            .collect();
        let env = JsonEnvelope {
            magic: "MTAO".into(),
            version: VERSION,
            kind: Self::KIND.into(),
            backend: Self::backend_id().into(),
            fields,
        };
        serde_json::to_string_pretty(&env).expect("envelope serializes")
    }

    fn from_json(text: &str) -> Result<Self, CodecError> {
        let env: JsonEnvelope = serde_json::from_str(text).map_err(|e| CodecError::Json(e.to_string()))?;
        if env.magic != "MTAO" {
            return Err(CodecError::BadMagic);
        }
        if env.version != VERSION {
            return Err(CodecError::UnsupportedVersion(env.version));
        }
        if env.kind != Self::KIND {
            return Err(CodecError::WrongType { expected: Self::KIND.into(), found: env.kind });
        }
        if env.backend != Self::backend_id() {
            return Err(CodecError::BackendMismatch { expected: Self::backend_id().into(), found: env.backend });
        }
        if env.fields.len() != Self::FIELDS.len() {
            return Err(CodecError::Json(format!("expected {} fields, got {}", Self::FIELDS.len(), env.fields.len())));
        }
        let decoded = Self::FIELDS
            .iter()
            .map(|name| {
                let text = env.fields.get(*name).ok_or_else(|| CodecError::MissingField(name.to_string()))?;
                if text.bytes().any(|c| c.is_ascii_uppercase()) {
                    return Err(invalid(name, "hex must be lowercase"));
                }
                hex::decode(text).map_err(|e| invalid(name, e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<&[u8]> = decoded.iter().map(Vec::as_slice).collect();
        Self::decode_fields(&refs)
    }
}

fn engine_field<P: PairingGroups>(bytes: &[u8]) -> Result<(), CodecError> {
    if bytes != P::ID.as_bytes() {
        return Err(CodecError::BackendMismatch {
            expected: P::ID.into(),
            found: String::from_utf8_lossy(bytes).into_owned(),
        });
    }
    Ok(())
}

fn element<G: GroupElement>(field: &str, bytes: &[u8]) -> Result<G, CodecError> {
    G::from_bytes(bytes).map_err(|e| invalid(field, e.to_string()))
}

fn scalar<S: ScalarField>(field: &str, bytes: &[u8]) -> Result<S, CodecError> {
    S::from_bytes(bytes).map_err(|e| invalid(field, e.to_string()))
}

fn identity_field(field: &str, bytes: &[u8]) -> Result<Vec<u8>, CodecError> {
    if bytes.is_empty() {
        return Err(invalid(field, "identity must be non-empty"));
    }
    Ok(bytes.to_vec())
}

impl<P: PairingGroups> Envelope for SystemParams<P> {
    const TYPE_TAG: u8 = 1;
    const KIND: &'static str = "system-params";
    const FIELDS: &'static [&'static str] = &["engine_id", "g1", "g2", "master_public"];

    fn backend_id() -> &'static str {
        P::ID
    }

    fn encode_fields(&self) -> Vec<Vec<u8>> {
        vec![self.engine_id.as_bytes().to_vec(), self.g1.to_bytes(), self.g2.to_bytes(), self.master_public.to_bytes()]
    }

    fn decode_fields(f: &[&[u8]]) -> Result<Self, CodecError> {
        engine_field::<P>(f[0])?;
        let g1: P::G1 = element("g1", f[1])?;
        let g2: P::G2 = element("g2", f[2])?;
        if g1 != P::G1::generator() || g2 != P::G2::generator() {
            return Err(invalid("g1/g2", "generators do not match the engine"));
        }
        let master_public: P::G2 = element("master_public", f[3])?;
        if master_public.is_identity() {
            return Err(invalid("master_public", "identity element"));
        }
        Ok(SystemParams { engine_id: P::ID.into(), g1, g2, master_public })
    }
}

macro_rules! secret_envelope {
    ($ty:ident, $tag:expr, $kind:expr) => {
        impl<P: PairingGroups> Envelope for $ty<P> {
            const TYPE_TAG: u8 = $tag;
            const KIND: &'static str = $kind;
            const FIELDS: &'static [&'static str] = &["engine_id", "secret"];

            fn backend_id() -> &'static str {
                P::ID
            }

            fn encode_fields(&self) -> Vec<Vec<u8>> {
                vec![P::ID.as_bytes().to_vec(), self.scalar().to_bytes()]
            }

            fn decode_fields(f: &[&[u8]]) -> Result<Self, CodecError> {
                engine_field::<P>(f[0])?;
                $ty::new(scalar("secret", f[1])?).map_err(|e| invalid("secret", e.to_string()))
            }
        }
    };
}

secret_envelope!(MasterSecret, 2, "master-secret");
secret_envelope!(TaSecret, 3, "ta-secret");

impl<P: PairingGroups> Envelope for TaRecord<P> {
    const TYPE_TAG: u8 = 4;
    const KIND: &'static str = "ta-record";
    const FIELDS: &'static [&'static str] = &["identity", "public_key", "certificate"];

    fn backend_id() -> &'static str {
        P::ID
    }

    fn encode_fields(&self) -> Vec<Vec<u8>> {
        vec![self.identity.clone(), self.public_key.to_bytes(), self.certificate.to_bytes()]
    }

    fn decode_fields(f: &[&[u8]]) -> Result<Self, CodecError> {
        Ok(TaRecord {
            identity: identity_field("identity", f[0])?,
            public_key: element("public_key", f[1])?,
            certificate: element("certificate", f[2])?,
        })
    }
}

impl<P: PairingGroups> Envelope for SignerKey<P> {
    const TYPE_TAG: u8 = 5;
    const KIND: &'static str = "signer-key";
    const FIELDS: &'static [&'static str] = &["identity", "ta_fingerprint", "s0", "s1"];

    fn backend_id() -> &'static str {
        P::ID
    }

    fn encode_fields(&self) -> Vec<Vec<u8>> {
        vec![self.identity.clone(), self.ta_fingerprint.0.to_vec(), self.s0.to_bytes(), self.s1.to_bytes()]
    }

    fn decode_fields(f: &[&[u8]]) -> Result<Self, CodecError> {
        let fp: [u8; 32] = f[1].try_into().map_err(|_| invalid("ta_fingerprint", "must be 32 bytes"))?;
        Ok(SignerKey {
            identity: identity_field("identity", f[0])?,
            ta_fingerprint: TaFingerprint(fp),
            s0: element("s0", f[2])?,
            s1: element("s1", f[3])?,
        })
    }
}

impl<P: PairingGroups> Envelope for Signature<P> {
    const TYPE_TAG: u8 = 6;
    const KIND: &'static str = "signature";
    const FIELDS: &'static [&'static str] = &["sigma"];

    fn backend_id() -> &'static str {
        P::ID
    }

    fn encode_fields(&self) -> Vec<Vec<u8>> {
        vec![self.0.to_bytes()]
    }

    fn decode_fields(f: &[&[u8]]) -> Result<Self, CodecError> {
        Ok(Signature(element("sigma", f[0])?))
    }
}

impl<P: PairingGroups> Envelope for AggregateBundle<P> {
    const TYPE_TAG: u8 = 7;
    const KIND: &'static str = "aggregate-bundle";
    const FIELDS: &'static [&'static str] = &["groups", "aggregate"];

    fn backend_id() -> &'static str {
        P::ID
    }

    fn encode_fields(&self) -> Vec<Vec<u8>> {
        let mut groups = Vec::new();
        groups.extend_from_slice(&(self.groups.len() as u32).to_be_bytes());
        for g in &self.groups {
            push_lp(&mut groups, &g.ta.to_binary());
            groups.extend_from_slice(&(g.signers.len() as u32).to_be_bytes());
            for s in &g.signers {
                push_lp(&mut groups, &s.identity);
                push_lp(&mut groups, &s.message);
            }
        }
        vec![groups, self.aggregate.to_bytes()]
    }

    fn decode_fields(f: &[&[u8]]) -> Result<Self, CodecError> {
        let mut r = Reader { bytes: f[0] };
        let count = r.u32()? as usize;
        let mut groups = Vec::with_capacity(count.min(1024));
        for _ in 0..count {
            let ta = TaRecord::from_binary(r.lp()?)?;
            let n = r.u32()? as usize;
            let mut signers = Vec::with_capacity(n.min(1024));
            for _ in 0..n {
                let identity = r.lp()?.to_vec();
                let message = r.lp()?.to_vec();
                signers.push(BundleSigner { identity, message });
            }
            groups.push(BundleGroup { ta, signers });
        }
        r.finish()?;
        Ok(AggregateBundle { groups, aggregate: element("aggregate", f[1])? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Bls12, Bls12Engine, Mock1009, MockEngine, MockG1, PairingEngine};
    use crate::scheme::{self, BundleSigner};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn mock_bundle(seed: u64, msg: &[u8]) -> (SystemParams<Mock1009>, AggregateBundle<Mock1009>) {
        let e = MockEngine::new();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (m, p) = scheme::root_setup(&e, &mut rng);
        let (k, t) = scheme::lowerlevel_setup(&e, &p, &m, b"T", &mut rng).unwrap();
        let key = scheme::extract(&e, &k, &t, b"who").unwrap();
        let sig = scheme::sign(&e, &key, &t, msg).unwrap();
        let b = AggregateBundle::assemble(vec![(t, vec![(BundleSigner::new("who", msg), sig)])]).unwrap();
        (p, b)
    }

    #[test]
    fn binary_layout_is_stable() {
        let sig = Signature::<Mock1009>(MockG1::new(253));
        assert_eq!(hex::encode(sig.to_binary()), "4d54414f01060000000200fd");
    }

    #[test]
    fn rejects_damage() {
        let (_, b) = mock_bundle(1, b"m");
        let bin = b.to_binary();
        assert_eq!(AggregateBundle::<Mock1009>::from_binary(&bin).unwrap(), b);
        assert_eq!(AggregateBundle::<Mock1009>::from_binary(&bin[..bin.len() - 1]), Err(CodecError::Truncated));
        let mut extra = bin.clone();
        extra.push(0);
        assert_eq!(AggregateBundle::<Mock1009>::from_binary(&extra), Err(CodecError::TrailingBytes));
        let mut magic = bin.clone();
        magic[0] = b'X';
        assert_eq!(AggregateBundle::<Mock1009>::from_binary(&magic), Err(CodecError::BadMagic));
        assert!(matches!(TaRecord::<Mock1009>::from_binary(&bin), Err(CodecError::WrongType { .. })));
        let json = b.to_json();
        assert!(matches!(AggregateBundle::<Bls12>::from_json(&json), Err(CodecError::BackendMismatch { .. })));
        assert!(AggregateBundle::<Mock1009>::from_json(&json.to_uppercase()).is_err());
    }

    #[test]
    fn production_round_trip() {
        let e = Bls12Engine::new();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let (m, p) = scheme::root_setup(&e, &mut rng);
        let (k, t) = scheme::lowerlevel_setup(&e, &p, &m, b"T", &mut rng).unwrap();
        let key = scheme::extract(&e, &k, &t, b"who").unwrap();
        assert_eq!(SystemParams::<Bls12>::from_json(&p.to_json()).unwrap(), p);
        assert_eq!(MasterSecret::<Bls12>::from_binary(&m.to_binary()).unwrap(), m);
        assert_eq!(TaSecret::<Bls12>::from_json(&k.to_json()).unwrap(), k);
        assert_eq!(SignerKey::<Bls12>::from_binary(&key.to_binary()).unwrap(), key);
        assert_eq!(TaRecord::<Bls12>::from_binary(&t.to_binary()).unwrap().fingerprint(), t.fingerprint());
        assert_eq!(e.id(), "bls12-381");
    }

    proptest! {
        #[test]
        fn bundles_round_trip(seed in any::<u64>(), msg in proptest::collection::vec(any::<u8>(), 0..40)) {
            let (p, b) = mock_bundle(seed, &msg);
            let bin = b.to_binary();
            let back = AggregateBundle::<Mock1009>::from_binary(&bin).unwrap();
            prop_assert_eq!(&back, &b);
            prop_assert_eq!(back.to_binary(), bin);
            let json = b.to_json();
            prop_assert_eq!(AggregateBundle::<Mock1009>::from_json(&json).unwrap().to_json(), json);
            prop_assert_eq!(SystemParams::<Mock1009>::from_binary(&p.to_binary()).unwrap(), p);
        }
    }
}
