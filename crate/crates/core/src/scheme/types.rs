use std::fmt;

use sha2::{Digest, Sha256};

use crate::engine::{GroupElement, PairingGroups, ScalarField};

use super::SchemeError;

pub(crate) fn push_lp(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

/// Input to H0 for key component `bit`: the identity followed by one byte.
pub fn h0_input(identity: &[u8], bit: u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(identity.len() + 1);
    out.extend_from_slice(identity);
    out.push(bit);
    out
}

/// Input to H1: length-prefixed message, identity and certificate bytes.
pub fn h1_input<P: PairingGroups>(message: &[u8], identity: &[u8], ta: &TaRecord<P>) -> Vec<u8> {
    let cert = ta.cert_bytes();
    let mut out = Vec::with_capacity(message.len() + identity.len() + cert.len() + 12);
    push_lp(&mut out, message);
    push_lp(&mut out, identity);
    push_lp(&mut out, &cert);
    out
}

/// Root TA output published to everyone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemParams<P: PairingGroups> {
    pub engine_id: String,
    pub g1: P::G1,
    pub g2: P::G2,
    /// y = kappa * g2.
    pub master_public: P::G2,
}

macro_rules! secret_scalar {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, PartialEq, Eq)]
        pub struct $name<P: PairingGroups>(P::Scalar);

        impl<P: PairingGroups> $name<P> {
            /// Rejects zero.
            pub fn new(k: P::Scalar) -> Result<Self, SchemeError> {
                if k.is_zero() {
                    return Err(SchemeError::ZeroSecret);
                }
                Ok($name(k))
            }

            pub fn scalar(&self) -> &P::Scalar {
                &self.0
            }
        }

        impl<P: PairingGroups> fmt::Debug for $name<P> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(concat!(stringify!($name), "(..)"))
            }
        }
    };
}

secret_scalar!(
    /// The root's master key kappa.
    MasterSecret
);
secret_scalar!(
    /// A lower-level TA's secret kappa_i.
    TaSecret
);

/// A lower-level TA as the rest of the system sees it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaRecord<P: PairingGroups> {
    pub identity: Vec<u8>,
    pub public_key: P::G2,
    /// Root signature on [`TaRecord::certified_payload`].
    pub certificate: P::G1,
}

impl<P: PairingGroups> TaRecord<P> {
    /// The bytes the root signs: length-prefixed identity then y_i.
    pub fn certified_payload(&self) -> Vec<u8> {
        certified_payload::<P>(&self.identity, &self.public_key)
    }

    /// Canonical (identity, y_i, cert) encoding fed to H1.
    pub fn cert_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        push_lp(&mut out, &self.identity);
        push_lp(&mut out, &self.public_key.to_bytes());
        push_lp(&mut out, &self.certificate.to_bytes());
        out
    }

    pub fn fingerprint(&self) -> TaFingerprint {
        TaFingerprint(Sha256::digest(self.cert_bytes()).into())
    }
}

/// Bytes the root signs when certifying a TA: identity and public key, length-prefixed.
pub fn certified_payload<P: PairingGroups>(identity: &[u8], public_key: &P::G2) -> Vec<u8> {
    let mut out = Vec::new();
    push_lp(&mut out, identity);
    out.extend_from_slice(&public_key.to_bytes());
    out
}

/// SHA-256 of a TA record's canonical bytes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TaFingerprint(pub [u8; 32]);

impl fmt::Debug for TaFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TaFingerprint({})", hex::encode(&self.0[..8]))
    }
}

impl fmt::Display for TaFingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

/// A signer's one-time private key (s0, s1) issued by one TA.
#[derive(Clone, PartialEq, Eq)]
pub struct SignerKey<P: PairingGroups> {
    pub identity: Vec<u8>,
    pub ta_fingerprint: TaFingerprint,
    pub s0: P::G1,
    pub s1: P::G1,
}

impl<P: PairingGroups> fmt::Debug for SignerKey<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SignerKey")
            .field("identity", &String::from_utf8_lossy(&self.identity))
            .field("ta_fingerprint", &self.ta_fingerprint)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature<P: PairingGroups>(pub P::G1);

/// One (identity, message) slot of an aggregate.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BundleSigner {
    pub identity: Vec<u8>,
    pub message: Vec<u8>,
}

impl BundleSigner {
    pub fn new(identity: impl Into<Vec<u8>>, message: impl Into<Vec<u8>>) -> Self {
        BundleSigner { identity: identity.into(), message: message.into() }
    }
}

/// The signers enrolled by one TA, in order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleGroup<P: PairingGroups> {
    pub ta: TaRecord<P>,
    pub signers: Vec<BundleSigner>,
}

/// Everything `verify` needs: the per-TA partition of signers and Omega.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateBundle<P: PairingGroups> {
    pub groups: Vec<BundleGroup<P>>,
    pub aggregate: P::G1,
}

impl<P: PairingGroups> AggregateBundle<P> {
    /// Builds a bundle from signed slots, aggregating the signatures.
    pub fn assemble(groups: Vec<(TaRecord<P>, Vec<(BundleSigner, Signature<P>)>)>) -> Result<Self, SchemeError> {
        let mut sigs = Vec::new();
        let groups = groups
            .into_iter()
            .map(|(ta, slots)| {
                let signers = slots
                    .into_iter()
                    .map(|(s, sig)| {
                        sigs.push(sig);
                        s
                    })
                    .collect();
                BundleGroup { ta, signers }
            })
            .collect();
        let aggregate = super::aggregate(&sigs)?;
        Ok(AggregateBundle { groups, aggregate })
    }

    /// n, the total number of signers.
    pub fn signer_count(&self) -> usize {
        self.groups.iter().map(|g| g.signers.len()).sum()
    }

    /// l, the number of TA groups.
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// Signers in bundle order with the TA that enrolled them.
    pub fn signers(&self) -> impl Iterator<Item = (&TaRecord<P>, &BundleSigner)> {
        self.groups.iter().flat_map(|g| g.signers.iter().map(move |s| (&g.ta, s)))
    }
}
