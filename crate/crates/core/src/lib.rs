//! Multi-authority one-time identity-based aggregate signatures.
//!
//! A root TA certifies lower-level TAs; each lower-level TA issues one-time
//! keys to identities it enrolls; signatures from signers under any number of
//! TAs aggregate into a single G1 element that verifies with l + 1 pairings
//! for l TAs.
//!
//! * [`engine`]: groups, pairing, hashing. BLS12-381 and an insecure mock.
//! * [`scheme`]: the six algorithms.
//! * [`codec`]: versioned binary and JSON envelopes.
//! * [`keystore`]: durable one-time key state.
//! * [`harness`]: the unforgeability game and co-CDH reduction.
//! * [`vectors`] and [`kat`]: test-vector files and the fixed mock scenario.

pub mod codec;
pub mod engine;
pub mod harness;
pub mod kat;
pub mod keystore;
pub mod scheme;
pub mod vectors;

pub use codec::{CodecError, Envelope};
pub use engine::{
    Backend, Bls12, Bls12Engine, GroupElement, Mock1009, MockEngine, PairingEngine, PairingError, PairingGroups,
    ScalarField,
};
pub use keystore::{KeyStatus, KeyStore, KeystoreError};
pub use scheme::{
    aggregate, extract, lowerlevel_setup, root_setup, sign, verify, AggregateBundle, BundleSigner, MasterSecret,
    SchemeError, Signature, SignerKey, SystemParams, TaRecord, TaSecret, VerifyOptions, VerifyReport,
};
