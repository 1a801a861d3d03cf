//! Algebraic substrate: prime-order groups, the bilinear map, hashing into
//! the groups, and canonical encodings.
//!
//! Groups are written additively throughout the crate: `a + b` is the group
//! law, `-a` the inverse and `a.scalar_mul(&k)` is the k-fold sum (what
//! multiplicative notation would write as `a^k`). Two backends implement the
//! same traits:
//!
//! * [`Bls12Engine`]: BLS12-381, a Type-3 curve with standard compressed
//!   encodings and the standard hash-to-curve suite for G1.
//! * [`MockEngine`]: G1 = G2 = GT = Z_q with q = 1009 and `pair(a, b) = a*b`.
//!   Every element is its own discrete log, which makes it usable as a test
//!   oracle. It is completely insecure.

mod bls;
mod expand;
mod mock;

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigUint;
use num_traits::One;
use rand::RngCore;
use thiserror::Error;

pub use bls::{Bls12, Bls12Engine, BlsG1, BlsG2, BlsGt};
pub use expand::expand_message_xmd;
pub use mock::{Mock1009, MockEngine, MockG1, MockG2, MockGt, MockHashTable, MockScalar, MOCK_MODULUS};

/// Domain tag for hashing signer identities into G1.
pub const TAG_H0: &[u8] = b"MTA-OTIBAS-H0";
/// Domain tag for hashing (message, identity, certificate) into Z_q^*.
pub const TAG_H1: &[u8] = b"MTA-OTIBAS-H1";
/// Domain tag for the payload signed by the root in a TA certificate.
pub const TAG_CERT: &[u8] = b"MTA-OTIBAS-CERT";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PairingError {
    #[error("invalid element encoding: {0}")]
    InvalidElement(String),
    #[error("empty input")]
    EmptyInput,
    #[error("operation unsupported on the {0} backend")]
    Unsupported(&'static str),
}

/// Which family of backend an engine belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Production,
    Mock,
}

/// Integers modulo the group order q.
pub trait ScalarField:
    Copy
    + Eq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// Width of the fixed big-endian encoding, ceil(|q| / 8).
    const ENCODED_LEN: usize;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_u64(v: u64) -> Self;
    fn is_zero(&self) -> bool;
    fn invert(&self) -> Option<Self>;

    /// The group order q.
    fn modulus() -> BigUint;
    /// Reduces `v` modulo q.
    fn from_biguint(v: &BigUint) -> Self;
    fn to_biguint(&self) -> BigUint;

    /// Uniform in [0, q).
    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self;

    /// Uniform in Z_q^*.
    fn random_nonzero<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        loop {
            let s = Self::random(rng);
            if !s.is_zero() {
                return s;
            }
        }
    }

    fn to_bytes(&self) -> Vec<u8> {
        let raw = self.to_biguint().to_bytes_be();
        let mut out = vec![0u8; Self::ENCODED_LEN - raw.len()];
        out.extend_from_slice(&raw);
        out
    }

    /// Strict decoding: exact width, value below q.
    fn from_bytes(bytes: &[u8]) -> Result<Self, PairingError> {
        if bytes.len() != Self::ENCODED_LEN {
            return Err(PairingError::InvalidElement(format!(
                "scalar must be {} bytes, got {}",
                Self::ENCODED_LEN,
                bytes.len()
            )));
        }
        let v = BigUint::from_bytes_be(bytes);
        if v >= Self::modulus() {
            return Err(PairingError::InvalidElement("scalar not reduced modulo q".into()));
        }
        Ok(Self::from_biguint(&v))
    }
}

/// A cyclic group of prime order q, written additively.
pub trait GroupElement:
    Copy + Eq + Debug + Send + Sync + 'static + Add<Output = Self> + Sub<Output = Self> + Neg<Output = Self>
{
    type Scalar: ScalarField;

    fn identity() -> Self;
    fn generator() -> Self;
    fn scalar_mul(&self, k: &Self::Scalar) -> Self;

    fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Canonical encoding (compressed on curves).
    fn to_bytes(&self) -> Vec<u8>;
    /// Decodes and checks membership in the prime-order subgroup.
    fn from_bytes(bytes: &[u8]) -> Result<Self, PairingError>;

    /// Equality whose running time does not depend on where the encodings
    /// differ.
    fn ct_eq(&self, other: &Self) -> bool {
        use subtle::ConstantTimeEq;
        let (a, b) = (self.to_bytes(), other.to_bytes());
        a.len() == b.len() && bool::from(a.ct_eq(&b))
    }
}

/// The static shape of a pairing setting: scalar field and the three groups.
///
/// Implemented by zero-sized markers so that data types (`TaRecord<P>`, ...)
/// can derive their traits without dragging the engine along.
pub trait PairingGroups: Copy + Clone + Debug + Default + PartialEq + Eq + Send + Sync + 'static {
    type Scalar: ScalarField;
    type G1: GroupElement<Scalar = Self::Scalar>;
    type G2: GroupElement<Scalar = Self::Scalar>;
    type Gt: GroupElement<Scalar = Self::Scalar>;

    /// Stable identifier written into serialized parameters.
    const ID: &'static str;
    const BACKEND: Backend;
}

/// Counts pairing evaluations. Safe to bump from any thread.
#[derive(Debug, Default)]
pub struct PairingCounter(AtomicU64);

impl PairingCounter {
    pub fn add(&self, k: u64) {
        self.0.fetch_add(k, Ordering::Relaxed);
    }

    pub fn get(&self) -> u64 {
        self.0.load(Ordering::Relaxed)
    }
}

/// A pairing engine: the groups plus the bilinear map, the optional
/// isomorphism psi: G2 -> G1 and the two hash functions.
pub trait PairingEngine: Send + Sync {
    type Groups: PairingGroups;

    fn counter(&self) -> &PairingCounter;

    /// One pairing evaluation, without touching the counter.
    fn evaluate_pairing(
        &self,
        p: &<Self::Groups as PairingGroups>::G1,
        r: &<Self::Groups as PairingGroups>::G2,
    ) -> <Self::Groups as PairingGroups>::Gt;

    /// Product of pairings, without touching the counter. Backends override
    /// this to share the final exponentiation.
    fn evaluate_multi_pairing(
        &self,
        terms: &[(<Self::Groups as PairingGroups>::G1, <Self::Groups as PairingGroups>::G2)],
    ) -> <Self::Groups as PairingGroups>::Gt {
        terms
            .iter()
            .fold(<Self::Groups as PairingGroups>::Gt::identity(), |acc, (p, r)| acc + self.evaluate_pairing(p, r))
    }

    /// The isomorphism psi: G2 -> G1 with psi(g2) = g1.
    fn psi(&self, r: &<Self::Groups as PairingGroups>::G2)
        -> Result<<Self::Groups as PairingGroups>::G1, PairingError>;

    /// Hash into the prime-order subgroup of G1 under `domain_tag`.
    fn hash_to_g1(&self, domain_tag: &[u8], input: &[u8]) -> <Self::Groups as PairingGroups>::G1;

    /// Hash into Z_q^* under `domain_tag`.
    fn hash_to_scalar(&self, domain_tag: &[u8], input: &[u8]) -> <Self::Groups as PairingGroups>::Scalar {
        hash_to_nonzero_scalar(domain_tag, input)
    }

    fn backend(&self) -> Backend {
        <Self::Groups as PairingGroups>::BACKEND
    }

    fn id(&self) -> &'static str {
        <Self::Groups as PairingGroups>::ID
    }

    fn g1(&self) -> <Self::Groups as PairingGroups>::G1 {
        <Self::Groups as PairingGroups>::G1::generator()
    }

    fn g2(&self) -> <Self::Groups as PairingGroups>::G2 {
        <Self::Groups as PairingGroups>::G2::generator()
    }

    fn pair(
        &self,
        p: &<Self::Groups as PairingGroups>::G1,
        r: &<Self::Groups as PairingGroups>::G2,
    ) -> <Self::Groups as PairingGroups>::Gt {
        self.counter().add(1);
        self.evaluate_pairing(p, r)
    }

    /// Product of `terms.len()` pairings; bumps the counter by that many.
    fn multi_pair(
        &self,
        terms: &[(<Self::Groups as PairingGroups>::G1, <Self::Groups as PairingGroups>::G2)],
    ) -> Result<<Self::Groups as PairingGroups>::Gt, PairingError> {
        if terms.is_empty() {
            return Err(PairingError::EmptyInput);
        }
        self.counter().add(terms.len() as u64);
        Ok(self.evaluate_multi_pairing(terms))
    }

    fn pairing_count(&self) -> u64 {
        self.counter().get()
    }
}

/// Wide-reduction hash into [1, q-1]: expand to |q| + 128 bits, reduce
/// modulo q - 1 and add one.
pub fn hash_to_nonzero_scalar<S: ScalarField>(domain_tag: &[u8], input: &[u8]) -> S {
    assert!(!domain_tag.is_empty(), "domain tag must be non-empty");
    let q = S::modulus();
    let len = (q.bits() as usize + 128).div_ceil(8);
    let wide = BigUint::from_bytes_be(&expand_message_xmd(input, domain_tag, len));
    let reduced = wide % (&q - BigUint::one()) + BigUint::one();
    S::from_biguint(&reduced)
}

/// Shorthand for the G1 type of an engine.
pub type G1Of<E> = <<E as PairingEngine>::Groups as PairingGroups>::G1;
/// Shorthand for the G2 type of an engine.
pub type G2Of<E> = <<E as PairingEngine>::Groups as PairingGroups>::G2;
/// Shorthand for the GT type of an engine.
pub type GtOf<E> = <<E as PairingEngine>::Groups as PairingGroups>::Gt;
/// Shorthand for the scalar type of an engine.
pub type ScalarOf<E> = <<E as PairingEngine>::Groups as PairingGroups>::Scalar;
