use ark_bls12_381::{g1, Bls12_381, Fr, G1Affine, G1Projective, G2Affine, G2Projective};
use ark_ec::hashing::curve_maps::wb::WBMap;
use ark_ec::hashing::map_to_curve_hasher::MapToCurveBasedHasher;
use ark_ec::hashing::HashToCurve;
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AdditiveGroup, CurveGroup, PrimeGroup};
use ark_ff::field_hashers::DefaultFieldHasher;
use ark_ff::{Field, PrimeField};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use std::ops::{Add, Neg, Sub};

use num_bigint::BigUint;
use rand::RngCore;
use sha2::Sha256;

use super::{Backend, GroupElement, PairingCounter, PairingEngine, PairingError, PairingGroups, ScalarField};

type G1Hasher = MapToCurveBasedHasher<G1Projective, DefaultFieldHasher<Sha256, 128>, WBMap<g1::Config>>;
type Gt = PairingOutput<Bls12_381>;

impl ScalarField for Fr {
    const ENCODED_LEN: usize = 32;

    fn zero() -> Self {
        <Fr as AdditiveGroup>::ZERO
    }
    fn one() -> Self {
        <Fr as Field>::ONE
    }
    fn from_u64(v: u64) -> Self {
        Fr::from(v)
    }
    fn is_zero(&self) -> bool {
        *self == <Fr as AdditiveGroup>::ZERO
    }
    fn invert(&self) -> Option<Self> {
        self.inverse()
    }
    fn modulus() -> BigUint {
        Fr::MODULUS.into()
    }
    fn from_biguint(v: &BigUint) -> Self {
        Fr::from(v.clone())
    }
    fn to_biguint(&self) -> BigUint {
        self.into_bigint().into()
    }
    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut wide = [0u8; 64];
        rng.fill_bytes(&mut wide);
        Fr::from_le_bytes_mod_order(&wide)
    }
}

fn decode<T: CanonicalDeserialize>(bytes: &[u8], expected: usize, what: &str) -> Result<T, PairingError> {
    if bytes.len() != expected {
        return Err(PairingError::InvalidElement(format!("{what} must be {expected} bytes, got {}", bytes.len())));
    }
    T::deserialize_compressed(bytes).map_err(|e| PairingError::InvalidElement(format!("{what}: {e}")))
}

fn encode<T: CanonicalSerialize>(v: &T) -> Vec<u8> {
    let mut out = Vec::with_capacity(v.compressed_size());
    v.serialize_compressed(&mut out).expect("writing to a Vec cannot fail");
    out
}

macro_rules! bls_group {
    ($(#[$doc:meta])* $name:ident, $inner:ty, $affine:ty, $len:expr, $what:expr) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub struct $name(pub $inner);

        impl Add for $name {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                $name(self.0 + o.0)
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                $name(self.0 - o.0)
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                $name(-self.0)
            }
        }

        impl GroupElement for $name {
            type Scalar = Fr;

            fn identity() -> Self {
                $name(<$inner as AdditiveGroup>::ZERO)
            }
            fn generator() -> Self {
                $name(<$inner as PrimeGroup>::generator())
            }
            fn scalar_mul(&self, k: &Fr) -> Self {
                $name(self.0 * k)
            }
            fn to_bytes(&self) -> Vec<u8> {
                encode(&<$affine>::from(self.0))
            }
            fn from_bytes(bytes: &[u8]) -> Result<Self, PairingError> {
                decode::<$affine>(bytes, $len, $what).map(|a| $name(a.into()))
            }
        }
    };
}

bls_group!(
    /// A point of the prime-order subgroup of BLS12-381 G1.
    BlsG1, G1Projective, G1Affine, 48, "G1 point"
);
bls_group!(
    /// A point of the prime-order subgroup of BLS12-381 G2.
    BlsG2, G2Projective, G2Affine, 96, "G2 point"
);
bls_group!(
    /// An element of the order-r subgroup of GT.
    BlsGt, Gt, Gt, 576, "GT element"
);

/// Marker for the BLS12-381 setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Bls12;

impl PairingGroups for Bls12 {
    type Scalar = Fr;
    type G1 = BlsG1;
    type G2 = BlsG2;
    type Gt = BlsGt;
    const ID: &'static str = "bls12-381";
    const BACKEND: Backend = Backend::Production;
}

/// BLS12-381 engine. No efficient psi exists on this Type-3 curve.
#[derive(Debug, Default)]
pub struct Bls12Engine {
    counter: PairingCounter,
}

impl Bls12Engine {
    pub fn new() -> Self {
        Self::default()
    }
}

impl PairingEngine for Bls12Engine {
    type Groups = Bls12;

    fn counter(&self) -> &PairingCounter {
        &self.counter
    }

    fn evaluate_pairing(&self, p: &BlsG1, r: &BlsG2) -> BlsGt {
        BlsGt(Bls12_381::pairing(p.0.into_affine(), r.0.into_affine()))
    }

    fn evaluate_multi_pairing(&self, terms: &[(BlsG1, BlsG2)]) -> BlsGt {
        let (ps, rs): (Vec<G1Projective>, Vec<G2Projective>) = terms.iter().map(|(p, r)| (p.0, r.0)).unzip();
        BlsGt(Bls12_381::multi_pairing(G1Projective::normalize_batch(&ps), G2Projective::normalize_batch(&rs)))
    }

    fn psi(&self, _r: &BlsG2) -> Result<BlsG1, PairingError> {
        Err(PairingError::Unsupported(Bls12::ID))
    }

    fn hash_to_g1(&self, domain_tag: &[u8], input: &[u8]) -> BlsG1 {
        assert!(!domain_tag.is_empty(), "domain tag must be non-empty");
        let point = G1Hasher::new(domain_tag)
            .and_then(|h| h.hash(input))
            .expect("hash-to-curve parameters for BLS12-381 G1 are fixed");
        BlsG1(point.into())
    }
}
