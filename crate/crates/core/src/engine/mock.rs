use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::{Rng, RngCore};

use super::{
    hash_to_nonzero_scalar, Backend, GroupElement, PairingCounter, PairingEngine, PairingError, PairingGroups,
    ScalarField,
};

/// Order of every mock group.
pub const MOCK_MODULUS: u16 = 1009;
const Q: u32 = MOCK_MODULUS as u32;

fn reduce(v: u64) -> u16 {
    (v % Q as u64) as u16
}

/// Integer modulo 1009.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MockScalar(u16);

impl MockScalar {
    pub fn new(v: u64) -> Self {
        MockScalar(reduce(v))
    }

    pub fn value(self) -> u16 {
        self.0
    }
}

impl Add for MockScalar {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        MockScalar(reduce(self.0 as u64 + o.0 as u64))
    }
}

impl Sub for MockScalar {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        MockScalar(reduce(self.0 as u64 + Q as u64 - o.0 as u64))
    }
}

impl Mul for MockScalar {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        MockScalar(reduce(self.0 as u64 * o.0 as u64))
    }
}

impl Neg for MockScalar {
    type Output = Self;
    fn neg(self) -> Self {
        MockScalar(reduce(Q as u64 - self.0 as u64))
    }
}

impl ScalarField for MockScalar {
    const ENCODED_LEN: usize = 2;

    fn zero() -> Self {
        MockScalar(0)
    }
    fn one() -> Self {
        MockScalar(1)
    }
    fn from_u64(v: u64) -> Self {
        MockScalar::new(v)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    fn invert(&self) -> Option<Self> {
        if self.0 == 0 {
            return None;
        }
        // Fermat: x^(q-2).
        let (mut base, mut exp, mut acc) = (self.0 as u64, Q as u64 - 2, 1u64);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % Q as u64;
            }
            base = base * base % Q as u64;
            exp >>= 1;
        }
        Some(MockScalar(acc as u16))
    }
    fn modulus() -> BigUint {
        BigUint::from(Q)
    }
    fn from_biguint(v: &BigUint) -> Self {
        MockScalar((v % Q).to_u16().expect("reduced below q"))
    }
    fn to_biguint(&self) -> BigUint {
        BigUint::from(self.0)
    }
    fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        MockScalar(rng.gen_range(0..MOCK_MODULUS))
    }
}

macro_rules! mock_group {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
        pub struct $name(u16);

        impl $name {
            pub fn new(v: u64) -> Self {
                $name(reduce(v))
            }

            /// The element's value, which is also its discrete log.
            pub fn value(self) -> u16 {
                self.0
            }

            pub fn dlog(self) -> MockScalar {
                MockScalar(self.0)
            }
        }

        impl Add for $name {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                $name(reduce(self.0 as u64 + o.0 as u64))
            }
        }

        impl Sub for $name {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                $name(reduce(self.0 as u64 + Q as u64 - o.0 as u64))
            }
        }

        impl Neg for $name {
            type Output = Self;
            fn neg(self) -> Self {
                $name(reduce(Q as u64 - self.0 as u64))
            }
        }

        impl GroupElement for $name {
            type Scalar = MockScalar;

            fn identity() -> Self {
                $name(0)
            }
            fn generator() -> Self {
                $name(1)
            }
            fn scalar_mul(&self, k: &MockScalar) -> Self {
                $name(reduce(self.0 as u64 * k.0 as u64))
            }
            fn to_bytes(&self) -> Vec<u8> {
                self.0.to_be_bytes().to_vec()
            }
            fn from_bytes(bytes: &[u8]) -> Result<Self, PairingError> {
                let raw: [u8; 2] = bytes.try_into().map_err(|_| {
                    PairingError::InvalidElement(format!("mock element must be 2 bytes, got {}", bytes.len()))
                })?;
                let v = u16::from_be_bytes(raw);
                if v >= MOCK_MODULUS {
                    return Err(PairingError::InvalidElement(format!("{v} is not below {MOCK_MODULUS}")));
                }
                Ok($name(v))
            }
            fn ct_eq(&self, other: &Self) -> bool {
                self == other
            }
        }
    };
}

mock_group!(
    /// Mock G1: Z_1009 under addition, generator 1.
    MockG1
);
mock_group!(
    /// Mock G2: Z_1009 under addition, generator 1.
    MockG2
);
mock_group!(
    /// Mock GT: Z_1009 under addition, generator 1 = pair(1, 1).
    MockGt
);

/// Marker for the mock pairing setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Mock1009;

impl PairingGroups for Mock1009 {
    type Scalar = MockScalar;
    type G1 = MockG1;
    type G2 = MockG2;
    type Gt = MockGt;
    const ID: &'static str = "mock-1009";
    const BACKEND: Backend = Backend::Mock;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum HashKind {
    G1,
    Scalar,
}

/// Programmed hash outputs for the mock engine.
///
/// Lookups that miss the table fall back to the wide-reduction hash into
/// [1, q-1], so unprogrammed inputs never map to the identity.
#[derive(Debug, Clone, Default)]
pub struct MockHashTable {
    entries: HashMap<(HashKind, Vec<u8>, Vec<u8>), u16>,
}

impl MockHashTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn program_g1(&mut self, tag: &[u8], input: &[u8], value: u16) -> &mut Self {
        self.entries.insert((HashKind::G1, tag.to_vec(), input.to_vec()), value % MOCK_MODULUS);
        self
    }

    /// Values are reduced modulo q; 0 is rejected since the target is Z_q^*.
    pub fn program_scalar(&mut self, tag: &[u8], input: &[u8], value: u16) -> &mut Self {
        let v = value % MOCK_MODULUS;
        assert!(v != 0, "hash_to_scalar outputs live in Z_q^*");
        self.entries.insert((HashKind::Scalar, tag.to_vec(), input.to_vec()), v);
        self
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn lookup(&self, kind: HashKind, tag: &[u8], input: &[u8]) -> Option<u16> {
        self.entries.get(&(kind, tag.to_vec(), input.to_vec())).copied()
    }
}

/// The insecure integer backend used as a brute-force oracle.
#[derive(Debug, Default)]
pub struct MockEngine {
    table: MockHashTable,
    counter: PairingCounter,
}

impl MockEngine {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_table(table: MockHashTable) -> Self {
        MockEngine { table, counter: PairingCounter::default() }
    }

    pub fn table(&self) -> &MockHashTable {
        &self.table
    }
}

impl PairingEngine for MockEngine {
    type Groups = Mock1009;

    fn counter(&self) -> &PairingCounter {
        &self.counter
    }

    fn evaluate_pairing(&self, p: &MockG1, r: &MockG2) -> MockGt {
        MockGt(reduce(p.0 as u64 * r.0 as u64))
    }

    fn psi(&self, r: &MockG2) -> Result<MockG1, PairingError> {
        Ok(MockG1(r.0))
    }

    fn hash_to_g1(&self, domain_tag: &[u8], input: &[u8]) -> MockG1 {
        assert!(!domain_tag.is_empty(), "domain tag must be non-empty");
        match self.table.lookup(HashKind::G1, domain_tag, input) {
            Some(v) => MockG1(v),
            None => MockG1(hash_to_nonzero_scalar::<MockScalar>(domain_tag, input).0),
        }
    }

    fn hash_to_scalar(&self, domain_tag: &[u8], input: &[u8]) -> MockScalar {
        assert!(!domain_tag.is_empty(), "domain tag must be non-empty");
        match self.table.lookup(HashKind::Scalar, domain_tag, input) {
            Some(v) => MockScalar(v),
            None => hash_to_nonzero_scalar(domain_tag, input),
        }
    }
}
