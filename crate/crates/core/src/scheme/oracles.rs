use crate::engine::{PairingEngine, PairingGroups, TAG_H0, TAG_H1};

use super::{h0_input, h1_input, SchemeError, TaRecord};

/// The two hash functions the scheme treats as random oracles.
///
/// Production code uses [`StandardOracles`]; the security harness plugs in
/// programmed tables so the same `extract`/`sign`/`verify` code runs inside
/// the simulated game.
pub trait RandomOracles<P: PairingGroups> {
    /// H0(identity, bit) in G1.
    fn h0(&mut self, identity: &[u8], bit: u8) -> Result<P::G1, SchemeError>;
    /// H1(message, identity, cert) in Z_q^*.
    fn h1(&mut self, message: &[u8], identity: &[u8], ta: &TaRecord<P>) -> Result<P::Scalar, SchemeError>;
}

/// Hashes through the engine under the fixed domain tags.
#[derive(Debug, Clone, Copy)]
pub struct StandardOracles<'a, E> {
    engine: &'a E,
}

impl<'a, E: PairingEngine> StandardOracles<'a, E> {
    pub fn new(engine: &'a E) -> Self {
        StandardOracles { engine }
    }
}

impl<E: PairingEngine> RandomOracles<E::Groups> for StandardOracles<'_, E> {
    fn h0(&mut self, identity: &[u8], bit: u8) -> Result<<E::Groups as PairingGroups>::G1, SchemeError> {
        Ok(self.engine.hash_to_g1(TAG_H0, &h0_input(identity, bit)))
    }

    fn h1(
        &mut self,
        message: &[u8],
        identity: &[u8],
        ta: &TaRecord<E::Groups>,
    ) -> Result<<E::Groups as PairingGroups>::Scalar, SchemeError> {
        Ok(self.engine.hash_to_scalar(TAG_H1, &h1_input(message, identity, ta)))
    }
}
