//! The unforgeability game as running code.
//!
//! [`Challenger`] embeds a co-CDH instance `(A, B) = (a*g1, b*g2)` into the
//! oracles an adversary talks to: H0, H1, LowerLevel.Setup, Corrupt, Extract
//! and Sign. Coins are biased by `delta`; H0 answers with coin 1 carry an
//! `A` component, TAs with coin 1 get `y_i = kappa_i*B`. When a forgery with
//! the right coin pattern arrives, [`Challenger::finalize`] turns it into
//! `a*b*g1`.
//!
//! The reduction is only checkable where discrete logs are known, i.e. on the
//! mock backend with a planted instance. On BLS12-381 the Extract/Sign
//! branches that need psi fail with `Unsupported`, so production runs are
//! limited to counting.

pub mod bound;
pub mod forger;
pub mod montecarlo;

use std::collections::{HashMap, HashSet};

use rand::{Rng, RngCore};
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use thiserror::Error;

use crate::engine::{G1Of, GroupElement, PairingEngine, PairingError, PairingGroups, ScalarField, ScalarOf};
use crate::scheme::{
    self, AggregateBundle, MasterSecret, RandomOracles, SchemeError, Signature, SignerKey, SystemParams, TaRecord,
    VerifyOptions,
};

pub use bound::{bound_check, BoundParams, BoundReport};
pub use forger::{scripted_forger, ForgerConfig, Forgery};
pub use montecarlo::{monte_carlo_abort, MonteCarloReport, Workload, WorkloadOp};

/// Where the challenger gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AbortSite {
    Corrupt,
    Extract,
    Sign,
    Forgery,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("challenger aborted at {0:?}")]
    Abort(AbortSite),
    #[error("game already aborted at {0:?}")]
    GameAborted(AbortSite),
    #[error("delta must lie in [0, 1], got {0}")]
    InvalidDelta(f64),
    #[error("certificate was not issued by a LowerLevel.Setup query")]
    UnknownCertificate,
    #[error("unknown TA {0}")]
    UnknownTa(String),
    #[error("forgery rejected: {0}")]
    ForgeryRejected(String),
    #[error("target index out of range")]
    BadTarget,
    #[error("alpha'_0 + h*alpha'_1 vanishes for the target; no root can be taken")]
    DegenerateDenominator,
    #[error("scripted forger gave up at {stage} after {attempts} attempts")]
    GiveUp { stage: &'static str, attempts: usize },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Pairing(#[from] PairingError),
}

/// A co-CDH challenge. `planted` holds `(a, b)` when the instance was built
/// from known exponents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoCdhInstance<P: PairingGroups> {
    pub a_point: P::G1,
    pub b_point: P::G2,
    pub planted: Option<(P::Scalar, P::Scalar)>,
}

impl<P: PairingGroups> CoCdhInstance<P> {
    pub fn planted(a: P::Scalar, b: P::Scalar) -> Self {
        CoCdhInstance {
            a_point: P::G1::generator().scalar_mul(&a),
            b_point: P::G2::generator().scalar_mul(&b),
            planted: Some((a, b)),
        }
    }

    pub fn random<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        Self::planted(P::Scalar::random_nonzero(rng), P::Scalar::random_nonzero(rng))
    }

    /// `a*b*g1`, when the exponents are known.
    pub fn solution(&self) -> Option<P::G1> {
        self.planted.map(|(a, b)| P::G1::generator().scalar_mul(&(a * b)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H0Record<P: PairingGroups> {
    pub identity: Vec<u8>,
    pub alpha0: P::Scalar,
    pub alpha0_prime: P::Scalar,
    pub alpha1: P::Scalar,
    pub alpha1_prime: P::Scalar,
    pub id0: P::G1,
    pub id1: P::G1,
    pub coin: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaSimRecord<P: PairingGroups> {
    pub identity: Vec<u8>,
    pub kappa: P::Scalar,
    pub record: TaRecord<P>,
    pub coin: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct H1SimRecord<P: PairingGroups> {
    pub identity: Vec<u8>,
    pub message: Vec<u8>,
    pub cert_bytes: Vec<u8>,
    pub h: P::Scalar,
    pub coin_prime: bool,
}

/// External oracle calls made by the adversary. Calls the challenger makes
/// on its own behalf (Sign looking up H0, finalize looking up H1, ...) are
/// not counted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct QueryCounts {
    pub h0: u64,
    pub h1: u64,
    pub lowerlevel_setup: u64,
    pub corrupt: u64,
    pub extract: u64,
    pub sign: u64,
}

/// Group exponentiations spent by the challenger, per oracle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ExpCounts {
    pub h0: u64,
    pub lowerlevel_setup: u64,
    pub extract: u64,
    pub sign: u64,
    pub finalize: u64,
}

impl ExpCounts {
    pub fn total(&self) -> u64 {
        self.h0 + self.lowerlevel_setup + self.extract + self.sign + self.finalize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Solved,
    Degenerate,
    Rejected,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GameTranscript {
    pub counts: QueryCounts,
    pub exponentiations: ExpCounts,
    pub abort: Option<AbortSite>,
    pub outcome: Option<Outcome>,
}

fn hex_scalar<S: ScalarField>(s: &S) -> String {
    hex::encode(s.to_bytes())
}

#[derive(Debug, Serialize)]
pub struct H0Dump {
    pub identity: String,
    pub coin: u8,
    pub alpha0: String,
    pub alpha0_prime: String,
    pub alpha1: String,
    pub alpha1_prime: String,
}

#[derive(Debug, Serialize)]
pub struct TaDump {
    pub identity: String,
    pub coin: u8,
    pub kappa: String,
    pub public_key: String,
    pub certificate: String,
}

#[derive(Debug, Serialize)]
pub struct H1Dump {
    pub identity: String,
    pub message: String,
    pub ta: String,
    pub h: String,
    pub coin_prime: u8,
}

/// JSON-friendly view of the whole game state. Byte strings are hex.
#[derive(Debug, Serialize)]
pub struct TranscriptDump {
    pub backend: String,
    pub delta: f64,
    pub counts: QueryCounts,
    pub exponentiations: ExpCounts,
    pub abort: Option<AbortSite>,
    pub outcome: Option<Outcome>,
    pub h0: Vec<H0Dump>,
    pub tas: Vec<TaDump>,
    pub h1: Vec<H1Dump>,
}

type H1Key = (Vec<u8>, Vec<u8>, Vec<u8>);

pub struct Challenger<'e, E: PairingEngine> {
    engine: &'e E,
    instance: CoCdhInstance<E::Groups>,
    delta: f64,
    rng: ChaCha20Rng,
    master: MasterSecret<E::Groups>,
    params: SystemParams<E::Groups>,
    h0_list: Vec<H0Record<E::Groups>>,
    h0_index: HashMap<Vec<u8>, usize>,
    ta_list: Vec<TaSimRecord<E::Groups>>,
    ta_by_id: HashMap<Vec<u8>, usize>,
    ta_by_cert: HashMap<Vec<u8>, usize>,
    h1_list: Vec<H1SimRecord<E::Groups>>,
    h1_index: HashMap<H1Key, usize>,
    extracted: HashMap<(Vec<u8>, usize), SignerKey<E::Groups>>,
    corrupted: HashSet<usize>,
    signed: Vec<(Vec<u8>, usize, Vec<u8>)>,
    transcript: GameTranscript,
}

impl<E: PairingEngine> std::fmt::Debug for Challenger<'_, E> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Challenger")
            .field("delta", &self.delta)
            .field("transcript", &self.transcript)
            .finish_non_exhaustive()
    }
}

impl<'e, E: PairingEngine> Challenger<'e, E> {
    /// Initialize: picks the master secret and publishes the parameters.
    pub fn new(
        engine: &'e E,
        instance: CoCdhInstance<E::Groups>,
        delta: f64,
        mut rng: ChaCha20Rng,
    ) -> Result<Self, HarnessError> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(HarnessError::InvalidDelta(delta));
        }
        let master = MasterSecret::new(ScalarField::random_nonzero(&mut rng))?;
        let params = scheme::root_setup_with_secret(engine, &master);
        Ok(Challenger {
            engine,
            instance,
            delta,
            rng,
            master,
            params,
            h0_list: Vec::new(),
            h0_index: HashMap::new(),
            ta_list: Vec::new(),
            ta_by_id: HashMap::new(),
            ta_by_cert: HashMap::new(),
            h1_list: Vec::new(),
            h1_index: HashMap::new(),
            extracted: HashMap::new(),
            corrupted: HashSet::new(),
            signed: Vec::new(),
            transcript: GameTranscript::default(),
        })
    }

    pub fn params(&self) -> &SystemParams<E::Groups> {
        &self.params
    }

    pub fn engine(&self) -> &'e E {
        self.engine
    }

    pub fn instance(&self) -> &CoCdhInstance<E::Groups> {
        &self.instance
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn transcript(&self) -> &GameTranscript {
        &self.transcript
    }

    pub fn h0_records(&self) -> &[H0Record<E::Groups>] {
        &self.h0_list
    }

    pub fn ta_records(&self) -> &[TaSimRecord<E::Groups>] {
        &self.ta_list
    }

    pub fn h1_records(&self) -> &[H1SimRecord<E::Groups>] {
        &self.h1_list
    }

    pub fn h0_record(&self, identity: &[u8]) -> Option<&H0Record<E::Groups>> {
        self.h0_index.get(identity).map(|&i| &self.h0_list[i])
    }

    pub fn ta_record(&self, identity: &[u8]) -> Option<&TaSimRecord<E::Groups>> {
        self.ta_by_id.get(identity).map(|&i| &self.ta_list[i])
    }

    pub fn h1_record(
        &self,
        message: &[u8],
        identity: &[u8],
        ta: &TaRecord<E::Groups>,
    ) -> Option<&H1SimRecord<E::Groups>> {
        self.h1_index.get(&(identity.to_vec(), message.to_vec(), ta.cert_bytes())).map(|&i| &self.h1_list[i])
    }

    fn alive(&self) -> Result<(), HarnessError> {
        match self.transcript.abort {
            Some(site) => Err(HarnessError::GameAborted(site)),
            None => Ok(()),
        }
    }

    fn abort(&mut self, site: AbortSite) -> HarnessError {
        self.transcript.abort = Some(site);
        HarnessError::Abort(site)
    }

    fn flip(&mut self) -> bool {
        self.rng.gen_bool(self.delta)
    }

    // ---- programming hooks (test fixtures and the scripted forger) ----

    /// Inserts an H0 record with chosen values instead of sampling one.
    /// `alphas` is `(alpha0, alpha0', alpha1, alpha1')`; the primed values are
    /// ignored when `coin` is false.
    pub fn program_h0(&mut self, identity: &[u8], coin: bool, alphas: [ScalarOf<E>; 4]) -> &H0Record<E::Groups> {
        let [a0, mut p0, a1, mut p1] = alphas;
        if !coin {
            p0 = ScalarField::zero();
            p1 = ScalarField::zero();
        }
        let g1 = self.params.g1;
        let a = self.instance.a_point;
        let record = H0Record {
            identity: identity.to_vec(),
            alpha0: a0,
            alpha0_prime: p0,
            alpha1: a1,
            alpha1_prime: p1,
            id0: g1.scalar_mul(&a0) + a.scalar_mul(&p0),
            id1: g1.scalar_mul(&a1) + a.scalar_mul(&p1),
            coin,
        };
        self.transcript.exponentiations.h0 += if coin { 4 } else { 2 };
        let idx = self.h0_list.len();
        self.h0_list.push(record);
        self.h0_index.insert(identity.to_vec(), idx);
        &self.h0_list[idx]
    }

    /// Inserts a TA record with chosen kappa and coin.
    pub fn program_ta(
        &mut self,
        identity: &[u8],
        coin: bool,
        kappa: ScalarOf<E>,
    ) -> Result<&TaSimRecord<E::Groups>, HarnessError> {
        let base = if coin { self.instance.b_point } else { self.params.g2 };
        let y = base.scalar_mul(&kappa);
        let record = scheme::certify(self.engine, &self.master, identity, y)?;
        self.transcript.exponentiations.lowerlevel_setup += 1;
        let idx = self.ta_list.len();
        self.ta_by_cert.insert(record.cert_bytes(), idx);
        self.ta_by_id.insert(identity.to_vec(), idx);
        self.ta_list.push(TaSimRecord { identity: identity.to_vec(), kappa, record, coin });
        Ok(&self.ta_list[idx])
    }

    /// Inserts an H1 record with a chosen value and coin.
    pub fn program_h1(
        &mut self,
        message: &[u8],
        identity: &[u8],
        ta: &TaRecord<E::Groups>,
        h: ScalarOf<E>,
        coin_prime: bool,
    ) -> Result<(), HarnessError> {
        self.ta_index_by_cert(ta)?;
        let key = (identity.to_vec(), message.to_vec(), ta.cert_bytes());
        self.h1_index.insert(key.clone(), self.h1_list.len());
        self.h1_list.push(H1SimRecord { identity: key.0, message: key.1, cert_bytes: key.2, h, coin_prime });
        Ok(())
    }

    // ---- internal lookups ----

    fn h0_lookup(&mut self, identity: &[u8]) -> usize {
        if let Some(&i) = self.h0_index.get(identity) {
            return i;
        }
        let coin = self.flip();
        let mut draw = || ScalarOf::<E>::random_nonzero(&mut self.rng);
        let alphas = [draw(), draw(), draw(), draw()];
        self.program_h0(identity, coin, alphas);
        self.h0_list.len() - 1
    }

    fn ta_lookup(&mut self, identity: &[u8]) -> Result<usize, HarnessError> {
        if let Some(&i) = self.ta_by_id.get(identity) {
            return Ok(i);
        }
        let kappa = ScalarOf::<E>::random_nonzero(&mut self.rng);
        let coin = self.flip();
        self.program_ta(identity, coin, kappa)?;
        Ok(self.ta_list.len() - 1)
    }

    fn ta_index_by_cert(&self, ta: &TaRecord<E::Groups>) -> Result<usize, HarnessError> {
        let idx = *self.ta_by_cert.get(&ta.cert_bytes()).ok_or(HarnessError::UnknownCertificate)?;
        if self.ta_list[idx].record != *ta {
            return Err(HarnessError::UnknownCertificate);
        }
        Ok(idx)
    }

    fn h1_lookup(&mut self, message: &[u8], identity: &[u8], ta: &TaRecord<E::Groups>) -> Result<usize, HarnessError> {
        let ti = self.ta_index_by_cert(ta)?;
        let key = (identity.to_vec(), message.to_vec(), ta.cert_bytes());
        if let Some(&i) = self.h1_index.get(&key) {
            return Ok(i);
        }
        let hi = self.h0_lookup(identity);
        let coin_prime = self.flip();
        let r = &self.h0_list[hi];
        let h = if self.ta_list[ti].coin && r.coin && coin_prime {
            -(r.alpha0_prime * r.alpha1_prime.invert().expect("alpha' is non-zero when coin = 1"))
        } else {
            ScalarOf::<E>::random_nonzero(&mut self.rng)
        };
        self.h1_index.insert(key.clone(), self.h1_list.len());
        self.h1_list.push(H1SimRecord { identity: key.0, message: key.1, cert_bytes: key.2, h, coin_prime });
        Ok(self.h1_list.len() - 1)
    }

    /// The key the challenger can compute without knowing `a`: valid unless
    /// both coins are 1.
    fn simulated_key(&mut self, hi: usize, ti: usize) -> Result<(G1Of<E>, G1Of<E>), HarnessError> {
        let (r, t) = (&self.h0_list[hi], &self.ta_list[ti]);
        if !t.coin {
            return Ok((r.id0.scalar_mul(&t.kappa), r.id1.scalar_mul(&t.kappa)));
        }
        let b = self.instance.b_point;
        let s0 = self.engine.psi(&b.scalar_mul(&(t.kappa * r.alpha0)))?;
        let s1 = self.engine.psi(&b.scalar_mul(&(t.kappa * r.alpha1)))?;
        Ok((s0, s1))
    }

    // ---- the adversary's oracles ----

    pub fn oracle_h0(&mut self, identity: &[u8], bit: u8) -> Result<G1Of<E>, HarnessError> {
        self.alive()?;
        assert!(bit <= 1, "H0 takes bit 0 or 1");
        self.transcript.counts.h0 += 1;
        let i = self.h0_lookup(identity);
        let r = &self.h0_list[i];
        Ok(if bit == 0 { r.id0 } else { r.id1 })
    }

    /// Returns the TA's public record (identity, y_i, certificate).
    pub fn oracle_lowerlevel_setup(&mut self, ta_identity: &[u8]) -> Result<TaRecord<E::Groups>, HarnessError> {
        self.alive()?;
        self.transcript.counts.lowerlevel_setup += 1;
        let i = self.ta_lookup(ta_identity)?;
        Ok(self.ta_list[i].record.clone())
    }

    pub fn oracle_h1(
        &mut self,
        message: &[u8],
        identity: &[u8],
        ta: &TaRecord<E::Groups>,
    ) -> Result<ScalarOf<E>, HarnessError> {
        self.alive()?;
        self.transcript.counts.h1 += 1;
        let i = self.h1_lookup(message, identity, ta)?;
        Ok(self.h1_list[i].h)
    }

    pub fn oracle_corrupt(&mut self, ta_identity: &[u8]) -> Result<ScalarOf<E>, HarnessError> {
        self.alive()?;
        self.transcript.counts.corrupt += 1;
        let i = self.ta_lookup(ta_identity)?;
        if self.ta_list[i].coin {
            return Err(self.abort(AbortSite::Corrupt));
        }
        self.corrupted.insert(i);
        Ok(self.ta_list[i].kappa)
    }

    pub fn oracle_extract(
        &mut self,
        identity: &[u8],
        ta: &TaRecord<E::Groups>,
    ) -> Result<SignerKey<E::Groups>, HarnessError> {
        self.alive()?;
        self.transcript.counts.extract += 1;
        let ti = self.ta_index_by_cert(ta)?;
        if let Some(k) = self.extracted.get(&(identity.to_vec(), ti)) {
            return Ok(k.clone());
        }
        if identity.is_empty() {
            return Err(SchemeError::EmptyIdentity.into());
        }
        let hi = self.h0_lookup(identity);
        if self.h0_list[hi].coin && self.ta_list[ti].coin {
            return Err(self.abort(AbortSite::Extract));
        }
        let (s0, s1) = self.simulated_key(hi, ti)?;
        self.transcript.exponentiations.extract += 2;
        let key = SignerKey { identity: identity.to_vec(), ta_fingerprint: ta.fingerprint(), s0, s1 };
        self.extracted.insert((identity.to_vec(), ti), key.clone());
        Ok(key)
    }

    pub fn oracle_sign(
        &mut self,
        identity: &[u8],
        message: &[u8],
        ta: &TaRecord<E::Groups>,
    ) -> Result<Signature<E::Groups>, HarnessError> {
        self.alive()?;
        self.transcript.counts.sign += 1;
        let ti = self.ta_index_by_cert(ta)?;
        let hi = self.h0_lookup(identity);
        let h1i = self.h1_lookup(message, identity, ta)?;
        let (r, t, q) = (&self.h0_list[hi], &self.ta_list[ti], &self.h1_list[h1i]);
        let sigma = match (r.coin, t.coin, q.coin_prime) {
            (true, true, true) => {
                let ratio = r.alpha0_prime * r.alpha1_prime.invert().expect("alpha' is non-zero when coin = 1");
                let exponent = t.kappa * (r.alpha0 - r.alpha1 * ratio);
                self.transcript.exponentiations.sign += 1;
                self.engine.psi(&self.instance.b_point.scalar_mul(&exponent))?
            }
            (true, true, false) => return Err(self.abort(AbortSite::Sign)),
            _ => {
                let h = q.h;
                let (s0, s1) = self.simulated_key(hi, ti)?;
                self.transcript.exponentiations.sign += 3;
                s0 + s1.scalar_mul(&h)
            }
        };
        self.signed.push((identity.to_vec(), ti, message.to_vec()));
        Ok(Signature(sigma))
    }

    /// Turns a forgery into a co-CDH solution. `target` is (group, signer)
    /// inside the bundle.
    pub fn finalize(
        &mut self,
        forgery: &AggregateBundle<E::Groups>,
        target: (usize, usize),
    ) -> Result<G1Of<E>, HarnessError> {
        self.alive()?;
        let (tg, ts) = target;
        let target_signer =
            forgery.groups.get(tg).and_then(|g| g.signers.get(ts)).ok_or(HarnessError::BadTarget)?.clone();
        let target_ta = forgery.groups[tg].ta.clone();

        let report = {
            let engine = self.engine;
            let params = self.params.clone();
            let mut oracles = GameOracles { ch: self, error: None };
            let report = scheme::verify_with(engine, &mut oracles, &params, forgery, VerifyOptions::default());
            if let Some(e) = oracles.error {
                return Err(e);
            }
            report?
        };
        if !report.valid {
            self.transcript.outcome = Some(Outcome::Rejected);
            return Err(HarnessError::ForgeryRejected(format!("{:?}", report.rejection)));
        }

        // Winning conditions 2 and 3 for the target.
        let tti = self.ta_index_by_cert(&target_ta)?;
        let id = &target_signer.identity;
        let trivial = if self.corrupted.contains(&tti) {
            Some("target TA was corrupted")
        } else if self.extracted.contains_key(&(id.clone(), tti)) {
            Some("target key was extracted")
        } else {
            let queries: Vec<_> = self.signed.iter().filter(|(i, t, _)| i == id && *t == tti).collect();
            if queries.iter().any(|(_, _, m)| *m == target_signer.message) {
                Some("target message was signed by the oracle")
            } else if queries.len() > 1 {
                Some("target key was used more than once")
            } else {
                None
            }
        };
        if let Some(why) = trivial {
            self.transcript.outcome = Some(Outcome::Rejected);
            return Err(HarnessError::ForgeryRejected(why.into()));
        }

        // Coin pattern: target (1, 1, 0), every other signer coin 0.
        let thi = self.h0_index[id.as_slice()];
        let th1 = self.h1_index[&(id.clone(), target_signer.message.clone(), target_ta.cert_bytes())];
        let mut sigma3 = self.h0_list[thi].coin && self.ta_list[tti].coin && !self.h1_list[th1].coin_prime;
        for (gi, group) in forgery.groups.iter().enumerate() {
            for (si, s) in group.signers.iter().enumerate() {
                if (gi, si) != target && self.h0_list[self.h0_index[s.identity.as_slice()]].coin {
                    sigma3 = false;
                }
            }
        }
        if !sigma3 {
            return Err(self.abort(AbortSite::Forgery));
        }

        let (r, t, h1) = (&self.h0_list[thi], &self.ta_list[tti], self.h1_list[th1].h);
        let denominator = t.kappa * (r.alpha0_prime + h1 * r.alpha1_prime);
        let Some(inverse) = denominator.invert() else {
            self.transcript.outcome = Some(Outcome::Degenerate);
            return Err(HarnessError::DegenerateDenominator);
        };

        let mut acc = forgery.aggregate;
        for group in &forgery.groups {
            let mut coeff = ScalarOf::<E>::zero();
            for s in &group.signers {
                let r = &self.h0_list[self.h0_index[s.identity.as_slice()]];
                let h = self.h1_list[self.h1_index[&(s.identity.clone(), s.message.clone(), group.ta.cert_bytes())]].h;
                coeff = coeff + r.alpha0 + h * r.alpha1;
            }
            acc = acc - self.engine.psi(&group.ta.public_key)?.scalar_mul(&coeff);
            self.transcript.exponentiations.finalize += 1;
        }
        self.transcript.exponentiations.finalize += 1;
        self.transcript.outcome = Some(Outcome::Solved);
        Ok(acc.scalar_mul(&inverse))
    }

    pub fn dump(&self) -> TranscriptDump {
        let text = |b: &[u8]| String::from_utf8(b.to_vec()).unwrap_or_else(|_| hex::encode(b));
        TranscriptDump {
            backend: self.engine.id().to_string(),
            delta: self.delta,
            counts: self.transcript.counts,
            exponentiations: self.transcript.exponentiations,
            abort: self.transcript.abort,
            outcome: self.transcript.outcome.clone(),
            h0: self
                .h0_list
                .iter()
                .map(|r| H0Dump {
                    identity: text(&r.identity),
                    coin: r.coin as u8,
                    alpha0: hex_scalar(&r.alpha0),
                    alpha0_prime: hex_scalar(&r.alpha0_prime),
                    alpha1: hex_scalar(&r.alpha1),
                    alpha1_prime: hex_scalar(&r.alpha1_prime),
                })
                .collect(),
            tas: self
                .ta_list
                .iter()
                .map(|t| TaDump {
                    identity: text(&t.identity),
                    coin: t.coin as u8,
                    kappa: hex_scalar(&t.kappa),
                    public_key: hex::encode(t.record.public_key.to_bytes()),
                    certificate: hex::encode(t.record.certificate.to_bytes()),
                })
                .collect(),
            h1: self
                .h1_list
                .iter()
                .map(|q| H1Dump {
                    identity: text(&q.identity),
                    message: text(&q.message),
                    ta: text(&self.ta_list[self.ta_by_cert[&q.cert_bytes]].identity),
                    h: hex_scalar(&q.h),
                    coin_prime: q.coin_prime as u8,
                })
                .collect(),
        }
    }
}

/// The challenger's programmed H0/H1, as seen by `scheme::verify_with`.
struct GameOracles<'c, 'e, E: PairingEngine> {
    ch: &'c mut Challenger<'e, E>,
    error: Option<HarnessError>,
}

impl<E: PairingEngine> RandomOracles<E::Groups> for GameOracles<'_, '_, E> {
    fn h0(&mut self, identity: &[u8], bit: u8) -> Result<G1Of<E>, SchemeError> {
        let i = self.ch.h0_lookup(identity);
        let r = &self.ch.h0_list[i];
        Ok(if bit == 0 { r.id0 } else { r.id1 })
    }

    fn h1(&mut self, message: &[u8], identity: &[u8], ta: &TaRecord<E::Groups>) -> Result<ScalarOf<E>, SchemeError> {
        match self.ch.h1_lookup(message, identity, ta) {
            Ok(i) => Ok(self.ch.h1_list[i].h),
            Err(e) => {
                let msg = e.to_string();
                self.error = Some(e);
                Err(SchemeError::Oracle(msg))
            }
        }
    }
}
