//! A perfect adversary for the mock backend. Every mock element is its own
//! discrete log, so the forger can compute any aggregate directly; what it
//! cannot control are the challenger's coins, so it resamples fresh names
//! until the target has the pattern the reduction needs.

use super::{Challenger, HarnessError};
use crate::engine::{GroupElement, MockEngine, MockG1, ScalarField};
use crate::scheme::{AggregateBundle, BundleSigner, Signature, TaRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForgerConfig {
    /// Extra signers next to the target under the target's TA.
    pub co_signers: usize,
    /// Additional TA groups in the forgery.
    pub extra_groups: usize,
    pub signers_per_extra_group: usize,
    /// Per-stage attempt limit before giving up.
    pub max_attempts: usize,
    /// Plant an H1 value that makes the extraction denominator vanish.
    pub degenerate: bool,
}

impl Default for ForgerConfig {
    fn default() -> Self {
        ForgerConfig {
            co_signers: 2,
            extra_groups: 1,
            signers_per_extra_group: 2,
            max_attempts: 200,
            degenerate: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Forgery {
    pub bundle: AggregateBundle<crate::engine::Mock1009>,
    /// (group, signer) of the target inside the bundle.
    pub target: (usize, usize),
    /// Names tried for the target TA, identity and message together.
    pub pattern_attempts: usize,
    /// Names tried while looking for coin-0 co-signers.
    pub cosigner_attempts: usize,
}

fn search<T>(
    stage: &'static str,
    max: usize,
    attempts: &mut usize,
    mut step: impl FnMut(usize) -> Result<Option<T>, HarnessError>,
) -> Result<T, HarnessError> {
    for k in 0..max {
        *attempts += 1;
        if let Some(v) = step(k)? {
            return Ok(v);
        }
    }
    Err(HarnessError::GiveUp { stage, attempts: max })
}

type Group = (TaRecord<crate::engine::Mock1009>, Vec<BundleSigner>);

/// Drives `ch` to a valid, non-trivial forgery with the target at (0, 0).
pub fn scripted_forger(ch: &mut Challenger<'_, MockEngine>, config: ForgerConfig) -> Result<Forgery, HarnessError> {
    let max = config.max_attempts;
    let mut pattern_attempts = 0;
    let mut cosigner_attempts = 0;

    let target_ta = search("target TA", max, &mut pattern_attempts, |k| {
        let name = format!("FT-{k}");
        let rec = ch.oracle_lowerlevel_setup(name.as_bytes())?;
        Ok(ch.ta_record(name.as_bytes()).expect("just set up").coin.then_some(rec))
    })?;
    let target_id = search("target identity", max, &mut pattern_attempts, |k| {
        let id = format!("FID-{k}");
        ch.oracle_h0(id.as_bytes(), 0)?;
        Ok(ch.h0_record(id.as_bytes()).expect("just queried").coin.then_some(id))
    })?;
    let target_msg = if config.degenerate {
        let r = ch.h0_record(target_id.as_bytes()).expect("queried").clone();
        let h = -(r.alpha0_prime * r.alpha1_prime.invert().expect("coin 1 has alpha' != 0"));
        ch.program_h1(b"degenerate", target_id.as_bytes(), &target_ta, h, false)?;
        "degenerate".to_string()
    } else {
        search("target message", max, &mut pattern_attempts, |k| {
            let m = format!("forged-{k}");
            ch.oracle_h1(m.as_bytes(), target_id.as_bytes(), &target_ta)?;
            let coin_prime = ch.h1_record(m.as_bytes(), target_id.as_bytes(), &target_ta).expect("queried").coin_prime;
            Ok((!coin_prime).then_some(m))
        })?
    };

    let mut next_cosigner = 0usize;
    let mut cosigners =
        |ch: &mut Challenger<'_, MockEngine>, count: usize| -> Result<Vec<BundleSigner>, HarnessError> {
            let mut out = Vec::new();
            for _ in 0..count {
                let id = search("co-signer", max, &mut cosigner_attempts, |_| {
                    let id = format!("FCO-{next_cosigner}");
                    next_cosigner += 1;
                    ch.oracle_h0(id.as_bytes(), 0)?;
                    Ok((!ch.h0_record(id.as_bytes()).expect("queried").coin).then_some(id))
                })?;
                out.push(BundleSigner::new(id.clone(), format!("co-msg-{id}")));
            }
            Ok(out)
        };

    let mut signers = vec![BundleSigner::new(target_id.clone(), target_msg)];
    signers.extend(cosigners(ch, config.co_signers)?);
    let mut groups: Vec<Group> = vec![(target_ta.clone(), signers)];
    for g in 0..config.extra_groups {
        let ta = ch.oracle_lowerlevel_setup(format!("FX-{g}").as_bytes())?;
        groups.push((ta, cosigners(ch, config.signers_per_extra_group)?));
    }

    // Legitimate side queries: co-signer keys and signatures are fair game.
    if let Some(s) = groups[0].1.get(1) {
        ch.oracle_extract(&s.identity, &target_ta)?;
        ch.oracle_sign(&s.identity, b"side query", &target_ta)?;
    }

    // Omega = sum_j dlog(y_j) * sum_i (id_i0 + h_i id_i1), straight from the
    // mock discrete logs.
    let mut omega = MockG1::identity();
    for (ta, signers) in &groups {
        let mut acc = MockG1::identity();
        for s in signers {
            let h = ch.oracle_h1(&s.message, &s.identity, ta)?;
            acc = acc + ch.oracle_h0(&s.identity, 0)? + ch.oracle_h0(&s.identity, 1)?.scalar_mul(&h);
        }
        omega = omega + acc.scalar_mul(&ta.public_key.dlog());
    }

    let per_signer: Vec<_> = groups
        .into_iter()
        .map(|(ta, signers)| (ta, signers.into_iter().map(|s| (s, Signature(MockG1::identity()))).collect()))
        .collect();
    let mut bundle = AggregateBundle::assemble(per_signer)?;
    bundle.aggregate = omega;
    Ok(Forgery { bundle, target: (0, 0), pattern_attempts, cosigner_attempts })
}
