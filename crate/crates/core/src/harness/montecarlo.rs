//! Empirical abort rate of the challenger against a fixed query script.
//!
//! Each trial builds a fresh challenger seeded from `(seed, trial)` and
//! replays the workload; the trial fails at the first abort. Trials run in
//! parallel, each with its own RNG, so results do not depend on scheduling.

use std::collections::{BTreeMap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{AbortSite, Challenger, CoCdhInstance, HarnessError};
use crate::engine::{PairingEngine, ScalarField};
use crate::scheme::TaRecord;

/// One adversary query on symbolic names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum WorkloadOp {
    H0 { id: String, bit: u8 },
    Setup { ta: String },
    Corrupt { ta: String },
    Extract { id: String, ta: String },
    Sign { id: String, ta: String, message: String },
    H1 { id: String, ta: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Workload(pub Vec<WorkloadOp>);

impl Workload {
    /// q_C corruptions, q_E extractions and q_S signing queries, each on its
    /// own TA and identity so that every one of them is an independent
    /// chance to abort.
    pub fn claim1(q_c: usize, q_e: usize, q_s: usize) -> Self {
        let mut ops = Vec::new();
        for i in 0..q_c {
            ops.push(WorkloadOp::Setup { ta: format!("TC{i}") });
            ops.push(WorkloadOp::Corrupt { ta: format!("TC{i}") });
        }
        for i in 0..q_e {
            ops.push(WorkloadOp::Setup { ta: format!("TE{i}") });
            ops.push(WorkloadOp::Extract { id: format!("IDE{i}"), ta: format!("TE{i}") });
        }
        for i in 0..q_s {
            ops.push(WorkloadOp::Setup { ta: format!("TS{i}") });
            ops.push(WorkloadOp::Sign { id: format!("IDS{i}"), ta: format!("TS{i}"), message: format!("m{i}") });
        }
        Workload(ops)
    }

    /// (q_C, q_E, q_S) as written in the script.
    pub fn abort_query_counts(&self) -> (u64, u64, u64) {
        let mut c = (0, 0, 0);
        for op in &self.0 {
            match op {
                WorkloadOp::Corrupt { .. } => c.0 += 1,
                WorkloadOp::Extract { .. } => c.1 += 1,
                WorkloadOp::Sign { .. } => c.2 += 1,
                _ => {}
            }
        }
        c
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Replays `workload` against `ch`. Returns the abort site, if any.
pub fn run_workload<E: PairingEngine>(
    ch: &mut Challenger<'_, E>,
    workload: &Workload,
) -> Result<Option<AbortSite>, HarnessError> {
    let mut tas: HashMap<&str, TaRecord<E::Groups>> = HashMap::new();
    let ta = |tas: &HashMap<&str, TaRecord<E::Groups>>, name: &str| {
        tas.get(name).cloned().ok_or_else(|| HarnessError::UnknownTa(name.to_string()))
    };
    for op in &workload.0 {
        let r = match op {
            WorkloadOp::H0 { id, bit } => ch.oracle_h0(id.as_bytes(), *bit).map(drop),
            WorkloadOp::Setup { ta } => ch.oracle_lowerlevel_setup(ta.as_bytes()).map(|rec| {
                tas.insert(ta.as_str(), rec);
            }),
            WorkloadOp::Corrupt { ta } => ch.oracle_corrupt(ta.as_bytes()).map(drop),
            WorkloadOp::Extract { id, ta: t } => ch.oracle_extract(id.as_bytes(), &ta(&tas, t)?).map(drop),
            WorkloadOp::Sign { id, ta: t, message } => {
                ch.oracle_sign(id.as_bytes(), message.as_bytes(), &ta(&tas, t)?).map(drop)
            }
            WorkloadOp::H1 { id, ta: t, message } => {
                ch.oracle_h1(message.as_bytes(), id.as_bytes(), &ta(&tas, t)?).map(drop)
            }
        };
        match r {
            Ok(()) => {}
            Err(HarnessError::Abort(site)) => return Ok(Some(site)),
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub delta: f64,
    pub trials: u64,
    pub survived: u64,
    pub estimate: f64,
    /// 99% normal-approximation half-width, 2.576 * sqrt(p(1-p)/N).
    pub half_width: f64,
    pub q_c: u64,
    pub q_e: u64,
    pub q_s: u64,
    /// (1 - delta)^(q_C + q_E + q_S).
    pub bound: f64,
    pub holds: bool,
    pub aborts: BTreeMap<String, u64>,
}

const Z_99: f64 = 2.576;

fn trial_seed(seed: u64, trial: u64) -> [u8; 32] {
    let mut s = [0u8; 32];
    s[..8].copy_from_slice(&seed.to_le_bytes());
    s[8..16].copy_from_slice(&trial.to_le_bytes());
    s[16..24].copy_from_slice(b"mc-trial");
    s
}

/// Estimates Pr[no abort] over `trials` independent games.
pub fn monte_carlo_abort<E: PairingEngine>(
    engine: &E,
    workload: &Workload,
    delta: f64,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloReport, HarnessError> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(HarnessError::InvalidDelta(delta));
    }
    let outcomes: Vec<Option<AbortSite>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha20Rng::from_seed(trial_seed(seed, t));
            let instance =
                CoCdhInstance::planted(ScalarField::random_nonzero(&mut rng), ScalarField::random_nonzero(&mut rng));
            let mut ch = Challenger::new(engine, instance, delta, rng)?;
            run_workload(&mut ch, workload)
        })
        .collect::<Result<_, _>>()?;

    let mut aborts = BTreeMap::new();
    for site in outcomes.iter().flatten() {
        *aborts.entry(format!("{site:?}").to_lowercase()).or_insert(0) += 1;
    }
    let survived = outcomes.iter().filter(|o| o.is_none()).count() as u64;
    let estimate = if trials == 0 { 0.0 } else { survived as f64 / trials as f64 };
    let half_width =
        if trials == 0 { f64::INFINITY } else { Z_99 * (estimate * (1.0 - estimate) / trials as f64).sqrt() };
    let (q_c, q_e, q_s) = workload.abort_query_counts();
    let bound = (1.0 - delta).powi((q_c + q_e + q_s) as i32);
    Ok(MonteCarloReport {
        delta,
        trials,
        survived,
        estimate,
        half_width,
        q_c,
        q_e,
        q_s,
        bound,
        holds: estimate >= bound - half_width,
        aborts,
    })
}
