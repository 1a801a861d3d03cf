//! The `mtao` command line. [`run`] is the whole program minus process
//! plumbing, so tests drive it in-process with their own output buffers.
//!
//! Every command prints one JSON document on stdout; diagnostics go to
//! stderr. Exit codes are listed in [`exit`].

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mtao_core::codec::MAGIC;
use mtao_core::engine::{Backend, Bls12Engine, MockEngine, MockHashTable, ScalarOf};
use mtao_core::harness::{
    bound_check, monte_carlo_abort, montecarlo::run_workload, scripted_forger, BoundParams, Challenger, CoCdhInstance,
    ForgerConfig, HarnessError, Workload,
};
use mtao_core::keystore::{KeyStore, KeystoreError};
use mtao_core::scheme::{
    self, AggregateBundle, BundleSigner, MasterSecret, Signature, StandardOracles, SystemParams, TaRecord, TaSecret,
    VerifyOptions,
};
use mtao_core::vectors::{self, VectorError};
use mtao_core::{kat, CodecError, Envelope, GroupElement, PairingEngine, ScalarField, SchemeError};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;
use serde_json::{json, Value};

pub mod exit {
    pub const OK: i32 = 0;
    /// A signature or bundle did not verify, or a check did not hold.
    pub const INVALID: i32 = 1;
    /// Unreadable, undecodable or inconsistent input, including bad flags.
    pub const MALFORMED: i32 = 2;
    /// A one-time key was already used, or a fresh duplicate exists.
    pub const ONE_TIME: i32 = 3;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Production,
    Mock,
}

#[derive(Debug, Parser)]
#[command(name = "mtao", version, about = "Multi-authority one-time identity-based aggregate signatures")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = BackendArg::Production, global = true)]
    pub backend: BackendArg,
    /// Required to use the mock backend, which has no security at all.
    #[arg(long, global = true)]
    pub insecure_mock: bool,
    /// Seed for every random choice. Test use only.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Vector file whose hash records program the mock oracles.
    #[arg(long, global = true)]
    pub mock_table: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create system parameters and the root master secret.
    RootSetup(RootSetupArgs),
    /// Enroll a lower-level TA: its secret plus the root-certified record.
    TaEnroll(TaEnrollArgs),
    /// Issue a one-time key to a signer and add it to a key store.
    Extract(ExtractArgs),
    /// Sign a message with a stored key, consuming it.
    Sign(SignArgs),
    /// Combine signatures into a bundle following a layout file.
    Aggregate(AggregateArgs),
    /// Verify a bundle.
    Verify(VerifyArgs),
    /// The security game and its bounds.
    Harness(HarnessArgs),
    /// Test-vector files.
    Vectors(VectorsArgs),
}

#[derive(Debug, Args)]
pub struct RootSetupArgs {
    #[arg(long)]
    pub out_params: PathBuf,
    #[arg(long)]
    pub out_master: PathBuf,
    /// Fixed master secret, fixed-width hex. Mock backend only.
    #[arg(long)]
    pub secret_hex: Option<String>,
}

#[derive(Debug, Args)]
pub struct TaEnrollArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub master: PathBuf,
    #[arg(long)]
    pub ta_id: String,
    #[arg(long)]
    pub out_record: PathBuf,
    #[arg(long)]
    pub out_secret: PathBuf,
    /// Fixed TA secret, fixed-width hex. Mock backend only.
    #[arg(long)]
    pub secret_hex: Option<String>,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[arg(long)]
    pub ta_secret: PathBuf,
    #[arg(long)]
    pub ta_record: PathBuf,
    #[arg(long, required_unless_present = "signer_id_hex", conflicts_with = "signer_id_hex")]
    pub signer_id: Option<String>,
    #[arg(long)]
    pub signer_id_hex: Option<String>,
    /// Key store journal; falls back to MTAO_STORE.
    #[arg(long, env = "MTAO_STORE")]
    pub store: Option<PathBuf>,
    /// Also write the key itself to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SignArgs {
    #[arg(long, env = "MTAO_STORE")]
    pub store: Option<PathBuf>,
    #[arg(long)]
    pub entry_id: u64,
    #[arg(long)]
    pub ta_record: PathBuf,
    #[arg(long)]
    pub message_file: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AggregateArgs {
    /// JSON layout: TA groups, each with its signers in order.
    #[arg(long)]
    pub layout: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Signature files, one per signer in layout order.
    #[arg(required = true)]
    pub signatures: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long)]
    pub bundle: PathBuf,
    /// Trust the TA records in the bundle without checking certificates.
    #[arg(long)]
    pub skip_cert_check: bool,
}

#[derive(Debug, Args)]
pub struct HarnessArgs {
    #[command(subcommand)]
    pub command: HarnessCommand,
}

#[derive(Debug, Subcommand)]
pub enum HarnessCommand {
    /// Play the game against the scripted forger and run the reduction.
    Run(HarnessRunArgs),
    /// Check the success bound at one point, exactly.
    BoundCheck(BoundCheckArgs),
    /// Estimate the probability that the challenger never aborts.
    MonteCarlo(MonteCarloArgs),
}

#[derive(Debug, Args)]
pub struct HarnessRunArgs {
    /// Coin bias; defaults to 2 / (N + 2) for the queries this run makes.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Planted co-CDH exponent a, fixed-width hex.
    #[arg(long)]
    pub a_hex: Option<String>,
    #[arg(long)]
    pub b_hex: Option<String>,
    /// Queries to replay before the forger starts.
    #[arg(long)]
    pub workload: Option<PathBuf>,
    #[arg(long, default_value_t = 2)]
    pub co_signers: usize,
    #[arg(long, default_value_t = 1)]
    pub extra_groups: usize,
    #[arg(long, default_value_t = 2)]
    pub signers_per_extra_group: usize,
    #[arg(long, default_value_t = 200)]
    pub max_attempts: usize,
    /// Make the extraction denominator vanish on purpose.
    #[arg(long)]
    pub degenerate: bool,
    /// Write the full transcript (coins, alphas, counts) here.
    #[arg(long)]
    pub transcript_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundCheckArgs {
    #[arg(long)]
    pub qc: u64,
    #[arg(long)]
    pub qe: u64,
    #[arg(long)]
    pub qs: u64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct MonteCarloArgs {
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    /// Query script; defaults to the independent-query script below.
    #[arg(long, conflicts_with = "counts")]
    pub workload: Option<PathBuf>,
    /// q_C,q_E,q_S for the built-in script of independent queries.
    #[arg(long, value_delimiter = ',', default_values_t = [5u64, 5, 5])]
    pub counts: Vec<u64>,
}

#[derive(Debug, Args)]
pub struct VectorsArgs {
    #[command(subcommand)]
    pub command: VectorsCommand,
}

#[derive(Debug, Subcommand)]
pub enum VectorsCommand {
    /// Write the fixed mock scenario's vectors, recomputed from its integers.
    Kat {
        #[arg(long)]
        out: PathBuf,
    },
    /// Check every record of a vector file against the selected backend.
    Check { file: PathBuf },
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn malformed(message: impl Into<String>) -> Self {
        CliError { code: exit::MALFORMED, message: message.into() }
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        CliError::malformed(e.to_string())
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        CliError::malformed(e.to_string())
    }
}

impl From<VectorError> for CliError {
    fn from(e: VectorError) -> Self {
        CliError::malformed(e.to_string())
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        CliError::malformed(e.to_string())
    }
}

impl From<KeystoreError> for CliError {
    fn from(e: KeystoreError) -> Self {
        let code = match e {
            KeystoreError::KeyAlreadyUsed(_) | KeystoreError::DuplicateKey { .. } => exit::ONE_TIME,
            _ => exit::MALFORMED,
        };
        CliError { code, message: e.to_string() }
    }
}

type CmdResult = Result<(Value, i32), CliError>;

fn ok(v: Value) -> CmdResult {
    Ok((v, exit::OK))
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                return exit::MALFORMED;
            }
            let _ = write!(stdout, "{text}");
            return exit::OK;
        }
    };
    match execute(&cli, stderr) {
        Ok((value, code)) => {
            let text = serde_json::to_string_pretty(&value).expect("JSON values serialize");
            if writeln!(stdout, "{text}").is_err() {
                return exit::MALFORMED;
            }
            code
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn execute(cli: &Cli, stderr: &mut dyn Write) -> CmdResult {
    // Commands that need no engine.
    match &cli.command {
        Command::Harness(HarnessArgs { command: HarnessCommand::BoundCheck(a) }) => return bound_check_cmd(a),
        Command::Vectors(VectorsArgs { command: VectorsCommand::Kat { out } }) => {
            let records = kat::vectors();
            write_text(out, &vectors::format(&records))?;
            return ok(json!({ "command": "vectors kat", "out": out, "records": records.len() }));
        }
        _ => {}
    }
    match cli.backend {
        BackendArg::Production => {
            if cli.mock_table.is_some() {
                return Err(CliError::malformed("--mock-table only applies to the mock backend"));
            }
            dispatch(&Bls12Engine::new(), cli)
        }
        BackendArg::Mock => {
            if !cli.insecure_mock {
                return Err(CliError::malformed("the mock backend has no security; pass --insecure-mock to use it"));
            }
            let _ = writeln!(stderr, "warning: using the insecure mock backend");
            let table = match &cli.mock_table {
                Some(p) => vectors::mock_table(&vectors::parse(&read_text(p)?)?)?,
                None => MockHashTable::new(),
            };
            let engine = MockEngine::with_table(table);
            if let Command::Harness(HarnessArgs { command: HarnessCommand::Run(a) }) = &cli.command {
                return harness_run(&engine, cli, a);
            }
            dispatch(&engine, cli)
        }
    }
}

fn dispatch<E: PairingEngine>(engine: &E, cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::RootSetup(a) => root_setup(engine, cli, a),
        Command::TaEnroll(a) => ta_enroll(engine, cli, a),
        Command::Extract(a) => extract(engine, a),
        Command::Sign(a) => sign(engine, a),
        Command::Aggregate(a) => aggregate::<E>(a),
        Command::Verify(a) => verify(engine, a),
        Command::Harness(HarnessArgs { command: HarnessCommand::MonteCarlo(a) }) => monte_carlo(engine, cli, a),
        Command::Harness(HarnessArgs { command: HarnessCommand::Run(_) }) => {
            Err(CliError::malformed("harness run needs discrete logs and only runs on the mock backend"))
        }
        Command::Vectors(VectorsArgs { command: VectorsCommand::Check { file } }) => {
            let records = vectors::parse(&read_text(file)?)?;
            vectors::check(engine, &records)?;
            ok(json!({ "command": "vectors check", "backend": engine.id(), "records": records.len(), "ok": true }))
        }
        Command::Harness(HarnessArgs { command: HarnessCommand::BoundCheck(_) })
        | Command::Vectors(VectorsArgs { command: VectorsCommand::Kat { .. } }) => {
            unreachable!("handled before dispatch")
        }
    }
}

fn rng(cli: &Cli) -> ChaCha20Rng {
    match cli.seed {
        Some(s) => ChaCha20Rng::seed_from_u64(s),
        None => ChaCha20Rng::from_entropy(),
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::malformed(format!("{}: {e}", path.display()))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| io_error(path, e))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Accepts either envelope form: binary starts with the magic bytes, JSON
/// with a brace.
fn read_artifact<T: Envelope>(path: &Path) -> Result<T, CliError> {
    let bytes = read_bytes(path)?;
    let parsed = if bytes.starts_with(MAGIC) {
        T::from_binary(&bytes)
    } else {
        let text =
            std::str::from_utf8(&bytes).map_err(|_| CliError::malformed(format!("{}: not UTF-8", path.display())))?;
        T::from_json(text)
    };
    parsed.map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn write_artifact<T: Envelope>(path: &Path, value: &T) -> Result<(), CliError> {
    write_text(path, &(value.to_json() + "\n"))
}

fn text_or_hex(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap_or_else(|_| hex::encode(bytes))
}

fn parse_hex(flag: &str, text: &str) -> Result<Vec<u8>, CliError> {
    if text.bytes().any(|c| c.is_ascii_uppercase()) {
        return Err(CliError::malformed(format!("{flag}: hex must be lowercase")));
    }
    hex::decode(text).map_err(|e| CliError::malformed(format!("{flag}: {e}")))
}

fn parse_scalar<E: PairingEngine>(flag: &str, text: &str) -> Result<ScalarOf<E>, CliError> {
    ScalarOf::<E>::from_bytes(&parse_hex(flag, text)?).map_err(|e| CliError::malformed(format!("{flag}: {e}")))
}

/// A caller-chosen secret, refused outside the mock backend.
fn forced_secret<E: PairingEngine>(engine: &E, text: &Option<String>) -> Result<Option<ScalarOf<E>>, CliError> {
    match text {
        None => Ok(None),
        Some(_) if engine.backend() != Backend::Mock => {
            Err(CliError::malformed("--secret-hex is only accepted with the mock backend"))
        }
        Some(t) => parse_scalar::<E>("--secret-hex", t).map(Some),
    }
}

fn root_setup<E: PairingEngine>(engine: &E, cli: &Cli, a: &RootSetupArgs) -> CmdResult {
    let kappa = match forced_secret(engine, &a.secret_hex)? {
        Some(k) => k,
        None => ScalarField::random_nonzero(&mut rng(cli)),
    };
    let master = MasterSecret::<E::Groups>::new(kappa)?;
    let params = scheme::root_setup_with_secret(engine, &master);
    write_artifact(&a.out_params, &params)?;
    write_artifact(&a.out_master, &master)?;
    ok(json!({
        "command": "root-setup",
        "backend": engine.id(),
        "params": a.out_params,
        "master": a.out_master,
        "master_public": hex::encode(params.master_public.to_bytes()),
    }))
}

fn ta_enroll<E: PairingEngine>(engine: &E, cli: &Cli, a: &TaEnrollArgs) -> CmdResult {
    let params: SystemParams<E::Groups> = read_artifact(&a.params)?;
    let master: MasterSecret<E::Groups> = read_artifact(&a.master)?;
    if params.g2.scalar_mul(master.scalar()) != params.master_public {
        return Err(CliError::malformed("master secret does not match the system parameters"));
    }
    let kappa = match forced_secret(engine, &a.secret_hex)? {
        Some(k) => k,
        None => ScalarField::random_nonzero(&mut rng(cli)),
    };
    let secret = TaSecret::<E::Groups>::new(kappa)?;
    let record = scheme::lowerlevel_setup_with_secret(engine, &params, &master, a.ta_id.as_bytes(), &secret)?;
    write_artifact(&a.out_record, &record)?;
    write_artifact(&a.out_secret, &secret)?;
    ok(json!({
        "command": "ta-enroll",
        "ta_id": a.ta_id,
        "record": a.out_record,
        "secret": a.out_secret,
        "public_key": hex::encode(record.public_key.to_bytes()),
        "certificate": hex::encode(record.certificate.to_bytes()),
        "fingerprint": record.fingerprint().to_string(),
    }))
}

fn open_store<E: PairingEngine>(path: &Option<PathBuf>) -> Result<KeyStore<E::Groups>, CliError> {
    Ok(KeyStore::open_default(path.as_deref())?)
}

fn extract<E: PairingEngine>(engine: &E, a: &ExtractArgs) -> CmdResult {
    let secret: TaSecret<E::Groups> = read_artifact(&a.ta_secret)?;
    let ta: TaRecord<E::Groups> = read_artifact(&a.ta_record)?;
    let identity = match (&a.signer_id, &a.signer_id_hex) {
        (Some(id), _) => id.as_bytes().to_vec(),
        (None, Some(h)) => parse_hex("--signer-id-hex", h)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    let key = scheme::extract(engine, &secret, &ta, &identity)?;
    if let Some(out) = &a.out {
        write_artifact(out, &key)?;
    }
    let store = open_store::<E>(&a.store)?;
    let entry_id = store.store_key(key)?;
    ok(json!({
        "command": "extract",
        "entry_id": entry_id,
        "identity": text_or_hex(&identity),
        "ta_id": text_or_hex(&ta.identity),
        "ta_fingerprint": ta.fingerprint().to_string(),
    }))
}

fn sign<E: PairingEngine>(engine: &E, a: &SignArgs) -> CmdResult {
    let ta: TaRecord<E::Groups> = read_artifact(&a.ta_record)?;
    let message = read_bytes(&a.message_file)?;
    let store = open_store::<E>(&a.store)?;
    let signature = store.sign_once(engine, a.entry_id, &ta, &message)?;
    write_artifact(&a.out, &signature)?;
    let entry = store.entry(a.entry_id).expect("entry was just used");
    let usage = entry.usage.expect("entry was just used");
    ok(json!({
        "command": "sign",
        "entry_id": a.entry_id,
        "identity": text_or_hex(&entry.key.identity),
        "out": a.out,
        "signature": hex::encode(signature.0.to_bytes()),
        "message_sha256": hex::encode(usage.message_digest),
    }))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Layout {
    groups: Vec<LayoutGroup>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutGroup {
    ta_record: PathBuf,
    signers: Vec<LayoutSigner>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayoutSigner {
    identity: Option<String>,
    identity_hex: Option<String>,
    message_file: PathBuf,
}

fn aggregate<E: PairingEngine>(a: &AggregateArgs) -> CmdResult {
    let layout: Layout = serde_json::from_str(&read_text(&a.layout)?)
        .map_err(|e| CliError::malformed(format!("{}: {e}", a.layout.display())))?;
    // Paths inside the layout are relative to the layout file.
    let base = a.layout.parent().unwrap_or(Path::new(""));
    let total: usize = layout.groups.iter().map(|g| g.signers.len()).sum();
    if total != a.signatures.len() {
        return Err(CliError::malformed(format!(
            "layout lists {total} signers but {} signature files were given",
            a.signatures.len()
        )));
    }
    let mut sig_files = a.signatures.iter();
    let mut groups = Vec::new();
    for g in &layout.groups {
        let ta: TaRecord<E::Groups> = read_artifact(&base.join(&g.ta_record))?;
        let mut slots = Vec::new();
        for s in &g.signers {
            let identity = match (&s.identity, &s.identity_hex) {
                (Some(id), None) => id.as_bytes().to_vec(),
                (None, Some(h)) => parse_hex("identity_hex", h)?,
                _ => return Err(CliError::malformed("each layout signer needs exactly one of identity, identity_hex")),
            };
            let message = read_bytes(&base.join(&s.message_file))?;
            let sig: Signature<E::Groups> = read_artifact(sig_files.next().expect("counted above"))?;
            slots.push((BundleSigner::new(identity, message), sig));
        }
        groups.push((ta, slots));
    }
    let bundle = AggregateBundle::assemble(groups)?;
    write_artifact(&a.out, &bundle)?;
    ok(json!({
        "command": "aggregate",
        "out": a.out,
        "signers": bundle.signer_count(),
        "ta_groups": bundle.group_count(),
        "aggregate": hex::encode(bundle.aggregate.to_bytes()),
    }))
}

fn verify<E: PairingEngine>(engine: &E, a: &VerifyArgs) -> CmdResult {
    let params: SystemParams<E::Groups> = read_artifact(&a.params)?;
    let bundle: AggregateBundle<E::Groups> = read_artifact(&a.bundle)?;
    let options = if a.skip_cert_check { VerifyOptions::trusted_registry() } else { VerifyOptions::default() };
    let report = scheme::verify_with(engine, &mut StandardOracles::new(engine), &params, &bundle, options)?;
    let code = if report.valid { exit::OK } else { exit::INVALID };
    Ok((
        json!({
            "command": "verify",
            "valid": report.valid,
            "rejection": report.rejection.as_ref().map(|r| format!("{r:?}")),
            "signers": report.signers,
            "ta_groups": report.ta_groups,
            "main_equation_pairings": report.main_equation_pairings,
            "certificate_pairings": report.certificate_pairings,
            "total_pairings": report.total_pairings(),
        }),
        code,
    ))
}

fn bound_check_cmd(a: &BoundCheckArgs) -> CmdResult {
    let params = BoundParams { q_c: a.qc, q_e: a.qe, q_s: a.qs, n: a.n, delta: a.delta, epsilon: a.epsilon };
    let report = bound_check(&params);
    let code = if report.holds { exit::OK } else { exit::INVALID };
    Ok((serde_json::to_value(&report).expect("report serializes"), code))
}

fn load_workload(path: &Path) -> Result<Workload, CliError> {
    Workload::from_json(&read_text(path)?).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn monte_carlo<E: PairingEngine>(engine: &E, cli: &Cli, a: &MonteCarloArgs) -> CmdResult {
    let workload = match &a.workload {
        Some(p) => load_workload(p)?,
        None => match a.counts[..] {
            [c, e, s] => Workload::claim1(c as usize, e as usize, s as usize),
            _ => return Err(CliError::malformed("--counts takes exactly three values: q_C,q_E,q_S")),
        },
    };
    let (q_c, q_e, q_s) = workload.abort_query_counts();
    let delta = a.delta.unwrap_or_else(|| BoundParams::new(q_c, q_e, q_s, 0).default_delta());
    let report = monte_carlo_abort(engine, &workload, delta, a.trials, cli.seed.unwrap_or(0))?;
    let code = if report.holds { exit::OK } else { exit::INVALID };
    Ok((serde_json::to_value(&report).expect("report serializes"), code))
}

fn harness_run(engine: &MockEngine, cli: &Cli, a: &HarnessRunArgs) -> CmdResult {
    let mut rng = rng(cli);
    let a_exp = match &a.a_hex {
        Some(h) => parse_scalar::<MockEngine>("--a-hex", h)?,
        None => ScalarField::random_nonzero(&mut rng),
    };
    let b_exp = match &a.b_hex {
        Some(h) => parse_scalar::<MockEngine>("--b-hex", h)?,
        None => ScalarField::random_nonzero(&mut rng),
    };
    if a_exp.is_zero() || b_exp.is_zero() {
        return Err(CliError::malformed("planted exponents must be non-zero"));
    }
    let workload = match &a.workload {
        Some(p) => Some(load_workload(p)?),
        None => None,
    };
    let config = ForgerConfig {
        co_signers: a.co_signers,
        extra_groups: a.extra_groups,
        signers_per_extra_group: a.signers_per_extra_group,
        max_attempts: a.max_attempts,
        degenerate: a.degenerate,
    };
    let delta = a.delta.unwrap_or_else(|| {
        let (q_c, q_e, q_s) = workload.as_ref().map_or((0, 0, 0), Workload::abort_query_counts);
        // The forger makes one extraction and one signing query of its own
        // when it has a co-signer next to the target.
        let side = u64::from(config.co_signers > 0);
        let n = 1 + config.co_signers + config.extra_groups * config.signers_per_extra_group;
        BoundParams::new(q_c, q_e + side, q_s + side, n as u64).default_delta()
    });

    let instance = CoCdhInstance::planted(a_exp, b_exp);
    let expected = instance.solution().expect("planted");
    let mut ch = Challenger::new(engine, instance, delta, rng)?;

    let mut solution = None;
    let mut abort = None;
    let played = match &workload {
        Some(w) => run_workload(&mut ch, w),
        None => Ok(None),
    }
    .and_then(|site| match site {
        Some(site) => Err(HarnessError::Abort(site)),
        None => scripted_forger(&mut ch, config),
    })
    .and_then(|forgery| ch.finalize(&forgery.bundle, forgery.target));
    let (outcome, code) = match played {
        Ok(s) => {
            solution = Some(s);
            ("solved", if s == expected { exit::OK } else { exit::INVALID })
        }
        Err(HarnessError::Abort(site)) => {
            abort = Some(site);
            ("aborted", exit::OK)
        }
        Err(HarnessError::DegenerateDenominator) => ("degenerate", exit::OK),
        Err(HarnessError::ForgeryRejected(why)) => return Err(CliError { code: exit::INVALID, message: why }),
        Err(e) => return Err(e.into()),
    };

    let dump = ch.dump();
    if let Some(path) = &a.transcript_out {
        write_text(path, &(serde_json::to_string_pretty(&dump).expect("dump serializes") + "\n"))?;
    }
    Ok((
        json!({
            "command": "harness run",
            "delta": delta,
            "outcome": outcome,
            "abort": abort,
            "solution": solution.map(|s| hex::encode(s.to_bytes())),
            "expected": hex::encode(expected.to_bytes()),
            "matches": solution.map(|s| s == expected),
            "counts": dump.counts,
            "exponentiations": dump.exponentiations,
        }),
        code,
    ))
}
