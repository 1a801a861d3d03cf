#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use mtao_core::kat;

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn mtao(dir: &Path, args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mtao"))
        .args(args)
        .current_dir(dir)
        .env_remove("MTAO_STORE")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exited normally"),
        String::from_utf8(out.stdout).expect("utf-8 stdout"),
        String::from_utf8(out.stderr).expect("utf-8 stderr"),
    )
}

fn secret_hex(v: u16) -> String {
    hex::encode(v.to_be_bytes())
}

/// The fixed 3-signer, 2-TA mock scenario, driven command by command inside
/// `dir` with relative paths. Returns the transcript: each command line
/// followed by its stdout and exit code.
pub fn kat_flow(dir: &Path) -> String {
    let mock = ["--backend", "mock", "--insecure-mock", "--mock-table", "kat.vec"];
    let mut steps: Vec<Vec<String>> = vec![vec!["vectors".into(), "kat".into(), "--out".into(), "kat.vec".into()]];
    let mut with_mock = |rest: Vec<String>| {
        let mut v: Vec<String> = mock.iter().map(|s| s.to_string()).collect();
        v.extend(rest);
        steps.push(v);
    };
    let s = |x: &str| x.to_string();
    with_mock(vec![
        s("root-setup"),
        s("--out-params"),
        s("params.json"),
        s("--out-master"),
        s("master.json"),
        s("--secret-hex"),
        secret_hex(kat::MASTER_SECRET),
    ]);
    for (i, ta) in kat::TAS.iter().enumerate() {
        with_mock(vec![
            s("ta-enroll"),
            s("--params"),
            s("params.json"),
            s("--master"),
            s("master.json"),
            s("--ta-id"),
            s(ta.identity),
            s("--out-record"),
            format!("ta{i}.json"),
            s("--out-secret"),
            format!("ta{i}.secret"),
            s("--secret-hex"),
            secret_hex(ta.secret),
        ]);
    }
    for signer in &kat::SIGNERS {
        with_mock(vec![
            s("extract"),
            s("--ta-secret"),
            format!("ta{}.secret", signer.ta),
            s("--ta-record"),
            format!("ta{}.json", signer.ta),
            s("--signer-id"),
            s(signer.identity),
            s("--store"),
            s("store.jnl"),
        ]);
    }
    let mut sig_files = Vec::new();
    for (k, signer) in kat::SIGNERS.iter().enumerate() {
        let msg = format!("{}.msg", signer.identity);
        std::fs::write(dir.join(&msg), signer.message).unwrap();
        let sig = format!("{}.sig", signer.identity);
        with_mock(vec![
            s("sign"),
            s("--store"),
            s("store.jnl"),
            s("--entry-id"),
            (k + 1).to_string(),
            s("--ta-record"),
            format!("ta{}.json", signer.ta),
            s("--message-file"),
            msg,
            s("--out"),
            sig.clone(),
        ]);
        sig_files.push(sig);
    }
    let groups: Vec<_> = (0..kat::TAS.len())
        .map(|t| {
            let signers: Vec<_> = kat::SIGNERS
                .iter()
                .filter(|s| s.ta == t)
                .map(|s| serde_json::json!({ "identity": s.identity, "message_file": format!("{}.msg", s.identity) }))
                .collect();
            serde_json::json!({ "ta_record": format!("ta{t}.json"), "signers": signers })
        })
        .collect();
    std::fs::write(dir.join("layout.json"), serde_json::json!({ "groups": groups }).to_string()).unwrap();
    let mut agg = vec![s("aggregate"), s("--layout"), s("layout.json"), s("--out"), s("bundle.json")];
    agg.extend(sig_files);
    with_mock(agg);
    with_mock(vec![s("verify"), s("--params"), s("params.json"), s("--bundle"), s("bundle.json")]);
    with_mock(vec![
        s("sign"),
        s("--store"),
        s("store.jnl"),
        s("--entry-id"),
        s("1"),
        s("--ta-record"),
        s("ta0.json"),
        s("--message-file"),
        s("ID-A.msg"),
        s("--out"),
        s("again.sig"),
    ]);

    let mut transcript = String::new();
    for step in &steps {
        let args: Vec<&str> = step.iter().map(String::as_str).collect();
        let (code, stdout, _) = mtao(dir, &args);
        transcript.push_str(&format!("$ mtao {}\n{stdout}exit {code}\n\n", step.join(" ")));
    }
    transcript
}

/// Compares `actual` with a checked-in golden file, or rewrites the file
/// when MTAO_UPDATE_GOLDEN is set.
pub fn golden_matches(name: &str, actual: &str) -> bool {
    let path = golden_dir().join(name);
    if std::env::var_os("MTAO_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
        return true;
    }
    std::fs::read_to_string(&path).map(|g| g == actual).unwrap_or(false)
}
