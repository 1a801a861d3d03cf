//! Text test-vector files: one record per line, `op | hex-inputs | hex-output`,
//! with comma-separated inputs. Blank lines and lines starting with `#` are
//! ignored.
//!
//! Recognised ops:
//!
//! | op               | inputs         | output            |
//! |------------------|----------------|-------------------|
//! | `hash_to_g1`     | tag, input     | G1 element        |
//! | `hash_to_scalar` | tag, input     | scalar            |
//! | `pair`           | G1, G2         | GT element        |
//! | `multi_pair`     | G1, G2, ...    | GT element        |
//! | `scalar_mul_g1`  | G1, scalar     | G1 element        |
//!
//! Hash records double as the programming table of [`MockEngine`].

use std::fmt::Write as _;

use thiserror::Error;

use crate::engine::{
    G1Of, G2Of, GroupElement, GtOf, MockHashTable, PairingEngine, PairingError, ScalarField, ScalarOf,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VectorError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("record {index} ({op}): {reason}")]
    Check { index: usize, op: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VectorRecord {
    pub op: String,
    pub inputs: Vec<Vec<u8>>,
    pub output: Vec<u8>,
}

impl VectorRecord {
    pub fn new(op: &str, inputs: Vec<Vec<u8>>, output: Vec<u8>) -> Self {
        VectorRecord { op: op.to_string(), inputs, output }
    }
}

pub fn parse(text: &str) -> Result<Vec<VectorRecord>, VectorError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |reason: String| VectorError::Parse { line: i + 1, reason };
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        let [op, inputs, output] = parts[..] else {
            return Err(err(format!("expected 3 '|'-separated columns, got {}", parts.len())));
        };
        let inputs = if inputs.is_empty() {
            Vec::new()
        } else {
            inputs
                .split(',')
                .map(|h| hex::decode(h.trim()).map_err(|e| err(format!("bad input hex: {e}"))))
                .collect::<Result<_, _>>()?
        };
        let output = hex::decode(output).map_err(|e| err(format!("bad output hex: {e}")))?;
        out.push(VectorRecord { op: op.to_string(), inputs, output });
    }
    Ok(out)
}

pub fn format(records: &[VectorRecord]) -> String {
    let mut s = String::new();
    for r in records {
        let inputs: Vec<String> = r.inputs.iter().map(hex::encode).collect();
        writeln!(s, "{} | {} | {}", r.op, inputs.join(","), hex::encode(&r.output)).expect("writing to a String");
    }
    s
}

/// Collects the hash records into a mock programming table.
pub fn mock_table(records: &[VectorRecord]) -> Result<MockHashTable, VectorError> {
    let mut table = MockHashTable::new();
    for (index, r) in records.iter().enumerate() {
        let check = |reason: &str| VectorError::Check { index, op: r.op.clone(), reason: reason.into() };
        let value = || -> Result<u16, VectorError> {
            let raw: [u8; 2] = r.output.as_slice().try_into().map_err(|_| check("mock output must be 2 bytes"))?;
            let v = u16::from_be_bytes(raw);
            if v >= crate::engine::MOCK_MODULUS {
                return Err(check("mock output not below q"));
            }
            Ok(v)
        };
        match (r.op.as_str(), r.inputs.as_slice()) {
            ("hash_to_g1", [tag, input]) => {
                table.program_g1(tag, input, value()?);
            }
            ("hash_to_scalar", [tag, input]) => {
                let v = value()?;
                if v == 0 {
                    return Err(check("hash_to_scalar output must be non-zero"));
                }
                table.program_scalar(tag, input, v);
            }
            ("hash_to_g1" | "hash_to_scalar", _) => return Err(check("expected tag and input")),
            _ => {}
        }
    }
    Ok(table)
}

fn decode<G: GroupElement>(bytes: &[u8]) -> Result<G, PairingError> {
    G::from_bytes(bytes)
}

/// Re-evaluates every record on `engine` and reports the first mismatch.
pub fn check<E: PairingEngine>(engine: &E, records: &[VectorRecord]) -> Result<(), VectorError> {
    for (index, r) in records.iter().enumerate() {
        let fail = |reason: String| VectorError::Check { index, op: r.op.clone(), reason };
        let computed: Vec<u8> = match (r.op.as_str(), r.inputs.as_slice()) {
            ("hash_to_g1", [tag, input]) => engine.hash_to_g1(tag, input).to_bytes(),
            ("hash_to_scalar", [tag, input]) => engine.hash_to_scalar(tag, input).to_bytes(),
            ("pair", [p, q]) => {
                let p: G1Of<E> = decode(p).map_err(|e| fail(e.to_string()))?;
                let q: G2Of<E> = decode(q).map_err(|e| fail(e.to_string()))?;
                engine.pair(&p, &q).to_bytes()
            }
            ("multi_pair", xs) if !xs.is_empty() && xs.len() % 2 == 0 => {
                let terms = xs
                    .chunks(2)
                    .map(|c| Ok((decode::<G1Of<E>>(&c[0])?, decode::<G2Of<E>>(&c[1])?)))
                    .collect::<Result<Vec<_>, PairingError>>()
                    .map_err(|e| fail(e.to_string()))?;
                let gt: GtOf<E> = engine.multi_pair(&terms).map_err(|e| fail(e.to_string()))?;
                gt.to_bytes()
            }
            ("scalar_mul_g1", [p, k]) => {
                let p: G1Of<E> = decode(p).map_err(|e| fail(e.to_string()))?;
                let k = ScalarOf::<E>::from_bytes(k).map_err(|e| fail(e.to_string()))?;
                p.scalar_mul(&k).to_bytes()
            }
            (op, _) => return Err(fail(format!("unknown op or arity for {op}"))),
        };
        if computed != r.output {
            return Err(fail(format!("expected {}, computed {}", hex::encode(&r.output), hex::encode(computed))));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{MockEngine, MockG1, TAG_H0};

    #[test]
    fn parse_and_format_round_trip() {
        let text = "# header\n\nhash_to_g1 | 4142,00 | 0003\npair | 0003,000b | 0021\n";
        let records = parse(text).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[1], VectorRecord::new("pair", vec![vec![0, 3], vec![0, 11]], vec![0, 33]));
        assert_eq!(parse(&format(&records)).unwrap(), records);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert_eq!(
            parse("pair | 00 | 00\noops").unwrap_err(),
            VectorError::Parse { line: 2, reason: "expected 3 '|'-separated columns, got 1".into() }
        );
        assert!(matches!(parse("pair | zz | 00"), Err(VectorError::Parse { line: 1, .. })));
    }

    #[test]
    fn table_drives_mock_hash() {
        let records =
            parse(&format!("hash_to_g1 | {},{} | 0003", hex::encode(TAG_H0), hex::encode(b"ID-A\x00"))).unwrap();
        let engine = MockEngine::with_table(mock_table(&records).unwrap());
        assert_eq!(engine.hash_to_g1(TAG_H0, b"ID-A\x00"), MockG1::new(3));
        check(&engine, &records).unwrap();
    }

    #[test]
    fn check_detects_wrong_output() {
        let records = parse("pair | 0003,000b | 0022\nscalar_mul_g1 | 0001,0007 | 0007").unwrap();
        let err = check(&MockEngine::new(), &records).unwrap_err();
        assert!(matches!(err, VectorError::Check { index: 0, .. }));
        check(&MockEngine::new(), &records[1..]).unwrap();
    }
}
