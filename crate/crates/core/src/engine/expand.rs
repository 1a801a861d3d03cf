use sha2::{Digest, Sha256};

const B_IN_BYTES: usize = 32;
const S_IN_BYTES: usize = 64;

/// `expand_message_xmd` with SHA-256 (RFC 9380, section 5.3.1).
///
/// Panics if `len` exceeds 255 * 32 bytes or the DST is longer than 255
/// bytes; callers in this crate use short fixed tags and short outputs.
pub fn expand_message_xmd(msg: &[u8], dst: &[u8], len: usize) -> Vec<u8> {
    let ell = len.div_ceil(B_IN_BYTES);
    assert!(ell <= 255 && len <= u16::MAX as usize, "requested expansion too long");
    assert!(dst.len() <= 255, "DST longer than 255 bytes");
    let dst_prime = [dst, &[dst.len() as u8]].concat();

    let b0 = Sha256::new()
        .chain_update([0u8; S_IN_BYTES])
        .chain_update(msg)
        .chain_update((len as u16).to_be_bytes())
        .chain_update([0u8])
        .chain_update(&dst_prime)
        .finalize();

    let mut bi = Sha256::new().chain_update(b0).chain_update([1u8]).chain_update(&dst_prime).finalize();
    let mut out = Vec::with_capacity(ell * B_IN_BYTES);
    out.extend_from_slice(&bi);
    for i in 2..=ell {
        let mixed: Vec<u8> = b0.iter().zip(bi.iter()).map(|(a, b)| a ^ b).collect();
        bi = Sha256::new().chain_update(mixed).chain_update([i as u8]).chain_update(&dst_prime).finalize();
        out.extend_from_slice(&bi);
    }
    out.truncate(len);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const DST: &[u8] = b"QUUX-V01-CS02-with-expander-SHA256-128";

    // RFC 9380, appendix K.1.
    #[test]
    fn rfc9380_vectors() {
        assert_eq!(
            hex::encode(expand_message_xmd(b"", DST, 0x20)),
            "68a985b87eb6b46952128911f2a4412bbc302a9d759667f87f7a21d803f07235"
        );
        assert_eq!(
            hex::encode(expand_message_xmd(b"abc", DST, 0x20)),
            "d8ccab23b5985ccea865c6c97b6e5b8350e794e603b4b97902f53a8a0d605615"
        );
    }
}
