//! Reproducibility stamp embedded in every emitted report.

use sha2::{Digest, Sha256};

pub const TOOL_NAME: &str = "dispute";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stamp {
    pub seed: u64,
    pub input_digest: String,
}

impl Stamp {
    pub fn new(seed: u64, input: &[u8]) -> Self {
        Stamp {
            seed,
            input_digest: sha256_hex(input),
        }
    }

    /// `# `-prefixed header lines.
    pub fn header(&self) -> String {
        format!(
            "# tool: {TOOL_NAME} {TOOL_VERSION}\n# seed: {}\n# input-sha256: {}\n",
            self.seed, self.input_digest
        )
    }

    pub fn wrap(&self, body: &str) -> String {
        let mut out = self.header();
        out.push_str(body);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn header_carries_seed_and_digest() {
        let s = Stamp::new(42, b"abc");
        let h = s.header();
        assert!(h.contains("# seed: 42"));
        assert!(h.contains("ba7816bf"));
        assert!(h.starts_with("# tool: dispute "));
    }
}
