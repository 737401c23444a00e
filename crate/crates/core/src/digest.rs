//! Stable 64-bit digests of simulation state.
//!
//! Digests feed episode logs and replay checks, so they must not depend on
//! the process, platform or std hasher seeding. FNV-1a over explicit byte
//! encodings gives that.

use std::hash::Hasher;

use fnv::FnvHasher;

#[derive(Default)]
pub struct Digest(FnvHasher);

impl Digest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.0.write(&v.to_le_bytes());
        self
    }

    pub fn i64(&mut self, v: i64) -> &mut Self {
        self.u64(v as u64)
    }

    /// Hashes the exact bit pattern, so `0.0` and `-0.0` differ.
    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.u64(v.to_bits())
    }

    pub fn f64s(&mut self, vs: &[f64]) -> &mut Self {
        self.u64(vs.len() as u64);
        for &v in vs {
            self.f64(v);
        }
        self
    }

    pub fn bytes(&mut self, b: &[u8]) -> &mut Self {
        self.u64(b.len() as u64);
        self.0.write(b);
        self
    }

    pub fn finish(&self) -> u64 {
        self.0.finish()
    }
}

/// Hex rendering used in logs.
pub fn hex(d: u64) -> String {
    format!("{d:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_is_order_sensitive() {
        let a = Digest::new().u64(1).u64(2).finish();
        let b = Digest::new().u64(2).u64(1).finish();
        assert_ne!(a, b);
    }

    #[test]
    fn negative_zero_differs() {
        assert_ne!(Digest::new().f64(0.0).finish(), Digest::new().f64(-0.0).finish());
    }
}
