//! Binary snapshots.
//!
//! Layout, little-endian throughout: magic `EPFL`, format version `u32`,
//! dimension `u32`, points per axis `u32`, `t`, `ν`, `γ` as `f64`, then the
//! `n^d` grid values as `f64` with axis 0 varying fastest.

use std::fs;
use std::path::Path;

use crate::spectral::{Field, TorusGrid};
use crate::{Error, Result};

const MAGIC: &[u8; 4] = b"EPFL";
pub const FORMAT_VERSION: u32 = 1;
const HEADER: usize = 4 + 3 * 4 + 3 * 8;

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub t: f64,
    pub nu: f64,
    pub gamma: f64,
    pub field: Field,
}

impl Checkpoint {
    pub fn to_bytes(&self) -> Vec<u8> {
        let grid = self.field.grid();
        let mut out = Vec::with_capacity(HEADER + 8 * grid.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
        out.extend_from_slice(&(grid.n() as u32).to_le_bytes());
        for v in [self.t, self.nu, self.gamma] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for v in self.field.values() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let bad = |msg: &str| Error::Checkpoint(msg.to_string());
        if bytes.len() < HEADER {
            return Err(bad("truncated header"));
        }
        if &bytes[..4] != MAGIC {
            return Err(bad("bad magic"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(bytes[o..o + 8].try_into().expect("8 bytes"));
        let version = u32_at(4);
        if version != FORMAT_VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let grid = TorusGrid::new(u32_at(8) as usize, u32_at(12) as usize)?;
        let (t, nu, gamma) = (f64_at(16), f64_at(24), f64_at(32));
        let expected = HEADER + 8 * grid.len();
        if bytes.len() != expected {
            return Err(Error::Checkpoint(format!(
                "expected {expected} bytes for grid {grid}, found {}",
                bytes.len()
            )));
        }
        let values = (0..grid.len()).map(|i| f64_at(HEADER + 8 * i)).collect();
        Ok(Self {
            t,
            nu,
            gamma,
            field: Field::from_values(grid, values)?,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| {
            Error::Checkpoint(format!("writing {}: {e}", path.display()))
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)
            .map_err(|e| Error::Checkpoint(format!("reading {}: {e}", path.display())))?;
        Self::from_bytes(&bytes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_exact_roundtrip() {
        let g = TorusGrid::new(2, 8).unwrap();
        let f = Field::from_fn(g, |x| (x[0] * 1.7).sin() * (x[1] + 0.1).exp()).unwrap();
        let c = Checkpoint {
            t: 0.123,
            nu: 1e-3,
            gamma: 4.0,
            field: f,
        };
        let back = Checkpoint::from_bytes(&c.to_bytes()).unwrap();
        assert_eq!(back.t.to_bits(), c.t.to_bits());
        assert_eq!(back.field.grid(), c.field.grid());
        for (a, b) in back.field.values().iter().zip(c.field.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(back.to_bytes(), c.to_bytes());
    }

    #[test]
    fn rejects_corruption() {
        let g = TorusGrid::new(1, 8).unwrap();
        let c = Checkpoint {
            t: 0.0,
            nu: 1.0,
            gamma: 4.0,
            field: Field::zeros(g),
        };
        let mut b = c.to_bytes();
        assert!(Checkpoint::from_bytes(&b[..b.len() - 1]).is_err());
        b[0] = b'X';
        assert!(Checkpoint::from_bytes(&b).is_err());
    }
}
