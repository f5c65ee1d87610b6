//! Hard caps on every enumeration in the crate.
//!
//! Defaults are conservative; `RELHYP_CAP_OVERRIDE` (a comma separated list of
//! `key=value` pairs, e.g. `radius=8,syllables=5`) raises or lowers them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CAP_ENV: &str = "RELHYP_CAP_OVERRIDE";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Caps {
    /// Largest X-radius for ball enumeration.
    pub ball_radius: u32,
    /// Largest relative radius for constant scans.
    pub relative_radius: u32,
    /// Largest radius for quasiconvexity scans.
    pub sigma_radius: u32,
    /// Largest number of syllables in enumerated amalgam words.
    pub syllables: usize,
    /// Largest number of geodesics returned for a single endpoint pair.
    pub geodesics: usize,
    /// Largest number of elements materialised by one ball enumeration.
    pub elements: usize,
    /// Largest number of paths materialised by one path scan.
    pub paths: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            ball_radius: 8,
            relative_radius: 6,
            sigma_radius: 6,
            syllables: 4,
            geodesics: 4096,
            elements: 2_000_000,
            paths: 4_000_000,
        }
    }
}

impl Caps {
    /// Defaults with the environment override applied.
    pub fn from_env() -> Result<Self> {
        let mut caps = Caps::default();
        if let Ok(spec) = std::env::var(CAP_ENV) {
            caps.apply_override(&spec)?;
        }
        Ok(caps)
    }

    pub fn apply_override(&mut self, spec: &str) -> Result<()> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::parse(item, "expected key=value"))?;
            let value: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::parse(item, "value is not a non-negative integer"))?;
            match key.trim() {
                "radius" => {
                    self.ball_radius = value as u32;
                    self.relative_radius = value as u32;
                    self.sigma_radius = value as u32;
                }
                "ball_radius" => self.ball_radius = value as u32,
                "relative_radius" => self.relative_radius = value as u32,
                "sigma_radius" => self.sigma_radius = value as u32,
                "syllables" => self.syllables = value as usize,
                "geodesics" => self.geodesics = value as usize,
                "elements" => self.elements = value as usize,
                "paths" => self.paths = value as usize,
                other => return Err(Error::parse(other, "unknown cap name")),
            }
        }
        Ok(())
    }

    /// Caps large enough for every test-scale computation in this crate.
    pub fn generous() -> Self {
        Caps {
            ball_radius: 10,
            relative_radius: 8,
            sigma_radius: 8,
            syllables: 6,
            geodesics: 1 << 16,
            elements: 8_000_000,
            paths: 20_000_000,
        }
    }

    pub(crate) fn check(what: &'static str, requested: u64, cap: u64) -> Result<()> {
        if requested > cap {
            Err(Error::CapExceeded {
                what,
                requested,
                cap,
            })
        } else {
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_parses_pairs() {
        let mut caps = Caps::default();
        caps.apply_override("radius=9, syllables=5").unwrap();
        assert_eq!(caps.ball_radius, 9);
        assert_eq!(caps.sigma_radius, 9);
        assert_eq!(caps.syllables, 5);
    }

    #[test]
    fn override_rejects_garbage() {
        let mut caps = Caps::default();
        assert!(caps.apply_override("radius").is_err());
        assert!(caps.apply_override("bogus=3").is_err());
        assert!(caps.apply_override("radius=-1").is_err());
    }
}
