use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelFamily {
    /// Bias-aware NTK with variance constants and no input rescaling.
    Ntkb,
    /// Jacot-style NTK: `1/√n₀` input rescaling, unit variances, biases.
    Ntkj,
    /// Bias-free arc-cosine NTK without input rescaling.
    Ntka,
    /// NNGP covariance of the untrained network.
    Gp,
    /// `a·exp(−‖x−y‖/b)`.
    Laplace,
}

/// One of the nine kernel models. `depth` is the number of hidden layers and
/// is always 1 for [`KernelFamily::Laplace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct KernelId {
    family: KernelFamily,
    depth: u8,
}

impl KernelId {
    pub const NTKB1: Self = Self::raw(KernelFamily::Ntkb, 1);
    pub const NTKB2: Self = Self::raw(KernelFamily::Ntkb, 2);
    pub const NTKJ1: Self = Self::raw(KernelFamily::Ntkj, 1);
    pub const NTKJ2: Self = Self::raw(KernelFamily::Ntkj, 2);
    pub const NTKA1: Self = Self::raw(KernelFamily::Ntka, 1);
    pub const NTKA2: Self = Self::raw(KernelFamily::Ntka, 2);
    pub const GP1: Self = Self::raw(KernelFamily::Gp, 1);
    pub const GP2: Self = Self::raw(KernelFamily::Gp, 2);
    pub const LAPLACE: Self = Self::raw(KernelFamily::Laplace, 1);

    pub const ALL: [Self; 9] = [
        Self::NTKB1,
        Self::NTKB2,
        Self::NTKJ1,
        Self::NTKJ2,
        Self::NTKA1,
        Self::NTKA2,
        Self::GP1,
        Self::GP2,
        Self::LAPLACE,
    ];

    const fn raw(family: KernelFamily, depth: u8) -> Self {
        Self { family, depth }
    }

    pub fn new(family: KernelFamily, depth: u8) -> Result<Self> {
        match (family, depth) {
            (KernelFamily::Laplace, _) => Ok(Self::LAPLACE),
            (f, 1 | 2) => Ok(Self::raw(f, depth)),
            _ => Err(Error::InvalidConfig(format!(
                "depth must be 1 or 2, got {depth}"
            ))),
        }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn name(&self) -> &'static str {
        use KernelFamily::*;
        match (self.family, self.depth) {
            (Ntkb, 1) => "ntkb1",
            (Ntkb, _) => "ntkb2",
            (Ntkj, 1) => "ntkj1",
            (Ntkj, _) => "ntkj2",
            (Ntka, 1) => "ntka1",
            (Ntka, _) => "ntka2",
            (Gp, 1) => "gp1",
            (Gp, _) => "gp2",
            (Laplace, _) => "k1",
        }
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| {
                k.name() == lower || (k.family == KernelFamily::Laplace && lower == "laplace")
            })
            .ok_or_else(|| Error::InvalidConfig(format!("unknown kernel '{s}'")))
    }
}

impl TryFrom<String> for KernelId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<KernelId> for String {
    fn from(k: KernelId) -> String {
        k.name().to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip_and_are_distinct() {
        let mut names: Vec<_> = KernelId::ALL.iter().map(|k| k.name()).collect();
        for k in KernelId::ALL {
            assert_eq!(k.name().parse::<KernelId>().unwrap(), k);
        }
        names.sort();
        names.dedup();
        assert_eq!(names.len(), 9);
    }

    #[test]
    fn laplace_ignores_depth_and_bad_depth_rejected() {
        assert_eq!(
            KernelId::new(KernelFamily::Laplace, 2).unwrap(),
            KernelId::LAPLACE
        );
        assert!(KernelId::new(KernelFamily::Ntkb, 3).is_err());
        assert!("ntkz1".parse::<KernelId>().is_err());
    }
}
