//! Named parameter sets used by the CLI and the acceptance suite.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::galois::Field;
use crate::mbic::{Construction, Layout, MbicParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// GF(8), n=7, k=3, t=1, C3.
    P1,
    /// GF(16), n=15, k=6, t=2, C3.
    P2,
    /// GF(16), n=15, k=6, t=2, K3.
    P3,
    /// GF(32), n=31, k=17, t=6; both constructions (K3 by default).
    P4,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::P1, Preset::P2, Preset::P3, Preset::P4];

    pub fn field(self) -> Arc<Field> {
        let w = match self {
            Preset::P1 => 3,
            Preset::P2 | Preset::P3 => 4,
            Preset::P4 => 5,
        };
        Arc::new(Field::binary(w).expect("built-in modulus is irreducible"))
    }

    /// `(n, k, t)`.
    pub fn shape(self) -> (usize, usize, usize) {
        match self {
            Preset::P1 => (7, 3, 1),
            Preset::P2 | Preset::P3 => (15, 6, 2),
            Preset::P4 => (31, 17, 6),
        }
    }

    pub fn construction(self) -> Construction {
        match self {
            Preset::P1 | Preset::P2 => Construction::C3,
            Preset::P3 | Preset::P4 => Construction::K3,
        }
    }

    pub fn params(self) -> MbicParams {
        self.params_with(self.construction())
            .expect("preset parameters are valid")
    }

    pub fn params_with(self, construction: Construction) -> Result<MbicParams> {
        let (n, k, t) = self.shape();
        MbicParams::new(self.field(), n, k, t, construction)
    }

    pub fn layout(self) -> Layout {
        Layout::new(self.params()).expect("preset layout builds")
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "P1" => Ok(Preset::P1),
            "P2" => Ok(Preset::P2),
            "P3" => Ok(Preset::P3),
            "P4" => Ok(Preset::P4),
            _ => Err(Error::InvalidParams(format!("unknown preset {s:?}"))),
        }
    }
}
