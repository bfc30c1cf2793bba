use serde::{Deserialize, Serialize};

/// Output unit for information quantities. All internal computation is in
/// nats; conversion to bits divides by ln 2 exactly once on output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfoUnit {
    Bits,
    Nats,
}

impl InfoUnit {
    /// Converts a value measured in nats into this unit.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            InfoUnit::Nats => nats,
            InfoUnit::Bits => nats / std::f64::consts::LN_2,
        }
    }

    /// Converts a value measured in this unit into nats.
    pub fn to_nats(self, value: f64) -> f64 {
        match self {
            InfoUnit::Nats => value,
            InfoUnit::Bits => value * std::f64::consts::LN_2,
        }
    }
}
