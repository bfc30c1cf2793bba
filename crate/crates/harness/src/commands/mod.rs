pub mod info;
pub mod linsim;
pub mod mech;
pub mod qa;
pub mod verify;

use anyhow::{bail, Result};
use info_core::InfoUnit;

pub(crate) fn parse_unit(s: &str) -> Result<InfoUnit> {
    match s {
        "bits" => Ok(InfoUnit::Bits),
        "nats" => Ok(InfoUnit::Nats),
        other => bail!("unknown unit '{other}' (expected 'bits' or 'nats')"),
    }
}

pub(crate) fn pretty_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}
