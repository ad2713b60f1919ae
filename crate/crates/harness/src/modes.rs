//! Short mode names (`mpai`, `adaptive`, `fixed`, `bounded`) for the CLI and
//! config files. The long serde names of [`Mode`] are accepted as well.

use mpai_core::Mode;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serializer};

pub fn parse_mode(name: &str) -> Result<Mode, String> {
    match name {
        "mpai" => Ok(Mode::Mpai),
        "adaptive" | "adaptive_l" => Ok(Mode::AdaptiveL),
        "fixed" | "fixed_step" => Ok(Mode::FixedStep),
        "bounded" | "bounded_operator" => Ok(Mode::BoundedOperator),
        other => Err(format!(
            "unknown mode `{other}` (expected mpai, adaptive, fixed or bounded)"
        )),
    }
}

pub(crate) fn serialize<S: Serializer>(modes: &[Mode], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(modes.iter().map(|m| m.name()))
}

pub(crate) fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Mode>, D::Error> {
    Vec::<String>::deserialize(d)?
        .iter()
        .map(|name| parse_mode(name).map_err(D::Error::custom))
        .collect()
}
