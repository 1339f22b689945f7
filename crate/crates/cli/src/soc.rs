//! SOC literals: plain fractions (`0.62`) or percentages (`62%`).

use std::fmt;

use anyhow::{bail, Context, Result};
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

pub fn parse_fraction(s: &str) -> Result<f64> {
    let t = s.trim();
    let v = match t.strip_suffix('%') {
        Some(p) => p.trim().parse::<f64>().with_context(|| format!("bad percentage {s:?}"))? / 100.0,
        None => t.parse::<f64>().with_context(|| format!("bad number {s:?}"))?,
    };
    if !v.is_finite() {
        bail!("{s:?} is not finite");
    }
    Ok(v)
}

/// Fraction in `[0, 1]`.
pub fn parse_soc(s: &str) -> Result<f64> {
    let v = parse_fraction(s)?;
    if !(0.0..=1.0).contains(&v) {
        bail!("SOC {s:?} outside [0, 1] (use a fraction or a %-suffixed value)");
    }
    Ok(v)
}

pub fn parse_soc_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_soc).collect()
}

/// JSON number or `"%"` string.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fraction(pub f64);

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Fraction;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a fraction or a percentage string such as \"62%\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Fraction, E> {
                Ok(Fraction(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Fraction, E> {
                Ok(Fraction(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Fraction, E> {
                Ok(Fraction(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Fraction, E> {
                parse_fraction(v).map(Fraction).map_err(|e| E::custom(format!("{e:#}")))
            }
        }
        d.deserialize_any(V)
    }
}
