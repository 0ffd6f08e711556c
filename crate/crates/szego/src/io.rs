//! Interchange formats.
//!
//! Every float is written with 17 significant digits so that a write/read
//! cycle reproduces the same doubles. Complex numbers are `[re, im]` pairs.
//!
//! * symbol: `{"poly": [[re, im], …], "poles": [{"z": [re, im], "coeffs": [[re, im], …]}]}`
//! * Blaschke product: `{"zeros": [[re, im], …]}`
//! * spectral data: `{"levels": [{"lambda", "phi", "omega", "b": {"poles", "residues"}}]}`

use std::io::{self, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::blaschke::BlaschkeProduct;
use crate::error::{Result, SzegoError};
use crate::rational::{ComplexPolynomial, PoleTerm, RationalFunction};
use crate::C64;

/// `f64` rendered as `d.dddddddddddddddde±x` (17 significant digits).
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Compact JSON formatter that writes doubles via [`fmt_f64`].
#[derive(Clone, Copy, Debug, Default)]
pub struct PreciseFormatter;

impl Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes to a JSON string ending in a newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PoleJson {
    z: C64,
    coeffs: Vec<C64>,
}

/// Wire form of a [`RationalFunction`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RationalJson {
    #[serde(default)]
    poly: Vec<C64>,
    #[serde(default)]
    poles: Vec<PoleJson>,
}

impl From<&RationalFunction> for RationalJson {
    fn from(f: &RationalFunction) -> Self {
        Self {
            poly: f.poly().coeffs().to_vec(),
            poles: f
                .poles()
                .iter()
                .map(|p| PoleJson { z: p.z, coeffs: p.coeffs.clone() })
                .collect(),
        }
    }
}

impl TryFrom<RationalJson> for RationalFunction {
    type Error = SzegoError;

    fn try_from(j: RationalJson) -> Result<Self> {
        let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
        if !j.poly.iter().all(finite)
            || !j.poles.iter().all(|p| finite(&p.z) && p.coeffs.iter().all(finite))
        {
            return Err(SzegoError::InvalidInput("symbol has non-finite coefficients".into()));
        }
        let poles = j
            .poles
            .into_iter()
            .map(|p| PoleTerm { z: p.z, coeffs: p.coeffs })
            .collect();
        Ok(RationalFunction::new(ComplexPolynomial::new(j.poly), poles))
    }
}

/// Wire form of a normalized [`BlaschkeProduct`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlaschkeJson {
    zeros: Vec<C64>,
}

impl From<&BlaschkeProduct> for BlaschkeJson {
    fn from(b: &BlaschkeProduct) -> Self {
        Self { zeros: b.zeros().to_vec() }
    }
}

impl TryFrom<BlaschkeJson> for BlaschkeProduct {
    type Error = SzegoError;

    fn try_from(j: BlaschkeJson) -> Result<Self> {
        BlaschkeProduct::new(j.zeros)
    }
}

pub fn rational_to_json(f: &RationalFunction) -> Result<String> {
    to_json(&RationalJson::from(f))
}

pub fn rational_from_json(text: &str) -> Result<RationalFunction> {
    from_json::<RationalJson>(text)?.try_into()
}
