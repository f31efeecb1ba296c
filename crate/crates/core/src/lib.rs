//! Weighted Sturm–Liouville eigenvalues of generatrix curves, the flattening pipeline
//! that deforms any generatrix into the straight segment, and numerical checks that
//! the straight segment maximizes every eigenvalue.
//!
//! Two geometries are built in: the annulus (surfaces of revolution) and the
//! half-helicoid (screw surfaces). See [`profiles`].

pub mod cli;
pub mod curves;
pub mod error;
pub mod pipeline;
pub mod profiles;
pub mod sturm;
pub mod verify;

pub use error::{Error, Result};

use serde::{Serialize, Serializer};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// A float that serializes to JSON with 17 significant digits; non-finite values
/// become the strings `"inf"`, `"-inf"`, `"nan"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = serde_json::value::RawValue::from_string(fmt_f64(self.0))
                .map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_str(&fmt_f64(self.0))
        }
    }
}
