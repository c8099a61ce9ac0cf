//! JSON interchange: `{"n": 2, "terms": [{"alpha": [1, 0], "re": 1.0, "im": 0.0}]}`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{MultiIndex, Polynomial};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub alpha: Vec<i64>,
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub n: usize,
    pub terms: Vec<TermJson>,
}

impl TryFrom<PolyJson> for Polynomial {
    type Error = Error;

    fn try_from(raw: PolyJson) -> Result<Polynomial> {
        Polynomial::build(
            raw.n,
            raw.terms
                .into_iter()
                .map(|t| (t.alpha, Complex64::new(t.re, t.im))),
        )
    }
}

impl From<&Polynomial> for PolyJson {
    fn from(p: &Polynomial) -> PolyJson {
        PolyJson {
            n: p.n,
            terms: p
                .terms
                .iter()
                .map(|(a, c)| TermJson {
                    alpha: a.as_slice().iter().map(|&e| i64::from(e)).collect(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = PolyJson::deserialize(d)?;
        Polynomial::try_from(raw).map_err(serde::de::Error::custom)
    }
}

impl Polynomial {
    pub fn from_json(text: &str) -> Result<Polynomial> {
        let raw: PolyJson = serde_json::from_str(text)?;
        Polynomial::try_from(raw)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolyJson::from(self)).expect("finite coefficients serialize")
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Polynomial> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Polynomial::from_json(&text)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// Exponent tuples in canonical order, for hashing and display.
    pub fn support(&self) -> impl Iterator<Item = &MultiIndex> {
        self.terms.keys()
    }
}
