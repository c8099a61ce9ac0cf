//! Reproducible random corpora.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::polynomial::{random_polynomial, DegreeProfile, Polynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolyKind {
    General,
    Homogeneous,
    /// Homogeneous with every partial degree at most one.
    Multiaffine,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientLaw {
    /// Standard complex Gaussian: real and imaginary parts `N(0, 1/2)`.
    #[default]
    Gaussian,
    /// `±1` with equal probability.
    Rademacher,
    /// Uniform on the unit circle.
    Steinhaus,
}

kebab_enum_str!(PolyKind {
    General => "general",
    Homogeneous => "homogeneous",
    Multiaffine => "multiaffine",
});

kebab_enum_str!(CoefficientLaw {
    Gaussian => "gaussian",
    Rademacher => "rademacher",
    Steinhaus => "steinhaus",
});

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub n: usize,
    pub max_total_degree: u32,
    pub count: usize,
    pub kind: PolyKind,
    #[serde(default)]
    pub coefficient_law: CoefficientLaw,
    /// Fixed total degree for homogeneous and multiaffine members. When
    /// absent each member draws its degree uniformly from `1..=max_total_degree`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_degree: Option<u32>,
}

impl CorpusSpec {
    pub fn new(seed: u64, n: usize, max_total_degree: u32, count: usize, kind: PolyKind) -> Self {
        CorpusSpec {
            seed,
            n,
            max_total_degree,
            count,
            kind,
            coefficient_law: CoefficientLaw::Gaussian,
            exact_degree: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("corpus n must be at least 1"));
        }
        if self.count == 0 {
            return Err(Error::invalid("corpus count must be at least 1"));
        }
        let top = self.exact_degree.unwrap_or(self.max_total_degree);
        if self.kind != PolyKind::General && top == 0 {
            return Err(Error::Unsatisfiable(format!(
                "{} polynomials need degree at least 1",
                self.kind
            )));
        }
        if self.kind == PolyKind::Multiaffine && top as usize > self.n {
            return Err(Error::Unsatisfiable(format!(
                "multiaffine degree {top} exceeds n = {}",
                self.n
            )));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON encoding of the spec.
    pub fn hash(&self) -> String {
        sha256_hex(serde_json::to_string(self).expect("spec serializes").as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Short content hash of a polynomial's interchange JSON.
pub fn polynomial_hash(p: &Polynomial) -> String {
    sha256_hex(p.to_json().as_bytes())[..16].to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: CorpusSpec,
    pub spec_hash: String,
    pub profiles: Vec<DegreeProfile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Corpus {
    pub manifest: Manifest,
    pub polynomials: Vec<Polynomial>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.polynomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polynomials.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("corpus serializes")
    }

    pub fn from_json(text: &str) -> Result<Corpus> {
        let corpus: Corpus = serde_json::from_str(text)?;
        if corpus.polynomials.iter().any(Polynomial::is_zero) {
            return Err(Error::invalid("corpus contains the zero polynomial"));
        }
        Ok(corpus)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Corpus> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Corpus::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    /// Wraps hand-built polynomials in a corpus with an ad hoc manifest.
    pub fn from_polynomials(polynomials: Vec<Polynomial>) -> Result<Corpus> {
        let first = polynomials
            .first()
            .ok_or_else(|| Error::invalid("empty corpus"))?;
        let n = first.n();
        let mut profiles = Vec::with_capacity(polynomials.len());
        let mut max_deg = 0;
        for p in &polynomials {
            let d = p
                .degree_profile()
                .ok_or_else(|| Error::invalid("corpus contains the zero polynomial"))?;
            if p.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: p.n(),
                });
            }
            max_deg = max_deg.max(d.total);
            profiles.push(d);
        }
        let spec = CorpusSpec::new(0, n, max_deg, polynomials.len(), PolyKind::General);
        Ok(Corpus {
            manifest: Manifest {
                spec_hash: spec.hash(),
                spec,
                profiles,
            },
            polynomials,
        })
    }
}

/// Generates `spec.count` nonzero members. A zero draw (possible only under
/// exact cancellation) is replaced by the next stream.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Corpus> {
    spec.validate()?;
    let mut polynomials = Vec::with_capacity(spec.count);
    let mut stream = 0u64;
    while polynomials.len() < spec.count {
        let p = random_polynomial(spec, stream)?;
        stream += 1;
        if !p.is_zero() {
            polynomials.push(p);
        }
    }
    let profiles = polynomials
        .iter()
        .map(|p| p.degree_profile().expect("nonzero"))
        .collect();
    Ok(Corpus {
        manifest: Manifest {
            spec: spec.clone(),
            spec_hash: spec.hash(),
            profiles,
        },
        polynomials,
    })
}
