//! JSON field descriptors and the textual field specs accepted by the CLI.

use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use super::quadratic::quadratic_field;
use super::{rational_field, FieldElement, FieldKind, FieldParts, NumberField, PrimeFixture};
use crate::arith::parse_rational;
use crate::error::{Error, Result};

const ZETA16_PLUS: &str = include_str!("../../fixtures/fields/zeta16plus.json");
const ZETA16: &str = include_str!("../../fixtures/fields/zeta16.json");

/// A coordinate given either as a JSON integer or as a "p/q" string.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatValue {
    Int(i64),
    Str(String),
}

impl RatValue {
    pub fn to_rational(&self) -> std::result::Result<BigRational, String> {
        match self {
            RatValue::Int(i) => Ok(BigRational::from_integer(BigInt::from(*i))),
            RatValue::Str(s) => parse_rational(s).ok_or_else(|| format!("bad rational {s:?}")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TorsionDescriptor {
    pub generator: Vec<RatValue>,
    pub order: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PrimeFixtureDescriptor {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub uniformizer: Vec<RatValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anti_uniformizer: Option<Vec<RatValue>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldDescriptor {
    Rational,
    Quadratic {
        d: i64,
    },
    Table {
        #[serde(default)]
        label: Option<String>,
        degree: usize,
        basis_names: Vec<String>,
        mult_table: Vec<Vec<Vec<i64>>>,
        signature: (usize, usize),
        #[serde(default)]
        class_number: Option<u64>,
        unit_generators: Vec<Vec<RatValue>>,
        #[serde(default)]
        torsion: Option<TorsionDescriptor>,
        #[serde(default)]
        prime_fixtures: Vec<PrimeFixtureDescriptor>,
        /// Each automorphism as the images of the basis elements.
        #[serde(default)]
        automorphisms: Vec<Vec<Vec<RatValue>>>,
    },
}

fn element(v: &[RatValue], n: usize, what: &str) -> Result<FieldElement> {
    if v.len() != n {
        return Err(Error::InvalidDescriptor(format!("{what}: expected {n} coordinates, got {}", v.len())));
    }
    let q: std::result::Result<Vec<BigRational>, String> = v.iter().map(|x| x.to_rational()).collect();
    Ok(FieldElement::from_rationals(&q.map_err(Error::InvalidDescriptor)?))
}

/// Build a field from a descriptor, validating every invariant.
pub fn make_field(desc: &FieldDescriptor) -> Result<Arc<NumberField>> {
    match desc {
        FieldDescriptor::Rational => Ok(rational_field()),
        FieldDescriptor::Quadratic { d } => quadratic_field(*d),
        FieldDescriptor::Table {
            label,
            degree,
            basis_names,
            mult_table,
            signature,
            class_number,
            unit_generators,
            torsion,
            prime_fixtures,
            automorphisms,
        } => {
            let n = *degree;
            if mult_table.len() != n {
                return Err(Error::InvalidDescriptor(format!("degree {n} but table has {} rows", mult_table.len())));
            }
            let units = unit_generators
                .iter()
                .enumerate()
                .map(|(i, u)| element(u, n, &format!("unit {i}")))
                .collect::<Result<Vec<_>>>()?;
            let torsion = match torsion {
                Some(t) => Some((element(&t.generator, n, "torsion generator")?, t.order)),
                None => None,
            };
            let pf = prime_fixtures
                .iter()
                .map(|p| {
                    Ok(PrimeFixture {
                        p: p.p,
                        e: p.e,
                        f: p.f,
                        uniformizer: element(&p.uniformizer, n, "uniformizer")?,
                        anti_uniformizer: match &p.anti_uniformizer {
                            Some(a) => Some(element(a, n, "anti-uniformizer")?),
                            None => None,
                        },
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let autos = automorphisms
                .iter()
                .map(|img| img.iter().map(|x| element(x, n, "automorphism image")).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let field = NumberField::from_parts(FieldParts {
                label: label.clone().unwrap_or_else(|| format!("table field of degree {n}")),
                kind: FieldKind::Table,
                table: mult_table.clone(),
                signature: *signature,
                basis_names: basis_names.clone(),
                units,
                torsion,
                class_number: *class_number,
                prime_fixtures: pf,
                automorphisms: autos,
            })?;
            for p in field.prime_fixtures().iter().map(|f| f.p).collect::<std::collections::BTreeSet<_>>() {
                if field.primes_above(p).is_err() {
                    log::debug!("prime fixtures above {p} are partial");
                }
            }
            Ok(field)
        }
    }
}

pub fn parse_descriptor(json: &str) -> Result<FieldDescriptor> {
    serde_json::from_str(json).map_err(|e| Error::InvalidDescriptor(e.to_string()))
}

pub fn load_field(path: &Path) -> Result<Arc<NumberField>> {
    make_field(&parse_descriptor(&std::fs::read_to_string(path)?)?)
}

/// Q(zeta_16)^+ = Q(sqrt(2 + sqrt 2)).
pub fn zeta16_plus() -> Arc<NumberField> {
    make_field(&parse_descriptor(ZETA16_PLUS).expect("bundled fixture")).expect("bundled fixture")
}

/// Q(zeta_16).
pub fn zeta16() -> Arc<NumberField> {
    make_field(&parse_descriptor(ZETA16).expect("bundled fixture")).expect("bundled fixture")
}

/// Field from a CLI spec: `Q`, `quad:<d>`, `zeta16plus`, `zeta16`, or a path
/// to a JSON descriptor.
pub fn field_from_spec(spec: &str) -> Result<Arc<NumberField>> {
    let s = spec.trim();
    match s {
        "Q" | "q" | "rational" => return Ok(rational_field()),
        "zeta16plus" => return Ok(zeta16_plus()),
        "zeta16" => return Ok(zeta16()),
        _ => {}
    }
    if let Some(d) = s.strip_prefix("quad:") {
        let d: i64 = d.trim().parse().map_err(|_| Error::InvalidDescriptor(format!("bad d in {s:?}")))?;
        return quadratic_field(d);
    }
    let path = Path::new(s);
    if path.exists() {
        return load_field(path);
    }
    Err(Error::InvalidDescriptor(format!("unknown field spec {s:?}")))
}
