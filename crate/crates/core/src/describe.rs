//! JSON map descriptions.
//!
//! ```json
//! {"type": "polynomial", "a": [[0, 0], [1, 0]], "b": [[0, 0], [0.3, 0]]}
//! {"type": "closed_form", "kind": "colonna", "params": {"m": 1}}
//! {"type": "shear", "F": {"coeffs": [[0, 0], [1, 0]]}, "omega": [[0, 0], [0.3, 0]], "order": 24}
//! ```
//!
//! Complex numbers are `[re, im]` pairs or plain reals. Polynomial `a` is
//! indexed from 0 and `b` from 1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HmapError, Result};
use crate::map::{ClosedForm, HarmonicMap};
use crate::series::Series;
use crate::transforms::{shear, ShearedMap, DEFAULT_ORDER};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexInput {
    Real(f64),
    Pair([f64; 2]),
}

impl ComplexInput {
    pub fn value(self) -> Complex64 {
        match self {
            ComplexInput::Real(x) => Complex64::new(x, 0.0),
            ComplexInput::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

impl From<Complex64> for ComplexInput {
    fn from(z: Complex64) -> Self {
        ComplexInput::Pair([z.re, z.im])
    }
}

fn values(v: &[ComplexInput]) -> Vec<Complex64> {
    v.iter().map(|c| c.value()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SeriesInput {
    Object { coeffs: Vec<ComplexInput> },
    List(Vec<ComplexInput>),
}

impl SeriesInput {
    pub fn series(&self) -> Series {
        match self {
            SeriesInput::Object { coeffs } | SeriesInput::List(coeffs) => Series::new(values(coeffs)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormKind {
    Identity,
    ExpLine,
    Colonna,
    LogRatio,
    Mobius,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosedFormParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<ComplexInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<ComplexInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<ComplexInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<ComplexInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<ComplexInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<ComplexInput>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<ComplexInput>,
}

fn required(v: Option<ComplexInput>, name: &str) -> Result<Complex64> {
    v.map(ComplexInput::value)
        .ok_or_else(|| HmapError::Description(format!("missing parameter `{name}`")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MapDescription {
    Polynomial {
        a: Vec<ComplexInput>,
        #[serde(default)]
        b: Vec<ComplexInput>,
    },
    ClosedForm {
        kind: ClosedFormKind,
        #[serde(default)]
        params: ClosedFormParams,
    },
    Shear {
        #[serde(rename = "F")]
        f: SeriesInput,
        omega: SeriesInput,
        #[serde(default = "default_order")]
        order: usize,
    },
}

fn default_order() -> usize {
    DEFAULT_ORDER
}

/// A built map; sheared maps keep their construction data.
#[derive(Debug, Clone, PartialEq)]
pub struct BuiltMap {
    pub map: HarmonicMap,
    pub sheared: Option<ShearedMap>,
}

impl MapDescription {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| HmapError::Description(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("descriptions serialize")
    }

    pub fn closed_form(&self) -> Result<Option<ClosedForm>> {
        let MapDescription::ClosedForm { kind, params } = self else {
            return Ok(None);
        };
        let p = params.clone();
        let form = match kind {
            ClosedFormKind::Identity => ClosedForm::Identity,
            ClosedFormKind::ExpLine => ClosedForm::ExpLine { a: required(p.a, "a")? },
            ClosedFormKind::Colonna => ClosedForm::Colonna {
                m: p.m.unwrap_or(1.0),
                alpha: p.alpha.map_or(Complex64::new(1.0, 0.0), ComplexInput::value),
                rotation: p.rotation.unwrap_or(0.0),
                center: p.center.map_or(Complex64::new(0.0, 0.0), ComplexInput::value),
            },
            ClosedFormKind::LogRatio => ClosedForm::LogRatio {
                scale: required(p.scale, "scale")?,
            },
            ClosedFormKind::Mobius => ClosedForm::Mobius {
                a: required(p.a, "a")?,
                b: required(p.b, "b")?,
                c: required(p.c, "c")?,
                d: required(p.d, "d")?,
            },
        };
        Ok(Some(form))
    }

    pub fn build(&self) -> Result<BuiltMap> {
        match self {
            MapDescription::Polynomial { a, b } => Ok(BuiltMap {
                map: HarmonicMap::polynomial(values(a), values(b))?,
                sheared: None,
            }),
            MapDescription::ClosedForm { .. } => Ok(BuiltMap {
                map: HarmonicMap::closed_form(&self.closed_form()?.expect("closed form"))?,
                sheared: None,
            }),
            MapDescription::Shear { f, omega, order } => {
                let s = shear(&f.series(), &omega.series(), *order)?;
                Ok(BuiltMap {
                    map: s.map.clone(),
                    sheared: Some(s),
                })
            }
        }
    }
}
