//! JSON material specifications.
//!
//! ```json
//! { "f": "3*(x^3 - 1.5*x^2 + 0.5)", "g": "3*x - 5", "h": "3", "lambda_range": [0.25, 4] }
//! { "f": { "construct": { "bulk": "1", "c2sq": "1" } } }
//! { "f": { "construct": { "bulk": "1", "c2sq": "1" } }, "h": "0" }
//! ```
//!
//! Expressions are in the variable `x` (the dilation). With an explicit
//! `f`, both `g` and `h` are required. With a `construct` block, `g` and
//! `h` are derived so that the null condition holds; giving either one
//! overrides the derived function, which is how genuinely nonlinear
//! variants of a null material are written.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::null::{construct_null_material_with, ConstructOptions, FRoute};
use super::{ScalarFn, StoredEnergyModel};
use crate::error::{Error, Result};

pub const DEFAULT_LAMBDA_RANGE: [f64; 2] = [0.25, 4.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructSpec {
    pub bulk: String,
    pub c2sq: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FSpec {
    Expr(String),
    Construct { construct: ConstructSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSpec {
    pub f: FSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_range: Option<[f64; 2]>,
}

impl MaterialSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn range(&self) -> [f64; 2] {
        self.lambda_range.unwrap_or(DEFAULT_LAMBDA_RANGE)
    }

    pub fn build(&self) -> Result<StoredEnergyModel> {
        let range = self.range();
        let parse_opt = |field: &Option<String>| field.as_deref().map(ScalarFn::parse).transpose();
        let (g, h) = (parse_opt(&self.g)?, parse_opt(&self.h)?);
        let model = match &self.f {
            FSpec::Expr(src) => {
                let missing = |name: &str| Error::Config(format!("`{name}` is required when `f` is an expression"));
                let g = g.ok_or_else(|| missing("g"))?;
                let h = h.ok_or_else(|| missing("h"))?;
                StoredEnergyModel::new(ScalarFn::parse(src)?, g, h).with_range(range)
            }
            FSpec::Construct { construct } => {
                let b = ScalarFn::parse(&construct.bulk)?;
                let c2 = ScalarFn::parse(&construct.c2sq)?;
                let (mut m, _) = construct_null_material_with(&b, &c2, range, ConstructOptions::default())?;
                if let Some(g) = g {
                    m.g = g;
                }
                if let Some(h) = h {
                    m.h = h;
                }
                m
            }
        };
        Ok(model)
    }

    /// Spec for the null material with the given moduli. Closed-form
    /// constructions are written out as `f`, `g`, `h`; tabulated ones keep
    /// the `construct` block, since a tabulated function has no text form.
    pub fn constructed(bulk: &str, c2sq: &str, range: [f64; 2]) -> Result<(Self, StoredEnergyModel)> {
        let b = ScalarFn::parse(bulk)?;
        let c2 = ScalarFn::parse(c2sq)?;
        let (model, route) = construct_null_material_with(&b, &c2, range, ConstructOptions::default())?;
        let lambda_range = (range != DEFAULT_LAMBDA_RANGE).then_some(range);
        let spec = match route {
            FRoute::Symbolic => MaterialSpec {
                f: FSpec::Expr(model.f.to_string()),
                g: Some(model.g.to_string()),
                h: Some(model.h.to_string()),
                lambda_range,
            },
            FRoute::Tabulated => MaterialSpec {
                f: FSpec::Construct {
                    construct: ConstructSpec {
                        bulk: bulk.to_string(),
                        c2sq: c2sq.to_string(),
                    },
                },
                g: None,
                h: None,
                lambda_range,
            },
        };
        Ok((spec, model))
    }
}
