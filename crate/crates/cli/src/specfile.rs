//! TOML spec files and catalogs.
//!
//! A spec file describes one computation:
//!
//! ```toml
//! [field]
//! p = 5
//! f = 1
//!
//! [sheaf]
//! expr = "kummer(chi[1], x^2 + 4*x) * twist(zeta[3])"
//!
//! [form]
//! g = "x"
//!
//! [check]
//! name = "product-formula"
//! ```
//!
//! A catalog is a list of entries, each naming a check and carrying the
//! same blocks inline:
//!
//! ```toml
//! [[entry]]
//! check = "gauss-norm"
//! field = { p = 5, f = 1 }
//! ```

use std::path::Path;

use anyhow::{bail, Context, Result};
use epsilon_cycles_core::checks::CheckSpec;
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub field: Option<FieldBlock>,
    pub sheaf: Option<SheafBlock>,
    pub form: Option<FormBlock>,
    pub check: Option<CheckBlock>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    pub p: u64,
    #[serde(default = "default_degree")]
    pub f: u32,
}

fn default_degree() -> u32 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SheafBlock {
    pub expr: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormBlock {
    pub g: String,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckBlock {
    pub name: Option<String>,
    pub n: Option<u64>,
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    pub exponents: Option<Vec<u64>>,
    pub twist: Option<String>,
    pub seed: Option<u64>,
    pub cases: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogFile {
    #[serde(default)]
    pub entry: Vec<CatalogEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub check: String,
    pub field: Option<FieldBlock>,
    pub sheaf: Option<SheafBlock>,
    pub form: Option<FormBlock>,
    pub n: Option<u64>,
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    pub exponents: Option<Vec<u64>>,
    pub twist: Option<String>,
    pub seed: Option<u64>,
    pub cases: Option<u64>,
}

impl SpecFile {
    pub fn load(path: &Path) -> Result<SpecFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading spec file {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing spec file {}", path.display()))
    }

    pub fn load_optional(path: Option<&Path>) -> Result<SpecFile> {
        match path {
            Some(p) => SpecFile::load(p),
            None => Ok(SpecFile::default()),
        }
    }

    pub fn require_field(&self) -> Result<(u64, u32)> {
        match self.field {
            Some(FieldBlock { p, f }) => Ok((p, f)),
            None => bail!("the spec file needs a [field] block with p (and optionally f)"),
        }
    }

    pub fn require_sheaf(&self) -> Result<&str> {
        match &self.sheaf {
            Some(s) => Ok(&s.expr),
            None => bail!("the spec file needs a [sheaf] block with expr"),
        }
    }

    pub fn form_expr(&self) -> Option<&str> {
        self.form.as_ref().map(|f| f.g.as_str())
    }

    /// Builds a check spec from the file, a check name fallback, and a
    /// default seed for randomized suites.
    pub fn to_check_spec(&self, default_name: &str) -> CheckSpec {
        let block = self.check.clone().unwrap_or_default();
        CheckSpec {
            check: block.name.unwrap_or_else(|| default_name.to_string()),
            field: self.field.map(|b| (b.p, b.f)),
            sheaf: self.sheaf.as_ref().map(|b| b.expr.clone()),
            form: self.form.as_ref().map(|b| b.g.clone()),
            n: block.n,
            n1: block.n1,
            n2: block.n2,
            exponents: block.exponents,
            twist: block.twist,
            seed: block.seed,
            cases: block.cases,
        }
    }
}

impl CatalogFile {
    pub fn load(path: &Path) -> Result<CatalogFile> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading catalog {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing catalog {}", path.display()))
    }
}

impl CatalogEntry {
    pub fn to_check_spec(&self, default_seed: Option<u64>) -> CheckSpec {
        CheckSpec {
            check: self.check.clone(),
            field: self.field.map(|b| (b.p, b.f)),
            sheaf: self.sheaf.as_ref().map(|b| b.expr.clone()),
            form: self.form.as_ref().map(|b| b.g.clone()),
            n: self.n,
            n1: self.n1,
            n2: self.n2,
            exponents: self.exponents.clone(),
            twist: self.twist.clone(),
            seed: self.seed.or(default_seed),
            cases: self.cases,
        }
    }
}
