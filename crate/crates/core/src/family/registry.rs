use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{validate_member, Family, Frechet, Gumbel, PowerFunction, ValidationReport};
use crate::error::{Error, Result};

pub type MemberHandle = Arc<dyn Family>;

/// Hyperparameters a constructor may need. Only the Fréchet shape exists
/// among the built-ins.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MemberParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
}

type Constructor = Box<dyn Fn(&MemberParams) -> Result<MemberHandle> + Send + Sync>;

/// Name-keyed constructors for family members.
pub struct FamilyRegistry {
    constructors: BTreeMap<String, Constructor>,
}

impl fmt::Debug for FamilyRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FamilyRegistry")
            .field("names", &self.names())
            .finish()
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

pub const VALIDATION_GRID: usize = 64;

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self {
            constructors: BTreeMap::new(),
        }
    }

    /// `power`, `gumbel` and `frechet` (requires `alpha`).
    pub fn with_builtins() -> Self {
        let mut reg = Self::empty();
        reg.insert("power", |_| Ok(Arc::new(PowerFunction) as MemberHandle));
        reg.insert("gumbel", |_| Ok(Arc::new(Gumbel) as MemberHandle));
        reg.insert("frechet", |p| {
            let alpha = p
                .alpha
                .ok_or_else(|| Error::Argument("frechet requires --alpha".into()))?;
            Ok(Arc::new(Frechet::new(alpha)?) as MemberHandle)
        });
        reg
    }

    fn insert<F>(&mut self, name: &str, ctor: F)
    where
        F: Fn(&MemberParams) -> Result<MemberHandle> + Send + Sync + 'static,
    {
        self.constructors.insert(name.to_owned(), Box::new(ctor));
    }

    /// Registers a custom member under its own name after it passes
    /// [`validate_member`]. Replaces any existing entry with that name.
    pub fn register_member(&mut self, member: MemberHandle) -> Result<ValidationReport> {
        let report = validate_member(member.as_ref(), VALIDATION_GRID)?.into_result()?;
        let name = member.name().to_owned();
        self.insert(&name, move |_| Ok(Arc::clone(&member)));
        Ok(report)
    }

    pub fn build(&self, name: &str, params: &MemberParams) -> Result<MemberHandle> {
        let ctor = self
            .constructors
            .get(name)
            .ok_or_else(|| Error::UnknownFamily(name.to_owned()))?;
        ctor(params)
    }

    pub fn names(&self) -> Vec<&str> {
        self.constructors.keys().map(String::as_str).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.constructors.contains_key(name)
    }
}
