use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of explanatory variables per dyad-year.
pub const N_VARIABLES: usize = 7;

/// The seven dyadic variables, in CSV column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Democracy,
    Allies,
    Contingency,
    Distance,
    Capability,
    Dependency,
    MajorPower,
}

impl Variable {
    pub const ALL: [Variable; N_VARIABLES] = [
        Variable::Democracy,
        Variable::Allies,
        Variable::Contingency,
        Variable::Distance,
        Variable::Capability,
        Variable::Dependency,
        Variable::MajorPower,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column name used in CSV headers.
    pub fn column(self) -> &'static str {
        match self {
            Variable::Democracy => "democracy",
            Variable::Allies => "allies",
            Variable::Contingency => "contingency",
            Variable::Distance => "distance",
            Variable::Capability => "capability",
            Variable::Dependency => "dependency",
            Variable::MajorPower => "majorpower",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Variable::Democracy => "Democracy",
            Variable::Allies => "Allies",
            Variable::Contingency => "Contingency",
            Variable::Distance => "Distance",
            Variable::Capability => "Capability",
            Variable::Dependency => "Dependency",
            Variable::MajorPower => "MajorPower",
        }
    }

    /// Short label used in perturbation tables (`Dem-max`, `Capab-min`, ...).
    pub fn short_name(self) -> &'static str {
        match self {
            Variable::Democracy => "Dem",
            Variable::Allies => "Allies",
            Variable::Contingency => "Contig",
            Variable::Distance => "Dist",
            Variable::Capability => "Capab",
            Variable::Dependency => "Depnd",
            Variable::MajorPower => "Majpow",
        }
    }

    pub fn kind(self) -> VariableKind {
        match self {
            Variable::Allies | Variable::Contingency | Variable::MajorPower => VariableKind::Binary,
            Variable::Democracy => VariableKind::BoundedContinuous,
            Variable::Distance | Variable::Capability | Variable::Dependency => {
                VariableKind::UnboundedContinuous
            }
        }
    }

    pub fn from_name(name: &str) -> Option<Variable> {
        let lower = name.to_ascii_lowercase();
        Variable::ALL
            .into_iter()
            .find(|v| v.column() == lower || v.short_name().to_ascii_lowercase() == lower)
    }
}

impl std::fmt::Display for Variable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariableKind {
    Binary,
    BoundedContinuous,
    UnboundedContinuous,
}

/// Range information for one variable.
///
/// Binary and bounded variables carry fixed canonical bounds. Unbounded ones
/// start out unresolved (`±inf`) and receive data-derived bounds through
/// [`SpecSet::with_data_bounds`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub variable: Variable,
    pub kind: VariableKind,
    pub canonical_min: f64,
    pub canonical_max: f64,
}

impl VariableSpec {
    pub fn standard(variable: Variable) -> Self {
        let (lo, hi) = match variable.kind() {
            VariableKind::Binary => (0.0, 1.0),
            VariableKind::BoundedContinuous => (-10.0, 10.0),
            VariableKind::UnboundedContinuous => (f64::NEG_INFINITY, f64::INFINITY),
        };
        VariableSpec {
            variable,
            kind: variable.kind(),
            canonical_min: lo,
            canonical_max: hi,
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.canonical_min.is_finite() && self.canonical_max.is_finite()
    }

    pub fn is_data_derived(&self) -> bool {
        self.kind == VariableKind::UnboundedContinuous
    }

    /// Checks a raw value against the spec. Returns a reason on failure.
    pub fn check(&self, value: f64) -> std::result::Result<(), String> {
        if !value.is_finite() {
            return Err("is not finite".into());
        }
        match self.kind {
            VariableKind::Binary if value != 0.0 && value != 1.0 => {
                Err("must be exactly 0 or 1".into())
            }
            VariableKind::BoundedContinuous
                if value < self.canonical_min || value > self.canonical_max =>
            {
                Err(format!(
                    "is outside [{}, {}]",
                    self.canonical_min, self.canonical_max
                ))
            }
            _ => Ok(()),
        }
    }
}

/// The full set of seven specs, indexed by [`Variable::index`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecSet(pub [VariableSpec; N_VARIABLES]);

impl Default for SpecSet {
    fn default() -> Self {
        SpecSet(Variable::ALL.map(VariableSpec::standard))
    }
}

impl SpecSet {
    pub fn get(&self, variable: Variable) -> &VariableSpec {
        &self.0[variable.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = &VariableSpec> {
        self.0.iter()
    }

    /// Replaces the bounds of the unbounded variables with the observed
    /// min/max of `rows`.
    pub fn with_data_bounds<'a>(
        &self,
        rows: impl IntoIterator<Item = &'a [f64; N_VARIABLES]>,
    ) -> Result<SpecSet> {
        let mut lo = [f64::INFINITY; N_VARIABLES];
        let mut hi = [f64::NEG_INFINITY; N_VARIABLES];
        let mut any = false;
        for row in rows {
            any = true;
            for (j, &v) in row.iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        if !any {
            return Err(Error::EmptyDataset);
        }
        let mut out = *self;
        for spec in out.0.iter_mut().filter(|s| s.is_data_derived()) {
            let j = spec.variable.index();
            spec.canonical_min = lo[j];
            spec.canonical_max = hi[j];
        }
        Ok(out)
    }
}
