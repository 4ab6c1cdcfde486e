use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Integrality {
    Continuous,
    Integer,
    Binary,
}

impl Integrality {
    pub fn is_integral(self) -> bool {
        !matches!(self, Integrality::Continuous)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub integrality: Integrality,
    /// Branch-and-bound branches on fractional columns of the highest
    /// priority first.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub branch_priority: i32,
}

fn is_zero(v: &i32) -> bool {
    *v == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    /// Sparse `(column, coefficient)` pairs.
    pub coefficients: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    /// Family tag: the name up to its first underscore (`c3_4_1` → `c3`).
    pub fn family(&self) -> &str {
        self.name.split('_').next().unwrap_or(&self.name)
    }

    pub fn activity(&self, values: &[f64]) -> f64 {
        crate::stats::compensated_sum(self.coefficients.iter().map(|&(c, a)| a * values[c]))
    }

    /// Amount by which `values` violate the row (0 when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let act = self.activity(values);
        match self.relation {
            Relation::Le => (act - self.rhs).max(0.0),
            Relation::Ge => (self.rhs - act).max(0.0),
            Relation::Eq => (act - self.rhs).abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

/// Structured column keys of the siting model, by positional index
/// (`Y(i, j)` is node `i`, station `j`; `V(i, j, k)` adds vehicle type `k`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum VarKey {
    X(usize),
    Y(usize, usize),
    V(usize, usize, usize),
    U(usize),
}

/// A linear mixed-integer program.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MipProblem {
    pub name: String,
    pub sense: Sense,
    pub variables: Vec<Variable>,
    pub objective: Vec<f64>,
    pub objective_constant: f64,
    pub constraints: Vec<Constraint>,
    #[serde(skip)]
    pub var_index: BTreeMap<VarKey, usize>,
}

impl MipProblem {
    pub fn new(name: impl Into<String>, sense: Sense) -> Self {
        Self {
            name: name.into(),
            sense,
            variables: Vec::new(),
            objective: Vec::new(),
            objective_constant: 0.0,
            constraints: Vec::new(),
            var_index: BTreeMap::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn add_variable(&mut self, name: impl Into<String>, lower: f64, upper: f64, integrality: Integrality, cost: f64) -> usize {
        self.variables.push(Variable { name: name.into(), lower, upper, integrality, branch_priority: 0 });
        self.objective.push(cost);
        self.variables.len() - 1
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, coefficients: Vec<(usize, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint { name: name.into(), coefficients, relation, rhs });
    }

    pub fn column(&self, key: VarKey) -> Option<usize> {
        self.var_index.get(&key).copied()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        let mut acc = crate::stats::CompensatedSum::new();
        for (c, v) in self.objective.iter().zip(values) {
            if *c != 0.0 {
                acc.add(c * v);
            }
        }
        acc.add(self.objective_constant);
        acc.value()
    }

    pub fn integer_columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.variables.iter().enumerate().filter(|(_, v)| v.integrality.is_integral()).map(|(c, _)| c)
    }

    /// Checks the structural invariants: coefficients reference declared
    /// columns, bounds are ordered, nothing is NaN.
    pub fn check(&self) -> Result<(), String> {
        if self.objective.len() != self.variables.len() {
            return Err(format!(
                "objective has {} entries for {} variables",
                self.objective.len(),
                self.variables.len()
            ));
        }
        for v in &self.variables {
            if v.lower.is_nan() || v.upper.is_nan() || v.lower > v.upper {
                return Err(format!("variable `{}` has bounds [{}, {}]", v.name, v.lower, v.upper));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) || !self.objective_constant.is_finite() {
            return Err("objective has non-finite coefficients".into());
        }
        for row in &self.constraints {
            if !row.rhs.is_finite() {
                return Err(format!("row `{}` has non-finite rhs", row.name));
            }
            for &(c, a) in &row.coefficients {
                if c >= self.variables.len() {
                    return Err(format!("row `{}` references undeclared column {c}", row.name));
                }
                if !a.is_finite() {
                    return Err(format!("row `{}` has a non-finite coefficient", row.name));
                }
            }
        }
        Ok(())
    }
}
