use std::collections::HashSet;

use serde::Serialize;

use super::MipError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Var {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(&self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * x[j]).sum()
    }

    pub fn violation(&self, x: &[f64]) -> f64 {
        let a = self.activity(x);
        match self.sense {
            Sense::Le => (a - self.rhs).max(0.0),
            Sense::Ge => (self.rhs - a).max(0.0),
            Sense::Eq => (a - self.rhs).abs(),
        }
    }
}

/// A maximization problem `max cᵀx + c0` over linear rows and variable
/// bounds, with integrality markers.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MilpModel {
    pub vars: Vec<Var>,
    pub cons: Vec<Constraint>,
    /// Sparse objective, one entry per variable at most.
    pub objective: Vec<(usize, f64)>,
    pub obj_constant: f64,
    /// Free-form lines emitted as comments in the LP export.
    pub comments: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelStats {
    pub variables: usize,
    pub constraints: usize,
    pub binaries: usize,
    pub integers: usize,
    pub continuous: usize,
    pub nonzeros: usize,
}

impl ModelStats {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain struct serializes")
    }
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lb: f64, ub: f64) -> usize {
        let (lb, ub) = if kind == VarKind::Binary { (lb.max(0.0), ub.min(1.0)) } else { (lb, ub) };
        self.vars.push(Var { name: name.into(), kind, lb, ub });
        self.vars.len() - 1
    }

    /// Adds a row, merging repeated variables and dropping zero coefficients.
    pub fn add_con(&mut self, name: impl Into<String>, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) -> usize {
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(terms.len());
        for (j, a) in terms {
            if let Some(t) = merged.iter_mut().find(|t| t.0 == j) {
                t.1 += a;
            } else {
                merged.push((j, a));
            }
        }
        merged.retain(|t| t.1 != 0.0);
        self.cons.push(Constraint { name: name.into(), terms: merged, sense, rhs });
        self.cons.len() - 1
    }

    pub fn add_obj(&mut self, var: usize, coef: f64) {
        if let Some(t) = self.objective.iter_mut().find(|t| t.0 == var) {
            t.1 += coef;
        } else {
            self.objective.push((var, coef));
        }
    }

    pub fn objective_dense(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.vars.len()];
        for &(j, a) in &self.objective {
            c[j] += a;
        }
        c
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(j, a)| a * x[j]).sum::<f64>() + self.obj_constant
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn is_integral_kind(&self, j: usize) -> bool {
        self.vars[j].kind != VarKind::Continuous
    }

    /// Largest bound, row or integrality violation of `x`.
    pub fn max_violation(&self, x: &[f64], check_integrality: bool) -> f64 {
        let mut worst = 0.0f64;
        for (j, v) in self.vars.iter().enumerate() {
            worst = worst.max(v.lb - x[j]).max(x[j] - v.ub);
            if check_integrality && v.kind != VarKind::Continuous {
                worst = worst.max((x[j] - x[j].round()).abs());
            }
        }
        for c in &self.cons {
            worst = worst.max(c.violation(x));
        }
        worst
    }

    pub fn stats(&self) -> ModelStats {
        let count = |k| self.vars.iter().filter(|v| v.kind == k).count();
        ModelStats {
            variables: self.vars.len(),
            constraints: self.cons.len(),
            binaries: count(VarKind::Binary),
            integers: count(VarKind::Integer),
            continuous: count(VarKind::Continuous),
            nonzeros: self.cons.iter().map(|c| c.terms.len()).sum(),
        }
    }

    pub fn validate(&self) -> Result<(), MipError> {
        let mut names = HashSet::new();
        for v in &self.vars {
            if !valid_name(&v.name) {
                return Err(MipError::Model(format!("invalid variable name `{}`", v.name)));
            }
            if !names.insert(v.name.as_str()) {
                return Err(MipError::NameCollision(v.name.clone()));
            }
            if v.lb.is_nan() || v.ub.is_nan() || v.lb > v.ub {
                return Err(MipError::Model(format!("variable `{}` has bounds [{}, {}]", v.name, v.lb, v.ub)));
            }
            if v.kind == VarKind::Binary && (v.lb < 0.0 || v.ub > 1.0) {
                return Err(MipError::Model(format!("binary `{}` must lie in [0, 1]", v.name)));
            }
        }
        let mut row_names = HashSet::new();
        for c in &self.cons {
            if !valid_name(&c.name) {
                return Err(MipError::Model(format!("invalid constraint name `{}`", c.name)));
            }
            if !row_names.insert(c.name.as_str()) {
                return Err(MipError::NameCollision(c.name.clone()));
            }
            if c.terms.iter().any(|&(j, a)| j >= self.vars.len() || !a.is_finite()) || !c.rhs.is_finite() {
                return Err(MipError::Model(format!("constraint `{}` is malformed", c.name)));
            }
        }
        if self.objective.iter().any(|&(j, a)| j >= self.vars.len() || !a.is_finite()) {
            return Err(MipError::Model("objective is malformed".into()));
        }
        Ok(())
    }
}

/// LP-format identifiers: a letter or underscore, then letters, digits,
/// underscores or dots. Names that read like an exponent are rejected.
pub fn valid_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    let b = s.as_bytes();
    if matches!(b[0], b'e' | b'E') && b.len() > 1 && (b[1].is_ascii_digit() || matches!(b[1], b'e' | b'E')) {
        return false;
    }
    s.len() <= 255 && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}
