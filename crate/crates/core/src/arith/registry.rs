use std::collections::HashMap;

use crate::error::{Error, Result};

/// How a coordinate function takes its values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VarKind {
    /// A positive real coordinate `x_i`.
    RealPositive,
    /// A nonvanishing complex coordinate `z_a`.
    Complex,
    /// The conjugate `z̄_a` of the complex variable at the given index.
    ConjugateOf(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub label: String,
}

/// Ordered set of coordinate functions.
///
/// Every complex variable has exactly one conjugate partner; the partner map
/// is computed once at construction.
#[derive(Clone, Debug)]
pub struct VarRegistry {
    vars: Vec<Variable>,
    partner: Vec<Option<usize>>,
    by_name: HashMap<String, usize>,
}

impl PartialEq for VarRegistry {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
    }
}

impl Eq for VarRegistry {}

impl VarRegistry {
    pub fn new(vars: Vec<Variable>) -> Result<Self> {
        let mut by_name = HashMap::with_capacity(vars.len());
        for (idx, v) in vars.iter().enumerate() {
            if by_name.insert(v.name.clone(), idx).is_some() {
                return Err(Error::InvalidRegistry(format!("duplicate variable `{}`", v.name)));
            }
        }
        let mut partner = vec![None; vars.len()];
        for (idx, v) in vars.iter().enumerate() {
            if let VarKind::ConjugateOf(of) = v.kind {
                match vars.get(of).map(|w| w.kind) {
                    Some(VarKind::Complex) => {}
                    _ => {
                        return Err(Error::InvalidRegistry(format!(
                            "`{}` conjugates a variable that is not complex",
                            v.name
                        )))
                    }
                }
                if partner[of].is_some() {
                    return Err(Error::InvalidRegistry(format!(
                        "`{}` has more than one conjugate",
                        vars[of].name
                    )));
                }
                partner[of] = Some(idx);
                partner[idx] = Some(of);
            }
        }
        for (idx, v) in vars.iter().enumerate() {
            if v.kind == VarKind::Complex && partner[idx].is_none() {
                return Err(Error::InvalidRegistry(format!("`{}` has no conjugate", v.name)));
            }
        }
        Ok(Self { vars, partner, by_name })
    }

    /// Registry from `(name, is_complex)` pairs; conjugates named `~name` are
    /// appended after all listed variables, in the same order.
    pub fn with_conjugates<S: AsRef<str>>(spec: &[(S, bool)]) -> Result<Self> {
        let mut vars: Vec<Variable> = spec
            .iter()
            .map(|(name, complex)| Variable {
                name: name.as_ref().to_string(),
                kind: if *complex { VarKind::Complex } else { VarKind::RealPositive },
                label: name.as_ref().to_string(),
            })
            .collect();
        for (idx, (name, complex)) in spec.iter().enumerate() {
            if *complex {
                vars.push(Variable {
                    name: format!("~{}", name.as_ref()),
                    kind: VarKind::ConjugateOf(idx),
                    label: format!("conj({})", name.as_ref()),
                });
            }
        }
        Self::new(vars)
    }

    /// All-real registry.
    pub fn real<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let spec: Vec<(&str, bool)> = names.iter().map(|n| (n.as_ref(), false)).collect();
        Self::with_conjugates(&spec)
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    pub fn var(&self, idx: usize) -> &Variable {
        &self.vars[idx]
    }

    pub fn kind(&self, idx: usize) -> VarKind {
        self.vars[idx].kind
    }

    pub fn name(&self, idx: usize) -> &str {
        &self.vars[idx].name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Conjugate partner of a complex variable or of a conjugate.
    pub fn partner(&self, idx: usize) -> Option<usize> {
        self.partner[idx]
    }

    /// Index of the conjugate of `idx`; real variables are self-conjugate.
    pub fn conjugate_index(&self, idx: usize) -> usize {
        self.partner[idx].unwrap_or(idx)
    }

    pub fn has_complex(&self) -> bool {
        self.vars.iter().any(|v| v.kind == VarKind::Complex)
    }

    /// Index of the non-conjugate representative (the `z_a` for a `z̄_a`).
    pub fn base_index(&self, idx: usize) -> usize {
        match self.vars[idx].kind {
            VarKind::ConjugateOf(of) => of,
            _ => idx,
        }
    }
}
