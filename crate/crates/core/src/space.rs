//! Finite atomic measure spaces and the commutative algebra of bounded
//! functions on them.
//!
//! Every field and projection carries a handle to its ambient
//! [`AtomicMeasureSpace`]; binary operations refuse operands from different
//! spaces. Per-atom data is always stored in the fixed atom order of the
//! space, and every reduction (see [`ScalarField::integrate`]) sums in that
//! order so results are bit-reproducible.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

/// Shared handle to a measure space.
pub type Space = Arc<AtomicMeasureSpace>;

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub id: String,
    pub weight: f64,
}

/// A finite list of weighted atoms. Weights are strictly positive and ids are
/// pairwise distinct; the order is fixed at construction.
#[derive(Debug)]
pub struct AtomicMeasureSpace {
    atoms: Vec<Atom>,
    index: HashMap<String, usize>,
}

impl PartialEq for AtomicMeasureSpace {
    fn eq(&self, other: &Self) -> bool {
        self.atoms == other.atoms
    }
}

impl AtomicMeasureSpace {
    pub fn new<I, S>(atoms: I) -> Result<Space>
    where
        I: IntoIterator<Item = (S, f64)>,
        S: Into<String>,
    {
        let atoms: Vec<Atom> = atoms
            .into_iter()
            .map(|(id, weight)| Atom {
                id: id.into(),
                weight,
            })
            .collect();
        let mut index = HashMap::with_capacity(atoms.len());
        for (i, atom) in atoms.iter().enumerate() {
            if !(atom.weight.is_finite() && atom.weight > 0.0) {
                return Err(Error::Domain(format!(
                    "atom `{}` has non-positive or non-finite weight {}",
                    atom.id, atom.weight
                )));
            }
            if index.insert(atom.id.clone(), i).is_some() {
                return Err(Error::Structural(format!(
                    "duplicate atom id `{}`",
                    atom.id
                )));
            }
        }
        Ok(Arc::new(Self { atoms, index }))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn id(&self, atom: usize) -> &str {
        &self.atoms[atom].id
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.atoms[atom].weight
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

/// True when both handles denote the same space (same allocation or equal contents).
pub fn same_space(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn ensure_same(a: &Space, b: &Space) -> Result<()> {
    if same_space(a, b) {
        Ok(())
    } else {
        Err(Error::SpaceMismatch)
    }
}

/// A projection of the commutative algebra: the characteristic function of a
/// set of atoms.
#[derive(Clone)]
pub struct BaseProjection {
    space: Space,
    members: Vec<bool>,
}

impl PartialEq for BaseProjection {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.members == other.members
    }
}

impl fmt::Debug for BaseProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|i| self.space.id(i)))
            .finish()
    }
}

impl BaseProjection {
    pub fn empty(space: &Space) -> Self {
        Self {
            space: space.clone(),
            members: vec![false; space.len()],
        }
    }

    pub fn full(space: &Space) -> Self {
        Self {
            space: space.clone(),
            members: vec![true; space.len()],
        }
    }

    pub fn singleton(space: &Space, atom: usize) -> Self {
        let mut p = Self::empty(space);
        p.members[atom] = true;
        p
    }

    pub fn from_mask(space: &Space, members: Vec<bool>) -> Result<Self> {
        if members.len() != space.len() {
            return Err(Error::Structural(format!(
                "mask has {} entries, space has {} atoms",
                members.len(),
                space.len()
            )));
        }
        Ok(Self {
            space: space.clone(),
            members,
        })
    }

    pub fn from_ids<'a, I>(space: &Space, ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut p = Self::empty(space);
        for id in ids {
            let i = space
                .index_of(id)
                .ok_or_else(|| Error::Structural(format!("unknown atom id `{id}`")))?;
            p.members[i] = true;
        }
        Ok(p)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members[atom]
    }

    pub fn mask(&self) -> &[bool] {
        &self.members
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&m| m)
    }

    pub fn count(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    /// Member atom indices in atom order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
    }

    fn zip_with(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    /// The product `πρ`: set intersection.
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a && b)
    }

    /// `π − πρ`: set difference.
    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn sym_diff(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a != b)
    }

    pub fn join(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a || b)
    }

    /// `1 − π`
    pub fn complement(&self) -> Self {
        Self {
            space: self.space.clone(),
            members: self.members.iter().map(|&m| !m).collect(),
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        Ok(self.meet(other)?.is_empty())
    }
}

/// A real function on the atoms.
#[derive(Clone)]
pub struct ScalarField {
    space: Space,
    values: Vec<f64>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.values).finish()
    }
}

impl PartialEq for ScalarField {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

impl ScalarField {
    pub fn new(space: &Space, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Structural(format!(
                "field has {} values, space has {} atoms",
                values.len(),
                space.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite value {} at atom `{}`",
                values[i],
                space.id(i)
            )));
        }
        Ok(Self {
            space: space.clone(),
            values,
        })
    }

    pub fn constant(space: &Space, value: f64) -> Self {
        Self {
            space: space.clone(),
            values: vec![value; space.len()],
        }
    }

    pub fn zeros(space: &Space) -> Self {
        Self::constant(space, 0.0)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn get(&self, atom: usize) -> f64 {
        self.values[atom]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Atoms where the field is strictly positive. The comparison against zero
    /// is exact.
    pub fn range_projection(&self) -> Result<BaseProjection> {
        if let Some(i) = self.values.iter().position(|&v| v < 0.0) {
            return Err(Error::Domain(format!(
                "range projection of a field with negative value {} at atom `{}`",
                self.values[i],
                self.space.id(i)
            )));
        }
        BaseProjection::from_mask(&self.space, self.values.iter().map(|&v| v > 0.0).collect())
    }

    /// `Σ_{ω∈π} f(ω)·ν(ω)`, summed in atom order.
    pub fn integrate(&self, over: &BaseProjection) -> Result<f64> {
        ensure_same(&self.space, over.space())?;
        let mut total = 0.0;
        for i in over.iter() {
            total += self.values[i] * self.space.weight(i);
        }
        Ok(total)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(&self.space, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Pointwise product with the characteristic function of `π`.
    pub fn restrict(&self, to: &BaseProjection) -> Result<Self> {
        ensure_same(&self.space, to.space())?;
        Ok(Self {
            space: self.space.clone(),
            values: self
                .values
                .iter()
                .zip(to.mask())
                .map(|(&v, &m)| if m { v } else { 0.0 })
                .collect(),
        })
    }
}

/// A function on the atoms with values on the unit circle.
#[derive(Clone)]
pub struct UnimodularField {
    space: Space,
    values: Vec<Complex64>,
}

impl fmt::Debug for UnimodularField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.values).finish()
    }
}

impl PartialEq for UnimodularField {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.values == other.values
    }
}

impl UnimodularField {
    pub fn new(space: &Space, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::Structural(format!(
                "field has {} values, space has {} atoms",
                values.len(),
                space.len()
            )));
        }
        for (i, v) in values.iter().enumerate() {
            if !(v.re.is_finite() && v.im.is_finite())
                || (v.norm() - 1.0).abs() > tolerance::UNIMODULAR
            {
                return Err(Error::Domain(format!(
                    "phase {} at atom `{}` is not unimodular",
                    v,
                    space.id(i)
                )));
            }
        }
        Ok(Self {
            space: space.clone(),
            values,
        })
    }

    pub fn ones(space: &Space) -> Self {
        Self {
            space: space.clone(),
            values: vec![Complex64::new(1.0, 0.0); space.len()],
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn get(&self, atom: usize) -> Complex64 {
        self.values[atom]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}
