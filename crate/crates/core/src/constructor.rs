//! Construction of an orthogonal vector measure `μ` with `‖μ(p)‖² = m(p)`.
//!
//! The Hilbert space is `H = L²(Ω,ν) ⊕ L²(Ω,ν)`, realized as pairs of real
//! fields with inner product `Σ_ω ν(ω)(f₁g₁ + f₂g₂)`.
//!
//! On the diagonal subalgebra `μ(π₁ ⊕ π₂) = (π₁h₀, π₂k₀)`. Every registered
//! direction `(x, v)` spans the maximal commutative subalgebra of projections
//! `p(xπ₁, v, π₁) + p((1−x)π₂, −v, π₂)`, and at each atom we pick real numbers
//! `(h₁, h₂, k₁, k₂)` with
//!
//! ```text
//! h₁ + k₁ = h₀        h₁² + h₂² = h_γ²
//! h₂ + k₂ = k₀        k₁² + k₂² = k_γ²        h₁k₁ + h₂k₂ = 0
//! ```
//!
//! so that `μ(p(x,v))` = `(h₁, h₂)` and `μ(p(1−x,−v))` = `(k₁, k₂)` at that atom.
//! Directions are processed in registry order; on atoms where a direction
//! coincides with an earlier one (directly or with `(x, v) ↦ (1−x, −v)`), the
//! earlier quadruple is copied instead of solved so that the two subalgebras
//! share their values there.

use std::fmt;

use num_complex::Complex64;

use crate::algebra::{complementary_pairs, equal_pairs, Block, CanonicalProjection};
use crate::error::{Error, Result};
use crate::measure::{DensityPair, ProjectionMeasure};
use crate::space::{ensure_same, BaseProjection, ScalarField, Space, UnimodularField};
use crate::tolerance;

/// Global choice between the two solutions of the splitting problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sign {
    #[default]
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i32(self) -> i32 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(value: i64) -> Option<Self> {
        match value {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// An admissible pair `(x, v)`: `0 < x < 1` and `|v| = 1` at every atom.
///
/// `index` is the position in a [`DirectionRegistry`] (1-based; 0 until
/// registered, which is also the index of the diagonal subalgebra).
#[derive(Clone, PartialEq)]
pub struct Direction {
    index: usize,
    x: ScalarField,
    v: UnimodularField,
}

impl fmt::Debug for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Direction")
            .field("index", &self.index)
            .field("x", &self.x)
            .field("v", &self.v)
            .finish()
    }
}

impl Direction {
    pub fn new(x: ScalarField, v: UnimodularField) -> Result<Self> {
        ensure_same(x.space(), v.space())?;
        for (i, &xi) in x.values().iter().enumerate() {
            if !(xi > 0.0 && xi < 1.0) {
                return Err(Error::Domain(format!(
                    "direction needs 0 < x < 1 at every atom; x = {xi} at `{}`",
                    x.space().id(i)
                )));
            }
        }
        Ok(Self { index: 0, x, v })
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn space(&self) -> &Space {
        self.x.space()
    }

    pub fn x(&self) -> &ScalarField {
        &self.x
    }

    pub fn v(&self) -> &UnimodularField {
        &self.v
    }

    pub fn pair(&self, atom: usize) -> (f64, Complex64) {
        (self.x.get(atom), self.v.get(atom))
    }

    /// The rank-one block `p(x, v)` at `atom`.
    pub fn block(&self, atom: usize) -> Block {
        Block::Rank1 {
            x: self.x.get(atom),
            v: self.v.get(atom),
        }
    }

    /// `p(xπ₁, v, π₁) + p((1−x)π₂, −v, π₂)`; atoms in both sets give `I`.
    pub fn subalgebra_projection(
        &self,
        pi1: &BaseProjection,
        pi2: &BaseProjection,
    ) -> Result<CanonicalProjection> {
        ensure_same(self.space(), pi1.space())?;
        ensure_same(self.space(), pi2.space())?;
        let blocks: Vec<Block> = (0..self.space().len())
            .map(|i| match (pi1.contains(i), pi2.contains(i)) {
                (false, false) => Block::Zero,
                (true, false) => self.block(i),
                (false, true) => self.block(i).complement(),
                (true, true) => Block::Identity,
            })
            .collect();
        CanonicalProjection::from_blocks(self.space(), &blocks)
    }
}

/// How a direction relates to an earlier one at a single atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coincidence {
    None,
    /// Same `(x, v)`.
    Direct,
    /// `(x, v) = (1 − y, −w)`: same subalgebra with the roles of `p` and `1 − p` exchanged.
    Swapped,
}

/// Compares `d` with `e` at `atom` (per-atom tolerance 1e-9).
pub fn coincidence(d: &Direction, e: &Direction, atom: usize) -> Coincidence {
    let (a, b) = (d.pair(atom), e.pair(atom));
    if equal_pairs(a, b) {
        Coincidence::Direct
    } else if complementary_pairs(a, b) {
        Coincidence::Swapped
    } else {
        Coincidence::None
    }
}

/// Ordered list of directions; index 0 is the diagonal subalgebra and carries
/// no payload.
#[derive(Debug, Clone)]
pub struct DirectionRegistry {
    space: Space,
    directions: Vec<Direction>,
}

impl DirectionRegistry {
    /// Registers `directions` in order with indices `1, 2, …`.
    ///
    /// Rejects a direction that spans the same subalgebra as an earlier one,
    /// i.e. coincides with it (directly or swapped) at every atom.
    pub fn new(space: &Space, directions: Vec<Direction>) -> Result<Self> {
        let mut registry = Self {
            space: space.clone(),
            directions: Vec::with_capacity(directions.len()),
        };
        for d in directions {
            registry.push(d)?;
        }
        Ok(registry)
    }

    pub fn empty(space: &Space) -> Self {
        Self {
            space: space.clone(),
            directions: Vec::new(),
        }
    }

    pub fn push(&mut self, mut d: Direction) -> Result<usize> {
        ensure_same(&self.space, d.space())?;
        if let Some(e) = self.duplicate_of(&d) {
            return Err(Error::Structural(format!(
                "direction spans the same subalgebra as registered direction {}",
                e.index
            )));
        }
        d.index = self.directions.len() + 1;
        self.directions.push(d);
        Ok(self.directions.len())
    }

    fn duplicate_of(&self, d: &Direction) -> Option<&Direction> {
        self.directions.iter().find(|e| {
            (0..self.space.len()).all(|atom| coincidence(d, e, atom) != Coincidence::None)
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    /// Direction with registry index `index` (1-based).
    pub fn get(&self, index: usize) -> Option<&Direction> {
        index.checked_sub(1).and_then(|i| self.directions.get(i))
    }
}

/// Per-atom solution of the splitting system for one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomSolutionQuadruple {
    pub h1: f64,
    pub h2: f64,
    pub k1: f64,
    pub k2: f64,
}

impl AtomSolutionQuadruple {
    pub const ZERO: Self = Self {
        h1: 0.0,
        h2: 0.0,
        k1: 0.0,
        k2: 0.0,
    };

    pub fn to_array(self) -> [f64; 4] {
        [self.h1, self.h2, self.k1, self.k2]
    }

    pub fn from_array([h1, h2, k1, k2]: [f64; 4]) -> Self {
        Self { h1, h2, k1, k2 }
    }

    /// The quadruple of the same subalgebra seen from `(1 − x, −v)`.
    pub fn swapped(self) -> Self {
        Self {
            h1: self.k1,
            h2: self.k2,
            k1: self.h1,
            k2: self.h2,
        }
    }

    /// Largest residual of the five defining identities for base densities
    /// `(h0, k0)` and direction densities `(h, k)`.
    pub fn max_residual(&self, h0: f64, k0: f64, h: f64, k: f64) -> f64 {
        [
            self.h1 + self.k1 - h0,
            self.h2 + self.k2 - k0,
            self.h1 * self.h1 + self.h2 * self.h2 - h * h,
            self.k1 * self.k1 + self.k2 * self.k2 - k * k,
            self.h1 * self.k1 + self.h2 * self.k2,
        ]
        .iter()
        .map(|r| r.abs())
        .fold(0.0, f64::max)
    }
}

/// Splits `V₀ = (λ₀, μ₀)` into `V₁ + V₂` with `|V₁| = λ`, `|V₂| = μ`.
///
/// Requires `λ₀² + μ₀² = λ² + μ²` (relative tolerance 1e-9), which forces
/// `V₁ ⟂ V₂`. With `s = λ₀² + μ₀²`,
///
/// ```text
/// V₁ = (λ²/s)·V₀ + sign·(λμ/s)·(−μ₀, λ₀),    V₂ = V₀ − V₁.
/// ```
///
/// Returns `(λ₁, λ₂, μ₁, μ₂)` packed as `(h1, h2, k1, k2)`.
pub fn solve_split(
    lambda0: f64,
    mu0: f64,
    lambda: f64,
    mu: f64,
    sign: Sign,
) -> Result<AtomSolutionQuadruple> {
    let inputs = [lambda0, mu0, lambda, mu];
    if inputs.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::Domain(format!(
            "splitting inputs must be finite and non-negative: {inputs:?}"
        )));
    }
    let s = lambda0 * lambda0 + mu0 * mu0;
    let t = lambda * lambda + mu * mu;
    if (s - t).abs() > tolerance::scaled(tolerance::MEASURE, s) {
        return Err(Error::InconsistentDensities {
            detail: format!("λ₀² + μ₀² = {s} but λ² + μ² = {t}"),
        });
    }
    if s <= tolerance::SPLIT_ZERO {
        return Ok(AtomSolutionQuadruple::ZERO);
    }
    let along = lambda * lambda / s;
    let across = sign.value() * lambda * mu / s;
    let l1 = along * lambda0 - across * mu0;
    let l2 = along * mu0 + across * lambda0;
    Ok(AtomSolutionQuadruple {
        h1: l1,
        h2: l2,
        k1: lambda0 - l1,
        k2: mu0 - l2,
    })
}

/// A vector of `H = L² ⊕ L²`.
#[derive(Clone, PartialEq)]
pub struct HVector {
    space: Space,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl fmt::Debug for HVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HVector")
            .field("first", &self.first)
            .field("second", &self.second)
            .finish()
    }
}

impl HVector {
    pub fn zero(space: &Space) -> Self {
        Self {
            space: space.clone(),
            first: vec![0.0; space.len()],
            second: vec![0.0; space.len()],
        }
    }

    pub fn new(space: &Space, first: Vec<f64>, second: Vec<f64>) -> Result<Self> {
        if first.len() != space.len() || second.len() != space.len() {
            return Err(Error::Structural(
                "component length differs from atom count".into(),
            ));
        }
        Ok(Self {
            space: space.clone(),
            first,
            second,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn first(&self) -> &[f64] {
        &self.first
    }

    pub fn second(&self) -> &[f64] {
        &self.second
    }

    /// `Σ_ω ν(ω)(f₁g₁ + f₂g₂)`
    pub fn inner(&self, other: &Self) -> Result<f64> {
        ensure_same(&self.space, &other.space)?;
        let mut total = 0.0;
        for i in 0..self.space.len() {
            total += self.space.weight(i)
                * (self.first[i] * other.first[i] + self.second[i] * other.second[i]);
        }
        Ok(total)
    }

    pub fn norm_sq(&self) -> f64 {
        self.inner(self).expect("same space")
    }

    fn zip(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        let comb = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect();
        Ok(Self {
            space: self.space.clone(),
            first: comb(&self.first, &other.first),
            second: comb(&self.second, &other.second),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        let d = self.sub(other)?;
        Ok(d.first
            .iter()
            .chain(&d.second)
            .map(|v| v.abs())
            .fold(0.0, f64::max))
    }
}

/// Where a stored quadruple came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Solved,
    /// Copied from the direction with registry index `from`.
    Copied {
        from: usize,
        swapped: bool,
    },
}

#[derive(Debug, Clone)]
pub struct DirectionEntry {
    direction: Direction,
    quadruples: Vec<AtomSolutionQuadruple>,
    origins: Vec<Origin>,
}

impl DirectionEntry {
    pub fn direction(&self) -> &Direction {
        &self.direction
    }

    pub fn quadruples(&self) -> &[AtomSolutionQuadruple] {
        &self.quadruples
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }
}

/// The constructed measure `μ`.
#[derive(Debug, Clone)]
pub struct VectorMeasure {
    space: Space,
    sign: Sign,
    base: DensityPair,
    entries: Vec<DirectionEntry>,
}

impl VectorMeasure {
    /// `μ` on the diagonal subalgebra only: `μ(π₁ ⊕ π₂) = (π₁h₀, π₂k₀)`.
    pub fn build_base(m: &ProjectionMeasure, sign: Sign) -> Result<Self> {
        Ok(Self {
            space: m.space().clone(),
            sign,
            base: m.base_densities()?,
            entries: Vec::new(),
        })
    }

    /// Extends `μ` to the subalgebra of `d`, which becomes the next registry
    /// index. Atoms where `d` coincides with an earlier direction reuse the
    /// earliest such direction's quadruple; the rest are solved.
    pub fn extend_direction(mut self, m: &ProjectionMeasure, mut d: Direction) -> Result<Self> {
        ensure_same(&self.space, d.space())?;
        let index = self.entries.len() + 1;
        if d.index != 0 && d.index != index {
            return Err(Error::Precondition(format!(
                "direction {} extended out of order (expected index {index})",
                d.index
            )));
        }
        d.index = index;
        if let Some(e) = self.entries.iter().find(|e| {
            (0..self.space.len())
                .all(|atom| coincidence(&d, &e.direction, atom) != Coincidence::None)
        }) {
            return Err(Error::Precondition(format!(
                "direction {index} spans the same subalgebra as direction {}",
                e.direction.index
            )));
        }
        let densities = m.densities_for_direction(&d)?;
        let n = self.space.len();
        let mut quadruples = Vec::with_capacity(n);
        let mut origins = Vec::with_capacity(n);
        for atom in 0..n {
            let earlier =
                self.entries
                    .iter()
                    .find_map(|e| match coincidence(&d, &e.direction, atom) {
                        Coincidence::None => None,
                        Coincidence::Direct => Some((e.quadruples[atom], e.direction.index, false)),
                        Coincidence::Swapped => {
                            Some((e.quadruples[atom].swapped(), e.direction.index, true))
                        }
                    });
            let (quad, origin) = match earlier {
                Some((quad, from, swapped)) => (quad, Origin::Copied { from, swapped }),
                None => {
                    let quad = solve_split(
                        self.base.h.get(atom),
                        self.base.k.get(atom),
                        densities.h.get(atom),
                        densities.k.get(atom),
                        self.sign,
                    )
                    .map_err(|source| Error::Construction {
                        atom: self.space.id(atom).to_string(),
                        direction: index,
                        source: Box::new(source),
                    })?;
                    (quad, Origin::Solved)
                }
            };
            quadruples.push(quad);
            origins.push(origin);
        }
        self.entries.push(DirectionEntry {
            direction: d,
            quadruples,
            origins,
        });
        Ok(self)
    }

    /// Reassembles a measure from stored data; copy origins are recomputed by
    /// the same earliest-coincidence rule used during construction.
    pub fn from_parts(
        sign: Sign,
        base: DensityPair,
        registry: &DirectionRegistry,
        quadruples: Vec<Vec<AtomSolutionQuadruple>>,
    ) -> Result<Self> {
        let space = registry.space().clone();
        ensure_same(&space, base.h.space())?;
        if quadruples.len() != registry.len() {
            return Err(Error::Structural(format!(
                "{} quadruple tables for {} directions",
                quadruples.len(),
                registry.len()
            )));
        }
        let mut entries: Vec<DirectionEntry> = Vec::with_capacity(registry.len());
        for (d, quads) in registry.directions().iter().zip(quadruples) {
            if quads.len() != space.len() {
                return Err(Error::Structural(format!(
                    "direction {} has {} quadruples for {} atoms",
                    d.index,
                    quads.len(),
                    space.len()
                )));
            }
            let origins = (0..space.len())
                .map(|atom| {
                    entries
                        .iter()
                        .find_map(|e| match coincidence(d, &e.direction, atom) {
                            Coincidence::None => None,
                            Coincidence::Direct => Some(Origin::Copied {
                                from: e.direction.index,
                                swapped: false,
                            }),
                            Coincidence::Swapped => Some(Origin::Copied {
                                from: e.direction.index,
                                swapped: true,
                            }),
                        })
                        .unwrap_or(Origin::Solved)
                })
                .collect();
            entries.push(DirectionEntry {
                direction: d.clone(),
                quadruples: quads,
                origins,
            });
        }
        Ok(Self {
            space,
            sign,
            base,
            entries,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn base(&self) -> &DensityPair {
        &self.base
    }

    pub fn entries(&self) -> &[DirectionEntry] {
        &self.entries
    }

    pub fn registry(&self) -> DirectionRegistry {
        DirectionRegistry {
            space: self.space.clone(),
            directions: self.entries.iter().map(|e| e.direction.clone()).collect(),
        }
    }

    /// Stored quadruple of direction `index` (1-based) at `atom`.
    pub fn quadruple(&self, index: usize, atom: usize) -> Option<AtomSolutionQuadruple> {
        let entry = self.entries.get(index.checked_sub(1)?)?;
        entry.quadruples.get(atom).copied()
    }

    /// Overwrites one stored quadruple. Only for fault-injection tests.
    #[doc(hidden)]
    pub fn perturb_quadruple(&mut self, index: usize, atom: usize, delta: f64) {
        if let Some(entry) = index.checked_sub(1).and_then(|i| self.entries.get_mut(i)) {
            if let Some(q) = entry.quadruples.get_mut(atom) {
                q.h1 += delta;
            }
        }
    }

    /// Shifts `h₀` at one atom. Only for fault-injection tests.
    #[doc(hidden)]
    pub fn perturb_base(&mut self, atom: usize, delta: f64) {
        if atom < self.space.len() {
            let mut h = self.base.h.values().to_vec();
            h[atom] += delta;
            self.base.h = ScalarField::new(&self.space, h).expect("finite");
        }
    }

    /// `(h, k)` contributed by a rank-one block at `atom`.
    fn rank_one_value(&self, atom: usize, x: f64, v: Complex64) -> Result<(f64, f64)> {
        for e in &self.entries {
            let probe = (x, v);
            let (ex, ev) = e.direction.pair(atom);
            let q = e.quadruples[atom];
            if equal_pairs(probe, (ex, ev)) {
                return Ok((q.h1, q.h2));
            }
            if complementary_pairs(probe, (ex, ev)) {
                return Ok((q.k1, q.k2));
            }
        }
        Err(Error::DirectionNotRegistered {
            atom: self.space.id(atom).to_string(),
            x,
            v: v.to_string(),
        })
    }

    /// `μ(p)` for `p = π₁ ⊕ π₂ + Σ (pieces of registered subalgebras)`.
    ///
    /// First component: `π₁h₀ + π₃h_{γ1} + π₄k_{γ1}`; second:
    /// `π₂k₀ + π₃h_{γ2} + π₄k_{γ2}`, where `π₃` / `π₄` are the off-diagonal
    /// atoms matched directly / swapped by the earliest registered direction.
    pub fn evaluate(&self, p: &CanonicalProjection) -> Result<HVector> {
        ensure_same(&self.space, p.space())?;
        let n = self.space.len();
        let (mut first, mut second) = (vec![0.0; n], vec![0.0; n]);
        for atom in 0..n {
            let (a, b) = match p.block(atom) {
                Block::Zero => (0.0, 0.0),
                Block::Upper => (self.base.h.get(atom), 0.0),
                Block::Lower => (0.0, self.base.k.get(atom)),
                Block::Identity => (self.base.h.get(atom), self.base.k.get(atom)),
                Block::Rank1 { x, v } => self.rank_one_value(atom, x, v)?,
            };
            first[atom] = a;
            second[atom] = b;
        }
        Ok(HVector {
            space: self.space.clone(),
            first,
            second,
        })
    }
}

/// `build_base` followed by `extend_direction` over the registry in order.
pub fn build_vector_measure(
    m: &ProjectionMeasure,
    registry: &DirectionRegistry,
    sign: Sign,
) -> Result<VectorMeasure> {
    ensure_same(m.space(), registry.space())?;
    let mut mu = VectorMeasure::build_base(m, sign)?;
    for d in registry.directions() {
        mu = mu.extend_direction(m, d.clone())?;
    }
    Ok(mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Mat2;
    use crate::space::AtomicMeasureSpace;
    use approx::assert_abs_diff_eq;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dir(space: &Space, xs: &[f64], vs: &[Complex64]) -> Direction {
        Direction::new(
            ScalarField::new(space, xs.to_vec()).unwrap(),
            UnimodularField::new(space, vs.to_vec()).unwrap(),
        )
        .unwrap()
    }

    fn assert_quad(q: AtomSolutionQuadruple, expected: [f64; 4]) {
        for (a, b) in q.to_array().iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn split_degenerate_input() {
        let q = solve_split(0.0, 0.0, 0.0, 0.0, Sign::Plus).unwrap();
        assert_eq!(q, AtomSolutionQuadruple::ZERO);
    }

    #[test]
    fn split_worked_examples() {
        // Values obtained by substituting into the four equations and the
        // orthogonality identity by hand.
        let q = solve_split(1.0, 0.0, H, H, Sign::Plus).unwrap();
        assert_quad(q, [0.5, 0.5, 0.5, -0.5]);
        let q = solve_split(H, H, H, H, Sign::Plus).unwrap();
        assert_quad(q, [0.0, H, H, 0.0]);
        let q = solve_split(1.0, 0.0, H, H, Sign::Minus).unwrap();
        assert_quad(q, [0.5, -0.5, 0.5, 0.5]);
    }

    #[test]
    fn split_rejects_inconsistent_densities() {
        assert!(matches!(
            solve_split(1.0, 0.0, 1.0, 1.0, Sign::Plus),
            Err(Error::InconsistentDensities { .. })
        ));
        assert!(matches!(
            solve_split(-1.0, 0.0, 1.0, 0.0, Sign::Plus),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn split_forces_a_negative_component() {
        // No non-negative solution exists here; both signs produce one negative entry.
        for sign in [Sign::Plus, Sign::Minus] {
            let q = solve_split(1.0, 0.0, H, H, sign).unwrap();
            assert!(q.to_array().iter().any(|&v| v < 0.0));
            assert!(q.max_residual(1.0, 0.0, H, H) <= 1e-15);
        }
    }

    #[test]
    fn coincidence_kinds() {
        let s = AtomicMeasureSpace::new([("a", 1.0), ("b", 1.0)]).unwrap();
        let v = c(0.6, 0.8);
        let d = dir(&s, &[0.3, 0.4], &[v, v]);
        let e = dir(&s, &[0.3, 0.6], &[v, -v]);
        let f = dir(&s, &[0.5, 0.5], &[v, v]);
        assert_eq!(coincidence(&d, &d, 0), Coincidence::Direct);
        assert_eq!(coincidence(&e, &d, 0), Coincidence::Direct);
        assert_eq!(coincidence(&e, &d, 1), Coincidence::Swapped);
        assert_eq!(coincidence(&f, &d, 0), Coincidence::None);
        assert_eq!(coincidence(&f, &d, 1), Coincidence::None);
    }

    #[test]
    fn registry_rejects_duplicate_subalgebras() {
        let s = AtomicMeasureSpace::new([("a", 1.0), ("b", 1.0)]).unwrap();
        let v = c(0.0, 1.0);
        let d = dir(&s, &[0.3, 0.4], &[v, v]);
        let swapped_everywhere = dir(&s, &[0.7, 0.4], &[-v, v]);
        assert!(DirectionRegistry::new(&s, vec![d.clone(), swapped_everywhere]).is_err());
        let partial = dir(&s, &[0.3, 0.5], &[v, v]);
        let reg = DirectionRegistry::new(&s, vec![d, partial]).unwrap();
        assert_eq!(reg.directions()[1].index(), 2);
        assert!(reg.get(0).is_none());
        assert_eq!(reg.get(2).unwrap().index(), 2);
    }

    #[test]
    fn subalgebra_projection_examples() {
        let s = AtomicMeasureSpace::new([("a", 1.0), ("b", 1.0)]).unwrap();
        let v = c(0.0, 1.0);
        let d = dir(&s, &[0.3, 0.4], &[v, v]);
        let empty = BaseProjection::empty(&s);
        let full = BaseProjection::full(&s);
        assert!(d.subalgebra_projection(&empty, &empty).unwrap().is_zero());
        assert_eq!(
            d.subalgebra_projection(&full, &full).unwrap(),
            CanonicalProjection::identity(&s)
        );
        let a = BaseProjection::singleton(&s, 0);
        let p = d.subalgebra_projection(&a, &empty).unwrap();
        assert_eq!(p.blocks(), vec![Block::Rank1 { x: 0.3, v }, Block::Zero]);
        let sum = d
            .subalgebra_projection(&a, &empty)
            .unwrap()
            .add_orthogonal(&d.subalgebra_projection(&empty, &a).unwrap())
            .unwrap();
        assert_eq!(sum.blocks(), vec![Block::Identity, Block::Zero]);
    }

    #[test]
    fn diagonal_only_measure() {
        let s = AtomicMeasureSpace::new([("a", 2.0), ("b", 1.0)]).unwrap();
        let m = ProjectionMeasure::state(&s, vec![Mat2::diag(0.25, 0.5), Mat2::diag(1.0, 0.0)])
            .unwrap();
        let mu = build_vector_measure(&m, &DirectionRegistry::empty(&s), Sign::Plus).unwrap();
        let zero = mu.evaluate(&CanonicalProjection::zero(&s)).unwrap();
        assert_eq!(zero, HVector::zero(&s));
        let one = mu.evaluate(&CanonicalProjection::identity(&s)).unwrap();
        assert_eq!(one.first(), mu.base().h.values());
        assert_eq!(one.second(), mu.base().k.values());
        assert_abs_diff_eq!(one.norm_sq(), m.total().unwrap(), epsilon = 1e-15);

        let upper_a = CanonicalProjection::diagonal(
            BaseProjection::singleton(&s, 0),
            BaseProjection::empty(&s),
        )
        .unwrap();
        let val = mu.evaluate(&upper_a).unwrap();
        assert_eq!(val.first(), &[0.5, 0.0]);
        assert_eq!(val.second(), &[0.0, 0.0]);
    }

    #[test]
    fn single_direction_pure_state() {
        let s = AtomicMeasureSpace::new([("a", 1.0)]).unwrap();
        let m = ProjectionMeasure::state(&s, vec![Mat2::diag(1.0, 0.0)]).unwrap();
        let v = c(1.0, 0.0);
        let reg = DirectionRegistry::new(&s, vec![dir(&s, &[0.5], &[v])]).unwrap();
        let mu = build_vector_measure(&m, &reg, Sign::Plus).unwrap();
        let p = CanonicalProjection::from_blocks(&s, &[Block::Rank1 { x: 0.5, v }]).unwrap();
        let val = mu.evaluate(&p).unwrap();
        assert_abs_diff_eq!(val.first()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(val.second()[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(val.norm_sq(), m.eval(&p).unwrap(), epsilon = 1e-15);
        assert_eq!(mu.entries()[0].origins(), &[Origin::Solved]);
    }

    #[test]
    fn unregistered_direction_is_an_error() {
        let s = AtomicMeasureSpace::new([("a", 1.0)]).unwrap();
        let m = ProjectionMeasure::state(&s, vec![Mat2::diag(0.5, 0.5)]).unwrap();
        let mu = VectorMeasure::build_base(&m, Sign::Plus).unwrap();
        let p = CanonicalProjection::from_blocks(
            &s,
            &[Block::Rank1 {
                x: 0.5,
                v: c(1.0, 0.0),
            }],
        )
        .unwrap();
        assert!(matches!(
            mu.evaluate(&p),
            Err(Error::DirectionNotRegistered { .. })
        ));
    }

    #[test]
    fn patching_copies_and_swaps() {
        let s = AtomicMeasureSpace::new([("a", 1.0), ("b", 2.0), ("c", 0.5)]).unwrap();
        let mut d = Mat2::diag(0.7, 0.3);
        d.0[0][1] = c(0.1, -0.2);
        d.0[1][0] = c(0.1, 0.2);
        let m = ProjectionMeasure::state(&s, vec![d, Mat2::diag(0.2, 0.9), Mat2::diag(0.5, 0.5)])
            .unwrap();
        let v = c(0.6, 0.8);
        let w = c(0.0, 1.0);
        let first = dir(&s, &[0.3, 0.6, 0.2], &[v, v, v]);
        // Same as `first` on a, swapped on b, unrelated on c.
        let second = dir(&s, &[0.3, 0.4, 0.5], &[v, -v, w]);
        let reg = DirectionRegistry::new(&s, vec![first, second]).unwrap();
        let mu = build_vector_measure(&m, &reg, Sign::Plus).unwrap();
        let (e1, e2) = (&mu.entries()[0], &mu.entries()[1]);
        assert_eq!(e2.quadruples()[0], e1.quadruples()[0]);
        assert_eq!(e2.quadruples()[1], e1.quadruples()[1].swapped());
        assert_eq!(
            e2.origins(),
            &[
                Origin::Copied {
                    from: 1,
                    swapped: false
                },
                Origin::Copied {
                    from: 1,
                    swapped: true
                },
                Origin::Solved
            ]
        );
    }

    #[test]
    fn construction_reports_bad_measures() {
        let s = AtomicMeasureSpace::new([("a", 1.0)]).unwrap();
        let broken = crate::measure::FrameFunction::custom(
            1.0,
            std::sync::Arc::new(|n: [f64; 3]| if n[0] > 0.0 { 0.9 } else { 0.5 }),
        )
        .unwrap();
        let m = ProjectionMeasure::frame(&s, vec![broken]).unwrap();
        let reg = DirectionRegistry::new(&s, vec![dir(&s, &[0.5], &[c(1.0, 0.0)])]).unwrap();
        let err = build_vector_measure(&m, &reg, Sign::Plus).unwrap_err();
        assert!(
            matches!(err, Error::NotAMeasure { direction: 1, .. }),
            "{err}"
        );
    }
}
