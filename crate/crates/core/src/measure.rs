//! Measures on the projection lattice of `M ⊗ M₂`.
//!
//! A measure is stored atom by atom: `m(p) = Σ_ω m_ω(p_ω)` where `p_ω` is the
//! 2×2 block of `p` at `ω`. Three per-atom families are supported:
//!
//! * state measures, `m_ω(P) = ν(ω)·Tr(D_ω P)` for a positive semidefinite `D_ω`;
//! * frame-function measures, `m_ω(P) = ν(ω)·f_ω(n)` where `n` is the Bloch
//!   vector of the rank-one projector `P = (I + n·σ)/2` and
//!   `f_ω(n) + f_ω(−n) = c_ω`;
//! * tabulated measures, a finite complement-closed table of per-atom values.
//!
//! Frame functions need not be restrictions of a linear functional, which is
//! exactly the situation where no state extends `m`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::{equal_pairs, Block, CanonicalProjection, Mat2};
use crate::constructor::Direction;
use crate::error::{Error, Result};
use crate::space::{ensure_same, ScalarField, Space};
use crate::tolerance;

/// Bloch vector of the rank-one block `p(x, v)`.
///
/// `n = (2·Re(v·s), −2·Im(v·s), 2x − 1)` with `s = (x(1−x))^{1/2}`, so that the
/// complement `(1 − x, −v)` maps to `−n`.
pub fn bloch_vector(x: f64, v: Complex64) -> [f64; 3] {
    let vs = v * (x * (1.0 - x)).sqrt();
    [2.0 * vs.re, -2.0 * vs.im, 2.0 * x - 1.0]
}

/// Bloch vector of a rank-one block; `None` for `0` and `I`.
pub fn block_bloch(block: &Block) -> Option<[f64; 3]> {
    match *block {
        Block::Upper => Some([0.0, 0.0, 1.0]),
        Block::Lower => Some([0.0, 0.0, -1.0]),
        Block::Rank1 { x, v } => Some(bloch_vector(x, v)),
        Block::Zero | Block::Identity => None,
    }
}

fn neg(n: [f64; 3]) -> [f64; 3] {
    [-n[0], -n[1], -n[2]]
}

fn close(a: [f64; 3], b: [f64; 3]) -> bool {
    a.iter()
        .zip(&b)
        .all(|(p, q)| (p - q).abs() <= tolerance::PAIR)
}

pub type FrameFn = Arc<dyn Fn([f64; 3]) -> f64 + Send + Sync>;

/// The shape of a per-atom frame function, before scaling by its constant.
#[derive(Clone)]
pub enum FrameFamily {
    /// `f(n) = (c/2)·(1 + a·n_x·|n_z|)`; odd part non-linear in `n`.
    AbsNz { amplitude: f64 },
    /// `f(n) = (c/2)·(1 + b·n)`, the frame function of a state.
    Quadratic { bloch: [f64; 3] },
    /// Explicit `(n, f(n))` points, closed under `n ↦ −n`.
    Table(Vec<([f64; 3], f64)>),
    /// Arbitrary closure; the sum rule is not checked at construction.
    Custom(FrameFn),
}

impl fmt::Debug for FrameFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameFamily::AbsNz { amplitude } => write!(f, "AbsNz({amplitude})"),
            FrameFamily::Quadratic { bloch } => write!(f, "Quadratic({bloch:?})"),
            FrameFamily::Table(points) => write!(f, "Table({} points)", points.len()),
            FrameFamily::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A frame function on rank-one projectors of `M₂` with sum constant `c`.
#[derive(Debug, Clone)]
pub struct FrameFunction {
    family: FrameFamily,
    constant: f64,
}

impl FrameFunction {
    fn check_constant(constant: f64) -> Result<()> {
        if !(constant.is_finite() && constant >= 0.0) {
            return Err(Error::Domain(format!(
                "frame constant must be finite and non-negative, got {constant}"
            )));
        }
        Ok(())
    }

    pub fn abs_nz(constant: f64, amplitude: f64) -> Result<Self> {
        Self::check_constant(constant)?;
        // |n_x·n_z| ≤ 1/2 on the sphere, so |a| ≤ 2 keeps f ≥ 0.
        if !(amplitude.is_finite() && amplitude.abs() <= 2.0) {
            return Err(Error::Domain(format!(
                "abs_nz amplitude must lie in [-2, 2], got {amplitude}"
            )));
        }
        Ok(Self {
            family: FrameFamily::AbsNz { amplitude },
            constant,
        })
    }

    pub fn quadratic(constant: f64, bloch: [f64; 3]) -> Result<Self> {
        Self::check_constant(constant)?;
        let len = bloch.iter().map(|b| b * b).sum::<f64>().sqrt();
        if !(len.is_finite() && len <= 1.0 + tolerance::PAIR) {
            return Err(Error::Domain(format!(
                "quadratic frame function needs |b| ≤ 1, got {len}"
            )));
        }
        Ok(Self {
            family: FrameFamily::Quadratic { bloch },
            constant,
        })
    }

    pub fn table(constant: f64, points: Vec<([f64; 3], f64)>) -> Result<Self> {
        Self::check_constant(constant)?;
        for (n, value) in &points {
            let len = n.iter().map(|c| c * c).sum::<f64>().sqrt();
            if (len - 1.0).abs() > tolerance::PAIR {
                return Err(Error::Domain(format!(
                    "table point {n:?} is not a unit vector"
                )));
            }
            if !(value.is_finite() && *value >= 0.0) {
                return Err(Error::Domain(format!(
                    "table value {value} at {n:?} is negative or non-finite"
                )));
            }
            if !points.iter().any(|(m, _)| close(*m, neg(*n))) {
                return Err(Error::Domain(format!(
                    "table is not closed under n ↦ −n: {n:?} has no antipode"
                )));
            }
        }
        Ok(Self {
            family: FrameFamily::Table(points),
            constant,
        })
    }

    pub fn custom(constant: f64, f: FrameFn) -> Result<Self> {
        Self::check_constant(constant)?;
        Ok(Self {
            family: FrameFamily::Custom(f),
            constant,
        })
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn family(&self) -> &FrameFamily {
        &self.family
    }

    /// `f(n)`; `None` when a table has no entry at `n`.
    pub fn value(&self, n: [f64; 3]) -> Option<f64> {
        let half = 0.5 * self.constant;
        match &self.family {
            FrameFamily::AbsNz { amplitude } => Some(half * (1.0 + amplitude * n[0] * n[2].abs())),
            FrameFamily::Quadratic { bloch } => {
                Some(half * (1.0 + bloch[0] * n[0] + bloch[1] * n[1] + bloch[2] * n[2]))
            }
            FrameFamily::Table(points) => points
                .iter()
                .find(|(m, _)| close(*m, n))
                .map(|(_, value)| *value),
            FrameFamily::Custom(f) => Some(f(n)),
        }
    }
}

/// Finite table of per-atom block values (weights already included).
#[derive(Debug, Clone, Default)]
pub struct AtomTable {
    entries: Vec<(Block, f64)>,
}

impl AtomTable {
    fn find(&self, block: &Block) -> Option<f64> {
        self.entries
            .iter()
            .find(|(b, _)| same_block(b, block))
            .map(|(_, value)| *value)
    }

    fn lookup(&self, block: &Block) -> Option<f64> {
        match block {
            Block::Zero => Some(self.find(block).unwrap_or(0.0)),
            Block::Identity => self
                .find(block)
                .or_else(|| Some(self.find(&Block::Upper)? + self.find(&Block::Lower)?)),
            _ => self.find(block),
        }
    }

    pub fn entries(&self) -> &[(Block, f64)] {
        &self.entries
    }
}

fn same_block(a: &Block, b: &Block) -> bool {
    match (a, b) {
        (Block::Rank1 { x, v }, Block::Rank1 { x: y, v: w }) => equal_pairs((*x, *v), (*y, *w)),
        _ => a == b,
    }
}

#[derive(Debug, Clone)]
pub enum MeasureKind {
    State(Vec<Mat2>),
    Frame(Vec<FrameFunction>),
    Table(Vec<AtomTable>),
}

/// A measure on projections, decomposed over atoms.
#[derive(Debug, Clone)]
pub struct ProjectionMeasure {
    space: Space,
    kind: MeasureKind,
}

/// The densities `h`, `k ≥ 0` of a measure restricted to one maximal commutative
/// subalgebra.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPair {
    pub h: ScalarField,
    pub k: ScalarField,
}

impl ProjectionMeasure {
    /// `m_ω(P) = ν(ω)·Tr(D_ω P)`; every `D_ω` must be Hermitian positive
    /// semidefinite within 1e-9.
    pub fn state(space: &Space, densities: Vec<Mat2>) -> Result<Self> {
        if densities.len() != space.len() {
            return Err(Error::Structural(format!(
                "{} density blocks for {} atoms",
                densities.len(),
                space.len()
            )));
        }
        for (i, d) in densities.iter().enumerate() {
            let finite =
                d.0.iter()
                    .flatten()
                    .all(|z| z.re.is_finite() && z.im.is_finite());
            if !finite || d.hermitian_violation() > tolerance::PSD {
                return Err(Error::Domain(format!(
                    "density block at atom `{}` is not Hermitian",
                    space.id(i)
                )));
            }
            let [lo, _] = d.hermitian_eigenvalues();
            if lo < -tolerance::PSD {
                return Err(Error::Domain(format!(
                    "density block at atom `{}` has negative eigenvalue {lo}",
                    space.id(i)
                )));
            }
        }
        Ok(Self {
            space: space.clone(),
            kind: MeasureKind::State(densities),
        })
    }

    pub fn frame(space: &Space, functions: Vec<FrameFunction>) -> Result<Self> {
        if functions.len() != space.len() {
            return Err(Error::Structural(format!(
                "{} frame functions for {} atoms",
                functions.len(),
                space.len()
            )));
        }
        Ok(Self {
            space: space.clone(),
            kind: MeasureKind::Frame(functions),
        })
    }

    /// A tabulated measure from single-atom projections and their values.
    ///
    /// Each atom needs entries for `diag(1,0)` and `diag(0,1)`, and every rank-one
    /// entry needs its complement. `I` may be omitted, in which case it is the
    /// sum of the two diagonal entries.
    pub fn tabulated(space: &Space, entries: Vec<(CanonicalProjection, f64)>) -> Result<Self> {
        let mut tables = vec![AtomTable::default(); space.len()];
        for (p, value) in entries {
            ensure_same(space, p.space())?;
            let support = p.central_support();
            let atom = match (support.count(), support.iter().next()) {
                (1, Some(atom)) => atom,
                _ => {
                    return Err(Error::Structural(
                        "table entries must be supported on exactly one atom".into(),
                    ))
                }
            };
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::Domain(format!(
                    "table value {value} at atom `{}` is negative or non-finite",
                    space.id(atom)
                )));
            }
            let block = p.block(atom);
            if tables[atom].find(&block).is_some() {
                return Err(Error::Structural(format!(
                    "duplicate table entry {block:?} at atom `{}`",
                    space.id(atom)
                )));
            }
            tables[atom].entries.push((block, value));
        }
        for (i, table) in tables.iter().enumerate() {
            for required in [Block::Upper, Block::Lower] {
                if table.find(&required).is_none() {
                    return Err(Error::Structural(format!(
                        "table has no {required:?} entry at atom `{}`",
                        space.id(i)
                    )));
                }
            }
            for (block, _) in &table.entries {
                if let Block::Rank1 { .. } = block {
                    if table.find(&block.complement()).is_none() {
                        return Err(Error::Structural(format!(
                            "table is not complement-closed at atom `{}`: {block:?}",
                            space.id(i)
                        )));
                    }
                }
            }
        }
        Ok(Self {
            space: space.clone(),
            kind: MeasureKind::Table(tables),
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// `m_ω(block)`, weight included.
    pub fn eval_block(&self, atom: usize, block: &Block) -> Result<f64> {
        let weight = self.space.weight(atom);
        match &self.kind {
            MeasureKind::State(ds) => Ok(weight * (ds[atom] * block.matrix()).trace().re),
            MeasureKind::Frame(fs) => {
                let f = &fs[atom];
                match block_bloch(block) {
                    None if *block == Block::Zero => Ok(0.0),
                    None => Ok(weight * f.constant()),
                    Some(n) => {
                        f.value(n)
                            .map(|value| weight * value)
                            .ok_or_else(|| Error::Lookup {
                                atom: self.space.id(atom).to_string(),
                                detail: format!("frame table has no point at n = {n:?}"),
                            })
                    }
                }
            }
            MeasureKind::Table(tables) => tables[atom].lookup(block).ok_or_else(|| Error::Lookup {
                atom: self.space.id(atom).to_string(),
                detail: format!("no table entry for {block:?}"),
            }),
        }
    }

    /// `m(p) = Σ_ω m_ω(p_ω)`, summed in atom order.
    pub fn eval(&self, p: &CanonicalProjection) -> Result<f64> {
        ensure_same(&self.space, p.space())?;
        let mut total = 0.0;
        for atom in 0..self.space.len() {
            let block = p.block(atom);
            if block != Block::Zero {
                total += self.eval_block(atom, &block)?;
            }
        }
        Ok(total)
    }

    /// `m(1)`
    pub fn total(&self) -> Result<f64> {
        self.eval(&CanonicalProjection::identity(&self.space))
    }

    /// Rank-one blocks a tabulated measure knows about at `atom`; `None` for
    /// measures defined on every block.
    pub fn tabulated_blocks(&self, atom: usize) -> Option<Vec<Block>> {
        match &self.kind {
            MeasureKind::Table(tables) => Some(
                tables[atom]
                    .entries
                    .iter()
                    .map(|(b, _)| *b)
                    .filter(|b| matches!(b, Block::Rank1 { .. }))
                    .collect(),
            ),
            MeasureKind::Frame(fs) => match fs[atom].family() {
                FrameFamily::Table(points) => Some(
                    points
                        .iter()
                        .filter_map(|(n, _)| block_from_bloch(*n))
                        .collect(),
                ),
                _ => None,
            },
            MeasureKind::State(_) => None,
        }
    }

    fn density(&self, atom: usize, block: &Block, scale: f64) -> Result<f64> {
        let value = self.eval_block(atom, block)? / self.space.weight(atom);
        if value >= 0.0 {
            Ok(value.sqrt())
        } else if value >= -tolerance::scaled(tolerance::MEASURE, scale) {
            Ok(0.0)
        } else {
            Err(Error::Domain(format!(
                "negative measure value {value} for {block:?} at atom `{}`",
                self.space.id(atom)
            )))
        }
    }

    /// `h₀(ω) = (m(e₁₁ at ω)/ν(ω))^{1/2}`, `k₀(ω) = (m(e₂₂ at ω)/ν(ω))^{1/2}`.
    pub fn base_densities(&self) -> Result<DensityPair> {
        let n = self.space.len();
        let (mut h, mut k) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for atom in 0..n {
            h.push(self.density(atom, &Block::Upper, 1.0)?);
            k.push(self.density(atom, &Block::Lower, 1.0)?);
        }
        Ok(DensityPair {
            h: ScalarField::new(&self.space, h)?,
            k: ScalarField::new(&self.space, k)?,
        })
    }

    /// Densities of `m` on the subalgebra of `d`: `h(ω)² = m(p(x,v) at ω)/ν(ω)`
    /// and `k(ω)² = m(p(1−x,−v) at ω)/ν(ω)`.
    ///
    /// Fails with [`Error::NotAMeasure`] when `h² + k² ≠ h₀² + k₀²` at some atom.
    pub fn densities_for_direction(&self, d: &Direction) -> Result<DensityPair> {
        ensure_same(&self.space, d.space())?;
        let base = self.base_densities()?;
        let n = self.space.len();
        let (mut h, mut k) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for atom in 0..n {
            let block = d.block(atom);
            let base_sq = base.h.get(atom).powi(2) + base.k.get(atom).powi(2);
            let hg = self.density(atom, &block, base_sq)?;
            let kg = self.density(atom, &block.complement(), base_sq)?;
            let gap = (hg * hg + kg * kg - base_sq).abs();
            if gap > tolerance::scaled(tolerance::MEASURE, base_sq) {
                return Err(Error::NotAMeasure {
                    atom: self.space.id(atom).to_string(),
                    direction: d.index(),
                    detail: format!("h² + k² = {} but h₀² + k₀² = {base_sq}", hg * hg + kg * kg),
                });
            }
            h.push(hg);
            k.push(kg);
        }
        Ok(DensityPair {
            h: ScalarField::new(&self.space, h)?,
            k: ScalarField::new(&self.space, k)?,
        })
    }

    /// Checks the measure axioms on `samples` without failing: sum rule against
    /// the complement, non-negativity, and the per-atom density identity on
    /// every rank-one block.
    pub fn validate(&self, samples: &[CanonicalProjection]) -> ValidationReport {
        let mut report = ValidationReport::default();
        let total = match self.total() {
            Ok(t) => t,
            Err(e) => {
                report.push("lookup", None, f64::INFINITY, e.to_string());
                return report;
            }
        };
        let tol = tolerance::scaled(tolerance::MEASURE, total);
        for p in samples {
            report.checked += 1;
            if ensure_same(&self.space, p.space()).is_err() {
                report.push(
                    "structure",
                    None,
                    f64::INFINITY,
                    "sample on another space".into(),
                );
                continue;
            }
            for atom in 0..self.space.len() {
                let block = p.block(atom);
                self.check_atom(atom, &block, &mut report);
            }
            match (self.eval(p), self.eval(&p.complement())) {
                (Ok(a), Ok(b)) => {
                    let gap = (a + b - total).abs();
                    if gap > tol {
                        let atom = self.worst_atom(p);
                        report.push(
                            "complement_sum",
                            atom,
                            gap,
                            format!("m(p) + m(1 − p) = {} but m(1) = {total}", a + b),
                        );
                    }
                }
                (Err(e), _) | (_, Err(e)) => {
                    let atom = match &e {
                        Error::Lookup { atom, .. } => Some(atom.clone()),
                        _ => None,
                    };
                    report.push("lookup", atom, f64::INFINITY, e.to_string());
                }
            }
        }
        report
    }

    fn check_atom(&self, atom: usize, block: &Block, report: &mut ValidationReport) {
        let id = Some(self.space.id(atom).to_string());
        let (Ok(value), Ok(comp), Ok(whole)) = (
            self.eval_block(atom, block),
            self.eval_block(atom, &block.complement()),
            self.eval_block(atom, &Block::Identity),
        ) else {
            return;
        };
        let scale = whole / self.space.weight(atom);
        let tol = tolerance::scaled(tolerance::MEASURE, scale);
        for (name, v) in [("value", value), ("complement", comp)] {
            if v < -tol * self.space.weight(atom) {
                report.push(
                    "non_negative",
                    id.clone(),
                    -v,
                    format!("{name} of {block:?} is {v}"),
                );
            }
        }
        if let Block::Rank1 { .. } = block {
            let w = self.space.weight(atom);
            let gap = ((value + comp) / w - scale).abs();
            if gap > tol {
                report.push(
                    "density_identity",
                    id,
                    gap,
                    format!("h² + k² = {} but h₀² + k₀² = {scale}", (value + comp) / w),
                );
            }
        }
    }

    fn worst_atom(&self, p: &CanonicalProjection) -> Option<String> {
        (0..self.space.len())
            .filter_map(|atom| {
                let block = p.block(atom);
                let gap = self.eval_block(atom, &block).ok()?
                    + self.eval_block(atom, &block.complement()).ok()?
                    - self.eval_block(atom, &Block::Identity).ok()?;
                Some((atom, gap.abs()))
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(atom, _)| self.space.id(atom).to_string())
    }
}

/// Rank-one block with Bloch vector `n`.
pub fn block_from_bloch(n: [f64; 3]) -> Option<Block> {
    let x = 0.5 * (1.0 + n[2]);
    if x >= 1.0 - tolerance::PAIR {
        return Some(Block::Upper);
    }
    if x <= tolerance::PAIR {
        return Some(Block::Lower);
    }
    let s = (x * (1.0 - x)).sqrt();
    // v·s = (n_x − i·n_y)/2
    let vs = Complex64::new(0.5 * n[0], -0.5 * n[1]);
    let v = vs / s;
    let v = v / v.norm();
    Some(Block::Rank1 { x, v })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub check: &'static str,
    pub atom: Option<String>,
    pub magnitude: f64,
    pub detail: String,
}

/// Outcome of [`ProjectionMeasure::validate`].
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    fn push(&mut self, check: &'static str, atom: Option<String>, magnitude: f64, detail: String) {
        self.violations.push(Violation {
            check,
            atom,
            magnitude,
            detail,
        });
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{AtomicMeasureSpace, BaseProjection, UnimodularField};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_atom(weight: f64) -> Space {
        AtomicMeasureSpace::new([("a", weight)]).unwrap()
    }

    fn rank1(space: &Space, x: f64, v: Complex64) -> CanonicalProjection {
        CanonicalProjection::from_blocks(space, &[Block::Rank1 { x, v }]).unwrap()
    }

    fn direction(space: &Space, x: f64, v: Complex64) -> Direction {
        Direction::new(
            ScalarField::constant(space, x),
            UnimodularField::new(space, vec![v; space.len()]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn bloch_map_sends_complement_to_antipode() {
        let (x, v) = (0.3, c(0.6, 0.8));
        let n = bloch_vector(x, v);
        let m = bloch_vector(1.0 - x, -v);
        for i in 0..3 {
            assert_abs_diff_eq!(n[i], -m[i], epsilon = 1e-15);
        }
        let len: f64 = n.iter().map(|c| c * c).sum();
        assert_abs_diff_eq!(len, 1.0, epsilon = 1e-15);
        // P = (I + n·σ)/2 reproduces the block.
        let p = Block::Rank1 { x, v }.matrix();
        assert_abs_diff_eq!(p.0[0][1].re, 0.5 * n[0], epsilon = 1e-15);
        assert_abs_diff_eq!(p.0[0][1].im, -0.5 * n[1], epsilon = 1e-15);
    }

    #[test]
    fn bloch_round_trip() {
        let block = Block::Rank1 {
            x: 0.15,
            v: c(-0.28, 0.96),
        };
        let back = block_from_bloch(block_bloch(&block).unwrap()).unwrap();
        assert!(same_block(&block, &back));
    }

    #[test]
    fn zero_projection_has_zero_measure() {
        let s = one_atom(3.0);
        let m = ProjectionMeasure::state(&s, vec![Mat2::diag(0.2, 0.7)]).unwrap();
        assert_eq!(m.eval(&CanonicalProjection::zero(&s)).unwrap(), 0.0);
    }

    #[test]
    fn state_measure_on_half_projection() {
        let s = one_atom(1.0);
        let m = ProjectionMeasure::state(&s, vec![Mat2::diag(1.0, 0.0)]).unwrap();
        let p = rank1(&s, 0.5, c(0.0, 1.0));
        assert_abs_diff_eq!(m.eval(&p).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn abs_nz_frame_function_on_upper_block() {
        let s = one_atom(2.5);
        let m =
            ProjectionMeasure::frame(&s, vec![FrameFunction::abs_nz(2.0, 1.0).unwrap()]).unwrap();
        let e11 = CanonicalProjection::from_blocks(&s, &[Block::Upper]).unwrap();
        assert_abs_diff_eq!(m.eval(&e11).unwrap(), 2.5, epsilon = 1e-15);
    }

    #[test]
    fn state_rejects_non_psd_blocks() {
        let s = one_atom(1.0);
        assert!(ProjectionMeasure::state(&s, vec![Mat2::diag(1.0, -0.1)]).is_err());
        let mut nh = Mat2::diag(0.5, 0.5);
        nh.0[0][1] = c(0.1, 0.0);
        assert!(ProjectionMeasure::state(&s, vec![nh]).is_err());
    }

    #[test]
    fn base_densities_examples() {
        let s = one_atom(2.0);
        let zero = ProjectionMeasure::state(&s, vec![Mat2::ZERO]).unwrap();
        let d = zero.base_densities().unwrap();
        assert_eq!((d.h.get(0), d.k.get(0)), (0.0, 0.0));

        // m(e11) = 8 with weight 2.
        let m = ProjectionMeasure::state(&s, vec![Mat2::diag(4.0, 1.0)]).unwrap();
        let d = m.base_densities().unwrap();
        assert_abs_diff_eq!(d.h.get(0), 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d.k.get(0), 1.0, epsilon = 1e-15);

        let s1 = one_atom(1.0);
        let m = ProjectionMeasure::state(&s1, vec![Mat2::diag(0.3, 0.7)]).unwrap();
        let d = m.base_densities().unwrap();
        assert_abs_diff_eq!(d.h.get(0), 0.3f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(d.k.get(0), 0.7f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn direction_densities_examples() {
        let s = one_atom(1.0);
        let d = direction(&s, 0.5, c(1.0, 0.0));
        let m = ProjectionMeasure::state(&s, vec![Mat2::diag(1.0, 0.0)]).unwrap();
        let pair = m.densities_for_direction(&d).unwrap();
        assert_abs_diff_eq!(pair.h.get(0), 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(pair.k.get(0), 0.5f64.sqrt(), epsilon = 1e-15);

        let mixed = ProjectionMeasure::state(&s, vec![Mat2::diag(0.5, 0.5)]).unwrap();
        for (x, v) in [(0.1, c(0.0, 1.0)), (0.77, c(-0.6, 0.8))] {
            let pair = mixed.densities_for_direction(&direction(&s, x, v)).unwrap();
            assert_abs_diff_eq!(pair.h.get(0), 0.5f64.sqrt(), epsilon = 1e-15);
            assert_abs_diff_eq!(pair.k.get(0), 0.5f64.sqrt(), epsilon = 1e-15);
        }

        let zero = ProjectionMeasure::state(&s, vec![Mat2::ZERO]).unwrap();
        let pair = zero.densities_for_direction(&d).unwrap();
        assert_eq!((pair.h.get(0), pair.k.get(0)), (0.0, 0.0));
    }

    #[test]
    fn broken_sum_rule_is_not_a_measure() {
        let s = one_atom(1.0);
        let broken = FrameFunction::custom(1.0, Arc::new(|n: [f64; 3]| n[2].abs())).unwrap();
        let m = ProjectionMeasure::frame(&s, vec![broken]).unwrap();
        let d = direction(&s, 0.5, c(1.0, 0.0));
        assert!(matches!(
            m.densities_for_direction(&d),
            Err(Error::NotAMeasure { .. })
        ));
        let report = m.validate(&[rank1(&s, 0.5, c(1.0, 0.0))]);
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| v.atom.as_deref() == Some("a")));
    }

    #[test]
    fn state_measure_validates() {
        let s = AtomicMeasureSpace::new([("a", 1.0), ("b", 0.5)]).unwrap();
        let mut d = Mat2::diag(0.6, 0.4);
        d.0[0][1] = c(0.1, 0.2);
        d.0[1][0] = c(0.1, -0.2);
        let m = ProjectionMeasure::state(&s, vec![d, Mat2::diag(1.0, 2.0)]).unwrap();
        let samples = vec![
            CanonicalProjection::from_blocks(
                &s,
                &[
                    Block::Rank1 {
                        x: 0.4,
                        v: c(0.0, 1.0),
                    },
                    Block::Upper,
                ],
            )
            .unwrap(),
            CanonicalProjection::identity(&s),
            CanonicalProjection::zero(&s),
        ];
        let report = m.validate(&samples);
        assert!(report.is_valid(), "{:?}", report.violations);
        assert_eq!(report.checked, 3);
    }

    #[test]
    fn tabulated_measure_from_state() {
        let s = one_atom(2.0);
        let state = ProjectionMeasure::state(&s, vec![Mat2::diag(0.25, 0.75)]).unwrap();
        let v = c(0.6, 0.8);
        let blocks = [
            Block::Upper,
            Block::Lower,
            Block::Rank1 { x: 0.3, v },
            Block::Rank1 { x: 0.7, v: -v },
        ];
        let entries = blocks
            .iter()
            .map(|b| {
                let p = CanonicalProjection::from_blocks(&s, &[*b]).unwrap();
                let value = state.eval(&p).unwrap();
                (p, value)
            })
            .collect();
        let table = ProjectionMeasure::tabulated(&s, entries).unwrap();
        let p = rank1(&s, 0.3, v);
        assert_abs_diff_eq!(
            table.eval(&p).unwrap(),
            state.eval(&p).unwrap(),
            epsilon = 0.0
        );
        assert_abs_diff_eq!(table.total().unwrap(), 2.0, epsilon = 1e-15);
        assert!(table.validate(&[p.clone(), p.complement()]).is_valid());

        let off = rank1(&s, 0.4, v);
        assert!(matches!(table.eval(&off), Err(Error::Lookup { .. })));
        let report = table.validate(&[off]);
        assert!(report.violations.iter().any(|v| v.check == "lookup"));
    }

    #[test]
    fn tabulated_measure_requires_complements() {
        let s = one_atom(1.0);
        let mk =
            |b: Block, value: f64| (CanonicalProjection::from_blocks(&s, &[b]).unwrap(), value);
        let v = c(1.0, 0.0);
        let missing = vec![
            mk(Block::Upper, 0.5),
            mk(Block::Lower, 0.5),
            mk(Block::Rank1 { x: 0.2, v }, 0.5),
        ];
        assert!(ProjectionMeasure::tabulated(&s, missing).is_err());
        let no_diag = vec![mk(Block::Upper, 0.5)];
        assert!(ProjectionMeasure::tabulated(&s, no_diag).is_err());

        let two = AtomicMeasureSpace::new([("a", 1.0), ("b", 1.0)]).unwrap();
        let spread = CanonicalProjection::identity(&two);
        assert!(ProjectionMeasure::tabulated(&two, vec![(spread, 1.0)]).is_err());
    }

    #[test]
    fn frame_table_closure_and_lookup() {
        let z = [0.0, 0.0, 1.0];
        let x = [1.0, 0.0, 0.0];
        assert!(FrameFunction::table(1.0, vec![(z, 0.5)]).is_err());
        let f = FrameFunction::table(1.0, vec![(z, 0.5), (neg(z), 0.5), (x, 0.2), (neg(x), 0.8)])
            .unwrap();
        assert_eq!(f.value(x), Some(0.2));
        assert_eq!(f.value([0.0, 1.0, 0.0]), None);
    }

    #[test]
    fn frame_family_parameter_ranges() {
        assert!(FrameFunction::abs_nz(1.0, 2.5).is_err());
        assert!(FrameFunction::abs_nz(-1.0, 1.0).is_err());
        assert!(FrameFunction::quadratic(1.0, [1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn quadratic_frame_matches_state() {
        // D = (c/2)(I + b·σ) has frame function (c/2)(1 + b·n).
        let s = one_atom(1.5);
        let b = [0.3, -0.2, 0.5];
        let cst = 1.7;
        let mut d = Mat2::diag(0.5 * cst * (1.0 + b[2]), 0.5 * cst * (1.0 - b[2]));
        d.0[0][1] = c(0.5 * cst * b[0], -0.5 * cst * b[1]);
        d.0[1][0] = d.0[0][1].conj();
        let state = ProjectionMeasure::state(&s, vec![d]).unwrap();
        let frame =
            ProjectionMeasure::frame(&s, vec![FrameFunction::quadratic(cst, b).unwrap()]).unwrap();
        for block in [
            Block::Upper,
            Block::Lower,
            Block::Identity,
            Block::Rank1 {
                x: 0.35,
                v: c(0.0, -1.0),
            },
        ] {
            let p = CanonicalProjection::from_blocks(&s, &[block]).unwrap();
            assert_abs_diff_eq!(
                state.eval(&p).unwrap(),
                frame.eval(&p).unwrap(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn base_densities_integrate_to_total() {
        let s = AtomicMeasureSpace::new([("a", 0.5), ("b", 1.5), ("c", 3.0)]).unwrap();
        let m = ProjectionMeasure::frame(
            &s,
            vec![
                FrameFunction::abs_nz(1.0, 1.0).unwrap(),
                FrameFunction::abs_nz(0.3, -2.0).unwrap(),
                FrameFunction::quadratic(2.0, [0.0, 0.0, 0.4]).unwrap(),
            ],
        )
        .unwrap();
        let d = m.base_densities().unwrap();
        let full = BaseProjection::full(&s);
        let h2 = d.h.map(|h| h * h).unwrap().integrate(&full).unwrap();
        let k2 = d.k.map(|k| k * k).unwrap().integrate(&full).unwrap();
        assert_abs_diff_eq!(h2 + k2, m.total().unwrap(), epsilon = 1e-12);
    }
}
