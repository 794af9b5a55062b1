//! Projections of `M ⊗ M₂`, where `M` is the algebra of functions on a finite
//! atomic space.
//!
//! Every projection is kept in the canonical form
//!
//! ```text
//! p = π₁ ⊕ π₂ + p(x, v, π)
//! ```
//!
//! where `π₁ ⊕ π₂` is diagonal and the off-diagonal part `p(x, v, π)` realizes
//! at each atom `ω ∈ π` the rank-one block
//!
//! ```text
//! [ x          v·s ]
//! [ conj(v)·s  1−x ],    s = (x(1−x))^{1/2},  0 < x < 1.
//! ```
//!
//! Atoms whose block is `0`, `diag(1,0)`, `diag(0,1)` or `I` are always held in
//! the diagonal parts; the off-diagonal support never carries `x ∈ {0, 1}`.
//! [`MatrixRealization`] is the explicit per-atom 2×2 realization and serves as
//! the oracle for the symbolic operations here.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::space::{ensure_same, BaseProjection, ScalarField, Space, UnimodularField};
use crate::tolerance;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A 2×2 complex matrix, row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]
        )
    }
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn diag(a: f64, b: f64) -> Self {
        Mat2([[a.into(), ZERO], [ZERO, b.into()]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn hermitian_violation(&self) -> f64 {
        (*self - self.adjoint()).max_abs()
    }

    pub fn idempotence_violation(&self) -> f64 {
        (*self * *self - *self).max_abs()
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1];
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mean - radius, mean + radius]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] -= rhs.0[i][j];
            }
        }
        out
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        out
    }
}

/// The 2×2 block of a projection at a single atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Block {
    Zero,
    /// `diag(1, 0)`
    Upper,
    /// `diag(0, 1)`
    Lower,
    Identity,
    /// Rank-one off-diagonal block with `0 < x < 1`, `|v| = 1`.
    Rank1 {
        x: f64,
        v: Complex64,
    },
}

impl Block {
    pub fn matrix(&self) -> Mat2 {
        match *self {
            Block::Zero => Mat2::ZERO,
            Block::Upper => Mat2::diag(1.0, 0.0),
            Block::Lower => Mat2::diag(0.0, 1.0),
            Block::Identity => Mat2::IDENTITY,
            Block::Rank1 { x, v } => {
                let s = (x * (1.0 - x)).sqrt();
                Mat2([[x.into(), v * s], [v.conj() * s, (1.0 - x).into()]])
            }
        }
    }

    /// `1 − block`
    pub fn complement(&self) -> Block {
        match *self {
            Block::Zero => Block::Identity,
            Block::Upper => Block::Lower,
            Block::Lower => Block::Upper,
            Block::Identity => Block::Zero,
            Block::Rank1 { x, v } => Block::Rank1 { x: 1.0 - x, v: -v },
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Block::Zero => 0,
            Block::Identity => 2,
            _ => 1,
        }
    }
}

/// Per-atom 2×2 matrices realizing an element of `M ⊗ M₂`.
#[derive(Debug, Clone)]
pub struct MatrixRealization {
    space: Space,
    blocks: Vec<Mat2>,
}

impl MatrixRealization {
    pub fn new(space: &Space, blocks: Vec<Mat2>) -> Result<Self> {
        if blocks.len() != space.len() {
            return Err(Error::Structural(format!(
                "{} blocks for a space of {} atoms",
                blocks.len(),
                space.len()
            )));
        }
        Ok(Self {
            space: space.clone(),
            blocks,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn block(&self, atom: usize) -> &Mat2 {
        &self.blocks[atom]
    }

    pub fn blocks(&self) -> &[Mat2] {
        &self.blocks
    }

    pub fn identity(space: &Space) -> Self {
        Self {
            space: space.clone(),
            blocks: vec![Mat2::IDENTITY; space.len()],
        }
    }

    fn zip(&self, other: &Self, op: impl Fn(Mat2, Mat2) -> Mat2) -> Result<Self> {
        ensure_same(&self.space, &other.space)?;
        Ok(Self {
            space: self.space.clone(),
            blocks: self
                .blocks
                .iter()
                .zip(&other.blocks)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        })
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a * b)
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().map(Mat2::max_abs).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.difference(other)?.max_abs())
    }

    pub fn hermitian_violation(&self) -> f64 {
        self.blocks
            .iter()
            .map(Mat2::hermitian_violation)
            .fold(0.0, f64::max)
    }

    pub fn idempotence_violation(&self) -> f64 {
        self.blocks
            .iter()
            .map(Mat2::idempotence_violation)
            .fold(0.0, f64::max)
    }
}

/// A projection of `M ⊗ M₂` in canonical form `π₁ ⊕ π₂ + p(x, v, π)`.
#[derive(Clone, PartialEq)]
pub struct CanonicalProjection {
    pi1: BaseProjection,
    pi2: BaseProjection,
    supp: BaseProjection,
    x: ScalarField,
    v: UnimodularField,
}

impl fmt::Debug for CanonicalProjection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.blocks()).finish()
    }
}

impl CanonicalProjection {
    /// Validates and normalizes a canonical form. Off the support `x` is reset
    /// to 0 and `v` to 1.
    pub fn new(
        pi1: BaseProjection,
        pi2: BaseProjection,
        supp: BaseProjection,
        x: ScalarField,
        v: UnimodularField,
    ) -> Result<Self> {
        let space = supp.space().clone();
        for other in [pi1.space(), pi2.space(), x.space(), v.space()] {
            ensure_same(&space, other)?;
        }
        if !pi1.is_disjoint(&supp)? || !pi2.is_disjoint(&supp)? {
            return Err(Error::Structural(
                "diagonal part overlaps the off-diagonal support".into(),
            ));
        }
        for i in supp.iter() {
            let xi = x.get(i);
            if !(xi > 0.0 && xi < 1.0) {
                return Err(Error::DegenerateOffDiagonal {
                    atom: space.id(i).to_string(),
                    x: xi,
                });
            }
        }
        let x = x.restrict(&supp)?;
        let v = UnimodularField::new(
            &space,
            (0..space.len())
                .map(|i| if supp.contains(i) { v.get(i) } else { ONE })
                .collect(),
        )?;
        Ok(Self {
            pi1,
            pi2,
            supp,
            x,
            v,
        })
    }

    pub fn zero(space: &Space) -> Self {
        Self::diagonal(BaseProjection::empty(space), BaseProjection::empty(space))
            .expect("empty diagonal parts share the space")
    }

    pub fn identity(space: &Space) -> Self {
        Self::diagonal(BaseProjection::full(space), BaseProjection::full(space))
            .expect("full diagonal parts share the space")
    }

    /// `π₁ ⊕ π₂`
    pub fn diagonal(pi1: BaseProjection, pi2: BaseProjection) -> Result<Self> {
        let space = pi1.space().clone();
        Self::new(
            pi1,
            pi2,
            BaseProjection::empty(&space),
            ScalarField::zeros(&space),
            UnimodularField::ones(&space),
        )
    }

    /// `p(x·π, v, π)` with no diagonal part.
    pub fn off_diagonal(supp: BaseProjection, x: ScalarField, v: UnimodularField) -> Result<Self> {
        let space = supp.space().clone();
        Self::new(
            BaseProjection::empty(&space),
            BaseProjection::empty(&space),
            supp,
            x,
            v,
        )
    }

    /// Assembles a projection from per-atom blocks.
    pub fn from_blocks(space: &Space, blocks: &[Block]) -> Result<Self> {
        if blocks.len() != space.len() {
            return Err(Error::Structural(format!(
                "{} blocks for a space of {} atoms",
                blocks.len(),
                space.len()
            )));
        }
        let n = space.len();
        let (mut pi1, mut pi2, mut supp) = (vec![false; n], vec![false; n], vec![false; n]);
        let mut x = vec![0.0; n];
        let mut v = vec![ONE; n];
        for (i, block) in blocks.iter().enumerate() {
            match *block {
                Block::Zero => {}
                Block::Upper => pi1[i] = true,
                Block::Lower => pi2[i] = true,
                Block::Identity => {
                    pi1[i] = true;
                    pi2[i] = true;
                }
                Block::Rank1 { x: xi, v: vi } => {
                    supp[i] = true;
                    x[i] = xi;
                    v[i] = vi;
                }
            }
        }
        Self::new(
            BaseProjection::from_mask(space, pi1)?,
            BaseProjection::from_mask(space, pi2)?,
            BaseProjection::from_mask(space, supp)?,
            ScalarField::new(space, x)?,
            UnimodularField::new(space, v)?,
        )
    }

    pub fn space(&self) -> &Space {
        self.supp.space()
    }

    pub fn pi1(&self) -> &BaseProjection {
        &self.pi1
    }

    pub fn pi2(&self) -> &BaseProjection {
        &self.pi2
    }

    pub fn supp(&self) -> &BaseProjection {
        &self.supp
    }

    pub fn x(&self) -> &ScalarField {
        &self.x
    }

    pub fn v(&self) -> &UnimodularField {
        &self.v
    }

    pub fn block(&self, atom: usize) -> Block {
        if self.supp.contains(atom) {
            return Block::Rank1 {
                x: self.x.get(atom),
                v: self.v.get(atom),
            };
        }
        match (self.pi1.contains(atom), self.pi2.contains(atom)) {
            (false, false) => Block::Zero,
            (true, false) => Block::Upper,
            (false, true) => Block::Lower,
            (true, true) => Block::Identity,
        }
    }

    pub fn blocks(&self) -> Vec<Block> {
        (0..self.space().len()).map(|i| self.block(i)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.pi1.is_empty() && self.pi2.is_empty() && self.supp.is_empty()
    }

    /// Atoms where the projection is non-zero.
    pub fn central_support(&self) -> BaseProjection {
        self.pi1
            .join(&self.pi2)
            .and_then(|d| d.join(&self.supp))
            .expect("components share the space")
    }

    pub fn realize(&self) -> MatrixRealization {
        MatrixRealization {
            space: self.space().clone(),
            blocks: (0..self.space().len())
                .map(|i| self.block(i).matrix())
                .collect(),
        }
    }

    /// `1 − p`
    pub fn complement(&self) -> Self {
        let space = self.space().clone();
        let off = &self.supp;
        let pi1 = self.pi1.join(off).expect("same space").complement();
        let pi2 = self.pi2.join(off).expect("same space").complement();
        let x = ScalarField::new(
            &space,
            (0..space.len())
                .map(|i| {
                    if off.contains(i) {
                        1.0 - self.x.get(i)
                    } else {
                        0.0
                    }
                })
                .collect(),
        )
        .expect("finite values");
        let v = UnimodularField::new(
            &space,
            (0..space.len())
                .map(|i| if off.contains(i) { -self.v.get(i) } else { ONE })
                .collect(),
        )
        .expect("negation keeps modulus");
        Self {
            pi1,
            pi2,
            supp: off.clone(),
            x,
            v,
        }
    }

    /// `p·q = 0`, decided from the canonical data.
    ///
    /// Diagonal parts must be disjoint slot by slot, a diagonal part may not
    /// meet the other's off-diagonal support, and on common off-diagonal atoms
    /// the pairs must be complementary: `y = 1 − x`, `w = −v` (per-atom
    /// absolute tolerance 1e-9).
    pub fn is_orthogonal(&self, other: &Self) -> Result<bool> {
        ensure_same(self.space(), other.space())?;
        let disjoint = |a: &BaseProjection, b: &BaseProjection| a.is_disjoint(b);
        if !disjoint(&self.pi1, &other.pi1)?
            || !disjoint(&self.pi2, &other.pi2)?
            || !disjoint(&self.pi1, &other.supp)?
            || !disjoint(&self.pi2, &other.supp)?
            || !disjoint(&other.pi1, &self.supp)?
            || !disjoint(&other.pi2, &self.supp)?
        {
            return Ok(false);
        }
        let common = self.supp.meet(&other.supp)?;
        let complementary = common.iter().all(|i| {
            complementary_pairs(
                (self.x.get(i), self.v.get(i)),
                (other.x.get(i), other.v.get(i)),
            )
        });
        Ok(complementary)
    }

    /// `p + q` for orthogonal `p`, `q`.
    ///
    /// Common off-diagonal atoms become diagonal (`πρ ⊕ πρ`); the new support
    /// is the symmetric difference of the supports with `(x, v)` taken from
    /// whichever operand owns each atom.
    pub fn add_orthogonal(&self, other: &Self) -> Result<Self> {
        if !self.is_orthogonal(other)? {
            return Err(Error::Precondition(
                "add_orthogonal called on non-orthogonal projections".into(),
            ));
        }
        let space = self.space().clone();
        let common = self.supp.meet(&other.supp)?;
        let pi1 = self.pi1.join(&other.pi1)?.join(&common)?;
        let pi2 = self.pi2.join(&other.pi2)?.join(&common)?;
        let supp = self.supp.sym_diff(&other.supp)?;
        let pick = |i: usize| {
            if self.supp.contains(i) {
                Some((self.x.get(i), self.v.get(i)))
            } else if other.supp.contains(i) {
                Some((other.x.get(i), other.v.get(i)))
            } else {
                None
            }
        };
        let (mut z, mut u) = (vec![0.0; space.len()], vec![ONE; space.len()]);
        for i in supp.iter() {
            let (zi, ui) = pick(i).expect("support atom belongs to an operand");
            z[i] = zi;
            u[i] = ui;
        }
        Self::new(
            pi1,
            pi2,
            supp,
            ScalarField::new(&space, z)?,
            UnimodularField::new(&space, u)?,
        )
    }
}

/// `(y, w) = (1 − x, −v)` within the per-atom pair tolerance.
pub fn complementary_pairs(a: (f64, Complex64), b: (f64, Complex64)) -> bool {
    (b.0 - (1.0 - a.0)).abs() <= tolerance::PAIR && (b.1 + a.1).norm() <= tolerance::PAIR
}

/// `(y, w) = (x, v)` within the per-atom pair tolerance.
pub fn equal_pairs(a: (f64, Complex64), b: (f64, Complex64)) -> bool {
    (b.0 - a.0).abs() <= tolerance::PAIR && (b.1 - a.1).norm() <= tolerance::PAIR
}
