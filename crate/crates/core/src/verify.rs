//! Independent checks of the projection calculus and of the constructed `μ`.
//!
//! * [`matrix_oracle_suite`] compares the symbolic orthogonality test, sum and
//!   complement against explicit 2×2 matrix arithmetic.
//! * [`split_oracle`] finds the solutions of the splitting problem by a dense
//!   angular grid scan refined by bisection, without using the closed form.
//! * [`measure_law_suite`] checks the norm, orthogonality and additivity laws
//!   of `μ` on seeded random projections of the registered subalgebras.
//! * [`truncation_check`] checks `‖μ(1) − Σ_{j∈σ} μ(p_j)‖² = m(1) − Σ_{j∈σ} m(p_j)`
//!   on every prefix `σ` of a decomposition of the identity.
//! * [`linear_fit_residual`] measures how far a measure is from any linear
//!   functional `P ↦ Tr(AP)`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{Block, CanonicalProjection, MatrixRealization};
use crate::constructor::{
    solve_split, Direction, DirectionRegistry, HVector, Origin, Sign, VectorMeasure,
};
use crate::error::{Error, Result};
use crate::measure::{block_bloch, ProjectionMeasure};
use crate::space::{ScalarField, Space, UnimodularField};
use crate::tolerance;

/// Seeded generator used by every randomized check.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One line of a verification report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub check: String,
    pub seed: u64,
    pub max_violation: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Short description of what was checked (not part of the line format).
    #[serde(skip)]
    pub inputs: String,
}

#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    records: Vec<CheckRecord>,
    notes: Vec<String>,
}

impl VerificationReport {
    pub fn push(
        &mut self,
        check: impl Into<String>,
        seed: u64,
        max_violation: f64,
        tolerance: f64,
        inputs: impl Into<String>,
    ) {
        self.records.push(CheckRecord {
            check: check.into(),
            seed,
            max_violation,
            tolerance,
            pass: max_violation <= tolerance,
            inputs: inputs.into(),
        });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.records.extend(other.records);
        self.notes.extend(other.notes);
    }

    pub fn records(&self) -> &[CheckRecord] {
        &self.records
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn record(&self, check: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.check == check)
    }

    pub fn all_pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    /// Line-delimited JSON, one record per line.
    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }
}

/// Running maximum that keeps NaN as a failure.
#[derive(Debug, Clone, Copy, Default)]
struct MaxTracker(f64);

impl MaxTracker {
    fn observe(&mut self, value: f64) {
        if value.is_nan() {
            self.0 = f64::INFINITY;
        } else if value > self.0 {
            self.0 = value;
        }
    }
}

// ---------------------------------------------------------------------------
// Random inputs

fn random_phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

fn random_x<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(0.05..0.95)
}

/// A direction with `x` uniform in `(0.05, 0.95)` and `v` uniform on the circle.
pub fn random_direction<R: Rng>(space: &Space, rng: &mut R) -> Direction {
    let x = (0..space.len()).map(|_| random_x(rng)).collect();
    let v = (0..space.len()).map(|_| random_phase(rng)).collect();
    Direction::new(
        ScalarField::new(space, x).expect("finite"),
        UnimodularField::new(space, v).expect("unit phases"),
    )
    .expect("x in (0.05, 0.95)")
}

/// `n` random directions registered in order.
pub fn random_registry<R: Rng>(space: &Space, n: usize, rng: &mut R) -> DirectionRegistry {
    let mut registry = DirectionRegistry::empty(space);
    while registry.len() < n {
        // Continuous draws never coincide everywhere; the check is kept for completeness.
        let _ = registry.push(random_direction(space, rng));
    }
    registry
}

/// Any block: diagonal kinds or a random rank-one block.
pub fn random_block<R: Rng>(rng: &mut R) -> Block {
    match rng.gen_range(0..5) {
        0 => Block::Zero,
        1 => Block::Upper,
        2 => Block::Lower,
        3 => Block::Identity,
        _ => Block::Rank1 {
            x: random_x(rng),
            v: random_phase(rng),
        },
    }
}

/// A block from the diagonal subalgebra or from a registered subalgebra.
pub fn random_registered_block<R: Rng>(
    registry: &DirectionRegistry,
    atom: usize,
    rng: &mut R,
) -> Block {
    let kinds = if registry.is_empty() { 4 } else { 6 };
    match rng.gen_range(0..kinds) {
        0 => Block::Zero,
        1 => Block::Upper,
        2 => Block::Lower,
        3 => Block::Identity,
        k => {
            let d = registry
                .directions()
                .choose(rng)
                .expect("non-empty registry");
            if k == 4 {
                d.block(atom)
            } else {
                d.block(atom).complement()
            }
        }
    }
}

/// A random block `q` with `block · q = 0`.
fn orthogonal_block<R: Rng>(
    block: &Block,
    fresh: impl FnOnce(&mut R) -> Block,
    rng: &mut R,
) -> Block {
    match block {
        Block::Zero => fresh(rng),
        Block::Identity => Block::Zero,
        other => {
            if rng.gen_bool(0.5) {
                Block::Zero
            } else {
                other.complement()
            }
        }
    }
}

pub fn random_projection<R: Rng>(space: &Space, rng: &mut R) -> CanonicalProjection {
    let blocks: Vec<Block> = (0..space.len()).map(|_| random_block(rng)).collect();
    CanonicalProjection::from_blocks(space, &blocks).expect("valid random blocks")
}

pub fn random_registered_projection<R: Rng>(
    registry: &DirectionRegistry,
    rng: &mut R,
) -> CanonicalProjection {
    let space = registry.space();
    let blocks: Vec<Block> = (0..space.len())
        .map(|atom| random_registered_block(registry, atom, rng))
        .collect();
    CanonicalProjection::from_blocks(space, &blocks).expect("valid registered blocks")
}

/// A random projection orthogonal to `p`, with rank-one parts drawn from the registry.
pub fn random_registered_partner<R: Rng>(
    registry: &DirectionRegistry,
    p: &CanonicalProjection,
    rng: &mut R,
) -> CanonicalProjection {
    let space = registry.space();
    let blocks: Vec<Block> = (0..space.len())
        .map(|atom| {
            orthogonal_block(
                &p.block(atom),
                |r: &mut R| random_registered_block(registry, atom, r),
                rng,
            )
        })
        .collect();
    CanonicalProjection::from_blocks(space, &blocks).expect("valid partner blocks")
}

fn random_partner<R: Rng>(p: &CanonicalProjection, rng: &mut R) -> CanonicalProjection {
    let blocks: Vec<Block> = p
        .blocks()
        .iter()
        .map(|b| orthogonal_block(b, |r: &mut R| random_block(r), rng))
        .collect();
    CanonicalProjection::from_blocks(p.space(), &blocks).expect("valid partner blocks")
}

/// Splits the identity into `parts` mutually orthogonal projections from the
/// diagonal and registered subalgebras. At each atom the identity is kept
/// whole or split into a complementary rank-one pair, and the pieces are
/// assigned to random parts.
pub fn random_decomposition<R: Rng>(
    registry: &DirectionRegistry,
    parts: usize,
    rng: &mut R,
) -> Vec<CanonicalProjection> {
    let space = registry.space();
    let mut blocks = vec![vec![Block::Zero; space.len()]; parts];
    for atom in 0..space.len() {
        let split = if registry.is_empty() { 2 } else { 3 };
        let pieces = match rng.gen_range(0..split) {
            0 => vec![Block::Identity],
            1 => vec![Block::Upper, Block::Lower],
            _ => {
                let d = registry
                    .directions()
                    .choose(rng)
                    .expect("non-empty registry");
                vec![d.block(atom), d.block(atom).complement()]
            }
        };
        let mut slots: Vec<usize> = (0..parts).collect();
        slots.shuffle(rng);
        for (piece, slot) in pieces.into_iter().zip(slots) {
            blocks[slot][atom] = piece;
        }
    }
    blocks
        .iter()
        .map(|b| CanonicalProjection::from_blocks(space, b).expect("valid decomposition blocks"))
        .collect()
}

// ---------------------------------------------------------------------------
// Splitting oracle

/// Grid resolution of [`split_oracle`].
pub const ORACLE_GRID: usize = 1_000_000;
const ORACLE_BLOCK: usize = 1_000;
/// Acceptance threshold on `|‖V₀ − P‖ − μ|` for refined points.
pub const ORACLE_RESIDUAL: f64 = 1e-10;

/// Points `P = (λ₁, λ₂)` with `|P| = λ` and `|V₀ − P| = μ`, `V₀ = (λ₀, μ₀)`.
///
/// `P` is parameterized as `λ(cos θ, sin θ)`. The sign of `|V₀ − P|² − μ²` is
/// scanned over [`ORACLE_GRID`] equally spaced angles; every sign change is
/// refined by bisection, and points whose residual `|‖V₀ − P‖ − μ|` is below
/// [`ORACLE_RESIDUAL`] are returned. If the scan finds no sign change, the
/// neighbourhood of the grid minimum is rescanned more finely (the two
/// crossings may share one grid cell, or touch tangentially).
pub fn split_oracle(lambda0: f64, mu0: f64, lambda: f64, mu: f64) -> Vec<[f64; 2]> {
    let residual = |p: [f64; 2]| ((lambda0 - p[0]).hypot(mu0 - p[1]) - mu).abs();
    if lambda <= 0.0 {
        let origin = [0.0, 0.0];
        return if residual(origin) < ORACLE_RESIDUAL {
            vec![origin]
        } else {
            Vec::new()
        };
    }
    let point = |theta: f64| [lambda * theta.cos(), lambda * theta.sin()];
    let gap = |theta: f64| {
        let p = point(theta);
        let (dx, dy) = (lambda0 - p[0], mu0 - p[1]);
        dx * dx + dy * dy - mu * mu
    };

    let mut brackets = coarse_sign_changes(lambda0, mu0, lambda, mu);
    if brackets.is_empty() {
        brackets = refine_near_minimum(&gap);
    }

    let mut found: Vec<[f64; 2]> = Vec::new();
    for (lo, hi) in brackets {
        let theta = bisect(&gap, lo, hi);
        let p = point(theta);
        if residual(p) < ORACLE_RESIDUAL {
            push_distinct(&mut found, p);
        }
    }
    if found.is_empty() {
        // Tangency: minimize the residual directly around the grid minimum.
        let step = TAU / ORACLE_GRID as f64;
        let centre = grid_argmin(&gap);
        let theta = golden_min(
            |t| residual(point(t)),
            centre - 2.0 * step,
            centre + 2.0 * step,
        );
        let p = point(theta);
        if residual(p) < ORACLE_RESIDUAL {
            found.push(p);
        }
    }
    found
}

fn push_distinct(found: &mut Vec<[f64; 2]>, p: [f64; 2]) {
    if !found
        .iter()
        .any(|q| (q[0] - p[0]).hypot(q[1] - p[1]) < 1e-9)
    {
        found.push(p);
    }
}

/// Sign changes of `g(θ) = λ₀² + μ₀² + λ² − μ² − 2λ(λ₀ cos θ + μ₀ sin θ)` between
/// consecutive grid angles (wrapping around). The grid is walked in blocks;
/// inside a block the angle-addition formulas use a small precomputed table.
fn coarse_sign_changes(lambda0: f64, mu0: f64, lambda: f64, mu: f64) -> Vec<(f64, f64)> {
    thread_local! {
        static TABLE: (Vec<f64>, Vec<f64>) = {
            let step = TAU / ORACLE_GRID as f64;
            (0..ORACLE_BLOCK)
                .map(|k| ((k as f64 * step).cos(), (k as f64 * step).sin()))
                .unzip()
        };
    }
    let step = TAU / ORACLE_GRID as f64;
    let constant = lambda0 * lambda0 + mu0 * mu0 + lambda * lambda - mu * mu;
    let scale = 2.0 * lambda;
    let blocks = ORACLE_GRID / ORACLE_BLOCK;

    TABLE.with(|(cos_k, sin_k)| {
        let value_at = |b: usize, k: usize| {
            let start = (b * ORACLE_BLOCK) as f64 * step;
            let (sb, cb) = start.sin_cos();
            let p = scale * (lambda0 * cb + mu0 * sb);
            let q = scale * (mu0 * cb - lambda0 * sb);
            constant - p * cos_k[k] - q * sin_k[k]
        };
        let first_positive = value_at(0, 0) > 0.0;
        let mut prev_positive = first_positive;
        let mut out = Vec::new();
        for b in 0..blocks {
            let start = (b * ORACLE_BLOCK) as f64 * step;
            let (sb, cb) = start.sin_cos();
            let p = scale * (lambda0 * cb + mu0 * sb);
            let q = scale * (mu0 * cb - lambda0 * sb);
            let positives: usize = cos_k
                .iter()
                .zip(sin_k.iter())
                .map(|(c, s)| (constant - p * c - q * s > 0.0) as usize)
                .sum();
            let uniform = positives == 0 || positives == ORACLE_BLOCK;
            if uniform && (positives > 0) == prev_positive {
                continue;
            }
            for k in 0..ORACLE_BLOCK {
                let positive = constant - p * cos_k[k] - q * sin_k[k] > 0.0;
                if positive != prev_positive {
                    let j = b * ORACLE_BLOCK + k;
                    out.push(((j as f64 - 1.0) * step, j as f64 * step));
                }
                prev_positive = positive;
            }
        }
        if prev_positive != first_positive {
            out.push((TAU - step, TAU));
        }
        out
    })
}

fn grid_argmin(gap: &impl Fn(f64) -> f64) -> f64 {
    let step = TAU / ORACLE_GRID as f64;
    let mut best = (f64::INFINITY, 0.0);
    for j in 0..ORACLE_GRID {
        let theta = j as f64 * step;
        let g = gap(theta);
        if g < best.0 {
            best = (g, theta);
        }
    }
    best.1
}

/// Rescans `[θ* − δ, θ* + δ]` around the grid minimum with progressively finer
/// grids until a sign change shows up.
fn refine_near_minimum(gap: &impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
    let mut centre = grid_argmin(gap);
    let mut half_width = TAU / ORACLE_GRID as f64;
    const SUBDIVISIONS: usize = 10_000;
    for _ in 0..4 {
        let (lo, hi) = (centre - half_width, centre + half_width);
        let step = (hi - lo) / SUBDIVISIONS as f64;
        let mut out = Vec::new();
        let mut best = (f64::INFINITY, centre);
        let mut prev = gap(lo);
        for k in 1..=SUBDIVISIONS {
            let theta = lo + k as f64 * step;
            let g = gap(theta);
            if (g > 0.0) != (prev > 0.0) {
                out.push((theta - step, theta));
            }
            if g < best.0 {
                best = (g, theta);
            }
            prev = g;
        }
        if !out.is_empty() {
            return out;
        }
        centre = best.1;
        half_width = 2.0 * step;
    }
    Vec::new()
}

fn bisect(gap: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let lo_positive = gap(lo) > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (gap(mid) > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        if b - a <= f64::EPSILON * a.abs().max(1.0) {
            break;
        }
    }
    0.5 * (a + b)
}

/// A feasible input `(λ₀, μ₀, λ, μ)` with `λ₀² + μ₀² = λ² + μ²`.
pub fn random_feasible_split<R: Rng>(rng: &mut R) -> [f64; 4] {
    let lambda0: f64 = rng.gen_range(0.0..2.0);
    let mu0: f64 = rng.gen_range(0.0..2.0);
    let radius = (lambda0 * lambda0 + mu0 * mu0).sqrt();
    let t: f64 = rng.gen_range(0.0..PI / 2.0);
    [lambda0, mu0, radius * t.cos(), radius * t.sin()]
}

/// Checks the closed-form splitting against the oracle for one input, both signs.
/// Returns `(distance to nearest oracle point, largest identity residual)`.
pub fn split_against_oracle(input: [f64; 4]) -> Result<(f64, f64)> {
    let [l0, m0, l, m] = input;
    let oracle = split_oracle(l0, m0, l, m);
    let mut distance: f64 = 0.0;
    let mut residual: f64 = 0.0;
    for sign in [Sign::Plus, Sign::Minus] {
        let q = solve_split(l0, m0, l, m, sign)?;
        let nearest = oracle
            .iter()
            .map(|p| (p[0] - q.h1).hypot(p[1] - q.h2))
            .fold(f64::INFINITY, f64::min);
        distance = distance.max(nearest);
        residual = residual.max(q.max_residual(l0, m0, l, m));
    }
    Ok((distance, residual))
}

/// Runs [`split_against_oracle`] on `trials` seeded feasible inputs.
pub fn split_oracle_suite(seed: u64, trials: usize) -> VerificationReport {
    let mut rng = rng_from_seed(seed);
    let mut distance = MaxTracker::default();
    let mut residual = MaxTracker::default();
    for _ in 0..trials {
        match split_against_oracle(random_feasible_split(&mut rng)) {
            Ok((d, r)) => {
                distance.observe(d);
                residual.observe(r);
            }
            Err(_) => {
                distance.observe(f64::INFINITY);
                residual.observe(f64::INFINITY);
            }
        }
    }
    let mut report = VerificationReport::default();
    let inputs = format!("{trials} feasible inputs");
    report.push(
        "split_oracle_agreement",
        seed,
        distance.0,
        1e-8,
        inputs.clone(),
    );
    report.push(
        "split_identities",
        seed,
        residual.0,
        tolerance::MEASURE,
        inputs,
    );
    report
}

// ---------------------------------------------------------------------------
// Matrix oracle

/// Matrix-level checks of realization, orthogonality, sums and complements on
/// seeded random projections (plus `0` and `1`).
pub fn matrix_oracle_suite(space: &Space, seed: u64, trials: usize) -> VerificationReport {
    matrix_oracle_suite_with(space, seed, trials, |p, q| p.add_orthogonal(q))
}

/// [`matrix_oracle_suite`] with a replaceable sum, for fault injection.
pub fn matrix_oracle_suite_with<F>(
    space: &Space,
    seed: u64,
    trials: usize,
    add: F,
) -> VerificationReport
where
    F: Fn(&CanonicalProjection, &CanonicalProjection) -> Result<CanonicalProjection>,
{
    let mut rng = rng_from_seed(seed);
    let mut pairs = vec![
        (
            CanonicalProjection::zero(space),
            CanonicalProjection::identity(space),
        ),
        (
            CanonicalProjection::identity(space),
            CanonicalProjection::zero(space),
        ),
        (
            CanonicalProjection::zero(space),
            CanonicalProjection::zero(space),
        ),
    ];
    for _ in 0..trials {
        let p = random_projection(space, &mut rng);
        let q = if rng.gen_bool(0.5) {
            random_partner(&p, &mut rng)
        } else {
            random_projection(space, &mut rng)
        };
        pairs.push((p, q));
    }

    let identity = MatrixRealization::identity(space);
    let mut realization = MaxTracker::default();
    let mut disagreements = 0usize;
    let mut boundary = 0usize;
    let mut sum_err = MaxTracker::default();
    let mut complement_err = MaxTracker::default();

    for (p, q) in &pairs {
        let (rp, rq) = (p.realize(), q.realize());
        for r in [&rp, &rq] {
            realization.observe(r.hermitian_violation().max(r.idempotence_violation()));
        }

        let product = rp.product(&rq).expect("same space").max_abs();
        let symbolic = p.is_orthogonal(q).expect("same space");
        if product > tolerance::PAIR && product < 1e-6 {
            boundary += 1;
        } else if symbolic != (product <= tolerance::PAIR) {
            disagreements += 1;
        }

        if symbolic {
            match add(p, q) {
                Ok(sum) => {
                    let oracle = rp.sum(&rq).expect("same space");
                    let rs = sum.realize();
                    sum_err.observe(rs.max_abs_diff(&oracle).expect("same space"));
                    realization.observe(rs.hermitian_violation().max(rs.idempotence_violation()));
                }
                Err(_) => sum_err.observe(f64::INFINITY),
            }
        }

        let comp = p.complement();
        let oracle = identity.difference(&rp).expect("same space");
        let mut err = comp.realize().max_abs_diff(&oracle).expect("same space");
        if !p.is_orthogonal(&comp).expect("same space") {
            err = f64::INFINITY;
        }
        match p.add_orthogonal(&comp) {
            Ok(total) if total == CanonicalProjection::identity(space) => {}
            _ => err = f64::INFINITY,
        }
        complement_err.observe(err);
    }

    let mut report = VerificationReport::default();
    let inputs = format!("{} pairs over {} atoms", pairs.len(), space.len());
    report.push(
        "projection_realization",
        seed,
        realization.0,
        tolerance::MATRIX,
        inputs.clone(),
    );
    report.push(
        "orthogonality_oracle",
        seed,
        disagreements as f64,
        0.0,
        inputs.clone(),
    );
    report.push(
        "orthogonal_sum_oracle",
        seed,
        sum_err.0,
        tolerance::MATRIX,
        inputs.clone(),
    );
    report.push(
        "complement_oracle",
        seed,
        complement_err.0,
        tolerance::MATRIX,
        inputs,
    );
    if boundary > 0 {
        report.note(format!(
            "orthogonality_oracle: {boundary} boundary trials excluded (product in (1e-9, 1e-6))"
        ));
    }
    report
}

// ---------------------------------------------------------------------------
// Laws of the constructed measure

/// Tolerances of [`measure_law_suite`].
#[derive(Debug, Clone, Copy)]
pub struct LawTolerances {
    /// Relative to `max(1, m(1))`.
    pub norm: f64,
    pub orthogonality: f64,
    pub additivity: f64,
}

impl Default for LawTolerances {
    fn default() -> Self {
        Self {
            norm: tolerance::NORM_LAW,
            orthogonality: tolerance::NORM_LAW,
            additivity: tolerance::ADDITIVITY,
        }
    }
}

/// Largest residual of the stored quadruples against the densities of `m`.
pub fn quadruple_residual(m: &ProjectionMeasure, mu: &VectorMeasure) -> Result<f64> {
    let base = mu.base();
    let mut worst = MaxTracker::default();
    for entry in mu.entries() {
        let densities = m.densities_for_direction(entry.direction())?;
        for (atom, q) in entry.quadruples().iter().enumerate() {
            worst.observe(q.max_residual(
                base.h.get(atom),
                base.k.get(atom),
                densities.h.get(atom),
                densities.k.get(atom),
            ));
        }
    }
    Ok(worst.0)
}

/// Deterministic decomposition of `1` into four parts: `π₁ ⊕ 0`,
/// `p(xπ, v, π)`, `p((1−x)π, −v, π)`, `0 ⊕ π₂` where `π` is the set of atoms
/// given to the first registered direction (every other atom) and
/// `π₁ = π₂ = 1 − π`.
pub fn standard_decomposition(registry: &DirectionRegistry) -> Vec<CanonicalProjection> {
    let space = registry.space();
    let n = space.len();
    let off: Vec<bool> = match registry.directions().first() {
        Some(_) => (0..n).map(|i| i % 2 == 0).collect(),
        None => vec![false; n],
    };
    let block = |atom: usize, part: usize| -> Block {
        if off[atom] {
            let d = &registry.directions()[0];
            match part {
                1 => d.block(atom),
                2 => d.block(atom).complement(),
                _ => Block::Zero,
            }
        } else {
            match part {
                0 => Block::Upper,
                3 => Block::Lower,
                _ => Block::Zero,
            }
        }
    };
    (0..4)
        .map(|part| {
            let blocks: Vec<Block> = (0..n).map(|atom| block(atom, part)).collect();
            CanonicalProjection::from_blocks(space, &blocks).expect("valid blocks")
        })
        .collect()
}

/// Norm, orthogonality and additivity laws of `μ` on seeded random
/// projections of the registered subalgebras, complete decompositions of `1`,
/// and the stored quadruple identities.
pub fn measure_law_suite(
    m: &ProjectionMeasure,
    mu: &VectorMeasure,
    trials: usize,
    seed: u64,
    tol: LawTolerances,
) -> VerificationReport {
    let registry = mu.registry();
    let space = registry.space().clone();
    let mut rng = rng_from_seed(seed);
    let mut report = VerificationReport::default();
    let total = m.total().unwrap_or(f64::NAN);
    let norm_scale = total.abs().max(1.0);

    let mut norm = MaxTracker::default();
    let mut norm_check = |p: &CanonicalProjection| match (mu.evaluate(p), m.eval(p)) {
        (Ok(v), Ok(value)) => norm.observe((v.norm_sq() - value).abs() / norm_scale),
        _ => norm.observe(f64::INFINITY),
    };
    let mut fixed = vec![
        CanonicalProjection::zero(&space),
        CanonicalProjection::identity(&space),
    ];
    for atom in 0..space.len() {
        for block in [Block::Upper, Block::Lower] {
            let mut blocks = vec![Block::Zero; space.len()];
            blocks[atom] = block;
            fixed.push(CanonicalProjection::from_blocks(&space, &blocks).expect("valid"));
        }
    }
    for d in registry.directions() {
        let full = crate::space::BaseProjection::full(&space);
        let empty = crate::space::BaseProjection::empty(&space);
        fixed.push(d.subalgebra_projection(&full, &empty).expect("same space"));
        fixed.push(d.subalgebra_projection(&empty, &full).expect("same space"));
    }
    for p in &fixed {
        norm_check(p);
    }
    for _ in 0..trials {
        let p = random_registered_projection(&registry, &mut rng);
        norm_check(&p);
    }
    report.push(
        "norm_law",
        seed,
        norm.0,
        tol.norm,
        format!(
            "{} projections, relative to max(1, m(1))",
            fixed.len() + trials
        ),
    );

    let mut ortho = MaxTracker::default();
    let mut additive = MaxTracker::default();
    for _ in 0..trials {
        let p = random_registered_projection(&registry, &mut rng);
        let q = random_registered_partner(&registry, &p, &mut rng);
        let sum = p.add_orthogonal(&q);
        match (
            mu.evaluate(&p),
            mu.evaluate(&q),
            sum.and_then(|s| mu.evaluate(&s)),
        ) {
            (Ok(a), Ok(b), Ok(s)) => {
                ortho.observe(a.inner(&b).expect("same space").abs());
                let diff = s.sub(&a).and_then(|d| d.sub(&b)).expect("same space");
                additive.observe(diff.norm_sq().sqrt());
            }
            _ => {
                ortho.observe(f64::INFINITY);
                additive.observe(f64::INFINITY);
            }
        }
    }

    let mut decompositions = vec![standard_decomposition(&registry)];
    for _ in 0..trials / 10 {
        let parts = rng.gen_range(3..=8);
        decompositions.push(random_decomposition(&registry, parts, &mut rng));
    }
    let one = mu.evaluate(&CanonicalProjection::identity(&space));
    for parts in &decompositions {
        let values: Result<Vec<HVector>> = parts.iter().map(|p| mu.evaluate(p)).collect();
        match (&one, values) {
            (Ok(one), Ok(values)) => {
                for i in 0..values.len() {
                    for j in i + 1..values.len() {
                        ortho.observe(values[i].inner(&values[j]).expect("same space").abs());
                    }
                }
                let mut sum = HVector::zero(&space);
                for v in &values {
                    sum = sum.add(v).expect("same space");
                }
                additive.observe(sum.sub(one).expect("same space").norm_sq().sqrt());
            }
            _ => {
                ortho.observe(f64::INFINITY);
                additive.observe(f64::INFINITY);
            }
        }
    }
    let inputs = format!(
        "{trials} orthogonal pairs, {} decompositions",
        decompositions.len()
    );
    report.push(
        "orthogonality_law",
        seed,
        ortho.0,
        tol.orthogonality,
        inputs.clone(),
    );
    report.push("additivity_law", seed, additive.0, tol.additivity, inputs);

    let quad = quadruple_residual(m, mu).unwrap_or(f64::INFINITY);
    report.push(
        "quadruple_identities",
        seed,
        quad,
        tolerance::MEASURE,
        format!("{} directions", registry.len()),
    );
    report
}

/// Outcome of [`truncation_check`]: the report and the deficit sequence
/// `m(1) − Σ_{j∈σ} m(p_j)` over prefixes `σ` (starting with the empty prefix).
#[derive(Debug, Clone)]
pub struct TruncationOutcome {
    pub report: VerificationReport,
    pub deficits: Vec<f64>,
}

/// Checks `‖μ(1) − Σ_{j∈σ} μ(p_j)‖² = m(1) − Σ_{j∈σ} m(p_j)` on every prefix of
/// `decomposition`, that the deficit never increases, and that it ends at 0.
pub fn truncation_check(
    m: &ProjectionMeasure,
    mu: &VectorMeasure,
    decomposition: &[CanonicalProjection],
    seed: u64,
) -> Result<TruncationOutcome> {
    let space = mu.space().clone();
    let mut sum = CanonicalProjection::zero(&space);
    for (i, p) in decomposition.iter().enumerate() {
        for q in &decomposition[i + 1..] {
            if !p.is_orthogonal(q)? {
                return Err(Error::Precondition(
                    "decomposition members are not mutually orthogonal".into(),
                ));
            }
        }
        sum = sum.add_orthogonal(p)?;
    }
    if sum != CanonicalProjection::identity(&space) {
        return Err(Error::Precondition(
            "decomposition does not sum to 1".into(),
        ));
    }

    let total = m.total()?;
    let scale = total.abs().max(1.0);
    let one = mu.evaluate(&CanonicalProjection::identity(&space))?;
    let mut remaining = one.clone();
    let mut deficit = total;
    let mut deficits = vec![total];
    let mut identity = MaxTracker::default();
    identity.observe((remaining.norm_sq() - deficit).abs() / scale);
    let mut increase = MaxTracker::default();
    for p in decomposition {
        remaining = remaining.sub(&mu.evaluate(p)?)?;
        let next = deficit - m.eval(p)?;
        identity.observe((remaining.norm_sq() - next).abs() / scale);
        increase.observe((next - deficit) / scale);
        deficit = next;
        deficits.push(deficit);
    }
    let final_violation = if total > 0.0 {
        deficit.abs() / total
    } else {
        deficit.abs()
    };

    let mut report = VerificationReport::default();
    let inputs = format!("{} parts", decomposition.len());
    report.push(
        "truncation_identity",
        seed,
        identity.0,
        tolerance::MEASURE,
        inputs.clone(),
    );
    report.push(
        "truncation_monotone",
        seed,
        increase.0,
        tolerance::MEASURE,
        inputs.clone(),
    );
    report.push(
        "truncation_final",
        seed,
        final_violation,
        tolerance::MEASURE,
        inputs,
    );
    Ok(TruncationOutcome { report, deficits })
}

/// Runs [`truncation_check`] on `count` seeded decompositions into 3–8 parts
/// and merges the worst cases per check.
pub fn truncation_suite(
    m: &ProjectionMeasure,
    mu: &VectorMeasure,
    count: usize,
    seed: u64,
) -> VerificationReport {
    let registry = mu.registry();
    let mut rng = rng_from_seed(seed);
    let mut decompositions = vec![standard_decomposition(&registry)];
    for _ in 0..count {
        let parts = rng.gen_range(3..=8);
        decompositions.push(random_decomposition(&registry, parts, &mut rng));
    }
    let names = [
        "truncation_identity",
        "truncation_monotone",
        "truncation_final",
    ];
    let mut worst = [MaxTracker::default(); 3];
    for parts in &decompositions {
        match truncation_check(m, mu, parts, seed) {
            Ok(outcome) => {
                for (tracker, name) in worst.iter_mut().zip(names) {
                    let record = outcome.report.record(name).expect("record present");
                    tracker.observe(record.max_violation);
                }
            }
            Err(_) => worst.iter_mut().for_each(|t| t.observe(f64::INFINITY)),
        }
    }
    let mut report = VerificationReport::default();
    for (tracker, name) in worst.iter().zip(names) {
        report.push(
            name,
            seed,
            tracker.0,
            tolerance::MEASURE,
            format!("{} decompositions", decompositions.len()),
        );
    }
    report
}

/// For every solved quadruple of `μ`, checks that `(h₁, h₂)` lies in the
/// oracle's solution set within 1e-8.
pub fn split_spot_checks(
    m: &ProjectionMeasure,
    mu: &VectorMeasure,
    seed: u64,
) -> VerificationReport {
    let base = mu.base();
    let mut distance = MaxTracker::default();
    let mut count = 0;
    for entry in mu.entries() {
        let densities = match m.densities_for_direction(entry.direction()) {
            Ok(d) => d,
            Err(_) => {
                distance.observe(f64::INFINITY);
                continue;
            }
        };
        for (atom, (q, origin)) in entry.quadruples().iter().zip(entry.origins()).enumerate() {
            if *origin != Origin::Solved {
                continue;
            }
            count += 1;
            let oracle = split_oracle(
                base.h.get(atom),
                base.k.get(atom),
                densities.h.get(atom),
                densities.k.get(atom),
            );
            let nearest = oracle
                .iter()
                .map(|p| (p[0] - q.h1).hypot(p[1] - q.h2))
                .fold(f64::INFINITY, f64::min);
            distance.observe(nearest);
        }
    }
    let mut report = VerificationReport::default();
    report.push(
        "split_oracle_spot_checks",
        seed,
        distance.0,
        1e-8,
        format!("{count} solved quadruples"),
    );
    report
}

// ---------------------------------------------------------------------------
// Linear-functional fit

/// Relative least-squares residual of the best fit `m_ω(P) ≈ ν(ω)·Tr(A_ω P)`.
///
/// Per atom, fits the four real parameters of a Hermitian `A_ω` to the values
/// of `m` on `diag(1,0)`, `diag(0,1)` and the rank-one blocks of every direction
/// and its complement. Returns `‖residual‖ / ‖values‖` over all atoms. A state
/// measure gives 0 up to round-off.
pub fn linear_fit_residual(m: &ProjectionMeasure, directions: &[Direction]) -> Result<f64> {
    let space = m.space().clone();
    let mut residual_sq = 0.0;
    let mut value_sq = 0.0;
    for atom in 0..space.len() {
        let weight = space.weight(atom);
        let mut blocks = vec![Block::Upper, Block::Lower];
        for d in directions {
            blocks.push(d.block(atom));
            blocks.push(d.block(atom).complement());
        }
        let rows = blocks.len();
        let mut design = DMatrix::<f64>::zeros(rows, 4);
        let mut target = DVector::<f64>::zeros(rows);
        for (r, block) in blocks.iter().enumerate() {
            let n = block_bloch(block).expect("rank-one block");
            design[(r, 0)] = 1.0;
            design[(r, 1)] = n[0];
            design[(r, 2)] = n[1];
            design[(r, 3)] = n[2];
            target[r] = m.eval_block(atom, block)? / weight;
        }
        let svd = design.clone().svd(true, true);
        let coefficients = svd
            .solve(&target, 1e-12)
            .map_err(|e| Error::Domain(format!("least-squares solve failed: {e}")))?;
        let residual = &design * coefficients - &target;
        residual_sq += weight * residual.norm_squared();
        value_sq += weight * target.norm_squared();
    }
    Ok(if value_sq > 0.0 {
        (residual_sq / value_sq).sqrt()
    } else {
        0.0
    })
}
