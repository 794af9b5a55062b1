//! Test-side oracles, written against the Pauli form `P = (I + n·σ)/2` rather
//! than the crate's `(x, v)` parameterization.
#![allow(dead_code)]

use std::path::PathBuf;

use num_complex::Complex64;
use vecmeasure::{Block, CanonicalProjection, Mat2};

pub type M2 = [[Complex64; 2]; 2];

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Bloch vector of the rank-one projector with diagonal `(x, 1−x)` and
/// off-diagonal entry `v·√(x(1−x))`.
pub fn bloch(x: f64, v: Complex64) -> [f64; 3] {
    let vs = v * (x * (1.0 - x)).sqrt();
    [2.0 * vs.re, -2.0 * vs.im, 2.0 * x - 1.0]
}

/// `(I + n·σ)/2`.
pub fn pauli_projector(n: [f64; 3]) -> M2 {
    [
        [c(0.5 * (1.0 + n[2]), 0.0), c(0.5 * n[0], -0.5 * n[1])],
        [c(0.5 * n[0], 0.5 * n[1]), c(0.5 * (1.0 - n[2]), 0.0)],
    ]
}

pub fn block_matrix(block: &Block) -> M2 {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    match block {
        Block::Zero => [[z, z], [z, z]],
        Block::Upper => [[o, z], [z, z]],
        Block::Lower => [[z, z], [z, o]],
        Block::Identity => [[o, z], [z, o]],
        Block::Rank1 { x, v } => pauli_projector(bloch(*x, *v)),
    }
}

pub fn oracle_blocks(p: &CanonicalProjection) -> Vec<M2> {
    p.blocks().iter().map(block_matrix).collect()
}

pub fn mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn add(a: &M2, b: &M2) -> M2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += b[i][j];
        }
    }
    out
}

pub fn sub(a: &M2, b: &M2) -> M2 {
    let mut out = *a;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] -= b[i][j];
        }
    }
    out
}

pub fn max_abs(a: &M2) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn identity() -> M2 {
    block_matrix(&Block::Identity)
}

/// `Re Tr(D·P)`.
pub fn trace_product(d: &Mat2, p: &M2) -> f64 {
    let mut t = c(0.0, 0.0);
    for i in 0..2 {
        for k in 0..2 {
            t += d.0[i][k] * p[k][i];
        }
    }
    t.re
}

/// `D = A·A*/Tr(A·A*)·scale`, a density matrix scaled to trace `scale`.
pub fn density(a: [f64; 8], scale: f64) -> Mat2 {
    let m = [
        [c(a[0], a[1]), c(a[2], a[3])],
        [c(a[4], a[5]), c(a[6], a[7])],
    ];
    let mut d = Mat2::ZERO;
    for i in 0..2 {
        for j in 0..2 {
            d.0[i][j] = m[i][0] * m[j][0].conj() + m[i][1] * m[j][1].conj();
        }
    }
    let tr = (d.0[0][0] + d.0[1][1]).re;
    for row in d.0.iter_mut() {
        for z in row.iter_mut() {
            *z *= scale / tr;
        }
    }
    d
}
