//! Regenerates the JSON fixtures under `fixtures/`.
//!
//! cargo run -p vecmeasure --example make_fixtures -- fixtures

use std::f64::consts::TAU;
use std::fs;
use std::path::PathBuf;

use num_complex::Complex64;
use rand::Rng;
use vecmeasure::io;
use vecmeasure::verify::rng_from_seed;
use vecmeasure::{
    build_vector_measure, AtomicMeasureSpace, BaseProjection, Block, CanonicalProjection,
    Direction, DirectionRegistry, Mat2, ProjectionMeasure, ScalarField, Sign, UnimodularField,
};

fn round(x: f64, digits: i32) -> f64 {
    let scale = 10f64.powi(digits);
    (x * scale).round() / scale
}

fn hermitian(a: f64, b: f64, re: f64, im: f64) -> Mat2 {
    let mut d = Mat2::diag(a, b);
    d.0[0][1] = Complex64::new(re, im);
    d.0[1][0] = Complex64::new(re, -im);
    d
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    fs::create_dir_all(&dir)?;
    let write = |name: &str, text: String| fs::write(dir.join(name), text);

    let space = AtomicMeasureSpace::new([("a", 1.0), ("b", 0.5), ("c", 2.0), ("d", 1.5)])?;
    write("space.json", io::space_to_string(&space))?;

    // Eight directions on a 3-decimal grid. Direction 5 repeats direction 2 at
    // atom `b` (swapped) and direction 7 repeats direction 1 at atom `d`.
    let mut rng = rng_from_seed(2024);
    let mut pairs: Vec<Vec<(f64, f64)>> = (0..8)
        .map(|_| {
            (0..space.len())
                .map(|_| {
                    (
                        round(rng.gen_range(0.05..0.95), 3),
                        round(rng.gen_range(0.0..TAU), 3),
                    )
                })
                .collect()
        })
        .collect();
    let (x, theta) = pairs[1][1];
    pairs[4][1] = (round(1.0 - x, 3), theta + std::f64::consts::PI);
    pairs[6][3] = pairs[0][3];
    let mut registry = DirectionRegistry::empty(&space);
    for p in &pairs {
        let x = ScalarField::new(&space, p.iter().map(|q| q.0).collect())?;
        let v = UnimodularField::new(
            &space,
            p.iter().map(|q| Complex64::from_polar(1.0, q.1)).collect(),
        )?;
        registry.push(Direction::new(x, v)?)?;
    }
    write("registry.json", io::registry_to_string(&registry))?;
    let small = DirectionRegistry::new(&space, registry.directions()[..2].to_vec())?;
    write("registry_2.json", io::registry_to_string(&small))?;

    let densities = vec![
        hermitian(0.6, 0.3, 0.1, -0.2),
        hermitian(0.5, 0.5, 0.0, 0.25),
        hermitian(0.2, 0.7, -0.3, 0.1),
        hermitian(0.9, 0.1, 0.2, 0.1),
    ];
    write(
        "measure_state.json",
        io::state_measure_to_string(&space, &densities),
    )?;

    let constants = [2.0, 1.0, 0.5, 1.2];
    write(
        "measure_frame.json",
        io::abs_nz_measure_to_string(&space, 1.5, &constants),
    )?;

    // Tabulated measure: a second state evaluated on the diagonal blocks and on
    // every registered block and its complement.
    let source = ProjectionMeasure::state(
        &space,
        vec![
            hermitian(0.4, 0.4, 0.2, 0.1),
            hermitian(1.0, 0.2, 0.1, -0.3),
            hermitian(0.3, 0.3, 0.0, 0.0),
            hermitian(0.25, 0.75, -0.1, -0.2),
        ],
    )?;
    let mut entries = Vec::new();
    for atom in 0..space.len() {
        let mut blocks = vec![Block::Upper, Block::Lower];
        for d in registry.directions() {
            for b in [d.block(atom), d.block(atom).complement()] {
                let known = blocks.iter().any(|k| match (k, &b) {
                    (Block::Rank1 { x, v }, Block::Rank1 { x: y, v: w }) => {
                        (x - y).abs() <= 1e-9 && (v - w).norm() <= 1e-9
                    }
                    _ => false,
                });
                if !known {
                    blocks.push(b);
                }
            }
        }
        for b in blocks {
            let mut all = vec![Block::Zero; space.len()];
            all[atom] = b;
            let p = CanonicalProjection::from_blocks(&space, &all)?;
            let value = source.eval(&p)?;
            entries.push((p, value));
        }
    }
    write("measure_table.json", io::table_measure_to_string(&entries))?;

    let d = &registry.directions()[1];
    let pi1 = BaseProjection::from_ids(&space, ["a", "c"])?;
    let pi2 = BaseProjection::from_ids(&space, ["c", "d"])?;
    write(
        "projection.json",
        io::projection_to_string(&d.subalgebra_projection(&pi1, &pi2)?),
    )?;

    let frame = io::load_measure(&space, &dir.join("measure_frame.json"))?;
    let mu = build_vector_measure(&frame, &small, Sign::Plus)?;
    write("golden_frame_2.json", io::artifact_to_string(&mu))?;
    Ok(())
}
