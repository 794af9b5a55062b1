//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod support;

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use support::fixtures;
use vecmeasure::constructor::Origin;
use vecmeasure::io;
use vecmeasure::verify::{
    linear_fit_residual, matrix_oracle_suite, measure_law_suite, random_direction, random_registry,
    rng_from_seed, split_oracle_suite, truncation_suite, LawTolerances, VerificationReport,
};
use vecmeasure::{
    build_vector_measure, BaseProjection, Direction, DirectionRegistry, ProjectionMeasure,
    ScalarField, Sign, Space, UnimodularField, VectorMeasure,
};

const SEED: u64 = 42;
const MEASURES: [&str; 3] = ["state", "frame", "table"];

struct Outcome {
    failures: usize,
}

impl Outcome {
    fn report(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        println!(
            "{} [{id}] {name}: {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            self.failures += 1;
        }
    }
}

struct Fixture {
    name: &'static str,
    m: ProjectionMeasure,
    mu: VectorMeasure,
}

fn load() -> (Space, Vec<Fixture>) {
    let dir = fixtures();
    let space = io::load_space(&dir.join("space.json")).unwrap();
    let registry = io::load_registry(&space, &dir.join("registry.json")).unwrap();
    let fixtures = MEASURES
        .iter()
        .map(|name| {
            let m = io::load_measure(&space, &dir.join(format!("measure_{name}.json"))).unwrap();
            let mu = build_vector_measure(&m, &registry, Sign::Plus).unwrap();
            Fixture { name, m, mu }
        })
        .collect();
    (space, fixtures)
}

fn worst(report: &VerificationReport, check: &str) -> (bool, f64, f64) {
    let r = report.record(check).expect("record present");
    (r.pass, r.max_violation, r.tolerance)
}

/// Criteria 1, 2 and 5 for one measure; returns pass flags and a summary.
fn laws(f: &Fixture) -> ([bool; 3], [String; 3]) {
    let laws = measure_law_suite(&f.m, &f.mu, 1000, SEED, LawTolerances::default());
    let trunc = truncation_suite(&f.m, &f.mu, 100, SEED);
    let (n_ok, n_max, _) = worst(&laws, "norm_law");
    let (o_ok, o_max, _) = worst(&laws, "orthogonality_law");
    let (a_ok, a_max, _) = worst(&laws, "additivity_law");
    let (q_ok, _, _) = worst(&laws, "quadruple_identities");
    let t: Vec<_> = [
        "truncation_identity",
        "truncation_monotone",
        "truncation_final",
    ]
    .iter()
    .map(|c| worst(&trunc, c))
    .collect();
    (
        [n_ok && q_ok, o_ok && a_ok, t.iter().all(|r| r.0)],
        [
            format!("{}: max {n_max:.2e}", f.name),
            format!("{}: |<μp,μq>| {o_max:.2e}, additivity {a_max:.2e}", f.name),
            format!(
                "{}: identity {:.2e}, increase {:.2e}, final {:.2e}",
                f.name, t[0].1, t[1].1, t[2].1
            ),
        ],
    )
}

fn direction(space: &Space, pairs: &[(f64, Complex64)]) -> Direction {
    Direction::new(
        ScalarField::new(space, pairs.iter().map(|p| p.0).collect()).unwrap(),
        UnimodularField::new(space, pairs.iter().map(|p| p.1).collect()).unwrap(),
    )
    .unwrap()
}

/// Registry whose later directions repeat earlier ones at chosen atoms,
/// directly or swapped (`(x, v) ↦ (1 − x, −v)`).
fn coincident_registry(space: &Space) -> (DirectionRegistry, usize) {
    let mut rng = rng_from_seed(SEED);
    let n = space.len();
    let base: Vec<Vec<(f64, Complex64)>> = (0..5)
        .map(|_| {
            let d = random_direction(space, &mut rng);
            (0..n).map(|i| d.pair(i)).collect()
        })
        .collect();
    let swap = |(x, v): (f64, Complex64)| (1.0 - x, -v);
    let mut pairs = base.clone();
    // (direction, atom, source direction, swapped)
    let plan = [
        (1, 0, 0, false),
        (1, 1, 0, true),
        (2, 0, 0, false),
        (2, 2, 1, true),
        (3, 3, 2, false),
        (3, 1, 1, true),
        (4, 0, 3, true),
        (4, 2, 0, false),
    ];
    for &(d, atom, src, swapped) in &plan {
        let p = pairs[src][atom];
        pairs[d][atom] = if swapped { swap(p) } else { p };
    }
    let mut registry = DirectionRegistry::empty(space);
    for p in &pairs {
        registry.push(direction(space, p)).unwrap();
    }
    (registry, plan.len())
}

/// Bitwise agreement of copied quadruples with their sources, and of μ on
/// the shared single-atom subalgebra projections.
fn patching(m: &ProjectionMeasure, registry: &DirectionRegistry) -> (bool, usize) {
    let mu = build_vector_measure(m, registry, Sign::Plus).unwrap();
    let space = registry.space();
    let mut copies = 0;
    let mut ok = true;
    for entry in mu.entries() {
        for (atom, origin) in entry.origins().iter().enumerate() {
            let Origin::Copied { from, swapped } = *origin else {
                continue;
            };
            copies += 1;
            let source = mu.quadruple(from, atom).unwrap();
            let expected = if swapped { source.swapped() } else { source };
            let got = entry.quadruples()[atom];
            ok &= got.to_array().map(f64::to_bits) == expected.to_array().map(f64::to_bits);

            let only = BaseProjection::singleton(space, atom);
            let none = BaseProjection::empty(space);
            let here = entry
                .direction()
                .subalgebra_projection(&only, &none)
                .unwrap();
            let src_dir = registry.get(from).unwrap();
            let there = if swapped {
                src_dir.subalgebra_projection(&none, &only).unwrap()
            } else {
                src_dir.subalgebra_projection(&only, &none).unwrap()
            };
            let (a, b) = (mu.evaluate(&here).unwrap(), mu.evaluate(&there).unwrap());
            ok &= a.first().iter().chain(a.second()).map(|v| v.to_bits()).eq(b
                .first()
                .iter()
                .chain(b.second())
                .map(|v| v.to_bits()));
            ok &= a.first()[atom].to_bits() == expected.h1.to_bits()
                && a.second()[atom].to_bits() == expected.h2.to_bits();
        }
    }
    (ok, copies)
}

fn build_once(dir: &std::path::Path, name: &str, measure: &str, registry: &str) -> Vec<u8> {
    let out = dir.join(name);
    let status = Command::new(env!("CARGO_BIN_EXE_vecmeasure"))
        .current_dir(fixtures())
        .args([
            "build",
            "space.json",
            measure,
            registry,
            "--sign",
            "+1",
            "--out",
        ])
        .arg(&out)
        .status()
        .expect("binary runs");
    assert!(status.success());
    fs::read(out).unwrap()
}

fn main() {
    let mut outcome = Outcome { failures: 0 };
    let (space, fixtures) = load();

    let start = Instant::now();
    let results: Vec<_> = fixtures.iter().map(laws).collect();
    let law_time = start.elapsed();
    let summary = |criterion: usize| -> (bool, String) {
        let pass = results.iter().all(|r| r.0[criterion]);
        let detail: Vec<&str> = results.iter().map(|r| r.1[criterion].as_str()).collect();
        (pass, detail.join("; "))
    };
    let (pass, detail) = summary(0);
    outcome.report(
        1,
        "norm law",
        pass && law_time < Duration::from_secs(10),
        format!("{detail}; laws and truncation for all three measures in {law_time:.2?}"),
    );
    let (pass, detail) = summary(1);
    outcome.report(2, "orthogonality and additivity", pass, detail);

    let matrix = matrix_oracle_suite(&space, SEED, 1000);
    let (o_ok, o_bad, _) = worst(&matrix, "orthogonality_oracle");
    let (s_ok, s_max, _) = worst(&matrix, "orthogonal_sum_oracle");
    let (c_ok, c_max, _) = worst(&matrix, "complement_oracle");
    let (r_ok, r_max, _) = worst(&matrix, "projection_realization");
    outcome.report(
        3,
        "symbolic calculus vs matrix oracle",
        o_ok && s_ok && c_ok && r_ok,
        format!(
            "{o_bad} disagreements, sum {s_max:.2e}, complement {c_max:.2e}, realization {r_max:.2e}{}",
            matrix.notes().iter().map(|n| format!("; {n}")).collect::<String>()
        ),
    );

    let start = Instant::now();
    let split = split_oracle_suite(SEED, 10_000);
    let (a_ok, a_max, _) = worst(&split, "split_oracle_agreement");
    let (i_ok, i_max, _) = worst(&split, "split_identities");
    outcome.report(
        4,
        "split solver vs grid oracle",
        a_ok && i_ok,
        format!(
            "10000 inputs, distance {a_max:.2e} (tol 1e-8), equations {i_max:.2e} (tol 1e-9), {:.2?}",
            start.elapsed()
        ),
    );

    let (pass, detail) = summary(2);
    outcome.report(5, "truncation identity", pass, detail);

    let (registry, planned) = coincident_registry(&space);
    let mut patch_ok = true;
    let mut detail = Vec::new();
    for f in fixtures.iter().filter(|f| f.name != "table") {
        let (ok, copies) = patching(&f.m, &registry);
        patch_ok &= ok && copies >= planned;
        detail.push(format!("{}: {copies} copied quadruples", f.name));
    }
    outcome.report(6, "patching consistency", patch_ok, detail.join("; "));

    let frame = fixtures.iter().find(|f| f.name == "frame").unwrap();
    let state = fixtures.iter().find(|f| f.name == "state").unwrap();
    let frame_laws = results[1].0.iter().all(|&p| p);
    let dirs = random_registry(&space, 64, &mut rng_from_seed(SEED));
    let frame_fit = linear_fit_residual(&frame.m, dirs.directions()).unwrap();
    let state_fit = linear_fit_residual(&state.m, dirs.directions()).unwrap();
    outcome.report(
        7,
        "non-linear witness",
        frame_laws && o_ok && s_ok && a_ok && i_ok && frame_fit > 0.05,
        format!("frame residual {frame_fit:.4} (> 0.05), state residual {state_fit:.1e}, frame laws pass: {frame_laws}"),
    );

    let tmp = tempfile::tempdir().unwrap();
    let mut same = true;
    for m in MEASURES {
        let measure = format!("measure_{m}.json");
        let a = build_once(tmp.path(), "a.json", &measure, "registry.json");
        let b = build_once(tmp.path(), "b.json", &measure, "registry.json");
        same &= a == b;
    }
    let golden = fs::read(support::fixtures().join("golden_frame_2.json")).unwrap();
    let fresh = build_once(
        tmp.path(),
        "g.json",
        "measure_frame.json",
        "registry_2.json",
    );
    outcome.report(
        8,
        "deterministic build",
        same && fresh == golden,
        format!(
            "repeat builds identical: {same}; golden match: {}",
            fresh == golden
        ),
    );

    if outcome.failures > 0 {
        println!("{} criteria failed", outcome.failures);
        std::process::exit(1);
    }
}
