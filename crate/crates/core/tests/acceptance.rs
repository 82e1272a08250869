//! End-to-end acceptance gate. Each test prints one pass/fail line; all
//! tolerances are pinned here.

mod common;

use lapgraph::analysis::{self, GrapheneAttach, GrapheneCase};
use lapgraph::graph_model::*;
use lapgraph::oracle;
use lapgraph::spectrum::{self, CheckOutcome};

const GRID: usize = 240;

fn verdict(n: usize, desc: &str, pass: bool) {
    println!(
        "criterion {n:2} [{}]: {desc}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} failed: {desc}");
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn criterion_01_square_lattice_full_interval() {
    let rep = spectrum::report(&square_lattice(), GRID).unwrap();
    let pass = rep.intervals.len() == 1
        && close(rep.intervals[0].0, -1.0, 1e-12)
        && close(rep.intervals[0].1, 1.0, 1e-12)
        && rep.flat_bands.is_empty();
    verdict(1, "square lattice: spectrum [-1,1], no flat bands", pass);
}

#[test]
fn criterion_02_graphene_interval_and_cone() {
    let rep = spectrum::report(&graphene(), GRID).unwrap();
    let interval_ok = rep.intervals.len() == 1
        && close(rep.intervals[0].0, -1.0, 1e-12)
        && close(rep.intervals[0].1, 1.0, 1e-12)
        && rep.flat_bands.is_empty();
    let mut fitted_c: f64 = 0.0;
    for k in 0..24 {
        let ang = 2.0 * std::f64::consts::PI * k as f64 / 24.0;
        for r in [0.05f64, 0.1, 0.2] {
            let res = analysis::dirac_cone_residual([r * ang.cos(), r * ang.sin()]);
            fitted_c = fitted_c.max(res / (r * r));
        }
    }
    verdict(
        2,
        "graphene: spectrum [-1,1], conical residual quadratic with C <= 3",
        interval_ok && fitted_c <= 3.0,
    );
}

#[test]
fn criterion_03_kagome_matches_closed_form() {
    let rep = spectrum::report(&kagome(), GRID).unwrap();
    let exact = analysis::kagome_closed_form();
    let mut pass = rep.intervals.len() == 1
        && close(rep.intervals[0].0, -0.5, 1e-9)
        && close(rep.intervals[0].1, 1.0, 1e-9)
        && rep.flat_bands.len() == 1
        && close(rep.flat_bands[0].value, -0.5, 1e-9)
        && rep.flat_bands[0].multiplicity == 1
        && !rep.flat_bands[0].embedded;
    for (a, b) in rep.bands.iter().zip(&exact.bands) {
        pass &= close(a.0, b.0, 1e-9) && close(a.1, b.1, 1e-9);
    }
    verdict(
        3,
        "kagome: ac [-1/2,1], simple non-embedded flat -1/2, closed form to 1e-9",
        pass,
    );
}

#[test]
fn criterion_04_decorated_square_family() {
    let mut pass = true;
    for nu in [2usize, 3, 4, 5, 8] {
        let g = decorated_square(nu).unwrap();
        let rep = spectrum::report(&g, GRID).unwrap();
        let edge = (nu as f64 - 1.0) / (nu as f64 + 3.0);
        let n = rep.bands.len();
        pass &= close(rep.bands[0].0, edge, 1e-9)
            && close(rep.bands[0].1, 1.0, 1e-9)
            && close(rep.bands[n - 1].0, -1.0, 1e-9)
            && close(rep.bands[n - 1].1, -edge, 1e-9);
        if nu >= 3 {
            pass &= rep.flat_bands.len() == 1
                && close(rep.flat_bands[0].value, 0.0, 1e-9)
                && rep.flat_bands[0].multiplicity == nu - 2;
        } else {
            pass &= rep.flat_bands.is_empty();
        }
        pass &= close(rep.measure, 8.0 / (nu as f64 + 3.0), 1e-9)
            && close(rep.measure, rep.estimate, 1e-12);
    }
    verdict(
        4,
        "decorated square nu in {2,3,4,5,8}: bands, flat 0 of multiplicity nu-2, sharp measure 8/(nu+3)",
        pass,
    );
}

#[test]
fn criterion_05_subdivided_square_family() {
    let mut pass = true;
    for n in [1usize, 2, 3] {
        let g = subdivided_square(n).unwrap();
        let rep = spectrum::report(&g, GRID).unwrap();
        pass &= rep.intervals.len() == 1
            && close(rep.intervals[0].0, -1.0, 1e-9)
            && close(rep.intervals[0].1, 1.0, 1e-9);
        let expect: Vec<f64> = (1..=n)
            .map(|k| (std::f64::consts::PI * k as f64 / (n as f64 + 1.0)).cos())
            .collect();
        pass &= rep.flat_bands.len() == n;
        for (f, e) in rep.flat_bands.iter().zip(&expect) {
            pass &= close(f.value, *e, 1e-9) && f.multiplicity == 1;
        }
    }
    verdict(
        5,
        "subdivided square n in {1,2,3}: ac [-1,1], simple flats cos(pi k/(n+1))",
        pass,
    );
}

#[test]
fn criterion_06_perturbed_square() {
    let mut pass = close(analysis::perturbed_square([0, 0]).lambda_minus, -1.0 / 3.0, 1e-7)
        && close(analysis::perturbed_square([1, 1]).lambda_minus, -0.5, 1e-7)
        && close(analysis::perturbed_square([2, 1]).lambda_minus, -1.0, 1e-7);
    for t1 in -6..=6i64 {
        for t2 in -6..=6i64 {
            if (t1 + t2).rem_euclid(2) != 0 {
                continue;
            }
            let r = analysis::perturbed_square([t1, t2]);
            pass &= r.lambda_minus <= analysis::perturbed_square_bound([t1, t2]) + 1e-9;
        }
    }
    let ratio = analysis::perturbed_square([8, 8]).asymptotic_ratio.unwrap();
    pass &= (0.8..=1.2).contains(&ratio);
    verdict(
        6,
        "perturbed square: pinned minima, cosine bound for all even-sum tau <= 6, asymptotics at (8,8)",
        pass,
    );
}

#[test]
fn criterion_07_perturbed_graphene() {
    let r = analysis::perturbed_graphene([1, 0], GrapheneAttach::Loop);
    let mut pass = r.case == GrapheneCase::LoopMod3Nonzero
        && close(r.lambda2_minus.unwrap(), -0.627, 2e-3)
        && close(r.lambda2_plus.unwrap(), -0.106, 2e-3)
        && r.intervals[1] == (0.0, 1.0);
    let edge = analysis::perturbed_graphene([1, 0], GrapheneAttach::V1V2Edge);
    pass &= edge.intervals == vec![(-1.0, 1.0)];
    // pipeline confirmation of the edge case
    let rep = spectrum::report(&graphene_plus_edge([1, 0]), GRID).unwrap();
    pass &= rep.intervals.len() == 1
        && close(rep.intervals[0].0, -1.0, 1e-9)
        && close(rep.intervals[0].1, 1.0, 1e-9);
    for t1 in -4..=4i64 {
        for t2 in -4..=4i64 {
            let r = analysis::perturbed_graphene([t1, t2], GrapheneAttach::Loop);
            pass &= r.lambda2_minus.unwrap() <= -0.6 + 1e-9;
            pass &= r.lambda2_minus.unwrap() > -1.0 - 1e-9;
            match r.case {
                GrapheneCase::LoopMod3Zero => {
                    let l1 = r.lambda1_minus.unwrap();
                    pass &= l1 > 0.0 && l1 <= 0.4 + 1e-9;
                    pass &= r.measure >= 6.0 / 5.0 - 1e-6;
                }
                GrapheneCase::LoopMod3Nonzero => {
                    let l2p = r.lambda2_plus.unwrap();
                    pass &= l2p >= -0.2 - 1e-9 && l2p < 0.0;
                    pass &= r.measure >= 7.0 / 5.0 - 1e-6;
                }
                GrapheneCase::Bipartite => pass = false,
            }
        }
    }
    verdict(
        7,
        "perturbed graphene: loop (1,0) example, edge case [-1,1], interval/measure bounds for |tau_i| <= 4",
        pass,
    );
}

#[test]
fn criterion_08_two_vertex_product() {
    let (lambda0, theta) = analysis::two_vertex_gap(&[-1, 0, 2], &[-1, 0, 2]).unwrap();
    let expect_cos = (-1.0 + 7f64.sqrt()) / 6.0;
    let pass = close(lambda0, 0.04, 5e-3)
        && close(theta[0].cos(), expect_cos, 1e-6)
        && close(theta[1].cos(), expect_cos, 1e-6);
    verdict(
        8,
        "two-vertex product {-1,0,2}^2: gap half-width ~0.04 at cos theta* = (-1+sqrt 7)/6",
        pass,
    );
}

#[test]
fn criterion_09_oracle_equivalence() {
    let mut pass = true;
    let mut graphs = vec![
        square_lattice(),
        triangular_lattice(),
        graphene(),
        kagome(),
        decorated_square(4).unwrap(),
        subdivided_square(2).unwrap(),
        perturbed_square([2, 1]),
    ];
    graphs.extend(common::random_graphs(0x5eed, 50));
    for g in &graphs {
        for n in [2usize, 3, 4, 6] {
            let d = oracle::max_discrepancy(g, n).unwrap();
            if d > 1e-8 {
                eprintln!("oracle mismatch {d:e} for {:?} N={n}", g.edge_specs());
                pass = false;
            }
        }
    }
    verdict(
        9,
        "quotient-graph eigenvalues match fiber unions to 1e-8 on catalog + 50 random graphs",
        pass,
    );
}

#[test]
fn criterion_10_structural_suite() {
    let grid = 24;
    let mut pass = true;
    let mut graphs = vec![
        square_lattice(),
        triangular_lattice(),
        graphene(),
        kagome(),
        decorated_square(5).unwrap(),
        subdivided_square(1).unwrap(),
        perturbed_square([2, 2]),
        graphene_plus_edge([1, -2]),
    ];
    graphs.extend(common::random_graphs(0xabcd, 30));
    for g in &graphs {
        let samples = spectrum::sample_grid(g, grid).unwrap();
        for vals in &samples.eigen {
            pass &= vals.iter().all(|v| v.abs() <= 1.0 + 1e-9);
        }
        let rep = spectrum::report(g, grid).unwrap();
        // per-momentum symmetry iff the fundamental graph is bipartite
        pass &= rep.symmetric == g.is_bipartite_fundamental();
        let connected = g.is_connected_periodic();
        if connected {
            let checks = spectrum::check_structural_predictions(g, &rep);
            for (name, outcome) in &checks {
                if *outcome == CheckOutcome::Fail {
                    eprintln!("check {name} failed for {:?}", g.edge_specs());
                    pass = false;
                }
            }
        }
        // gauge invariance: identical eigenvalues at matching momenta
        let offsets: Vec<[i64; 2]> = (0..g.nu())
            .map(|j| [(j as i64 * 3) % 5 - 2, (j as i64 * 7) % 4 - 1])
            .collect();
        let shifted = g.gauge_shift(&offsets).unwrap();
        for theta in [[0.0, 0.0], [0.7, -1.9], [2.4, 2.4]] {
            let a = lapgraph::floquet::fiber_eigenvalues(g, theta);
            let b = lapgraph::floquet::fiber_eigenvalues(&shifted, theta);
            pass &= a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-10);
        }
        // index scaling by 2 permutes the size-5 grid (gcd(2,5)=1):
        // the eigenvalue multisets over that grid must coincide
        let scaled = g.scale_indices(2).unwrap();
        let a = oracle::fiber_union(g, 5);
        let b = oracle::fiber_union(&scaled, 5);
        pass &= a.iter().zip(&b).all(|(x, y)| (x - y).abs() <= 1e-9);
    }
    verdict(
        10,
        "structural suite: unit interval, band-one endpoints, flat rules, gap bound, symmetry iff bipartite, gauge/scale invariance",
        pass,
    );
}
