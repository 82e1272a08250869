//! Closed-form and semi-analytic spectra for specific families, each
//! cross-checkable against the generic sampling pipeline.

use crate::floquet::{fiber, Theta};
use crate::graph_model::{self, FundamentalGraph, Index};
use crate::spectrum::{FlatBandReport, SpectrumReport};
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("graph shape mismatch: {0}")]
    ShapeMismatch(String),
}

// ------------------------------------------------------------------
// scalar minimization helpers: uniform scan, then local refinement
// ------------------------------------------------------------------

/// Minimize on [a, b]: scan `n` points, then golden-section on the
/// bracket around the best sample, down to 1e-10 in the argument.
fn min_1d(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64) {
    let h = (b - a) / (n - 1) as f64;
    let (mut best_x, mut best_v) = (a, f(a));
    for k in 1..n {
        let x = a + h * k as f64;
        let v = f(x);
        if v < best_v {
            best_v = v;
            best_x = x;
        }
    }
    let (mut lo, mut hi) = ((best_x - h).max(a), (best_x + h).min(b));
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut x1, mut x2) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    let v = f(x);
    if v < best_v {
        (x, v)
    } else {
        (best_x, best_v)
    }
}

/// Minimize over the torus: scan an n x n grid, then compass search with
/// halving steps down to 1e-10.
fn min_2d(f: &dyn Fn(Theta) -> f64, n: usize) -> (Theta, f64) {
    let step = 2.0 * PI / n as f64;
    let mut best = ([0.0, 0.0], f([0.0, 0.0]));
    for k1 in 0..n {
        for k2 in 0..n {
            let th = [-PI + step * k1 as f64, -PI + step * k2 as f64];
            let v = f(th);
            if v < best.1 {
                best = (th, v);
            }
        }
    }
    let mut h = step;
    while h > 1e-10 {
        let mut moved = false;
        for d in [[h, 0.0], [-h, 0.0], [0.0, h], [0.0, -h]] {
            let th = [best.0[0] + d[0], best.0[1] + d[1]];
            let v = f(th);
            if v < best.1 {
                best = (th, v);
                moved = true;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    best
}

// ------------------------------------------------------------------
// square lattice with one extra loop
// ------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareMethod {
    /// Odd index sum keeps the periodic graph bipartite: spectrum [-1, 1].
    BipartiteFullInterval,
    /// Equal components reduce the minimization to one variable on the
    /// diagonal of the torus.
    OneDFormula,
    /// Generic even-sum index: full torus scan plus refinement.
    GridRefined,
}

#[derive(Debug, Clone)]
pub struct PerturbedSquareResult {
    pub tau: Index,
    pub lambda_minus: f64,
    pub method: SquareMethod,
    /// (lambda_minus + 1) * 6|tau|^2 / pi^2; tends to 1 for long loops.
    pub asymptotic_ratio: Option<f64>,
}

/// Bottom of the spectrum for the square lattice with an extra loop of
/// index tau. The fiber is scalar: (cos t1 + cos t2 + cos<tau, t>) / 3.
pub fn perturbed_square(tau: Index) -> PerturbedSquareResult {
    let (lambda_minus, method) = if (tau[0] + tau[1]).rem_euclid(2) == 1 {
        (-1.0, SquareMethod::BipartiteFullInterval)
    } else if tau[0] == tau[1] {
        // minimum sits on the diagonal t1 = t2 = phi
        let m = tau[0];
        let f = |phi: f64| (2.0 * phi.cos() + (2.0 * m as f64 * phi).cos()) / 3.0;
        let (_, v) = min_1d(&f, 0.0, PI, 4096);
        (v, SquareMethod::OneDFormula)
    } else {
        let f = |th: Theta| {
            (th[0].cos() + th[1].cos() + (tau[0] as f64 * th[0] + tau[1] as f64 * th[1]).cos())
                / 3.0
        };
        let (_, v) = min_2d(&f, 240);
        (v, SquareMethod::GridRefined)
    };
    let norm2 = (tau[0] * tau[0] + tau[1] * tau[1]) as f64;
    let asymptotic_ratio = if norm2.sqrt() >= 5.0 {
        Some((lambda_minus + 1.0) * 6.0 * norm2 / (PI * PI))
    } else {
        None
    };
    PerturbedSquareResult {
        tau,
        lambda_minus,
        method,
        asymptotic_ratio,
    }
}

/// Closed-form lower bound for the even-sum case:
/// lambda_minus <= -cos(pi / (|t1| + |t2| + 1)).
pub fn perturbed_square_bound(tau: Index) -> f64 {
    -(PI / ((tau[0].abs() + tau[1].abs() + 1) as f64)).cos()
}

// ------------------------------------------------------------------
// hexagonal lattice with one extra edge or loop
// ------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrapheneCase {
    /// Extra (v1, v2) edge: the graph stays bipartite, spectrum [-1, 1].
    Bipartite,
    /// Loop at v2 with t1 - t2 divisible by 3: gap (0, lambda1_minus).
    LoopMod3Zero,
    /// Loop at v2 otherwise: gap (lambda2_plus, 0).
    LoopMod3Nonzero,
}

#[derive(Debug, Clone)]
pub struct GrapheneResult {
    pub tau: Index,
    pub case: GrapheneCase,
    pub intervals: Vec<(f64, f64)>,
    pub gap: Option<(f64, f64)>,
    pub measure: f64,
    pub lambda1_minus: Option<f64>,
    pub lambda2_minus: Option<f64>,
    pub lambda2_plus: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GrapheneAttach {
    V1V2Edge,
    Loop,
}

/// |1 + e^{i t1} + e^{i t2}|^2, the hexagonal hopping factor; ranges over
/// [0, 9] with the zeros at +-(2pi/3, -2pi/3).
pub fn hex_factor(theta: Theta) -> f64 {
    (Complex64::new(1.0, 0.0)
        + Complex64::from_polar(1.0, theta[0])
        + Complex64::from_polar(1.0, theta[1]))
    .norm_sqr()
}

/// Sorted two-branch fiber eigenvalues for the loop attachment: degrees
/// become 3 and 5, and
/// lambda_{1,2}(theta) = c/5 +- sqrt(c^2/25 + F(theta)/15), c = cos<tau, theta>.
fn graphene_loop_branches(tau: Index, theta: Theta) -> (f64, f64) {
    let c = (tau[0] as f64 * theta[0] + tau[1] as f64 * theta[1]).cos();
    let root = (c * c / 25.0 + hex_factor(theta) / 15.0).sqrt();
    (c / 5.0 + root, c / 5.0 - root)
}

pub fn perturbed_graphene(tau: Index, attach: GrapheneAttach) -> GrapheneResult {
    if attach == GrapheneAttach::V1V2Edge {
        return GrapheneResult {
            tau,
            case: GrapheneCase::Bipartite,
            intervals: vec![(-1.0, 1.0)],
            gap: None,
            measure: 2.0,
            lambda1_minus: None,
            lambda2_minus: None,
            lambda2_plus: None,
        };
    }
    let l1_minus = min_2d(&|th| graphene_loop_branches(tau, th).0, 240).1;
    let l2_minus = min_2d(&|th| graphene_loop_branches(tau, th).1, 240).1;
    let l2_plus = -min_2d(&|th| -graphene_loop_branches(tau, th).1, 240).1;
    if (tau[0] - tau[1]).rem_euclid(3) == 0 {
        GrapheneResult {
            tau,
            case: GrapheneCase::LoopMod3Zero,
            intervals: vec![(l2_minus, 0.0), (l1_minus, 1.0)],
            gap: Some((0.0, l1_minus)),
            measure: -l2_minus + (1.0 - l1_minus),
            lambda1_minus: Some(l1_minus),
            lambda2_minus: Some(l2_minus),
            lambda2_plus: None,
        }
    } else {
        GrapheneResult {
            tau,
            case: GrapheneCase::LoopMod3Nonzero,
            intervals: vec![(l2_minus, l2_plus), (0.0, 1.0)],
            gap: Some((l2_plus, 0.0)),
            measure: (l2_plus - l2_minus) + 1.0,
            lambda1_minus: None,
            lambda2_minus: Some(l2_minus),
            lambda2_plus: Some(l2_plus),
        }
    }
}

// ------------------------------------------------------------------
// two-vertex product graphs
// ------------------------------------------------------------------

/// Gap half-width and extremizer for the two-vertex graph whose edge
/// indices run over d1 x d2. The off-diagonal entry factorizes as
/// P1(e^{i t1}) P2(e^{i t2}) / (|d1| |d2|), so each factor is minimized
/// independently. Spectrum: [-1, -lambda0] U [lambda0, 1].
pub fn two_vertex_gap(d1: &[i64], d2: &[i64]) -> Result<(f64, Theta), AnalysisError> {
    if d1.is_empty() || d2.is_empty() {
        return Err(AnalysisError::ShapeMismatch(
            "index sets must be nonempty".into(),
        ));
    }
    let factor = |d: &[i64]| {
        let d = d.to_vec();
        move |phi: f64| {
            d.iter()
                .fold(Complex64::new(0.0, 0.0), |acc, &t| {
                    acc + Complex64::from_polar(1.0, t as f64 * phi)
                })
                .norm()
        }
    };
    let (x1, m1) = min_1d(&factor(d1), -PI, PI, 4096);
    let (x2, m2) = min_1d(&factor(d2), -PI, PI, 4096);
    let lambda0 = m1 * m2 / (d1.len() * d2.len()) as f64;
    Ok((lambda0, [x1, x2]))
}

// ------------------------------------------------------------------
// three-vertex star-bipartite graphs
// ------------------------------------------------------------------

/// For a three-vertex graph whose every edge touches v1 (parts {v1} and
/// {v2, v3}): the nonzero branches are +-sqrt(|M12|^2 + |M13|^2) and 0 is
/// a simple flat band. Returns the gap half-width
/// lambda0 = min over the torus of that root.
pub fn three_vertex_bipartite(g: &FundamentalGraph) -> Result<f64, AnalysisError> {
    if g.nu() != 3 {
        return Err(AnalysisError::ShapeMismatch(format!(
            "need 3 vertices, got {}",
            g.nu()
        )));
    }
    for e in g.edge_specs() {
        if e.is_loop() || (e.tail != 1 && e.head != 1) {
            return Err(AnalysisError::ShapeMismatch(
                "every edge must join v1 to v2 or v3".into(),
            ));
        }
    }
    let f = |theta: Theta| {
        let m = fiber(g, theta).expect("fiber assembly").matrix;
        (m[(0, 1)].norm_sqr() + m[(0, 2)].norm_sqr()).sqrt()
    };
    Ok(min_2d(&f, 240).1)
}

// ------------------------------------------------------------------
// conical expansion at the hexagonal degeneracy point
// ------------------------------------------------------------------

/// Operator-norm distance between the hexagonal fiber near its conical
/// point and the flat 2x2 Dirac model H(t) = [[0, t1 - i t2], [t1 + i t2, 0]],
/// with t mapped to theta affinely:
/// theta1 + theta2 = -6 t1, -theta1 + theta2 = (6/sqrt 3) t2 - 4 pi / 3.
///
/// The comparison is made after the constant diagonal gauge diag(1, -i):
/// the first-order term of the off-diagonal entry is i (t1 - i t2), not
/// t1 - i t2 (expanding e^{i theta} about the cone brings a factor i),
/// and the gauge absorbs exactly that phase. Both matrices have zero
/// diagonal, so the norm is the off-diagonal distance; it vanishes
/// quadratically in |t|.
pub fn dirac_cone_residual(t: [f64; 2]) -> f64 {
    assert!((t[0] * t[0] + t[1] * t[1]).sqrt() <= 0.5, "t must be near 0");
    let theta2 = 0.5 * (-6.0 * t[0] + 6.0 / 3f64.sqrt() * t[1] - 4.0 * PI / 3.0);
    let theta1 = -6.0 * t[0] - theta2;
    let m = fiber(&graph_model::graphene(), [theta1, theta2])
        .expect("fiber assembly")
        .matrix;
    (m[(0, 1)] - Complex64::i() * Complex64::new(t[0], -t[1])).norm()
}

// ------------------------------------------------------------------
// kagome closed form
// ------------------------------------------------------------------

/// Exact spectral report for the kagome lattice: branches
/// (1 +- sqrt(F))/4 and the constant -1/2, so the ac part is [-1/2, 1]
/// with the flat band sitting at its lower endpoint.
pub fn kagome_closed_form() -> SpectrumReport {
    // sanity-pin the hopping-factor extremes the branch ranges rest on
    let theta0 = [2.0 * PI / 3.0, -2.0 * PI / 3.0];
    debug_assert!(hex_factor(theta0) < 1e-12);
    debug_assert!((hex_factor([0.0, 0.0]) - 9.0).abs() < 1e-12);
    SpectrumReport {
        name: "kagome".into(),
        nu: 3,
        grid_n: 0,
        bands: vec![(0.25, 1.0), (-0.5, 0.25), (-0.5, -0.5)],
        intervals: vec![(-0.5, 1.0)],
        flat_bands: vec![FlatBandReport {
            value: -0.5,
            multiplicity: 1,
            embedded: false,
        }],
        gaps: vec![],
        measure: 1.5,
        estimate: crate::spectrum::measure_estimate(&graph_model::kagome()),
        bipartite_periodic: false,
        symmetric: false,
    }
}

/// The three kagome eigenvalue branches at one quasimomentum, decreasing.
pub fn kagome_branches(theta: Theta) -> [f64; 3] {
    let root = hex_factor(theta).sqrt();
    [(1.0 + root) / 4.0, (1.0 - root) / 4.0, -0.5]
}
