//! Fiber matrices of the normalized Laplacian.
//!
//! For quasimomentum theta in [-pi, pi]^2 the fiber is the nu x nu
//! Hermitian matrix with entries
//!
//! ```text
//! M_jk(theta) = (1 / sqrt(k_j k_k)) * sum exp(i <tau(e), theta>)
//! ```
//!
//! summed over oriented edges from v_j to v_k. Loops contribute both
//! orientations, so the diagonal picks up (2 / k_j) cos<tau, theta> per
//! loop. All eigenvalues lie in [-1, 1].

use crate::graph_model::FundamentalGraph;
use nalgebra::{Complex, DMatrix};
use thiserror::Error;

pub type Theta = [f64; 2];
type C64 = Complex<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum FloquetError {
    #[error("assembled matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
}

/// A fiber matrix together with the quasimomentum it was assembled at.
#[derive(Debug, Clone)]
pub struct FloquetMatrix {
    pub theta: Theta,
    pub matrix: DMatrix<C64>,
}

/// Assemble the fiber at `theta`. Only the lower triangle is computed
/// from edges; the upper triangle is its conjugate mirror, so the result
/// is Hermitian by construction (verified defensively).
pub fn fiber(g: &FundamentalGraph, theta: Theta) -> Result<FloquetMatrix, FloquetError> {
    let nu = g.nu();
    let mut m = DMatrix::<C64>::zeros(nu, nu);
    for e in g.oriented_edges() {
        let (j, k) = (e.tail - 1, e.head - 1);
        if j < k {
            continue; // mirrored below
        }
        let w = 1.0 / ((g.degree(e.tail) * g.degree(e.head)) as f64).sqrt();
        let phase = e.index[0] as f64 * theta[0] + e.index[1] as f64 * theta[1];
        m[(j, k)] += C64::from_polar(w, phase);
    }
    for j in 0..nu {
        m[(j, j)] = C64::new(m[(j, j)].re, 0.0);
        for k in 0..j {
            m[(k, j)] = m[(j, k)].conj();
        }
    }
    let asym = hermitian_defect(&m);
    if asym > 1e-9 {
        return Err(FloquetError::NotHermitian(asym));
    }
    Ok(FloquetMatrix { theta, matrix: m })
}

fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..m.nrows() {
        for k in 0..m.ncols() {
            worst = worst.max((m[(j, k)] - m[(k, j)].conj()).norm());
        }
    }
    worst
}

impl FloquetMatrix {
    /// Eigenvalues sorted in decreasing order (all real; the fiber is
    /// Hermitian).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.matrix.clone().symmetric_eigenvalues();
        let mut vals: Vec<f64> = eig.iter().copied().collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        vals
    }

    /// Distance from `lambda` to the spectrum of the fiber. For a
    /// Hermitian matrix this is the smallest singular value of M - lambda.
    pub fn min_singular_value(&self, lambda: f64) -> f64 {
        self.eigenvalues()
            .iter()
            .map(|&e| (e - lambda).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Eigenvalues of the fiber at `theta`, decreasing.
pub fn fiber_eigenvalues(g: &FundamentalGraph, theta: Theta) -> Vec<f64> {
    fiber(g, theta).expect("fiber assembly").eigenvalues()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph_model::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn n(v: C64) -> f64 {
        v.norm()
    }

    #[test]
    fn square_lattice_fiber_is_scalar_cosine_mean() {
        let g = square_lattice();
        for theta in [[0.0, 0.0], [1.0, -2.0], [PI, PI], [0.3, 2.9]] {
            let m = fiber(&g, theta).unwrap();
            let expect = (theta[0].cos() + theta[1].cos()) / 2.0;
            assert_abs_diff_eq!(m.matrix[(0, 0)].re, expect, epsilon = 1e-14);
            assert_abs_diff_eq!(m.matrix[(0, 0)].im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn graphene_fiber_entries() {
        let g = graphene();
        let theta = [0.7, -1.3];
        let m = fiber(&g, theta).unwrap().matrix;
        let expect = (C64::new(1.0, 0.0)
            + C64::from_polar(1.0, theta[0])
            + C64::from_polar(1.0, theta[1]))
            / 3.0;
        assert!(n(m[(0, 1)] - expect) < 1e-14);
        assert!(n(m[(1, 0)] - expect.conj()) < 1e-14);
        assert_abs_diff_eq!(m[(0, 0)].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(1, 1)].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn loop_gives_cosine_diagonal() {
        // single vertex, loops (1,0),(0,1),(tau); diagonal is the cosine mean
        let g = perturbed_square([2, 1]);
        let theta = [0.4, 1.1];
        let m = fiber(&g, theta).unwrap().matrix;
        let expect =
            (theta[0].cos() + theta[1].cos() + (2.0 * theta[0] + theta[1]).cos()) / 3.0;
        assert_abs_diff_eq!(m[(0, 0)].re, expect, epsilon = 1e-14);
    }

    #[test]
    fn eigenvalues_in_unit_interval_and_decreasing() {
        for g in [graphene(), kagome(), decorated_square(5).unwrap()] {
            for theta in [[0.0, 0.0], [1.9, -0.4], [PI, -PI], [-2.2, 2.2]] {
                let vals = fiber_eigenvalues(&g, theta);
                assert_eq!(vals.len(), g.nu());
                for w in vals.windows(2) {
                    assert!(w[0] >= w[1]);
                }
                for v in vals {
                    assert!(v <= 1.0 + 1e-12 && v >= -1.0 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn conjugation_under_momentum_reflection() {
        let g = kagome();
        let theta = [0.8, -2.1];
        let m = fiber(&g, theta).unwrap().matrix;
        let m_neg = fiber(&g, [-theta[0], -theta[1]]).unwrap().matrix;
        for j in 0..3 {
            for k in 0..3 {
                assert!(n(m_neg[(j, k)] - m[(j, k)].conj()) < 1e-14);
            }
        }
    }

    #[test]
    fn entry_magnitude_maximized_at_zero_momentum() {
        let g = kagome();
        let m0 = fiber(&g, [0.0, 0.0]).unwrap().matrix;
        for theta in [[0.5, 1.5], [2.0, -1.0], [3.0, 3.0]] {
            let m = fiber(&g, theta).unwrap().matrix;
            for j in 0..3 {
                for k in 0..3 {
                    assert!(n(m[(j, k)]) <= n(m0[(j, k)]) + 1e-14);
                }
            }
        }
    }

    #[test]
    fn entry_constant_iff_no_bridge_between_pair() {
        // kagome pair (1,2) has bridges; a zero-index-only pair would not
        let g = kagome();
        let m0 = fiber(&g, [0.0, 0.0]).unwrap().matrix;
        let m1 = fiber(&g, [1.0, 2.0]).unwrap().matrix;
        assert!(n(m0[(0, 1)] - m1[(0, 1)]) > 1e-3);

        let path = FundamentalGraph::new(
            2,
            vec![EdgeSpec::new(1, 2, [0, 0]), EdgeSpec::new(2, 2, [1, 0])],
        )
        .unwrap();
        let p0 = fiber(&path, [0.0, 0.0]).unwrap().matrix;
        let p1 = fiber(&path, [1.3, -0.2]).unwrap().matrix;
        assert!(n(p0[(0, 1)] - p1[(0, 1)]) < 1e-15);
    }

    #[test]
    fn gauge_shift_preserves_fiber_spectrum() {
        let g = graphene();
        let shifted = g.gauge_shift(&[[2, -1], [0, 3]]).unwrap();
        for theta in [[0.0, 0.0], [0.9, 2.2], [-1.4, 0.6]] {
            let a = fiber_eigenvalues(&g, theta);
            let b = fiber_eigenvalues(&shifted, theta);
            for (x, y) in a.iter().zip(&b) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn index_scaling_shifts_momentum() {
        let g = kagome();
        let scaled = g.scale_indices(3).unwrap();
        let theta = [0.4, -0.9];
        let a = fiber_eigenvalues(&scaled, theta);
        let b = fiber_eigenvalues(&g, [3.0 * theta[0], 3.0 * theta[1]]);
        for (x, y) in a.iter().zip(&b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn bipartite_fiber_spectrum_symmetric_about_zero() {
        let g = graphene_plus_edge([1, -2]);
        assert!(g.is_bipartite_fundamental());
        for theta in [[0.0, 0.0], [1.1, 0.3], [-2.0, 2.5]] {
            let vals = fiber_eigenvalues(&g, theta);
            assert_abs_diff_eq!(vals[0], -vals[1], epsilon = 1e-12);
        }
    }

    #[test]
    fn min_singular_value_vanishes_on_spectrum() {
        let g = kagome();
        let m = fiber(&g, [1.0, 0.5]).unwrap();
        let vals = m.eigenvalues();
        assert!(m.min_singular_value(vals[1]) < 1e-12);
        assert!(m.min_singular_value(2.0) > 0.9);
        // flat value -1/2 is in every fiber
        for theta in [[0.2, 0.2], [2.8, -1.7]] {
            let m = fiber(&g, theta).unwrap();
            assert!(m.min_singular_value(-0.5) < 1e-12);
        }
    }
}
