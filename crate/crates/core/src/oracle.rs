//! Brute-force cross-checks used as ground truth in tests.
//!
//! The finite quotient of the periodic graph by (NZ)^2 has nu*N^2 vertices
//! (j, p) with p in (Z/NZ)^2; its normalized Laplacian block-diagonalizes
//! over the discrete dual group, so its eigenvalue multiset must equal the
//! union of the fiber eigenvalues over the N x N quasimomentum grid. This
//! reaches the same numbers through a real symmetric eigensolve instead of
//! the complex fiber route.

use crate::floquet::fiber_eigenvalues;
use crate::graph_model::FundamentalGraph;
use nalgebra::DMatrix;
use std::collections::VecDeque;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("quotient dimension {0} exceeds the dense-solve cap 4096")]
    DimensionTooLarge(usize),
}

/// Eigenvalues of the quotient Laplacian on nu*N^2 vertices, decreasing.
pub fn quotient_eigenvalues(g: &FundamentalGraph, n: usize) -> Result<Vec<f64>, OracleError> {
    assert!(n >= 2, "torus size must be at least 2");
    let nu = g.nu();
    let dim = nu * n * n;
    if dim > 4096 {
        return Err(OracleError::DimensionTooLarge(dim));
    }
    let id = |j: usize, p0: i64, p1: i64| -> usize {
        let (p0, p1) = (p0.rem_euclid(n as i64) as usize, p1.rem_euclid(n as i64) as usize);
        (p0 * n + p1) * nu + (j - 1)
    };
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    // oriented edges are closed under reversal, so this fills both
    // triangles consistently and the matrix comes out symmetric
    for e in g.oriented_edges() {
        let w = 1.0 / ((g.degree(e.tail) * g.degree(e.head)) as f64).sqrt();
        for p0 in 0..n as i64 {
            for p1 in 0..n as i64 {
                let row = id(e.tail, p0, p1);
                let col = id(e.head, p0 + e.index[0], p1 + e.index[1]);
                m[(row, col)] += w;
            }
        }
    }
    let mut vals: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(vals)
}

/// Union of fiber eigenvalues over the N x N discrete dual grid,
/// theta_k = 2*pi*k/N shifted into [-pi, pi]; decreasing.
pub fn fiber_union(g: &FundamentalGraph, n: usize) -> Vec<f64> {
    let coord = |k: usize| {
        let mut t = 2.0 * PI * k as f64 / n as f64;
        if t > PI {
            t -= 2.0 * PI;
        }
        t
    };
    let mut vals = Vec::with_capacity(g.nu() * n * n);
    for k1 in 0..n {
        for k2 in 0..n {
            vals.extend(fiber_eigenvalues(g, [coord(k1), coord(k2)]));
        }
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    vals
}

/// Largest absolute difference between the sorted quotient eigenvalues and
/// the sorted fiber union.
pub fn max_discrepancy(g: &FundamentalGraph, n: usize) -> Result<f64, OracleError> {
    let q = quotient_eigenvalues(g, n)?;
    let f = fiber_union(g, n);
    Ok(q.iter()
        .zip(&f)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Connectivity probe that never looks at indices algebraically: BFS over
/// vertex copies (j, p) with |p|_inf <= radius, reporting whether every
/// copy in the inner third of the patch is reached from (v1, (0,0)).
pub fn patch_connectivity(g: &FundamentalGraph, radius: i64) -> bool {
    let max_tau = g
        .edge_specs()
        .iter()
        .flat_map(|e| e.index.iter().map(|t| t.abs()))
        .max()
        .unwrap_or(0);
    assert!(
        radius >= 3 * (max_tau + 1),
        "patch radius too small for the edge indices"
    );
    let nu = g.nu() as i64;
    let side = 2 * radius + 1;
    let id = |j: i64, p: [i64; 2]| -> usize {
        ((p[0] + radius) * side * nu + (p[1] + radius) * nu + (j - 1)) as usize
    };
    let mut seen = vec![false; (side * side * nu) as usize];
    let oriented = g.oriented_edges();
    let mut queue = VecDeque::from([(1i64, [0i64, 0i64])]);
    seen[id(1, [0, 0])] = true;
    while let Some((j, p)) = queue.pop_front() {
        for e in oriented.iter().filter(|e| e.tail as i64 == j) {
            let q = [p[0] + e.index[0], p[1] + e.index[1]];
            if q[0].abs() > radius || q[1].abs() > radius {
                continue;
            }
            let k = e.head as i64;
            if !seen[id(k, q)] {
                seen[id(k, q)] = true;
                queue.push_back((k, q));
            }
        }
    }
    let inner = radius / 3;
    for j in 1..=nu {
        for p0 in -inner..=inner {
            for p1 in -inner..=inner {
                if !seen[id(j, [p0, p1])] {
                    return false;
                }
            }
        }
    }
    true
}
