use lapgraph::graph_model::{EdgeSpec, FundamentalGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Deterministic small random graphs: up to 4 vertices, up to 8 edges,
/// indices in [-2, 2], every vertex covered.
pub fn random_graphs(seed: u64, count: usize) -> Vec<FundamentalGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let nu = rng.gen_range(1..=4usize);
        let n_edges = rng.gen_range(1..=8usize);
        let edges: Vec<EdgeSpec> = (0..n_edges)
            .map(|_| {
                EdgeSpec::new(
                    rng.gen_range(1..=nu),
                    rng.gen_range(1..=nu),
                    [rng.gen_range(-2..=2i64), rng.gen_range(-2..=2i64)],
                )
            })
            .collect();
        if let Ok(g) = FundamentalGraph::new(nu, edges) {
            out.push(g);
        }
    }
    out
}
