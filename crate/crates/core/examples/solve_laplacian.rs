//! Approximate `x = L† b` entry by entry and check against the dense
//! pseudo-inverse.

use logwalk::graph::generators;
use logwalk::oracle;
use logwalk::solver::{solve, SolveConfig};
use logwalk::walk::RandomSource;

fn main() -> logwalk::Result<()> {
    let g = generators::cycle(5);
    // b must be orthogonal to √d; on a regular graph that means zero-sum
    let b = [0.6, -0.2, -0.4, 0.3, -0.3];

    // λ must lower-bound λ₂; the exact value gives the shortest series
    let lambda = oracle::lambda2_exact(&g)?;
    let cfg = SolveConfig::practical(0.05, 0.1, 100_000).with_lambda(lambda);
    let sol = solve(&g, &b, &cfg, &RandomSource::new(11))?;
    let exact = oracle::pseudo_inverse_apply(&g, &b)?;

    for i in 0..g.n() {
        println!("x[{i}] = {:+.4} ± {:.4}   exact {:+.4}", sol.x[i], sol.radius[i], exact[i]);
    }
    let c = &sol.components[0];
    if let Some(p) = &c.series {
        println!("series: T = {}, N = {}, K = {}", p.t_horizon, p.n_terms, p.k_terms);
    }
    Ok(())
}
