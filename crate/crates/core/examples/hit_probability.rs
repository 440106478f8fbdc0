//! Estimate `P^k(i, j)` by counting where walks land, and compare with the
//! dense matrix power.

use logwalk::graph::generators;
use logwalk::oracle;
use logwalk::walk::{hit_prob_estimate, RandomSource};

fn main() -> logwalk::Result<()> {
    let g = generators::path(5);
    let source = RandomSource::new(42);
    let pk = oracle::transition_power(&g, 4)?;

    for target in 0..g.n() {
        let e = hit_prob_estimate(&g, 0, target, 4, 200_000, 0.01, &source.child(target as u64), 1)?;
        println!(
            "P^4(0,{target}) ≈ {:.4} ± {:.4}   exact {:.4}",
            e.value,
            e.radius,
            pk[(0, target)]
        );
    }
    Ok(())
}
