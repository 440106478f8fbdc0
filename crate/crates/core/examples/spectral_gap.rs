//! Estimate λ₂ of a few small graphs with the noisy power method.

use logwalk::graph::generators;
use logwalk::oracle;
use logwalk::spectral::{lambda2_estimate, GapConfig};
use logwalk::walk::RandomSource;

fn main() -> logwalk::Result<()> {
    let cfg = GapConfig::practical(0.2, 0.1, 100_000);
    for (name, g) in [
        ("K4", generators::complete(4)),
        ("C4", generators::cycle(4)),
        ("star(5)", generators::star(5)),
    ] {
        let e = lambda2_estimate(&g, &cfg, &RandomSource::new(1))?;
        println!(
            "{name:8} λ₂ ≈ {:.4}  exact {:.4}  (τ = {:.3}, {} norm calls)",
            e.value,
            oracle::lambda2_exact(&g)?,
            e.tau,
            e.norm_calls
        );
    }
    Ok(())
}
