//! `‖M^k v‖` for a two-point candidate vector, from walks alone.

use logwalk::graph::generators;
use logwalk::oracle;
use logwalk::spectral::{estimate_norm, SigmaVector};
use logwalk::walk::RandomSource;
use logwalk::{Mode, PracticalBudget};

fn main() -> logwalk::Result<()> {
    let g = generators::path(4);
    let v = SigmaVector::new(&g, 0, 3)?;
    let mode = Mode::Practical(PracticalBudget::new(100_000));

    for k in 1..=6 {
        let e = estimate_norm(&g, k, &v, 0.05, 0.1, &mode, &RandomSource::new(k))?;
        let exact: f64 = oracle::dense_power_apply(&g, k, &v.dense(g.n()))?
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        println!("k = {k}: {:.4} (noise {:.4})   exact {exact:.4}", e.value, e.noise);
    }
    Ok(())
}
