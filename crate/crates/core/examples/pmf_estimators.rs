//! The two counting estimators: Poisson via blocks of Bernoulli trials and
//! binomial via fair coin flips.

use logwalk::estimators::{
    binomial_pmf_estimate, binomial_pmf_exact, poisson_pmf_estimate, poisson_pmf_exact, EstimatorConfig,
};
use logwalk::walk::RandomSource;

fn main() -> logwalk::Result<()> {
    let cfg = EstimatorConfig::default();
    let source = RandomSource::new(3);

    for (s, k) in [(1.0, 0), (2.0, 2), (5.0, 3)] {
        let e = poisson_pmf_estimate(s, k, 0.02, 0.05, &source.child(k), &cfg)?;
        println!(
            "Pois({s})[{k}] ≈ {:.4} (exact {:.4}, {} trials of {} draws)",
            e.value,
            poisson_pmf_exact(s, k)?,
            e.trials,
            e.block.unwrap()
        );
    }
    for (k, s) in [(4, 2), (8, 3)] {
        let e = binomial_pmf_estimate(k, s, 0.02, 0.05, &source.child(100 + k), &cfg)?;
        println!("2^-{k} C({k},{s}) ≈ {:.4} (exact {:.4})", e.value, binomial_pmf_exact(k, s)?);
    }
    Ok(())
}
