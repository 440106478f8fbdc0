//! Equal seeds give bit-identical answers, whatever the worker count.

use logwalk::graph::generators;
use logwalk::spectral::{lambda2_estimate, GapConfig};
use logwalk::walk::RandomSource;
use logwalk::{Mode, PracticalBudget};

fn main() -> logwalk::Result<()> {
    let g = generators::cycle(6);
    let run = |workers| {
        let mode = Mode::Practical(PracticalBudget::new(50_000).with_workers(workers));
        lambda2_estimate(&g, &GapConfig::with_mode(0.2, 0.1, mode), &RandomSource::new(99))
    };
    let a = run(1)?;
    let b = run(4)?;
    println!("1 worker:  {:.17}", a.value);
    println!("4 workers: {:.17}", b.value);
    assert_eq!(a, b);
    Ok(())
}
