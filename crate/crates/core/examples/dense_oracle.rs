//! Ground truth on small graphs: spectrum, pseudo-inverse and the
//! truncated series the solver samples from.

use logwalk::graph::generators;
use logwalk::oracle;
use logwalk::solver::SeriesParams;

fn main() -> logwalk::Result<()> {
    let g = generators::star(3);
    let sp = oracle::spectrum(&g)?;
    println!("eigenvalues of L: {:.4?}", sp.eigenvalues);

    let b = g.project_to_image(&[1.0, 0.0, 0.0, -1.0])?;
    let x = oracle::pseudo_inverse_apply(&g, b.as_slice())?;
    println!("L†b = {x:.4?}");

    let params = SeriesParams::new(0.05, sp.lambda2().unwrap())?;
    let (series, route) = oracle::series_eval(&g, b.as_slice(), &params)?;
    let err: f64 = series.iter().zip(&x).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt();
    println!("series ({route:?}, N = {}, K = {}) error {err:.2e}", params.n_terms, params.k_terms);
    Ok(())
}
