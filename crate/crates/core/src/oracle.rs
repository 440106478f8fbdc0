//! Dense ground truth for small graphs (`n ≤ 500`).
//!
//! Everything here is deterministic: the normalized Laplacian
//! `L = I − D^{-1/2} W D^{-1/2}`, the transition matrix `P = D^{-1} W`,
//! `M = (I + D^{1/2} P D^{-1/2}) / 2`, a cyclic Jacobi eigensolver, the
//! pseudo-inverse and the truncated Poisson-weighted series for `L†`.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};
use crate::estimators::poisson_pmf_exact;
use crate::graph::WeightedGraph;
use crate::solver::SeriesParams;

pub const MAX_DENSE: usize = 500;
pub const MAX_SERIES: usize = 200;
pub const JACOBI_MAX_SWEEPS: usize = 100;
pub const JACOBI_OFF_TOL: f64 = 1e-12;
/// Eigenvalues below this count as zero.
pub const NULL_THRESHOLD: f64 = 1e-9;

fn check_dense(g: &WeightedGraph, max: usize) -> Result<()> {
    if g.n() > max {
        return Err(Error::Size { n: g.n(), max });
    }
    g.check_no_isolated()
}

pub fn laplacian_dense(g: &WeightedGraph) -> Result<DMatrix<f64>> {
    check_dense(g, MAX_DENSE)?;
    let n = g.n();
    let d = g.degrees();
    let mut l = DMatrix::identity(n, n);
    for i in 0..n {
        for &(j, w) in g.neighbors(i) {
            l[(i, j)] -= w / (d[i] * d[j]).sqrt();
        }
    }
    Ok(l)
}

pub fn transition_dense(g: &WeightedGraph) -> Result<DMatrix<f64>> {
    check_dense(g, MAX_DENSE)?;
    let n = g.n();
    let mut p = DMatrix::zeros(n, n);
    for i in 0..n {
        for &(j, w) in g.neighbors(i) {
            p[(i, j)] = w / g.degree(i);
        }
    }
    Ok(p)
}

/// `D^{1/2} P D^{-1/2}`, the symmetric conjugate of the walk matrix.
pub fn symmetric_walk_dense(g: &WeightedGraph) -> Result<DMatrix<f64>> {
    let p = transition_dense(g)?;
    let s: Vec<f64> = g.degrees().iter().map(|d| d.sqrt()).collect();
    Ok(DMatrix::from_fn(g.n(), g.n(), |i, j| s[i] * p[(i, j)] / s[j]))
}

pub fn m_dense(g: &WeightedGraph) -> Result<DMatrix<f64>> {
    let s = symmetric_walk_dense(g)?;
    let n = g.n();
    Ok((DMatrix::identity(n, n) + s) * 0.5)
}

/// Eigenpairs of a symmetric matrix by cyclic-by-row Jacobi rotations.
/// Eigenvalues ascending; eigenvectors are the matching columns.
pub fn jacobi_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = DMatrix::identity(n, n);
    let off = |a: &DMatrix<f64>| {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += 2.0 * a[(p, q)] * a[(p, q)];
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > JACOBI_OFF_TOL {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Convergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok((values, vectors))
}

/// Eigendecomposition of `L_G`.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    /// `λ₁ ≤ … ≤ λₙ`.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns.
    pub eigenvectors: DMatrix<f64>,
    pub graph_hash: u64,
}

fn graph_hash(g: &WeightedGraph) -> u64 {
    let mut h = DefaultHasher::new();
    g.n().hash(&mut h);
    for u in 0..g.n() {
        for &(v, w) in g.neighbors(u) {
            (u, v, w.to_bits()).hash(&mut h);
        }
    }
    h.finish()
}

impl DenseSpectrum {
    pub fn vector(&self, i: usize) -> DVector<f64> {
        self.eigenvectors.column(i).into_owned()
    }

    /// Smallest eigenvalue above [`NULL_THRESHOLD`].
    pub fn lambda2(&self) -> Option<f64> {
        self.eigenvalues.iter().cloned().find(|&l| l >= NULL_THRESHOLD)
    }

    /// Columns spanning the eigenspace of `λ₂` (eigenvalues within `tol` of it).
    pub fn lambda2_eigenspace(&self, tol: f64) -> Vec<DVector<f64>> {
        match self.lambda2() {
            Some(l2) => (0..self.eigenvalues.len())
                .filter(|&i| (self.eigenvalues[i] - l2).abs() <= tol)
                .map(|i| self.vector(i))
                .collect(),
            None => Vec::new(),
        }
    }

    /// `Σ_{λᵢ ≥ threshold} f(λᵢ) ⟨uᵢ, b⟩ uᵢ`.
    pub fn apply_fn(&self, b: &[f64], f: impl Fn(f64) -> f64, include_null: bool) -> Vec<f64> {
        let n = b.len();
        let bv = DVector::from_column_slice(b);
        let mut out = DVector::zeros(n);
        for (i, &lambda) in self.eigenvalues.iter().enumerate() {
            if !include_null && lambda < NULL_THRESHOLD {
                continue;
            }
            let u = self.eigenvectors.column(i);
            out += u * (f(lambda) * u.dot(&bv));
        }
        out.as_slice().to_vec()
    }
}

pub fn spectrum(g: &WeightedGraph) -> Result<DenseSpectrum> {
    let l = laplacian_dense(g)?;
    let (eigenvalues, eigenvectors) = jacobi_eigen(&l)?;
    Ok(DenseSpectrum {
        eigenvalues,
        eigenvectors,
        graph_hash: graph_hash(g),
    })
}

fn check_connected_pair(g: &WeightedGraph) -> Result<()> {
    if g.n() < 2 {
        return Err(Error::NotApplicable("λ₂ is undefined for a single vertex"));
    }
    g.check_connected()
}

pub fn lambda2_exact(g: &WeightedGraph) -> Result<f64> {
    check_connected_pair(g)?;
    spectrum(g)?
        .lambda2()
        .ok_or(Error::NotApplicable("no non-zero eigenvalue"))
}

/// `L† b`, with `b` implicitly projected onto `Im(L)`.
pub fn pseudo_inverse_apply(g: &WeightedGraph, b: &[f64]) -> Result<Vec<f64>> {
    g.check_connected()?;
    pseudo_inverse_apply_any(g, b)
}

/// `L† b` for any graph without isolated vertices, one null direction per component.
pub fn pseudo_inverse_apply_any(g: &WeightedGraph, b: &[f64]) -> Result<Vec<f64>> {
    if b.len() != g.n() {
        return Err(domain("vector length does not match the graph"));
    }
    Ok(spectrum(g)?.apply_fn(b, |l| 1.0 / l, false))
}

/// `M^k v` by repeated dense multiplication.
pub fn dense_power_apply(g: &WeightedGraph, k: u64, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != g.n() {
        return Err(domain("vector length does not match the graph"));
    }
    let m = m_dense(g)?;
    let mut x = DVector::from_column_slice(v);
    for _ in 0..k {
        x = &m * x;
    }
    Ok(x.as_slice().to_vec())
}

/// `P^k`.
pub fn transition_power(g: &WeightedGraph, k: u64) -> Result<DMatrix<f64>> {
    let p = transition_dense(g)?;
    let mut out = DMatrix::identity(g.n(), g.n());
    for _ in 0..k {
        out = &out * &p;
    }
    Ok(out)
}

/// How [`series_eval`] evaluated the truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesStrategy {
    /// Literal double sum over `j` and `k` with dense powers of `D^{1/2}PD^{-1/2}`.
    Direct,
    /// Per eigenvalue, with the Poisson sum over `k < K` replaced by
    /// `e^{-sλ}`; only used when the dropped tail mass `T e^{-K}` is below 1e-13.
    Spectral,
}

/// Above this many `(j, k)` pairs the direct route gives way to the spectral one.
pub const DIRECT_SERIES_LIMIT: u64 = 2_000_000;

/// `(T/N) Σ_{j=1..N} Σ_{k<K} 𝒫_{jT/N}(k) D^{1/2} P^k D^{-1/2} b`.
pub fn series_eval(g: &WeightedGraph, b: &[f64], params: &SeriesParams) -> Result<(Vec<f64>, SeriesStrategy)> {
    if params.n_terms.saturating_mul(params.k_terms) <= DIRECT_SERIES_LIMIT {
        Ok((series_eval_direct(g, b, params)?, SeriesStrategy::Direct))
    } else {
        Ok((series_eval_spectral(g, b, params)?, SeriesStrategy::Spectral))
    }
}

/// Coefficients `c_k = (T/N) Σ_j 𝒫_{jT/N}(k)` for `k < K`, evaluated with the exact pmf.
pub fn series_coefficients(params: &SeriesParams) -> Vec<f64> {
    let h = params.step();
    (0..params.k_terms)
        .map(|k| {
            h * (1..=params.n_terms)
                .map(|j| poisson_pmf_exact(j as f64 * h, k).expect("positive mean"))
                .sum::<f64>()
        })
        .collect()
}

pub fn series_eval_direct(g: &WeightedGraph, b: &[f64], params: &SeriesParams) -> Result<Vec<f64>> {
    check_dense(g, MAX_SERIES)?;
    if b.len() != g.n() {
        return Err(domain("vector length does not match the graph"));
    }
    let s = symmetric_walk_dense(g)?;
    let mut y = DVector::from_column_slice(b);
    let mut x = DVector::zeros(g.n());
    for c in series_coefficients(params) {
        x += &y * c;
        y = &s * y;
    }
    Ok(x.as_slice().to_vec())
}

pub fn series_eval_spectral(g: &WeightedGraph, b: &[f64], params: &SeriesParams) -> Result<Vec<f64>> {
    check_dense(g, MAX_SERIES)?;
    if b.len() != g.n() {
        return Err(domain("vector length does not match the graph"));
    }
    let t = params.t_horizon as f64;
    if t * (-(params.k_terms as f64)).exp() > 1e-13 {
        return Err(domain("Poisson tail too heavy for the spectral series route"));
    }
    let h = params.step();
    let n = params.n_terms as f64;
    let f = |lambda: f64| {
        if lambda <= 0.0 {
            t
        } else {
            h * -(-n * h * lambda).exp_m1() / (h * lambda).exp_m1()
        }
    };
    Ok(spectrum(g)?.apply_fn(b, f, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;
    use approx::assert_abs_diff_eq;

    fn max_abs(m: &DMatrix<f64>) -> f64 {
        m.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    #[test]
    fn k2_matrices() {
        let g = complete(2);
        let l = laplacian_dense(&g).unwrap();
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let m = m_dense(&g).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]));
    }

    #[test]
    fn loop_only_vertex_has_zero_diagonal() {
        let g = WeightedGraph::from_edges(1, &[(0, 0, 2.0)]).unwrap();
        assert_eq!(laplacian_dense(&g).unwrap()[(0, 0)], 0.0);
    }

    #[test]
    fn spectrum_examples() {
        let k2 = spectrum(&complete(2)).unwrap().eigenvalues;
        assert_abs_diff_eq!(k2[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k2[1], 2.0, epsilon = 1e-12);
        let k3 = spectrum(&complete(3)).unwrap().eigenvalues;
        for (got, want) in k3.iter().zip([0.0, 1.5, 1.5]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let p3 = spectrum(&path(3)).unwrap().eigenvalues;
        for (got, want) in p3.iter().zip([0.0, 1.0, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn jacobi_agrees_with_nalgebra() {
        for (name, g) in corpus() {
            let l = laplacian_dense(&g).unwrap();
            let (ours, _) = jacobi_eigen(&l).unwrap();
            let mut theirs: Vec<f64> = l.clone().symmetric_eigen().eigenvalues.iter().cloned().collect();
            theirs.sort_by(f64::total_cmp);
            for (a, b) in ours.iter().zip(&theirs) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
            }
            assert!(!name.is_empty());
        }
    }

    #[test]
    fn spectrum_invariants_on_corpus() {
        for (name, g) in corpus() {
            let sp = spectrum(&g).unwrap();
            let l = laplacian_dense(&g).unwrap();
            let u = &sp.eigenvectors;
            let lam = DMatrix::from_diagonal(&DVector::from_vec(sp.eigenvalues.clone()));
            let recon = u * lam * u.transpose();
            assert!(max_abs(&(&l - recon)) <= 1e-9, "{name}");
            let n = g.n();
            assert!(max_abs(&(u.transpose() * u - DMatrix::identity(n, n))) <= 1e-10, "{name}");
            assert!(sp.eigenvalues[0] >= -1e-10);
            assert!(sp.eigenvalues[n - 1] <= 2.0 + 1e-10);
            // u₁ matches the closed form up to sign.
            let u1 = sp.vector(0);
            let closed = DVector::from_vec(g.null_vector());
            let sign = u1.dot(&closed).signum();
            assert!((u1 * sign - closed).amax() < 1e-8, "{name}");
        }
    }

    #[test]
    fn laplacian_identity_with_walk_matrix() {
        for (name, g) in corpus() {
            let l = laplacian_dense(&g).unwrap();
            let s = symmetric_walk_dense(&g).unwrap();
            let n = g.n();
            assert!(max_abs(&(l - (DMatrix::identity(n, n) - s))) <= 1e-12, "{name}");
        }
    }

    #[test]
    fn complete_graph_lambda2() {
        for n in 4..=10 {
            let l2 = lambda2_exact(&complete(n)).unwrap();
            assert_abs_diff_eq!(l2, n as f64 / (n as f64 - 1.0), epsilon = 1e-9);
        }
    }

    #[test]
    fn pseudo_inverse_examples() {
        let s = 1.0 / 2f64.sqrt();
        let x = pseudo_inverse_apply(&complete(2), &[s, -s]).unwrap();
        assert_abs_diff_eq!(x[0], 0.353553, epsilon = 1e-6);
        assert_abs_diff_eq!(x[1], -0.353553, epsilon = 1e-6);
        let x = pseudo_inverse_apply(&complete(3), &[s, -s, 0.0]).unwrap();
        for (got, want) in x.iter().zip([s, -s, 0.0]) {
            assert_abs_diff_eq!(*got, want * 2.0 / 3.0, epsilon = 1e-12);
        }
        let two = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(matches!(pseudo_inverse_apply(&two, &[0.0; 4]), Err(Error::Disconnected { .. })));
    }

    #[test]
    fn pseudo_inverse_solves_the_system() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (name, g) in corpus() {
            let l = laplacian_dense(&g).unwrap();
            let u1 = DVector::from_vec(g.null_vector());
            for _ in 0..20 {
                let b = DVector::from_fn(g.n(), |_, _| rng.random::<f64>() - 0.5);
                let x = DVector::from_vec(pseudo_inverse_apply(&g, b.as_slice()).unwrap());
                let proj = &b - &u1 * u1.dot(&b);
                assert!((&l * x - proj).amax() < 1e-8, "{name}");
            }
        }
    }

    #[test]
    fn power_apply_identity() {
        let v = [0.3, -0.2, 0.5, 0.1];
        assert_eq!(dense_power_apply(&cycle(4), 0, &v).unwrap(), v.to_vec());
    }

    #[test]
    fn size_limits() {
        let big = cycle(501);
        assert!(matches!(spectrum(&big), Err(Error::Size { n: 501, max: 500 })));
        let mid = cycle(201);
        let params = SeriesParams::new(1.0, 2.0).unwrap();
        assert!(matches!(
            series_eval(&mid, &vec![0.0; 201], &params),
            Err(Error::Size { .. })
        ));
    }

    #[test]
    fn series_routes_agree() {
        let g = path(5);
        let b = g.project_to_image(&[1.0, 0.0, -2.0, 0.5, 0.0]).unwrap();
        let params = SeriesParams::new(0.2, 0.5).unwrap();
        assert!(params.t_horizon as f64 * (-(params.k_terms as f64)).exp() < 1e-13);
        let direct = series_eval_direct(&g, b.as_slice(), &params).unwrap();
        let spectral = series_eval_spectral(&g, b.as_slice(), &params).unwrap();
        for (a, c) in direct.iter().zip(&spectral) {
            assert_abs_diff_eq!(*a, *c, epsilon = 1e-10);
        }
    }
}
