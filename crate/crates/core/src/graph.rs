//! Undirected weighted graphs and the structural quantities the walk
//! algorithms depend on.
//!
//! Vertices are `0..n`. The adjacency list of every vertex is sorted by
//! neighbor index; a loop `(i, i, w)` appears once in the list of `i` and
//! contributes `w` once to `d_i`.

use std::collections::{BTreeMap, VecDeque};
use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::IMAGE_TOLERANCE;

/// Undirected graph with strictly positive weights and cached degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
}

/// Parsing switches for [`parse_edge_list`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// When set (the default), each undirected edge is listed once and
    /// mirrored on load. When unset, both directions must be listed with
    /// identical weights and a missing mirror is an [`Error::Asymmetry`].
    pub symmetrize: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self { symmetrize: true }
    }
}

impl WeightedGraph {
    /// Build from undirected edges `(u, v, w)`, each listed once.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut seen = BTreeMap::new();
        for (line, &(u, v, w)) in edges.iter().enumerate() {
            check_edge(n, u, v, w, line + 1)?;
            let key = (u.min(v), u.max(v));
            if seen.insert(key, w).is_some() {
                return Err(Error::Parse {
                    line: line + 1,
                    msg: format!("edge ({}, {}) listed twice", key.0, key.1),
                });
            }
        }
        Ok(Self::from_undirected(n, seen))
    }

    fn from_undirected(n: usize, edges: BTreeMap<(usize, usize), f64>) -> Self {
        let mut adjacency = vec![Vec::new(); n];
        for (&(u, v), &w) in &edges {
            adjacency[u].push((v, w));
            if u != v {
                adjacency[v].push((u, w));
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(j, _)| j);
        }
        let degrees = adjacency.iter().map(|l| row_sum(l)).collect();
        Self { adjacency, degrees }
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// Weight `w(i, j)`, zero when the pair is not an edge.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        match self.adjacency[i].binary_search_by_key(&j, |&(k, _)| k) {
            Ok(pos) => self.adjacency[i][pos].1,
            Err(_) => 0.0,
        }
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Number of undirected edges, loops included.
    pub fn edge_count(&self) -> usize {
        let loops = (0..self.n()).filter(|&v| self.weight(v, v) > 0.0).count();
        let entries: usize = self.adjacency.iter().map(Vec::len).sum();
        (entries - loops) / 2 + loops
    }

    /// `vol(G) = Σ d_ℓ`.
    pub fn volume(&self) -> f64 {
        self.degrees.iter().sum()
    }

    pub fn check_no_isolated(&self) -> Result<()> {
        match self.degrees.iter().position(|&d| d <= 0.0) {
            Some(v) => Err(Error::IsolatedVertex(v)),
            None => Ok(()),
        }
    }

    /// `max_i d_i / min_i d_i`.
    pub fn degree_ratio(&self) -> Result<f64> {
        self.check_no_isolated()?;
        let max = self.degrees.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.degrees.iter().cloned().fold(f64::MAX, f64::min);
        Ok(max / min)
    }

    /// Connected components in order of their smallest vertex; each part sorted.
    pub fn connected_components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut parts = Vec::new();
        for root in 0..n {
            if label[root] != usize::MAX {
                continue;
            }
            let id = parts.len();
            let mut part = vec![root];
            label[root] = id;
            let mut queue = VecDeque::from([root]);
            while let Some(v) = queue.pop_front() {
                for &(u, _) in &self.adjacency[v] {
                    if label[u] == usize::MAX {
                        label[u] = id;
                        part.push(u);
                        queue.push_back(u);
                    }
                }
            }
            part.sort_unstable();
            parts.push(part);
        }
        parts
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    pub fn check_connected(&self) -> Result<()> {
        let components = self.connected_components().len();
        if components > 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(())
    }

    fn bfs_eccentricity(&self, source: usize) -> usize {
        let mut dist = vec![usize::MAX; self.n()];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        let mut far = 0;
        while let Some(v) = queue.pop_front() {
            far = far.max(dist[v]);
            for &(u, _) in &self.adjacency[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        far
    }

    /// Largest unweighted hop distance between two vertices.
    pub fn hop_diameter(&self) -> Result<usize> {
        self.check_connected()?;
        Ok((0..self.n())
            .map(|s| self.bfs_eccentricity(s))
            .max()
            .unwrap_or(0))
    }

    /// Lower bound `1 / (diam(G) · vol(G))` on λ₂, clamped into `(0, 2]`.
    pub fn lambda2_lower_bound(&self) -> Result<f64> {
        if self.n() < 2 {
            return Err(Error::NotApplicable("λ₂ is undefined for a single vertex"));
        }
        let diam = self.hop_diameter()?;
        self.check_no_isolated()?;
        Ok((1.0 / (diam as f64 * self.volume())).min(2.0))
    }

    /// `u₁ = (√d₁, …, √dₙ) / √vol(G)`, the null vector of `L_G`.
    pub fn null_vector(&self) -> Vec<f64> {
        let vol = self.volume();
        self.degrees.iter().map(|d| (d / vol).sqrt()).collect()
    }

    /// `v − ⟨u₁, v⟩ u₁` for a connected graph.
    pub fn project_to_image(&self, v: &[f64]) -> Result<ImageVector> {
        self.check_len(v)?;
        self.check_connected()?;
        self.check_no_isolated()?;
        let u1 = self.null_vector();
        let mut out = remove_component(v, &u1);
        // A second pass removes the rounding residue of the first.
        out = remove_component(&out, &u1);
        Ok(ImageVector { entries: out })
    }

    /// Projects every component's restriction of `v` onto that component's image.
    pub fn project_per_component(&self, v: &[f64]) -> Result<Vec<f64>> {
        self.check_len(v)?;
        self.check_no_isolated()?;
        let mut out = v.to_vec();
        for part in self.connected_components() {
            let sub = self.induced_subgraph(&part);
            let local: Vec<f64> = part.iter().map(|&i| v[i]).collect();
            let projected = sub.project_to_image(&local)?;
            for (&i, &x) in part.iter().zip(projected.as_slice()) {
                out[i] = x;
            }
        }
        Ok(out)
    }

    /// Largest `|⟨v, u₁^C⟩|` over the components `C` of the graph.
    pub fn image_residual(&self, v: &[f64]) -> Result<f64> {
        self.check_len(v)?;
        self.check_no_isolated()?;
        let mut worst: f64 = 0.0;
        for part in self.connected_components() {
            let vol: f64 = part.iter().map(|&i| self.degrees[i]).sum();
            let dot: f64 = part
                .iter()
                .map(|&i| v[i] * (self.degrees[i] / vol).sqrt())
                .sum();
            worst = worst.max(dot.abs());
        }
        Ok(worst)
    }

    /// Subgraph induced by `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> WeightedGraph {
        let mut local = vec![usize::MAX; self.n()];
        for (k, &v) in vertices.iter().enumerate() {
            local[v] = k;
        }
        let mut edges = BTreeMap::new();
        for (k, &v) in vertices.iter().enumerate() {
            for &(u, w) in &self.adjacency[v] {
                let j = local[u];
                if j != usize::MAX && k <= j {
                    edges.insert((k, j), w);
                }
            }
        }
        WeightedGraph::from_undirected(vertices.len(), edges)
    }

    fn check_len(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.n() {
            return Err(domain(format!(
                "vector has length {}, graph has {} vertices",
                v.len(),
                self.n()
            )));
        }
        Ok(())
    }
}

fn row_sum(list: &[(usize, f64)]) -> f64 {
    if list.len() > 1000 {
        neumaier_sum(list.iter().map(|&(_, w)| w))
    } else {
        list.iter().map(|&(_, w)| w).sum()
    }
}

/// Compensated (Neumaier) summation.
pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn remove_component(v: &[f64], unit: &[f64]) -> Vec<f64> {
    let dot: f64 = v.iter().zip(unit).map(|(a, b)| a * b).sum();
    v.iter().zip(unit).map(|(a, u)| a - dot * u).collect()
}

fn check_edge(n: usize, u: usize, v: usize, w: f64, line: usize) -> Result<()> {
    for index in [u, v] {
        if index >= n {
            return Err(Error::Index { index, n });
        }
    }
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Weight { line, weight: w });
    }
    Ok(())
}

/// A vector orthogonal to `u₁` (within [`IMAGE_TOLERANCE`] relative to its norm).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageVector {
    entries: Vec<f64>,
}

impl ImageVector {
    /// Accepts `v` only if it already lies in `Im(L_G)` of the connected graph `g`.
    pub fn new(g: &WeightedGraph, v: Vec<f64>) -> Result<Self> {
        g.check_len(&v)?;
        g.check_connected()?;
        g.check_no_isolated()?;
        let u1 = g.null_vector();
        let dot: f64 = v.iter().zip(&u1).map(|(a, b)| a * b).sum();
        let norm = norm2(&v);
        if dot.abs() > IMAGE_TOLERANCE * norm.max(f64::MIN_POSITIVE) && dot.abs() > 0.0 {
            return Err(Error::NotInImage {
                residual: dot.abs(),
            });
        }
        Ok(Self { entries: v })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn norm(&self) -> f64 {
        norm2(&self.entries)
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: format!("missing {what}"),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("invalid {what} `{tok}`"),
    })
}

/// Parse the edge-list format: a header `n m`, then `m` lines `u v w`.
/// Lines starting with `#` and blank lines are ignored.
pub fn parse_edge_list(text: &str, opts: LoadOptions) -> Result<WeightedGraph> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty document".into(),
    })?;
    let mut toks = header.split_whitespace();
    let n: usize = parse_field(toks.next(), hline, "vertex count")?;
    let m: usize = parse_field(toks.next(), hline, "edge count")?;
    if toks.next().is_some() {
        return Err(Error::Parse {
            line: hline,
            msg: "header must be `n m`".into(),
        });
    }

    let mut entries = Vec::with_capacity(m);
    for (line, content) in lines {
        let mut toks = content.split_whitespace();
        let u: usize = parse_field(toks.next(), line, "source vertex")?;
        let v: usize = parse_field(toks.next(), line, "target vertex")?;
        let w: f64 = parse_field(toks.next(), line, "weight")?;
        if toks.next().is_some() {
            return Err(Error::Parse {
                line,
                msg: "trailing tokens after weight".into(),
            });
        }
        check_edge(n, u, v, w, line)?;
        entries.push((line, u, v, w));
    }
    if entries.len() != m {
        return Err(Error::Parse {
            line: hline,
            msg: format!("header announces {m} edges, found {}", entries.len()),
        });
    }

    let mut undirected = BTreeMap::new();
    if opts.symmetrize {
        for &(line, u, v, w) in &entries {
            if undirected.insert((u.min(v), u.max(v)), w).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("edge ({u}, {v}) listed twice"),
                });
            }
        }
    } else {
        let mut directed = BTreeMap::new();
        for &(line, u, v, w) in &entries {
            if directed.insert((u, v), w).is_some() {
                return Err(Error::Parse {
                    line,
                    msg: format!("entry ({u}, {v}) listed twice"),
                });
            }
        }
        for (&(u, v), &w) in &directed {
            match directed.get(&(v, u)) {
                Some(&back) if back == w => {
                    undirected.insert((u.min(v), u.max(v)), w);
                }
                _ => return Err(Error::Asymmetry { u, v }),
            }
        }
    }
    Ok(WeightedGraph::from_undirected(n, undirected))
}

pub fn load_graph(path: impl AsRef<Path>, opts: LoadOptions) -> Result<WeightedGraph> {
    parse_edge_list(&std::fs::read_to_string(path)?, opts)
}

/// Render in the edge-list format; `parse_edge_list` reads it back unchanged.
pub fn write_edge_list(g: &WeightedGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for u in 0..g.n() {
        for &(v, w) in g.neighbors(u) {
            if u <= v {
                out.push_str(&format!("{u} {v} {w:?}\n"));
            }
        }
    }
    out
}

/// Parse a vector file: one decimal per line, `#` comments allowed.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    content_lines(text)
        .map(|(line, l)| parse_field(Some(l), line, "vector entry"))
        .collect()
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_vector(&std::fs::read_to_string(path)?)
}

/// Small deterministic graph families used by tests and examples.
pub mod generators {
    use super::WeightedGraph;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn build(n: usize, edges: Vec<(usize, usize, f64)>) -> WeightedGraph {
        WeightedGraph::from_edges(n, &edges).expect("generator produced an invalid edge list")
    }

    /// `K_n` with unit weights.
    pub fn complete(n: usize) -> WeightedGraph {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j, 1.0)))
            .collect();
        build(n, edges)
    }

    /// `C_n` with unit weights, `n ≥ 3`.
    pub fn cycle(n: usize) -> WeightedGraph {
        assert!(n >= 3, "a cycle needs at least 3 vertices");
        build(n, (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect())
    }

    /// `P_n`: `n` vertices on a line.
    pub fn path(n: usize) -> WeightedGraph {
        build(n, (1..n).map(|i| (i - 1, i, 1.0)).collect())
    }

    /// `K_{1,leaves}` with the center at vertex 0.
    pub fn star(leaves: usize) -> WeightedGraph {
        build(leaves + 1, (1..=leaves).map(|i| (0, i, 1.0)).collect())
    }

    /// `G(n, p)` with weights uniform in `[lo, hi]`. May be disconnected.
    pub fn erdos_renyi(n: usize, p: f64, lo: f64, hi: f64, seed: u64) -> WeightedGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((i, j, lo + (hi - lo) * rng.random::<f64>()));
                }
            }
        }
        build(n, edges)
    }

    /// First connected `G(n, p)` found by trying seeds `seed, seed + 1, …`.
    pub fn connected_erdos_renyi(n: usize, p: f64, lo: f64, hi: f64, seed: u64) -> WeightedGraph {
        (seed..)
            .map(|s| erdos_renyi(n, p, lo, hi, s))
            .find(|g| g.is_connected() && g.check_no_isolated().is_ok())
            .expect("unbounded seed search")
    }

    /// The fixed validation corpus: `K₂…K₆`, `C₄…C₈`, `P₃…P₆`, `K₁,₅` and five
    /// weighted connected random graphs on at most 20 vertices.
    pub fn corpus() -> Vec<(String, WeightedGraph)> {
        let mut out = Vec::new();
        for n in 2..=6 {
            out.push((format!("K{n}"), complete(n)));
        }
        for n in 4..=8 {
            out.push((format!("C{n}"), cycle(n)));
        }
        for n in 3..=6 {
            out.push((format!("P{n}"), path(n)));
        }
        out.push(("K1,5".into(), star(5)));
        for (k, &(n, p)) in [(8, 0.4), (10, 0.35), (12, 0.3), (16, 0.25), (20, 0.2)]
            .iter()
            .enumerate()
        {
            let g = connected_erdos_renyi(n, p, 0.5, 2.0, 1000 + 100 * k as u64);
            out.push((format!("ER{n}"), g));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::generators::*;
    use super::*;
    use approx::assert_abs_diff_eq;

    fn parse(text: &str) -> Result<WeightedGraph> {
        parse_edge_list(text, LoadOptions::default())
    }

    #[test]
    fn loads_single_edge_and_triangle() {
        let k2 = parse("2 1\n0 1 1.0").unwrap();
        assert_eq!(k2.degrees(), &[1.0, 1.0]);
        let k3 = parse("3 3\n0 1 1\n1 2 1\n0 2 1").unwrap();
        assert_eq!(k3.degrees(), &[2.0, 2.0, 2.0]);
        assert_eq!(k3, complete(3));
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(parse("2 1\n0 1 -1"), Err(Error::Weight { .. })));
        assert!(matches!(parse("2 1\n0 1 0"), Err(Error::Weight { .. })));
        assert!(matches!(parse("2 1\n0 2 1"), Err(Error::Index { index: 2, n: 2 })));
        assert!(matches!(parse("2 1\n0 x 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("2 2\n0 1 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse("2 2\n0 1 1\n1 0 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse(""), Err(Error::Parse { .. })));
    }

    #[test]
    fn comments_and_loops() {
        let g = parse("# a loop\n2 2\n0 1 2.0\n# weight 3 loop\n1 1 3.0\n").unwrap();
        assert_eq!(g.degrees(), &[2.0, 5.0]);
        assert_eq!(g.weight(1, 1), 3.0);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn strict_symmetry_mode() {
        let opts = LoadOptions { symmetrize: false };
        let ok = parse_edge_list("2 2\n0 1 1.5\n1 0 1.5", opts).unwrap();
        assert_eq!(ok.degrees(), &[1.5, 1.5]);
        assert!(matches!(
            parse_edge_list("2 1\n0 1 1.5", opts),
            Err(Error::Asymmetry { u: 0, v: 1 })
        ));
        assert!(matches!(
            parse_edge_list("2 2\n0 1 1.5\n1 0 2.5", opts),
            Err(Error::Asymmetry { .. })
        ));
    }

    #[test]
    fn degree_ratio_examples() {
        assert_eq!(complete(3).degree_ratio().unwrap(), 1.0);
        assert_eq!(path(3).degree_ratio().unwrap(), 2.0);
        assert_eq!(star(3).degree_ratio().unwrap(), 3.0);
        let isolated = WeightedGraph::from_edges(3, &[(0, 1, 1.0)]).unwrap();
        assert_eq!(isolated.degree_ratio(), Err(Error::IsolatedVertex(2)));
    }

    #[test]
    fn volume_examples() {
        assert_eq!(complete(2).volume(), 2.0);
        assert_eq!(complete(3).volume(), 6.0);
        assert_eq!(path(3).volume(), 4.0);
    }

    #[test]
    fn components_examples() {
        assert_eq!(complete(3).connected_components(), vec![vec![0, 1, 2]]);
        let two = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(!two.is_connected());
        assert_eq!(two.connected_components(), vec![vec![0, 1], vec![2, 3]]);
        let single = WeightedGraph::from_edges(1, &[]).unwrap();
        assert!(single.is_connected());
        assert_eq!(single.connected_components(), vec![vec![0]]);
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(complete(3).hop_diameter().unwrap(), 1);
        assert_eq!(path(3).hop_diameter().unwrap(), 2);
        assert_eq!(cycle(5).hop_diameter().unwrap(), 2);
        let two = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(two.hop_diameter(), Err(Error::Disconnected { components: 2 }));
    }

    #[test]
    fn lambda2_lower_bound_examples() {
        assert_eq!(complete(2).lambda2_lower_bound().unwrap(), 0.5);
        assert_eq!(path(3).lambda2_lower_bound().unwrap(), 0.125);
        assert_abs_diff_eq!(complete(3).lambda2_lower_bound().unwrap(), 1.0 / 6.0);
        let single = WeightedGraph::from_edges(1, &[]).unwrap();
        assert!(matches!(single.lambda2_lower_bound(), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn projection_examples() {
        let s = 1.0 / 2f64.sqrt();
        let k2 = complete(2);
        let p = k2.project_to_image(&[s, -s]).unwrap();
        assert_abs_diff_eq!(p.as_slice()[0], s, epsilon = 1e-15);
        assert_abs_diff_eq!(p.as_slice()[1], -s, epsilon = 1e-15);
        let z = k2.project_to_image(&[1.0, 1.0]).unwrap();
        assert!(z.norm() < 1e-15);
        let k3 = complete(3).project_to_image(&[1.0, 0.0, 0.0]).unwrap();
        for (got, want) in k3.as_slice().iter().zip([2.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn image_vector_rejects_null_direction() {
        let k2 = complete(2);
        assert!(matches!(
            ImageVector::new(&k2, vec![1.0, 1.0]),
            Err(Error::NotInImage { .. })
        ));
        assert!(ImageVector::new(&k2, vec![0.0, 0.0]).is_ok());
    }

    #[test]
    fn per_component_projection() {
        let two = WeightedGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let p = two.project_per_component(&[1.0, 0.0, 0.0, 3.0]).unwrap();
        for (a, b) in p.iter().zip([0.5, -0.5, -1.5, 1.5]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(two.image_residual(&p).unwrap() < 1e-15);
    }

    #[test]
    fn corpus_is_connected_and_symmetric() {
        for (name, g) in corpus() {
            assert!(g.is_connected(), "{name}");
            for u in 0..g.n() {
                for &(v, w) in g.neighbors(u) {
                    assert_eq!(g.weight(v, u), w, "{name}");
                }
            }
            assert!(g.n() <= 20);
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = connected_erdos_renyi(12, 0.3, 0.5, 2.0, 5);
        let back = parse(&write_edge_list(&g)).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn vector_file() {
        assert_eq!(parse_vector("# b\n0.5\n-0.5\n").unwrap(), vec![0.5, -0.5]);
        assert!(parse_vector("1\nfoo\n").is_err());
    }
}
