//! Centrality and clustering measures, plus rank correlations.

use super::{bfs_distances, Graph};
use crate::{Error, Result};

/// Per-node centralities and graph-level clustering summaries.
#[derive(Debug, Clone)]
pub struct GraphMetrics {
    pub degree: Vec<f64>,
    /// Harmonic closeness, normalized by n-1; 0 for isolated nodes.
    pub closeness: Vec<f64>,
    /// Betweenness, normalized by 2/((n-1)(n-2)).
    pub betweenness: Vec<f64>,
    /// Eigenvector centrality, unit Euclidean norm, entrywise >= 0.
    pub eigenvector: Vec<f64>,
    pub local_clustering: Vec<f64>,
    pub mean_clustering: f64,
    pub transitivity: f64,
}

/// Which clustering summary to report when a single scalar is wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClusteringKind {
    MeanLocal,
    Transitivity,
}

pub fn clustering(metrics: &GraphMetrics, kind: ClusteringKind) -> f64 {
    match kind {
        ClusteringKind::MeanLocal => metrics.mean_clustering,
        ClusteringKind::Transitivity => metrics.transitivity,
    }
}

pub fn compute_metrics(g: &Graph) -> Result<GraphMetrics> {
    let n = g.n_nodes();
    if n == 0 {
        return Err(Error::invalid("metrics need a non-empty graph"));
    }
    let adj = g.adjacency_list();
    let degree: Vec<f64> = adj.iter().map(|nb| nb.len() as f64).collect();

    let mut closeness = vec![0.0; n];
    for i in 0..n {
        let dist = bfs_distances(g, i)?;
        let sum: f64 = dist
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .filter_map(|(_, d)| d.map(|d| 1.0 / d as f64))
            .sum();
        if n > 1 {
            closeness[i] = sum / (n - 1) as f64;
        }
    }

    let betweenness = brandes_betweenness(g, &adj);
    let eigenvector = eigenvector_centrality(g, 1e-10, 100_000)?;

    let mut local_clustering = vec![0.0; n];
    let mut wedges_total = 0.0;
    let mut closed_total = 0.0;
    for i in 0..n {
        let nb = &adj[i];
        let d = nb.len();
        if d < 2 {
            continue;
        }
        let mut links = 0usize;
        for (a, &u) in nb.iter().enumerate() {
            for &v in &nb[a + 1..] {
                if g.has_edge(u, v) {
                    links += 1;
                }
            }
        }
        let wedges = (d * (d - 1)) as f64;
        local_clustering[i] = 2.0 * links as f64 / wedges;
        wedges_total += wedges;
        closed_total += 2.0 * links as f64;
    }
    let mean_clustering = local_clustering.iter().sum::<f64>() / n as f64;
    let transitivity = if wedges_total > 0.0 {
        closed_total / wedges_total
    } else {
        0.0
    };

    Ok(GraphMetrics {
        degree,
        closeness,
        betweenness,
        eigenvector,
        local_clustering,
        mean_clustering,
        transitivity,
    })
}

/// Brandes' algorithm for unweighted betweenness.
fn brandes_betweenness(g: &Graph, adj: &[Vec<usize>]) -> Vec<f64> {
    let n = g.n_nodes();
    let mut bc = vec![0.0; n];
    for s in 0..n {
        let mut stack = Vec::with_capacity(n);
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![-1i64; n];
        sigma[s] = 1.0;
        dist[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            stack.push(v);
            for &w in &adj[v] {
                if dist[w] < 0 {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
                if dist[w] == dist[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let mut delta = vec![0.0f64; n];
        while let Some(w) = stack.pop() {
            for &v in &preds[w] {
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    // each undirected pair counted twice; normalize to [0, 1]
    if n > 2 {
        let scale = 1.0 / ((n - 1) as f64 * (n - 2) as f64);
        for b in &mut bc {
            *b *= scale;
        }
    }
    bc
}

/// Power iteration on A + I (the shift keeps bipartite spectra from
/// oscillating), normalized to unit Euclidean norm.
fn eigenvector_centrality(g: &Graph, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let n = g.n_nodes();
    let adj = g.adjacency_list();
    if g.n_edges() == 0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![1.0 / (n as f64).sqrt(); n];
    for _ in 0..max_iter {
        let mut y = x.clone(); // the +I term
        for i in 0..n {
            for &j in &adj[i] {
                y[i] += x[j];
            }
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for v in &mut y {
            *v /= norm;
        }
        let delta = x
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        x = y;
        if delta < tol {
            return Ok(x);
        }
    }
    Err(Error::numeric(
        "eigenvector_centrality",
        "power iteration did not converge",
    ))
}

/// Sample Pearson and Spearman correlation coefficients.
pub fn correlate(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::invalid("correlate: length mismatch"));
    }
    if x.len() < 3 {
        return Err(Error::invalid("correlate: need at least 3 samples"));
    }
    let p = pearson(x, y)?;
    let s = pearson(&ranks(x), &ranks(y))?;
    Ok((p, s))
}

fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "constant input has no correlation".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Fractional ranks with ties averaged.
fn ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    let mut r = vec![0.0; x.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            r[idx] = avg;
        }
        i = j + 1;
    }
    r
}
