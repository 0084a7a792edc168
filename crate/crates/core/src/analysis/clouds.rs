//! Cluster-by-cluster comparison of two point clouds.

use crate::error::{Error, Result};

/// Lloyd refinement passes after the initial nearest-seed assignment.
const LLOYD_PASSES: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterComparison {
    pub seed: (f64, f64),
    pub n_a: usize,
    pub n_b: usize,
    pub centroid_a: (f64, f64),
    pub centroid_b: (f64, f64),
    /// Per-axis standard deviations.
    pub std_a: (f64, f64),
    pub std_b: (f64, f64),
    /// Distance between the centroids.
    pub offset: f64,
    /// `√(var_x + var_y)` of each set.
    pub total_std_a: f64,
    pub total_std_b: f64,
    /// `total_std_a / total_std_b`.
    pub std_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CloudComparison {
    pub clusters: Vec<ClusterComparison>,
}

fn nearest(p: (f64, f64), centers: &[(f64, f64)]) -> usize {
    let d2 = |c: &(f64, f64)| (p.0 - c.0).powi(2) + (p.1 - c.1).powi(2);
    centers
        .iter()
        .enumerate()
        .min_by(|a, b| d2(a.1).total_cmp(&d2(b.1)))
        .map_or(0, |(i, _)| i)
}

/// Assign points to clusters starting from `seeds` and refine the centres.
fn cluster(points: &[(f64, f64)], seeds: &[(f64, f64)]) -> Result<Vec<Vec<(f64, f64)>>> {
    let mut centers = seeds.to_vec();
    let mut groups = vec![Vec::new(); seeds.len()];
    for pass in 0..=LLOYD_PASSES {
        groups.iter_mut().for_each(Vec::clear);
        for &p in points {
            groups[nearest(p, &centers)].push(p);
        }
        if let Some(k) = groups.iter().position(Vec::is_empty) {
            return Err(Error::DegenerateClustering { cluster: k });
        }
        if pass < LLOYD_PASSES {
            for (c, g) in centers.iter_mut().zip(&groups) {
                *c = moments(g).0;
            }
        }
    }
    Ok(groups)
}

/// Mean and per-axis standard deviation (population).
fn moments(points: &[(f64, f64)]) -> ((f64, f64), (f64, f64)) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let vx = points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / n;
    let vy = points.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / n;
    ((mx, my), (vx.sqrt(), vy.sqrt()))
}

/// Cluster both sets around `seeds` (normally a deterministic cycle) and
/// compare matching clusters.
pub fn compare_clouds(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    seeds: &[(f64, f64)],
) -> Result<CloudComparison> {
    if a.is_empty() || b.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidConfig(
            "compare_clouds needs non-empty inputs".into(),
        ));
    }
    let ga = cluster(a, seeds)?;
    let gb = cluster(b, seeds)?;
    let clusters = seeds
        .iter()
        .zip(ga.iter().zip(&gb))
        .map(|(&seed, (pa, pb))| {
            let (ca, sa) = moments(pa);
            let (cb, sb) = moments(pb);
            let ta = sa.0.hypot(sa.1);
            let tb = sb.0.hypot(sb.1);
            ClusterComparison {
                seed,
                n_a: pa.len(),
                n_b: pb.len(),
                centroid_a: ca,
                centroid_b: cb,
                std_a: sa,
                std_b: sb,
                offset: (ca.0 - cb.0).hypot(ca.1 - cb.1),
                total_std_a: ta,
                total_std_b: tb,
                std_ratio: ta / tb,
            }
        })
        .collect();
    Ok(CloudComparison { clusters })
}
