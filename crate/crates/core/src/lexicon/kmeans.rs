//! Lloyd's k-means with k-means++ seeding over two-dimensional score pairs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ScorePair;
use crate::error::{Error, Result};

type Point = [f64; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    /// Cluster index of every input point.
    pub assignments: Vec<usize>,
    pub centroids: Vec<ScorePair>,
    /// Update steps performed before assignments stopped changing.
    pub iterations: usize,
    /// Within-cluster sum of squares after each assignment step.
    pub inertia: Vec<f64>,
}

impl KMeans {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.centroids.len()];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }
}

fn dist2(a: &Point, b: &Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn nearest(p: &Point, centroids: &[Point]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centroids.iter().enumerate() {
        let d = dist2(p, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

fn seed_plus_plus(points: &[Point], k: usize, rng: &mut ChaCha8Rng) -> Vec<Point> {
    let mut centroids = vec![points[rng.gen_range(0..points.len())]];
    let mut d2: Vec<f64> = points.iter().map(|p| dist2(p, &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 && target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.gen_range(0..points.len())
        };
        let c = points[pick];
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(dist2(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Clusters `points` into `k` groups, deterministically for a given seed.
///
/// Ties in the assignment step go to the lowest cluster index. A cluster left
/// empty after assignment is re-seeded with the point lying farthest from
/// its current centroid; when every point already sits on its centroid the
/// cluster stays empty.
pub fn kmeans(points: &[ScorePair], k: usize, seed: u64, max_iter: usize) -> Result<KMeans> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if points.len() < k {
        return Err(Error::TooFewPoints {
            k,
            points: points.len(),
        });
    }
    let points: Vec<Point> = points.iter().map(|p| [p.avg, p.log]).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_plus_plus(&points, k, &mut rng);

    let mut assignments: Vec<usize> = Vec::new();
    let mut inertia = Vec::new();
    let mut iterations = 0;
    while iterations < max_iter.max(1) {
        let mut next = Vec::with_capacity(points.len());
        let mut cost = Vec::with_capacity(points.len());
        for p in &points {
            let (j, d) = nearest(p, &centroids);
            next.push(j);
            cost.push(d);
        }
        inertia.push(cost.iter().sum());
        if next == assignments {
            break;
        }
        assignments = next;

        let mut sizes = vec![0usize; k];
        for &a in &assignments {
            sizes[a] += 1;
        }
        for j in 0..k {
            if sizes[j] > 0 {
                continue;
            }
            let donor = (0..points.len())
                .filter(|&i| sizes[assignments[i]] > 1 && cost[i] > 0.0)
                .max_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(b.cmp(&a)));
            if let Some(i) = donor {
                sizes[assignments[i]] -= 1;
                sizes[j] = 1;
                assignments[i] = j;
                cost[i] = 0.0;
                centroids[j] = points[i];
            }
        }

        let mut sums = vec![[0.0f64; 2]; k];
        for (p, &a) in points.iter().zip(&assignments) {
            sums[a][0] += p[0];
            sums[a][1] += p[1];
        }
        for j in 0..k {
            if sizes[j] > 0 {
                centroids[j] = [sums[j][0] / sizes[j] as f64, sums[j][1] / sizes[j] as f64];
            }
        }
        iterations += 1;
    }

    Ok(KMeans {
        assignments,
        centroids: centroids
            .into_iter()
            .map(|[avg, log]| ScorePair { avg, log })
            .collect(),
        iterations,
        inertia,
    })
}
