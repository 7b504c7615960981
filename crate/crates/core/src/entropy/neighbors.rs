//! Exact k-th nearest neighbor distances.
//!
//! Both backends order candidates by `(squared distance, index)` and compute
//! squared distances with the same coordinate-order summation, so they return
//! bit-identical results.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::FeatureMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborBackend {
    BruteForce,
    /// k-d tree with exact search.
    #[default]
    Tree,
}

const LEAF_SIZE: usize = 16;

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Candidate neighbor, ordered by distance then index.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    dist2: f64,
    index: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dist2
            .total_cmp(&other.dist2)
            .then(self.index.cmp(&other.index))
    }
}

/// Euclidean distance from each point to its k-th nearest other point.
pub fn kth_neighbor_distances(
    points: &FeatureMatrix,
    k: usize,
    backend: NeighborBackend,
) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::Domain("k must be >= 1".into()));
    }
    let n = points.n();
    if n <= k {
        return Err(Error::InsufficientPoints {
            n,
            k,
            required: k + 1,
        });
    }
    let dist2 = match backend {
        NeighborBackend::BruteForce => brute_force(points, k),
        NeighborBackend::Tree => KdTree::build(points).kth_distances(k),
    };
    Ok(dist2.into_iter().map(f64::sqrt).collect())
}

fn brute_force(points: &FeatureMatrix, k: usize) -> Vec<f64> {
    let n = points.n();
    (0..n)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n - 1),
            |buf, i| {
                buf.clear();
                let p = points.row(i);
                buf.extend((0..n).filter(|&j| j != i).map(|j| Candidate {
                    dist2: squared_distance(p, points.row(j)),
                    index: j,
                }));
                let (_, kth, _) = buf.select_nth_unstable(k - 1);
                kth.dist2
            },
        )
        .collect()
}

#[derive(Debug)]
enum Node {
    Leaf {
        start: usize,
        end: usize,
    },
    Split {
        axis: usize,
        value: f64,
        left: usize,
        right: usize,
    },
}

/// Bucketed k-d tree over the rows of a feature matrix. Splits on the
/// widest axis at the median.
struct KdTree<'a> {
    points: &'a FeatureMatrix,
    order: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    fn build(points: &'a FeatureMatrix) -> Self {
        let mut tree = KdTree {
            points,
            order: (0..points.n()).collect(),
            nodes: Vec::new(),
        };
        tree.build_node(0, points.n());
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let axis = self.widest_axis(start, end);
        let points = self.points;
        let slice = &mut self.order[start..end];
        let mid = slice.len() / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            points.row(a)[axis]
                .total_cmp(&points.row(b)[axis])
                .then(a.cmp(&b))
        });
        let value = points.row(slice[mid])[axis];
        self.nodes.push(Node::Leaf { start, end });
        let left = self.build_node(start, start + mid);
        let right = self.build_node(start + mid, end);
        self.nodes[id] = Node::Split {
            axis,
            value,
            left,
            right,
        };
        id
    }

    fn widest_axis(&self, start: usize, end: usize) -> usize {
        let d = self.points.d();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for &i in &self.order[start..end] {
            for (j, &v) in self.points.row(i).iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        (0..d)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])).then(b.cmp(&a)))
            .unwrap_or(0)
    }

    fn kth_distances(&self, k: usize) -> Vec<f64> {
        (0..self.points.n())
            .into_par_iter()
            .map_init(
                || BinaryHeap::with_capacity(k + 1),
                |heap, i| {
                    heap.clear();
                    self.search(0, i, k, heap);
                    heap.peek().expect("n > k guarantees k candidates").dist2
                },
            )
            .collect()
    }

    /// Keeps the k smallest candidates (excluding the query itself) in a
    /// max-heap.
    fn search(&self, node: usize, query: usize, k: usize, heap: &mut BinaryHeap<Candidate>) {
        let q = self.points.row(query);
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j == query {
                        continue;
                    }
                    let cand = Candidate {
                        dist2: squared_distance(q, self.points.row(j)),
                        index: j,
                    };
                    if heap.len() < k {
                        heap.push(cand);
                    } else if cand < *heap.peek().expect("heap is full") {
                        heap.pop();
                        heap.push(cand);
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let diff = q[axis] - value;
                let (near, far) = if diff < 0.0 {
                    (left, right)
                } else {
                    (right, left)
                };
                self.search(near, query, k, heap);
                // Ties at the boundary must still be visited for index order.
                if heap.len() < k || diff * diff <= heap.peek().expect("heap is full").dist2 {
                    self.search(far, query, k, heap);
                }
            }
        }
    }
}
