//! A bucketed k-d tree over a flat point buffer.
//!
//! Queries return exactly the same neighbors as a linear scan, including tie
//! resolution by smallest original index: candidates are ordered by
//! `(squared distance, index)` and a subtree is skipped only when its cell is
//! strictly farther than the current k-th candidate.

use crate::spaces::squared_euclidean;

use super::KBest;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        start: u32,
        end: u32,
    },
    Split {
        axis: u32,
        value: f64,
        left: u32,
        right: u32,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct KdTree {
    dim: usize,
    /// Points in tree order.
    data: Vec<f64>,
    /// Original index of each point in tree order.
    ids: Vec<u32>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub(crate) fn new(dim: usize, coords: &[f64]) -> Self {
        let n = coords.len() / dim;
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut nodes = Vec::with_capacity(2 * n / LEAF_SIZE + 1);
        build(dim, coords, &mut order, 0, &mut nodes);
        let mut data = Vec::with_capacity(coords.len());
        for &i in &order {
            let i = i as usize;
            data.extend_from_slice(&coords[i * dim..(i + 1) * dim]);
        }
        KdTree {
            dim,
            data,
            ids: order,
            nodes,
        }
    }

    pub(crate) fn search(&self, query: &[f64], best: &mut KBest) {
        let mut offsets = [0.0; super::TREE_MAX_DIM];
        let offsets = &mut offsets[..self.dim];
        match self.dim {
            1 => self.visit::<1>(0, query, offsets, best),
            2 => self.visit::<2>(0, query, offsets, best),
            3 => self.visit::<3>(0, query, offsets, best),
            4 => self.visit::<4>(0, query, offsets, best),
            _ => self.visit::<0>(0, query, offsets, best),
        }
    }

    /// `offsets[a]` is the gap along axis `a` between the query and the cell of
    /// `node`, so their sum of squares bounds every distance inside the cell
    /// from below. It is summed in axis order like the point distances, which
    /// keeps the bound exact under rounding.
    ///
    /// `D` is the dimension when known at compile time, 0 otherwise.
    fn visit<const D: usize>(&self, node: usize, query: &[f64], offsets: &mut [f64], best: &mut KBest) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                let mut worst = best.worst();
                for slot in start as usize..end as usize {
                    let d2 = if D == 0 {
                        squared_euclidean(query, &self.data[slot * self.dim..(slot + 1) * self.dim])
                    } else {
                        fixed_squared_euclidean::<D>(query, &self.data[slot * D..(slot + 1) * D])
                    };
                    if d2 <= worst {
                        best.offer(d2, self.ids[slot]);
                        worst = best.worst();
                    }
                }
            }
            Node::Split {
                axis,
                value,
                left,
                right,
            } => {
                let axis = axis as usize;
                let q = query[axis];
                let (near, far, gap) = if q < value {
                    (left, right, value - q)
                } else {
                    (right, left, q - value)
                };
                self.visit::<D>(near as usize, query, offsets, best);
                let saved = offsets[axis];
                offsets[axis] = gap.max(saved);
                let bound = if D == 0 {
                    squared_euclidean(offsets, &[0.0; super::TREE_MAX_DIM][..offsets.len()])
                } else {
                    fixed_squared_euclidean::<D>(offsets, &[0.0; D])
                };
                if bound <= best.worst() {
                    self.visit::<D>(far as usize, query, offsets, best);
                }
                offsets[axis] = saved;
            }
        }
    }
}

/// [`squared_euclidean`] for slices of length `D`, with the same rounding.
#[inline(always)]
fn fixed_squared_euclidean<const D: usize>(a: &[f64], b: &[f64]) -> f64 {
    let a: &[f64; D] = a.try_into().expect("dimension");
    let b: &[f64; D] = b.try_into().expect("dimension");
    let mut acc = 0.0;
    for k in 0..D {
        let d = a[k] - b[k];
        acc += d * d;
    }
    acc
}

/// Builds the subtree over `order[..]`, whose first element sits at position
/// `offset` in tree order. Returns the node id.
fn build(dim: usize, coords: &[f64], order: &mut [u32], offset: usize, nodes: &mut Vec<Node>) -> u32 {
    let id = nodes.len() as u32;
    let coord = |i: u32, axis: usize| coords[i as usize * dim + axis];

    let mut axis = 0;
    let mut spread = 0.0;
    if order.len() > LEAF_SIZE {
        for a in 0..dim {
            let (lo, hi) = order.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| {
                let v = coord(i, a);
                (lo.min(v), hi.max(v))
            });
            if hi - lo > spread {
                spread = hi - lo;
                axis = a;
            }
        }
    }
    if order.len() <= LEAF_SIZE || spread == 0.0 {
        nodes.push(Node::Leaf {
            start: offset as u32,
            end: (offset + order.len()) as u32,
        });
        return id;
    }

    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| coord(a, axis).total_cmp(&coord(b, axis)));
    let value = coord(order[mid], axis);
    nodes.push(Node::Leaf { start: 0, end: 0 });
    let (lo, hi) = order.split_at_mut(mid);
    let left = build(dim, coords, lo, offset, nodes);
    let right = build(dim, coords, hi, offset + mid, nodes);
    nodes[id as usize] = Node::Split {
        axis: axis as u32,
        value,
        left,
        right,
    };
    id
}
