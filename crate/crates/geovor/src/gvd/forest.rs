//! Rooted forest over site roots and polygon vertices, recording the
//! shortest-path-tree structure of the partial shortest path maps. Supports
//! link/cut re-rooting of subtrees when a Voronoi region is transplanted
//! between sites, path-length aggregates, and the principal-child query.

use crate::error::{GeovorError, Result};
use crate::geom::Point;

#[derive(Debug, Clone)]
struct ForestNode {
    pos: Point,
    parent: Option<usize>,
    children: Vec<usize>,
}

/// Dynamic forest over positioned nodes; edge lengths are the Euclidean
/// distances between the endpoint positions.
#[derive(Debug, Clone)]
pub struct DynamicSpmForest {
    nodes: Vec<ForestNode>,
}

impl DynamicSpmForest {
    /// All nodes start as isolated roots.
    pub fn new(positions: Vec<Point>) -> Self {
        DynamicSpmForest {
            nodes: positions
                .into_iter()
                .map(|pos| ForestNode {
                    pos,
                    parent: None,
                    children: Vec::new(),
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn position(&self, v: usize) -> Point {
        self.nodes[v].pos
    }

    /// Moves a node (a site root at a new time); edge lengths follow.
    pub fn set_position(&mut self, v: usize, pos: Point) {
        self.nodes[v].pos = pos;
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.nodes[v].parent
    }

    pub fn root_of(&self, v: usize) -> usize {
        let mut u = v;
        while let Some(p) = self.nodes[u].parent {
            u = p;
        }
        u
    }

    /// Attaches root `v` under `parent`.
    pub fn link(&mut self, parent: usize, v: usize) -> Result<()> {
        if self.nodes[v].parent.is_some() {
            return Err(GeovorError::LinkCycle);
        }
        if self.root_of(parent) == v {
            return Err(GeovorError::LinkCycle);
        }
        self.nodes[v].parent = Some(parent);
        self.nodes[parent].children.push(v);
        Ok(())
    }

    /// Detaches `v` from its parent, making it a root.
    pub fn cut(&mut self, v: usize) -> Result<()> {
        let Some(p) = self.nodes[v].parent.take() else {
            return Err(GeovorError::CutRoot);
        };
        self.nodes[p].children.retain(|&c| c != v);
        Ok(())
    }

    /// Sum of edge lengths from `v` to its root.
    pub fn path_length(&self, v: usize) -> f64 {
        let mut acc = 0.0;
        let mut u = v;
        while let Some(p) = self.nodes[u].parent {
            acc += self.nodes[u].pos.dist(self.nodes[p].pos);
            u = p;
        }
        acc
    }

    /// Nodes from `v` up to and including its root.
    pub fn path_to_root(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut u = v;
        while let Some(p) = self.nodes[u].parent {
            out.push(p);
            u = p;
        }
        out
    }

    /// Children of `u` in counterclockwise cyclic order starting at the
    /// principal child. For a root the order starts at the positive x-axis.
    pub fn children(&self, u: usize) -> Vec<usize> {
        let reference = match self.nodes[u].parent {
            // Continuation of the incoming edge: away from the parent.
            Some(p) => self.nodes[u].pos - self.nodes[p].pos,
            None => Point::new(1.0, 0.0),
        };
        let base = reference.y.atan2(reference.x);
        let mut kids: Vec<(f64, usize)> = self.nodes[u]
            .children
            .iter()
            .map(|&c| {
                let d = self.nodes[c].pos - self.nodes[u].pos;
                let mut a = d.y.atan2(d.x) - base;
                // Deviation from the continuation direction, in (−π, π].
                while a > std::f64::consts::PI {
                    a -= 2.0 * std::f64::consts::PI;
                }
                while a <= -std::f64::consts::PI {
                    a += 2.0 * std::f64::consts::PI;
                }
                (a, c)
            })
            .collect();
        kids.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        // Cyclic order is CCW; rotate so the smallest |deviation| leads.
        if let Some(start) = (0..kids.len()).min_by(|&a, &b| {
            kids[a]
                .0
                .abs()
                .partial_cmp(&kids[b].0.abs())
                .unwrap()
        }) {
            kids.rotate_left(start);
        }
        kids.into_iter().map(|(_, c)| c).collect()
    }

    /// The child of `u` whose edge deviates least from the continuation of
    /// the edge from u's parent — the carrier of u's extension segment.
    /// None for roots and leaves.
    pub fn principal_child(&self, u: usize) -> Option<usize> {
        self.nodes[u].parent?;
        self.children(u).first().copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn chain_path_length() {
        let mut f = DynamicSpmForest::new(vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 4.0),
            Point::new(3.0, 10.0),
        ]);
        f.link(0, 1).unwrap();
        f.link(1, 2).unwrap();
        assert_eq!(f.path_length(2), 5.0 + 6.0);
        assert_eq!(f.path_to_root(2), vec![2, 1, 0]);
        assert!(matches!(f.cut(0), Err(GeovorError::CutRoot)));
        assert!(matches!(f.link(2, 0), Err(GeovorError::LinkCycle)));
    }

    #[test]
    fn cut_then_link_elsewhere() {
        let mut f = DynamicSpmForest::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(5.0, 0.0),
        ]);
        f.link(0, 1).unwrap();
        f.link(1, 2).unwrap();
        assert!((f.path_length(2) - 2.0).abs() < 1e-12);
        f.cut(2).unwrap();
        f.link(3, 2).unwrap();
        assert!((f.path_length(2) - Point::new(1.0, 1.0).dist(Point::new(5.0, 0.0))).abs() < 1e-12);
    }

    #[test]
    fn principal_child_is_angle_argmin() {
        // Parent below u; continuation points straight up. Children at
        // known angles from vertical: 40°, −10°, 170°.
        let u = Point::new(0.0, 0.0);
        let dir = |deg: f64| {
            let a = (90.0 - deg).to_radians();
            Point::new(a.cos(), a.sin())
        };
        let mut f = DynamicSpmForest::new(vec![
            Point::new(0.0, -1.0),
            u,
            dir(40.0),
            dir(-10.0),
            dir(170.0),
        ]);
        f.link(0, 1).unwrap();
        f.link(1, 2).unwrap();
        f.link(1, 3).unwrap();
        f.link(1, 4).unwrap();
        assert_eq!(f.principal_child(1), Some(3));
        assert!(f.principal_child(0).is_none());
        assert!(f.principal_child(2).is_none());
    }

    #[test]
    fn random_mutations_match_walk_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 60;
        let positions: Vec<Point> = (0..n)
            .map(|_| Point::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)))
            .collect();
        let mut f = DynamicSpmForest::new(positions.clone());
        // Independent parent-pointer oracle.
        let mut parent: Vec<Option<usize>> = vec![None; n];
        let in_subtree = |parent: &[Option<usize>], root: usize, mut v: usize| loop {
            if v == root {
                return true;
            }
            match parent[v] {
                Some(p) => v = p,
                None => return false,
            }
        };
        for _ in 0..1000 {
            let v = rng.gen_range(0..n);
            if parent[v].is_some() {
                f.cut(v).unwrap();
                parent[v] = None;
            } else {
                let p = rng.gen_range(0..n);
                if in_subtree(&parent, v, p) {
                    assert!(matches!(f.link(p, v), Err(GeovorError::LinkCycle)));
                } else {
                    f.link(p, v).unwrap();
                    parent[v] = Some(p);
                }
            }
            // Spot-check path length against the walk oracle.
            let probe = rng.gen_range(0..n);
            let mut acc = 0.0;
            let mut u = probe;
            while let Some(p) = parent[u] {
                acc += positions[u].dist(positions[p]);
                u = p;
            }
            assert!((f.path_length(probe) - acc).abs() < 1e-9);
        }
    }
}
