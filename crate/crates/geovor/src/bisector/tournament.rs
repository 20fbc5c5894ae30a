//! Offset kinetic tournament over bisector event points.
//!
//! Event points are ordered along the bisector. Each carries an event value
//! expressed relative to its own anchor pair (the first path vertices toward
//! the two sites). Values anchored at different vertices are compared after
//! shifting by per-edge offsets derived from the anchors' depths along the
//! shortest paths, so the root of the tree knows the subtree-wide maximum —
//! the event point that reaches the bisector first — while only the root's
//! certificate ever references the moving sites.

use crate::error::{GeovorError, Result};
use crate::geom::Point;
use std::sync::Arc;

/// Depth of an anchor vertex along the shortest path toward a site, i.e. its
/// geodesic distance to that site at build time. Differences of depths give
/// the path distance between nested anchors.
pub type DepthFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// A prospective degree-2 vertex: the crossing of an extension segment of
/// each site's shortest path map.
#[derive(Debug, Clone)]
pub struct EventPoint {
    pub id: u64,
    /// Position along the bisector; the tree's ordering key.
    pub order: f64,
    pub location: Point,
    /// First path vertex from `location` toward p.
    pub s_vertex: usize,
    /// First path vertex from `location` toward q.
    pub t_vertex: usize,
    /// Event value π(location, s_vertex) − π(location, t_vertex).
    pub value: f64,
}

struct Node {
    ep: EventPoint,
    priority: u64,
    left: Option<Box<Node>>,
    right: Option<Box<Node>>,
    /// Maximum re-expressed event value over the subtree, in this node's
    /// anchor frame.
    best: f64,
    best_id: u64,
    count: usize,
}

fn priority_of(id: u64) -> u64 {
    // splitmix64: deterministic priorities make the tree shape reproducible.
    let mut z = id.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Balanced tree (treap) over event points with offset-corrected subtree
/// maxima.
pub struct OffsetTournament {
    s_depth: DepthFn,
    t_depth: DepthFn,
    root: Option<Box<Node>>,
}

impl OffsetTournament {
    pub fn new(s_depth: DepthFn, t_depth: DepthFn) -> Self {
        OffsetTournament {
            s_depth,
            t_depth,
            root: None,
        }
    }

    pub fn len(&self) -> usize {
        self.root.as_ref().map_or(0, |n| n.count)
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_none()
    }

    /// Frame shift taking a value expressed against `from`'s anchors into
    /// `into`'s frame.
    fn offset(&self, into: &EventPoint, from: &EventPoint) -> f64 {
        ((self.s_depth)(from.s_vertex) - (self.s_depth)(into.s_vertex))
            - ((self.t_depth)(from.t_vertex) - (self.t_depth)(into.t_vertex))
    }

    fn pull(&self, n: &mut Node) {
        n.best = n.ep.value;
        n.best_id = n.ep.id;
        n.count = 1;
        for child in [&n.left, &n.right] {
            if let Some(c) = child {
                n.count += c.count;
                let shifted = c.best + self.offset(&n.ep, &c.ep);
                if shifted > n.best {
                    n.best = shifted;
                    n.best_id = c.best_id;
                }
            }
        }
    }

    fn merge(&self, a: Option<Box<Node>>, b: Option<Box<Node>>) -> Option<Box<Node>> {
        match (a, b) {
            (None, b) => b,
            (a, None) => a,
            (Some(mut a), Some(mut b)) => {
                if a.priority >= b.priority {
                    a.right = self.merge(a.right.take(), Some(b));
                    self.pull(&mut a);
                    Some(a)
                } else {
                    b.left = self.merge(Some(a), b.left.take());
                    self.pull(&mut b);
                    Some(b)
                }
            }
        }
    }

    /// Splits into (keys ≤ (order, id), keys > (order, id)).
    fn split_at(
        &self,
        node: Option<Box<Node>>,
        order: f64,
        id: u64,
    ) -> (Option<Box<Node>>, Option<Box<Node>>) {
        let Some(mut n) = node else {
            return (None, None);
        };
        let goes_left = (n.ep.order, n.ep.id) <= (order, id);
        if goes_left {
            let (l, r) = self.split_at(n.right.take(), order, id);
            n.right = l;
            self.pull(&mut n);
            (Some(n), r)
        } else {
            let (l, r) = self.split_at(n.left.take(), order, id);
            n.left = r;
            self.pull(&mut n);
            (l, Some(n))
        }
    }

    pub fn insert(&mut self, ep: EventPoint) {
        let node = Box::new(Node {
            priority: priority_of(ep.id),
            best: ep.value,
            best_id: ep.id,
            count: 1,
            left: None,
            right: None,
            ep,
        });
        let root = self.root.take();
        let (l, r) = self.split_at(root, node.ep.order, node.ep.id);
        let merged = self.merge(l, Some(node));
        self.root = self.merge(merged, r);
    }

    /// Removes the event point with this id at this order key.
    pub fn remove(&mut self, order: f64, id: u64) -> Result<EventPoint> {
        fn go(
            t: &OffsetTournament,
            node: Option<Box<Node>>,
            order: f64,
            id: u64,
        ) -> (Option<Box<Node>>, Option<EventPoint>) {
            let Some(mut n) = node else {
                return (None, None);
            };
            if n.ep.id == id && n.ep.order == order {
                let merged = t.merge(n.left.take(), n.right.take());
                return (merged, Some(n.ep));
            }
            let (rest, found) = if (order, id) < (n.ep.order, n.ep.id) {
                let (l, f) = go(t, n.left.take(), order, id);
                n.left = l;
                (Some(n), f)
            } else {
                let (r, f) = go(t, n.right.take(), order, id);
                n.right = r;
                (Some(n), f)
            };
            let mut rest = rest.unwrap();
            t.pull(&mut rest);
            (Some(rest), found)
        }
        let old_root = self.root.take();
        let (root, found) = go(self, old_root, order, id);
        self.root = root;
        found.ok_or(GeovorError::UnknownEventPoint)
    }

    /// Splits off everything with order key ≤ `ep`'s key into the returned
    /// left tournament, keeping the rest in `self`.
    pub fn split(&mut self, ep: &EventPoint) -> OffsetTournament {
        let root = self.root.take();
        let (l, r) = self.split_at(root, ep.order, ep.id);
        self.root = r;
        OffsetTournament {
            s_depth: self.s_depth.clone(),
            t_depth: self.t_depth.clone(),
            root: l,
        }
    }

    /// The root's anchor frame and the maximum re-expressed event value in
    /// that frame, together with the winning event point's id.
    pub fn root_max(&self) -> Option<(&EventPoint, f64, u64)> {
        self.root.as_ref().map(|n| (&n.ep, n.best, n.best_id))
    }

    /// The event point that attains the subtree maximum.
    pub fn winner(&self) -> Option<&EventPoint> {
        let id = self.root.as_ref()?.best_id;
        self.iter().find(|ep| ep.id == id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &EventPoint> {
        let mut out = Vec::with_capacity(self.len());
        fn walk<'a>(n: &'a Option<Box<Node>>, out: &mut Vec<&'a EventPoint>) {
            if let Some(n) = n {
                walk(&n.left, out);
                out.push(&n.ep);
                walk(&n.right, out);
            }
        }
        walk(&self.root, &mut out);
        out.into_iter()
    }

    /// Oracle: recomputes the root-frame maximum flatly over every element,
    /// ignoring the tree structure.
    pub fn flat_root_max(&self) -> Option<(f64, u64)> {
        let root = self.root.as_ref()?;
        let mut best = f64::NEG_INFINITY;
        let mut best_id = 0;
        for ep in self.iter() {
            let v = ep.value + self.offset(&root.ep, ep);
            if v > best {
                best = v;
                best_id = ep.id;
            }
        }
        Some((best, best_id))
    }
}

impl std::fmt::Debug for OffsetTournament {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OffsetTournament")
            .field("len", &self.len())
            .field("root_max", &self.root_max().map(|(_, m, id)| (m, id)))
            .finish()
    }
}
