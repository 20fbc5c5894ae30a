use super::point::{orient2d, Point};
use super::polygon::Polygon;
use crate::error::Result;
use std::collections::HashMap;

/// A triangulation of a simple polygon, with the dual tree over triangles.
#[derive(Debug, Clone)]
pub struct Triangulation {
    polygon: Polygon,
    /// Vertex-index triples, counterclockwise.
    triangles: Vec<[usize; 3]>,
    /// For each triangle, the neighbor across each edge (i, i+1), if any.
    adjacency: Vec<[Option<usize>; 3]>,
}

/// Ear-clipping triangulation. O(m^2), fine at the scales this crate targets.
pub fn triangulate(polygon: &Polygon) -> Result<Triangulation> {
    let verts = polygon.vertices();
    let m = verts.len();
    let mut idx: Vec<usize> = (0..m).collect();
    let mut triangles: Vec<[usize; 3]> = Vec::with_capacity(m - 2);

    while idx.len() > 3 {
        let k = idx.len();
        let mut clipped = false;
        for i in 0..k {
            let ip = idx[(i + k - 1) % k];
            let ic = idx[i];
            let inx = idx[(i + 1) % k];
            let (a, b, c) = (verts[ip], verts[ic], verts[inx]);
            if orient2d(a, b, c) <= 0.0 {
                continue;
            }
            let mut ear = true;
            for &j in &idx {
                if j == ip || j == ic || j == inx {
                    continue;
                }
                if point_in_triangle_closed(verts[j], a, b, c) {
                    ear = false;
                    break;
                }
            }
            if ear {
                triangles.push([ip, ic, inx]);
                idx.remove(i);
                clipped = true;
                break;
            }
        }
        if !clipped {
            // Cannot happen for a valid simple polygon; guard against
            // numerical trouble by clipping the first convex corner.
            let k = idx.len();
            triangles.push([idx[k - 1], idx[0], idx[1]]);
            idx.remove(0);
        }
    }
    triangles.push([idx[0], idx[1], idx[2]]);

    let mut edge_map: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    for (t, tri) in triangles.iter().enumerate() {
        for e in 0..3 {
            let a = tri[e];
            let b = tri[(e + 1) % 3];
            let key = (a.min(b), a.max(b));
            edge_map.entry(key).or_default().push((t, e));
        }
    }
    let mut adjacency = vec![[None; 3]; triangles.len()];
    for owners in edge_map.values() {
        if owners.len() == 2 {
            let (t0, e0) = owners[0];
            let (t1, e1) = owners[1];
            adjacency[t0][e0] = Some(t1);
            adjacency[t1][e1] = Some(t0);
        }
    }

    Ok(Triangulation {
        polygon: polygon.clone(),
        triangles,
        adjacency,
    })
}

fn point_in_triangle_closed(p: Point, a: Point, b: Point, c: Point) -> bool {
    orient2d(a, b, p) >= 0.0 && orient2d(b, c, p) >= 0.0 && orient2d(c, a, p) >= 0.0
}

impl Triangulation {
    pub fn polygon(&self) -> &Polygon {
        &self.polygon
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn adjacency(&self) -> &[[Option<usize>; 3]] {
        &self.adjacency
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let tri = self.triangles[t];
        let v = self.polygon.vertices();
        [v[tri[0]], v[tri[1]], v[tri[2]]]
    }

    /// Triangle containing p. Points on shared edges report one of the
    /// incident triangles.
    pub fn locate(&self, p: Point, eps: f64) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_points(t);
            let o = orient2d(a, b, p)
                .min(orient2d(b, c, p))
                .min(orient2d(c, a, p));
            if o >= 0.0 {
                return Some(t);
            }
            if best.map_or(true, |(_, v)| o > v) {
                best = Some((t, o));
            }
        }
        // Tolerate points marginally outside every triangle (boundary noise).
        let scale = self.polygon.diameter();
        match best {
            Some((t, o)) if o > -eps * scale.max(1.0) => Some(t),
            _ => None,
        }
    }

    /// Triangle path between two triangles in the dual tree.
    pub fn dual_path(&self, from: usize, to: usize) -> Vec<usize> {
        if from == to {
            return vec![from];
        }
        let n = self.triangles.len();
        let mut parent = vec![usize::MAX; n];
        let mut stack = vec![from];
        parent[from] = from;
        while let Some(t) = stack.pop() {
            if t == to {
                break;
            }
            for nb in self.adjacency[t].iter().flatten() {
                if parent[*nb] == usize::MAX {
                    parent[*nb] = t;
                    stack.push(*nb);
                }
            }
        }
        let mut path = vec![to];
        let mut cur = to;
        while cur != from {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::polygon::Polygon;

    fn poly(pts: &[(f64, f64)]) -> Polygon {
        Polygon::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn square_two_triangles() {
        let p = poly(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)]);
        let t = triangulate(&p).unwrap();
        assert_eq!(t.triangles().len(), 2);
    }

    #[test]
    fn triangle_is_single() {
        let p = poly(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]);
        let t = triangulate(&p).unwrap();
        assert_eq!(t.triangles().len(), 1);
        assert_eq!(t.adjacency()[0], [None; 3]);
    }

    #[test]
    fn l_shape_area_matches_shoelace() {
        let p = poly(&[
            (0.0, 0.0),
            (4.0, 0.0),
            (4.0, 2.0),
            (2.0, 2.0),
            (2.0, 4.0),
            (0.0, 4.0),
        ]);
        let t = triangulate(&p).unwrap();
        assert_eq!(t.triangles().len(), 4);
        let sum: f64 = (0..4)
            .map(|i| {
                let [a, b, c] = t.triangle_points(i);
                orient2d(a, b, c) / 2.0
            })
            .sum();
        assert!((sum - p.area()).abs() < 1e-12);
        // Dual graph of a simple polygon triangulation is a tree.
        let edges: usize = t
            .adjacency()
            .iter()
            .map(|a| a.iter().flatten().count())
            .sum();
        assert_eq!(edges / 2, t.triangles().len() - 1);
    }
}
