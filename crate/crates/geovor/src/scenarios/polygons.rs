//! A fixed corpus of test polygons covering convex, rectilinear, spiky and
//! corridor shapes. Used throughout the test suite.

use crate::geom::{Point, Polygon};

fn poly(pts: &[(f64, f64)]) -> Polygon {
    Polygon::new(pts.iter().map(|&(x, y)| Point::new(x, y)).collect())
        .expect("corpus polygon must be valid")
}

pub fn triangle() -> Polygon {
    poly(&[(0.0, 0.0), (4.0, 0.0), (2.0, 3.0)])
}

pub fn square() -> Polygon {
    poly(&[(0.0, 0.0), (4.0, 0.0), (4.0, 4.0), (0.0, 4.0)])
}

/// Strictly convex 12-gon on an ellipse.
pub fn convex_dodecagon() -> Polygon {
    let pts: Vec<Point> = (0..12)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 12.0;
            Point::new(4.0 + 3.0 * a.cos(), 3.0 + 2.0 * a.sin())
        })
        .collect();
    Polygon::new(pts).unwrap()
}

pub fn l_shape() -> Polygon {
    poly(&[
        (0.0, 0.0),
        (4.0, 0.0),
        (4.0, 2.0),
        (2.0, 2.0),
        (2.0, 4.0),
        (0.0, 4.0),
    ])
}

pub fn u_shape() -> Polygon {
    poly(&[
        (0.0, 0.0),
        (6.0, 0.0),
        (6.0, 4.0),
        (4.0, 4.0),
        (4.0, 2.0),
        (2.0, 2.0),
        (2.0, 4.0),
        (0.0, 4.0),
    ])
}

/// Comb with four upward teeth.
pub fn comb() -> Polygon {
    poly(&[
        (0.0, 0.0),
        (7.0, 0.0),
        (7.0, 4.0),
        (6.0, 4.0),
        (6.0, 1.0),
        (5.0, 1.0),
        (5.0, 4.0),
        (4.0, 4.0),
        (4.0, 1.0),
        (3.0, 1.0),
        (3.0, 4.0),
        (2.0, 4.0),
        (2.0, 1.0),
        (1.0, 1.0),
        (1.0, 4.0),
        (0.0, 4.0),
    ])
}

pub fn staircase() -> Polygon {
    poly(&[
        (0.0, 0.0),
        (5.0, 0.0),
        (5.0, 5.0),
        (4.0, 5.0),
        (4.0, 4.0),
        (3.0, 4.0),
        (3.0, 3.0),
        (2.0, 3.0),
        (2.0, 2.0),
        (1.0, 2.0),
        (1.0, 1.0),
        (0.0, 1.0),
    ])
}

/// 32-vertex gear: alternating outer and inner radii.
pub fn gear() -> Polygon {
    let pts: Vec<Point> = (0..32)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
            let r = if k % 2 == 0 { 4.0 } else { 2.5 };
            Point::new(5.0 + r * a.cos(), 5.0 + r * a.sin())
        })
        .collect();
    Polygon::new(pts).unwrap()
}

/// Channel with a sawtooth floor.
pub fn sawtooth_channel() -> Polygon {
    poly(&[
        (0.0, 0.0),
        (1.0, 1.0),
        (2.0, 0.0),
        (3.0, 1.0),
        (4.0, 0.0),
        (5.0, 1.0),
        (6.0, 0.0),
        (6.0, 3.0),
        (0.0, 3.0),
    ])
}

/// Star-shaped polygon with irregular radii (20 vertices).
pub fn irregular_star() -> Polygon {
    const RADII: [f64; 20] = [
        3.0, 1.6, 2.8, 1.3, 3.3, 1.9, 2.4, 1.4, 3.1, 1.7, 2.6, 1.2, 3.4, 1.8, 2.2, 1.5, 2.9, 1.6,
        2.5, 1.3,
    ];
    let pts: Vec<Point> = RADII
        .iter()
        .enumerate()
        .map(|(k, &r)| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 20.0;
            Point::new(4.0 + r * a.cos(), 4.0 + r * a.sin())
        })
        .collect();
    Polygon::new(pts).unwrap()
}

/// The full corpus with stable names.
pub fn test_polygons() -> Vec<(&'static str, Polygon)> {
    vec![
        ("triangle", triangle()),
        ("square", square()),
        ("convex_dodecagon", convex_dodecagon()),
        ("l_shape", l_shape()),
        ("u_shape", u_shape()),
        ("comb", comb()),
        ("staircase", staircase()),
        ("gear", gear()),
        ("sawtooth_channel", sawtooth_channel()),
        ("irregular_star", irregular_star()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_valid_and_small() {
        let corpus = test_polygons();
        assert_eq!(corpus.len(), 10);
        for (name, p) in corpus {
            assert!(p.len() <= 64, "{name} too large");
            assert!(p.signed_area() > 0.0, "{name} not CCW");
            crate::geom::triangulate(&p).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }
}
