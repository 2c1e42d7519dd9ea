//! Bowyer–Watson Delaunay triangulation for small planar point sets.

use std::collections::{BTreeMap, BTreeSet};

type Point = (f64, f64);

/// Edges `(i, j)` with `i < j` of the Delaunay triangulation of `pts`.
///
/// Triangles touching the bounding super-triangle are dropped at the end, so a
/// few convex-hull edges may be missing; the result stays planar and connected.
pub(crate) fn triangulation_edges(pts: &[Point]) -> BTreeSet<(usize, usize)> {
    let n = pts.len();
    let mut edges = BTreeSet::new();
    if n < 2 {
        return edges;
    }

    let (mut min_x, mut min_y) = (f64::INFINITY, f64::INFINITY);
    let (mut max_x, mut max_y) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        min_x = min_x.min(x);
        min_y = min_y.min(y);
        max_x = max_x.max(x);
        max_y = max_y.max(y);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-12);
    let (cx, cy) = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);

    let mut all: Vec<Point> = pts.to_vec();
    all.push((cx - 20.0 * span, cy - 10.0 * span));
    all.push((cx + 20.0 * span, cy - 10.0 * span));
    all.push((cx, cy + 20.0 * span));

    let mut triangles: Vec<[usize; 3]> = vec![ccw(&all, [n, n + 1, n + 2])];
    for p in 0..n {
        let mut boundary: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        triangles.retain(|t| {
            if in_circumcircle(&all, *t, all[p]) {
                for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                    *boundary.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                }
                false
            } else {
                true
            }
        });
        for ((a, b), count) in boundary {
            if count == 1 {
                triangles.push(ccw(&all, [a, b, p]));
            }
        }
    }

    for t in triangles.iter().filter(|t| t.iter().all(|&v| v < n)) {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            edges.insert((a.min(b), a.max(b)));
        }
    }

    if edges.is_empty() {
        // Collinear input: chain the points in coordinate order.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| pts[a].partial_cmp(&pts[b]).expect("finite coordinates"));
        for pair in order.windows(2) {
            edges.insert((pair[0].min(pair[1]), pair[0].max(pair[1])));
        }
    }
    edges
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

fn ccw(all: &[Point], t: [usize; 3]) -> [usize; 3] {
    if orient(all[t[0]], all[t[1]], all[t[2]]) < 0.0 {
        [t[0], t[2], t[1]]
    } else {
        t
    }
}

fn in_circumcircle(all: &[Point], t: [usize; 3], d: Point) -> bool {
    let [a, b, c] = t.map(|i| all[i]);
    let (adx, ady) = (a.0 - d.0, a.1 - d.1);
    let (bdx, bdy) = (b.0 - d.0, b.1 - d.1);
    let (cdx, cdy) = (c.0 - d.0, c.1 - d.1);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    let det =
        adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
    det > 0.0
}
