//! Bowyer–Watson Delaunay triangulation in the plane.

/// Absolute tolerance on the in-circle determinant below which four input
/// points are treated as cocircular.
pub const INCIRCLE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Degenerate;

#[inline]
fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Positive when `d` lies strictly inside the circumcircle of the
/// counter-clockwise triangle `(a, b, c)`.
#[inline]
pub fn incircle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
    let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
    let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
    let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
    let ad = adx * adx + ady * ady;
    let bd = bdx * bdx + bdy * bdy;
    let cd = cdx * cdx + cdy * cdy;
    adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx)
}

/// Convex hull vertex indices (counter-clockwise, collinear points dropped).
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        points[i][0]
            .total_cmp(&points[j][0])
            .then(points[i][1].total_cmp(&points[j][1]))
    });
    if idx.len() < 3 {
        return idx;
    }
    let mut hull: Vec<usize> = Vec::with_capacity(2 * idx.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &usize>> = if pass == 0 {
            Box::new(idx.iter())
        } else {
            Box::new(idx.iter().rev())
        };
        for &i in iter {
            while hull.len() >= start + 2
                && orient(points[hull[hull.len() - 2]], points[hull[hull.len() - 1]], points[i]) <= 0.0
            {
                hull.pop();
            }
            hull.push(i);
        }
        hull.pop();
    }
    hull
}

/// Edges `(u, v)`, `u < v`, sorted, of the Delaunay triangulation of
/// `points`. Fails on near-cocircular or near-collinear input.
pub fn delaunay_edges(points: &[[f64; 2]]) -> Result<Vec<(usize, usize)>, Degenerate> {
    let n = points.len();
    if n < 3 {
        return Ok(if n == 2 { vec![(0, 1)] } else { Vec::new() });
    }
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
    for p in points {
        min_x = min_x.min(p[0]);
        min_y = min_y.min(p[1]);
        max_x = max_x.max(p[0]);
        max_y = max_y.max(p[1]);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let (cx, cy) = ((min_x + max_x) / 2.0, (min_y + max_y) / 2.0);
    let m = 1e3 * span;
    let mut pts = points.to_vec();
    pts.push([cx - m, cy - m]);
    pts.push([cx + m, cy - m]);
    pts.push([cx, cy + m]);

    let mut triangles: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];
    let mut boundary: Vec<(usize, usize)> = Vec::new();
    for p in 0..n {
        let mut bad = Vec::new();
        for (t, tri) in triangles.iter().enumerate() {
            let det = incircle(pts[tri[0]], pts[tri[1]], pts[tri[2]], pts[p]);
            let real = tri.iter().all(|&v| v < n);
            if real && det.abs() <= INCIRCLE_EPS {
                return Err(Degenerate);
            }
            if det > 0.0 {
                bad.push(t);
            }
        }
        boundary.clear();
        for &t in &bad {
            let tri = triangles[t];
            for e in 0..3 {
                let (a, b) = (tri[e], tri[(e + 1) % 3]);
                // an edge shared by two cavity triangles appears once per orientation
                if let Some(k) = boundary.iter().position(|&(x, y)| x == b && y == a) {
                    boundary.swap_remove(k);
                } else {
                    boundary.push((a, b));
                }
            }
        }
        for &t in bad.iter().rev() {
            triangles.swap_remove(t);
        }
        for &(a, b) in &boundary {
            if orient(pts[a], pts[b], pts[p]).abs() <= INCIRCLE_EPS && a < n && b < n {
                return Err(Degenerate);
            }
            triangles.push([a, b, p]);
        }
    }

    let mut edges: Vec<(usize, usize)> = triangles
        .iter()
        .filter(|tri| tri.iter().all(|&v| v < n))
        .flat_map(|tri| (0..3).map(move |e| (tri[e], tri[(e + 1) % 3])))
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    // hull edges can be lost when a super vertex sits inside a thin hull triangle's circumcircle
    let hull = convex_hull(points);
    for i in 0..hull.len() {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}
