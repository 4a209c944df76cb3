//! Convex hulls in E³ and H³, hull-boundary curvature, tangent-cone
//! apertures and the chain of total-curvature inequalities for closed
//! surfaces.
//!
//! Hyperbolic hulls are built in the Klein chart, where totally geodesic
//! planes are affine planes; all angles and areas are measured back in the
//! hyperboloid chart with the true metric.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use robust::{orient3d, Coord3D};

use crate::error::{Error, Result};
use crate::spaces::{Matrix, Model, ModelSpace, Vector};
use crate::surfaces::{self, spherical_triangle_area, TriSurface};

type P3 = [f64; 3];

/// Convex hull of a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull {
    pub model: Model,
    /// Input points in chart coordinates.
    pub points: Vec<Vector>,
    /// Input points in the linearizing chart (Klein, or Euclidean itself).
    pub coords: Vec<P3>,
    /// Indices of the extreme points, sorted.
    pub vertices: Vec<usize>,
    /// Outward oriented facets (counterclockwise seen from outside).
    pub facets: Vec<[usize; 3]>,
    planes: Vec<(P3, f64)>,
    incident: Vec<Vec<usize>>,
}

fn sub(a: P3, b: P3) -> P3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: P3) -> f64 {
    dot(a, a).sqrt()
}

fn c3(p: P3) -> Coord3D<f64> {
    Coord3D { x: p[0], y: p[1], z: p[2] }
}

/// Exact sign test: is `d` strictly on the outer side of the face `(a, b, c)`?
fn sees(a: P3, b: P3, c: P3, d: P3) -> bool {
    orient3d(c3(a), c3(b), c3(c), c3(d)) < 0.0
}

/// Linearizing chart coordinates of a point.
pub fn linear_coords(space: &ModelSpace, x: &Vector) -> Result<P3> {
    if space.dim() != 3 {
        return Err(Error::UnsupportedSpace);
    }
    match space.model() {
        Model::Euclidean | Model::Klein => Ok([x[0], x[1], x[2]]),
        Model::Hyperboloid => {
            let k = space.to_klein(x)?;
            Ok([k[0], k[1], k[2]])
        }
        _ => Err(Error::UnsupportedSpace),
    }
}

/// The g-unit vector at `x` (chart coordinates) whose g-orthogonal complement
/// is the plane with linear-chart conormal `n`, pointing to its positive side.
pub fn linear_conormal_to_normal(space: &ModelSpace, x: &Vector, n: &Vector) -> Result<Vector> {
    let w = match space.model() {
        Model::Euclidean | Model::Klein => n.clone(),
        Model::Hyperboloid => {
            // pull back through the chart change x ↦ x/√(1+|x|²)
            let q = 1.0 + x.norm_squared();
            let jac = (Matrix::identity(x.len(), x.len()) * q - x * x.transpose()) / q.powf(1.5);
            jac.transpose() * n
        }
        _ => return Err(Error::UnsupportedSpace),
    };
    let v = space.metric(x).lu().solve(&w).ok_or(Error::DegenerateHull)?;
    let len = space.norm(x, &v);
    if !(len > 0.0) {
        return Err(Error::DegenerateHull);
    }
    Ok(v / len)
}

struct Builder {
    pts: Vec<P3>,
    faces: Vec<[usize; 3]>,
    alive: Vec<bool>,
    face_pts: Vec<Vec<usize>>,
    pt_faces: Vec<Vec<usize>>,
    edge: HashMap<(usize, usize), usize>,
}

impl Builder {
    fn add_face(&mut self, f: [usize; 3]) -> usize {
        let id = self.faces.len();
        self.faces.push(f);
        self.alive.push(true);
        self.face_pts.push(Vec::new());
        for k in 0..3 {
            self.edge.insert((f[k], f[(k + 1) % 3]), id);
        }
        id
    }

    fn sees(&self, f: usize, p: usize) -> bool {
        let [a, b, c] = self.faces[f];
        sees(self.pts[a], self.pts[b], self.pts[c], self.pts[p])
    }

    fn link(&mut self, f: usize, p: usize) {
        self.face_pts[f].push(p);
        self.pt_faces[p].push(f);
    }

    fn insert(&mut self, p: usize, done: &mut [bool], stamp: &mut [usize]) {
        let visible: Vec<usize> = self.pt_faces[p].iter().copied().filter(|&f| self.alive[f]).collect();
        done[p] = true;
        if visible.is_empty() {
            return;
        }
        let mut horizon = Vec::new();
        for &f in &visible {
            self.alive[f] = false;
        }
        for &f in &visible {
            let t = self.faces[f];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let g = self.edge[&(b, a)];
                if self.alive[g] {
                    horizon.push((a, b, f, g));
                }
            }
        }
        for &f in &visible {
            let t = self.faces[f];
            for k in 0..3 {
                let e = (t[k], t[(k + 1) % 3]);
                if self.edge.get(&e) == Some(&f) {
                    self.edge.remove(&e);
                }
            }
        }
        for (a, b, gone, kept) in horizon {
            let nf = self.add_face([a, b, p]);
            let mut cands = Vec::new();
            for src in [gone, kept] {
                for &q in &self.face_pts[src] {
                    if !done[q] && stamp[q] != nf {
                        stamp[q] = nf;
                        cands.push(q);
                    }
                }
            }
            for q in cands {
                if self.sees(nf, q) {
                    self.link(nf, q);
                }
            }
        }
        for &f in &visible {
            self.face_pts[f] = Vec::new();
        }
    }
}

/// Randomized incremental hull of points in R³ with exact orientation tests.
/// Returns outward facets over input indices. Points on a facet plane are not
/// made vertices.
pub fn euclidean_hull(pts: &[P3]) -> Result<Vec<[usize; 3]>> {
    let n = pts.len();
    if n < 4 {
        return Err(Error::DegenerateInput(format!("{n} points cannot span a solid")));
    }
    let diam = {
        let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
        for p in pts {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        norm(sub(hi, lo))
    };
    if !(diam > 0.0) || !diam.is_finite() {
        return Err(Error::DegenerateInput("points coincide".into()));
    }
    let i0 = 0;
    let i1 = (0..n).max_by(|&a, &b| norm(sub(pts[a], pts[i0])).total_cmp(&norm(sub(pts[b], pts[i0])))).unwrap();
    let area = |k: usize| norm(cross(sub(pts[i1], pts[i0]), sub(pts[k], pts[i0])));
    let i2 = (0..n).max_by(|&a, &b| area(a).total_cmp(&area(b))).unwrap();
    if area(i2) <= 1e-12 * diam * diam {
        return Err(Error::DegenerateInput("points are collinear".into()));
    }
    let vol = |k: usize| orient3d(c3(pts[i0]), c3(pts[i1]), c3(pts[i2]), c3(pts[k]));
    let i3 = (0..n).max_by(|&a, &b| vol(a).abs().total_cmp(&vol(b).abs())).unwrap();
    if vol(i3).abs() <= 1e-12 * diam.powi(3) {
        return Err(Error::DegenerateInput("points are coplanar".into()));
    }
    let mut b = Builder {
        pts: pts.to_vec(),
        faces: Vec::new(),
        alive: Vec::new(),
        face_pts: Vec::new(),
        pt_faces: vec![Vec::new(); n],
        edge: HashMap::new(),
    };
    let simplex = [i0, i1, i2, i3];
    for skip in 0..4 {
        let mut f: Vec<usize> = (0..4).filter(|&k| k != skip).map(|k| simplex[k]).collect();
        let w = simplex[skip];
        if orient3d(c3(pts[f[0]]), c3(pts[f[1]]), c3(pts[f[2]]), c3(pts[w])) < 0.0 {
            f.swap(1, 2);
        }
        b.add_face([f[0], f[1], f[2]]);
    }
    let mut done = vec![false; n];
    for &s in &simplex {
        done[s] = true;
    }
    let mut order: Vec<usize> = (0..n).filter(|k| !done[*k]).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(0x6875_6c6c));
    for &p in &order {
        for f in 0..4 {
            if b.sees(f, p) {
                b.link(f, p);
            }
        }
    }
    let mut stamp = vec![usize::MAX; n];
    for &p in &order {
        b.insert(p, &mut done, &mut stamp);
    }
    Ok(b.faces.iter().zip(&b.alive).filter(|(_, a)| **a).map(|(f, _)| *f).collect())
}

/// Hull facets with tied (coplanar or collinear) vertices merged away: a
/// vertex whose incident facet normals span no solid angle is dropped and the
/// remaining points re-triangulated, provided it stays inside.
fn merged_hull(coords: &[P3]) -> Result<Vec<[usize; 3]>> {
    let mut keep: Vec<usize> = (0..coords.len()).collect();
    let mut facets = euclidean_hull(coords)?;
    loop {
        let probe = ConvexHull::from_parts(Model::Euclidean, coords.to_vec(), facets.clone());
        let mut flat: Vec<usize> = probe.vertices.iter().copied().filter(|&v| probe.linear_cone_area(v) <= 1e-12).collect();
        // a sliver facet has no usable normal, but its middle vertex sits on
        // a segment between two others and can always go
        flat.extend(facets.iter().filter_map(|f| collinear_middle(coords, f)));
        flat.sort_unstable();
        flat.dedup();
        if flat.is_empty() {
            return Ok(facets);
        }
        let dropped: std::collections::HashSet<usize> = flat.iter().copied().collect();
        let next_keep: Vec<usize> = keep.iter().copied().filter(|i| !dropped.contains(i)).collect();
        let sub: Vec<P3> = next_keep.iter().map(|&i| coords[i]).collect();
        let Ok(sub_facets) = euclidean_hull(&sub) else { return Ok(facets) };
        let mapped: Vec<[usize; 3]> = sub_facets.iter().map(|f| f.map(|k| next_keep[k])).collect();
        let check = ConvexHull::from_parts(Model::Euclidean, coords.to_vec(), mapped.clone());
        let tol = 1e-12 * check.diameter();
        if flat.iter().any(|&v| check.signed_distance(coords[v]) > tol) {
            return Ok(facets);
        }
        keep = next_keep;
        facets = mapped;
    }
}

/// Vertex lying between the other two when the facet is a sliver.
fn collinear_middle(coords: &[P3], f: &[usize; 3]) -> Option<usize> {
    (0..3).find_map(|k| {
        let (v, a, b) = (coords[f[k]], coords[f[(k + 1) % 3]], coords[f[(k + 2) % 3]]);
        let (da, db) = (sub(a, v), sub(b, v));
        let scale = norm(da) * norm(db);
        (scale > 0.0 && norm(cross(da, db)) <= 1e-12 * scale && dot(da, db) < 0.0).then_some(f[k])
    })
}

/// Geodesic convex hull of `points` (chart coordinates) in E³ or H³.
pub fn convex_hull(space: &ModelSpace, points: &[Vector]) -> Result<ConvexHull> {
    let coords = points.iter().map(|p| linear_coords(space, p)).collect::<Result<Vec<_>>>()?;
    let facets = merged_hull(&coords)?;
    let mut hull = ConvexHull::from_parts(space.model(), coords, facets);
    hull.points = points.to_vec();
    Ok(hull)
}

impl ConvexHull {
    fn from_parts(model: Model, coords: Vec<P3>, facets: Vec<[usize; 3]>) -> ConvexHull {
        let mut vertices: Vec<usize> = facets.iter().flatten().copied().collect();
        vertices.sort_unstable();
        vertices.dedup();
        let points = coords.iter().map(|c| Vector::from_vec(c.to_vec())).collect();
        let planes = facets
            .iter()
            .map(|&[a, b, c]| {
                let n = cross(sub(coords[b], coords[a]), sub(coords[c], coords[a]));
                let l = norm(n);
                let n = [n[0] / l, n[1] / l, n[2] / l];
                (n, dot(n, coords[a]))
            })
            .collect();
        let mut incident = vec![Vec::new(); coords.len()];
        for (f, t) in facets.iter().enumerate() {
            for &v in t {
                incident[v].push(f);
            }
        }
        ConvexHull { model, points, coords, vertices, facets, planes, incident }
    }

    /// Normal-cone solid angle at `v` in the linear chart's own flat metric.
    fn linear_cone_area(&self, v: usize) -> f64 {
        let normals: Vec<Vector> = self
            .vertex_star(v)
            .iter()
            .map(|&f| Vector::from_vec(self.facet_plane(f).0.to_vec()))
            .collect();
        let mut area = 0.0;
        for i in 1..normals.len().saturating_sub(1) {
            area += spherical_triangle_area(&normals[0], &normals[i], &normals[i + 1]);
        }
        area.abs()
    }

    /// Outward unit conormal and offset of facet `f` in the linear chart.
    pub fn facet_plane(&self, f: usize) -> (P3, f64) {
        self.planes[f]
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
        for &v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(self.coords[v][k]);
                hi[k] = hi[k].max(self.coords[v][k]);
            }
        }
        for k in 0..3 {
            d = d.max(hi[k] - lo[k]);
        }
        d
    }

    /// Largest signed facet-plane distance of `q` (linear chart); positive
    /// outside, and minus the distance to the boundary inside.
    pub fn signed_distance(&self, q: P3) -> f64 {
        (0..self.facets.len())
            .map(|f| {
                let (n, d) = self.facet_plane(f);
                dot(n, q) - d
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest outward excess over all input points (≤ slack for a valid hull).
    pub fn containment_excess(&self) -> f64 {
        self.coords.par_iter().map(|&q| self.signed_distance(q)).reduce(|| f64::NEG_INFINITY, f64::max)
    }

    /// Facets around vertex `v` in cyclic order.
    pub fn vertex_star(&self, v: usize) -> Vec<usize> {
        let mut by_edge: HashMap<usize, usize> = HashMap::new();
        let mut first = None;
        for &f in &self.incident[v] {
            let t = self.facets[f];
            if let Some(k) = t.iter().position(|&x| x == v) {
                // directed edge v → t[k+1] belongs to this facet
                by_edge.insert(t[(k + 1) % 3], f);
                first.get_or_insert(f);
            }
        }
        let Some(start) = first else { return Vec::new() };
        let mut out = vec![start];
        let mut cur = start;
        loop {
            let t = self.facets[cur];
            let k = t.iter().position(|&x| x == v).unwrap();
            let prev = t[(k + 2) % 3];
            match by_edge.get(&prev) {
                Some(&next) if next != start && out.len() <= by_edge.len() => {
                    out.push(next);
                    cur = next;
                }
                _ => break,
            }
        }
        out
    }

    /// g-unit outward normal of facet `f` at the chart point `x`, in
    /// coordinates of the g-orthonormal frame at `x`.
    fn frame_normal(&self, space: &ModelSpace, x: &Vector, frame: &[Vector], f: usize) -> Result<Vector> {
        let (n, _) = self.facet_plane(f);
        let xi = linear_conormal_to_normal(space, x, &Vector::from_vec(n.to_vec()))?;
        Ok(Vector::from_fn(3, |i, _| space.inner(x, &xi, &frame[i])))
    }

    /// Area of the outward normal cone at hull vertex `v`, measured in the
    /// g-orthonormal tangent frame.
    pub fn normal_cone_area(&self, space: &ModelSpace, v: usize) -> Result<f64> {
        let x = &self.points[v];
        let frame = space.orthonormal_basis(x);
        let star = self.vertex_star(v);
        if star.len() < 3 {
            return Err(Error::DegenerateHull);
        }
        let normals = star.iter().map(|&f| self.frame_normal(space, x, &frame, f)).collect::<Result<Vec<_>>>()?;
        let mut area = 0.0;
        for i in 1..normals.len() - 1 {
            area += spherical_triangle_area(&normals[0], &normals[i], &normals[i + 1]);
        }
        Ok(area.abs())
    }
}

/// Total curvature of the hull boundary: sum of normal-cone areas over the
/// hull vertices.
pub fn hull_boundary_curvature(space: &ModelSpace, hull: &ConvexHull) -> Result<f64> {
    if hull.facets.len() < 4 {
        return Err(Error::DegenerateHull);
    }
    let parts = hull.vertices.par_iter().map(|&v| hull.normal_cone_area(space, v)).collect::<Result<Vec<_>>>()?;
    Ok(parts.iter().sum())
}

/// Outcome of a convexity certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityCertificate {
    pub convex: bool,
    /// Largest depth of a surface vertex below the hull boundary (linear chart).
    pub max_violation: f64,
    /// Surface vertices that are not hull vertices.
    pub interior_vertices: usize,
}

/// Depth below the hull boundary of every input point (0 for hull vertices).
pub fn boundary_depths(hull: &ConvexHull) -> Vec<f64> {
    let mut is_vertex = vec![false; hull.points.len()];
    for &v in &hull.vertices {
        is_vertex[v] = true;
    }
    (0..hull.points.len())
        .into_par_iter()
        .map(|i| if is_vertex[i] { 0.0 } else { (-hull.signed_distance(hull.coords[i])).max(0.0) })
        .collect()
}

/// A closed surface is convex when the hull of its vertices keeps all of them.
pub fn certify_convex(space: &ModelSpace, surface: &TriSurface) -> Result<ConvexityCertificate> {
    let hull = convex_hull(space, &surface.vertices)?;
    let depths = boundary_depths(&hull);
    let tol = 1e-12 * hull.diameter();
    let deep: Vec<f64> = depths.iter().copied().filter(|&d| d > tol).collect();
    let missing = surface.vertices.len() - hull.vertices.len();
    Ok(ConvexityCertificate {
        convex: deep.is_empty(),
        max_violation: depths.iter().copied().fold(0.0, f64::max),
        interior_vertices: missing,
    })
}

/// Ordered total-curvature chain of a closed surface and its hull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainRecord {
    /// ∫|GK| over the surface.
    pub total_abs: f64,
    /// ∫ over {GK > 0}.
    pub total_positive: f64,
    /// Positive part restricted to vertices on the hull boundary.
    pub contact_positive: f64,
    /// Total curvature of the hull boundary.
    pub hull_curvature: f64,
    pub floor: f64,
    pub slack: f64,
    /// `contact_positive − hull_curvature`; reported only.
    pub equality_gap: f64,
    pub pass: bool,
}

/// Relative slack (of 4π) allowed at each link of the chain.
pub const CHAIN_SLACK: f64 = 0.005;

pub fn kleiner_chain(space: &ModelSpace, surface: &TriSurface) -> Result<ChainRecord> {
    let curv = surfaces::vertex_curvatures(space, surface)?;
    let areas = surface.vertex_areas(space);
    let rep = surfaces::report_from(surface, &curv, &areas);
    let hull = convex_hull(space, &surface.vertices)?;
    let hull_curvature = hull_boundary_curvature(space, &hull)?;
    let depths = boundary_depths(&hull);
    let on_boundary = 1e-7 * hull.diameter();
    let contact_positive: f64 = curv
        .iter()
        .zip(&areas)
        .zip(&depths)
        .filter(|((c, _), &d)| d <= on_boundary && c.gk > surfaces::GK_DEAD_BAND)
        .map(|((c, a), _)| a * c.gk)
        .sum();
    let floor = 4.0 * PI;
    let slack = CHAIN_SLACK * floor;
    let pass = rep.total_abs + slack >= rep.total_positive
        && rep.total_positive + slack >= hull_curvature
        && hull_curvature + slack >= floor;
    Ok(ChainRecord {
        total_abs: rep.total_abs,
        total_positive: rep.total_positive,
        contact_positive,
        hull_curvature,
        floor,
        slack,
        equality_gap: contact_positive - hull_curvature,
        pass,
    })
}

/// Opening angle of the tangent cone of the hull at a boundary point: π minus
/// the largest g-angle between supporting-plane normals there. π on facet
/// interiors, smaller at corners.
pub fn tangent_cone_aperture(space: &ModelSpace, hull: &ConvexHull, point: &Vector) -> Result<f64> {
    let q = linear_coords(space, point)?;
    let tol = 1e-9 * hull.diameter().max(1e-300);
    let mut active = Vec::new();
    let mut outside = false;
    for f in 0..hull.facets.len() {
        let (n, d) = hull.facet_plane(f);
        let s = dot(n, q) - d;
        if s > tol {
            outside = true;
        } else if s.abs() <= tol {
            active.push(f);
        }
    }
    if outside {
        return Err(Error::ExteriorPoint);
    }
    if active.is_empty() {
        return Err(Error::InteriorPoint);
    }
    let frame = space.orthonormal_basis(point);
    let normals = active.iter().map(|&f| hull.frame_normal(space, point, &frame, f)).collect::<Result<Vec<_>>>()?;
    let mut widest: f64 = 0.0;
    for i in 0..normals.len() {
        for j in i + 1..normals.len() {
            let (a, b) = (&normals[i], &normals[j]);
            widest = widest.max((a - b).norm().atan2((a + b).norm()) * 2.0);
        }
    }
    Ok(PI - widest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::Rng;

    /// Angle of a hyperbolic triangle opposite side `a` (law of cosines).
    fn hyp_angle(a: f64, b: f64, c: f64) -> f64 {
        ((b.cosh() * c.cosh() - a.cosh()) / (b.sinh() * c.sinh())).clamp(-1.0, 1.0).acos()
    }

    #[test]
    fn cube_hull_and_curvature() {
        let e = ModelSpace::euclidean(3);
        let mut pts = Vec::new();
        for i in 0..27 {
            pts.push(Vector::from_vec(vec![(i % 3) as f64 - 1.0, ((i / 3) % 3) as f64 - 1.0, (i / 9) as f64 - 1.0]));
        }
        let hull = convex_hull(&e, &pts).unwrap();
        assert_eq!(hull.vertices.len(), 8);
        assert!(hull.containment_excess() <= 1e-12);
        let g = hull_boundary_curvature(&e, &hull).unwrap();
        assert!((g - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn degenerate_inputs() {
        let h = ModelSpace::hyperbolic(3);
        let o = h.origin();
        let line: Vec<Vector> = (0..6).map(|k| h.exp_map(&o, &Vector::from_vec(vec![0.1 * k as f64, 0.2 * k as f64, -0.1 * k as f64]))).collect();
        assert!(matches!(convex_hull(&h, &line), Err(Error::DegenerateInput(_))));
        let p = ModelSpace::product_h2_r();
        assert!(matches!(convex_hull(&p, &[p.origin()]), Err(Error::UnsupportedSpace)));
    }

    #[test]
    fn hyperbolic_tetrahedron_curvature_is_four_pi_plus_area() {
        let h = ModelSpace::hyperbolic(3);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let pts: Vec<Vector> = (0..4).map(|_| fixtures::random_point(&h, &mut rng, 1.0)).collect();
            let hull = convex_hull(&h, &pts).unwrap();
            assert_eq!((hull.vertices.len(), hull.facets.len()), (4, 4));
            let g = hull_boundary_curvature(&h, &hull).unwrap();
            let mut area = 0.0;
            for skip in 0..4 {
                let v: Vec<&Vector> = (0..4).filter(|&k| k != skip).map(|k| &pts[k]).collect();
                let (a, b, c) = (h.distance(v[1], v[2]), h.distance(v[0], v[2]), h.distance(v[0], v[1]));
                area += PI - hyp_angle(a, b, c) - hyp_angle(b, c, a) - hyp_angle(c, a, b);
            }
            assert!((g - (4.0 * PI + area)).abs() < 1e-8, "{g} vs {}", 4.0 * PI + area);
            // midpoints of all geodesic pairs lie inside
            for i in 0..4 {
                for j in 0..4 {
                    let m = h.exp_map(&pts[i], &(h.log_map(&pts[i], &pts[j]) * 0.5));
                    assert!(hull.signed_distance(linear_coords(&h, &m).unwrap()) <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn sphere_meshes_certified() {
        let h = ModelSpace::hyperbolic(3);
        let c = certify_convex(&h, &fixtures::geodesic_sphere(1.0, 3)).unwrap();
        assert!(c.convex && c.max_violation <= 1e-9);
        let e = ModelSpace::euclidean(3);
        let c = certify_convex(&e, &fixtures::bumpy_sphere(3, 0.2)).unwrap();
        assert!(!c.convex && c.max_violation > 0.0);
        assert!(!certify_convex(&e, &fixtures::torus(2.0, 1.0, 16, 8)).unwrap().convex);
    }

    #[test]
    fn isometry_invariance_and_idempotence() {
        let h = ModelSpace::hyperbolic(3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts: Vec<Vector> = (0..60).map(|_| fixtures::random_point(&h, &mut rng, 0.8)).collect();
        let hull = convex_hull(&h, &pts).unwrap();
        let g = hull_boundary_curvature(&h, &hull).unwrap();
        assert!(g >= 4.0 * PI - 1e-6);
        let s = rng.gen_range(-0.5..0.5);
        let moved: Vec<Vector> = pts.iter().map(|p| h.boost(p, 1, s)).collect();
        let hull2 = convex_hull(&h, &moved).unwrap();
        assert_eq!(hull.vertices, hull2.vertices);
        assert!((hull_boundary_curvature(&h, &hull2).unwrap() - g).abs() <= 1e-8);
        let extreme: Vec<Vector> = hull.vertices.iter().map(|&v| pts[v].clone()).collect();
        let again = convex_hull(&h, &extreme).unwrap();
        assert_eq!(again.vertices.len(), extreme.len());
    }

    #[test]
    fn apertures() {
        let e = ModelSpace::euclidean(3);
        let s = fixtures::euclidean_sphere(1.0, 2);
        let hull = convex_hull(&e, &s.vertices).unwrap();
        let [a, b, c] = hull.facets[0];
        let centre = (&s.vertices[a] + &s.vertices[b] + &s.vertices[c]) / 3.0;
        assert_eq!(tangent_cone_aperture(&e, &hull, &centre).unwrap(), PI);
        assert!(matches!(tangent_cone_aperture(&e, &hull, &Vector::zeros(3)), Err(Error::InteriorPoint)));
        assert!(matches!(tangent_cone_aperture(&e, &hull, &Vector::from_vec(vec![2.0, 0.0, 0.0])), Err(Error::ExteriorPoint)));
        let alpha = PI / 4.0;
        let cone = fixtures::circular_cone(alpha, 1.0, 6, 24);
        let hull = convex_hull(&e, &cone).unwrap();
        // support planes at the apex pass through rim chords
        let n = 24.0;
        let defect = PI - tangent_cone_aperture(&e, &hull, &cone[0]).unwrap();
        let expect = PI - 2.0 * (alpha.tan() * (PI / n).cos()).atan();
        assert!((defect - expect).abs() < 1e-9, "{defect} vs {expect}");
    }
}
