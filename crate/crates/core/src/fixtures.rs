//! Analytic curve and surface fixtures used by tests, experiments and examples.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::curves::SampledCurve;
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::spaces::{Matrix, Model, ModelSpace, Vector};
use crate::surfaces::TriSurface;

/// Circle of radius `r` in E² centred at the origin, arclength `len`, `m` samples.
pub fn euclidean_circle(r: f64, m: usize, len: f64) -> SampledCurve {
    let t: Vec<f64> = (0..m).map(|j| len * j as f64 / (m - 1) as f64).collect();
    let points = t.iter().map(|s| Vector::from_vec(vec![r * (s / r).cos(), r * (s / r).sin()])).collect();
    let velocities = t.iter().map(|s| Vector::from_vec(vec![-(s / r).sin(), (s / r).cos()])).collect();
    SampledCurve::new_unchecked(t, points, velocities)
}

/// Geodesic circle of radius `r` about the origin of H² (hyperboloid chart).
pub fn hyperbolic_circle(r: f64, m: usize, len: f64) -> SampledCurve {
    let sr = r.sinh();
    let t: Vec<f64> = (0..m).map(|j| len * j as f64 / (m - 1) as f64).collect();
    let points = t.iter().map(|s| Vector::from_vec(vec![sr * (s / sr).cos(), sr * (s / sr).sin()])).collect();
    let velocities = t.iter().map(|s| Vector::from_vec(vec![-(s / sr).sin(), (s / sr).cos()])).collect();
    SampledCurve::new_unchecked(t, points, velocities)
}

/// Closed geodesic polygon through `vertices`, `m` samples per edge.
pub fn geodesic_polygon(space: &ModelSpace, vertices: &[Vector], m: usize) -> Result<SampledCurve> {
    let k = vertices.len();
    let pieces = (0..k)
        .map(|i| space.geodesic(&vertices[i], &vertices[(i + 1) % k], m))
        .collect::<Result<Vec<_>>>()?;
    let mut c = SampledCurve::concat(&pieces);
    // close exactly
    let last = c.points.len() - 1;
    c.points[last] = c.points[0].clone();
    Ok(c)
}

/// Chart coordinates of the octant triangle (1,0,0), (0,1,0), (0,0,−1) on the
/// unit sphere fixture.
pub fn sphere_octant_vertices() -> Vec<Vector> {
    vec![Vector::from_vec(vec![1.0, 0.0]), Vector::from_vec(vec![0.0, 1.0]), Vector::from_vec(vec![0.0, 0.0])]
}

/// Rectangle-shaped loop on the cylinder (circle of radius `r` in H²)×R of
/// H²×R: along a quarter of the circle, up by `height`, back, and down.
pub fn product_cylinder_loop(r: f64, height: f64, m: usize) -> Result<SampledCurve> {
    let sr = r.sinh();
    let arc = 0.5 * PI * sr;
    let lift = |s: f64, z: f64| Vector::from_vec(vec![sr * (s / sr).cos(), sr * (s / sr).sin(), z]);
    let tan = |s: f64, sign: f64| Vector::from_vec(vec![-sign * (s / sr).sin(), sign * (s / sr).cos(), 0.0]);
    let grid = |len: f64| -> Vec<f64> { (0..m).map(|j| len * j as f64 / (m - 1) as f64).collect() };
    let ta = grid(arc);
    let tz = grid(height);
    let along = SampledCurve::new_unchecked(
        ta.clone(),
        ta.iter().map(|&s| lift(s, 0.0)).collect(),
        ta.iter().map(|&s| tan(s, 1.0)).collect(),
    );
    let up = SampledCurve::new_unchecked(
        tz.clone(),
        tz.iter().map(|&z| lift(arc, z)).collect(),
        tz.iter().map(|_| Vector::from_vec(vec![0.0, 0.0, 1.0])).collect(),
    );
    let back = SampledCurve::new_unchecked(
        ta.clone(),
        ta.iter().map(|&s| lift(arc - s, height)).collect(),
        ta.iter().map(|&s| tan(arc - s, -1.0)).collect(),
    );
    let down = SampledCurve::new_unchecked(
        tz.clone(),
        tz.iter().map(|&z| lift(0.0, height - z)).collect(),
        tz.iter().map(|_| Vector::from_vec(vec![0.0, 0.0, -1.0])).collect(),
    );
    let c = SampledCurve::concat(&[along, up, back, down]);
    c.validate(&ModelSpace::product_h2_r())?;
    Ok(c)
}

/// Integrates the covariant Frenet equations from `x0` with initial frame
/// `frame` (T, N and, in dimension 3, B) for curvature `kappa(s)` and torsion
/// `torsion(s)`. Returns `m` samples of the unit-speed curve of length `len`.
pub fn frenet_curve(
    space: &ModelSpace,
    x0: &Vector,
    frame: &[Vector],
    kappa: &dyn Fn(f64) -> f64,
    torsion: &dyn Fn(f64) -> f64,
    len: f64,
    m: usize,
) -> Result<SampledCurve> {
    let n = space.dim();
    if !(n == 2 || n == 3) || frame.len() != n {
        return Err(Error::InvalidInput("Frenet curves need a full frame in dimension 2 or 3".into()));
    }
    let k = n + 1;
    let mut y = vec![0.0; n * k];
    y[..n].copy_from_slice(x0.as_slice());
    for (i, e) in frame.iter().enumerate() {
        y[(i + 1) * n..(i + 2) * n].copy_from_slice(e.as_slice());
    }
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| {
        let x = Vector::from_column_slice(&y[..n]);
        let e: Vec<Vector> = (0..n).map(|i| Vector::from_column_slice(&y[(i + 1) * n..(i + 2) * n])).collect();
        let (kp, tr) = (kappa(s), torsion(s));
        let mut cov = vec![&e[1] * kp, &e[0] * (-kp)];
        if n == 3 {
            cov[1] += &e[2] * tr;
            cov.push(&e[1] * (-tr));
        }
        dy[..n].copy_from_slice(e[0].as_slice());
        for i in 0..n {
            let d = &cov[i] - space.christoffel_contract(&x, &e[0], &e[i]);
            dy[(i + 1) * n..(i + 2) * n].copy_from_slice(d.as_slice());
        }
    };
    let opts = OdeOptions::default();
    let t: Vec<f64> = (0..m).map(|j| len * j as f64 / (m - 1) as f64).collect();
    let mut points = vec![x0.clone()];
    let mut velocities = vec![frame[0].clone()];
    for j in 1..m {
        ode::integrate(rhs, t[j - 1], t[j], &mut y, &opts)?;
        points.push(Vector::from_column_slice(&y[..n]));
        let v = Vector::from_column_slice(&y[n..2 * n]);
        let sp = space.norm(points.last().unwrap(), &v);
        velocities.push(v / sp);
    }
    Ok(SampledCurve::new_unchecked(t, points, velocities))
}

/// Constant curvature 1 and torsion 0.5 (a circle in dimension 2), starting
/// at the origin along the standard frame.
pub fn helix_like(space: &ModelSpace, len: f64, m: usize) -> SampledCurve {
    let o = space.origin();
    let frame = space.orthonormal_basis(&o);
    frenet_curve(space, &o, &frame, &|_| 1.0, &|_| 0.5, len, m).expect("helix fixture integrates")
}

/// Random point within chart distance `scale` of the origin.
pub fn random_point<R: Rng>(space: &ModelSpace, rng: &mut R, scale: f64) -> Vector {
    let o = space.origin();
    let v = Vector::from_fn(space.dim(), |_, _| rng.gen_range(-scale..scale));
    space.exp_map(&o, &v)
}

/// Random orthonormal frame at `x`.
pub fn random_frame<R: Rng>(space: &ModelSpace, rng: &mut R, x: &Vector) -> Vec<Vector> {
    loop {
        let vs: Vec<Vector> = (0..space.dim()).map(|_| Vector::from_fn(space.dim(), |_, _| rng.gen_range(-1.0..1.0))).collect();
        if let Ok(f) = space.orthonormalize(x, &vs) {
            return f;
        }
    }
}

/// Random smooth Frenet curve of length `len`: curvature and torsion are
/// random positive trigonometric profiles.
pub fn random_frenet_curve<R: Rng>(space: &ModelSpace, rng: &mut R, len: f64, m: usize) -> SampledCurve {
    let x0 = random_point(space, rng, 0.3);
    let frame = random_frame(space, rng, &x0);
    let (k0, k1, w, ph) = (rng.gen_range(0.2..2.0), rng.gen_range(0.0..0.8), rng.gen_range(0.5..4.0), rng.gen_range(0.0..TAU));
    let (t0, t1) = (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..1.0));
    let kappa = move |s: f64| (k0 + k1 * (w * s + ph).sin()).max(0.05);
    let torsion = move |s: f64| t0 + t1 * (w * s).cos();
    frenet_curve(space, &x0, &frame, &kappa, &torsion, len, m).expect("random Frenet fixture integrates")
}

fn v3(x: f64, y: f64, z: f64) -> Vector {
    Vector::from_vec(vec![x, y, z])
}

/// Unit icosphere: the icosahedron subdivided `level` times, 20·4^level
/// outward-oriented triangles.
pub fn icosphere(level: usize) -> (Vec<Vector>, Vec<[usize; 3]>) {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let mut pts: Vec<Vector> = [
        (-1.0, g, 0.0), (1.0, g, 0.0), (-1.0, -g, 0.0), (1.0, -g, 0.0),
        (0.0, -1.0, g), (0.0, 1.0, g), (0.0, -1.0, -g), (0.0, 1.0, -g),
        (g, 0.0, -1.0), (g, 0.0, 1.0), (-g, 0.0, -1.0), (-g, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| v3(x, y, z).normalize())
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid = std::collections::HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        for t in &tris {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                m[k] = *mid.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    pts.push(((&pts[a] + &pts[b]) * 0.5).normalize());
                    pts.len() - 1
                });
            }
            next.push([t[0], m[0], m[2]]);
            next.push([t[1], m[1], m[0]]);
            next.push([t[2], m[2], m[1]]);
            next.push([m[0], m[1], m[2]]);
        }
        tris = next;
    }
    for t in tris.iter_mut() {
        let (a, b, c) = (&pts[t[0]], &pts[t[1]], &pts[t[2]]);
        if (b - a).cross(&(c - a)).dot(&(a + b + c)) < 0.0 {
            t.swap(1, 2);
        }
    }
    (pts, tris)
}

/// Round sphere of radius `r` about the origin of E³.
pub fn euclidean_sphere(r: f64, level: usize) -> TriSurface {
    let (u, tris) = icosphere(level);
    let verts = u.iter().map(|p| p * r).collect();
    TriSurface::new_unchecked(&ModelSpace::euclidean(3), verts, tris, u, 0)
}

/// Geodesic sphere of radius `r` about the origin of H³.
pub fn geodesic_sphere(r: f64, level: usize) -> TriSurface {
    let (u, tris) = icosphere(level);
    let verts = u.iter().map(|p| p * r.sinh()).collect();
    let normals = u.iter().map(|p| p * r.cosh()).collect();
    TriSurface::new_unchecked(&ModelSpace::hyperbolic(3), verts, tris, normals, 0)
}

/// Star-shaped surface `X = ρ(u)u` in E³ over the icosphere, with normals from
/// the gradient of `|X| − ρ(X/|X|)`.
pub fn star_surface(level: usize, rho: &dyn Fn(&Vector) -> f64) -> TriSurface {
    let (u, tris) = icosphere(level);
    let phi = |x: &Vector| x.norm() - rho(&(x / x.norm()));
    let mut verts = Vec::with_capacity(u.len());
    let mut normals = Vec::with_capacity(u.len());
    for p in &u {
        let x = p * rho(p);
        let h = 1e-6 * x.norm();
        let grad = Vector::from_fn(3, |i, _| {
            let mut a = x.clone();
            let mut b = x.clone();
            a[i] += h;
            b[i] -= h;
            (phi(&a) - phi(&b)) / (2.0 * h)
        });
        normals.push(grad.normalize());
        verts.push(x);
    }
    TriSurface::new_unchecked(&ModelSpace::euclidean(3), verts, tris, normals, 0)
}

/// Unit sphere with the radial bump `1 + amp·(x³ − 3xy²)`.
pub fn bumpy_sphere(level: usize, amp: f64) -> TriSurface {
    star_surface(level, &move |u: &Vector| 1.0 + amp * (u[0].powi(3) - 3.0 * u[0] * u[1] * u[1]))
}

/// Torus of revolution about the z-axis on an `nu`×`nv` grid (2·nu·nv triangles).
pub fn torus(big_r: f64, small_r: f64, nu: usize, nv: usize) -> TriSurface {
    let mut verts = Vec::with_capacity(nu * nv);
    let mut normals = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let v = TAU * j as f64 / nv as f64;
            let rad = big_r + small_r * v.cos();
            verts.push(v3(rad * u.cos(), rad * u.sin(), small_r * v.sin()));
            normals.push(v3(v.cos() * u.cos(), v.cos() * u.sin(), v.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut tris = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            tris.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
            tris.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    TriSurface::new_unchecked(&ModelSpace::euclidean(3), verts, tris, normals, 1)
}

/// Raises the Euclidean covector `w` at `x` to the g-unit vector it defines.
pub(crate) fn covector_to_unit(space: &ModelSpace, x: &Vector, w: &Vector) -> Vector {
    let g: Matrix = space.metric(x);
    let v = g.lu().solve(w).expect("metric is invertible");
    let n = space.norm(x, &v);
    v / n
}

/// Pushes a surface in E³ into H³ through the exponential map at the origin
/// (hyperboloid chart `X ↦ sinh|X|·X/|X|`); normals are carried as conormals.
pub fn push_to_hyperbolic(surface: &TriSurface) -> TriSurface {
    let h = ModelSpace::hyperbolic(3);
    let mut verts = Vec::with_capacity(surface.vertices.len());
    let mut normals = Vec::with_capacity(surface.vertices.len());
    for (x, n) in surface.vertices.iter().zip(&surface.normals) {
        let s = x.norm();
        let (y, w) = if s < 1e-12 {
            (x.clone(), n.clone())
        } else {
            let d = x / s;
            // (dE)^{-T} is symmetric: radial factor 1/cosh s, transverse s/sinh s
            let radial = d.dot(n);
            let w = (n - &d * radial) * (s / s.sinh()) + &d * (radial / s.cosh());
            (&d * s.sinh(), w)
        };
        normals.push(covector_to_unit(&h, &y, &w));
        verts.push(y);
    }
    TriSurface::new_unchecked(&h, verts, surface.triangles.clone(), normals, surface.genus)
}

/// Ellipsoid `c + R·diag(axes)·u` in the Klein chart of H³; convex in H³
/// because Klein geodesics are straight.
pub fn klein_ellipsoid(centre: &Vector, axes: [f64; 3], rotation: &Matrix, level: usize) -> Result<TriSurface> {
    let h = ModelSpace::hyperbolic(3);
    let (u, tris) = icosphere(level);
    let a = Matrix::from_diagonal(&Vector::from_vec(axes.to_vec()));
    let ainv = Matrix::from_diagonal(&Vector::from_vec(axes.iter().map(|x| 1.0 / x).collect()));
    let mut verts = Vec::with_capacity(u.len());
    let mut normals = Vec::with_capacity(u.len());
    for p in &u {
        let k = centre + rotation * (&a * p);
        let nk = rotation * (&ainv * p);
        let x = h.from_klein(&k)?;
        normals.push(crate::hull::linear_conormal_to_normal(&h, &x, &nk)?);
        verts.push(x);
    }
    Ok(TriSurface::new_unchecked(&h, verts, tris, normals, 0))
}

/// Random rotation of R³ (QR of a Gaussian-like matrix).
pub fn random_rotation<R: Rng>(rng: &mut R) -> Matrix {
    let m = Matrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
    let q = m.qr().q();
    if q.determinant() < 0.0 {
        -q
    } else {
        q
    }
}

/// Random convex body in H³: a Klein-chart ellipsoid well inside the ball.
pub fn random_klein_ellipsoid<R: Rng>(rng: &mut R, level: usize) -> TriSurface {
    let centre = Vector::from_fn(3, |_, _| rng.gen_range(-0.2..0.2));
    let axes = [rng.gen_range(0.2..0.5), rng.gen_range(0.2..0.5), rng.gen_range(0.2..0.5)];
    let rot = random_rotation(rng);
    klein_ellipsoid(&centre, axes, &rot, level).expect("ellipsoid lies inside the Klein ball")
}

/// Random closed surface in E³ or H³: a star-shaped perturbed sphere or a
/// torus of revolution with random radii and orientation.
pub fn random_closed_surface<R: Rng>(space: &ModelSpace, rng: &mut R, level: usize) -> Result<TriSurface> {
    let hyperbolic = match space.model() {
        Model::Euclidean if space.dim() == 3 => false,
        Model::Hyperboloid if space.dim() == 3 => true,
        _ => return Err(Error::UnsupportedSpace),
    };
    let scale = if hyperbolic { rng.gen_range(0.4..1.2) } else { rng.gen_range(0.5..2.0) };
    let mut s = if rng.gen_bool(0.5) {
        let c: Vec<f64> = (0..7).map(|_| rng.gen_range(-0.12..0.12)).collect();
        let rho = move |u: &Vector| {
            let (x, y, z) = (u[0], u[1], u[2]);
            scale * (1.0 + c[0] * x + c[1] * y * z + c[2] * (3.0 * z * z - 1.0) + c[3] * x * y + c[4] * (x * x - y * y) + c[5] * (x.powi(3) - 3.0 * x * y * y) + c[6] * x * y * z)
        };
        star_surface(level, &rho)
    } else {
        let big = rng.gen_range(0.55..0.8) * scale;
        let small = rng.gen_range(0.15..0.35) * scale;
        let n = 4 * (1usize << level);
        torus(big, small, 2 * n, n)
    };
    let rot = random_rotation(rng);
    for v in s.vertices.iter_mut() {
        *v = &rot * &*v;
    }
    for n in s.normals.iter_mut() {
        *n = &rot * &*n;
    }
    Ok(if hyperbolic { push_to_hyperbolic(&s) } else { s })
}

/// Points of a solid circular cone with apex at the origin (index 0), axis
/// −z, half-angle `half_angle` and height `height`: `rings` rings on the
/// lateral surface and on the base disk, `per_ring` points each.
pub fn circular_cone(half_angle: f64, height: f64, rings: usize, per_ring: usize) -> Vec<Vector> {
    let mut pts = vec![v3(0.0, 0.0, 0.0)];
    let top = height * half_angle.tan();
    for i in 1..=rings {
        let z = height * i as f64 / rings as f64;
        let r = z * half_angle.tan();
        for j in 0..per_ring {
            let a = TAU * j as f64 / per_ring as f64;
            pts.push(v3(r * a.cos(), r * a.sin(), -z));
        }
    }
    for i in 0..rings {
        let r = top * i as f64 / rings as f64;
        let count = if i == 0 { 1 } else { per_ring };
        for j in 0..count {
            let a = TAU * j as f64 / per_ring as f64;
            pts.push(v3(r * a.cos(), r * a.sin(), -height));
        }
    }
    pts
}
