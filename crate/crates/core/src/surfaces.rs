//! Curvature of closed triangulated surfaces immersed in a model space.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spaces::{Matrix, Model, ModelSpace, Vector};

/// Closed oriented triangulated surface with per-vertex outward unit normals.
#[derive(Debug, Clone, PartialEq)]
pub struct TriSurface {
    pub model: Model,
    pub vertices: Vec<Vector>,
    pub triangles: Vec<[usize; 3]>,
    pub normals: Vec<Vector>,
    pub genus: usize,
}

/// Totals of Gauss-Kronecker curvature and its Gauss-Bonnet companions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    /// ∫|GK|
    pub total_abs: f64,
    /// ∫GK
    pub total_signed: f64,
    /// ∫ over {GK > 0} of GK
    pub total_positive: f64,
    /// ∫K_Γ = ∫GK + ∫K(TΓ)
    pub gauss_bonnet: f64,
    /// ∫K(TΓ), the ambient sectional curvature of tangent planes
    pub ambient: f64,
    pub area: f64,
    /// `gauss_bonnet − 2πχ`
    pub gauss_bonnet_defect: f64,
    /// Largest relative asymmetry of the fitted shape operators.
    pub max_asymmetry: f64,
}

/// Per-vertex curvature data.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexCurvature {
    pub shape: Matrix,
    pub gk: f64,
    pub asymmetry: f64,
    /// Sectional curvature of the tangent plane.
    pub tangent_k: f64,
}

/// Dead band for the sign of GK when collecting the positive part.
pub const GK_DEAD_BAND: f64 = 1e-9;

impl TriSurface {
    /// Builds and validates a surface: manifold, consistently oriented
    /// connectivity with Euler characteristic `2 − 2g`, and unit normals
    /// tangent-orthogonal up to mesh scale.
    pub fn new(space: &ModelSpace, vertices: Vec<Vector>, triangles: Vec<[usize; 3]>, normals: Vec<Vector>, genus: usize) -> Result<Self> {
        let s = TriSurface { model: space.model(), vertices, triangles, normals, genus };
        s.validate(space)?;
        Ok(s)
    }

    pub fn new_unchecked(space: &ModelSpace, vertices: Vec<Vector>, triangles: Vec<[usize; 3]>, normals: Vec<Vector>, genus: usize) -> Self {
        TriSurface { model: space.model(), vertices, triangles, normals, genus }
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64
    }

    /// Euler characteristic from connectivity alone.
    pub fn connectivity_euler(&self) -> i64 {
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        self.vertices.len() as i64 - edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn validate(&self, space: &ModelSpace) -> Result<()> {
        if space.model() != self.model {
            return Err(Error::InvalidInput("surface and space use different models".into()));
        }
        let nv = self.vertices.len();
        if self.normals.len() != nv {
            return Err(Error::InvalidInput("one normal per vertex is required".into()));
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            if t.iter().any(|&i| i >= nv) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Topology(format!("invalid triangle {t:?}")));
            }
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        for (&(a, b), &c) in &directed {
            if c != 1 {
                return Err(Error::Topology(format!("edge {a}->{b} used {c} times with one orientation")));
            }
            if directed.get(&(b, a)) != Some(&1) {
                return Err(Error::Topology(format!("edge {a}-{b} is not shared by exactly two consistently oriented triangles")));
            }
        }
        let chi = self.connectivity_euler();
        if chi != self.euler_characteristic() {
            return Err(Error::Topology(format!("Euler characteristic {chi} does not match genus {}", self.genus)));
        }
        for (i, (x, n)) in self.vertices.iter().zip(&self.normals).enumerate() {
            if (space.norm(x, n) - 1.0).abs() > 1e-8 {
                return Err(Error::InvalidInput(format!("normal {i} is not unit length")));
            }
        }
        let worst = self.normal_orthogonality(space);
        if worst > 0.0 {
            return Err(Error::InvalidInput(format!("normals tilt out of the tangent planes beyond mesh scale by {worst:.3e}")));
        }
        Ok(())
    }

    /// Largest excess, over edges `ab`, of `|g(ν_a + ν̃_b, ê)|/2` above the
    /// mesh-scale allowance `1e-3 + 4|e|²`, where `ν̃_b` is `ν_b` carried to
    /// `a` along the edge geodesic and `ê` the unit edge direction. The
    /// symmetric form cancels the first-order chord tilt; nonpositive when
    /// the normals are acceptable.
    pub fn normal_orthogonality(&self, space: &ModelSpace) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let p = &self.vertices[a];
                let q = &self.vertices[b];
                let e = space.log_map(p, q);
                let len = space.norm(p, &e);
                if len == 0.0 {
                    continue;
                }
                let moved = space.transport_geodesic(q, p, &self.normals[b]);
                let c = 0.5 * space.inner(p, &(&self.normals[a] + moved), &e).abs() / len;
                worst = worst.max(c - (1e-3 + 4.0 * len * len));
            }
        }
        worst
    }

    /// Sorted one-ring neighbours of each vertex.
    pub fn vertex_neighbors(&self) -> Vec<Vec<usize>> {
        let mut nb = vec![Vec::new(); self.vertices.len()];
        for t in &self.triangles {
            for k in 0..3 {
                nb[t[k]].push(t[(k + 1) % 3]);
                nb[t[k]].push(t[(k + 2) % 3]);
            }
        }
        for l in nb.iter_mut() {
            l.sort_unstable();
            l.dedup();
        }
        nb
    }

    pub fn mean_edge_length(&self, space: &ModelSpace) -> f64 {
        let mut sum = 0.0;
        for t in &self.triangles {
            for k in 0..3 {
                sum += space.distance(&self.vertices[t[k]], &self.vertices[t[(k + 1) % 3]]);
            }
        }
        sum / (3 * self.triangles.len()) as f64
    }

    /// Mixed Voronoi area of each vertex from geodesic edge lengths.
    pub fn vertex_areas(&self, space: &ModelSpace) -> Vec<f64> {
        let mut areas = vec![0.0; self.vertices.len()];
        for t in &self.triangles {
            let l = |i: usize, j: usize| space.distance(&self.vertices[t[i]], &self.vertices[t[j]]);
            // side opposite vertex k
            let s = [l(1, 2), l(2, 0), l(0, 1)];
            let area = heron(s[0], s[1], s[2]);
            if area <= 0.0 {
                continue;
            }
            let cot = |k: usize| {
                let (a, b, c) = (s[k], s[(k + 1) % 3], s[(k + 2) % 3]);
                (b * b + c * c - a * a) / (4.0 * area)
            };
            let obtuse = (0..3).find(|&k| cot(k) < 0.0);
            for k in 0..3 {
                let share = match obtuse {
                    Some(o) if o == k => area / 2.0,
                    Some(_) => area / 4.0,
                    None => {
                        // edges from k to k+1 and k to k+2 weighted by the opposite cotangents
                        let e1 = s[(k + 2) % 3];
                        let e2 = s[(k + 1) % 3];
                        (e1 * e1 * cot((k + 2) % 3) + e2 * e2 * cot((k + 1) % 3)) / 8.0
                    }
                };
                areas[t[k]] += share;
            }
        }
        areas
    }

    /// Same surface with the connectivity reversed and normals negated.
    pub fn flipped(&self) -> TriSurface {
        TriSurface {
            model: self.model,
            vertices: self.vertices.clone(),
            triangles: self.triangles.iter().map(|t| [t[0], t[2], t[1]]).collect(),
            normals: self.normals.iter().map(|n| -n).collect(),
            genus: self.genus,
        }
    }
}

/// Triangle area from side lengths (Kahan's stable Heron formula).
pub fn heron(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p <= 0.0 {
        0.0
    } else {
        0.25 * p.sqrt()
    }
}

/// Orthonormal basis of the tangent plane `ν^⊥` at `x`.
pub fn tangent_basis(space: &ModelSpace, x: &Vector, nu: &Vector) -> Result<[Vector; 2]> {
    let basis = space.orthonormal_basis(x);
    // start from ν, then the two standard vectors least aligned with it
    let mut order: Vec<usize> = (0..basis.len()).collect();
    order.sort_by(|&i, &j| space.inner(x, &basis[i], nu).abs().total_cmp(&space.inner(x, &basis[j], nu).abs()));
    let f = space.orthonormalize(x, &[nu.clone(), basis[order[0]].clone(), basis[order[1]].clone()])?;
    Ok([f[1].clone(), f[2].clone()])
}

/// Least-squares shape operator at vertex `v` from covariant differences of
/// the normal over the one-ring: fits `∇_e ν ≈ A e` in a tangent frame.
///
/// In H³ each difference is scaled by `(d/2)/tanh(d/2)` for edge length `d`;
/// for umbilic spheres this makes the chord estimate exact, as it already is
/// for round spheres in E³.
pub fn shape_operator(space: &ModelSpace, surface: &TriSurface, v: usize, ring: &[usize]) -> Result<VertexCurvature> {
    if ring.len() < 3 {
        return Err(Error::DegenerateLink(v));
    }
    let p = &surface.vertices[v];
    let nu = &surface.normals[v];
    let [t1, t2] = tangent_basis(space, p, nu).map_err(|_| Error::DegenerateLink(v))?;
    let mut xx = nalgebra::Matrix2::<f64>::zeros();
    let mut yx = nalgebra::Matrix2::<f64>::zeros();
    for &q in ring {
        let d = space.log_map(p, &surface.vertices[q]);
        let x = nalgebra::Vector2::new(space.inner(p, &d, &t1), space.inner(p, &d, &t2));
        let moved = space.transport_geodesic(&surface.vertices[q], p, &surface.normals[q]);
        let mut dn = moved - nu;
        if space.model() == Model::Hyperboloid {
            let half = 0.5 * space.norm(p, &d);
            if half > 0.0 {
                dn *= half / half.tanh();
            }
        }
        let y = nalgebra::Vector2::new(space.inner(p, &dn, &t1), space.inner(p, &dn, &t2));
        xx += x * x.transpose();
        yx += y * x.transpose();
    }
    let eig = xx.symmetric_eigen();
    let (lo, hi) = (eig.eigenvalues.min(), eig.eigenvalues.max());
    if !(hi > 0.0) || lo < 1e-8 * hi {
        return Err(Error::DegenerateLink(v));
    }
    let a = yx * xx.try_inverse().ok_or(Error::DegenerateLink(v))?;
    let sym = (a + a.transpose()) * 0.5;
    let anti = (a - a.transpose()) * 0.5;
    let asymmetry = anti.norm() / sym.norm().max(f64::MIN_POSITIVE);
    let plane_k = space.sectional_curvature(p, &t1, &t2).map_err(|_| Error::DegenerateLink(v))?;
    Ok(VertexCurvature {
        shape: Matrix::from_row_slice(2, 2, sym.as_slice()),
        gk: sym.determinant(),
        asymmetry,
        tangent_k: plane_k,
    })
}

/// Shape operator data for every vertex.
pub fn vertex_curvatures(space: &ModelSpace, surface: &TriSurface) -> Result<Vec<VertexCurvature>> {
    let rings = surface.vertex_neighbors();
    (0..surface.vertices.len())
        .into_par_iter()
        .map(|v| shape_operator(space, surface, v, &rings[v]))
        .collect()
}

/// Integrates the per-vertex curvatures against the vertex areas.
pub fn report_from(surface: &TriSurface, curv: &[VertexCurvature], areas: &[f64]) -> CurvatureReport {
    let mut r = CurvatureReport {
        total_abs: 0.0,
        total_signed: 0.0,
        total_positive: 0.0,
        gauss_bonnet: 0.0,
        ambient: 0.0,
        area: 0.0,
        gauss_bonnet_defect: 0.0,
        max_asymmetry: 0.0,
    };
    for (c, &a) in curv.iter().zip(areas) {
        r.total_abs += a * c.gk.abs();
        r.total_signed += a * c.gk;
        if c.gk > GK_DEAD_BAND {
            r.total_positive += a * c.gk;
        }
        r.ambient += a * c.tangent_k;
        r.area += a;
        r.max_asymmetry = r.max_asymmetry.max(c.asymmetry);
    }
    r.gauss_bonnet = r.total_signed + r.ambient;
    r.gauss_bonnet_defect = r.gauss_bonnet - 2.0 * PI * surface.euler_characteristic() as f64;
    r
}

pub fn curvature_report(space: &ModelSpace, surface: &TriSurface) -> Result<CurvatureReport> {
    let curv = vertex_curvatures(space, surface)?;
    let areas = surface.vertex_areas(space);
    Ok(report_from(surface, &curv, &areas))
}

/// Largest `|K(T_pΓ)|` over vertices.
pub fn flatness_scan(space: &ModelSpace, surface: &TriSurface) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (x, n) in surface.vertices.iter().zip(&surface.normals) {
        let [t1, t2] = tangent_basis(space, x, n)?;
        worst = worst.max(space.sectional_curvature(x, &t1, &t2)?.abs());
    }
    Ok(worst)
}

/// Outer parallel surface at distance `t`: every vertex follows its outward
/// normal geodesic; new normals are the geodesic velocities.
pub fn parallel_surface(space: &ModelSpace, surface: &TriSurface, t: f64) -> Result<TriSurface> {
    space.require_cartan_hadamard()?;
    if !(t > 0.0) {
        return Err(Error::InvalidInput("parallel distance must be positive".into()));
    }
    let cert = crate::hull::certify_convex(space, surface)?;
    if !cert.convex {
        return Err(Error::NotConvex(cert.max_violation));
    }
    let (vertices, normals): (Vec<Vector>, Vec<Vector>) = surface
        .vertices
        .par_iter()
        .zip(&surface.normals)
        .map(|(p, n)| {
            let q = space.exp_map(p, &(n * t));
            let m = space.transport_geodesic(p, &q, n);
            let m = &m / space.norm(&q, &m);
            (q, m)
        })
        .unzip();
    Ok(TriSurface { model: surface.model, vertices, triangles: surface.triangles.clone(), normals, genus: surface.genus })
}

/// Spherical-image area and Gauss-map multiplicity over RP².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussMapArea {
    /// Σ |area of the spherical image of each triangle|.
    pub area_with_multiplicity: f64,
    /// 2π times the mean number of preimages of ±u over sampled directions u.
    pub rp2_quadrature: f64,
    pub min_multiplicity: usize,
    pub max_multiplicity: usize,
}

/// Signed solid angle of the spherical triangle `(a, b, c)` of unit vectors.
pub fn spherical_triangle_area(a: &Vector, b: &Vector, c: &Vector) -> f64 {
    let det = a.dot(&b.cross(c));
    let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * det.atan2(den)
}

/// Quasi-uniform directions on the unit sphere (Fibonacci lattice).
pub fn fibonacci_directions(n: usize) -> Vec<Vector> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Vector::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Area of the Gauss image counted with multiplicity, with a direction-sampled
/// multiplicity count on RP² (a direction and its antipode are identified).
pub fn gauss_map_area(space: &ModelSpace, surface: &TriSurface, directions: usize) -> Result<GaussMapArea> {
    if space.model() != Model::Euclidean || space.dim() != 3 {
        return Err(Error::AmbientNotEuclidean);
    }
    let n: Vec<Vector> = surface.normals.iter().map(|v| v / v.norm()).collect();
    let area: f64 = surface
        .triangles
        .par_iter()
        .map(|t| spherical_triangle_area(&n[t[0]], &n[t[1]], &n[t[2]]).abs())
        .sum();
    // directions on a half sphere stand for points of RP²
    let dirs: Vec<Vector> = fibonacci_directions(2 * directions).into_iter().filter(|d| d[2] > 0.0).collect();
    let counts: Vec<usize> = surface
        .triangles
        .par_iter()
        .fold(
            || vec![0usize; dirs.len()],
            |mut acc, t| {
                let (a, b, c) = (&n[t[0]], &n[t[1]], &n[t[2]]);
                let centre = (a + b + c).normalize();
                let reach = a.dot(&centre).min(b.dot(&centre)).min(c.dot(&centre)).clamp(-1.0, 1.0);
                let orient = a.dot(&b.cross(c));
                if orient == 0.0 {
                    return acc;
                }
                for (k, u) in dirs.iter().enumerate() {
                    for s in [1.0, -1.0] {
                        let w = u * s;
                        if w.dot(&centre) < reach - 1e-12 {
                            continue;
                        }
                        let d1 = a.cross(b).dot(&w) * orient;
                        let d2 = b.cross(c).dot(&w) * orient;
                        let d3 = c.cross(a).dot(&w) * orient;
                        if d1 >= 0.0 && d2 >= 0.0 && d3 > 0.0 || d1 > 0.0 && d2 > 0.0 && d3 >= 0.0 {
                            acc[k] += 1;
                        }
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0usize; dirs.len()], |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        });
    let mean = counts.iter().sum::<usize>() as f64 / counts.len() as f64;
    Ok(GaussMapArea {
        area_with_multiplicity: area,
        rp2_quadrature: 2.0 * PI * mean,
        min_multiplicity: counts.iter().cloned().min().unwrap_or(0),
        max_multiplicity: counts.iter().cloned().max().unwrap_or(0),
    })
}
