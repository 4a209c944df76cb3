//! Development of surfaces with flat tangent planes into E³.
//!
//! A parallel orthonormal frame is carried over a grid-parametrized patch,
//! its dual coframe is integrated to a map `f` into R³, and the result is
//! checked for isometry, total-curvature preservation and normal
//! correspondence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curves::{hermite_point, hermite_velocity, total_curvature, SampledCurve};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::spaces::{Matrix, Model, ModelSpace, Vector};
use crate::transport::spectral_norm;

pub const FLAT_TOL: f64 = 1e-6;
pub const PATH_DEFECT_TOL: f64 = 1e-5;
pub const EXACTNESS_TOL: f64 = 1e-6;

/// Surface sampled on a regular `nu × nv` parameter grid. Node `(i, j)` is
/// stored at `i * nv + j`; `tu`, `tv` are the parameter derivatives.
#[derive(Debug, Clone)]
pub struct GridPatch {
    pub model: Model,
    pub nu: usize,
    pub nv: usize,
    pub u0: f64,
    pub v0: f64,
    pub du: f64,
    pub dv: f64,
    pub points: Vec<Vector>,
    pub tu: Vec<Vector>,
    pub tv: Vec<Vector>,
    pub normals: Vec<Vector>,
}

impl GridPatch {
    /// Samples `map(u, v) -> (point, unit normal)` on the grid. Tangents come
    /// from a fourth-order central difference stencil.
    pub fn from_map<F>(space: &ModelSpace, nu: usize, nv: usize, u_range: (f64, f64), v_range: (f64, f64), map: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> (Vector, Vector) + Sync,
    {
        if nu < 3 || nv < 3 {
            return Err(Error::InvalidInput("grid needs at least 3×3 nodes".into()));
        }
        if space.dim() != 3 {
            return Err(Error::UnsupportedSpace);
        }
        let du = (u_range.1 - u_range.0) / (nu - 1) as f64;
        let dv = (v_range.1 - v_range.0) / (nv - 1) as f64;
        let h = 1e-3 * du.abs().min(dv.abs()).max(1e-12);
        let d = |f: &dyn Fn(f64) -> Vector, s: f64| (f(s - 2.0 * h) - f(s - h) * 8.0 + f(s + h) * 8.0 - f(s + 2.0 * h)) / (12.0 * h);
        let nodes: Vec<(Vector, Vector, Vector, Vector)> = (0..nu * nv)
            .into_par_iter()
            .map(|k| {
                let u = u_range.0 + du * (k / nv) as f64;
                let v = v_range.0 + dv * (k % nv) as f64;
                let (p, n) = map(u, v);
                let tu = d(&|s| map(s, v).0, u);
                let tv = d(&|s| map(u, s).0, v);
                (p, tu, tv, n)
            })
            .collect();
        let mut patch = GridPatch {
            model: space.model(),
            nu,
            nv,
            u0: u_range.0,
            v0: v_range.0,
            du,
            dv,
            points: Vec::with_capacity(nu * nv),
            tu: Vec::with_capacity(nu * nv),
            tv: Vec::with_capacity(nu * nv),
            normals: Vec::with_capacity(nu * nv),
        };
        for (p, tu, tv, n) in nodes {
            if !space.contains(&p) {
                return Err(Error::InvalidInput("patch leaves the model domain".into()));
            }
            patch.points.push(p);
            patch.tu.push(tu);
            patch.tv.push(tv);
            patch.normals.push(n);
        }
        Ok(patch)
    }

    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.nv + j
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest distance between corners and edge midpoints; a cheap
    /// stand-in for the diameter used to scale tolerances.
    pub fn diameter(&self, space: &ModelSpace) -> f64 {
        let (a, b) = (self.nu - 1, self.nv - 1);
        let probe = [(0, 0), (a, 0), (0, b), (a, b), (a / 2, 0), (a / 2, b), (0, b / 2), (a, b / 2), (a / 2, b / 2)];
        let mut d: f64 = 0.0;
        for (k, &(i, j)) in probe.iter().enumerate() {
            for &(p, q) in &probe[k + 1..] {
                d = d.max(space.distance(&self.points[self.idx(i, j)], &self.points[self.idx(p, q)]));
            }
        }
        d
    }
}

/// Largest |K| of the ambient sectional curvature on the patch tangent planes.
pub fn patch_flatness(space: &ModelSpace, patch: &GridPatch) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..patch.len() {
        worst = worst.max(space.sectional_curvature(&patch.points[k], &patch.tu[k], &patch.tv[k])?.abs());
    }
    Ok(worst)
}

/// Transports `frame` along the cubic Hermite arc from `p0` to `p1` whose end
/// derivatives (per unit parameter) are `d0`, `d1` over a step `h`.
pub fn transport_segment(space: &ModelSpace, p0: &Vector, d0: &Vector, p1: &Vector, d1: &Vector, h: f64, frame: &[Vector]) -> Result<Vec<Vector>> {
    let n = space.dim();
    let m = frame.len();
    let mut y: Vec<f64> = frame.iter().flat_map(|v| v.iter().cloned().collect::<Vec<_>>()).collect();
    if space.model() == Model::Euclidean {
        return Ok(frame.to_vec());
    }
    let opts = OdeOptions { atol: 1e-13, rtol: 1e-12, ..OdeOptions::default() };
    ode::integrate(
        |s, y, dy| {
            let x = hermite_point(p0, d0, p1, d1, h, s);
            let xd = hermite_velocity(p0, d0, p1, d1, h, s) * h;
            for k in 0..m {
                let v = Vector::from_column_slice(&y[k * n..(k + 1) * n]);
                let g = space.christoffel_contract(&x, &xd, &v);
                for i in 0..n {
                    dy[k * n + i] = -g[i];
                }
            }
        },
        0.0,
        1.0,
        &mut y,
        &opts,
    )?;
    Ok((0..m).map(|k| Vector::from_column_slice(&y[k * n..(k + 1) * n])).collect())
}

/// Parallel orthonormal frame over a patch.
#[derive(Debug, Clone)]
pub struct PatchFrame {
    /// `frames[k]` is `(e_1, e_2, e_3)` at node `k`.
    pub frames: Vec<Vec<Vector>>,
    /// Worst operator-norm mismatch between row-first and column-first transport.
    pub path_defect: f64,
    pub flatness: f64,
}

fn transport_u(space: &ModelSpace, patch: &GridPatch, i: usize, j: usize, frame: &[Vector], forward: bool) -> Result<Vec<Vector>> {
    let (a, b) = if forward { (patch.idx(i, j), patch.idx(i + 1, j)) } else { (patch.idx(i, j), patch.idx(i - 1, j)) };
    let h = if forward { patch.du } else { -patch.du };
    transport_segment(space, &patch.points[a], &patch.tu[a], &patch.points[b], &patch.tu[b], h, frame)
}

fn transport_v(space: &ModelSpace, patch: &GridPatch, i: usize, j: usize, frame: &[Vector], forward: bool) -> Result<Vec<Vector>> {
    let (a, b) = if forward { (patch.idx(i, j), patch.idx(i, j + 1)) } else { (patch.idx(i, j), patch.idx(i, j - 1)) };
    let h = if forward { patch.dv } else { -patch.dv };
    transport_segment(space, &patch.points[a], &patch.tv[a], &patch.points[b], &patch.tv[b], h, frame)
}

/// Frame at node 0 built from the patch tangent `tu`, `tv` and normal.
pub fn base_frame(space: &ModelSpace, patch: &GridPatch) -> Result<Vec<Vector>> {
    space.orthonormalize(&patch.points[0], &[patch.tu[0].clone(), patch.tv[0].clone(), patch.normals[0].clone()])
}

/// Row-first field: along row `i = 0`, then down every column. `first_u`
/// swaps the order.
fn sweep(space: &ModelSpace, patch: &GridPatch, base: &[Vector], first_u: bool) -> Result<Vec<Vec<Vector>>> {
    let (nu, nv) = (patch.nu, patch.nv);
    let lead_len = if first_u { nu } else { nv };
    let mut lead = vec![base.to_vec()];
    for s in 0..lead_len - 1 {
        let f = if first_u { transport_u(space, patch, s, 0, &lead[s], true)? } else { transport_v(space, patch, 0, s, &lead[s], true)? };
        lead.push(f);
    }
    let lines: Vec<Vec<Vec<Vector>>> = lead
        .par_iter()
        .enumerate()
        .map(|(s, f0)| {
            let len = if first_u { nv } else { nu };
            let mut line = vec![f0.clone()];
            for r in 0..len - 1 {
                let f = if first_u { transport_v(space, patch, s, r, &line[r], true)? } else { transport_u(space, patch, r, s, &line[r], true)? };
                line.push(f);
            }
            Ok(line)
        })
        .collect::<Result<_>>()?;
    let mut out = vec![Vec::new(); nu * nv];
    for (s, line) in lines.into_iter().enumerate() {
        for (r, f) in line.into_iter().enumerate() {
            let k = if first_u { patch.idx(s, r) } else { patch.idx(r, s) };
            out[k] = f;
        }
    }
    Ok(out)
}

fn frame_mismatch(space: &ModelSpace, x: &Vector, a: &[Vector], b: &[Vector]) -> f64 {
    let m = a.len();
    let g = Matrix::from_fn(m, m, |k, l| space.inner(x, &a[k], &b[l]));
    spectral_norm(&(g - Matrix::identity(m, m)))
}

/// Parallel orthonormal frame over a patch whose tangent planes are flat.
pub fn surface_frame(space: &ModelSpace, patch: &GridPatch, flat_tol: f64) -> Result<PatchFrame> {
    let base = base_frame(space, patch)?;
    surface_frame_from(space, patch, &base, flat_tol)
}

/// As [`surface_frame`] with a prescribed frame at node 0.
pub fn surface_frame_from(space: &ModelSpace, patch: &GridPatch, base: &[Vector], flat_tol: f64) -> Result<PatchFrame> {
    let flatness = patch_flatness(space, patch)?;
    if flatness > flat_tol {
        return Err(Error::NotFlatOnTangentPlanes(flatness));
    }
    let rows = sweep(space, patch, base, false)?;
    let cols = sweep(space, patch, base, true)?;
    let path_defect = (0..patch.len())
        .into_par_iter()
        .map(|k| frame_mismatch(space, &patch.points[k], &rows[k], &cols[k]))
        .reduce(|| 0.0, f64::max);
    if path_defect > PATH_DEFECT_TOL {
        return Err(Error::PathDependence(path_defect));
    }
    Ok(PatchFrame { frames: rows, path_defect, flatness })
}

/// Largest holonomy defect over the boundary loops of all grid cells.
pub fn cell_holonomy(space: &ModelSpace, patch: &GridPatch) -> Result<f64> {
    let cells: Vec<(usize, usize)> = (0..patch.nu - 1).flat_map(|i| (0..patch.nv - 1).map(move |j| (i, j))).collect();
    cells
        .par_iter()
        .map(|&(i, j)| {
            let x = &patch.points[patch.idx(i, j)];
            let e = space.orthonormal_basis(x);
            let f = transport_u(space, patch, i, j, &e, true)?;
            let f = transport_v(space, patch, i + 1, j, &f, true)?;
            let f = transport_u(space, patch, i + 1, j + 1, &f, false)?;
            let f = transport_v(space, patch, i, j + 1, &f, false)?;
            Ok(frame_mismatch(space, x, &e, &f))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

/// Coframe components `θ_i(X) = ⟨X, e_i⟩` at node `k`.
fn coframe(space: &ModelSpace, x: &Vector, frame: &[Vector], t: &Vector) -> Vector {
    Vector::from_fn(3, |i, _| space.inner(x, t, &frame[i]))
}

/// Image of a patch in R³ together with its integration diagnostics.
#[derive(Debug, Clone)]
pub struct DevelopedPatch {
    pub points: Vec<Vector>,
    /// `max |f_row − f_col|` over the grid, divided by the patch diameter.
    pub exactness: f64,
    /// Worst relative error between finite-difference `df` and `θ`.
    pub differential: f64,
}

fn integrate_coframe(patch: &GridPatch, th_u: &[Vector], th_v: &[Vector], origin: &Vector, first_u: bool) -> Vec<Vector> {
    let (nu, nv) = (patch.nu, patch.nv);
    let mut f = vec![Vector::zeros(3); nu * nv];
    f[0] = origin.clone();
    if first_u {
        for i in 1..nu {
            let (a, b) = (patch.idx(i - 1, 0), patch.idx(i, 0));
            f[b] = &f[a] + (&th_u[a] + &th_u[b]) * (0.5 * patch.du);
        }
        for i in 0..nu {
            for j in 1..nv {
                let (a, b) = (patch.idx(i, j - 1), patch.idx(i, j));
                f[b] = &f[a] + (&th_v[a] + &th_v[b]) * (0.5 * patch.dv);
            }
        }
    } else {
        for j in 1..nv {
            let (a, b) = (patch.idx(0, j - 1), patch.idx(0, j));
            f[b] = &f[a] + (&th_v[a] + &th_v[b]) * (0.5 * patch.dv);
        }
        for j in 0..nv {
            for i in 1..nu {
                let (a, b) = (patch.idx(i - 1, j), patch.idx(i, j));
                f[b] = &f[a] + (&th_u[a] + &th_u[b]) * (0.5 * patch.du);
            }
        }
    }
    f
}

/// Integrates the coframe from node 0 (mapped to `origin`) with the composite
/// trapezoid rule along row-first staircases, and measures the column-first
/// alternative against it.
pub fn develop_map_from(space: &ModelSpace, patch: &GridPatch, frame: &PatchFrame, origin: &Vector, exact_tol: f64) -> Result<DevelopedPatch> {
    if frame.frames.len() != patch.len() {
        return Err(Error::GridMismatch);
    }
    let th_u: Vec<Vector> = (0..patch.len()).map(|k| coframe(space, &patch.points[k], &frame.frames[k], &patch.tu[k])).collect();
    let th_v: Vec<Vector> = (0..patch.len()).map(|k| coframe(space, &patch.points[k], &frame.frames[k], &patch.tv[k])).collect();
    let f = integrate_coframe(patch, &th_u, &th_v, origin, false);
    let g = integrate_coframe(patch, &th_u, &th_v, origin, true);
    let diam = patch.diameter(space).max(f64::MIN_POSITIVE);
    let exactness = f.iter().zip(&g).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) / diam;
    if exactness > exact_tol {
        return Err(Error::PathDependence(exactness));
    }
    let mut differential: f64 = 0.0;
    for i in 1..patch.nu - 1 {
        for j in 1..patch.nv - 1 {
            let k = patch.idx(i, j);
            let fu = (&f[patch.idx(i + 1, j)] - &f[patch.idx(i - 1, j)]) / (2.0 * patch.du);
            let fv = (&f[patch.idx(i, j + 1)] - &f[patch.idx(i, j - 1)]) / (2.0 * patch.dv);
            differential = differential.max((fu - &th_u[k]).norm() / th_u[k].norm()).max((fv - &th_v[k]).norm() / th_v[k].norm());
        }
    }
    Ok(DevelopedPatch { points: f, exactness, differential })
}

pub fn develop_map(space: &ModelSpace, patch: &GridPatch, frame: &PatchFrame) -> Result<DevelopedPatch> {
    develop_map_from(space, patch, frame, &Vector::zeros(3), EXACTNESS_TOL)
}

/// Largest `|∮_cell θ_i| / area(cell)` over grid cells, with trapezoid edges.
pub fn coframe_circulation(space: &ModelSpace, patch: &GridPatch, frame: &PatchFrame) -> f64 {
    let th = |k: usize, t: &Vector| coframe(space, &patch.points[k], &frame.frames[k], t);
    let mut worst: f64 = 0.0;
    for i in 0..patch.nu - 1 {
        for j in 0..patch.nv - 1 {
            let (a, b, c, d) = (patch.idx(i, j), patch.idx(i + 1, j), patch.idx(i + 1, j + 1), patch.idx(i, j + 1));
            let circ = (th(a, &patch.tu[a]) + th(b, &patch.tu[b])) * (0.5 * patch.du)
                + (th(b, &patch.tv[b]) + th(c, &patch.tv[c])) * (0.5 * patch.dv)
                - (th(d, &patch.tu[d]) + th(c, &patch.tu[c])) * (0.5 * patch.du)
                - (th(a, &patch.tv[a]) + th(d, &patch.tv[d])) * (0.5 * patch.dv);
            let x = &patch.points[a];
            let (u, v) = (&patch.tu[a], &patch.tv[a]);
            let area = (space.inner(x, u, u) * space.inner(x, v, v) - space.inner(x, u, v).powi(2)).max(0.0).sqrt() * (patch.du * patch.dv).abs();
            worst = worst.max(circ.amax() / area);
        }
    }
    worst
}

/// Second-order finite differences of grid values at node `(i, j)`: central in
/// the interior, one-sided on the border.
pub fn grid_derivatives(patch: &GridPatch, values: &[Vector], i: usize, j: usize) -> (Vector, Vector) {
    fn d<'a>(k: usize, n: usize, h: f64, at: impl Fn(usize) -> &'a Vector) -> Vector {
        if k == 0 {
            (at(0) * -3.0 + at(1) * 4.0 - at(2)) / (2.0 * h)
        } else if k == n - 1 {
            (at(n - 1) * 3.0 - at(n - 2) * 4.0 + at(n - 3)) / (2.0 * h)
        } else {
            (at(k + 1) - at(k - 1)) / (2.0 * h)
        }
    }
    let fu = d(i, patch.nu, patch.du, |r| &values[patch.idx(r, j)]);
    let fv = d(j, patch.nv, patch.dv, |c| &values[patch.idx(i, c)]);
    (fu, fv)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryReport {
    /// Relative mismatch of first fundamental forms from central differences.
    pub inner_product: f64,
    /// Relative length mismatch over random grid paths.
    pub path_length: f64,
    /// Relative mismatch of ambient chords at random node pairs.
    pub chord: f64,
}

impl IsometryReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.inner_product <= tol && self.path_length <= tol
    }
}

/// Random monotone-free lattice walk on the grid, used for length checks.
pub fn random_grid_path<R: Rng>(patch: &GridPatch, rng: &mut R, steps: usize) -> Vec<(usize, usize)> {
    let mut i = rng.gen_range(0..patch.nu);
    let mut j = rng.gen_range(0..patch.nv);
    let mut path = vec![(i, j)];
    while path.len() <= steps {
        match rng.gen_range(0..4) {
            0 if i + 1 < patch.nu => i += 1,
            1 if i > 0 => i -= 1,
            2 if j + 1 < patch.nv => j += 1,
            3 if j > 0 => j -= 1,
            _ => continue,
        }
        path.push((i, j));
    }
    path
}

pub const ISOMETRY_PATHS: usize = 50;

/// Compares the source patch and its image as metric objects.
pub fn verify_isometry(space: &ModelSpace, patch: &GridPatch, image: &[Vector], seed: u64) -> Result<IsometryReport> {
    if image.len() != patch.len() || image.iter().any(|p| p.len() != 3) {
        return Err(Error::GridMismatch);
    }
    let mut inner_product: f64 = 0.0;
    for i in 1..patch.nu - 1 {
        for j in 1..patch.nv - 1 {
            let k = patch.idx(i, j);
            let x = &patch.points[k];
            let (su, sv) = (&patch.tu[k], &patch.tv[k]);
            let (fu, fv) = grid_derivatives(patch, image, i, j);
            let (nu, nv) = (space.norm(x, su), space.norm(x, sv));
            for (a, b, fa, fb, s) in [(su, su, &fu, &fu, nu * nu), (su, sv, &fu, &fv, nu * nv), (sv, sv, &fv, &fv, nv * nv)] {
                inner_product = inner_product.max((space.inner(x, a, b) - fa.dot(fb)).abs() / s);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let steps = (patch.nu + patch.nv).max(4);
    let mut path_length: f64 = 0.0;
    let mut chord: f64 = 0.0;
    for _ in 0..ISOMETRY_PATHS {
        let path = random_grid_path(patch, &mut rng, steps);
        let (mut ls, mut li) = (0.0, 0.0);
        for w in path.windows(2) {
            let (a, b) = (patch.idx(w[0].0, w[0].1), patch.idx(w[1].0, w[1].1));
            ls += space.distance(&patch.points[a], &patch.points[b]);
            li += (&image[a] - &image[b]).norm();
        }
        if ls > 0.0 {
            path_length = path_length.max((ls - li).abs() / ls);
        }
        let a = rng.gen_range(0..patch.len());
        let b = rng.gen_range(0..patch.len());
        let ds = space.distance(&patch.points[a], &patch.points[b]);
        if ds > 0.0 {
            chord = chord.max((ds - (&image[a] - &image[b]).norm()).abs() / ds);
        }
    }
    Ok(IsometryReport { inner_product, path_length, chord })
}

/// Length of the cubic Hermite arc between two grid nodes (5-point Gauss–Legendre).
pub fn segment_length(space: &ModelSpace, p0: &Vector, d0: &Vector, p1: &Vector, d1: &Vector, h: f64) -> f64 {
    const NODES: [(f64, f64); 5] = [
        (0.0, 0.568_888_888_888_888_9),
        (-0.538_469_310_105_683, 0.478_628_670_499_366_5),
        (0.538_469_310_105_683, 0.478_628_670_499_366_5),
        (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
        (0.906_179_845_938_664, 0.236_926_885_056_189_1),
    ];
    let h = h.abs();
    NODES
        .iter()
        .map(|&(x, w)| {
            let s = 0.5 * (x + 1.0);
            let p = hermite_point(p0, d0, p1, d1, h, s);
            w * space.norm(&p, &hermite_velocity(p0, d0, p1, d1, h, s))
        })
        .sum::<f64>()
        * 0.5
        * h
}

/// Builds source and image curves along a lattice path of adjacent nodes.
/// Turns between `u` and `v` steps become corners.
pub fn grid_path_curves(space: &ModelSpace, patch: &GridPatch, frame: &PatchFrame, image: &[Vector], path: &[(usize, usize)]) -> Result<(SampledCurve, SampledCurve)> {
    if path.len() < 2 {
        return Err(Error::InvalidInput("grid path needs two nodes".into()));
    }
    if image.len() != patch.len() {
        return Err(Error::GridMismatch);
    }
    let (mut t, mut ps, mut vs, mut pi, mut vi) = (Vec::new(), Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut s = 0.0;
    let mut prev_dir: Option<(usize, bool)> = None;
    for w in path.windows(2) {
        let ((i0, j0), (i1, j1)) = (w[0], w[1]);
        let dir = match (i1 as i64 - i0 as i64, j1 as i64 - j0 as i64) {
            (1, 0) => (0, true),
            (-1, 0) => (0, false),
            (0, 1) => (1, true),
            (0, -1) => (1, false),
            _ => return Err(Error::InvalidInput("grid path steps must join adjacent nodes".into())),
        };
        if i1 >= patch.nu || j1 >= patch.nv {
            return Err(Error::InvalidInput("grid path leaves the patch".into()));
        }
        let (a, b) = (patch.idx(i0, j0), patch.idx(i1, j1));
        let mut push = |k: usize, s: f64| {
            let d = if dir.0 == 0 { &patch.tu[k] } else { &patch.tv[k] };
            let x = &patch.points[k];
            let sv = d * (if dir.1 { 1.0 } else { -1.0 } / space.norm(x, d));
            vi.push(coframe(space, x, &frame.frames[k], &sv).normalize());
            vs.push(sv);
            t.push(s);
            ps.push(x.clone());
            pi.push(image[k].clone());
        };
        if prev_dir != Some(dir) {
            push(a, s);
        }
        s += if dir.0 == 0 {
            segment_length(space, &patch.points[a], &patch.tu[a], &patch.points[b], &patch.tu[b], patch.du)
        } else {
            segment_length(space, &patch.points[a], &patch.tv[a], &patch.points[b], &patch.tv[b], patch.dv)
        };
        push(b, s);
        prev_dir = Some(dir);
    }
    Ok((SampledCurve::new_unchecked(t.clone(), ps, vs), SampledCurve::new_unchecked(t, pi, vi)))
}

/// Total curvature of a grid path measured in the ambient space and of its
/// image in E³.
pub fn verify_tau_preservation(space: &ModelSpace, patch: &GridPatch, frame: &PatchFrame, image: &[Vector], path: &[(usize, usize)]) -> Result<(f64, f64)> {
    let (source, developed) = grid_path_curves(space, patch, frame, image, path)?;
    Ok((total_curvature(space, &source, None)?, total_curvature(&ModelSpace::euclidean(3), &developed, None)?))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalReport {
    /// `max | |ν′| − 1 |`.
    pub unit_defect: f64,
    /// `max |⟨df(X), ν′⟩|` over unit finite-difference tangents.
    pub orthogonality: f64,
}

impl NormalReport {
    pub fn max_defect(&self) -> f64 {
        self.unit_defect.max(self.orthogonality)
    }
}

/// Checks that `ν′ = Σ⟨ν, e_i⟩ e_i′` is a unit normal of the image.
pub fn verify_normal_correspondence(space: &ModelSpace, patch: &GridPatch, frame: &PatchFrame, image: &[Vector]) -> Result<NormalReport> {
    if image.len() != patch.len() || frame.frames.len() != patch.len() {
        return Err(Error::GridMismatch);
    }
    let mut unit_defect: f64 = 0.0;
    let mut orthogonality: f64 = 0.0;
    for i in 0..patch.nu {
        for j in 0..patch.nv {
            let k = patch.idx(i, j);
            let nu = coframe(space, &patch.points[k], &frame.frames[k], &patch.normals[k]);
            unit_defect = unit_defect.max((nu.norm() - 1.0).abs());
            let (fu, fv) = grid_derivatives(patch, image, i, j);
            for d in [fu, fv] {
                orthogonality = orthogonality.max(d.normalize().dot(&nu).abs());
            }
        }
    }
    Ok(NormalReport { unit_defect, orthogonality })
}

/// Full development report for one patch.
#[derive(Debug, Clone)]
pub struct Development {
    pub frame: PatchFrame,
    pub image: DevelopedPatch,
    pub isometry: IsometryReport,
    pub normals: NormalReport,
    pub circulation: f64,
}

pub fn develop_patch(space: &ModelSpace, patch: &GridPatch, flat_tol: f64, seed: u64) -> Result<Development> {
    let frame = surface_frame(space, patch, flat_tol)?;
    let image = develop_map(space, patch, &frame)?;
    let isometry = verify_isometry(space, patch, &image.points, seed)?;
    let normals = verify_normal_correspondence(space, patch, &frame, &image.points)?;
    let circulation = coframe_circulation(space, patch, &frame);
    Ok(Development { frame, image, isometry, normals, circulation })
}

/// Flat strip over a geodesic of H² in H²×R: base length `len`, height `height`.
pub fn geodesic_strip(nu: usize, nv: usize, len: f64, height: f64) -> Result<GridPatch> {
    let space = ModelSpace::product_h2_r();
    GridPatch::from_map(&space, nu, nv, (0.0, len), (0.0, height), |u, v| {
        // geodesic through (0.3, −0.2) with unit speed along a fixed direction
        let a = [0.3f64, -0.2];
        let a0 = (1.0 + a[0] * a[0] + a[1] * a[1]).sqrt();
        // Minkowski point A = (a0, a); unit tangent W orthogonal to A
        let d = [0.6f64, 0.8];
        let ad = a[0] * d[0] + a[1] * d[1];
        let w0 = ad / a0;
        let w = [d[0], d[1]];
        let wn = (w[0] * w[0] + w[1] * w[1] - w0 * w0).sqrt();
        let (w0, w) = (w0 / wn, [w[0] / wn, w[1] / wn]);
        let (c, s) = (u.cosh(), u.sinh());
        let x = [c * a[0] + s * w[0], c * a[1] + s * w[1]];
        let x0 = c * a0 + s * w0;
        let t = [s * a[0] + c * w[0], s * a[1] + c * w[1]];
        let t0 = s * a0 + c * w0;
        // normal: Minkowski cross of point and tangent, spatial part
        let n = [x0 * t[1] - x[1] * t0, x[0] * t0 - x0 * t[0]];
        let n = unit_h2(&[x[0], x[1]], &n);
        (Vector::from_vec(vec![x[0], x[1], v]), Vector::from_vec(vec![n[0], n[1], 0.0]))
    })
}

/// Rescales an H² chart vector to unit length at `x`.
fn unit_h2(x: &[f64; 2], n: &[f64; 2]) -> [f64; 2] {
    let f2 = 1.0 + x[0] * x[0] + x[1] * x[1];
    let xn = x[0] * n[0] + x[1] * n[1];
    let g = n[0] * n[0] + n[1] * n[1] - xn * xn / f2;
    let s = g.sqrt();
    [n[0] / s, n[1] / s]
}

/// Strip over the arc of the radius-`r` circle about the H² origin, arc length
/// `len`, height `height`. The base curve has geodesic curvature `coth r`.
pub fn circle_strip(r: f64, nu: usize, nv: usize, len: f64, height: f64) -> Result<GridPatch> {
    let space = ModelSpace::product_h2_r();
    let sr = r.sinh();
    let cr = r.cosh();
    GridPatch::from_map(&space, nu, nv, (0.0, len), (0.0, height), move |u, v| {
        let a = u / sr;
        (Vector::from_vec(vec![sr * a.cos(), sr * a.sin(), v]), Vector::from_vec(vec![cr * a.cos(), cr * a.sin(), 0.0]))
    })
}

/// Planar patch `c + R (u, v, 0)` in E³.
pub fn planar_patch(rotation: &Matrix, centre: &Vector, n: usize, side: f64) -> Result<GridPatch> {
    let space = ModelSpace::euclidean(3);
    let e1 = rotation.column(0).into_owned();
    let e2 = rotation.column(1).into_owned();
    let e3 = rotation.column(2).into_owned();
    GridPatch::from_map(&space, n, n, (0.0, side), (0.0, side), |u, v| (centre + &e1 * u + &e2 * v, e3.clone()))
}

/// Patch of the geodesic sphere of radius `r` about the H³ origin between
/// polar angles `[π/4, 3π/4]`.
pub fn geodesic_sphere_patch(r: f64, n: usize) -> Result<GridPatch> {
    let space = ModelSpace::hyperbolic(3);
    let q = std::f64::consts::FRAC_PI_4;
    GridPatch::from_map(&space, n, n, (q, 3.0 * q), (0.0, 2.0 * q), |th, ph| {
        let u = Vector::from_vec(vec![th.sin() * ph.cos(), th.sin() * ph.sin(), th.cos()]);
        (&u * r.sinh(), &u * r.cosh())
    })
}

/// One face chart of a cube-sphere parametrization: equiangular coordinates
/// `(a, b)` map to the unit direction `normalize(c + tan a · e1 + tan b · e2)`.
#[derive(Debug, Clone, Copy)]
pub struct CubeFace {
    pub centre: [f64; 3],
    pub e1: [f64; 3],
    pub e2: [f64; 3],
}

pub fn cube_faces() -> [CubeFace; 6] {
    let f = |c: [f64; 3], e1: [f64; 3], e2: [f64; 3]| CubeFace { centre: c, e1, e2 };
    [
        f([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]),
        f([-1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 1.0, 0.0]),
        f([0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]),
        f([0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]),
        f([0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]),
        f([0.0, 0.0, -1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]),
    ]
}

impl CubeFace {
    pub fn direction(&self, a: f64, b: f64) -> Vector {
        let (ta, tb) = (a.tan(), b.tan());
        Vector::from_fn(3, |i, _| self.centre[i] + ta * self.e1[i] + tb * self.e2[i]).normalize()
    }

    /// Equiangular coordinates of `u`, if it lies in the open half-space of this face.
    pub fn coords(&self, u: &Vector) -> Option<(f64, f64)> {
        let dot = |w: &[f64; 3]| w[0] * u[0] + w[1] * u[1] + w[2] * u[2];
        let c = dot(&self.centre);
        if c <= 1e-9 {
            return None;
        }
        Some(((dot(&self.e1) / c).atan(), (dot(&self.e2) / c).atan()))
    }
}

/// Patchwise development of a closed surface given as a map from unit
/// directions to `(point, outward unit normal)`.
#[derive(Debug, Clone)]
pub struct ClosedDevelopment {
    pub charts: Vec<(GridPatch, PatchFrame, DevelopedPatch)>,
    /// Worst frame disagreement between charts at overlap nodes.
    pub frame_mismatch: f64,
    /// Worst image disagreement between charts at overlap nodes, relative to
    /// the largest chart diameter.
    pub image_mismatch: f64,
}

pub const CHART_MARGIN: f64 = 0.1;
pub const CHART_FRAME_TOL: f64 = 1e-5;

/// Transports `frame` and integrates the coframe along a polyline of surface
/// points given by `map` at parameters `s_k`, returning the final frame and the
/// accumulated image offset.
fn carry_along<F>(space: &ModelSpace, map: &F, steps: usize, frame: &[Vector]) -> Result<(Vec<Vector>, Vector)>
where
    F: Fn(f64) -> Vector,
{
    let h = 1.0 / steps as f64;
    let eps = 1e-4 * h;
    let d = |s: f64| (map(s + eps) - map(s - eps)) / (2.0 * eps);
    let mut f = frame.to_vec();
    let mut off = Vector::zeros(3);
    for k in 0..steps {
        let (s0, s1) = (k as f64 * h, (k + 1) as f64 * h);
        let (p0, p1, d0, d1) = (map(s0), map(s1), d(s0), d(s1));
        let th0 = coframe(space, &p0, &f, &d0);
        let g = transport_segment(space, &p0, &d0, &p1, &d1, h, &f)?;
        let th1 = coframe(space, &p1, &g, &d1);
        off += (th0 + th1) * (0.5 * h);
        f = g;
    }
    Ok((f, off))
}

/// Develops a closed surface over six cube-sphere charts, each extended by
/// [`CHART_MARGIN`] so neighbouring charts overlap. Chart base frames and image
/// origins are carried from the first chart along surface paths.
pub fn develop_closed<F>(space: &ModelSpace, surface: F, n: usize, flat_tol: f64, exact_tol: f64) -> Result<ClosedDevelopment>
where
    F: Fn(&Vector) -> (Vector, Vector) + Send + Sync,
{
    let q = std::f64::consts::FRAC_PI_4 + CHART_MARGIN;
    let faces = cube_faces();
    let patches: Vec<GridPatch> = faces
        .iter()
        .map(|face| GridPatch::from_map(space, n, n, (-q, q), (-q, q), |a, b| surface(&face.direction(a, b))))
        .collect::<Result<_>>()?;
    let base = base_frame(space, &patches[0])?;
    let start = faces[0].direction(-q, -q);
    let surface = &surface;
    let charts: Vec<(GridPatch, PatchFrame, DevelopedPatch)> = patches
        .into_par_iter()
        .enumerate()
        .map(|(c, patch)| {
            let target = faces[c].direction(-q, -q);
            let (frame0, origin) = if c == 0 {
                (base.clone(), Vector::zeros(3))
            } else {
                // great-circle path between chart corners, bent through the
                // first chart centre when the corners are antipodal-ish
                let mid = (&start + &target).normalize();
                let via = if (&start + &target).norm() < 0.5 { Vector::from_column_slice(&faces[0].centre) } else { mid };
                let leg = |a: &Vector, b: &Vector| {
                    let (a, b) = (a.clone(), b.clone());
                    move |s: f64| surface(&(&a * (1.0 - s) + &b * s).normalize()).0
                };
                let (leg1, leg2) = (leg(&start, &via), leg(&via, &target));
                let (f1, o1) = carry_along(space, &leg1, 200, &base)?;
                let (f2, o2) = carry_along(space, &leg2, 200, &f1)?;
                (f2, o1 + o2)
            };
            let frame = surface_frame_from(space, &patch, &frame0, flat_tol)?;
            let image = develop_map_from(space, &patch, &frame, &origin, exact_tol)?;
            Ok((patch, frame, image))
        })
        .collect::<Result<_>>()?;
    let diam = charts.iter().map(|c| c.0.diameter(space)).fold(0.0, f64::max);
    let mut worst_frame: f64 = 0.0;
    let mut image_mismatch: f64 = 0.0;
    for (a, (pa, fa, ia)) in charts.iter().enumerate() {
        for (b, (pb, fb, ib)) in charts.iter().enumerate() {
            if a == b {
                continue;
            }
            for i in 0..pa.nu {
                for j in 0..pa.nv {
                    let dir = faces[a].direction(pa.u0 + pa.du * i as f64, pa.v0 + pa.dv * j as f64);
                    let Some((x, y)) = faces[b].coords(&dir) else { continue };
                    let (si, sj) = ((x - pb.u0) / pb.du, (y - pb.v0) / pb.dv);
                    if si < 0.0 || sj < 0.0 || si > (pb.nu - 1) as f64 || sj > (pb.nv - 1) as f64 {
                        continue;
                    }
                    let (i0, j0) = ((si.floor() as usize).min(pb.nu - 2), (sj.floor() as usize).min(pb.nv - 2));
                    let (s, t) = (si - i0 as f64, sj - j0 as f64);
                    let w = [(i0, j0, (1.0 - s) * (1.0 - t)), (i0 + 1, j0, s * (1.0 - t)), (i0, j0 + 1, (1.0 - s) * t), (i0 + 1, j0 + 1, s * t)];
                    let k = pa.idx(i, j);
                    let mut img = Vector::zeros(3);
                    let mut fr = vec![Vector::zeros(3); 3];
                    for &(p, r, wt) in &w {
                        let kb = pb.idx(p, r);
                        img += &ib.points[kb] * wt;
                        for e in 0..3 {
                            fr[e] += &fb.frames[kb][e] * wt;
                        }
                    }
                    image_mismatch = image_mismatch.max((img - &ia.points[k]).norm() / diam);
                    worst_frame = worst_frame.max(frame_mismatch(space, &pa.points[k], &fa.frames[k], &fr));
                }
            }
        }
    }
    Ok(ClosedDevelopment { charts, frame_mismatch: worst_frame, image_mismatch })
}
