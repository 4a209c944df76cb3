//! Parallel transport along sampled curves, loop holonomy and parallel frames.

use crate::curves::SampledCurve;
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};
use crate::spaces::{Matrix, ModelSpace, Vector};

/// Orthonormal frames attached to the samples of a curve.
#[derive(Debug, Clone)]
pub struct FrameField {
    pub points: Vec<Vector>,
    pub frames: Vec<Vec<Vector>>,
    /// Largest re-orthonormalization correction applied along the way.
    pub correction: f64,
}

/// Result of transporting a family of vectors.
#[derive(Debug, Clone)]
pub struct Transported {
    pub vectors: Vec<Vector>,
    pub correction: f64,
}

fn check_speed(space: &ModelSpace, curve: &SampledCurve) -> Result<()> {
    let dev = curve.max_speed_deviation(space);
    if dev > 1e-6 {
        return Err(Error::NonUnitSpeedCurve(dev));
    }
    Ok(())
}

/// Solves `V̇ = −Γ(γ', V)` for every vector in `vs` along segment `j` of the
/// Hermite interpolant, from `t_j` to `t_end`.
pub fn transport_partial(space: &ModelSpace, curve: &SampledCurve, j: usize, t_end: f64, vs: &[Vector]) -> Result<Vec<Vector>> {
    let t0 = curve.t[j];
    if t_end == t0 || curve.t[j + 1] == t0 {
        return Ok(vs.to_vec());
    }
    let n = space.dim();
    let k = vs.len();
    let mut y = vec![0.0; n * k];
    for (i, v) in vs.iter().enumerate() {
        y[i * n..(i + 1) * n].copy_from_slice(v.as_slice());
    }
    let rhs = |t: f64, y: &[f64], dy: &mut [f64]| {
        let (x, xd) = curve.eval_segment(j, t);
        for i in 0..k {
            let v = Vector::from_column_slice(&y[i * n..(i + 1) * n]);
            let g = space.christoffel_contract(&x, &xd, &v);
            for c in 0..n {
                dy[i * n + c] = -g[c];
            }
        }
    };
    ode::integrate(rhs, t0, t_end, &mut y, &OdeOptions::default())?;
    Ok((0..k).map(|i| Vector::from_column_slice(&y[i * n..(i + 1) * n])).collect())
}

fn gram_drift(space: &ModelSpace, x: &Vector, now: &[Vector], start: &Matrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..now.len() {
        for j in 0..now.len() {
            worst = worst.max((space.inner(x, &now[i], &now[j]) - start[(i, j)]).abs());
        }
    }
    worst
}

fn gram(space: &ModelSpace, x: &Vector, vs: &[Vector]) -> Matrix {
    Matrix::from_fn(vs.len(), vs.len(), |i, j| space.inner(x, &vs[i], &vs[j]))
}

/// Restores the initial Gram matrix by a symmetric correction `V ← V G^{-1/2} G0^{1/2}`.
fn restore_gram(space: &ModelSpace, x: &Vector, vs: &mut [Vector], g0: &Matrix) -> f64 {
    let g = gram(space, x, vs);
    let inv_sqrt = |m: &Matrix, inv: bool| -> Option<Matrix> {
        let e = m.clone().symmetric_eigen();
        if e.eigenvalues.iter().any(|&l| l <= 0.0) {
            return None;
        }
        let d = Matrix::from_diagonal(&e.eigenvalues.map(|l| if inv { 1.0 / l.sqrt() } else { l.sqrt() }));
        Some(&e.eigenvectors * d * e.eigenvectors.transpose())
    };
    let (Some(a), Some(b)) = (inv_sqrt(&g, true), inv_sqrt(g0, false)) else {
        return 0.0;
    };
    let mix = a * b;
    let old: Vec<Vector> = vs.to_vec();
    let mut change: f64 = 0.0;
    for (c, v) in vs.iter_mut().enumerate() {
        let mut nv = Vector::zeros(v.len());
        for (r, o) in old.iter().enumerate() {
            nv += o * mix[(r, c)];
        }
        change = change.max(space.norm(x, &(&nv - &*v)));
        *v = nv;
    }
    change
}

/// Transports `vs` (tangent at the curve start) to every sample of the curve.
/// Gram drift above 1e-9 is corrected and the correction size is recorded.
pub fn transport_along(space: &ModelSpace, curve: &SampledCurve, vs: &[Vector]) -> Result<Vec<Transported>> {
    check_speed(space, curve)?;
    let g0 = gram(space, curve.start(), vs);
    let mut out = Vec::with_capacity(curve.len());
    let mut cur = vs.to_vec();
    out.push(Transported { vectors: cur.clone(), correction: 0.0 });
    for j in 0..curve.len() - 1 {
        cur = transport_partial(space, curve, j, curve.t[j + 1], &cur)?;
        let x = &curve.points[j + 1];
        let mut correction = 0.0;
        if gram_drift(space, x, &cur, &g0) > 1e-9 {
            correction = restore_gram(space, x, &mut cur, &g0);
        }
        out.push(Transported { vectors: cur.clone(), correction });
    }
    Ok(out)
}

/// Transports `v0` from the start to the end of `curve`.
pub fn parallel_transport(space: &ModelSpace, curve: &SampledCurve, v0: &Vector) -> Result<Vector> {
    Ok(parallel_transport_report(space, curve, std::slice::from_ref(v0))?.vectors.remove(0))
}

/// Transports several vectors jointly and reports the accumulated correction.
pub fn parallel_transport_report(space: &ModelSpace, curve: &SampledCurve, vs: &[Vector]) -> Result<Transported> {
    let steps = transport_along(space, curve, vs)?;
    let correction = steps.iter().map(|s| s.correction).fold(0.0, f64::max);
    let mut last = steps.into_iter().last().expect("curve has samples");
    last.correction = correction;
    Ok(last)
}

/// Parallel frame along `curve` starting from `initial` (a standard orthonormal
/// basis at the start when `None`).
pub fn propagate_frame(space: &ModelSpace, curve: &SampledCurve, initial: Option<&[Vector]>) -> Result<FrameField> {
    let x0 = curve.start();
    let base = match initial {
        Some(f) => {
            if f.len() != space.dim() {
                return Err(Error::InvalidInput("initial frame must have n vectors".into()));
            }
            let g = gram(space, x0, f);
            if (g - Matrix::identity(f.len(), f.len())).abs().max() > 1e-8 {
                return Err(Error::InvalidInput("initial frame is not orthonormal".into()));
            }
            f.to_vec()
        }
        None => space.orthonormal_basis(x0),
    };
    let steps = transport_along(space, curve, &base)?;
    let correction = steps.iter().map(|s| s.correction).fold(0.0, f64::max);
    Ok(FrameField {
        points: curve.points.clone(),
        frames: steps.into_iter().map(|s| s.vectors).collect(),
        correction,
    })
}

fn check_closed(loop_: &SampledCurve) -> Result<()> {
    let gap = (loop_.start() - loop_.end()).norm();
    if gap > 1e-10 {
        return Err(Error::OpenLoop(gap));
    }
    Ok(())
}

/// Matrix `A_ij = g(e_i, P e_j)` of the loop holonomy in an orthonormal basis at the basepoint.
pub fn holonomy_matrix(space: &ModelSpace, loop_: &SampledCurve) -> Result<Matrix> {
    check_closed(loop_)?;
    let x0 = loop_.start();
    let basis = space.orthonormal_basis(x0);
    let moved = parallel_transport_report(space, loop_, &basis)?.vectors;
    Ok(Matrix::from_fn(basis.len(), basis.len(), |i, j| space.inner(x0, &basis[i], &moved[j])))
}

/// Operator norm of `P_loop − Id` on the tangent space at the basepoint.
pub fn holonomy_defect(space: &ModelSpace, loop_: &SampledCurve) -> Result<f64> {
    let a = holonomy_matrix(space, loop_)?;
    Ok(spectral_norm(&(a.clone() - Matrix::identity(a.nrows(), a.ncols()))))
}

/// Signed rotation angle of the holonomy of a loop in a 2-dimensional space.
pub fn holonomy_angle(space: &ModelSpace, loop_: &SampledCurve) -> Result<f64> {
    if space.dim() != 2 {
        return Err(Error::InvalidInput("rotation angle needs a surface".into()));
    }
    let a = holonomy_matrix(space, loop_)?;
    Ok(a[(1, 0)].atan2(a[(0, 0)]))
}

pub fn spectral_norm(m: &Matrix) -> f64 {
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Largest `|∇_{γ'} e_i|` over interior samples, by a five-point stencil on
/// the frame components.
pub fn frame_covariant_residual(space: &ModelSpace, curve: &SampledCurve, field: &FrameField) -> f64 {
    let m = curve.len();
    let mut worst: f64 = 0.0;
    for j in 2..m.saturating_sub(2) {
        let idx: Vec<usize> = (j - 2..=j + 2).collect();
        if idx.windows(2).any(|w| curve.t[w[1]] == curve.t[w[0]]) {
            continue;
        }
        let xs: Vec<f64> = idx.iter().map(|&i| curve.t[i]).collect();
        let x = &curve.points[j];
        let v = &curve.velocities[j];
        for e in 0..field.frames[j].len() {
            let ys: Vec<Vector> = idx.iter().map(|&i| field.frames[i][e].clone()).collect();
            let d = crate::curves::lagrange_derivative(&xs, &ys, curve.t[j]);
            let cov = d + space.christoffel_contract(x, v, &field.frames[j][e]);
            worst = worst.max(space.norm(x, &cov));
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn triangle_area(space: &ModelSpace, v: &[Vector; 3]) -> f64 {
        // Gauss-Bonnet on K = -1: area = π − angle sum
        let mut sum = 0.0;
        for i in 0..3 {
            let p = &v[i];
            let a = space.log_map(p, &v[(i + 1) % 3]);
            let b = space.log_map(p, &v[(i + 2) % 3]);
            let c = space.inner(p, &a, &b) / (space.norm(p, &a) * space.norm(p, &b));
            sum += c.clamp(-1.0, 1.0).acos();
        }
        PI - sum
    }

    fn equilateral(space: &ModelSpace, radius: f64) -> [Vector; 3] {
        let o = space.origin();
        let v = |k: f64| {
            let a = 2.0 * PI * k / 3.0;
            space.exp_map(&o, &Vector::from_vec(vec![radius * a.cos(), radius * a.sin()]))
        };
        [v(0.0), v(1.0), v(2.0)]
    }

    fn triangle_with_area(space: &ModelSpace, area: f64) -> [Vector; 3] {
        let (mut lo, mut hi) = (1e-3, 3.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if triangle_area(space, &equilateral(space, mid)) < area {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        equilateral(space, 0.5 * (lo + hi))
    }

    #[test]
    fn flat_transport_is_identity() {
        let e = ModelSpace::euclidean(3);
        let c = fixtures::helix_like(&e, 1.0, 300);
        let v = Vector::from_vec(vec![0.3, -1.0, 2.0]);
        assert!((parallel_transport(&e, &c, &v).unwrap() - &v).norm() < 1e-12);
    }

    #[test]
    fn triangle_holonomy_equals_area() {
        let h = ModelSpace::hyperbolic(2);
        let tri = triangle_with_area(&h, 0.2);
        let loop_ = fixtures::geodesic_polygon(&h, &tri, 200).unwrap();
        let angle = holonomy_angle(&h, &loop_).unwrap();
        assert!((angle.abs() - 0.2).abs() < 1e-5, "angle {angle}");
    }

    #[test]
    fn circle_defect_matches_rotation_by_area() {
        // disc of area 0.5: 2π(cosh r − 1) = 0.5
        let h = ModelSpace::hyperbolic(2);
        let r = (1.0 + 0.5 / (2.0 * PI)).acosh();
        let len = 2.0 * PI * r.sinh();
        let c = fixtures::hyperbolic_circle(r, 800, len);
        let d = holonomy_defect(&h, &c).unwrap();
        assert!((d - 2.0 * (0.25f64).sin()).abs() < 1e-6, "defect {d}");
    }

    #[test]
    fn sphere_octant_rotates_by_right_angle() {
        let s = ModelSpace::sphere_fixture(2);
        let verts = fixtures::sphere_octant_vertices();
        let loop_ = fixtures::geodesic_polygon(&s, &verts, 300).unwrap();
        let angle = holonomy_angle(&s, &loop_).unwrap();
        assert!((angle.abs() - PI / 2.0).abs() < 1e-6, "angle {angle}");
    }

    #[test]
    fn product_cylinder_loop_has_trivial_holonomy() {
        let p = ModelSpace::product_h2_r();
        let loop_ = fixtures::product_cylinder_loop(0.8, 0.5, 200).unwrap();
        assert!(holonomy_defect(&p, &loop_).unwrap() <= 1e-6);
    }

    #[test]
    fn open_loop_rejected() {
        let h = ModelSpace::hyperbolic(2);
        let g = h.geodesic(&h.origin(), &Vector::from_vec(vec![0.3, 0.1]), 20).unwrap();
        assert!(matches!(holonomy_defect(&h, &g), Err(Error::OpenLoop(_))));
    }

    #[test]
    fn non_unit_speed_rejected() {
        let h = ModelSpace::hyperbolic(2);
        let mut g = h.geodesic(&h.origin(), &Vector::from_vec(vec![0.3, 0.1]), 20).unwrap();
        g.velocities[3] *= 1.01;
        let v = Vector::from_vec(vec![1.0, 0.0]);
        assert!(matches!(parallel_transport(&h, &g, &v), Err(Error::NonUnitSpeedCurve(_))));
    }

    #[test]
    fn isometry_and_reversibility_on_random_curves() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for space in [ModelSpace::hyperbolic(3), ModelSpace::product_h2_r(), ModelSpace::euclidean(3)] {
            for _ in 0..100 {
                let c = fixtures::random_frenet_curve(&space, &mut rng, 0.8, 60);
                let x0 = c.start();
                let u = Vector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
                let w = Vector::from_fn(3, |_, _| rng.gen_range(-1.0..1.0));
                let out = parallel_transport_report(&space, &c, &[u.clone(), w.clone()]).unwrap();
                let x1 = c.end();
                for (a, b, pa, pb) in [(&u, &w, &out.vectors[0], &out.vectors[1]), (&u, &u, &out.vectors[0], &out.vectors[0])] {
                    assert!((space.inner(x0, a, b) - space.inner(x1, pa, pb)).abs() < 1e-8);
                }
                let back = parallel_transport(&space, &c.reversed(), &out.vectors[0]).unwrap();
                assert!((back - &u).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn frame_along_geodesic_keeps_angle_with_tangent() {
        let h = ModelSpace::hyperbolic(3);
        let g = h
            .geodesic(&Vector::from_vec(vec![0.1, -0.2, 0.3]), &Vector::from_vec(vec![-0.5, 0.4, 0.2]), 100)
            .unwrap();
        let f = propagate_frame(&h, &g, None).unwrap();
        for i in 0..3 {
            let a0 = h.inner(&g.points[0], &f.frames[0][i], &g.velocities[0]);
            for j in 0..g.len() {
                let aj = h.inner(&g.points[j], &f.frames[j][i], &g.velocities[j]);
                assert!((aj - a0).abs() < 1e-8);
            }
        }
        assert!(frame_covariant_residual(&h, &g, &f) <= 1e-7);
    }

    #[test]
    fn frame_mismatch_equals_defect() {
        let h = ModelSpace::hyperbolic(2);
        let c = fixtures::hyperbolic_circle(0.7, 400, 2.0 * PI * 0.7f64.sinh());
        let f = propagate_frame(&h, &c, None).unwrap();
        let x0 = c.start();
        let last = f.frames.last().unwrap();
        let a = Matrix::from_fn(2, 2, |i, j| h.inner(x0, &f.frames[0][i], &last[j]));
        let mismatch = spectral_norm(&(a - Matrix::identity(2, 2)));
        let d = holonomy_defect(&h, &c).unwrap();
        assert!((mismatch - d).abs() < 1e-8);
        assert!(frame_covariant_residual(&h, &c, &f) <= 1e-7);
    }

    #[test]
    fn small_triangle_defect_scales_linearly_with_area() {
        let h = ModelSpace::hyperbolic(2);
        let mut pts = Vec::new();
        for r in [0.4, 0.2, 0.1, 0.05] {
            let tri = equilateral(&h, r);
            let area = triangle_area(&h, &tri);
            let loop_ = fixtures::geodesic_polygon(&h, &tri, 100).unwrap();
            pts.push((area.ln(), holonomy_defect(&h, &loop_).unwrap().ln()));
        }
        let slope = crate::fit::loglog_slope(&pts);
        assert!((slope - 1.0).abs() <= 0.1, "slope {slope}");
    }
}
