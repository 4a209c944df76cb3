//! Chart-based model spaces: Euclidean space, hyperbolic space (hyperboloid and
//! Klein charts), the product H²×R, and a round-sphere fixture used as a
//! positively curved negative control.
//!
//! Hyperbolic points in the hyperboloid chart are stored by their spatial
//! coordinates `x`; the point on the hyperboloid is `(sqrt(1+|x|²), x)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions};

pub type Vector = DVector<f64>;
pub type Matrix = DMatrix<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Euclidean,
    Hyperboloid,
    Klein,
    ProductH2R,
    SphereFixture,
}

impl Model {
    pub fn tag(self) -> &'static str {
        match self {
            Model::Euclidean => "euclidean",
            Model::Hyperboloid => "hyperboloid",
            Model::Klein => "klein",
            Model::ProductH2R => "product_h2_r",
            Model::SphereFixture => "sphere_fixture",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Model> {
        Some(match tag {
            "euclidean" => Model::Euclidean,
            "hyperboloid" => Model::Hyperboloid,
            "klein" => Model::Klein,
            "product_h2_r" => Model::ProductH2R,
            "sphere_fixture" => Model::SphereFixture,
            _ => return None,
        })
    }
}

/// Christoffel symbols `Γ^k_ij` stored as `data[(k * n + i) * n + j]`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Christoffel {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }
}

/// Fully covariant curvature tensor `R_ijkl = <R(∂i,∂j)∂k, ∂l>` with
/// `R(X,Y)Z = ∇X∇Y Z − ∇Y∇X Z − ∇[X,Y] Z`, so that `R(u,v,v,u) = K |u∧v|²`.
#[derive(Debug, Clone)]
pub struct Riemann {
    pub n: usize,
    pub data: Vec<f64>,
}

impl Riemann {
    fn idx(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.idx(i, j, k, l)]
    }

    /// `R(a, b, c, d)` for tangent vectors in chart components.
    pub fn form(&self, a: &Vector, b: &Vector, c: &Vector, d: &Vector) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0.0 {
                    continue;
                }
                for k in 0..n {
                    if c[k] == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        s += self.get(i, j, k, l) * a[i] * b[j] * c[k] * d[l];
                    }
                }
            }
        }
        s
    }

    pub fn max_abs_diff(&self, other: &Riemann) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// An immutable Riemannian model space.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpace {
    model: Model,
    dim: usize,
    /// Closed-form ball radius inside which two-point expansions are trusted.
    pub chart_ball_radius: f64,
}

fn minkowski(a: &Vector, b: &Vector) -> f64 {
    -a[0] * b[0] + a.rows(1, a.len() - 1).dot(&b.rows(1, b.len() - 1))
}

fn spatial(v: &Vector) -> Vector {
    v.rows(1, v.len() - 1).into_owned()
}

fn hyp_height(x: &Vector) -> f64 {
    (1.0 + x.norm_squared()).sqrt()
}

fn hyp_lift(x: &Vector) -> Vector {
    let mut p = Vector::zeros(x.len() + 1);
    p[0] = hyp_height(x);
    p.rows_mut(1, x.len()).copy_from(x);
    p
}

fn hyp_lift_tangent(x: &Vector, v: &Vector) -> Vector {
    let mut w = Vector::zeros(x.len() + 1);
    w[0] = x.dot(v) / hyp_height(x);
    w.rows_mut(1, x.len()).copy_from(v);
    w
}

/// Minkowski squared chord `<P−Q, P−Q>` computed without cancellation.
fn hyp_chord2(x: &Vector, y: &Vector) -> f64 {
    let dt = (x.norm_squared() - y.norm_squared()) / (hyp_height(x) + hyp_height(y));
    ((x - y).norm_squared() - dt * dt).max(0.0)
}

fn hyp_exp(x: &Vector, v: &Vector) -> Vector {
    let p = hyp_lift(x);
    let w = hyp_lift_tangent(x, v);
    let s = minkowski(&w, &w).max(0.0).sqrt();
    if s == 0.0 {
        return x.clone();
    }
    let sinhc = if s < 1e-8 { 1.0 + s * s / 6.0 } else { s.sinh() / s };
    spatial(&(p * s.cosh() + w * sinhc))
}

fn hyp_distance(x: &Vector, y: &Vector) -> f64 {
    2.0 * (hyp_chord2(x, y).sqrt() / 2.0).asinh()
}

fn hyp_log(x: &Vector, y: &Vector) -> Vector {
    let c2 = hyp_chord2(x, y);
    let d = 2.0 * (c2.sqrt() / 2.0).asinh();
    if d == 0.0 {
        return Vector::zeros(x.len());
    }
    // W = Q + <P,Q> P = (Q − P) − (c²/2) P, tangent at P with |W| = sinh d
    let w = (y - x) - x * (c2 / 2.0);
    let ratio = if d < 1e-8 { 1.0 - d * d / 6.0 } else { d / d.sinh() };
    w * ratio
}

fn hyp_transport(x: &Vector, y: &Vector, v: &Vector) -> Vector {
    let p = hyp_lift(x);
    let q = hyp_lift(y);
    let w = hyp_lift_tangent(x, v);
    // 1 − <P,Q> = 2 + c²/2
    let denom = 2.0 + hyp_chord2(x, y) / 2.0;
    let res = &w + (&p + &q) * (minkowski(&q, &w) / denom);
    spatial(&res)
}

fn klein_to_hyp(k: &Vector) -> Vector {
    k / (1.0 - k.norm_squared()).sqrt()
}

fn hyp_to_klein(x: &Vector) -> Vector {
    x / hyp_height(x)
}

fn klein_tangent_to_hyp(k: &Vector, dk: &Vector) -> Vector {
    let s2 = 1.0 - k.norm_squared();
    let s = s2.sqrt();
    dk / s + k * (k.dot(dk) / (s2 * s))
}

fn hyp_tangent_to_klein(x: &Vector, dx: &Vector) -> Vector {
    let f = hyp_height(x);
    dx / f - x * (x.dot(dx) / (f * f * f))
}

fn sph_lift(x: &Vector) -> Vector {
    let r2 = x.norm_squared();
    let mut y = Vector::zeros(x.len() + 1);
    y.rows_mut(0, x.len()).copy_from(&(x * (2.0 / (1.0 + r2))));
    y[x.len()] = (r2 - 1.0) / (r2 + 1.0);
    y
}

fn sph_unlift(y: &Vector) -> Vector {
    let n = y.len() - 1;
    y.rows(0, n) / (1.0 - y[n])
}

fn sph_jacobian(x: &Vector) -> Matrix {
    let n = x.len();
    let r2 = x.norm_squared();
    let a = 1.0 + r2;
    let mut j = Matrix::zeros(n + 1, n);
    for r in 0..n {
        for c in 0..n {
            let d = if r == c { 2.0 / a } else { 0.0 };
            j[(r, c)] = d - 4.0 * x[r] * x[c] / (a * a);
        }
    }
    for c in 0..n {
        j[(n, c)] = 4.0 * x[c] / (a * a);
    }
    j
}

fn sph_lift_tangent(x: &Vector, v: &Vector) -> Vector {
    sph_jacobian(x) * v
}

fn sph_pull_tangent(x: &Vector, w: &Vector) -> Vector {
    let a = 1.0 + x.norm_squared();
    sph_jacobian(x).transpose() * w * (a * a / 4.0)
}

fn sph_chord(p: &Vector, q: &Vector) -> f64 {
    (p - q).norm()
}

impl ModelSpace {
    pub fn new(model: Model, dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput("dimension must be at least 2".into()));
        }
        if model == Model::ProductH2R && dim != 3 {
            return Err(Error::InvalidInput("H²×R is three-dimensional".into()));
        }
        Ok(ModelSpace { model, dim, chart_ball_radius: 1.0 })
    }

    pub fn euclidean(dim: usize) -> Self {
        Self::new(Model::Euclidean, dim).expect("valid dimension")
    }

    pub fn hyperbolic(dim: usize) -> Self {
        Self::new(Model::Hyperboloid, dim).expect("valid dimension")
    }

    pub fn klein(dim: usize) -> Self {
        Self::new(Model::Klein, dim).expect("valid dimension")
    }

    pub fn product_h2_r() -> Self {
        Self::new(Model::ProductH2R, 3).expect("valid dimension")
    }

    pub fn sphere_fixture(dim: usize) -> Self {
        Self::new(Model::SphereFixture, dim).expect("valid dimension")
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_cartan_hadamard(&self) -> bool {
        self.model != Model::SphereFixture
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self.model, Model::Hyperboloid | Model::Klein)
    }

    pub fn require_cartan_hadamard(&self) -> Result<()> {
        if self.is_cartan_hadamard() {
            Ok(())
        } else {
            Err(Error::NotCartanHadamard)
        }
    }

    pub fn origin(&self) -> Vector {
        Vector::zeros(self.dim)
    }

    /// Whether `x` is a valid chart point.
    pub fn contains(&self, x: &Vector) -> bool {
        x.len() == self.dim
            && x.iter().all(|v| v.is_finite())
            && (self.model != Model::Klein || x.norm_squared() < 1.0)
    }

    pub fn metric(&self, x: &Vector) -> Matrix {
        let n = self.dim;
        match self.model {
            Model::Euclidean => Matrix::identity(n, n),
            Model::Hyperboloid => {
                let f2 = 1.0 + x.norm_squared();
                Matrix::identity(n, n) - x * x.transpose() / f2
            }
            Model::Klein => {
                let s = 1.0 - x.norm_squared();
                Matrix::identity(n, n) / s + x * x.transpose() / (s * s)
            }
            Model::ProductH2R => {
                let mut g = Matrix::identity(3, 3);
                let f2 = 1.0 + x[0] * x[0] + x[1] * x[1];
                for i in 0..2 {
                    for j in 0..2 {
                        g[(i, j)] -= x[i] * x[j] / f2;
                    }
                }
                g
            }
            Model::SphereFixture => {
                let a = 1.0 + x.norm_squared();
                Matrix::identity(n, n) * (4.0 / (a * a))
            }
        }
    }

    pub fn inner(&self, x: &Vector, u: &Vector, v: &Vector) -> f64 {
        match self.model {
            Model::Euclidean => u.dot(v),
            Model::Hyperboloid => {
                let f2 = 1.0 + x.norm_squared();
                u.dot(v) - x.dot(u) * x.dot(v) / f2
            }
            Model::Klein => {
                let s = 1.0 - x.norm_squared();
                u.dot(v) / s + x.dot(u) * x.dot(v) / (s * s)
            }
            Model::ProductH2R => {
                let f2 = 1.0 + x[0] * x[0] + x[1] * x[1];
                let xu = x[0] * u[0] + x[1] * u[1];
                let xv = x[0] * v[0] + x[1] * v[1];
                u.dot(v) - xu * xv / f2
            }
            Model::SphereFixture => {
                let a = 1.0 + x.norm_squared();
                u.dot(v) * 4.0 / (a * a)
            }
        }
    }

    pub fn norm(&self, x: &Vector, v: &Vector) -> f64 {
        self.inner(x, v, v).max(0.0).sqrt()
    }

    /// `Γ^k_ij a^i b^j` evaluated in closed form.
    pub fn christoffel_contract(&self, x: &Vector, a: &Vector, b: &Vector) -> Vector {
        match self.model {
            Model::Euclidean => Vector::zeros(self.dim),
            Model::Hyperboloid => x * (-self.inner(x, a, b)),
            Model::Klein => {
                let s = 1.0 - x.norm_squared();
                (a * x.dot(b) + b * x.dot(a)) / s
            }
            Model::ProductH2R => {
                let f2 = 1.0 + x[0] * x[0] + x[1] * x[1];
                let xa = x[0] * a[0] + x[1] * a[1];
                let xb = x[0] * b[0] + x[1] * b[1];
                let gab = a[0] * b[0] + a[1] * b[1] - xa * xb / f2;
                Vector::from_vec(vec![-x[0] * gab, -x[1] * gab, 0.0])
            }
            Model::SphereFixture => {
                let a2 = 1.0 + x.norm_squared();
                let phi = x * (-2.0 / a2);
                a * phi.dot(b) + b * phi.dot(a) - phi * a.dot(b)
            }
        }
    }

    pub fn christoffel(&self, x: &Vector) -> Christoffel {
        let n = self.dim;
        let mut data = vec![0.0; n * n * n];
        for i in 0..n {
            let ei = Vector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 });
            for j in 0..n {
                let ej = Vector::from_fn(n, |r, _| if r == j { 1.0 } else { 0.0 });
                let g = self.christoffel_contract(x, &ei, &ej);
                for k in 0..n {
                    data[(k * n + i) * n + j] = g[k];
                }
            }
        }
        Christoffel { n, data }
    }

    /// Curvature tensor in closed form.
    pub fn riemann(&self, x: &Vector) -> Riemann {
        let n = self.dim;
        let g = self.metric(x);
        let mut data = vec![0.0; n * n * n * n];
        let (k, block) = match self.model {
            Model::Euclidean => (0.0, n),
            Model::Hyperboloid | Model::Klein => (-1.0, n),
            Model::SphereFixture => (1.0, n),
            Model::ProductH2R => (-1.0, 2),
        };
        if k != 0.0 {
            for i in 0..block {
                for j in 0..block {
                    for kk in 0..block {
                        for l in 0..block {
                            let v = k * (g[(i, l)] * g[(j, kk)] - g[(i, kk)] * g[(j, l)]);
                            data[((i * n + j) * n + kk) * n + l] = v;
                        }
                    }
                }
            }
        }
        Riemann { n, data }
    }

    /// Curvature tensor from central differences of the Christoffel symbols.
    /// Independent of [`ModelSpace::riemann`]; used as a test oracle.
    pub fn riemann_fd(&self, x: &Vector, h: f64) -> Riemann {
        let n = self.dim;
        let gam = self.christoffel(x);
        let mut dgam = Vec::with_capacity(n);
        for d in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[d] += h;
            xm[d] -= h;
            let gp = self.christoffel(&xp);
            let gm = self.christoffel(&xm);
            let diff: Vec<f64> =
                gp.data.iter().zip(&gm.data).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            dgam.push(Christoffel { n, data: diff });
        }
        let g = self.metric(x);
        let mut data = vec![0.0; n * n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    // R(∂i,∂j)∂k = (∂iΓ^m_jk − ∂jΓ^m_ik + Γ^p_jk Γ^m_ip − Γ^p_ik Γ^m_jp) ∂m
                    let mut up = vec![0.0; n];
                    for (m, u) in up.iter_mut().enumerate() {
                        let mut s = dgam[i].get(m, j, k) - dgam[j].get(m, i, k);
                        for p in 0..n {
                            s += gam.get(p, j, k) * gam.get(m, i, p)
                                - gam.get(p, i, k) * gam.get(m, j, p);
                        }
                        *u = s;
                    }
                    for l in 0..n {
                        let mut s = 0.0;
                        for (m, u) in up.iter().enumerate() {
                            s += g[(l, m)] * u;
                        }
                        data[((i * n + j) * n + k) * n + l] = s;
                    }
                }
            }
        }
        Riemann { n, data }
    }

    /// Sectional curvature of the plane spanned by `u` and `v` at `x`.
    pub fn sectional_curvature(&self, x: &Vector, u: &Vector, v: &Vector) -> Result<f64> {
        let uu = self.inner(x, u, u);
        let vv = self.inner(x, v, v);
        let uv = self.inner(x, u, v);
        let denom = uu * vv - uv * uv;
        if denom < 1e-12 {
            return Err(Error::DegeneratePlane(denom));
        }
        Ok(self.riemann(x).form(u, v, v, u) / denom)
    }

    pub fn exp_map(&self, x: &Vector, v: &Vector) -> Vector {
        match self.model {
            Model::Euclidean => x + v,
            Model::Hyperboloid => hyp_exp(x, v),
            Model::Klein => {
                let hx = klein_to_hyp(x);
                let hv = klein_tangent_to_hyp(x, v);
                hyp_to_klein(&hyp_exp(&hx, &hv))
            }
            Model::ProductH2R => {
                let (hx, hv) = (x.rows(0, 2).into_owned(), v.rows(0, 2).into_owned());
                let e = hyp_exp(&hx, &hv);
                Vector::from_vec(vec![e[0], e[1], x[2] + v[2]])
            }
            Model::SphereFixture => {
                let p = sph_lift(x);
                let w = sph_lift_tangent(x, v);
                let s = w.norm();
                if s == 0.0 {
                    return x.clone();
                }
                let sinc = if s < 1e-8 { 1.0 - s * s / 6.0 } else { s.sin() / s };
                sph_unlift(&(p * s.cos() + w * sinc))
            }
        }
    }

    pub fn log_map(&self, x: &Vector, y: &Vector) -> Vector {
        match self.model {
            Model::Euclidean => y - x,
            Model::Hyperboloid => hyp_log(x, y),
            Model::Klein => {
                let hx = klein_to_hyp(x);
                let hy = klein_to_hyp(y);
                hyp_tangent_to_klein(&hx, &hyp_log(&hx, &hy))
            }
            Model::ProductH2R => {
                let l = hyp_log(&x.rows(0, 2).into_owned(), &y.rows(0, 2).into_owned());
                Vector::from_vec(vec![l[0], l[1], y[2] - x[2]])
            }
            Model::SphereFixture => {
                let p = sph_lift(x);
                let q = sph_lift(y);
                let c = sph_chord(&p, &q);
                let d = 2.0 * (c / 2.0).min(1.0).asin();
                if d == 0.0 {
                    return Vector::zeros(self.dim);
                }
                let w = (&q - &p) + &p * (c * c / 2.0);
                let ratio = if d < 1e-8 { 1.0 + d * d / 6.0 } else { d / d.sin() };
                sph_pull_tangent(x, &(w * ratio))
            }
        }
    }

    pub fn distance(&self, x: &Vector, y: &Vector) -> f64 {
        match self.model {
            Model::Euclidean => (x - y).norm(),
            Model::Hyperboloid => hyp_distance(x, y),
            Model::Klein => hyp_distance(&klein_to_hyp(x), &klein_to_hyp(y)),
            Model::ProductH2R => {
                let dh = hyp_distance(&x.rows(0, 2).into_owned(), &y.rows(0, 2).into_owned());
                let dz = x[2] - y[2];
                (dh * dh + dz * dz).sqrt()
            }
            Model::SphereFixture => {
                let c = sph_chord(&sph_lift(x), &sph_lift(y));
                2.0 * (c / 2.0).min(1.0).asin()
            }
        }
    }

    /// Parallel transport of `v ∈ T_x` to `T_y` along the minimizing geodesic.
    pub fn transport_geodesic(&self, x: &Vector, y: &Vector, v: &Vector) -> Vector {
        match self.model {
            Model::Euclidean => v.clone(),
            Model::Hyperboloid => hyp_transport(x, y, v),
            Model::Klein => {
                let hx = klein_to_hyp(x);
                let hy = klein_to_hyp(y);
                let hv = klein_tangent_to_hyp(x, v);
                hyp_tangent_to_klein(&hy, &hyp_transport(&hx, &hy, &hv))
            }
            Model::ProductH2R => {
                let t = hyp_transport(
                    &x.rows(0, 2).into_owned(),
                    &y.rows(0, 2).into_owned(),
                    &v.rows(0, 2).into_owned(),
                );
                Vector::from_vec(vec![t[0], t[1], v[2]])
            }
            Model::SphereFixture => {
                let p = sph_lift(x);
                let q = sph_lift(y);
                let w = sph_lift_tangent(x, v);
                let res = &w - (&p + &q) * (q.dot(&w) / (1.0 + p.dot(&q)));
                sph_pull_tangent(y, &res)
            }
        }
    }

    /// Unit-speed minimizing geodesic from `p` to `q` sampled at `m ≥ 2` equally
    /// spaced arclength values.
    pub fn geodesic(&self, p: &Vector, q: &Vector, m: usize) -> Result<crate::curves::SampledCurve> {
        if m < 2 {
            return Err(Error::InvalidInput("geodesic needs at least two samples".into()));
        }
        let len = self.distance(p, q);
        if len == 0.0 {
            return Err(Error::InvalidInput("geodesic endpoints coincide".into()));
        }
        let v = self.log_map(p, q);
        let unit = &v / len;
        let mut ts = Vec::with_capacity(m);
        let mut pts = Vec::with_capacity(m);
        let mut vels = Vec::with_capacity(m);
        for j in 0..m {
            let t = len * j as f64 / (m - 1) as f64;
            let x = if j == m - 1 { q.clone() } else { self.exp_map(p, &(&unit * t)) };
            let vel = self.transport_geodesic(p, &x, &unit);
            ts.push(t);
            pts.push(x);
            vels.push(vel);
        }
        Ok(crate::curves::SampledCurve::new_unchecked(ts, pts, vels))
    }

    /// Right-hand side of the geodesic equation for state `(x, ẋ)`.
    pub fn geodesic_rhs(&self, y: &[f64], dy: &mut [f64]) {
        let n = self.dim;
        let x = Vector::from_column_slice(&y[..n]);
        let v = Vector::from_column_slice(&y[n..]);
        let acc = self.christoffel_contract(&x, &v, &v);
        for i in 0..n {
            dy[i] = y[n + i];
            dy[n + i] = -acc[i];
        }
    }

    /// Integrates the geodesic equation from `(x, v)` for parameter time `t`.
    pub fn exp_map_ode(&self, x: &Vector, v: &Vector, t: f64) -> Result<(Vector, Vector)> {
        let n = self.dim;
        let mut state: Vec<f64> = x.iter().chain(v.iter()).copied().collect();
        ode::integrate(|_, y, dy| self.geodesic_rhs(y, dy), 0.0, t, &mut state, &OdeOptions::default())?;
        Ok((Vector::from_column_slice(&state[..n]), Vector::from_column_slice(&state[n..])))
    }

    /// Geodesic length between `p` and `q` obtained by integrating the geodesic
    /// ODE from `p` with initial velocity `log_p q` and accumulating `|ẋ|_g`.
    pub fn ode_geodesic_length(&self, p: &Vector, q: &Vector) -> Result<(f64, Vector)> {
        let n = self.dim;
        let v = self.log_map(p, q);
        let mut state: Vec<f64> = p.iter().chain(v.iter()).copied().chain([0.0]).collect();
        ode::integrate(
            |_, y, dy| {
                self.geodesic_rhs(&y[..2 * n], &mut dy[..2 * n]);
                let x = Vector::from_column_slice(&y[..n]);
                let xd = Vector::from_column_slice(&y[n..2 * n]);
                dy[2 * n] = self.norm(&x, &xd);
            },
            0.0,
            1.0,
            &mut state,
            &OdeOptions::default(),
        )?;
        Ok((state[2 * n], Vector::from_column_slice(&state[..n])))
    }

    /// Gram-Schmidt in the metric at `x`.
    pub fn orthonormalize(&self, x: &Vector, vecs: &[Vector]) -> Result<Vec<Vector>> {
        let mut out: Vec<Vector> = Vec::with_capacity(vecs.len());
        for v in vecs {
            let mut w = v.clone();
            for e in &out {
                w -= e * self.inner(x, e, &w);
            }
            let nw = self.norm(x, &w);
            if nw < 1e-12 {
                return Err(Error::InvalidInput("linearly dependent vectors".into()));
            }
            out.push(w / nw);
        }
        Ok(out)
    }

    /// A g-orthonormal basis of `T_x` obtained from the coordinate basis.
    pub fn orthonormal_basis(&self, x: &Vector) -> Vec<Vector> {
        let n = self.dim;
        let coords: Vec<Vector> =
            (0..n).map(|i| Vector::from_fn(n, |r, _| if r == i { 1.0 } else { 0.0 })).collect();
        self.orthonormalize(x, &coords).expect("coordinate basis is independent")
    }

    /// Hyperboloid-chart coordinates of a point of a hyperbolic model.
    pub fn to_hyperboloid_chart(&self, x: &Vector) -> Vector {
        match self.model {
            Model::Klein => klein_to_hyp(x),
            _ => x.clone(),
        }
    }

    /// Point on the hyperboloid `{<X,X> = −1}` in R^{n+1} (time coordinate first).
    pub fn to_minkowski(&self, x: &Vector) -> Option<Vector> {
        match self.model {
            Model::Hyperboloid => Some(hyp_lift(x)),
            Model::Klein => Some(hyp_lift(&klein_to_hyp(x))),
            _ => None,
        }
    }

    /// Klein-chart coordinates for hyperbolic models; Euclidean points unchanged.
    pub fn to_klein(&self, x: &Vector) -> Result<Vector> {
        match self.model {
            Model::Hyperboloid => Ok(hyp_to_klein(x)),
            Model::Klein | Model::Euclidean => Ok(x.clone()),
            _ => Err(Error::UnsupportedSpace),
        }
    }

    pub fn from_klein(&self, k: &Vector) -> Result<Vector> {
        match self.model {
            Model::Hyperboloid => Ok(klein_to_hyp(k)),
            Model::Klein | Model::Euclidean => Ok(k.clone()),
            _ => Err(Error::UnsupportedSpace),
        }
    }

    /// Pushes a tangent vector at Klein point `k` into this space's chart.
    pub fn tangent_from_klein(&self, k: &Vector, dk: &Vector) -> Result<Vector> {
        match self.model {
            Model::Hyperboloid => Ok(klein_tangent_to_hyp(k, dk)),
            Model::Klein | Model::Euclidean => Ok(dk.clone()),
            _ => Err(Error::UnsupportedSpace),
        }
    }

    pub fn tangent_to_klein(&self, x: &Vector, dx: &Vector) -> Result<Vector> {
        match self.model {
            Model::Hyperboloid => Ok(hyp_tangent_to_klein(x, dx)),
            Model::Klein | Model::Euclidean => Ok(dx.clone()),
            _ => Err(Error::UnsupportedSpace),
        }
    }

    /// Metric of the Klein chart at `k` (identity for Euclidean space).
    pub fn klein_metric(&self, k: &Vector) -> Result<Matrix> {
        match self.model {
            Model::Hyperboloid | Model::Klein => Ok(ModelSpace::klein(self.dim).metric(k)),
            Model::Euclidean => Ok(Matrix::identity(self.dim, self.dim)),
            _ => Err(Error::UnsupportedSpace),
        }
    }

    /// Hyperbolic isometry given by a Lorentz boost of rapidity `s` along
    /// coordinate axis `axis`; identity on non-hyperbolic spaces.
    pub fn boost(&self, x: &Vector, axis: usize, s: f64) -> Vector {
        match self.model {
            Model::Hyperboloid | Model::Klein => {
                let hx = self.to_hyperboloid_chart(x);
                let p = hyp_lift(&hx);
                let mut q = p.clone();
                q[0] = s.cosh() * p[0] + s.sinh() * p[1 + axis];
                q[1 + axis] = s.sinh() * p[0] + s.cosh() * p[1 + axis];
                let out = spatial(&q);
                if self.model == Model::Klein {
                    hyp_to_klein(&out)
                } else {
                    out
                }
            }
            _ => x.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_spaces() -> Vec<ModelSpace> {
        vec![
            ModelSpace::euclidean(3),
            ModelSpace::hyperbolic(3),
            ModelSpace::hyperbolic(2),
            ModelSpace::klein(3),
            ModelSpace::product_h2_r(),
            ModelSpace::sphere_fixture(2),
            ModelSpace::sphere_fixture(3),
        ]
    }

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize, s: f64) -> Vector {
        Vector::from_fn(n, |_, _| rng.gen_range(-s..s))
    }

    fn rand_point(space: &ModelSpace, rng: &mut ChaCha8Rng) -> Vector {
        let s = if space.model() == Model::Klein { 0.5 } else { 0.8 };
        rand_vec(rng, space.dim(), s)
    }

    #[test]
    fn metric_symmetric_positive_definite() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for space in all_spaces() {
            for _ in 0..20 {
                let x = rand_point(&space, &mut rng);
                let g = space.metric(&x);
                assert!((&g - g.transpose()).amax() < 1e-14);
                assert!(g.clone().cholesky().is_some(), "{:?}", space.model());
            }
        }
    }

    #[test]
    fn riemann_symmetries_and_fd_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for space in all_spaces() {
            let n = space.dim();
            for _ in 0..5 {
                let x = rand_point(&space, &mut rng);
                let r = space.riemann(&x);
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                let v = r.get(i, j, k, l);
                                assert!((v + r.get(j, i, k, l)).abs() < 1e-10);
                                assert!((v + r.get(i, j, l, k)).abs() < 1e-10);
                                assert!((v - r.get(k, l, i, j)).abs() < 1e-10);
                            }
                        }
                    }
                }
                let fd = space.riemann_fd(&x, 1e-4);
                assert!(r.max_abs_diff(&fd) < 1e-6, "{:?}: {}", space.model(), r.max_abs_diff(&fd));
            }
        }
    }

    #[test]
    fn sectional_curvature_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for space in all_spaces() {
            for _ in 0..20 {
                let x = rand_point(&space, &mut rng);
                let u = rand_vec(&mut rng, space.dim(), 1.0);
                let v = rand_vec(&mut rng, space.dim(), 1.0);
                let k = space.sectional_curvature(&x, &u, &v).unwrap();
                if space.is_cartan_hadamard() {
                    assert!(k <= 1e-10);
                }
                match space.model() {
                    Model::Euclidean => assert!(k.abs() < 1e-14),
                    Model::Hyperboloid | Model::Klein => assert!((k + 1.0).abs() < 1e-10),
                    Model::SphereFixture => assert!((k - 1.0).abs() < 1e-10),
                    Model::ProductH2R => assert!((-1.0 - 1e-10..=1e-10).contains(&k)),
                }
            }
        }
    }

    #[test]
    fn product_mixed_plane_is_flat_by_fd_oracle() {
        let space = ModelSpace::product_h2_r();
        let x = Vector::from_vec(vec![0.3, -0.2, 0.7]);
        let u = Vector::from_vec(vec![1.0, 0.4, 0.0]);
        let v = Vector::from_vec(vec![0.0, 0.0, 1.0]);
        let r = space.riemann_fd(&x, 1e-4);
        let denom = space.inner(&x, &u, &u) * space.inner(&x, &v, &v) - space.inner(&x, &u, &v).powi(2);
        assert!((r.form(&u, &v, &v, &u) / denom).abs() < 1e-7);
        assert!(space.sectional_curvature(&x, &u, &v).unwrap().abs() < 1e-14);
    }

    #[test]
    fn degenerate_plane_rejected() {
        let space = ModelSpace::hyperbolic(3);
        let x = Vector::from_vec(vec![0.1, 0.2, 0.3]);
        let u = Vector::from_vec(vec![1.0, 2.0, 3.0]);
        let v = &u * 2.0;
        assert!(matches!(space.sectional_curvature(&x, &u, &v), Err(Error::DegeneratePlane(_))));
    }

    #[test]
    fn exp_log_inverse_and_distance_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for space in all_spaces() {
            for _ in 0..50 {
                let p = rand_point(&space, &mut rng);
                let q = rand_point(&space, &mut rng);
                let v = space.log_map(&p, &q);
                let q2 = space.exp_map(&p, &v);
                assert!((&q2 - &q).norm() < 1e-8, "{:?}", space.model());
                let d = space.distance(&p, &q);
                assert!((d - space.distance(&q, &p)).abs() < 1e-12);
                assert!((space.norm(&p, &v) - d).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn hyperboloid_closed_form_distance_one() {
        let space = ModelSpace::hyperbolic(3);
        // <P,Q> = −cosh(1) for P = origin, Q = (cosh 1, sinh 1, 0, 0)
        let p = space.origin();
        let q = Vector::from_vec(vec![1f64.sinh(), 0.0, 0.0]);
        let pm = space.to_minkowski(&p).unwrap();
        let qm = space.to_minkowski(&q).unwrap();
        assert!((minkowski(&pm, &qm) + 1f64.cosh()).abs() < 1e-14);
        assert!((minkowski(&qm, &qm) + 1.0).abs() < 1e-12);
        assert!((space.distance(&p, &q) - 1.0).abs() < 1e-14);
        let (len, end) = space.ode_geodesic_length(&p, &q).unwrap();
        assert!((len - 1.0).abs() < 1e-6);
        assert!((end - q).norm() < 1e-8);
    }

    #[test]
    fn product_distance_pythagorean() {
        let space = ModelSpace::product_h2_r();
        let h2 = ModelSpace::hyperbolic(2);
        let p = Vector::from_vec(vec![0.2, 0.5, -1.0]);
        let q = Vector::from_vec(vec![-0.4, 0.1, 0.5]);
        let dh = h2.distance(&p.rows(0, 2).into_owned(), &q.rows(0, 2).into_owned());
        let d = space.distance(&p, &q);
        assert!((d * d - (dh * dh + 1.5 * 1.5)).abs() < 1e-12);
    }

    #[test]
    fn closed_form_distance_matches_ode_length() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for space in all_spaces() {
            for _ in 0..5 {
                let p = rand_point(&space, &mut rng);
                let q = rand_point(&space, &mut rng);
                let d = space.distance(&p, &q);
                let (len, end) = space.ode_geodesic_length(&p, &q).unwrap();
                assert!((len - d).abs() <= 1e-6 * d, "{:?}", space.model());
                assert!((end - &q).norm() < 1e-7);
            }
        }
    }

    #[test]
    fn closed_form_transport_matches_ode() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for space in all_spaces() {
            let n = space.dim();
            let p = rand_point(&space, &mut rng);
            let q = rand_point(&space, &mut rng);
            let w = rand_vec(&mut rng, n, 1.0);
            let v = space.log_map(&p, &q);
            let mut state: Vec<f64> = p.iter().chain(v.iter()).chain(w.iter()).copied().collect();
            ode::integrate(
                |_, y, dy| {
                    space.geodesic_rhs(&y[..2 * n], &mut dy[..2 * n]);
                    let x = Vector::from_column_slice(&y[..n]);
                    let xd = Vector::from_column_slice(&y[n..2 * n]);
                    let ww = Vector::from_column_slice(&y[2 * n..]);
                    let a = space.christoffel_contract(&x, &xd, &ww);
                    for i in 0..n {
                        dy[2 * n + i] = -a[i];
                    }
                },
                0.0,
                1.0,
                &mut state,
                &OdeOptions::default(),
            )
            .unwrap();
            let ode_w = Vector::from_column_slice(&state[2 * n..]);
            let cf = space.transport_geodesic(&p, &q, &w);
            assert!((ode_w - cf).norm() < 1e-8, "{:?}", space.model());
        }
    }

    #[test]
    fn geodesic_samples_unit_speed_and_satisfy_equation() {
        let space = ModelSpace::hyperbolic(3);
        let p = Vector::from_vec(vec![0.3, -0.1, 0.2]);
        let q = Vector::from_vec(vec![-0.5, 0.6, 0.1]);
        let m = 401;
        let c = space.geodesic(&p, &q, m).unwrap();
        let h = c.t[1] - c.t[0];
        for j in 0..m {
            assert!((space.norm(&c.points[j], &c.velocities[j]) - 1.0).abs() < 1e-8);
        }
        assert!((&c.points[0] - &p).norm() < 1e-14);
        assert!((&c.points[m - 1] - &q).norm() < 1e-14);
        for j in 1..m - 1 {
            let acc = (&c.points[j + 1] - &c.points[j] * 2.0 + &c.points[j - 1]) / (h * h);
            let res = acc + space.christoffel_contract(&c.points[j], &c.velocities[j], &c.velocities[j]);
            assert!(res.norm() < 1e-6, "residual {}", res.norm());
        }
    }

    #[test]
    fn triangle_inequality_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for space in all_spaces() {
            for _ in 0..200 {
                let a = rand_point(&space, &mut rng);
                let b = rand_point(&space, &mut rng);
                let c = rand_point(&space, &mut rng);
                let lhs = space.distance(&a, &c);
                let rhs = space.distance(&a, &b) + space.distance(&b, &c);
                assert!(lhs <= rhs + 1e-10);
            }
        }
    }

    #[test]
    fn normal_coordinate_metric_expansion_order() {
        // g_ij(x) − (δ_ij − R_ikjl x^k x^l / 3) = O(|x|^3) in normal coordinates
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for space in [ModelSpace::hyperbolic(3), ModelSpace::product_h2_r(), ModelSpace::klein(3)] {
            let n = space.dim();
            let o = rand_point(&space, &mut rng);
            let frame = space.orthonormal_basis(&o);
            let r = space.riemann(&o);
            let dir = rand_vec(&mut rng, n, 1.0).normalize();
            let to_chart = |y: &Vector| -> Vector {
                let mut v = Vector::zeros(n);
                for i in 0..n {
                    v += &frame[i] * y[i];
                }
                space.exp_map(&o, &v)
            };
            let mut logs = Vec::new();
            for &s in &[1e-3, 3e-3, 1e-2, 3e-2, 1e-1] {
                let y = &dir * s;
                let x = to_chart(&y);
                let gx = space.metric(&x);
                let eps = 1e-5;
                let mut jac = Matrix::zeros(n, n);
                for c in 0..n {
                    let mut yp = y.clone();
                    let mut ym = y.clone();
                    yp[c] += eps;
                    ym[c] -= eps;
                    let col = (to_chart(&yp) - to_chart(&ym)) / (2.0 * eps);
                    jac.set_column(c, &col);
                }
                let gn = jac.transpose() * gx * jac;
                let xs: Vec<Vector> = (0..n)
                    .map(|i| Vector::from_fn(n, |r2, _| if r2 == i { 1.0 } else { 0.0 }))
                    .collect();
                let mut err = 0.0f64;
                let xv: Vector = frame.iter().enumerate().fold(Vector::zeros(n), |a, (i, e)| a + e * y[i]);
                for i in 0..n {
                    for j in 0..n {
                        let ei: Vector = frame.iter().enumerate().fold(Vector::zeros(n), |a, (k, e)| a + e * xs[i][k]);
                        let ej: Vector = frame.iter().enumerate().fold(Vector::zeros(n), |a, (k, e)| a + e * xs[j][k]);
                        let pred = if i == j { 1.0 } else { 0.0 } - r.form(&ei, &xv, &xv, &ej) / 3.0;
                        err = err.max((gn[(i, j)] - pred).abs());
                    }
                }
                logs.push((s.ln(), err.max(1e-300).ln()));
            }
            // slope over the upper range (lower range is finite-difference noise)
            let (a, b) = (logs[2], logs[4]);
            let slope = (b.1 - a.1) / (b.0 - a.0);
            assert!(slope >= 2.7, "{:?} slope {slope}", space.model());
        }
    }

    #[test]
    fn klein_conversion_round_trip() {
        let space = ModelSpace::hyperbolic(3);
        let x = Vector::from_vec(vec![0.4, -1.2, 2.0]);
        let k = space.to_klein(&x).unwrap();
        assert!(k.norm() < 1.0);
        assert!((space.from_klein(&k).unwrap() - &x).norm() < 1e-12);
        let kl = ModelSpace::klein(3);
        let y = Vector::from_vec(vec![-0.3, 0.5, 0.1]);
        let ky = space.to_klein(&y).unwrap();
        assert!((kl.distance(&k, &ky) - space.distance(&x, &y)).abs() < 1e-12);
    }

    #[test]
    fn boost_is_isometry() {
        let space = ModelSpace::hyperbolic(3);
        let a = Vector::from_vec(vec![0.4, -0.2, 0.3]);
        let b = Vector::from_vec(vec![-0.1, 0.7, 0.0]);
        let d0 = space.distance(&a, &b);
        let d1 = space.distance(&space.boost(&a, 1, 0.8), &space.boost(&b, 1, 0.8));
        assert!((d0 - d1).abs() < 1e-12);
    }
}
