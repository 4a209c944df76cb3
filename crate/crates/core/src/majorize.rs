//! Planar chord-convex majorants of curves and the Schur chord comparison.
//!
//! A majorant is built from the inscribed geodesic polygon: comparison
//! triangles are fan-glued in the plane, the resulting polygon is made convex
//! by reflecting pockets across their hull edges, and every postcondition is
//! then checked independently of the construction.

use rayon::prelude::*;
use std::f64::consts::{PI, TAU};

use crate::curves::{Indicatrix, SampledCurve};
use crate::error::{Error, Result};
use crate::spaces::{ModelSpace, Vector};

pub type P2 = [f64; 2];

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn cross(a: P2, b: P2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

fn dist(a: P2, b: P2) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Wraps an angle into `(−π, π]`.
fn wrap_pi(a: f64) -> f64 {
    let mut x = a.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

/// `∫ (cos θ, sin θ)` over a piece of length `len` on which θ moves linearly from `a` to `b`.
fn arc_displacement(a: f64, b: f64, len: f64) -> P2 {
    let d = b - a;
    if d.abs() < 1e-6 {
        // series of sinc-type kernels to avoid cancellation
        let m = 0.5 * (a + b);
        let s = 1.0 - d * d / 24.0;
        return [len * m.cos() * s, len * m.sin() * s];
    }
    [len * (b.sin() - a.sin()) / d, len * (a.cos() - b.cos()) / d]
}

/// Planar curve `t ↦ basepoint + ∫ v (cos θ, sin θ)` with θ piecewise linear
/// on the knot grid; a repeated knot carries a jump of θ (a corner).
#[derive(Debug, Clone, PartialEq)]
pub struct TurningCurve {
    pub speed: f64,
    pub knots: Vec<f64>,
    pub theta: Vec<f64>,
    pub basepoint: P2,
    /// Endpoint stored at construction; reconstruction is checked against it.
    pub endpoint: P2,
    positions: Vec<P2>,
}

impl TurningCurve {
    pub fn new(speed: f64, knots: Vec<f64>, theta: Vec<f64>, basepoint: P2) -> Result<Self> {
        if knots.len() < 2 || knots.len() != theta.len() || !(speed > 0.0) {
            return Err(Error::InvalidInput("turning curve needs matching knots and angles and positive speed".into()));
        }
        if knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput("knots must be nondecreasing".into()));
        }
        let positions = Self::integrate(speed, &knots, &theta, basepoint);
        let endpoint = positions[positions.len() - 1];
        Ok(TurningCurve { speed, knots, theta, basepoint, endpoint, positions })
    }

    /// Rebuilds a curve from a stored table, keeping the stored endpoint for the reconstruction check.
    pub fn with_endpoint(speed: f64, knots: Vec<f64>, theta: Vec<f64>, basepoint: P2, endpoint: P2) -> Result<Self> {
        let mut c = Self::new(speed, knots, theta, basepoint)?;
        c.endpoint = endpoint;
        Ok(c)
    }

    fn integrate(speed: f64, knots: &[f64], theta: &[f64], base: P2) -> Vec<P2> {
        let mut pos = vec![base];
        for i in 0..knots.len() - 1 {
            let d = arc_displacement(theta[i], theta[i + 1], speed * (knots[i + 1] - knots[i]));
            let p = pos[i];
            pos.push([p[0] + d[0], p[1] + d[1]]);
        }
        pos
    }

    /// Unit-speed circular arc of curvature `kappa` and length `length`.
    pub fn circle_arc(kappa: f64, length: f64) -> Self {
        Self::new(1.0, vec![0.0, length], vec![0.0, kappa * length], [0.0, 0.0]).expect("valid arc")
    }

    /// Unit-speed curve with curvature profile `kappa`, sampled on `m` knots
    /// (θ at the knots by composite Simpson quadrature).
    pub fn from_curvature(kappa: &dyn Fn(f64) -> f64, length: f64, m: usize) -> Self {
        let knots: Vec<f64> = (0..m).map(|i| length * i as f64 / (m - 1) as f64).collect();
        let mut theta = vec![0.0];
        for i in 0..m - 1 {
            let (a, b) = (knots[i], knots[i + 1]);
            let inc = (b - a) / 6.0 * (kappa(a) + 4.0 * kappa(0.5 * (a + b)) + kappa(b));
            theta.push(theta[i] + inc);
        }
        Self::new(1.0, knots, theta, [0.0, 0.0]).expect("valid profile")
    }

    pub fn t0(&self) -> f64 {
        self.knots[0]
    }

    pub fn t1(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.speed * (self.t1() - self.t0())
    }

    /// Distance between the reconstructed and the stored endpoint.
    pub fn reconstruction_error(&self) -> f64 {
        dist(Self::integrate(self.speed, &self.knots, &self.theta, self.basepoint)[self.knots.len() - 1], self.endpoint)
    }

    pub fn knot_points(&self) -> &[P2] {
        &self.positions
    }

    pub fn point_at(&self, t: f64) -> P2 {
        let k = &self.knots;
        if t <= k[0] {
            return self.positions[0];
        }
        let i = (k.partition_point(|&x| x <= t).max(1) - 1).min(k.len() - 2);
        let len = k[i + 1] - k[i];
        if len <= 0.0 {
            return self.positions[i + 1];
        }
        let s = ((t - k[i]) / len).clamp(0.0, 1.0);
        let th = self.theta[i] + s * (self.theta[i + 1] - self.theta[i]);
        let d = arc_displacement(self.theta[i], th, self.speed * (t - k[i]));
        let p = self.positions[i];
        [p[0] + d[0], p[1] + d[1]]
    }

    /// θ just before `t` (jumps at `t` excluded).
    pub fn theta_left(&self, t: f64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|&x| x < t);
        if i == 0 {
            return self.theta[0];
        }
        if i >= k.len() {
            return self.theta[k.len() - 1];
        }
        if k[i] == t {
            return self.theta[i];
        }
        let s = (t - k[i - 1]) / (k[i] - k[i - 1]);
        self.theta[i - 1] + s * (self.theta[i] - self.theta[i - 1])
    }

    /// θ just after `t` (jumps at `t` included).
    pub fn theta_right(&self, t: f64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|&x| x <= t);
        if i == 0 {
            return self.theta[0];
        }
        if i >= k.len() {
            return self.theta[k.len() - 1];
        }
        if k[i - 1] == t {
            return self.theta[i - 1];
        }
        let s = (t - k[i - 1]) / (k[i] - k[i - 1]);
        self.theta[i - 1] + s * (self.theta[i] - self.theta[i - 1])
    }

    /// Turning over the open interval `(a, b)`.
    pub fn turning(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        self.theta_left(b) - self.theta_right(a)
    }

    /// Largest decrease of θ between consecutive knots (0 for a monotone curve).
    pub fn monotonicity_violation(&self) -> f64 {
        self.theta.windows(2).map(|w| w[0] - w[1]).fold(0.0, f64::max)
    }

    /// Convexity of the curve closed by its endpoint chord: θ nondecreasing and
    /// the closed polygon turns exactly once with nonnegative turns.
    pub fn is_chord_convex(&self, tol: f64) -> bool {
        if self.monotonicity_violation() > tol {
            return false;
        }
        let p0 = self.positions[0];
        let p1 = self.positions[self.positions.len() - 1];
        let th0 = self.theta[0];
        let th1 = self.theta[self.theta.len() - 1];
        let total = th1 - th0;
        if total < -tol {
            return false;
        }
        let scale = self.length().max(f64::MIN_POSITIVE);
        // a turn of 2π − ε at a junction means a tiny reversal
        let fix = |x: f64| if x > TAU - tol - 1e-9 { x - TAU } else { x };
        let turn_sum = if dist(p0, p1) <= 1e-12 * scale {
            total + fix((th0 - th1).rem_euclid(TAU))
        } else {
            let chord_dir = (p0[1] - p1[1]).atan2(p0[0] - p1[0]);
            total + fix((chord_dir - th1).rem_euclid(TAU)) + fix((th0 - chord_dir).rem_euclid(TAU))
        };
        (turn_sum - TAU).abs() <= 1e-9 + tol
    }

    /// Plain-text table: one knot per line, `t theta v`.
    pub fn to_table(&self) -> String {
        let mut s = format!("# basepoint {:.17e} {:.17e}\n# endpoint {:.17e} {:.17e}\n", self.basepoint[0], self.basepoint[1], self.endpoint[0], self.endpoint[1]);
        for (t, th) in self.knots.iter().zip(&self.theta) {
            s.push_str(&format!("{t:.17e} {th:.17e} {:.17e}\n", self.speed));
        }
        s
    }

    pub fn from_table(text: &str) -> Result<Self> {
        let mut base = [0.0, 0.0];
        let mut end = None;
        let mut knots = Vec::new();
        let mut theta = Vec::new();
        let mut speed = None;
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s}: {e}")));
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f[0] == "#" {
                match f.get(1) {
                    Some(&"basepoint") if f.len() == 4 => base = [num(f[2])?, num(f[3])?],
                    Some(&"endpoint") if f.len() == 4 => end = Some([num(f[2])?, num(f[3])?]),
                    _ => {}
                }
                continue;
            }
            if f.len() != 3 {
                return Err(Error::Parse(format!("expected `t theta v`, got `{line}`")));
            }
            knots.push(num(f[0])?);
            theta.push(num(f[1])?);
            speed = Some(num(f[2])?);
        }
        let speed = speed.ok_or_else(|| Error::Parse("empty turning table".into()))?;
        match end {
            Some(e) => Self::with_endpoint(speed, knots, theta, base, e),
            None => Self::new(speed, knots, theta, base),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorizeOptions {
    pub tol_rel: f64,
    /// Properness tolerance as a fraction of the curve length.
    pub proper_tol: f64,
    pub turning_tol: f64,
    pub max_flips: usize,
    /// Target gap between the inscribed polygon length and the curve length.
    pub length_tol: f64,
    pub max_subdivision: usize,
}

impl Default for MajorizeOptions {
    fn default() -> Self {
        MajorizeOptions { tol_rel: 1e-6, proper_tol: 1e-8, turning_tol: 1e-4, max_flips: 100_000, length_tol: 5e-9, max_subdivision: 256 }
    }
}

/// Verified postcondition measurements of a majorant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorizeReport {
    /// Largest relative chord deficit `(|γγ| − |γ̃γ̃|)/|γγ|` over sample pairs (≤ 0 means domination).
    pub chord_deficit: f64,
    pub properness_error: f64,
    pub chord_convex: bool,
    /// Largest `θ-increment − τ(γ(I))` over grid intervals.
    pub turning_excess: f64,
    /// Majorant length minus curve length.
    pub length_error: f64,
}

#[derive(Debug, Clone)]
pub struct Majorant {
    pub curve: TurningCurve,
    /// Majorant parameter corresponding to each curve sample.
    pub params: Vec<f64>,
    pub flips: usize,
    pub subdivision: usize,
    pub report: MajorizeReport,
}

struct Polygon {
    /// Chart points of the inscribed polygon.
    verts: Vec<Vector>,
    /// Vertex index of each curve sample.
    sample_vertex: Vec<usize>,
    closed: bool,
    subdivision: usize,
}

fn inscribe(space: &ModelSpace, curve: &SampledCurve, opts: &MajorizeOptions) -> Polygon {
    let m = curve.len();
    let chords: f64 = (0..m - 1).map(|j| space.distance(&curve.points[j], &curve.points[j + 1])).sum();
    let gap = (curve.length() - chords).max(0.0);
    let r = ((gap / opts.length_tol).sqrt().ceil() as usize).clamp(1, opts.max_subdivision);
    let scale = curve.length().max(f64::MIN_POSITIVE);
    let mut verts: Vec<Vector> = vec![curve.points[0].clone()];
    let mut sample_vertex = vec![0];
    for j in 0..m - 1 {
        let dt = curve.t[j + 1] - curve.t[j];
        if dt > 0.0 {
            for k in 1..r {
                let t = curve.t[j] + dt * k as f64 / r as f64;
                verts.push(curve.eval_segment(j, t).0);
            }
        }
        let next = &curve.points[j + 1];
        if space.distance(verts.last().unwrap(), next) > 1e-15 * scale {
            verts.push(next.clone());
        }
        sample_vertex.push(verts.len() - 1);
    }
    let last = verts.len() - 1;
    let closed = last > 0 && space.distance(&verts[0], &verts[last]) <= 1e-12 * scale;
    if closed {
        verts.pop();
    }
    Polygon { verts, sample_vertex, closed, subdivision: r }
}

/// Angle opposite side `c` in a Euclidean triangle with sides `a, b, c`,
/// accurate for needle-like triangles (Kahan's formula).
pub fn triangle_angle(a: f64, b: f64, c: f64) -> f64 {
    let (a, b) = if a >= b { (a, b) } else { (b, a) };
    let mu = if b >= c { c - (a - b) } else { b - (a - c) };
    let num = ((a - b) + c) * mu.max(0.0);
    let den = (a + (b + c)) * ((a - c) + b);
    if den <= 0.0 {
        return PI;
    }
    2.0 * (num / den).sqrt().atan()
}

/// Convex planar polygon majorizing the closed geodesic polygon `verts`,
/// built by gluing comparison triangles `(q₀, qᵢ, qᵢ₊₁)` one at a time onto
/// a convex polygon. When the glued disc has a reflex corner, the boundary
/// geodesic runs straight through that corner, so the corner is absorbed into
/// a straight edge and the triangle is rebuilt on the shortened polygon.
/// Returns the planar points indexed like `verts` and the number of absorbed corners.
fn glue_layout(space: &ModelSpace, verts: &[Vector]) -> (Vec<P2>, usize) {
    use std::collections::VecDeque;

    struct Corner {
        id: usize,
        pos: P2,
        /// Length of the edge to the next corner.
        len: f64,
        /// Vertices lying on the edge to the next corner, with their offsets.
        chain: Vec<(usize, f64)>,
    }

    fn interior_angle(prev: P2, at: P2, next: P2) -> f64 {
        let (u, v) = (sub(prev, at), sub(next, at));
        if u == [0.0, 0.0] || v == [0.0, 0.0] {
            return 0.0;
        }
        // counter-clockwise polygon: interior angle from `next` round to `prev`
        let a = cross(v, u).atan2(v[0] * u[0] + v[1] * u[1]);
        if a < 0.0 { a + TAU } else { a }
    }

    fn merge(first: &mut Corner, removed: Corner) {
        let shift = first.len;
        first.chain.push((removed.id, shift));
        first.chain.extend(removed.chain.into_iter().map(|(id, o)| (id, o + shift)));
        first.len += removed.len;
    }

    let k = verts.len();
    let d0: Vec<f64> = verts.iter().map(|v| space.distance(&verts[0], v)).collect();
    let mut poly: VecDeque<Corner> = VecDeque::new();
    poly.push_back(Corner { id: 0, pos: [0.0, 0.0], len: d0[1], chain: Vec::new() });
    poly.push_back(Corner { id: 1, pos: [d0[1], 0.0], len: d0[1], chain: Vec::new() });
    let mut absorbed = 0;
    let slack = 1e-12;
    for i in 1..k - 1 {
        let e = space.distance(&verts[i], &verts[i + 1]);
        // the next triangle hangs on the segment from qᵢ to q₀; if q₀ was
        // absorbed into the closing edge, split it out as a straight corner
        if poly[0].id != 0 {
            let n = poly.len();
            let last = &mut poly[n - 1];
            let at = last.chain.iter().position(|c| c.0 == 0).expect("q0 lies on the closing edge");
            let off = last.chain[at].1;
            let rest: Vec<(usize, f64)> = last.chain.drain(at..).skip(1).map(|(id, o)| (id, o - off)).collect();
            let total = last.len;
            last.len = off;
            let (a, b) = (last.pos, poly[0].pos);
            let l = dist(a, b);
            let s = if l > 0.0 { off / l } else { 0.0 };
            let pos = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            poly.push_front(Corner { id: 0, pos, len: total - off, chain: rest });
        }
        // new corner between the last corner (U1) and the first (U2)
        let n = poly.len();
        poly[n - 1].len = e;
        poly.push_back(Corner { id: i + 1, pos: [0.0, 0.0], len: d0[i + 1], chain: Vec::new() });
        loop {
            let n = poly.len();
            let (u1, c, u2) = (n - 2, n - 1, 0);
            let p = poly[u1].len;
            let q = poly[c].len;
            let (a, b) = (poly[u1].pos, poly[u2].pos);
            let base = dist(a, b);
            let alpha1 = triangle_angle(p, base, q);
            let alpha2 = triangle_angle(q, base, p);
            // place C on the right of U1→U2, outside the convex polygon
            let dir = if base > 0.0 { [(b[0] - a[0]) / base, (b[1] - a[1]) / base] } else { [1.0, 0.0] };
            let (cs, sn) = (alpha1.cos(), -alpha1.sin());
            poly[c].pos = [a[0] + p * (dir[0] * cs - dir[1] * sn), a[1] + p * (dir[0] * sn + dir[1] * cs)];
            if n < 4 {
                break;
            }
            let ang1 = interior_angle(poly[n - 3].pos, a, b) + alpha1;
            let ang2 = interior_angle(a, b, poly[1].pos) + alpha2;
            if ang1 > PI + slack {
                let removed = poly.remove(u1).expect("corner exists");
                let n = poly.len();
                merge(&mut poly[n - 2], removed);
                absorbed += 1;
            } else if ang2 > PI + slack {
                let removed = poly.pop_front().expect("corner exists");
                let n = poly.len();
                merge(&mut poly[n - 1], removed);
                absorbed += 1;
            } else {
                break;
            }
        }
    }
    // the closing edge runs from the last corner back to the first
    let mut out = vec![[0.0, 0.0]; k];
    let n = poly.len();
    for j in 0..n {
        let (a, b) = (poly[j].pos, poly[(j + 1) % n].pos);
        out[poly[j].id] = a;
        let l = dist(a, b);
        for &(id, off) in &poly[j].chain {
            let s = if l > 0.0 { off / l } else { 0.0 };
            out[id] = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
        }
    }
    (out, absorbed)
}

fn signed_area(p: &[P2]) -> f64 {
    let n = p.len();
    (0..n).map(|i| cross(p[i], p[(i + 1) % n])).sum::<f64>() / 2.0
}

/// Indices of the convex hull in counter-clockwise order; points within
/// `tol` of a hull edge count as hull points.
fn hull_indices(p: &[P2], tol: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..p.len()).collect();
    order.sort_by(|&a, &b| p[a][0].total_cmp(&p[b][0]).then(p[a][1].total_cmp(&p[b][1])));
    // signed distance of `a` from the line o→b, positive on the left
    let turn = |o: P2, a: P2, b: P2| {
        let v = sub(b, o);
        cross(sub(a, o), v) / v[0].hypot(v[1]).max(f64::MIN_POSITIVE)
    };
    let build = |iter: &mut dyn Iterator<Item = usize>| {
        let mut h: Vec<usize> = Vec::new();
        for i in iter {
            while h.len() >= 2 && turn(p[h[h.len() - 2]], p[h[h.len() - 1]], p[i]) > tol {
                h.pop();
            }
            h.push(i);
        }
        h
    };
    let mut lower = build(&mut order.iter().cloned());
    let mut upper = build(&mut order.iter().rev().cloned());
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower.sort_unstable();
    lower.dedup();
    lower
}

fn reflect(p: P2, a: P2, b: P2) -> P2 {
    let d = sub(b, a);
    let l2 = d[0] * d[0] + d[1] * d[1];
    let w = sub(p, a);
    let s = (w[0] * d[0] + w[1] * d[1]) / l2;
    let foot = [a[0] + s * d[0], a[1] + s * d[1]];
    [2.0 * foot[0] - p[0], 2.0 * foot[1] - p[1]]
}

/// Reflects pockets across their hull edges until the polygon is convex.
fn convexify(p: &mut [P2], max_flips: usize) -> Result<usize> {
    let n = p.len();
    if n < 4 {
        return Ok(0);
    }
    let scale = p.iter().map(|&q| dist(q, p[0])).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let tol = 4.0 * f64::EPSILON * scale;
    let mut flips = 0;
    loop {
        let hull = hull_indices(p, tol);
        // hull vertices sit on the polygon in cyclic order; a lid spans a pocket
        let mut pocket = None;
        for w in 0..hull.len() {
            let a = hull[w];
            let b = hull[(w + 1) % hull.len()];
            let gap = (b + n - a) % n;
            if gap > 1 {
                pocket = Some((a, b));
                break;
            }
        }
        let Some((a, b)) = pocket else { return Ok(flips) };
        if flips >= max_flips {
            return Err(Error::MajorizationUnverified(format!("flip budget of {max_flips} exhausted")));
        }
        let (pa, pb) = (p[a], p[b]);
        let mut i = (a + 1) % n;
        while i != b {
            p[i] = reflect(p[i], pa, pb);
            i = (i + 1) % n;
        }
        flips += 1;
    }
}

/// Builds the convex planar polygon; pocket flips only clean up rounding.
fn planar_majorant(space: &ModelSpace, poly: &Polygon, max_flips: usize) -> Result<(Vec<P2>, usize)> {
    let (mut p, _) = glue_layout(space, &poly.verts);
    if signed_area(&p) < 0.0 {
        for q in p.iter_mut() {
            q[1] = -q[1];
        }
    }
    let flips = convexify(&mut p, max_flips)?;
    Ok((p, flips))
}

/// Turns the planar polygon (vertex 0 first) into a unit-speed turning curve
/// starting at the origin along the positive x-axis.
fn polygon_to_turning(p: &[P2], closed: bool) -> Result<(TurningCurve, Vec<f64>)> {
    let n = p.len();
    let edges = if closed { n } else { n - 1 };
    let dir: Vec<f64> = (0..edges)
        .map(|i| {
            let d = sub(p[(i + 1) % n], p[i]);
            d[1].atan2(d[0])
        })
        .collect();
    let mut knots = vec![0.0];
    let mut theta = vec![0.0];
    let mut vertex_param = vec![0.0];
    let mut s = 0.0;
    let mut th = 0.0;
    for i in 0..edges {
        if i > 0 {
            let mut turn = wrap_pi(dir[i] - dir[i - 1]);
            if turn < 0.0 && turn > -1e-10 {
                turn = 0.0;
            }
            th += turn;
            knots.push(s);
            theta.push(th);
        }
        s += dist(p[(i + 1) % n], p[i]);
        knots.push(s);
        theta.push(th);
        vertex_param.push(s);
    }
    if closed {
        vertex_param.pop();
    }
    let curve = TurningCurve::new(1.0, knots, theta, [0.0, 0.0])?;
    Ok((curve, vertex_param))
}

/// Largest `θ-increment − τ` over sample intervals `(t_a, t_b)`, in O(m).
fn max_turning_excess(curve: &SampledCurve, ind: &Indicatrix, maj: &TurningCurve, params: &[f64]) -> f64 {
    let m = curve.len();
    let mut best = f64::NEG_INFINITY;
    let mut min_prefix = f64::INFINITY;
    for b in 0..m {
        if b > 0 {
            let val = maj.theta_left(params[b]) - ind.prefix[b];
            best = best.max(val - min_prefix);
        }
        min_prefix = min_prefix.min(maj.theta_right(params[b]) - ind.prefix[b]);
    }
    best.max(0.0)
}

fn verify(space: &ModelSpace, curve: &SampledCurve, maj: &TurningCurve, params: &[f64], ind: &Indicatrix) -> MajorizeReport {
    let m = curve.len();
    let pts: Vec<P2> = params.iter().map(|&s| maj.point_at(s)).collect();
    let abs_floor = 1e-13 * curve.length();
    let chord_deficit = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut worst = f64::NEG_INFINITY;
            for j in i + 1..m {
                let d = space.distance(&curve.points[i], &curve.points[j]);
                if d <= abs_floor {
                    continue;
                }
                worst = worst.max((d - dist(pts[i], pts[j]) - abs_floor) / d);
            }
            worst
        })
        .reduce(|| f64::NEG_INFINITY, f64::max);
    let end_chord = space.distance(curve.start(), curve.end());
    let properness_error = (dist(pts[0], pts[m - 1]) - end_chord).abs();
    MajorizeReport {
        chord_deficit: if chord_deficit.is_finite() { chord_deficit } else { 0.0 },
        properness_error,
        chord_convex: maj.is_chord_convex(1e-9),
        turning_excess: max_turning_excess(curve, ind, maj, params),
        length_error: maj.length() - curve.length(),
    }
}

fn report_passes(r: &MajorizeReport, ell: f64, opts: &MajorizeOptions) -> bool {
    r.chord_deficit <= opts.tol_rel && r.properness_error <= opts.proper_tol * ell.max(1.0) && r.chord_convex && r.turning_excess <= opts.turning_tol
}

/// Chord-convex planar curve properly majorizing `curve`, with verified postconditions.
pub fn majorize(space: &ModelSpace, curve: &SampledCurve) -> Result<Majorant> {
    majorize_with(space, curve, &MajorizeOptions::default())
}

pub fn majorize_with(space: &ModelSpace, curve: &SampledCurve, opts: &MajorizeOptions) -> Result<Majorant> {
    space.require_cartan_hadamard()?;
    curve.validate(space)?;
    let poly = inscribe(space, curve, opts);
    let k = poly.verts.len();
    let ind = Indicatrix::new(space, curve)?;
    let subdivision = poly.subdivision;
    if k < 3 {
        // straight segment: the majorant is the segment itself
        let len = if k == 2 { space.distance(&poly.verts[0], &poly.verts[1]) } else { 0.0 };
        let maj = TurningCurve::new(1.0, vec![0.0, len.max(0.0)], vec![0.0, 0.0], [0.0, 0.0])?;
        let params: Vec<f64> = poly.sample_vertex.iter().map(|&v| if v == 0 { 0.0 } else { len }).collect();
        let report = verify(space, curve, &maj, &params, &ind);
        if !report_passes(&report, curve.length(), opts) {
            return Err(Error::MajorizationUnverified(format!("{report:?}")));
        }
        return Ok(Majorant { curve: maj, params, flips: 0, subdivision, report });
    }
    let (p, flips) = planar_majorant(space, &poly, opts.max_flips)?;
    // move vertex 0 to the origin with the first edge along +x
    let d = sub(p[1], p[0]);
    let rot = -d[1].atan2(d[0]);
    let (c, s) = (rot.cos(), rot.sin());
    let placed: Vec<P2> = p
        .iter()
        .map(|&q| {
            let w = sub(q, p[0]);
            [c * w[0] - s * w[1], s * w[0] + c * w[1]]
        })
        .collect();
    let (maj, vertex_param) = polygon_to_turning(&placed, poly.closed)?;
    let end_param = maj.t1();
    let params: Vec<f64> = poly
        .sample_vertex
        .iter()
        .map(|&v| if v >= vertex_param.len() { end_param } else { vertex_param[v] })
        .collect();
    let report = verify(space, curve, &maj, &params, &ind);
    if report_passes(&report, curve.length(), opts) {
        return Ok(Majorant { curve: maj, params, flips, subdivision, report });
    }
    let last_err = format!("{report:?}");
    Err(Error::MajorizationUnverified(last_err))
}

/// Largest `θ̃(b) − θ̃(a) − τ(γ([a, b]))` over sample intervals.
pub fn curvature_nonincrease_check(space: &ModelSpace, curve: &SampledCurve, majorant: &Majorant) -> Result<f64> {
    let ind = Indicatrix::new(space, curve)?;
    Ok(max_turning_excess(curve, &ind, &majorant.curve, &majorant.params))
}

/// Outcome of a Schur comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchurVerdict {
    /// `max_I τ(γ₂(I)) − τ(γ₁(I))` over dyadic intervals; ≤ 0 means the hypothesis holds.
    pub hypothesis_margin: f64,
    /// `|γ₂(0)γ₂(ℓ)| − |γ₁(0)γ₁(ℓ)|`.
    pub conclusion_margin: f64,
    pub chord1: f64,
    pub chord2: f64,
    pub pass: bool,
}

/// Number of dyadic levels used for the hypothesis scan (finest intervals ℓ/2¹⁰).
pub const DYADIC_LEVELS: u32 = 10;

/// Compares the endpoint chords of a chord-convex planar curve `gamma1` and
/// a curve `gamma2` in `space` of the same length.
pub fn schur_verify(gamma1: &TurningCurve, space: &ModelSpace, gamma2: &SampledCurve) -> Result<SchurVerdict> {
    let ell = gamma2.length();
    if (gamma1.length() - ell).abs() > 1e-8 {
        return Err(Error::LengthMismatch(gamma1.length(), ell));
    }
    if !gamma1.is_chord_convex(1e-9) {
        return Err(Error::InvalidInput("first curve is not chord-convex".into()));
    }
    let ind = Indicatrix::new(space, gamma2)?;
    let mut margin = f64::NEG_INFINITY;
    for level in 0..=DYADIC_LEVELS {
        let parts = 1usize << level;
        for i in 0..parts {
            let (fa, fb) = (i as f64 / parts as f64, (i + 1) as f64 / parts as f64);
            let tau2 = ind.on_interval(gamma2.t0() + fa * ell, gamma2.t0() + fb * ell)?;
            let span = gamma1.t1() - gamma1.t0();
            let tau1 = gamma1.turning(gamma1.t0() + fa * span, gamma1.t0() + fb * span);
            margin = margin.max(tau2 - tau1);
        }
    }
    let chord1 = dist(gamma1.knot_points()[0], gamma1.point_at(gamma1.t1()));
    let chord2 = space.distance(gamma2.start(), gamma2.end());
    let conclusion_margin = chord2 - chord1;
    let pass = margin > 0.0 || conclusion_margin >= -1e-8 * chord1.max(f64::MIN_POSITIVE);
    Ok(SchurVerdict { hypothesis_margin: margin, conclusion_margin, chord1, chord2, pass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn needle_triangle_angles() {
        assert!((triangle_angle(1.0, 1.0, 1.0) - PI / 3.0).abs() < 1e-15);
        assert!((triangle_angle(3.0, 4.0, 5.0) - PI / 2.0).abs() < 1e-15);
        // angle 1e-9 opposite a tiny side
        let c = 2.0 * (0.5e-9f64).sin();
        assert!((triangle_angle(1.0, 1.0, c) - 1e-9).abs() < 1e-22);
    }

    #[test]
    fn arc_reconstruction_matches_circle() {
        let c = TurningCurve::circle_arc(1.0, 1.0);
        let p = c.point_at(1.0);
        assert!((p[0] - 1f64.sin()).abs() < 1e-15 && (p[1] - (1.0 - 1f64.cos())).abs() < 1e-15);
        assert!(c.reconstruction_error() < 1e-15);
        assert!(c.is_chord_convex(1e-12));
        let back = TurningCurve::from_table(&c.to_table()).unwrap();
        assert!(back.reconstruction_error() <= 1e-10);
    }

    #[test]
    fn s_curve_is_not_chord_convex() {
        let c = TurningCurve::from_curvature(&|s| if s < 1.0 { 1.0 } else { -1.0 }, 2.0, 201);
        assert!(!c.is_chord_convex(1e-9));
    }

    #[test]
    fn geodesic_majorant_is_straight_segment() {
        let h = ModelSpace::hyperbolic(3);
        let g = h
            .geodesic(&Vector::from_vec(vec![0.1, 0.0, 0.2]), &Vector::from_vec(vec![-0.6, 0.3, 0.1]), 50)
            .unwrap();
        let m = majorize(&h, &g).unwrap();
        let spread = m.curve.theta.iter().fold(0.0f64, |a, t| a.max(t.abs()));
        let chord = dist(m.curve.point_at(0.0), m.curve.point_at(m.curve.t1()));
        assert!(spread < 1e-6 && (chord - g.length()).abs() < 1e-12, "spread {spread} chord {chord}");
        assert!((m.curve.length() - g.length()).abs() < 1e-8);
    }

    #[test]
    fn planar_convex_arc_majorant_is_congruent() {
        let e = ModelSpace::euclidean(2);
        let c = fixtures::euclidean_circle(1.0, 200, 4.0);
        let m = majorize(&e, &c).unwrap();
        for i in (0..c.len()).step_by(7) {
            for j in (i + 1..c.len()).step_by(5) {
                let d = (&c.points[i] - &c.points[j]).norm();
                let dm = dist(m.curve.point_at(m.params[i]), m.curve.point_at(m.params[j]));
                assert!((d - dm).abs() < 1e-8);
            }
        }
        assert!(curvature_nonincrease_check(&e, &c, &m).unwrap() <= 1e-8);
    }

    #[test]
    fn hyperbolic_arc_majorant_postconditions() {
        let h = ModelSpace::hyperbolic(2);
        let c = fixtures::hyperbolic_circle(1.0, 2000, 1.0);
        let m = majorize(&h, &c).unwrap();
        assert!(m.report.chord_deficit <= 1e-6);
        assert!(m.report.turning_excess <= 1e-4);
        assert!(m.report.length_error.abs() <= 1e-8, "{:?}", m.report);
        // per-segment turning bounded by coth(1)·Δt
        let k = 1.0 / 1f64.tanh();
        for j in 0..c.len() - 1 {
            let inc = m.curve.turning(m.params[j], m.params[j + 1]);
            assert!(inc <= k * (c.t[j + 1] - c.t[j]) + 1e-4);
        }
    }

    #[test]
    fn closed_curve_majorant_is_closed_convex() {
        let h = ModelSpace::hyperbolic(2);
        let r = 0.6f64;
        let c = fixtures::hyperbolic_circle(r, 400, TAU * r.sinh());
        let m = majorize(&h, &c).unwrap();
        assert!(m.report.properness_error < 1e-9);
        assert!(m.curve.is_chord_convex(1e-9));
    }

    #[test]
    fn schur_examples() {
        // equality for identical planar arcs
        let e = ModelSpace::euclidean(2);
        let arc = fixtures::euclidean_circle(1.0, 400, 1.0);
        let v = schur_verify(&TurningCurve::circle_arc(1.0, 1.0), &e, &arc).unwrap();
        assert!(v.pass && v.conclusion_margin.abs() < 1e-10);

        // geodesic in H³ against a unit-curvature arc
        let h = ModelSpace::hyperbolic(3);
        let dir = Vector::from_vec(vec![0.6, 0.0, 0.8]);
        let g = h.geodesic(&h.origin(), &h.exp_map(&h.origin(), &dir), 200).unwrap();
        let v = schur_verify(&TurningCurve::circle_arc(1.0, 1.0), &h, &g).unwrap();
        assert!((v.chord2 - 1.0).abs() < 1e-12 && (v.chord1 - 2.0 * 0.5f64.sin()).abs() < 1e-12);
        assert!(v.hypothesis_margin <= 0.0 && v.pass);

        // constant curvature 1 in H² is a horocycle-like curve with a longer chord
        let h2 = ModelSpace::hyperbolic(2);
        let o = h2.origin();
        let frame = h2.orthonormal_basis(&o);
        let c = fixtures::frenet_curve(&h2, &o, &frame, &|_| 1.0, &|_| 0.0, 2.0, 800).unwrap();
        let v = schur_verify(&TurningCurve::circle_arc(1.0, 2.0), &h2, &c).unwrap();
        assert!(v.pass && v.conclusion_margin > 1e-3, "{v:?}");

        assert!(matches!(schur_verify(&TurningCurve::circle_arc(1.0, 1.5), &h2, &c), Err(Error::LengthMismatch(..))));
    }

    #[test]
    fn sphere_fixture_rejected() {
        let s = ModelSpace::sphere_fixture(2);
        let g = s.geodesic(&s.origin(), &Vector::from_vec(vec![0.3, 0.2]), 20).unwrap();
        assert!(matches!(majorize(&s, &g), Err(Error::NotCartanHadamard)));
    }
}
