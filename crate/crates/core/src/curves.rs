//! Sampled unit-speed curves: total curvature through the transported-tangent
//! indicatrix, geodesic curvature, and chord-length expansions.

use crate::error::{Error, Result};
use crate::spaces::{ModelSpace, Vector};
use crate::transport;

/// Unit-speed curve given by samples. Equal consecutive parameters mark a
/// corner: both samples share the point and carry one-sided velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub t: Vec<f64>,
    pub points: Vec<Vector>,
    pub velocities: Vec<Vector>,
}

/// Cubic Hermite position on `[t0, t1]`.
pub fn hermite_point(p0: &Vector, v0: &Vector, p1: &Vector, v1: &Vector, dt: f64, s: f64) -> Vector {
    let s2 = s * s;
    let s3 = s2 * s;
    p0 * (2.0 * s3 - 3.0 * s2 + 1.0)
        + v0 * (dt * (s3 - 2.0 * s2 + s))
        + p1 * (-2.0 * s3 + 3.0 * s2)
        + v1 * (dt * (s3 - s2))
}

/// Derivative of the cubic Hermite interpolant with respect to the parameter.
pub fn hermite_velocity(p0: &Vector, v0: &Vector, p1: &Vector, v1: &Vector, dt: f64, s: f64) -> Vector {
    let s2 = s * s;
    (p0 - p1) * ((6.0 * s2 - 6.0 * s) / dt) + v0 * (3.0 * s2 - 4.0 * s + 1.0) + v1 * (3.0 * s2 - 2.0 * s)
}

impl SampledCurve {
    pub fn new_unchecked(t: Vec<f64>, points: Vec<Vector>, velocities: Vec<Vector>) -> Self {
        SampledCurve { t, points, velocities }
    }

    /// Builds a curve, checking grid monotonicity, unit speed and chord consistency.
    pub fn new(space: &ModelSpace, t: Vec<f64>, points: Vec<Vector>, velocities: Vec<Vector>) -> Result<Self> {
        let c = SampledCurve { t, points, velocities };
        c.validate(space)?;
        Ok(c)
    }

    pub fn validate(&self, space: &ModelSpace) -> Result<()> {
        let m = self.t.len();
        if m < 2 || self.points.len() != m || self.velocities.len() != m {
            return Err(Error::InvalidInput("curve needs matching arrays of at least two samples".into()));
        }
        for j in 0..m {
            if !space.contains(&self.points[j]) || self.velocities[j].len() != space.dim() {
                return Err(Error::InvalidInput(format!("sample {j} is not a valid chart point")));
            }
        }
        let speed_dev = self.max_speed_deviation(space);
        if speed_dev > 1e-6 {
            return Err(Error::NonUnitSpeedCurve(speed_dev));
        }
        for j in 0..m - 1 {
            let dt = self.t[j + 1] - self.t[j];
            if dt < 0.0 {
                return Err(Error::InvalidInput("parameter grid must be nondecreasing".into()));
            }
            let chord = space.distance(&self.points[j], &self.points[j + 1]);
            if dt == 0.0 && chord > 1e-12 {
                return Err(Error::InvalidInput("repeated parameter with distinct points".into()));
            }
            if chord > dt * (1.0 + 1e-6) + 1e-12 {
                return Err(Error::InvalidInput(format!("chord {chord} exceeds parameter step {dt} at {j}")));
            }
        }
        Ok(())
    }

    pub fn max_speed_deviation(&self, space: &ModelSpace) -> f64 {
        self.points
            .iter()
            .zip(&self.velocities)
            .map(|(p, v)| (space.norm(p, v) - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from unit speed of the Hermite interpolant at segment midpoints.
    pub fn interpolation_speed_error(&self, space: &ModelSpace) -> f64 {
        (0..self.len() - 1)
            .filter(|&j| self.t[j + 1] > self.t[j])
            .map(|j| {
                let (x, v) = self.eval_segment(j, 0.5 * (self.t[j] + self.t[j + 1]));
                (space.norm(&x, &v) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t0(&self) -> f64 {
        self.t[0]
    }

    pub fn t1(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    pub fn length(&self) -> f64 {
        self.t1() - self.t0()
    }

    pub fn start(&self) -> &Vector {
        &self.points[0]
    }

    pub fn end(&self) -> &Vector {
        &self.points[self.points.len() - 1]
    }

    /// The same curve traversed backwards, reparametrized to start at zero.
    pub fn reversed(&self) -> SampledCurve {
        let t1 = self.t1();
        let t0 = self.t0();
        SampledCurve {
            t: self.t.iter().rev().map(|t| t0 + t1 - t).collect(),
            points: self.points.iter().rev().cloned().collect(),
            velocities: self.velocities.iter().rev().map(|v| -v).collect(),
        }
    }

    /// Index `j` of the segment `[t_j, t_{j+1}]` containing `t`, skipping corners.
    pub fn segment_index(&self, t: f64) -> usize {
        let m = self.t.len();
        if t <= self.t[0] {
            return 0;
        }
        if t >= self.t[m - 1] {
            let mut j = m - 2;
            while j > 0 && self.t[j + 1] == self.t[j] {
                j -= 1;
            }
            return j;
        }
        let mut j = self.t.partition_point(|&x| x <= t) - 1;
        while j + 1 < m && self.t[j + 1] == self.t[j] {
            j += 1;
        }
        j.min(m - 2)
    }

    /// Hermite-interpolated point and velocity at `t`.
    pub fn eval(&self, t: f64) -> (Vector, Vector) {
        let j = self.segment_index(t);
        self.eval_segment(j, t)
    }

    pub fn eval_segment(&self, j: usize, t: f64) -> (Vector, Vector) {
        let dt = self.t[j + 1] - self.t[j];
        if dt == 0.0 {
            return (self.points[j].clone(), self.velocities[j].clone());
        }
        let s = (t - self.t[j]) / dt;
        let (p0, p1) = (&self.points[j], &self.points[j + 1]);
        let (v0, v1) = (&self.velocities[j], &self.velocities[j + 1]);
        (hermite_point(p0, v0, p1, v1, dt, s), hermite_velocity(p0, v0, p1, v1, dt, s))
    }

    /// Concatenates curves whose endpoints coincide; junctions become corners.
    pub fn concat(pieces: &[SampledCurve]) -> SampledCurve {
        let mut t = Vec::new();
        let mut points = Vec::new();
        let mut velocities = Vec::new();
        let mut offset = 0.0;
        for c in pieces {
            let base = c.t0();
            for j in 0..c.len() {
                t.push(offset + c.t[j] - base);
                points.push(c.points[j].clone());
                velocities.push(c.velocities[j].clone());
            }
            offset += c.length();
        }
        SampledCurve { t, points, velocities }
    }
}

/// Resamples a regular parametrized curve `s ↦ (x(s), x'(s))` on `[a, b]` at
/// `m` points equally spaced in arclength.
pub fn arclength_resample<F>(space: &ModelSpace, param: F, a: f64, b: f64, m: usize) -> Result<SampledCurve>
where
    F: Fn(f64) -> (Vector, Vector),
{
    if m < 2 || b <= a {
        return Err(Error::InvalidInput("resampling needs m >= 2 and a < b".into()));
    }
    // 5-point Gauss-Legendre on a fine grid
    const NODES: [f64; 5] = [0.0, -0.538_469_310_105_683_1, 0.538_469_310_105_683_1, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let speed = |s: f64| {
        let (x, v) = param(s);
        space.norm(&x, &v)
    };
    let cell_len = |lo: f64, hi: f64| {
        let (c, r) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        NODES.iter().zip(WEIGHTS.iter()).map(|(x, w)| w * speed(c + r * x)).sum::<f64>() * r
    };
    let cells = 8 * m;
    let knots: Vec<f64> = (0..=cells).map(|i| a + (b - a) * i as f64 / cells as f64).collect();
    let mut cum = vec![0.0; cells + 1];
    for i in 0..cells {
        cum[i + 1] = cum[i] + cell_len(knots[i], knots[i + 1]);
    }
    let total = cum[cells];
    let mut t = Vec::with_capacity(m);
    let mut points = Vec::with_capacity(m);
    let mut velocities = Vec::with_capacity(m);
    for j in 0..m {
        let target = total * j as f64 / (m - 1) as f64;
        let i = (cum.partition_point(|&c| c <= target).max(1) - 1).min(cells - 1);
        let (lo, hi) = (knots[i], knots[i + 1]);
        let mut s = lo + (hi - lo) * ((target - cum[i]) / (cum[i + 1] - cum[i]).max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
        for _ in 0..50 {
            let f = cum[i] + cell_len(lo, s) - target;
            let step = f / speed(s);
            s = (s - step).clamp(lo, hi);
            if step.abs() <= 1e-13 * (b - a) {
                break;
            }
        }
        let (x, v) = param(s);
        let sp = space.norm(&x, &v);
        t.push(target);
        points.push(x);
        velocities.push(v / sp);
    }
    Ok(SampledCurve { t, points, velocities })
}

/// Unit tangents of a curve transported back to its start and expressed in a
/// parallel orthonormal frame; the polygonal length of this spherical curve
/// is the total curvature.
#[derive(Debug, Clone)]
pub struct Indicatrix {
    pub curve: SampledCurve,
    pub frames: transport::FrameField,
    /// Unit tangent coefficients in the parallel frame at each sample.
    pub dirs: Vec<Vector>,
    /// `prefix[j]` is the indicatrix length from sample 0 to sample j.
    pub prefix: Vec<f64>,
    space: ModelSpace,
}

fn sphere_angle(a: &Vector, b: &Vector) -> f64 {
    // half-angle form has no cancellation for nearby unit vectors
    let (a, b) = (a / a.norm(), b / b.norm());
    2.0 * (&a - &b).norm().atan2((&a + &b).norm())
}

impl Indicatrix {
    pub fn new(space: &ModelSpace, curve: &SampledCurve) -> Result<Self> {
        let frames = transport::propagate_frame(space, curve, None)?;
        let n = space.dim();
        let dirs: Vec<Vector> = (0..curve.len())
            .map(|j| {
                let x = &curve.points[j];
                let v = &curve.velocities[j];
                let a = Vector::from_fn(n, |i, _| space.inner(x, v, &frames.frames[j][i]));
                let na = a.norm();
                a / na
            })
            .collect();
        let mut prefix = vec![0.0; curve.len()];
        for j in 1..curve.len() {
            prefix[j] = prefix[j - 1] + sphere_angle(&dirs[j - 1], &dirs[j]);
        }
        Ok(Indicatrix { curve: curve.clone(), frames, dirs, prefix, space: space.clone() })
    }

    /// Indicatrix direction at an arbitrary parameter.
    pub fn direction_at(&self, t: f64) -> Result<Vector> {
        let c = &self.curve;
        if let Some(j) = c.t.iter().position(|&x| x == t) {
            return Ok(self.dirs[j].clone());
        }
        let j = c.segment_index(t);
        let frame = transport::transport_partial(&self.space, c, j, t, &self.frames.frames[j])?;
        let (x, v) = c.eval_segment(j, t);
        let n = self.space.dim();
        let a = Vector::from_fn(n, |i, _| self.space.inner(&x, &v, &frame[i]));
        let na = a.norm();
        Ok(a / na)
    }

    pub fn total(&self) -> f64 {
        self.prefix[self.prefix.len() - 1]
    }

    /// Total curvature of the restriction to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> Result<f64> {
        let c = &self.curve;
        let eps = 1e-12 * (1.0 + c.length());
        if a > b || a < c.t0() - eps || b > c.t1() + eps {
            return Err(Error::InvalidInput(format!("interval [{a}, {b}] outside the curve")));
        }
        // first sample index with t >= a and last with t <= b
        let i0 = c.t.partition_point(|&x| x < a - eps);
        let i1 = c.t.partition_point(|&x| x <= b + eps);
        if i0 >= i1 {
            let da = self.direction_at(a)?;
            let db = self.direction_at(b)?;
            return Ok(sphere_angle(&da, &db));
        }
        let last = i1 - 1;
        let mut tau = self.prefix[last] - self.prefix[i0];
        if (c.t[i0] - a).abs() > eps {
            tau += sphere_angle(&self.direction_at(a)?, &self.dirs[i0]);
        }
        if (c.t[last] - b).abs() > eps {
            tau += sphere_angle(&self.dirs[last], &self.direction_at(b)?);
        }
        Ok(tau)
    }
}

/// Total curvature of `curve` restricted to `sub` (the whole curve if `None`).
pub fn total_curvature(space: &ModelSpace, curve: &SampledCurve, sub: Option<(f64, f64)>) -> Result<f64> {
    let ind = Indicatrix::new(space, curve)?;
    match sub {
        None => Ok(ind.total()),
        Some((a, b)) => ind.on_interval(a, b),
    }
}

/// Derivative at `t` of the Lagrange interpolant through `(xs, ys)`.
pub(crate) fn lagrange_derivative(xs: &[f64], ys: &[Vector], t: f64) -> Vector {
    let k = xs.len();
    let mut out = Vector::zeros(ys[0].len());
    for i in 0..k {
        // d/dt of prod_{j != i} (t - x_j)/(x_i - x_j)
        let mut denom = 1.0;
        for j in 0..k {
            if j != i {
                denom *= xs[i] - xs[j];
            }
        }
        let mut num = 0.0;
        for m in 0..k {
            if m == i {
                continue;
            }
            let mut prod = 1.0;
            for j in 0..k {
                if j != i && j != m {
                    prod *= t - xs[j];
                }
            }
            num += prod;
        }
        out += &ys[i] * (num / denom);
    }
    out
}

/// Geodesic curvature `|∇γ' γ'|` at `t` from a five-point stencil on the
/// parallel-frame coefficients of the unit tangent.
pub fn geodesic_curvature_with(ind: &Indicatrix, t: f64) -> Result<f64> {
    let c = &ind.curve;
    let m = c.len();
    if m < 5 || t < c.t[1] || t > c.t[m - 2] {
        return Err(Error::BoundaryParameter(t));
    }
    let j = c.segment_index(t);
    let centre = if t - c.t[j] <= c.t[j + 1] - t { j } else { j + 1 };
    let lo = centre.saturating_sub(2).min(m - 5);
    let mut idx: Vec<usize> = (lo..lo + 5).collect();
    // stay on one smooth piece: drop stencils that straddle a corner
    if idx.windows(2).any(|w| c.t[w[1]] == c.t[w[0]]) {
        idx = (centre.saturating_sub(1)..(centre + 2).min(m)).collect();
        if idx.windows(2).any(|w| c.t[w[1]] == c.t[w[0]]) {
            return Err(Error::BoundaryParameter(t));
        }
    }
    let xs: Vec<f64> = idx.iter().map(|&i| c.t[i]).collect();
    let ys: Vec<Vector> = idx.iter().map(|&i| ind.dirs[i].clone()).collect();
    Ok(lagrange_derivative(&xs, &ys, t).norm())
}

pub fn geodesic_curvature(space: &ModelSpace, curve: &SampledCurve, t: f64) -> Result<f64> {
    let ind = Indicatrix::new(space, curve)?;
    geodesic_curvature_with(&ind, t)
}

/// Squared-distance defect of the two-point expansion at `o`:
/// `measured = |exp_o(a) exp_o(b)|² − |a − b|²_o` and `predicted = −R(a,b,b,a)/3`.
pub fn two_point_defect(space: &ModelSpace, o: &Vector, a: &Vector, b: &Vector) -> Result<(f64, f64)> {
    let rho = space.norm(o, a) + space.norm(o, b);
    if rho > space.chart_ball_radius {
        return Err(Error::RadiusTooLarge { rho, limit: space.chart_ball_radius });
    }
    let pa = space.exp_map(o, a);
    let pb = space.exp_map(o, b);
    let d = space.distance(&pa, &pb);
    let diff = a - b;
    let measured = d * d - space.inner(o, &diff, &diff);
    let predicted = -space.riemann(o).form(a, b, b, a) / 3.0;
    Ok((measured, predicted))
}

/// Twelve logarithmically spaced half-widths in `[1e-3, 5e-2]·length`.
pub fn default_h_grid(length: f64) -> Vec<f64> {
    let (lo, hi) = (1e-3f64.ln(), 5e-2f64.ln());
    (0..12).map(|i| (lo + (hi - lo) * i as f64 / 11.0).exp() * length).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordFit {
    /// Fitted coefficient of `h³` in `2h − chord(h)`.
    pub coefficient: f64,
    pub kappa: f64,
    /// Rounding-noise floor of the coefficient estimate.
    pub noise_floor: f64,
}

/// Fits `2h − |γ(t−h)γ(t+h)| ≈ c h³` with weights `1/h³` and returns `κ̂ = √(3c)`.
pub fn chord_curvature_fit(space: &ModelSpace, curve: &SampledCurve, t: f64, h_grid: Option<&[f64]>) -> Result<ChordFit> {
    let default;
    let hs = match h_grid {
        Some(h) => h,
        None => {
            default = default_h_grid(curve.length());
            &default
        }
    };
    if hs.is_empty() {
        return Err(Error::InvalidInput("empty h grid".into()));
    }
    let hmax = hs.iter().cloned().fold(0.0, f64::max);
    if t - hmax < curve.t0() - 1e-12 || t + hmax > curve.t1() + 1e-12 {
        return Err(Error::InvalidInput(format!("t ± {hmax} leaves the parameter range")));
    }
    // Interpolated samples run at speed 1 ± δ, so chords may exceed 2h by about 2hδ.
    let delta = curve.interpolation_speed_error(space);
    let mut sum = 0.0;
    let mut noise = 0.0;
    for &h in hs {
        if h <= 0.0 {
            return Err(Error::InvalidInput("h grid must be positive".into()));
        }
        let (pa, _) = curve.eval(t - h);
        let (pb, _) = curve.eval(t + h);
        let chord = space.distance(&pa, &pb);
        sum += (2.0 * h - chord) / (h * h * h);
        noise += (2.0 * h * delta + 64.0 * f64::EPSILON * 2.0 * h) / (h * h * h);
    }
    let c = sum / hs.len() as f64;
    let noise_floor = noise / hs.len() as f64;
    if c < 0.0 {
        if -c <= noise_floor {
            return Ok(ChordFit { coefficient: c, kappa: 0.0, noise_floor });
        }
        return Err(Error::NegativeFitCoefficient(c));
    }
    Ok(ChordFit { coefficient: c, kappa: (3.0 * c).sqrt(), noise_floor })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChordBound {
    pub c: f64,
    pub h0: f64,
    /// Grid points where `chord < 2h − C h³` beyond rounding, or where `chord > 2h`.
    pub violations: usize,
}

/// Smallest empirical `C` with `|γ(t−h)γ(t+h)| ≥ 2h − C h³` over a `(t, h)` grid.
/// Chords are taken between samples `j ± k`, so no interpolation enters; the
/// half-widths follow the default logarithmic grid snapped to sample offsets.
pub fn uniform_chord_bound_check(space: &ModelSpace, curve: &SampledCurve) -> ChordBound {
    let m = curve.len();
    let spacing = curve.length() / (m - 1) as f64;
    let mut offsets: Vec<usize> = default_h_grid(curve.length())
        .iter()
        .map(|h| ((h / spacing).round() as usize).max(1))
        .collect();
    offsets.dedup();
    let h0 = offsets.last().map(|&k| k as f64 * spacing).unwrap_or(0.0);
    let stride = (m / 400).max(1);
    let mut samples = Vec::new();
    let mut c: f64 = 0.0;
    for j in (0..m).step_by(stride) {
        for &k in &offsets {
            if j < k || j + k >= m {
                continue;
            }
            let h = 0.5 * (curve.t[j + k] - curve.t[j - k]);
            if h <= 0.0 {
                continue;
            }
            let chord = space.distance(&curve.points[j - k], &curve.points[j + k]);
            // chart coordinates of size |x| resolve chords only to about ε(1 + |x|)
            let defect = 2.0 * h - chord;
            let scale = 1.0 + curve.points[j - k].norm() + curve.points[j + k].norm();
            if defect > 64.0 * f64::EPSILON * scale {
                c = c.max(defect / (h * h * h));
            }
            samples.push((h, chord));
        }
    }
    let violations = samples
        .iter()
        .filter(|(h, chord)| {
            let slack = 1e-12 * h;
            *chord < 2.0 * h - c * h * h * h - slack || *chord > 2.0 * h + slack
        })
        .count();
    ChordBound { c, h0, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn geodesic_has_zero_total_curvature() {
        let space = ModelSpace::hyperbolic(3);
        let p = Vector::from_vec(vec![0.1, 0.2, -0.3]);
        let q = Vector::from_vec(vec![-0.4, 0.5, 0.2]);
        let g = space.geodesic(&p, &q, 200).unwrap();
        let tau = total_curvature(&space, &g, None).unwrap();
        assert!(tau <= 1e-8, "tau {tau}");
        assert!(geodesic_curvature(&space, &g, g.length() / 2.0).unwrap() < 1e-7);
    }

    #[test]
    fn unit_circle_total_curvature() {
        let space = ModelSpace::euclidean(2);
        let c = fixtures::euclidean_circle(1.0, 2000, std::f64::consts::TAU);
        let tau = total_curvature(&space, &c, None).unwrap();
        assert!((tau - std::f64::consts::TAU).abs() < 1e-6);
        let k = geodesic_curvature(&space, &c, 1.0).unwrap();
        assert!((k - 1.0).abs() < 1e-7);
        let c2 = fixtures::euclidean_circle(2.5, 2000, 5.0);
        assert!((geodesic_curvature(&space, &c2, 2.0).unwrap() - 0.4).abs() < 1e-7);
    }

    #[test]
    fn hyperbolic_circle_total_and_geodesic_curvature() {
        // oracle: κ = coth r, length 2π sinh r, τ = ∫κ = 2π cosh r
        let space = ModelSpace::hyperbolic(2);
        let r = 1.0f64;
        let len = std::f64::consts::TAU * r.sinh();
        let c = fixtures::hyperbolic_circle(r, 4000, len);
        let tau = total_curvature(&space, &c, None).unwrap();
        assert!((tau - std::f64::consts::TAU * r.cosh()).abs() < 1e-5, "tau {tau}");
        let k = geodesic_curvature(&space, &c, 1.3).unwrap();
        assert!((k - 1.0 / r.tanh()).abs() < 1e-6, "kappa {k}");
        // ∫κ matches τ
        let ind = Indicatrix::new(&space, &c).unwrap();
        let mut integral = 0.0;
        let n = 200;
        let (a, b) = (c.t[2], c.t[c.len() - 3]);
        for i in 0..n {
            let t = a + (b - a) * (i as f64 + 0.5) / n as f64;
            integral += geodesic_curvature_with(&ind, t).unwrap() * (b - a) / n as f64;
        }
        let tau_ab = ind.on_interval(a, b).unwrap();
        assert!((integral - tau_ab).abs() <= 1e-4 * tau_ab);
    }

    #[test]
    fn additivity_and_reversal() {
        let space = ModelSpace::hyperbolic(3);
        let c = fixtures::helix_like(&space, 1.5, 800);
        let ind = Indicatrix::new(&space, &c).unwrap();
        let (a, b, m) = (c.t[0], c.t[c.len() - 1], c.t[313]);
        let whole = ind.on_interval(a, b).unwrap();
        let parts = ind.on_interval(a, m).unwrap() + ind.on_interval(m, b).unwrap();
        assert!((whole - parts).abs() < 1e-8);
        let rev = total_curvature(&space, &c.reversed(), None).unwrap();
        assert!((rev - whole).abs() < 1e-7, "{rev} vs {whole}");
    }

    #[test]
    fn boundary_parameter_rejected() {
        let space = ModelSpace::euclidean(2);
        let c = fixtures::euclidean_circle(1.0, 100, 1.0);
        assert!(matches!(geodesic_curvature(&space, &c, c.t[0] + 1e-4), Err(Error::BoundaryParameter(_))));
    }

    #[test]
    fn two_point_defect_values() {
        let e = ModelSpace::euclidean(3);
        let o = e.origin();
        let a = Vector::from_vec(vec![0.1, 0.0, 0.0]);
        let b = Vector::from_vec(vec![0.0, 0.1, 0.0]);
        let (m, p) = two_point_defect(&e, &o, &a, &b).unwrap();
        assert!(m.abs() < 1e-16 && p == 0.0);

        let h = ModelSpace::hyperbolic(3);
        let (m, p) = two_point_defect(&h, &h.origin(), &a, &b).unwrap();
        // cosh d = cosh² ε ⇒ d² = 2ε² + ε⁴/3 + O(ε⁶)
        assert!((p - 1e-4 / 3.0).abs() < 1e-18);
        assert!((m - p).abs() <= 0.05 * p);
        let far = Vector::from_vec(vec![0.95, 0.0, 0.0]);
        assert!(matches!(two_point_defect(&h, &h.origin(), &far, &a), Err(Error::RadiusTooLarge { .. })));
    }

    #[test]
    fn chord_fit_circle_and_geodesic() {
        let e = ModelSpace::euclidean(2);
        let c = fixtures::euclidean_circle(1.0, 4000, std::f64::consts::TAU);
        let fit = chord_curvature_fit(&e, &c, c.length() / 2.0, None).unwrap();
        assert!((fit.kappa - 1.0).abs() < 0.02);

        let h = ModelSpace::hyperbolic(3);
        let g = h
            .geodesic(&Vector::from_vec(vec![0.0, 0.1, 0.2]), &Vector::from_vec(vec![0.5, -0.3, 0.1]), 500)
            .unwrap();
        let fit = chord_curvature_fit(&h, &g, g.length() / 2.0, None).unwrap();
        assert!(fit.kappa < 1e-3, "{fit:?}");
    }

    #[test]
    fn uniform_bound_values() {
        let e = ModelSpace::euclidean(2);
        let c = fixtures::euclidean_circle(1.0, 2000, std::f64::consts::TAU);
        let b = uniform_chord_bound_check(&e, &c);
        assert!((b.c - 1.0 / 3.0).abs() < 1e-3, "{b:?}");
        assert_eq!(b.violations, 0);

        let h = ModelSpace::hyperbolic(2);
        let len = std::f64::consts::TAU * 1f64.sinh();
        let hc = fixtures::hyperbolic_circle(1.0, 4000, len);
        let b = uniform_chord_bound_check(&h, &hc);
        let expect = (1.0 / 1f64.tanh()).powi(2) / 3.0;
        assert!((b.c - expect).abs() < 0.02 * expect, "{b:?} vs {expect}");

        let g = h.geodesic(&h.origin(), &Vector::from_vec(vec![0.4, 0.3]), 300).unwrap();
        assert!(uniform_chord_bound_check(&h, &g).c < 1e-9);
    }
}
