//! Monotone interpolating cubic splines (MICS) for cumulative curves.
//!
//! The CDF estimate is a C¹ piecewise cubic through the nodes `(τ_j, F_j)`:
//!
//! ```text
//! S(τ) = F_j + b_j t + c_j t² + d_j t³,   t = τ − τ_j,  τ ∈ [τ_j, τ_{j+1}]
//! c_j = (3 m_j − b_{j+1} − 2 b_j) / h_j
//! d_j = (b_{j+1} + b_j − 2 m_j) / h_j²
//! ```
//!
//! with mesh `h_j = τ_{j+1} − τ_j` and gradients `m_j = (F_{j+1} − F_j)/h_j`.
//! Knot slopes start from three-point endpoint formulas and Fritsch–Butland
//! harmonic means at interior knots, then pass through the Hyman filter so
//! that every interval stays inside the monotone region `0 ≤ b ≤ 3 m`.
//! The derivative `S′` is the matching density estimate.

use serde::{Deserialize, Serialize};

use crate::binned::CumulativeCurve;
use crate::error::{Error, Result};

/// Convergence target on `|S(τ) − q|` for [`MonotoneCubicCdf::quantile`].
pub const QUANTILE_TOL: f64 = 1e-10;
/// Iteration cap for the quantile root search.
pub const QUANTILE_MAX_ITER: usize = 200;
/// Default number of points in exported spline samples.
pub const DEFAULT_GRID: usize = 512;

fn mesh(taus: &[f64], probs: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let widths: Vec<f64> = taus.windows(2).map(|w| w[1] - w[0]).collect();
    let gradients = probs
        .windows(2)
        .zip(&widths)
        .map(|(f, h)| (f[1] - f[0]) / h)
        .collect();
    (widths, gradients)
}

/// Unfiltered knot slopes.
///
/// Endpoints use the three-point formula
/// `b_0 = ((2h_0 + h_1) m_0 − h_0 m_1) / (h_0 + h_1)` (mirrored at the top);
/// interior knots use the Fritsch–Butland weighted harmonic mean, or 0 where
/// the neighbouring gradients do not share a strictly positive sign.
pub fn initial_slopes(curve: &CumulativeCurve) -> Result<Vec<f64>> {
    if curve.len() < 2 {
        return Err(Error::InvalidCurve("need at least two nodes".into()));
    }
    let (h, m) = mesh(curve.taus(), curve.probs());
    Ok(slopes_from_mesh(&h, &m))
}

fn slopes_from_mesh(h: &[f64], m: &[f64]) -> Vec<f64> {
    let k = m.len();
    if k == 1 {
        return vec![m[0], m[0]];
    }
    let mut b = vec![0.0; k + 1];
    b[0] = ((2.0 * h[0] + h[1]) * m[0] - h[0] * m[1]) / (h[0] + h[1]);
    b[k] = ((2.0 * h[k - 1] + h[k - 2]) * m[k - 1] - h[k - 1] * m[k - 2]) / (h[k - 1] + h[k - 2]);
    for j in 1..k {
        let (m0, m1) = (m[j - 1], m[j]);
        b[j] = if m0 * m1 > 0.0 {
            let w0 = 2.0 * h[j] + h[j - 1];
            let w1 = h[j] + 2.0 * h[j - 1];
            (w0 + w1) / (w0 / m0 + w1 / m1)
        } else {
            0.0
        };
    }
    b
}

/// Hyman's monotonicity filter for a non-decreasing curve.
///
/// Interior: `b_j ← min(max(0, b_j), 3 min(m_{j−1}, m_j))`.
/// Endpoints: clamped to `[0, 3 m]` of the adjacent interval.
pub fn hyman_filter(slopes: &[f64], gradients: &[f64]) -> Vec<f64> {
    assert_eq!(slopes.len(), gradients.len() + 1, "one more slope than gradients");
    let k = gradients.len();
    slopes
        .iter()
        .enumerate()
        .map(|(j, &b)| {
            let cap = if j == 0 {
                3.0 * gradients[0]
            } else if j == k {
                3.0 * gradients[k - 1]
            } else {
                3.0 * gradients[j - 1].min(gradients[j])
            };
            b.max(0.0).min(cap)
        })
        .collect()
}

/// Fitted monotone cubic CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneCubicCdf {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    widths: Vec<f64>,
    gradients: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

/// One row of an exported spline sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplineSample {
    pub tau: f64,
    pub cdf: f64,
    pub pdf: f64,
}

impl MonotoneCubicCdf {
    pub fn fit(curve: &CumulativeCurve) -> Result<Self> {
        let knots = curve.taus().to_vec();
        let values = curve.probs().to_vec();
        if !knots.iter().all(|t| t.is_finite()) {
            return Err(Error::NonFiniteSupport);
        }
        if let Some(i) = knots.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::NonIncreasingEdges { index: i + 1 });
        }
        let (widths, gradients) = mesh(&knots, &values);
        let slopes = hyman_filter(&slopes_from_mesh(&widths, &gradients), &gradients);
        let (c, d) = widths
            .iter()
            .zip(&gradients)
            .enumerate()
            .map(|(j, (&h, &m))| {
                let (b0, b1) = (slopes[j], slopes[j + 1]);
                ((3.0 * m - b1 - 2.0 * b0) / h, (b1 + b0 - 2.0 * m) / (h * h))
            })
            .unzip();
        Ok(Self { knots, values, slopes, widths, gradients, c, d })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn gradients(&self) -> &[f64] {
        &self.gradients
    }

    pub fn widths(&self) -> &[f64] {
        &self.widths
    }

    /// Quadratic coefficients `c_j`, one per interval.
    pub fn quadratic(&self) -> &[f64] {
        &self.c
    }

    /// Cubic coefficients `d_j`, one per interval.
    pub fn cubic(&self) -> &[f64] {
        &self.d
    }

    pub fn lower(&self) -> f64 {
        self.knots[0]
    }

    pub fn upper(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Interval holding `tau`, assuming `τ_0 ≤ tau < τ_r`.
    fn interval(&self, tau: f64) -> usize {
        let k = self.knots.partition_point(|&t| t <= tau);
        k.saturating_sub(1).min(self.widths.len() - 1)
    }

    fn piece(&self, j: usize, t: f64) -> f64 {
        self.values[j] + t * (self.slopes[j] + t * (self.c[j] + t * self.d[j]))
    }

    fn piece_derivative(&self, j: usize, t: f64) -> f64 {
        self.slopes[j] + t * (2.0 * self.c[j] + 3.0 * t * self.d[j])
    }

    pub fn cdf(&self, tau: f64) -> f64 {
        if tau <= self.lower() {
            return 0.0;
        }
        if tau >= self.upper() {
            return 1.0;
        }
        let j = self.interval(tau);
        self.piece(j, tau - self.knots[j]).clamp(0.0, 1.0)
    }

    /// Density `S′(τ)`; zero outside `[τ_0, τ_r]`.
    pub fn pdf(&self, tau: f64) -> f64 {
        if tau < self.lower() || tau > self.upper() || tau.is_nan() {
            return 0.0;
        }
        let j = self.interval(tau);
        self.piece_derivative(j, tau - self.knots[j]).max(0.0)
    }

    /// Left derivative at interior knot `j` (from the piece ending there).
    pub fn left_derivative(&self, j: usize) -> f64 {
        self.piece_derivative(j - 1, self.widths[j - 1])
    }

    /// Smallest `τ` with `S(τ) ≥ q`; `quantile(1)` is the upper knot.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidLevel(q));
        }
        if q == 0.0 {
            return Ok(self.lower());
        }
        if q == 1.0 {
            return Ok(self.upper());
        }
        let k = self.values.partition_point(|&f| f < q);
        if self.values[k] == q {
            return Ok(self.knots[k]);
        }
        // F_{k-1} < q < F_k on interval k-1
        let j = k - 1;
        let h = self.widths[j];
        let (mut lo, mut hi) = (0.0_f64, h);
        let mut t = (q - self.values[j]) / self.gradients[j];
        if !(t > lo && t < hi) {
            t = 0.5 * h;
        }
        for _ in 0..QUANTILE_MAX_ITER {
            let f = self.piece(j, t) - q;
            if f == 0.0 {
                return Ok(self.knots[j] + t);
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            if hi - lo <= f64::EPSILON * (self.knots[j].abs() + h) {
                break;
            }
            let slope = self.piece_derivative(j, t);
            let newton = t - f / slope;
            t = if slope > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        }
        let tau = self.knots[j] + hi;
        if (self.piece(j, hi) - q).abs() <= QUANTILE_TOL {
            Ok(tau)
        } else {
            Err(Error::NonConvergence { q })
        }
    }

    /// Mean and standard deviation of the spline distribution.
    ///
    /// Both integrals are evaluated exactly on each piece from the
    /// polynomial antiderivative of `τ^k S′(τ)`.
    pub fn moments(&self) -> Result<(f64, f64)> {
        let origin = self.lower();
        let mut mean = origin;
        for j in 0..self.widths.len() {
            mean += self.moment_piece(j, self.knots[j] - origin, 1);
        }
        let mut var = 0.0;
        for j in 0..self.widths.len() {
            var += self.moment_piece(j, self.knots[j] - mean, 2);
        }
        if var < -1e-10 {
            return Err(Error::NegativeVariance(var));
        }
        Ok((mean, var.max(0.0).sqrt()))
    }

    /// `∫_0^h (a + t)^power · S′_j(t) dt`.
    fn moment_piece(&self, j: usize, a: f64, power: u32) -> f64 {
        let h = self.widths[j];
        let density = [self.slopes[j], 2.0 * self.c[j], 3.0 * self.d[j]];
        let shift: &[f64] = match power {
            1 => &[a, 1.0],
            2 => &[a * a, 2.0 * a, 1.0],
            _ => unreachable!("only first and second moments"),
        };
        let mut integrand = [0.0; 5];
        for (i, s) in shift.iter().enumerate() {
            for (k, p) in density.iter().enumerate() {
                integrand[i + k] += s * p;
            }
        }
        // Horner on Σ coef_i h^{i+1}/(i+1)
        integrand
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (i, coef)| acc * h + coef / (i + 1) as f64)
            * h
    }

    pub fn iqr(&self) -> Result<f64> {
        Ok(self.quantile(0.75)? - self.quantile(0.25)?)
    }

    /// Evenly spaced `tau,cdf,pdf` rows over `[τ_0, τ_r]`.
    pub fn sample_grid(&self, points: usize) -> Vec<SplineSample> {
        let points = points.max(2);
        let (lo, hi) = (self.lower(), self.upper());
        (0..points)
            .map(|i| {
                let tau = if i + 1 == points {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (points - 1) as f64
                };
                SplineSample { tau, cdf: self.cdf(tau), pdf: self.pdf(tau) }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: &[(f64, f64)]) -> CumulativeCurve {
        CumulativeCurve::from_points(points).unwrap()
    }

    fn jan_lt() -> CumulativeCurve {
        curve(&[(0.0, 0.0), (6.0, 0.809), (16.0, 0.922), (180.0, 1.0)])
    }

    #[test]
    fn equal_gradients_give_unit_slopes() {
        let c = curve(&[(0.0, 0.0), (0.25, 0.25), (0.5, 0.5), (0.75, 0.75), (1.0, 1.0)]);
        for b in initial_slopes(&c).unwrap() {
            assert!((b - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn flat_segment_zeroes_interior_slope() {
        let c = curve(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.5), (3.0, 1.0)]);
        let b = initial_slopes(&c).unwrap();
        assert_eq!(b[1], 0.0);
        assert_eq!(b[2], 0.0);
    }

    #[test]
    fn two_node_curve_is_a_line() {
        let s = MonotoneCubicCdf::fit(&curve(&[(2.0, 0.0), (6.0, 1.0)])).unwrap();
        assert_eq!(s.slopes(), &[0.25, 0.25]);
        assert_eq!(s.quadratic(), &[0.0]);
        assert_eq!(s.cubic(), &[0.0]);
        assert!((s.cdf(3.0) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn hyman_examples() {
        assert_eq!(hyman_filter(&[0.0, 5.0, 0.0], &[1.0, 1.0])[1], 3.0);
        assert_eq!(hyman_filter(&[0.0, -0.2, 0.0], &[0.7, 1.3])[1], 0.0);
        assert_eq!(hyman_filter(&[0.0, 1.0, 0.0], &[2.0, 4.0])[1], 1.0);
        // endpoints
        assert_eq!(hyman_filter(&[7.0, 1.0, -1.0], &[2.0, 4.0]), vec![6.0, 1.0, 0.0]);
    }

    #[test]
    fn linear_data_reproduced() {
        let s = MonotoneCubicCdf::fit(&curve(&[(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)])).unwrap();
        assert!(s.quadratic().iter().chain(s.cubic()).all(|v| v.abs() <= 1e-12));
        assert!((s.cdf(0.3) - 0.3).abs() < 1e-15);
        assert!((s.pdf(0.7) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn db_january_nodes_hit_exactly() {
        let c = jan_lt();
        let s = MonotoneCubicCdf::fit(&c).unwrap();
        assert_eq!(s.cdf(6.0), c.probs()[1]);
        assert_eq!(s.cdf(16.0), c.probs()[2]);
        assert_eq!(s.quantile(c.probs()[1]).unwrap(), 6.0);
        assert_eq!(s.quantile(0.809).unwrap(), 6.0);
    }

    #[test]
    fn tails_and_outside_density() {
        let s = MonotoneCubicCdf::fit(&jan_lt()).unwrap();
        assert_eq!(s.cdf(-1.0), 0.0);
        assert_eq!(s.cdf(190.0), 1.0);
        assert_eq!(s.pdf(-1.0), 0.0);
        assert_eq!(s.pdf(181.0), 0.0);
    }

    #[test]
    fn quantile_edge_levels() {
        let s = MonotoneCubicCdf::fit(&jan_lt()).unwrap();
        assert_eq!(s.quantile(0.0).unwrap(), 0.0);
        assert_eq!(s.quantile(1.0).unwrap(), 180.0);
        assert!(matches!(s.quantile(1.5), Err(Error::InvalidLevel(_))));
        assert!(s.quantile(-0.1).is_err());
    }

    #[test]
    fn leftmost_quantile_on_flat_segment() {
        let s = MonotoneCubicCdf::fit(&curve(&[(0.0, 0.0), (1.0, 0.5), (2.0, 0.5), (3.0, 1.0)])).unwrap();
        assert_eq!(s.quantile(0.5).unwrap(), 1.0);
    }

    #[test]
    fn uniform_moments_and_iqr() {
        let s = MonotoneCubicCdf::fit(&curve(&[(0.0, 0.0), (1.0, 1.0)])).unwrap();
        let (mean, sd) = s.moments().unwrap();
        assert!((mean - 0.5).abs() < 1e-12);
        assert!((sd - 1.0 / 12f64.sqrt()).abs() < 1e-12);
        assert!((s.iqr().unwrap() - 0.5).abs() < 1e-12);
        assert!((s.quantile(0.5).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn symmetric_curve_has_central_mean() {
        let s = MonotoneCubicCdf::fit(&curve(&[(0.0, 0.0), (1.0, 0.5), (2.0, 1.0)])).unwrap();
        assert!((s.moments().unwrap().0 - 1.0).abs() < 1e-12);
        let s = MonotoneCubicCdf::fit(&curve(&[(0.0, 0.0), (0.7, 0.1), (1.0, 0.5), (1.3, 0.9), (2.0, 1.0)])).unwrap();
        let (q1, q3) = (s.quantile(0.25).unwrap(), s.quantile(0.75).unwrap());
        assert!(((1.0 - q1) - (q3 - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn grid_includes_both_ends() {
        let s = MonotoneCubicCdf::fit(&jan_lt()).unwrap();
        let g = s.sample_grid(DEFAULT_GRID);
        assert_eq!(g.len(), 512);
        assert_eq!(g[0].tau, 0.0);
        assert_eq!(g[511].tau, 180.0);
        assert_eq!(g[511].cdf, 1.0);
    }

    #[test]
    fn rejects_infinite_support() {
        let c = curve(&[(0.0, 0.0), (1.0, 0.5), (f64::INFINITY, 1.0)]);
        assert!(matches!(MonotoneCubicCdf::fit(&c), Err(Error::NonFiniteSupport)));
    }
}
