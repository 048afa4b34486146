#![allow(dead_code)]

use bincdf::binned::CumulativeCurve;
use bincdf::mics::MonotoneCubicCdf;
use rand::Rng;

/// Random valid cumulative curve with 2..=max_nodes nodes. About a quarter
/// of the increments are zero, so flat stretches are common.
pub fn random_curve<R: Rng>(rng: &mut R, max_nodes: usize) -> CumulativeCurve {
    let nodes = rng.random_range(2..=max_nodes);
    let mut taus = vec![rng.random_range(-50.0..50.0)];
    for _ in 1..nodes {
        let step = 10f64.powf(rng.random_range(-2.0..1.5));
        taus.push(taus.last().unwrap() + step);
    }
    let mut inc: Vec<f64> = (1..nodes)
        .map(|_| if rng.random_bool(0.25) { 0.0 } else { rng.random_range(0.0..1.0) })
        .collect();
    if inc.iter().all(|&v| v == 0.0) {
        inc[0] = 1.0;
    }
    let total: f64 = inc.iter().sum();
    let mut probs = vec![0.0];
    let mut acc = 0.0;
    for v in &inc {
        acc += v / total;
        probs.push(acc.min(1.0));
    }
    *probs.last_mut().unwrap() = 1.0;
    CumulativeCurve::new(taus, probs).expect("valid random curve")
}

/// Largest |S(τ_j) − F_j|.
pub fn interpolation_error(s: &MonotoneCubicCdf) -> f64 {
    s.knots()
        .iter()
        .zip(s.values())
        .map(|(&t, &f)| (s.cdf(t) - f).abs())
        .fold(0.0, f64::max)
}

/// Smallest S′ on an evenly spaced grid. The raw piece derivative is used,
/// so negative values are not hidden by the density's clamp at zero.
pub fn min_grid_derivative(s: &MonotoneCubicCdf, points: usize) -> f64 {
    let (lo, hi) = (s.lower(), s.upper());
    let knots = s.knots();
    (0..points)
        .map(|i| {
            let tau = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            let j = knots.partition_point(|&k| k <= tau).saturating_sub(1).min(knots.len() - 2);
            let t = tau - knots[j];
            s.slopes()[j] + t * (2.0 * s.quadratic()[j] + 3.0 * t * s.cubic()[j])
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest |left − right| derivative mismatch at interior knots.
pub fn c1_mismatch(s: &MonotoneCubicCdf) -> f64 {
    (1..s.knots().len() - 1)
        .map(|j| (s.left_derivative(j) - s.slopes()[j]).abs())
        .fold(0.0, f64::max)
}

/// Largest |S(Q(q)) − q| over q = 0, 0.01, …, 1.
pub fn roundtrip_error(s: &MonotoneCubicCdf) -> f64 {
    (0..=100)
        .map(|i| {
            let q = i as f64 / 100.0;
            (s.cdf(s.quantile(q).expect("quantile")) - q).abs()
        })
        .fold(0.0, f64::max)
}

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64, whole: f64, m: f64, fm: f64, tol: f64, depth: u32) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + recurse(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    recurse(f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// Kolmogorov–Smirnov distance of a sample to a CDF.
pub fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}
