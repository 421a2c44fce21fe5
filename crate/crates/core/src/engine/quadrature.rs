use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{EvalConfig, EvalPath, Estimate};
use crate::error::{domain, Error, Result};

const MAX_SEGMENTS: usize = 20_000;

// 15-point Kronrod abscissae on [-1, 1] (non-negative half, descending);
// odd indices are the embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_553,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Adaptive Gauss–Kronrod (7/15) quadrature of a fallible integrand.
///
/// `b` may be `+inf`; the half-line is mapped onto `[0, 1)` by
/// `x = a + u / (1 - u)`. The worst segment is bisected until the summed
/// error estimate drops below `max(abs_tol, rel_tol * |value|)`.
pub fn try_integrate_1d<F>(mut f: F, a: f64, b: f64, cfg: &EvalConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !a.is_finite() || b.is_nan() || b == f64::NEG_INFINITY {
        return Err(domain(format!("integration limits [{a}, {b}] are not a finite start and a finite or +inf end")));
    }
    if a == b {
        return Ok(Estimate::new(0.0, 0.0, EvalPath::Quadrature));
    }
    if a > b {
        return Err(domain(format!("lower limit {a} exceeds upper limit {b}")));
    }
    if b.is_infinite() {
        let g = |u: f64| -> Result<f64> {
            let w = 1.0 - u;
            let x = a + u / w;
            let y = f(x)?;
            if y == 0.0 {
                Ok(0.0)
            } else {
                Ok(y / (w * w))
            }
        };
        return adaptive(g, 0.0, 1.0, cfg, |u| a + u / (1.0 - u));
    }
    adaptive(f, a, b, cfg, |x| x)
}

/// Infallible-integrand convenience wrapper around [`try_integrate_1d`].
pub fn integrate_1d<F>(f: F, a: f64, b: f64, cfg: &EvalConfig) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
{
    try_integrate_1d(|x| Ok(f(x)), a, b, cfg)
}

/// Like [`try_integrate_1d`] over a finite `[a, b]`, but the first pass
/// already splits it at `a + w, a + 2w, a + 4w, …`. Long ranges whose
/// integrand lives near `a` are otherwise sampled too coarsely for the
/// error estimate to notice.
pub(crate) fn try_integrate_graded<F>(f: F, a: f64, b: f64, first_width: f64, cfg: &EvalConfig) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(domain(format!("graded integration needs finite ordered limits, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate::new(0.0, 0.0, EvalPath::Quadrature));
    }
    let mut breaks = vec![a];
    let mut w = if first_width > 0.0 { first_width } else { b - a };
    while a + w < b {
        breaks.push(a + w);
        w *= 2.0;
    }
    breaks.push(b);
    adaptive_from(f, &breaks, cfg, |x| x)
}

fn adaptive<F, M>(f: F, a: f64, b: f64, cfg: &EvalConfig, to_x: M) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
    M: Fn(f64) -> f64,
{
    adaptive_from(f, &[a, b], cfg, to_x)
}

fn adaptive_from<F, M>(mut f: F, breaks: &[f64], cfg: &EvalConfig, to_x: M) -> Result<Estimate>
where
    F: FnMut(f64) -> Result<f64>,
    M: Fn(f64) -> f64,
{
    let mut rule = |lo: f64, hi: f64, depth: u32| -> Result<Segment> {
        let (value, error, abs_value) = gauss_kronrod(&mut f, lo, hi, &to_x)?;
        Ok(Segment { a: lo, b: hi, value, error, abs_value, depth })
    };

    let mut heap = BinaryHeap::new();
    for pair in breaks.windows(2) {
        heap.push(rule(pair[0], pair[1], 0)?);
    }
    loop {
        let (value, error, abs_value) = heap
            .iter()
            .fold((0.0, 0.0, 0.0), |acc, s| (acc.0 + s.value, acc.1 + s.error, acc.2 + s.abs_value));
        let roundoff = 50.0 * f64::EPSILON * abs_value;
        let target = cfg.quad_abs_tol.max(cfg.quad_rel_tol * value.abs()).max(roundoff);
        if error <= target {
            return Ok(Estimate::new(value, error, EvalPath::Quadrature));
        }
        let worst = heap.pop().expect("heap is never empty");
        let fail = |reason: String| Error::NonConvergence { estimate: value, error_bound: error, reason };
        if worst.depth >= cfg.quad_max_depth {
            return Err(fail(format!("bisection depth {} reached", cfg.quad_max_depth)));
        }
        if heap.len() + 2 > MAX_SEGMENTS {
            return Err(fail(format!("{MAX_SEGMENTS} segments exhausted")));
        }
        let mid = 0.5 * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            return Err(fail("segment width at machine precision".into()));
        }
        heap.push(rule(worst.a, mid, worst.depth + 1)?);
        heap.push(rule(mid, worst.b, worst.depth + 1)?);
    }
}

/// Returns `(kronrod, error estimate, integral of |f|)` over `[lo, hi]`.
fn gauss_kronrod<F, M>(f: &mut F, lo: f64, hi: f64, to_x: &M) -> Result<(f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
    M: Fn(f64) -> f64,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut eval = |t: f64| -> Result<f64> {
        let y = f(t)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NanIntegrand { at: to_x(t) })
        }
    };

    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_k = fc.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let y1 = eval(center - dx)?;
        let y2 = eval(center + dx)?;
        fv1[j] = y1;
        fv2[j] = y2;
        kronrod += WGK[j] * (y1 + y2);
        abs_k += WGK[j] * (y1.abs() + y2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (y1 + y2);
        }
    }
    let mean = kronrod * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = kronrod * half;
    let abs_result = abs_k * half.abs();
    let asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_result > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_result);
    }
    Ok((result, err, abs_result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn rule_weights_and_exactness() {
        let kw: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        let gw: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((kw - 2.0).abs() < 1e-15 && (gw - 2.0).abs() < 1e-15);
        // Kronrod-15 is exact through degree 22, Gauss-7 through degree 13.
        for deg in [2, 10, 13, 21, 22] {
            let mut f = |x: f64| Ok(x.powi(deg));
            let (k, _, _) = gauss_kronrod(&mut f, -1.0, 1.0, &|x| x).unwrap();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((k - exact).abs() < 1e-14, "degree {deg}: {k} vs {exact}");
        }
    }

    #[test]
    fn exponential_density_on_half_line() {
        let e = integrate_1d(|x| 2.0 * (-2.0 * x).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-8, "{e:?}");
        assert!(e.error_bound <= 1e-8);
    }

    #[test]
    fn half_gaussian() {
        let e = integrate_1d(|x| (-x * x).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert!((e.value - 0.886_226_925_452_758).abs() < 1e-9, "{e:?}");
    }

    #[test]
    fn lomax_two_out_of_three_mean() {
        let s = |x: f64| 3.0 * (1.0 + x).powi(-4) - 2.0 * (1.0 + x).powi(-6);
        let e = integrate_1d(s, 0.0, f64::INFINITY, &cfg()).unwrap();
        assert!((e.value - 0.6).abs() < 1e-8, "{e:?}");
    }

    #[test]
    fn nan_names_the_abscissa() {
        let r = integrate_1d(|x| if x > 0.5 { f64::NAN } else { x }, 0.0, 1.0, &cfg());
        match r {
            Err(Error::NanIntegrand { at }) => assert!(at > 0.5 && at < 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn depth_limit_reports_best_estimate() {
        let tight = EvalConfig { quad_max_depth: 2, quad_rel_tol: 1e-14, quad_abs_tol: 1e-14, ..cfg() };
        match integrate_1d(|x| x.abs().sqrt(), -1.0, 1.0, &tight) {
            Err(Error::NonConvergence { estimate, error_bound, .. }) => {
                assert!((estimate - 4.0 / 3.0).abs() < 1e-2);
                assert!(error_bound > 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn graded_split_finds_a_narrow_peak_near_the_start() {
        let f = |x: f64| Ok(50.0 * (-50.0 * x).exp());
        let plain = try_integrate_1d(f, 0.0, 1e5, &cfg()).unwrap().value;
        let graded = try_integrate_graded(f, 0.0, 1e5, 1e-2, &cfg()).unwrap().value;
        assert!((plain - 1.0).abs() > 0.5);
        assert!((graded - 1.0).abs() < 1e-8, "{graded}");
    }

    #[test]
    fn reversed_limits_are_rejected() {
        assert!(integrate_1d(|x| x, 1.0, 0.0, &cfg()).is_err());
        assert_eq!(integrate_1d(|x| x, 1.0, 1.0, &cfg()).unwrap().value, 0.0);
    }

    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn randomized_polynomial_exponential_integrands_match_simpson() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let coeffs: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let rate: f64 = rng.random_range(0.5..3.0);
            let b: f64 = rng.random_range(1.0..6.0);
            let f = move |x: f64| {
                coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c) * (-rate * x).exp()
            };
            let adaptive = integrate_1d(&f, 0.0, b, &cfg()).unwrap().value;
            let oracle = simpson(&f, 0.0, b, 200_000);
            assert!(
                (adaptive - oracle).abs() <= 1e-7 * oracle.abs().max(1e-3),
                "{adaptive} vs {oracle}"
            );
        }
    }
}
