//! Coupon-collector quantities governing when every arm pair has been seen.

use crate::error::{Error, Result};

/// Probability that `N` uniform draws from `n` items include every item:
/// `Σᵢ (−1)ⁱ C(n,i) (1 − i/n)^N`.
pub fn coupon_all_prob(n: usize, draws: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("n must be at least 1"));
    }
    let nf = n as f64;
    let exponent = i32::try_from(draws).map_err(|_| Error::domain("N too large"))?;
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut binom = 1.0_f64;
    for i in 0..=n {
        if i > 0 {
            binom *= (n - i + 1) as f64 / i as f64;
        }
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * binom * (1.0 - i as f64 / nf).powi(exponent);
        // Kahan summation.
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    if !(-1e-9..=1.0 + 1e-9).contains(&sum) {
        return Err(Error::numeric(format!(
            "alternating sum lost precision for n={n}, N={draws} (raw value {sum:e}); use a Monte-Carlo estimate instead"
        )));
    }
    Ok(sum.clamp(0.0, 1.0))
}

/// Expected number of draws until every item is seen when item `i` is drawn
/// with probability `weights[i]`: `∫₀^∞ (1 − Πᵢ(1 − e^{−wᵢx})) dx`.
pub fn expected_collection_time(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::domain("no weights"));
    }
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(Error::domain("every weight must be positive"));
    }
    let total: f64 = weights.iter().sum();
    if total > 1.0 + 1e-9 {
        return Err(Error::domain("weights sum to more than 1"));
    }
    let n = weights.len() as f64;
    let w_min = weights.iter().copied().fold(f64::INFINITY, f64::min);
    // Tail bound n·e^{−w_min X}/w_min = 1e-9.
    let upper = (n / (w_min * 1e-9)).ln() / w_min;
    let integrand = |x: f64| -> f64 {
        let log_prod: f64 = weights.iter().map(|&w| (-(-w * x).exp()).ln_1p()).sum();
        -log_prod.exp_m1()
    };
    let body = adaptive_gk15(&integrand, 0.0, upper, 1e-12, 60)?;
    let tail: f64 = weights.iter().map(|&w| (-w * upper).exp() / w).sum();
    Ok(body + tail)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Kronrod estimate and its distance from the embedded Gauss rule.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adaptive_gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> Result<f64> {
    let (value, err) = gk15(f, a, b);
    if err <= tol.max(1e-15 * value.abs()) {
        return Ok(value);
    }
    if depth == 0 {
        return Err(Error::numeric("quadrature failed to converge"));
    }
    let mid = 0.5 * (a + b);
    Ok(adaptive_gk15(f, a, mid, 0.5 * tol, depth - 1)? + adaptive_gk15(f, mid, b, 0.5 * tol, depth - 1)?)
}
