//! Adaptive Gauss–Kronrod quadrature in one and two dimensions.

#![allow(clippy::excessive_precision)]

// Kronrod 15-point abscissae and weights on [-1, 1]; the embedded 7-point
// Gauss rule uses the odd-indexed nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
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
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Integrate `f` over `[a, b]` by adaptive bisection until the summed
/// Kronrod–Gauss error estimate drops below `abs_tol`.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, abs_tol: f64) -> f64 {
    let (v, e) = gk15(&mut f, a, b);
    // (lo, hi, value, error)
    let mut pieces = vec![(a, b, v, e)];
    let mut err_total = e;
    let mut splits = 0;
    while err_total > abs_tol && splits < 20_000 {
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .max_by(|a, b| a.1 .3.total_cmp(&b.1 .3))
            .expect("non-empty");
        let (lo, hi, v, e) = pieces.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval exhausted at machine resolution
            pieces.push((lo, hi, v, 0.0));
            err_total -= e;
            continue;
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        err_total += e1 + e2 - e;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
        splits += 1;
    }
    pieces.iter().map(|p| p.2).sum()
}

/// Integrate `f(x, y)` over a rectangle by nested adaptive quadrature; the
/// breakpoints split the outer range before adaptation starts.
pub fn integrate_2d<F: Fn(f64, f64) -> f64>(
    f: F,
    x_breaks: &[f64],
    y_range: (f64, f64),
    abs_tol: f64,
) -> f64 {
    let span_x = x_breaks.last().unwrap() - x_breaks[0];
    let inner_tol = abs_tol / span_x.max(1.0) * 0.1;
    x_breaks
        .windows(2)
        .map(|w| {
            integrate(
                |x| integrate(|y| f(x, y), y_range.0, y_range.1, inner_tol),
                w[0],
                w[1],
                abs_tol / (x_breaks.len() - 1) as f64,
            )
        })
        .sum()
}
