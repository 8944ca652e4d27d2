//! Adaptive Gauss–Kronrod (7, 15) quadrature.

use num_complex::Complex64 as C64;

const XK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XK[1], XK[3], XK[5], XK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 60;

fn gk15<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> (C64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kron = C64::new(0.0, 0.0);
    let mut gauss = C64::new(0.0, 0.0);
    for k in 0..8 {
        let x = XK[k];
        let fx = if x == 0.0 { f(c) } else { f(c - h * x) + f(c + h * x) };
        kron += fx * WK[k];
        if k % 2 == 1 {
            gauss += fx * WG[k / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm())
}

fn adapt<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> C64 {
    let (val, err) = gk15(f, a, b);
    if err <= tol || depth >= MAX_DEPTH {
        return val;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, 0.5 * tol, depth + 1) + adapt(f, m, b, 0.5 * tol, depth + 1)
}

/// `∫_a^b f` to absolute tolerance `tol`, for complex-valued `f`.
pub fn integrate_complex<F: Fn(f64) -> C64>(f: F, a: f64, b: f64, tol: f64) -> C64 {
    if a == b {
        return C64::new(0.0, 0.0);
    }
    adapt(&f, a, b, tol, 0)
}

/// `∫_a^b f` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    integrate_complex(|x| C64::new(f(x), 0.0), a, b, tol).re
}
