//! Root Green's functions of truncated trees with boundary weight `Δ`, and
//! the `1/N` corrections coming from the trivial eigenvalue.

use num_complex::Complex64 as C64;

use super::{m_d, m_sc};

/// Root Green's function of the depth-`ℓ` truncated `(d-1)`-ary tree whose
/// leaves carry weight `Δ`: `f^{ℓ+1}(Δ)` with `f(w) = 1/(-z - w)`.
pub fn y_ell(delta: C64, z: impl Into<C64>, ell: usize) -> C64 {
    let z = z.into();
    let mut w = delta;
    for _ in 0..=ell {
        w = 1.0 / (-z - w);
    }
    w
}

/// Root Green's function of the depth-`ℓ` truncated `d`-regular tree whose
/// leaves carry weight `Δ`: `1/(-z - d/(d-1)·f^ℓ(Δ))`.
pub fn x_ell(delta: C64, z: impl Into<C64>, ell: usize, d: usize) -> C64 {
    let z = z.into();
    let inner = if ell == 0 { delta } else { y_ell(delta, z, ell - 1) };
    let dd = d as f64;
    1.0 / (-z - dd / (dd - 1.0) * inner)
}

/// Common factor `(1 + m/√(d-1))² / (N(d/√(d-1) - z))`.
fn trivial_factor(z: C64, m: C64, n: usize, d: usize) -> C64 {
    let s = ((d - 1) as f64).sqrt();
    let t = 1.0 + m / s;
    t * t / (n as f64 * (d as f64 / s - z))
}

/// Deterministic shift of `Q - Y_ℓ(Q)` from the trivial eigenvalue.
pub fn delta_q(z: impl Into<C64>, ell: usize, n: usize, d: usize) -> C64 {
    let z = z.into();
    let m = m_sc(z);
    let k = ((d - 1) as f64).powi(ell as i32 + 1) - 1.0;
    k * m.powu(2 * ell as u32 + 2) * trivial_factor(z, m, n, d)
}

/// Deterministic shift of `m_N - X_ℓ(Q)` from the trivial eigenvalue.
pub fn delta_m(z: impl Into<C64>, ell: usize, n: usize, d: usize) -> C64 {
    let z = z.into();
    let m = m_sc(z);
    let md = m_d(z, d);
    let dd = d as f64;
    let k = dd / (dd - 1.0) * (dd * (dd - 1.0).powi(ell as i32) - 1.0);
    k * md * md * m.powu(2 * ell as u32) * trivial_factor(z, m, n, d)
}
