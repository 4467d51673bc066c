//! Tolerance keys: values closer than 1e-9 share a key.

use num_complex::Complex64;

pub(crate) const TOL: f64 = 1e-9;

pub(crate) fn key(x: f64) -> i64 {
    (x / TOL).round() as i64
}

pub(crate) fn ckey(z: Complex64) -> (i64, i64) {
    (key(z.re), key(z.im))
}

/// Angle in `[0, 2π)`, zero for the origin.
pub(crate) fn angle(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        return 0.0;
    }
    let a = z.im.atan2(z.re);
    if a < 0.0 {
        a + 2.0 * core::f64::consts::PI
    } else {
        a
    }
}

pub(crate) fn angle_key(z: Complex64) -> i64 {
    let k = key(angle(z));
    // 2π and 0 are the same direction
    if k == key(2.0 * core::f64::consts::PI) {
        0
    } else {
        k
    }
}
