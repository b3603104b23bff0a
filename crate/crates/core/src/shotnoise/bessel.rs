//! Integer-order Bessel functions of the first kind for real arguments.
//!
//! All orders `J_0..J_n` are produced together by Miller's downward
//! recurrence `J_{k-1} = (2k/z) J_k - J_{k+1}`, normalized with
//! `J_0 + 2 sum_k J_{2k} = 1`. The downward direction follows the minimal
//! solution, so it is stable for every order, including `n < z`.

use crate::error::{Error, Result};

/// Largest order accepted by [`bessel_j`].
pub const MAX_ORDER: i64 = 10_000;
/// Largest argument accepted by [`bessel_j`].
pub const MAX_ARGUMENT: f64 = 1_000.0;

const RESCALE_ABOVE: f64 = 1e250;

/// `J_n(z)` for `|n| <= 10^4` and `0 <= z <= 10^3`.
pub fn bessel_j(n: i64, z: f64) -> Result<f64> {
    if n.abs() > MAX_ORDER {
        return Err(Error::invalid("n", format!("|{n}| exceeds {MAX_ORDER}")));
    }
    if !(0.0..=MAX_ARGUMENT).contains(&z) {
        return Err(Error::invalid("z", format!("{z} is outside [0, {MAX_ARGUMENT}]")));
    }
    let order = n.unsigned_abs() as usize;
    let value = bessel_j_orders(order, z)[order];
    Ok(if n < 0 && order % 2 == 1 { -value } else { value })
}

/// `[J_0(z), J_1(z), ..., J_{n_max}(z)]` for `z >= 0`.
///
/// No range limits beyond finiteness; orders far above `z` underflow to 0.
pub fn bessel_j_orders(n_max: usize, z: f64) -> Vec<f64> {
    debug_assert!(z >= 0.0 && z.is_finite());
    let mut out = vec![0.0; n_max + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return out;
    }

    let reach = (n_max as f64).max(z);
    let mut start = (reach + 40.0 + 15.0 * reach.cbrt()).ceil() as usize;
    start += start % 2;

    let two_over_z = 2.0 / z;
    let mut above = 0.0; // J_{k+1}
    let mut here = 1e-300; // J_k, arbitrary scale
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k <= n_max {
            out[k] = here;
        }
        if k % 2 == 0 {
            norm += 2.0 * here;
        }
        let below = k as f64 * two_over_z * here - above;
        above = here;
        here = below;
        if here.abs() > RESCALE_ABOVE {
            let s = 1.0 / RESCALE_ABOVE;
            here *= s;
            above *= s;
            norm *= s;
            for v in out.iter_mut().skip(k.saturating_sub(1)) {
                *v *= s;
            }
        }
    }
    out[0] = here;
    norm += here;
    for v in &mut out {
        *v /= norm;
    }
    out
}
