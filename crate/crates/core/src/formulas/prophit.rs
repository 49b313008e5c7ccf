use crate::error::{Error, Result};

/// `min(1, (4 E|Y0|^2 / r^2) exp(-4 (a - d/(2 r^2)) t))`: survival bound for
/// the time to reach a packing configuration.
pub fn prophit_bound(t: f64, a: f64, d: usize, r: f64, second_moment_init: f64) -> Result<f64> {
    let excess = a - d as f64 / (2.0 * r * r);
    if !(excess > 0.0) {
        return Err(Error::Domain(format!(
            "bound needs a > d/(2 r^2) = {}, got a = {a}",
            d as f64 / (2.0 * r * r)
        )));
    }
    if !(t >= 0.0) || !(second_moment_init >= 0.0) {
        return Err(Error::Domain("need t >= 0 and E|Y0|^2 >= 0".into()));
    }
    Ok((4.0 * second_moment_init / (r * r) * (-4.0 * excess * t).exp()).min(1.0))
}
