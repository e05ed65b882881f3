//! Small special functions shared by the optics and phase modules.

/// Below this magnitude `sinc` switches to its Taylor polynomial.
const SINC_TAYLOR_BELOW: f64 = 1e-8;

/// Unnormalized cardinal sine, `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_TAYLOR_BELOW {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `sinc(x) - sinc(y)` without cancellation when `x` and `y` are close.
pub fn sinc_difference(x: f64, y: f64) -> f64 {
    sinc_increment(y, x - y)
}

/// `sinc(y + d) - sinc(y)` for an exactly known offset `d`.
pub fn sinc_increment(y: f64, d: f64) -> f64 {
    if d == 0.0 {
        return 0.0;
    }
    let x = y + d;
    let scale = x.abs().max(y.abs());
    if d.abs() >= 0.25 * scale {
        return sinc(x) - sinc(y);
    }
    if scale < 1.0 {
        // sinc(x) = sum_n (-1)^n x^(2n) / (2n+1)!, and
        // x^(2n) - y^(2n) = (x - y) * sum_j x^j y^(2n-1-j).
        let mut total = 0.0;
        let mut factorial = 1.0; // (2n+1)!
        for n in 1..12 {
            factorial *= (2 * n) as f64 * (2 * n + 1) as f64;
            let power = 2 * n;
            let mut sum = 0.0;
            for j in 0..power {
                sum += x.powi(j) * y.powi(power - 1 - j);
            }
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            total += sign * sum / factorial;
        }
        return d * total;
    }
    // sinc(x) - sinc(y) = (x - y) [y cos(m) sinc(d/2) - sin y] / (x y), m = (x + y)/2
    let m = y + 0.5 * d;
    d * (y * m.cos() * sinc(0.5 * d) - y.sin()) / (x * y)
}

/// `sin(k z / 2) / k`, continuous through `k = 0` where it equals `z / 2`.
pub fn half_sine_over_wavenumber(k: f64, z: f64) -> f64 {
    0.5 * z * sinc(0.5 * k * z)
}

/// Relative deviation `|a - b| / max(|b|, floor)`.
pub fn relative_deviation(a: f64, b: f64, floor: f64) -> f64 {
    let diff = (a - b).abs();
    if diff == 0.0 {
        return 0.0;
    }
    diff / b.abs().max(floor)
}
