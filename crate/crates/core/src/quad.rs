//! Quadrature rules and oscillatory moments shared by the solvers.

use crate::linalg::C64;

/// Composite trapezoid weights for `n` nodes with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n == 1 {
        w[0] = 0.0;
        return w;
    }
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

/// Composite Simpson weights for `n` nodes with spacing `h`.
///
/// An odd number of intervals is handled with a Simpson 3/8 panel at the right end.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    if n < 3 {
        return trapezoid_weights(n, h);
    }
    let intervals = n - 1;
    let simpson_intervals = if intervals.is_multiple_of(2) { intervals } else { intervals - 3 };
    let mut i = 0;
    while i < simpson_intervals {
        w[i] += h / 3.0;
        w[i + 1] += 4.0 * h / 3.0;
        w[i + 2] += h / 3.0;
        i += 2;
    }
    if simpson_intervals < intervals {
        let s = simpson_intervals;
        w[s] += 3.0 * h / 8.0;
        w[s + 1] += 9.0 * h / 8.0;
        w[s + 2] += 9.0 * h / 8.0;
        w[s + 3] += 3.0 * h / 8.0;
    }
    w
}

/// Midpoint weights on (0, ∞) for nodes `(j + 1/2) h`, with an Euler-Maclaurin
/// correction at the origin using a quadratic fit of the first three samples.
///
/// The resulting rule is fourth order for integrands that are smooth up to 0,
/// whether or not they are even.
pub fn half_line_midpoint_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    if n >= 3 {
        w[0] += h * 2.0 / 24.0;
        w[1] -= h * 3.0 / 24.0;
        w[2] += h * 1.0 / 24.0;
    }
    w
}

/// Cosine taper over the outer `fraction` of `[-kmax, kmax]`.
pub fn cosine_taper(k: f64, kmax: f64, fraction: f64) -> f64 {
    let a = k.abs();
    let start = (1.0 - fraction) * kmax;
    if a <= start {
        1.0
    } else if a >= kmax {
        0.0
    } else {
        0.5 * (1.0 + (std::f64::consts::PI * (a - start) / (kmax - start)).cos())
    }
}

/// Moments `mu_j = ∫_0^1 u^j e^{iθu} du` for j = 0..=3.
pub fn exp_moments(theta: f64) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    if theta.abs() < 1.0 {
        let z = C64::new(0.0, theta);
        for (j, o) in out.iter_mut().enumerate() {
            let mut term = C64::new(1.0, 0.0);
            let mut sum = C64::new(0.0, 0.0);
            for m in 0..40 {
                if m > 0 {
                    term = term * z / m as f64;
                }
                let add = term / (j + m + 1) as f64;
                sum += add;
                if add.norm() < 1e-18 {
                    break;
                }
            }
            *o = sum;
        }
    } else {
        let iz = C64::new(0.0, theta);
        let e = iz.exp();
        out[0] = (e - 1.0) / iz;
        for j in 1..4 {
            out[j] = (e - out[j - 1] * j as f64) / iz;
        }
    }
    out
}

/// Moments `nu_j = ∫_0^1 u^j (e^{iθu} - 1)/(iθ) du` for j = 0..=3; at θ = 0 the
/// integrand is u^{j+1}.
pub fn dk_moments(theta: f64) -> [C64; 4] {
    let mut out = [C64::new(0.0, 0.0); 4];
    if theta.abs() < 1.0 {
        let z = C64::new(0.0, theta);
        for (j, o) in out.iter_mut().enumerate() {
            let mut term = C64::new(1.0, 0.0);
            let mut sum = C64::new(0.0, 0.0);
            for m in 1..41 {
                if m > 1 {
                    term = term * z / m as f64;
                }
                let add = term / (j + m + 1) as f64;
                sum += add;
                if add.norm() < 1e-18 {
                    break;
                }
            }
            *o = sum;
        }
    } else {
        let mu = exp_moments(theta);
        let iz = C64::new(0.0, theta);
        for j in 0..4 {
            out[j] = (mu[j] - 1.0 / (j + 1) as f64) / iz;
        }
    }
    out
}

/// `(e^z - 1)/z`, stable near 0.
pub fn phi1(z: C64) -> C64 {
    if z.norm() < 1e-3 {
        C64::new(1.0, 0.0) + z / 2.0 + z * z / 6.0 + z * z * z / 24.0
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `(e^z - 1 - z)/z²`, stable near 0.
pub fn phi2(z: C64) -> C64 {
    if z.norm() < 0.5 {
        let mut term = C64::new(1.0, 0.0);
        let mut sum = C64::new(0.0, 0.0);
        for m in 0..30 {
            if m > 0 {
                term *= z;
            }
            let denom: f64 = (1..=(m + 2)).map(|v| v as f64).product();
            sum += term / denom;
        }
        sum
    } else {
        (z.exp() - 1.0 - z) / (z * z)
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            let pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 {
                let mut p1 = 1.0;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
                }
                let pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
                x[i] = z;
                w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
                break;
            }
        }
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_cubics_exactly() {
        for n in [5usize, 6, 9, 10] {
            let h = 1.0 / (n - 1) as f64;
            let w = simpson_weights(n, h);
            let s: f64 = (0..n).map(|i| w[i] * (i as f64 * h).powi(3)).sum();
            assert!((s - 0.25).abs() < 1e-13, "n={n} s={s}");
        }
    }

    #[test]
    fn corrected_midpoint_handles_odd_integrand() {
        let h = 0.01;
        let n = 4000;
        let w = half_line_midpoint_weights(n, h);
        let s: f64 = (0..n)
            .map(|j| {
                let k = (j as f64 + 0.5) * h;
                w[j] * k.sin() * (-k * k).exp()
            })
            .sum();
        // ∫_0^∞ sin(k) e^{-k²} dk = D(1/2) Dawson-type value
        let exact = 0.424_436_383_502_022_3;
        assert!((s - exact).abs() < 1e-8, "{s}");
    }

    #[test]
    fn moments_match_between_branches() {
        let a = exp_moments(0.999_999);
        let b = exp_moments(1.000_001);
        for j in 0..4 {
            assert!((a[j] - b[j]).norm() < 1e-5);
        }
        let a = dk_moments(0.999_999);
        let b = dk_moments(1.000_001);
        for j in 0..4 {
            assert!((a[j] - b[j]).norm() < 1e-5);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-13);
    }
}
