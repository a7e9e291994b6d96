//! Composite quadrature on uniform samples.

use num_complex::Complex64 as C64;

/// Composite Simpson rule. Odd interval counts close with the 3/8 rule on
/// the last three intervals; two samples fall back to the trapezoid.
pub fn simpson(h: f64, f: &[f64]) -> f64 {
    let n = f.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (f[0] + f[1]),
        3 => h / 3.0 * (f[0] + 4.0 * f[1] + f[2]),
        _ if n % 2 == 1 => simpson_odd(h, f),
        _ => {
            let m = n - 3;
            simpson_odd(h, &f[..m]) + 3.0 * h / 8.0 * (f[m - 1] + 3.0 * f[m] + 3.0 * f[m + 1] + f[m + 2])
        }
    }
}

fn simpson_odd(h: f64, f: &[f64]) -> f64 {
    let n = f.len();
    if n == 1 {
        return 0.0;
    }
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, &v) in f.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f[0] + f[n - 1] + 4.0 * odd + 2.0 * even)
}

pub fn simpson_complex(h: f64, f: &[C64]) -> C64 {
    let re: Vec<f64> = f.iter().map(|z| z.re).collect();
    let im: Vec<f64> = f.iter().map(|z| z.im).collect();
    C64::new(simpson(h, &re), simpson(h, &im))
}

/// Running integral `F(x_i) = ∫_{x_origin}^{x_i} f`. Interior intervals use
/// the four-point weights (-1, 13, 13, -1)/24, the two end intervals the
/// three-point ones (5, 8, -1)/12.
pub fn cumulative(h: f64, f: &[C64], origin: usize) -> Vec<C64> {
    let n = f.len();
    let mut out = vec![C64::new(0.0, 0.0); n];
    if n < 3 {
        if n == 2 {
            let step = 0.5 * h * (f[0] + f[1]);
            if origin == 0 {
                out[1] = step;
            } else {
                out[0] = -step;
            }
        }
        return out;
    }
    let interval = |i: usize| -> C64 {
        // ∫ over [x_i, x_{i+1}]
        if i >= 1 && i + 2 < n {
            h / 24.0 * (-f[i - 1] + 13.0 * f[i] + 13.0 * f[i + 1] - f[i + 2])
        } else if i + 2 < n {
            h / 12.0 * (5.0 * f[i] + 8.0 * f[i + 1] - f[i + 2])
        } else {
            h / 12.0 * (-f[i - 1] + 8.0 * f[i] + 5.0 * f[i + 1])
        }
    };
    for i in origin..n - 1 {
        out[i + 1] = out[i] + interval(i);
    }
    for i in (0..origin).rev() {
        out[i] = out[i + 1] - interval(i);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> (f64, Vec<f64>) {
        let h = (b - a) / (n - 1) as f64;
        (h, (0..n).map(|i| f(a + i as f64 * h)).collect())
    }

    #[test]
    fn simpson_exact_on_cubics() {
        for n in [3, 4, 5, 8, 11] {
            let (h, f) = samples(n, -1.0, 2.0, |x| x * x * x - 2.0 * x + 1.0);
            assert!((simpson(h, &f) - 3.75).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn simpson_converges_on_sin() {
        let (h, f) = samples(1000, 0.0, std::f64::consts::PI, f64::sin);
        assert!((simpson(h, &f) - 2.0).abs() < 1e-11);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let n = 2001;
        let (h, f) = samples(n, -3.0, 3.0, f64::cos);
        let fc: Vec<C64> = f.iter().map(|&v| C64::new(v, 0.0)).collect();
        let big_f = cumulative(h, &fc, n / 2);
        for (i, v) in big_f.iter().enumerate() {
            let x = -3.0 + i as f64 * h;
            assert!((v.re - x.sin()).abs() < 1e-9);
        }
    }
}
