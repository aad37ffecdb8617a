//! Independent numeric oracles used by the integration tests: adaptive
//! quadrature, the noncentral radial collision integral, and a scaled Bessel
//! I0. Everything here is implemented without touching the library's own
//! special functions so the two sides can disagree.

#![allow(dead_code)]

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        ((b - a) / 6.0 * (fa + 4.0 * fm + fb), m, fm)
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let (left, lm, flm) = simpson(f, a, fa, m, fm);
        let (right, rm, frm) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, fa, m, fm, left, lm, flm, 0.5 * tol, depth - 1)
                + recurse(f, m, fm, b, fb, right, rm, frm, 0.5 * tol, depth - 1)
        }
    }
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let (whole, m, fm) = simpson(&f, a, fa, b, fb);
    recurse(&f, a, fa, b, fb, whole, m, fm, tol, 50)
}

/// Scaled modified Bessel function of the first kind: e^(−x)·I0(x), x ≥ 0.
pub fn i0_scaled(x: f64) -> f64 {
    assert!(x >= 0.0);
    if x < 15.0 {
        // power series for I0, scaled afterwards
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let q = 0.25 * x * x;
        for k in 1..200 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term < sum * 1e-17 {
                break;
            }
        }
        sum * (-x).exp()
    } else {
        // asymptotic expansion of e^(−x) I0(x) ~ (2πx)^(−1/2) Σ a_k / x^k
        let mut sum = 1.0f64;
        let mut term = 1.0f64;
        for k in 1..12 {
            let kk = (2 * k - 1) as f64;
            term *= kk * kk / (8.0 * k as f64 * x);
            sum += term;
        }
        sum / (2.0 * std::f64::consts::PI * x).sqrt()
    }
}

/// P(‖w‖ ≤ r_contact) for w ~ N(mu, sigma²·I_n), n ∈ {2, 3}, computed by
/// quadrature of the noncentral radial density.
pub fn radial_collision_probability(mu_norm: f64, sigma: f64, r_contact: f64, n: usize) -> f64 {
    assert!(sigma > 0.0 && r_contact > 0.0);
    let s2 = sigma * sigma;
    match n {
        2 => integrate(
            |r| {
                if r <= 0.0 {
                    return 0.0;
                }
                let z = r * mu_norm / s2;
                (r / s2) * (-(r - mu_norm).powi(2) / (2.0 * s2)).exp() * i0_scaled(z)
            },
            0.0,
            r_contact,
            1e-12,
        ),
        3 => {
            if mu_norm < 1e-12 {
                // central case: radial chi distribution with 3 dof
                return integrate(
                    |r| {
                        let c = (2.0 / std::f64::consts::PI).sqrt() / (s2 * sigma);
                        c * r * r * (-r * r / (2.0 * s2)).exp()
                    },
                    0.0,
                    r_contact,
                    1e-12,
                );
            }
            let c = 1.0 / (mu_norm * sigma * (2.0 * std::f64::consts::PI).sqrt());
            integrate(
                |r| {
                    let a = (-(r - mu_norm).powi(2) / (2.0 * s2)).exp();
                    let b = (-(r + mu_norm).powi(2) / (2.0 * s2)).exp();
                    c * r * (a - b)
                },
                0.0,
                r_contact,
                1e-12,
            )
        }
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Chi-squared density with `dof` degrees of freedom (2 or 3 only).
pub fn chi2_pdf_oracle(x: f64, dof: usize) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    match dof {
        2 => 0.5 * (-0.5 * x).exp(),
        3 => x.sqrt() * (-0.5 * x).exp() / (2.0 * std::f64::consts::PI).sqrt(),
        _ => panic!("unsupported dof {dof}"),
    }
}
