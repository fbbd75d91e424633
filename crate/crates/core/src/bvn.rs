//! Standard bivariate normal distribution function (Genz's BVND method).

use std::f64::consts::{PI, SQRT_2, TAU};
use std::sync::OnceLock;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::quadrature::gauss_legendre;

type Rule<const N: usize> = ([f64; N], [f64; N]);

fn rules() -> &'static (Rule<6>, Rule<12>, Rule<20>) {
    static RULES: OnceLock<(Rule<6>, Rule<12>, Rule<20>)> = OnceLock::new();
    RULES.get_or_init(|| (gauss_legendre::<6>(), gauss_legendre::<12>(), gauss_legendre::<20>()))
}

/// Standard normal distribution function.
pub fn phi(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal quantile: a statrs starting value polished by Newton
/// steps against [`phi`].
pub fn phi_inv(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let mut x = Normal::standard().inverse_cdf(p);
    for _ in 0..2 {
        let density = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
        if density == 0.0 {
            break;
        }
        x -= (phi(x) - p) / density;
    }
    x
}

fn rule_for(r: f64) -> (&'static [f64], &'static [f64]) {
    let (a, b, c) = rules();
    if r.abs() < 0.3 {
        (&a.0, &a.1)
    } else if r.abs() < 0.75 {
        (&b.0, &b.1)
    } else {
        (&c.0, &c.1)
    }
}

/// `P(X > h, Y > k)` for standard normals with correlation `r`.
fn upper_orthant(h: f64, k: f64, r: f64) -> f64 {
    let (nodes, weights) = rule_for(r);
    let mut hk = h * k;
    if r.abs() < 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = r.asin();
        let sum: f64 = nodes
            .iter()
            .zip(weights)
            .map(|(x, w)| {
                let sn = (asr * (x + 1.0) / 2.0).sin();
                w * ((sn * hk - hs) / (1.0 - sn * sn)).exp()
            })
            .sum();
        return sum * asr / (2.0 * TAU) + phi(-h) * phi(-k);
    }
    let mut k = k;
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    let mut bvn = 0.0;
    if r.abs() < 1.0 {
        let as_ = (1.0 - r) * (1.0 + r);
        let mut a = as_.sqrt();
        let bs = (h - k).powi(2);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        bvn = a
            * (-(bs / as_ + hk) / 2.0).exp()
            * (1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0);
        if hk > -160.0 {
            let b = bs.sqrt();
            bvn -= (-hk / 2.0).exp() * TAU.sqrt() * phi(-b / a) * b * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for (x, w) in nodes.iter().zip(weights) {
            let xs = (a * (x + 1.0)).powi(2);
            let rs = (1.0 - xs).sqrt();
            let asr = -(bs / xs + hk) / 2.0;
            if asr > -100.0 {
                bvn += a
                    * w
                    * asr.exp()
                    * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs - (1.0 + c * xs * (1.0 + d * xs)));
            }
        }
        bvn = -bvn / TAU;
    }
    if r > 0.0 {
        bvn + phi(-h.max(k))
    } else {
        let mut v = -bvn;
        if k > h {
            v += if h < 0.0 { phi(k) - phi(h) } else { phi(-h) - phi(-k) };
        }
        v
    }
}

/// `P(X ≤ x, Y ≤ y)` for standard normals with correlation `rho`;
/// infinite arguments are allowed.
pub fn bvn_cdf(x: f64, y: f64, rho: f64) -> f64 {
    if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return phi(y);
    }
    if y == f64::INFINITY {
        return phi(x);
    }
    if rho >= 1.0 {
        return phi(x.min(y));
    }
    if rho <= -1.0 {
        return (phi(x) - phi(-y)).max(0.0);
    }
    upper_orthant(-x, -y, rho).clamp(0.0, 1.0)
}

/// Probability of the rectangle `(x0, x1] × (y0, y1]`.
pub fn bvn_rect(x0: f64, x1: f64, y0: f64, y1: f64, rho: f64) -> f64 {
    let v = bvn_cdf(x1, y1, rho) - bvn_cdf(x0, y1, rho) - bvn_cdf(x1, y0, rho) + bvn_cdf(x0, y0, rho);
    v.max(0.0)
}
