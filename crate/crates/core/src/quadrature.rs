//! Adaptive Gauss–Legendre quadrature on a finite interval.
//!
//! Each panel is integrated with a 15-point rule; the panel with the
//! largest error estimate is bisected until the summed estimate drops
//! below the requested absolute tolerance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use crate::error::{McError, Result};

const ORDER: usize = 15;

/// Nodes and weights of the Gauss–Legendre rule on `[-1, 1]`.
fn rule() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static RULE: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    RULE.get_or_init(gauss_legendre::<ORDER>)
}

/// Newton iteration on the Legendre recurrence.
pub(crate) fn gauss_legendre<const N: usize>() -> ([f64; N], [f64; N]) {
    let n = N;
    let mut nodes = [0.0; N];
    let mut weights = [0.0; N];
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn panel<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn split<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> [Panel; 2] {
    let whole = panel(f, a, b);
    let mid = 0.5 * (a + b);
    let (left, right) = (panel(f, a, mid), panel(f, mid, b));
    // the refined pair inherits the discrepancy against the coarse estimate
    let error = 0.5 * (whole - left - right).abs();
    [
        Panel {
            a,
            b: mid,
            value: left,
            error,
        },
        Panel {
            a: mid,
            b,
            value: right,
            error,
        },
    ]
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` using at most
/// `max_panels` panels. Breakpoints where `f` has kinks should be passed
/// through `breakpoints` so that they become panel boundaries.
pub fn integrate<F>(f: F, a: f64, b: f64, breakpoints: &[f64], tol: f64, max_panels: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if b <= a {
        return Ok(0.0);
    }
    let mut cuts = vec![a];
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    for w in cuts.windows(2) {
        for p in split(&f, w[0], w[1]) {
            heap.push(p);
        }
    }
    let mut total_error: f64 = heap.iter().map(|p| p.error).sum();
    while total_error > tol {
        if heap.len() >= max_panels {
            return Err(McError::QuadratureFailure {
                a,
                b,
                tolerance: tol,
                panels: max_panels,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let children = split(&f, worst.a, worst.b);
        total_error += children.iter().map(|c| c.error).sum::<f64>() - worst.error;
        for c in children {
            heap.push(c);
        }
        if heap.len() % 64 == 0 {
            // resum to keep the running total free of drift
            total_error = heap.iter().map(|p| p.error).sum();
        }
    }
    Ok(heap.iter().map(|p| p.value).sum())
}
