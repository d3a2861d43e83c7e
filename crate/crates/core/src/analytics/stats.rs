//! Pearson and Spearman correlation with two-sided p-values.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

/// Largest sample for which the Spearman p-value is computed by exhaustive
/// permutation.
pub const EXACT_PERMUTATION_MAX_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    ExactPermutation,
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub coefficient: f64,
    pub p_value: f64,
    pub n: usize,
    pub method: PValueMethod,
}

fn check_inputs(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::Argument(format!(
            "samples differ in length ({} vs {})",
            xs.len(),
            ys.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::Argument(format!(
            "correlation needs at least 3 pairs, got {}",
            xs.len()
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::Argument("samples contain non-finite values".into()));
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Sample Pearson coefficient; errors when either side has zero variance.
fn coefficient(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let (mx, my) = (mean(xs), mean(ys));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Undefined(
            "correlation is undefined when a sample is constant".into(),
        ));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Two-sided tail of Student's t with `n - 2` degrees of freedom for the
/// statistic `r * sqrt((n - 2) / (1 - r^2))`.
fn t_test_p_value(r: f64, n: usize) -> f64 {
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// 1-based ranks with ties sharing the mean of the positions they occupy.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their average
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    ranks
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<Correlation> {
    check_inputs(xs, ys)?;
    let r = coefficient(xs, ys)?;
    Ok(Correlation {
        coefficient: r,
        p_value: t_test_p_value(r, xs.len()),
        n: xs.len(),
        method: PValueMethod::StudentT,
    })
}

/// Pearson correlation of mid-ranks. The p-value is exact (all `n!` pairings)
/// up to [`EXACT_PERMUTATION_MAX_N`] pairs, t-approximated beyond.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<Correlation> {
    check_inputs(xs, ys)?;
    let (rx, ry) = (mid_ranks(xs), mid_ranks(ys));
    let rho = coefficient(&rx, &ry)?;
    let n = xs.len();
    let (p_value, method) = if n <= EXACT_PERMUTATION_MAX_N {
        (permutation_p_value(&rx, &ry, rho), PValueMethod::ExactPermutation)
    } else {
        (t_test_p_value(rho, n), PValueMethod::StudentT)
    };
    Ok(Correlation {
        coefficient: rho,
        p_value,
        n,
        method,
    })
}

/// Share of the `n!` re-pairings of `ry` against `rx` whose |rho| is at least
/// the observed |rho|.
fn permutation_p_value(rx: &[f64], ry: &[f64], observed: f64) -> f64 {
    let n = rx.len();
    let (mx, my) = (mean(rx), mean(ry));
    let cx: Vec<f64> = rx.iter().map(|v| v - mx).collect();
    let cy: Vec<f64> = ry.iter().map(|v| v - my).collect();
    let norm = (cx.iter().map(|v| v * v).sum::<f64>() * cy.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let threshold = observed.abs() - 1e-12;

    let mut perm: Vec<usize> = (0..n).collect();
    let (mut hits, mut total) = (0u64, 0u64);
    loop {
        let s: f64 = cx.iter().zip(&perm).map(|(x, &j)| x * cy[j]).sum();
        total += 1;
        if (s / norm).abs() >= threshold {
            hits += 1;
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    hits as f64 / total as f64
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = p.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = p.iter().rposition(|&v| v > p[i]).expect("pivot has a successor");
    p.swap(i, j);
    p[i + 1..].reverse();
    true
}
