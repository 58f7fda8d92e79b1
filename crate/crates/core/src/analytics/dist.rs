//! Binomial and Poisson probabilities, computed exactly in log space and
//! summed from the smaller tail.

use crate::error::{invalid, Result};
use crate::simkit::KahanSum;

fn check_prob(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return invalid(format!("probability {p} outside [0, 1]"));
    }
    Ok(())
}

/// ln C(n, k) by summing logs of the shorter factor run.
pub fn ln_choose(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    let mut s = KahanSum::default();
    for i in 0..k {
        s.add(((n - i) as f64).ln() - ((i + 1) as f64).ln());
    }
    s.value()
}

/// Exact binomial coefficient for moderate arguments.
pub fn choose(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn binomial_pmf(n: u64, p: f64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k == n { 1.0 } else { 0.0 };
    }
    (ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
}

/// P[X ≥ k] for X ~ Binomial(n, p).
pub fn binomial_sf(n: u64, p: f64, k: u64) -> Result<f64> {
    check_prob(p)?;
    if k == 0 {
        return Ok(1.0);
    }
    if k > n {
        return Ok(0.0);
    }
    let mean = n as f64 * p;
    let mut s = KahanSum::default();
    if (k as f64) > mean {
        for j in k..=n {
            let t = binomial_pmf(n, p, j);
            s.add(t);
            if t < 1e-300 && j as f64 > mean {
                break;
            }
        }
        Ok(s.value().clamp(0.0, 1.0))
    } else {
        for j in 0..k {
            s.add(binomial_pmf(n, p, j));
        }
        Ok((1.0 - s.value()).clamp(0.0, 1.0))
    }
}

/// P[X = k] for X ~ Poisson(λ).
pub fn poisson_pmf(lambda: f64, k: u64) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let mut lf = KahanSum::default();
    for i in 1..=k {
        lf.add((i as f64).ln());
    }
    (k as f64 * lambda.ln() - lambda - lf.value()).exp()
}

/// P[X ≥ k] for X ~ Poisson(λ).
pub fn poisson_sf(lambda: f64, k: u64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return invalid(format!("Poisson mean {lambda} must be finite and non-negative"));
    }
    if k == 0 {
        return Ok(1.0);
    }
    let mut s = KahanSum::default();
    if (k as f64) > lambda {
        // upper tail: terms decay geometrically past the mean
        let mut t = poisson_pmf(lambda, k);
        let mut j = k;
        while t > 0.0 {
            s.add(t);
            j += 1;
            t *= lambda / j as f64;
            if t < s.value() * 1e-18 {
                break;
            }
        }
        Ok(s.value().clamp(0.0, 1.0))
    } else {
        let mut t = (-lambda).exp();
        for j in 0..k {
            s.add(t);
            t *= lambda / (j + 1) as f64;
        }
        Ok((1.0 - s.value()).clamp(0.0, 1.0))
    }
}

/// Largest gap between binomial and Poisson survival functions over all
/// thresholds `1..=kmax`.
pub fn binomial_poisson_tail_gap(n: u64, p: f64, kmax: u64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 1..=kmax {
        worst = worst.max((binomial_sf(n, p, k)? - poisson_sf(n as f64 * p, k)?).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent route: distribution of the count by repeated convolution.
    fn convolution_sf(n: usize, p: f64, k: usize) -> f64 {
        let mut dist = vec![1.0];
        for _ in 0..n {
            let mut next = vec![0.0; dist.len() + 1];
            for (i, &w) in dist.iter().enumerate() {
                next[i] += w * (1.0 - p);
                next[i + 1] += w * p;
            }
            dist = next;
        }
        dist[k.min(dist.len())..].iter().sum()
    }

    #[test]
    fn tails_match_convolution() {
        for &(n, p, k) in &[(16, 0.25, 4), (48, 0.05, 6), (64, 0.02, 10), (30, 0.6, 2), (200, 0.01, 1)] {
            let a = binomial_sf(n, p, k).unwrap();
            let b = convolution_sf(n as usize, p, k as usize);
            assert!((a - b).abs() < 1e-13, "({n},{p},{k}): {a} vs {b}");
        }
    }

    #[test]
    fn tail_edges() {
        assert_eq!(binomial_sf(10, 0.3, 0).unwrap(), 1.0);
        assert_eq!(binomial_sf(10, 0.3, 11).unwrap(), 0.0);
        assert_eq!(binomial_sf(10, 1.0, 10).unwrap(), 1.0);
        assert_eq!(binomial_sf(10, 0.0, 1).unwrap(), 0.0);
        assert!(binomial_sf(10, 1.2, 1).is_err());
    }

    #[test]
    fn poisson_tail_against_direct_sum() {
        for &(l, k) in &[(0.5, 1), (4.88, 4), (10.0, 12), (25.0, 3)] {
            let direct: f64 = 1.0 - (0..k).map(|j| poisson_pmf(l, j)).sum::<f64>();
            assert!((poisson_sf(l, k).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_choose() {
        assert_eq!(choose(16, 4), 1820);
        assert_eq!(choose(12, 6), 924);
        assert!((ln_choose(70, 35) - (choose(70, 35) as f64).ln()).abs() < 1e-9);
    }
}
