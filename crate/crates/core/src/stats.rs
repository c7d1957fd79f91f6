//! Kolmogorov–Smirnov statistics and empirical CDFs.

/// One-sample KS distance `supₓ |Fₙ(x) − F(x)|`. Sorts `samples` in place.
pub fn ks_statistic(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample KS distance. Sorts both inputs in place.
pub fn ks_two_sample_statistic(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Two-sample KS statistic and its asymptotic p-value.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> (f64, f64) {
    let d = ks_two_sample_statistic(a, b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    (d, kolmogorov_pvalue(d, na * nb / (na + nb)))
}

/// One-sample KS statistic and its asymptotic p-value.
pub fn ks_one_sample(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let d = ks_statistic(samples, cdf);
    (d, kolmogorov_pvalue(d, samples.len() as f64))
}

/// `P(D > d)` for effective sample size `n`, with the Stephens small-sample
/// correction `λ = (√n + 0.12 + 0.11/√n)·d`.
pub fn kolmogorov_pvalue(d: f64, n: f64) -> f64 {
    let sn = n.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=200 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Empirical CDF over a sorted copy of the data.
#[derive(Clone, Debug)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(data: &[f64]) -> Self {
        let mut sorted = data.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self { sorted }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }
}

/// Mean and standard error of the mean.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn one_sample_uniform() {
        let mut rng = stream(11, 0);
        let mut u: Vec<f64> = (0..20_000).map(|_| rng.gen()).collect();
        let (d, p) = ks_one_sample(&mut u, |x| x.clamp(0.0, 1.0));
        assert!(d < 0.015);
        assert!(p > 0.001);
        let mut shifted: Vec<f64> = u.iter().map(|x| x * x).collect();
        let (_, p) = ks_one_sample(&mut shifted, |x| x.clamp(0.0, 1.0));
        assert!(p < 1e-6);
    }

    #[test]
    fn two_sample_exact_small_case() {
        let mut a = vec![1.0, 2.0, 3.0];
        let mut b = vec![2.5, 3.5, 4.5, 5.5];
        // After x = 3: F_a = 1, F_b = 1/4.
        assert!((ks_two_sample_statistic(&mut a, &mut b) - 0.75).abs() < 1e-15);
        let mut c = a.clone();
        assert_eq!(ks_two_sample_statistic(&mut a, &mut c), 0.0);
    }

    #[test]
    fn pvalue_reference_points() {
        // Kolmogorov distribution: P(K > 1.3581) ≈ 0.05, P(K > 1.6276) ≈ 0.01.
        assert!((kolmogorov_pvalue(1.3581 / 1e3, 1e6) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_pvalue(1.6276 / 1e3, 1e6) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn ecdf_counts() {
        let e = Ecdf::new(&[3.0, 1.0, 2.0, 2.0]);
        assert_eq!(e.eval(0.5), 0.0);
        assert_eq!(e.eval(2.0), 0.75);
        assert_eq!(e.eval(9.0), 1.0);
    }
}
