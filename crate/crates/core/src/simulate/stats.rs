use serde::{Deserialize, Serialize};

/// Streaming central moments up to order four; `merge` combines two
/// disjoint samples.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term1;
    }

    pub fn merge(&self, o: &Self) -> Self {
        if self.count == 0 {
            return *o;
        }
        if o.count == 0 {
            return *self;
        }
        let (na, nb) = (self.count as f64, o.count as f64);
        let n = na + nb;
        let d = o.mean - self.mean;
        let d2 = d * d;
        let m2 = self.m2 + o.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + o.m3
            + d * d2 * na * nb * (na - nb) / (n * n)
            + 3.0 * d * (na * o.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + o.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * o.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * o.m3 - nb * self.m3) / n;
        Self {
            count: self.count + o.count,
            mean: self.mean + d * nb / n,
            m2,
            m3,
            m4,
        }
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn skewness(&self) -> f64 {
        if self.m2 == 0.0 {
            0.0
        } else {
            (self.count as f64).sqrt() * self.m3 / self.m2.powf(1.5)
        }
    }

    pub fn excess_kurtosis(&self) -> f64 {
        if self.m2 == 0.0 {
            0.0
        } else {
            self.count as f64 * self.m4 / (self.m2 * self.m2) - 3.0
        }
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Self::default();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Monte Carlo summary of one statistic.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimStats {
    pub statistic: String,
    pub m: usize,
    pub n: u64,
    pub trials: u64,
    pub seed: u64,
    pub moments: Moments,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

pub const CSV_HEADER: &str = "statistic,m,n,trials,mean,variance,std_error,seed";

impl SimStats {
    pub fn mean(&self) -> f64 {
        self.moments.mean
    }

    pub fn variance(&self) -> f64 {
        self.moments.variance()
    }

    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        (self.variance() / self.trials as f64).sqrt()
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.statistic,
            self.m,
            self.n,
            self.trials,
            self.mean(),
            self.variance(),
            self.std_error(),
            self.seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass() {
        let xs = [1.0, 4.0, 2.0, 8.0, 5.0, 7.0, 3.5];
        let m: Moments = xs.iter().copied().collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let c = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>();
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.m2 - c(2)).abs() < 1e-10);
        assert!((m.m3 - c(3)).abs() < 1e-9);
        assert!((m.m4 - c(4)).abs() < 1e-8);
    }

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (0..50)
            .map(|i| ((i * 37) % 11) as f64 * 0.5 + i as f64 * 0.01)
            .collect();
        let all: Moments = xs.iter().copied().collect();
        let a: Moments = xs[..17].iter().copied().collect();
        let b: Moments = xs[17..].iter().copied().collect();
        let m = a.merge(&b);
        assert_eq!(m.count, all.count);
        for (x, y) in [
            (m.mean, all.mean),
            (m.m2, all.m2),
            (m.m3, all.m3),
            (m.m4, all.m4),
        ] {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0), "{x} {y}");
        }
    }
}
