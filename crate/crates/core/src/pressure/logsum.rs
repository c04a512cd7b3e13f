//! `log Σ e^{x_i}` without underflow.

/// Running log-sum-exp with a moving pivot and Neumaier-compensated sum of
/// the shifted terms. `-inf` terms are ignored; the empty sum is `-inf`.
#[derive(Clone, Copy, Debug)]
pub struct LogSum {
    pivot: f64,
    sum: f64,
    comp: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub fn new() -> Self {
        Self {
            pivot: f64::NEG_INFINITY,
            sum: 0.0,
            comp: 0.0,
        }
    }

    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.pivot {
            let k = (self.pivot - x).exp();
            self.sum *= k;
            self.comp *= k;
            self.pivot = x;
        }
        self.add_shifted((x - self.pivot).exp());
    }

    fn add_shifted(&mut self, y: f64) {
        let t = self.sum + y;
        if self.sum.abs() >= y.abs() {
            self.comp += (self.sum - t) + y;
        } else {
            self.comp += (y - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &LogSum) {
        if other.pivot == f64::NEG_INFINITY {
            return;
        }
        if other.pivot > self.pivot {
            let k = (self.pivot - other.pivot).exp();
            self.sum *= k;
            self.comp *= k;
            self.pivot = other.pivot;
        }
        let k = (other.pivot - self.pivot).exp();
        self.add_shifted(other.sum * k);
        self.add_shifted(other.comp * k);
    }

    pub fn value(&self) -> f64 {
        if self.pivot == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.pivot + (self.sum + self.comp).ln()
        }
    }
}
