//! Compensated (Neumaier) summation and a deterministic pairwise reduction
//! of partial sums.

use num_complex::Complex64;

/// Neumaier's improved Kahan–Babuška accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator into this one.
    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Componentwise [`Neumaier`] accumulator for complex values.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ComplexNeumaier {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexNeumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexNeumaier) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    #[inline]
    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

impl FromIterator<Complex64> for ComplexNeumaier {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut acc = ComplexNeumaier::new();
        for z in iter {
            acc.add(z);
        }
        acc
    }
}

/// Combines partial accumulators by a balanced pairwise tree in index order.
///
/// The tree shape depends only on `parts.len()`, so the result is independent
/// of how the parts were scheduled.
pub fn tree_reduce<T: Clone + Default>(parts: Vec<T>, merge: impl Fn(&mut T, &T)) -> T {
    let mut level = parts;
    if level.is_empty() {
        return T::default();
    }
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(mut a) = it.next() {
            if let Some(b) = it.next() {
                merge(&mut a, &b);
            }
            next.push(a);
        }
        level = next;
    }
    level.pop().unwrap_or_default()
}

/// Compensated sum of a real slice.
pub fn sum_f64(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<Neumaier>().total()
}

/// Compensated sum of a complex slice.
pub fn sum_complex(zs: &[Complex64]) -> Complex64 {
    zs.iter().copied().collect::<ComplexNeumaier>().total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_summation() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(xs.iter().sum::<f64>(), 0.0);
        assert_eq!(sum_f64(&xs), 2.0);
    }

    #[test]
    fn paired_cancellation_is_exact() {
        let mut zs = Vec::new();
        for j in 1..=1000 {
            let z = Complex64::new(1.0, 0.3) / Complex64::new(0.7 + j as f64, 0.2);
            zs.push(z);
            zs.push(-z);
        }
        assert_eq!(sum_complex(&zs), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn tree_reduce_matches_sequential_merge() {
        let parts: Vec<Neumaier> = (0..7)
            .map(|i| [i as f64, 0.1 * i as f64].into_iter().collect())
            .collect();
        let total = tree_reduce(parts, |a, b| a.merge(b)).total();
        assert!((total - (21.0 + 2.1)).abs() < 1e-14);
        assert_eq!(tree_reduce(Vec::<Neumaier>::new(), |a, b| a.merge(b)).total(), 0.0);
    }
}
