//! Spike statistics: fire rate, operation-count estimate and support F1.

use crate::error::{Error, Result};
use crate::frames::FrameTensor;

/// Fraction of active entries, kept as an exact ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FireRate {
    pub active: u64,
    pub total: u64,
}

impl FireRate {
    pub fn value(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.active as f64 / self.total as f64
        }
    }

    pub fn sparsity(&self) -> f64 {
        1.0 - self.value()
    }
}

/// Fire rate of a spike tensor. Rejects entries above 1.
pub fn fire_rate(spikes: &FrameTensor) -> Result<FireRate> {
    if let Some(&v) = spikes.data().iter().find(|&&v| v > 1) {
        return Err(Error::NotBinary(v));
    }
    Ok(FireRate {
        active: spikes.active(),
        total: spikes.data().len() as u64,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerShape {
    pub name: String,
    /// Multiply-accumulates of a dense pass per presented input.
    pub macs_per_input: u64,
}

impl LayerShape {
    pub fn new(name: impl Into<String>, macs_per_input: u64) -> Self {
        Self {
            name: name.into(),
            macs_per_input,
        }
    }
}

/// `sum(rate_i * macs_i)` rounded to the nearest integer. Silent neurons cost nothing.
pub fn synops_estimate(layers: &[(LayerShape, f64)]) -> Result<u64> {
    let mut total = 0.0;
    for (layer, rate) in layers {
        if !(0.0..=1.0).contains(rate) {
            return Err(Error::Config(format!("fire rate {rate} of layer `{}`", layer.name)));
        }
        total += rate * layer.macs_per_input as f64;
    }
    Ok(total.round() as u64)
}

/// `2 |A ∩ B| / (|A| + |B|)` over non-zero cells; 1.0 when both are empty.
pub fn event_f1(a: &FrameTensor, b: &FrameTensor) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::Shape(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let (mut na, mut nb, mut both) = (0u64, 0u64, 0u64);
    for (&x, &y) in a.data().iter().zip(b.data()) {
        let (x, y) = (x > 0, y > 0);
        na += u64::from(x);
        nb += u64::from(y);
        both += u64::from(x && y);
    }
    if na + nb == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * both as f64 / (na + nb) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::{flip_horizontal, roll};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn with_ones(cells: &[usize], t: usize, h: usize, w: usize) -> FrameTensor {
        let mut data = vec![0u16; t * 2 * h * w];
        cells.iter().for_each(|&i| data[i] = 1);
        FrameTensor::from_vec(t, h, w, data, true).unwrap()
    }

    #[test]
    fn fire_rate_cases() {
        let zero = FrameTensor::zeros(2, 4, 4);
        assert_eq!(fire_rate(&zero).unwrap().value(), 0.0);
        let ones = FrameTensor::from_vec(2, 4, 4, vec![1; 64], true).unwrap();
        assert_eq!(fire_rate(&ones).unwrap().value(), 1.0);

        // 4608 = 1 * 2 * 48 * 48
        let cells: Vec<usize> = (0..23).map(|i| i * 200).collect();
        let r = fire_rate(&with_ones(&cells, 1, 48, 48)).unwrap();
        assert_eq!(r, FireRate { active: 23, total: 4608 });
        assert_eq!(r.value(), 23.0 / 4608.0);

        let mut counts = FrameTensor::zeros(1, 2, 2);
        counts.set(0, 0, 0, 0, 3);
        assert_eq!(fire_rate(&counts).unwrap_err(), Error::NotBinary(3));
    }

    #[test]
    fn fire_rate_permutation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let data = (0..3 * 2 * 16 * 16).map(|_| rng.random_range(0..=1)).collect();
        let x = FrameTensor::from_vec(3, 16, 16, data, true).unwrap();
        let r = fire_rate(&x).unwrap();
        assert_eq!(fire_rate(&flip_horizontal(&x)).unwrap(), r);
        assert_eq!(fire_rate(&roll(&x, 5, -3, true)).unwrap(), r);
    }

    #[test]
    fn synops_cases() {
        let l1 = LayerShape::new("conv1", 1_000_000);
        let l2 = LayerShape::new("conv2", 2_000_000);
        assert_eq!(synops_estimate(&[(l1.clone(), 0.0), (l2.clone(), 0.0)]).unwrap(), 0);
        assert_eq!(synops_estimate(&[(l1.clone(), 1.0)]).unwrap(), 1_000_000);
        assert_eq!(synops_estimate(&[(l1.clone(), 0.1), (l2.clone(), 0.25)]).unwrap(), 600_000);
        assert!(synops_estimate(&[(l1, 1.5)]).is_err());
        // linear in each rate
        let a = synops_estimate(&[(l2.clone(), 0.2)]).unwrap();
        let b = synops_estimate(&[(l2, 0.4)]).unwrap();
        assert_eq!(2 * a, b);
    }

    #[test]
    fn f1_cases() {
        let a = with_ones(&(0..10).collect::<Vec<_>>(), 1, 8, 8);
        assert_eq!(event_f1(&a, &a).unwrap(), 1.0);
        let b = with_ones(&(20..30).collect::<Vec<_>>(), 1, 8, 8);
        assert_eq!(event_f1(&a, &b).unwrap(), 0.0);
        let c = with_ones(&(2..12).collect::<Vec<_>>(), 1, 8, 8);
        assert!((event_f1(&a, &c).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(event_f1(&a, &c).unwrap(), event_f1(&c, &a).unwrap());
        let empty = FrameTensor::zeros(1, 8, 8);
        assert_eq!(event_f1(&empty, &empty).unwrap(), 1.0);
        assert!(event_f1(&a, &FrameTensor::zeros(2, 8, 8)).is_err());
    }
}
