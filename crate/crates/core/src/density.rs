//! Complex-valued functions on a group, with cached norms.
//!
//! All L^p norms use counting measure: `||f||_p^p = sum_x |f(x)|^p`.
//! Norm caches are written at construction and re-checkable to 1e-12
//! relative tolerance via [`DensityFn::verify_norm_cache`].

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::group::Group;

/// Relative tolerance for cached-norm verification.
pub const NORM_CACHE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct DensityFn {
    group: Group,
    values: Vec<Complex64>,
    norm1: f64,
    norm2: f64,
    norm_inf: f64,
}

impl DensityFn {
    pub fn from_values(group: Group, values: Vec<Complex64>) -> Result<Self> {
        if values.len() as u64 != group.order() {
            return Err(CoreError::GroupMismatch);
        }
        let norm1 = values.iter().map(|v| v.norm()).sum();
        let norm2 = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let norm_inf = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Ok(DensityFn {
            group,
            values,
            norm1,
            norm2,
            norm_inf,
        })
    }

    /// Indicator function of a set of elements.
    pub fn indicator(group: Group, set: &[u64]) -> Result<Self> {
        let mut values = vec![Complex64::new(0.0, 0.0); group.order() as usize];
        for &x in set {
            if !group.contains(x) {
                return Err(CoreError::BadElement(x));
            }
            values[x as usize] = Complex64::new(1.0, 0.0);
        }
        Self::from_values(group, values)
    }

    pub fn from_real(group: Group, values: &[f64]) -> Result<Self> {
        Self::from_values(
            group,
            values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        )
    }

    pub fn group(&self) -> &Group {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, x: u64) -> Complex64 {
        self.values[x as usize]
    }

    /// Elements carrying a nonzero value.
    pub fn support(&self) -> Vec<u64> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.norm() > 0.0)
            .map(|(i, _)| i as u64)
            .collect()
    }

    pub fn norm1(&self) -> f64 {
        self.norm1
    }

    pub fn norm2(&self) -> f64 {
        self.norm2
    }

    pub fn norm_inf(&self) -> f64 {
        self.norm_inf
    }

    /// `||f||_p` for arbitrary p >= 1, computed fresh (not cached).
    pub fn norm_p(&self, p: f64) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }

    /// Recomputes every cached norm and checks it against the cache to
    /// 1e-12 relative tolerance.
    pub fn verify_norm_cache(&self) -> Result<()> {
        let fresh = Self::from_values(self.group.clone(), self.values.clone())?;
        for (name, a, b) in [
            ("l1", self.norm1, fresh.norm1),
            ("l2", self.norm2, fresh.norm2),
            ("linf", self.norm_inf, fresh.norm_inf),
        ] {
            let scale = a.abs().max(b.abs()).max(1.0);
            if (a - b).abs() > NORM_CACHE_TOL * scale {
                return Err(CoreError::Internal(format!(
                    "{name} cache drifted: {a} vs {b}"
                )));
            }
        }
        Ok(())
    }

    /// Pointwise `f(x - t)`.
    pub fn translate(&self, t: u64) -> Self {
        let g = &self.group;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for x in g.elements() {
            values[x as usize] = self.values[g.sub(x, t) as usize];
        }
        DensityFn {
            group: self.group.clone(),
            values,
            norm1: self.norm1,
            norm2: self.norm2,
            norm_inf: self.norm_inf,
        }
    }

    /// Pointwise `f(c^{-1} x)` for a unit scalar c, i.e. the indicator of
    /// `c . A` when `f` is the indicator of `A`.
    pub fn dilate(&self, c: i64) -> Result<Self> {
        let g = &self.group;
        let cinv = g.scalar_inverse(c)?;
        let mut values = vec![Complex64::new(0.0, 0.0); self.values.len()];
        for x in g.elements() {
            values[x as usize] = self.values[g.scale(cinv as i64, x) as usize];
        }
        Ok(DensityFn {
            group: self.group.clone(),
            values,
            norm1: self.norm1,
            norm2: self.norm2,
            norm_inf: self.norm_inf,
        })
    }

    /// `<f, g> = sum_x f(x) conj(g(x))`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.group != other.group {
            return Err(CoreError::GroupMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::cyclic_group;

    #[test]
    fn norms_of_indicator() {
        let g = cyclic_group(7).unwrap();
        let f = DensityFn::indicator(g, &[0, 2, 5]).unwrap();
        assert_eq!(f.norm1(), 3.0);
        assert!((f.norm2() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(f.norm_inf(), 1.0);
        assert_eq!(f.support(), vec![0, 2, 5]);
        f.verify_norm_cache().unwrap();
    }

    #[test]
    fn translate_and_dilate_permute_values() {
        let g = cyclic_group(7).unwrap();
        let f = DensityFn::indicator(g, &[1, 2]).unwrap();
        let t = f.translate(3);
        assert_eq!(t.support(), vec![4, 5]);
        let d = f.dilate(3).unwrap();
        assert_eq!(d.support(), vec![3, 6]);
        assert_eq!(d.norm1(), f.norm1());
    }

    #[test]
    fn norm_p_interpolates() {
        let g = cyclic_group(5).unwrap();
        let f = DensityFn::from_real(g, &[1.0, -2.0, 0.0, 0.5, 0.0]).unwrap();
        assert!((f.norm_p(1.0) - f.norm1()).abs() < 1e-12);
        assert!((f.norm_p(2.0) - f.norm2()).abs() < 1e-12);
    }
}
