//! Fourier transforms over the supported groups.
//!
//! Conventions, fixed once and used everywhere:
//! * transform:   `fhat(chi) = sum_x f(x) chi(x)`  (positive kernel, no
//!   normalisation),
//! * inversion:   `f(x) = N^{-1} sum_chi fhat(chi) conj(chi(x))`,
//! * Parseval:    `<f, g> = N^{-1} sum_chi fhat(chi) conj(ghat(chi))`,
//! * convolution: `(f * g)(x) = sum_y f(y) g(x - y)`, so that
//!   `(f * g)^ = fhat . ghat`.
//!
//! Two evaluation routes are kept alive deliberately. `dft_direct` is the
//! quadratic definition-chasing sum and serves as the oracle. `dft_fast`
//! delegates to rustfft (cyclic) or a dimension-by-dimension tensor
//! transform (vector). The dispatching `dft` uses the direct route up to
//! order 2^14 and the fast route above; the two must agree to 1e-9.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::density::DensityFn;
use crate::error::{CoreError, Result};
use crate::group::Group;

/// Largest order where the dispatching [`dft`] still uses direct summation.
pub const DIRECT_DFT_MAX: u64 = 1 << 14;

/// Agreement tolerance between the two transform routes (relative to
/// `max(1, ||f||_1)`, which dominates every coefficient).
pub const DFT_AGREE_TOL: f64 = 1e-9;

/// Direct-summation transform; the oracle route.
pub fn dft_direct(f: &DensityFn) -> Vec<Complex64> {
    let g = f.group();
    let n = g.order();
    let mut out = vec![Complex64::new(0.0, 0.0); n as usize];
    for chi in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for x in 0..n {
            let v = f.value(x);
            if v.norm_sqr() > 0.0 {
                acc += v * g.character(chi, x);
            }
        }
        out[chi as usize] = acc;
    }
    out
}

/// Fast transform: rustfft in the inverse direction for cyclic groups
/// (whose kernel `e^{+2 pi i k n / N}` matches ours), tensor decomposition
/// for vector groups.
pub fn dft_fast(f: &DensityFn) -> Vec<Complex64> {
    let g = f.group();
    match g {
        Group::Cyclic { modulus } => {
            let mut buf: Vec<Complex64> = f.values().to_vec();
            let mut planner = FftPlanner::new();
            let fft = planner.plan_fft_inverse(*modulus as usize);
            fft.process(&mut buf);
            buf
        }
        Group::Vector { base, dim } => {
            let p = *base as usize;
            let n = g.order() as usize;
            // p x p kernel table: kernel[a][x] = e^{2 pi i a x / p}.
            let mut kernel = vec![vec![Complex64::new(0.0, 0.0); p]; p];
            for (a, row) in kernel.iter_mut().enumerate() {
                for (x, cell) in row.iter_mut().enumerate() {
                    let theta = 2.0 * std::f64::consts::PI * (a * x % p) as f64 / p as f64;
                    *cell = Complex64::new(theta.cos(), theta.sin());
                }
            }
            let mut buf: Vec<Complex64> = f.values().to_vec();
            let mut stride = 1usize;
            for _ in 0..*dim {
                let mut next = vec![Complex64::new(0.0, 0.0); n];
                let block = stride * p;
                for base_idx in (0..n).step_by(block) {
                    for off in 0..stride {
                        for a in 0..p {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for x in 0..p {
                                acc += kernel[a][x] * buf[base_idx + off + x * stride];
                            }
                            next[base_idx + off + a * stride] = acc;
                        }
                    }
                }
                buf = next;
                stride *= p;
            }
            buf
        }
    }
}

/// Dispatching transform: direct up to order 2^14, fast beyond.
pub fn dft(f: &DensityFn) -> Vec<Complex64> {
    if f.group().order() <= DIRECT_DFT_MAX {
        dft_direct(f)
    } else {
        dft_fast(f)
    }
}

/// Inverse transform of a full coefficient table.
pub fn idft(group: &Group, coeffs: &[Complex64]) -> Result<DensityFn> {
    let n = group.order();
    if coeffs.len() as u64 != n {
        return Err(CoreError::GroupMismatch);
    }
    let scale = 1.0 / n as f64;
    let mut values = vec![Complex64::new(0.0, 0.0); n as usize];
    for x in 0..n {
        let mut acc = Complex64::new(0.0, 0.0);
        for chi in 0..n {
            acc += coeffs[chi as usize] * group.character(chi, x).conj();
        }
        values[x as usize] = acc * scale;
    }
    DensityFn::from_values(group.clone(), values)
}

/// `(f * g)(x) = sum_y f(y) g(x - y)`, by direct summation over the support
/// of `f`.
pub fn convolve(f: &DensityFn, g: &DensityFn) -> Result<DensityFn> {
    if f.group() != g.group() {
        return Err(CoreError::GroupMismatch);
    }
    let grp = f.group();
    let n = grp.order();
    let mut values = vec![Complex64::new(0.0, 0.0); n as usize];
    for y in f.support() {
        let fy = f.value(y);
        for x in 0..n {
            values[x as usize] += fy * g.value(grp.sub(x, y));
        }
    }
    DensityFn::from_values(grp.clone(), values)
}

/// `|<f, g> - N^{-1} sum_chi fhat conj(ghat)|`: the Parseval defect.
pub fn parseval_gap(f: &DensityFn, g: &DensityFn) -> Result<f64> {
    if f.group() != g.group() {
        return Err(CoreError::GroupMismatch);
    }
    let n = f.group().order() as f64;
    let direct = f.inner(g)?;
    let fh = dft(f);
    let gh = dft(g);
    let spectral: Complex64 = fh
        .iter()
        .zip(&gh)
        .map(|(a, b)| a * b.conj())
        .sum::<Complex64>()
        / n;
    Ok((direct - spectral).norm())
}

/// Largest pointwise disagreement between the two transform routes.
pub fn dft_route_disagreement(f: &DensityFn) -> f64 {
    let a = dft_direct(f);
    let b = dft_fast(f);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{cyclic_group, vector_group};

    #[test]
    fn point_mass_has_flat_transform() {
        let g = cyclic_group(5).unwrap();
        let f = DensityFn::indicator(g, &[0]).unwrap();
        for c in dft(&f) {
            assert!((c - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn full_group_transform_is_order_at_zero() {
        let g = cyclic_group(7).unwrap();
        let f = DensityFn::indicator(g.clone(), &(0..7).collect::<Vec<_>>()).unwrap();
        let fh = dft(&f);
        assert!((fh[0] - Complex64::new(7.0, 0.0)).norm() < 1e-12);
        for c in &fh[1..] {
            assert!(c.norm() < 1e-9);
        }
    }

    #[test]
    fn inversion_roundtrip() {
        let g = cyclic_group(11).unwrap();
        let f = DensityFn::from_real(
            g.clone(),
            &[0.3, -1.0, 0.0, 2.5, 0.0, 0.0, 1.0, 0.0, -0.25, 0.0, 4.0],
        )
        .unwrap();
        let back = idft(&g, &dft(&f)).unwrap();
        for x in 0..11 {
            assert!((f.value(x) - back.value(x)).norm() < 1e-9);
        }
    }

    #[test]
    fn convolution_theorem() {
        for g in [cyclic_group(13).unwrap(), vector_group(3, 2).unwrap()] {
            let f = DensityFn::indicator(g.clone(), &[1, 3, 4]).unwrap();
            let h = DensityFn::indicator(g.clone(), &[0, 2]).unwrap();
            let conv = convolve(&f, &h).unwrap();
            let lhs = dft(&conv);
            let fh = dft(&f);
            let hh = dft(&h);
            for i in 0..g.order() as usize {
                assert!((lhs[i] - fh[i] * hh[i]).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn fast_route_matches_direct_on_vector_groups() {
        let g = vector_group(3, 4).unwrap();
        let vals: Vec<f64> = (0..81).map(|i| ((i * 37 % 17) as f64) - 8.0).collect();
        let f = DensityFn::from_real(g, &vals).unwrap();
        assert!(dft_route_disagreement(&f) < 1e-9 * f.norm1().max(1.0));
    }

    #[test]
    fn fast_route_matches_direct_on_prime_cyclic() {
        let g = cyclic_group(61).unwrap();
        let vals: Vec<f64> = (0..61).map(|i| ((i * 11 % 23) as f64) * 0.25 - 2.0).collect();
        let f = DensityFn::from_real(g, &vals).unwrap();
        assert!(dft_route_disagreement(&f) < 1e-9 * f.norm1().max(1.0));
    }
}
