use num_complex::Complex;
use rayon::prelude::*;

use crate::aniso::AnisoSpectrum;
use crate::error::{invalid, Result};
use crate::linalg::interpolate_uniform;
use crate::peo::angular::cis;
use crate::peo::Parity;
use crate::radial::BasisTable;
use crate::scalar::Real;
use crate::specfun::SpectralSum;

/// Eigenstates entering a spectral sum.
#[derive(Debug, Clone, Copy)]
pub enum SpectralSource<'a, T> {
    /// `f_{m,n} = g_{m,n}(r) e^{imφ}/√(2π)`, `|m| <= m_max`.
    Isotropic(&'a BasisTable<T>),
    /// `f_l = Σ_i a_i^l g_i(r) e^{i m_i φ}/√(2π)`.
    Anisotropic(&'a BasisTable<T>, &'a AnisoSpectrum<T>),
}

fn at_radius<T: Real>(basis: &BasisTable<T>, values: &[T], r: T) -> T {
    interpolate_uniform(T::zero(), basis.grid.h(), values, r)
}

/// `Ŝ^η(r, Δφ; r_ref) = Σ_l f_l^η(r, Δφ)* f_l^η(r_ref, 0)` over the radial
/// grid, one sum per `Δφ`.
///
/// Contributions are accumulated per basis function in a fixed index
/// order, so results do not depend on the thread count.
pub fn spectral_peo_sum<T: Real>(
    source: SpectralSource<'_, T>,
    parity: Parity,
    r_ref: T,
    delta_phis: &[T],
) -> Result<Vec<SpectralSum<T>>> {
    let basis = match source {
        SpectralSource::Isotropic(b) | SpectralSource::Anisotropic(b, _) => b,
    };
    if r_ref < T::zero() || r_ref > basis.grid.r_max() {
        return Err(invalid(format!("r_ref={r_ref} outside the radial grid")));
    }
    // per basis function (m_i, n_i): effective coefficient b_i multiplying
    // g_i(r) e^{-i m_i Δφ} / (2π)
    let (terms, weights): (usize, Vec<(i64, usize, T)>) = match source {
        SpectralSource::Isotropic(b) => {
            let m_max = b.m_max as i64;
            let list: Vec<(i64, usize, T)> = (-m_max..=m_max)
                .filter(|m| parity.contains(*m))
                .flat_map(|m| (1..=b.n_max).map(move |n| (m, n)))
                .map(|(m, n)| (m, n, at_radius(b, b.values(m, n).unwrap(), r_ref)))
                .collect();
            (list.len(), list)
        }
        SpectralSource::Anisotropic(b, spec) => {
            let states: Vec<usize> = (0..spec.eigenvalues.len())
                .filter(|&l| spec.parity[l] == parity)
                .collect();
            let at_ref: Vec<T> = spec
                .map
                .pairs()
                .iter()
                .map(|&(m, n)| at_radius(b, b.values(m, n).unwrap(), r_ref))
                .collect();
            let w: Vec<T> = states
                .iter()
                .map(|&l| {
                    let col = spec.vectors.column(l);
                    col.iter().zip(&at_ref).fold(T::zero(), |a, (c, g)| a + *c * *g)
                })
                .collect();
            let list = spec
                .map
                .pairs()
                .iter()
                .enumerate()
                .filter(|(_, (m, _))| parity.contains(*m))
                .map(|(i, &(m, n))| {
                    let bi = states
                        .iter()
                        .zip(&w)
                        .fold(T::zero(), |a, (&l, wl)| a + spec.vectors[(i, l)] * *wl);
                    (m, n, bi)
                })
                .collect();
            (states.len(), list)
        }
    };
    if terms == 0 {
        return Err(invalid(format!("no {} states in the basis", parity.label())));
    }
    let n_points = basis.grid.n_points();
    let norm = T::one() / T::two_pi();
    delta_phis
        .iter()
        .map(|&dphi| {
            let parts: Vec<Vec<Complex<T>>> = weights
                .par_iter()
                .map(|&(m, n, b)| {
                    let phase = cis(-T::from_i64_lossy(m) * dphi) * (b * norm);
                    basis.values(m, n).unwrap().iter().map(|g| phase * *g).collect()
                })
                .collect();
            let mut acc = vec![Complex::new(T::zero(), T::zero()); n_points];
            for part in &parts {
                for (a, p) in acc.iter_mut().zip(part) {
                    *a += *p;
                }
            }
            Ok(SpectralSum {
                parity: Some(parity),
                reference: r_ref,
                delta_phi: Some(dphi),
                abscissa: basis.grid.r().to_vec(),
                values: acc.iter().map(|c| c.re).collect(),
                imaginary: acc.iter().map(|c| c.im).collect(),
                terms,
            })
        })
        .collect()
}

/// Full width at half maximum of the positive lobe around the global
/// maximum, with linear interpolation of the crossings. A lobe that
/// reaches an end of the abscissa is cut there.
pub fn fwhm<T: Real>(x: &[T], y: &[T]) -> Option<T> {
    let mut peak = 0;
    for (i, v) in y.iter().enumerate() {
        if *v > y[peak] {
            peak = i;
        }
    }
    let top = y[peak];
    if !(top > T::zero()) {
        return None;
    }
    let half = top / T::cst(2.0);
    let cross = |i: usize, j: usize| -> T {
        // y[i] >= half > y[j], neighbours
        let t = (y[i] - half) / (y[i] - y[j]);
        x[i] + t * (x[j] - x[i])
    };
    let mut left = x[0];
    for i in (1..=peak).rev() {
        if y[i - 1] < half {
            left = cross(i, i - 1);
            break;
        }
    }
    let mut right = x[x.len() - 1];
    for i in peak..x.len() - 1 {
        if y[i + 1] < half {
            right = cross(i, i + 1);
            break;
        }
    }
    Some(right - left)
}
