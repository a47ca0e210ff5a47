//! Floating-point root oracle.
//!
//! Roots come from Aberth-Ehrlich iteration. Each approximation carries an
//! inclusion radius from Smith's bound: the union of the disks
//! `|z - z_i| <= n |p(z_i)| / |lc * prod_(j != i) (z_i - z_j)|` contains
//! every root, and a connected component made of `m` disks holds exactly
//! `m` roots. The membership verdict is three-valued and only commits to
//! `true`/`false` when the disks certify it.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{Result, WeilError};
use crate::poly::IntPolynomial;
use crate::weil::{self, PrimePower, WeilCoefficients};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
const MAX_SWEEPS: usize = 2000;

#[derive(Clone, Debug, PartialEq)]
pub struct RootApproximation {
    pub roots: Vec<Complex64>,
    /// Upper bound on `|p(z_i)|`, including the rounding error of evaluation.
    pub residuals: Vec<f64>,
    /// Inclusion radius around each root.
    pub radii: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumericVerdict {
    Member,
    NotMember,
    BoundaryUncertain,
}

impl NumericVerdict {
    /// `true` unless the answer is a confident `NotMember`.
    pub fn admits(self, exact: bool) -> bool {
        match self {
            NumericVerdict::Member => exact,
            NumericVerdict::NotMember => !exact,
            NumericVerdict::BoundaryUncertain => true,
        }
    }
}

pub fn numeric_roots(f: &IntPolynomial) -> Result<RootApproximation> {
    let coeffs: Vec<f64> = f
        .coefficients()
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::INFINITY))
        .collect();
    numeric_roots_f64(&coeffs)
}

/// Roots of `sum coeffs[k] x^k`; the leading coefficient must be nonzero.
pub fn numeric_roots_f64(coeffs: &[f64]) -> Result<RootApproximation> {
    let n = coeffs
        .len()
        .checked_sub(1)
        .ok_or(WeilError::ZeroPolynomial)?;
    if n == 0 {
        return Err(WeilError::ConstantPolynomial);
    }
    let lc = coeffs[n];
    assert!(lc != 0.0 && coeffs.iter().all(|c| c.is_finite()));
    let roots = if n == 1 {
        vec![Complex64::new(-coeffs[0] / lc, 0.0)]
    } else {
        aberth(coeffs)?
    };
    let residuals: Vec<f64> = roots.iter().map(|&z| residual_bound(coeffs, z)).collect();
    let radii = roots
        .iter()
        .enumerate()
        .map(|(i, &z)| {
            let spread: f64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &w)| (z - w).norm())
                .product();
            if spread == 0.0 {
                f64::INFINITY
            } else {
                // factor 2 absorbs rounding in the bound itself
                2.0 * n as f64 * residuals[i] / (lc.abs() * spread)
            }
        })
        .collect();
    Ok(RootApproximation {
        roots,
        residuals,
        radii,
    })
}

fn horner(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn rounding_bound(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * r + c.abs();
    }
    4.0 * coeffs.len() as f64 * f64::EPSILON * acc
}

fn residual_bound(coeffs: &[f64], z: Complex64) -> f64 {
    horner(coeffs, z).0.norm() + rounding_bound(coeffs, z)
}

fn aberth(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len() - 1;
    let lc = coeffs[n];
    let centre = -coeffs[n - 1] / (n as f64 * lc);
    // starting circle: max |c_k / lc|^(1/(n-k)) around the centroid
    let radius = (0..n)
        .map(|k| (coeffs[k] / lc).abs().powf(1.0 / (n - k) as f64))
        .fold(0.0f64, f64::max)
        .max(1e-3)
        * 1.1;
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::new(centre, 0.0) + Complex64::from_polar(radius, theta)
        })
        .collect();
    for _ in 0..MAX_SWEEPS {
        let mut settled = true;
        for i in 0..n {
            let (p, dp) = horner(coeffs, z[i]);
            if p.norm() <= rounding_bound(coeffs, z[i]) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() > 1e-15 * (1.0 + z[i].norm()) {
                settled = false;
            }
        }
        if settled {
            return Ok(z);
        }
    }
    Err(WeilError::NoConvergence(MAX_SWEEPS))
}

/// Decides whether every root of the real polynomial lies in `[-half_width, half_width]`.
pub fn classify_roots(approx: &RootApproximation, half_width: f64, tol: f64) -> NumericVerdict {
    assert!(tol > 0.0, "tolerance must be positive");
    let n = approx.roots.len();
    let radius: Vec<f64> = approx.radii.iter().map(|r| r.max(tol)).collect();
    let z = &approx.roots;

    // Union-find over overlapping disks.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if (z[i] - z[j]).norm() <= radius[i] + radius[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a] = b;
            }
        }
    }
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut index_of = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if index_of[root] == usize::MAX {
            index_of[root] = components.len();
            components.push(Vec::new());
        }
        components[index_of[root]].push(i);
    }

    let touches_axis = |i: usize| z[i].im.abs() <= radius[i];
    let touches_segment = |i: usize| {
        touches_axis(i) && z[i].re + radius[i] >= -half_width && z[i].re - radius[i] <= half_width
    };
    let mut certain = true;
    for comp in &components {
        // Roots in a component that misses the segment are non-real or outside it.
        if comp.iter().all(|&i| !touches_segment(i)) {
            return NumericVerdict::NotMember;
        }
        if comp.len() != 1 {
            certain = false;
            continue;
        }
        let i = comp[0];
        // A lone disk whose mirror image meets no other disk holds a real root.
        let conj = z[i].conj();
        let mirror_clear = (0..n)
            .filter(|&j| j != i)
            .all(|j| (conj - z[j]).norm() > radius[i] + radius[j]);
        let inside = z[i].re - radius[i] >= -half_width && z[i].re + radius[i] <= half_width;
        if !(touches_axis(i) && mirror_clear && inside) {
            certain = false;
        }
    }
    if certain {
        NumericVerdict::Member
    } else {
        NumericVerdict::BoundaryUncertain
    }
}

/// Floating-point counterpart of [`crate::real_rooted::is_member`].
pub fn numeric_is_member(w: &WeilCoefficients, q: &PrimePower, tol: f64) -> Result<NumericVerdict> {
    let h = weil::to_real_weil(w, q);
    let approx = numeric_roots(h.h())?;
    Ok(classify_roots(&approx, 2.0 * q.q_f64().sqrt(), tol))
}
