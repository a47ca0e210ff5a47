//! Enumeration of `Lambda_q ∩ V_g` in integer coefficient coordinates.
//!
//! Points are visited in lexicographic order of `(a_1, ..., a_g)`. The
//! `a_1` axis is cut into contiguous chunks that can be processed in
//! parallel; per-chunk results are merged in chunk order, so every
//! aggregate is independent of the chunking and the thread count.
//!
//! With pruning on, a prefix `(a_1, ..., a_k)` is dropped when its
//! normalized coordinates leave the binomial box or when the
//! `(g - k)`-th derivative of `h` (which depends on the prefix alone) fails
//! the root-location test; by Rolle's theorem a member's derivatives keep
//! all roots real and inside the interval. For the last coordinate the
//! member set of a fixed prefix is an integer interval, so the scan starts
//! at a floating-point estimate and walks outward with exact tests,
//! falling back to a full scan when the estimate has no member nearby.

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Pow, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Result, WeilError};
use crate::kernel;
use crate::numeric;
use crate::real_rooted::MemberTester;
use crate::weil::{self, PrimePower, WeilCoefficients};

/// Bumped whenever the visit order changes; recorded in cached artifacts.
pub const ENUMERATION_ORDER_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    /// `Lambda_q`
    Full,
    /// `Lambda'_q`: `p | a_g`
    PrimeSub,
    /// `Lambda''_q`: `s | a_g`
    SSub,
    /// `Lambda_(m_1..m_g)`: `a_i ≡ m_i (mod ell)`
    ResidueShifted,
}

/// A positive real `factor * q^exponent`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Measure {
    pub factor: BigInt,
    pub q_exponent: Ratio<i64>,
}

impl Measure {
    fn new(factor: impl Into<BigInt>, num: i64, den: i64) -> Self {
        Self {
            factor: factor.into(),
            q_exponent: Ratio::new(num, den),
        }
    }

    pub fn to_f64(&self, q: &PrimePower) -> f64 {
        let e = *self.q_exponent.numer() as f64 / *self.q_exponent.denom() as f64;
        self.factor.to_f64().unwrap_or(f64::INFINITY) * q.q_f64().powf(e)
    }

    /// Exact value when `q^exponent` is rational.
    pub fn exact(&self, q: &PrimePower) -> Option<BigRational> {
        let (num, den) = (*self.q_exponent.numer(), *self.q_exponent.denom());
        let power: BigInt = Pow::pow(q.q(), num.unsigned_abs());
        let root = power.nth_root(den.try_into().ok()?);
        if Pow::pow(&root, den as u32) != power {
            return None;
        }
        let base = if num >= 0 {
            BigRational::from_integer(root)
        } else {
            BigRational::new(BigInt::one(), root)
        };
        Some(base * BigRational::from_integer(self.factor.clone()))
    }
}

/// One of the rectilinear lattices used in the counting argument, with the
/// covolume and mesh values it is known to have. For `SSub` the mesh is an
/// upper bound only.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub g: usize,
    pub q: PrimePower,
    pub ell: Option<u64>,
    pub shift: Option<Vec<u64>>,
    pub covolume: Measure,
    pub mesh: Measure,
    pub mesh_is_upper_bound: bool,
}

impl LatticeSpec {
    fn base_exponent(g: usize) -> (i64, i64) {
        let n = (g * (g + 1)) as i64;
        (-n, 4)
    }

    pub fn full(g: usize, q: &PrimePower) -> Self {
        let (n, d) = Self::base_exponent(g);
        Self {
            kind: LatticeKind::Full,
            g,
            q: q.clone(),
            ell: None,
            shift: None,
            covolume: Measure::new(1, n, d),
            mesh: Measure::new(1, -1, 2),
            mesh_is_upper_bound: false,
        }
    }

    pub fn prime_sub(g: usize, q: &PrimePower) -> Self {
        let (n, d) = Self::base_exponent(g);
        let mesh = if g == 2 && q.r() == 1 {
            Measure::new(1, 0, 1)
        } else {
            Measure::new(1, -1, 2)
        };
        Self {
            kind: LatticeKind::PrimeSub,
            covolume: Measure::new(q.p(), n, d),
            mesh,
            ..Self::full(g, q)
        }
    }

    pub fn s_sub(g: usize, q: &PrimePower) -> Self {
        let (n, d) = Self::base_exponent(g);
        Self {
            kind: LatticeKind::SSub,
            covolume: Measure::new(q.s().clone(), n, d),
            mesh: Measure::new(1, 0, 1),
            mesh_is_upper_bound: true,
            ..Self::full(g, q)
        }
    }

    pub fn residue_shifted(g: usize, q: &PrimePower, ell: u64, shift: &[u64]) -> Result<Self> {
        q.check_ell(ell)?;
        check_residues(g, ell, shift)?;
        let (n, d) = Self::base_exponent(g);
        Ok(Self {
            kind: LatticeKind::ResidueShifted,
            ell: Some(ell),
            shift: Some(shift.to_vec()),
            covolume: Measure::new(Pow::pow(BigInt::from(ell), g as u32), n, d),
            mesh: Measure::new(ell, -1, 2),
            ..Self::full(g, q)
        })
    }

    /// Membership of a coefficient vector in this lattice.
    pub fn contains(&self, w: &WeilCoefficients) -> bool {
        match self.kind {
            LatticeKind::Full => true,
            LatticeKind::PrimeSub => !is_ordinary(w, &self.q),
            LatticeKind::SSub => in_lambda_double_prime(w, &self.q),
            LatticeKind::ResidueShifted => {
                let ell = self.ell.expect("shifted lattice has ell");
                weil::residue_vector(w, ell)
                    == *self.shift.as_ref().expect("shifted lattice has shift")
            }
        }
    }
}

pub(crate) fn check_residues(g: usize, ell: u64, m: &[u64]) -> Result<()> {
    if m.len() != g {
        return Err(WeilError::ResidueLength {
            expected: g,
            found: m.len(),
        });
    }
    if let Some(&value) = m.iter().find(|&&v| v >= ell) {
        return Err(WeilError::ResidueNotReduced { value, ell });
    }
    Ok(())
}

/// A-priori bounds `|a_i| <= B_i = binom(2g, i) * ceil(q^(i/2))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientBox {
    pub bounds: Vec<BigInt>,
}

pub fn coefficient_box(g: usize, q: &PrimePower) -> CoefficientBox {
    assert!(g >= 1, "g must be at least 1");
    let bounds = (1..=g)
        .map(|i| {
            let qi: BigInt = Pow::pow(q.q(), i as u32);
            let mut root = qi.sqrt();
            if &root * &root < qi {
                root += 1;
            }
            BigInt::from(binomial(2 * g as u64, i as u64)) * root
        })
        .collect();
    CoefficientBox { bounds }
}

/// Outside `Lambda'_q`: `p` does not divide `a_g`.
pub fn is_ordinary(w: &WeilCoefficients, q: &PrimePower) -> bool {
    !w.last().is_multiple_of(&BigInt::from(q.p()))
}

/// In `Lambda''_q`: `s` divides `a_g`.
pub fn in_lambda_double_prime(w: &WeilCoefficients, q: &PrimePower) -> bool {
    w.last().is_multiple_of(q.s())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Maybe,
    Impossible,
}

/// Conservative test whether the prefix `(a_1, ..., a_k)`, `k < g`, can be
/// completed to a member.
pub fn prune_interval(g: usize, q: &PrimePower, prefix: &[BigInt]) -> Feasibility {
    assert!(prefix.len() < g, "prefix must be proper");
    Pruner::new(&MemberTester::new(g, q)).check(prefix)
}

struct Pruner<'a> {
    tester: &'a MemberTester,
    /// `binom(2g, i)^2 q^i`
    squared_limits: Vec<BigInt>,
}

impl<'a> Pruner<'a> {
    fn new(tester: &'a MemberTester) -> Self {
        let g = tester.g();
        let squared_limits = (1..=g)
            .map(|i| {
                let b = BigInt::from(binomial(2 * g as u64, i as u64));
                &b * &b * Pow::pow(tester.q().q(), i as u32)
            })
            .collect();
        Self {
            tester,
            squared_limits,
        }
    }

    fn check(&self, prefix: &[BigInt]) -> Feasibility {
        let g = self.tester.g();
        let k = prefix.len();
        if k == 0 {
            return Feasibility::Maybe;
        }
        let last = &prefix[k - 1];
        if last * last > self.squared_limits[k - 1] {
            return Feasibility::Impossible;
        }
        let mut padded = prefix.to_vec();
        padded.resize(g, BigInt::zero());
        let mut d = weil::real_weil_coefficients(&padded, self.tester.family());
        for _ in 0..g - k {
            d = kernel::derivative(&d).expect("BigInt arithmetic cannot overflow");
        }
        if self.tester.roots_in_interval(&d) {
            Feasibility::Maybe
        } else {
            Feasibility::Impossible
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub prune: bool,
    /// Worker threads; 0 uses the ambient rayon pool.
    pub jobs: usize,
    /// Number of contiguous pieces of the `a_1` axis.
    pub chunks: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self {
            prune: true,
            jobs: 0,
            chunks: 64,
        }
    }
}

/// Enumerator for one `(g, q)`.
pub struct Enumerator {
    tester: MemberTester,
    bounds: Vec<i128>,
    options: EnumerationOptions,
}

impl Enumerator {
    pub fn new(g: usize, q: &PrimePower, options: EnumerationOptions) -> Result<Self> {
        if g == 0 {
            return Err(WeilError::InvalidDimension);
        }
        let bounds = coefficient_box(g, q)
            .bounds
            .iter()
            .map(|b| b.to_i128().ok_or(WeilError::BoxTooLarge))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            tester: MemberTester::new(g, q),
            bounds,
            options,
        })
    }

    pub fn g(&self) -> usize {
        self.tester.g()
    }

    pub fn q(&self) -> &PrimePower {
        self.tester.q()
    }

    pub fn options(&self) -> EnumerationOptions {
        self.options
    }

    /// Contiguous inclusive ranges covering `[-B_1, B_1]`, in order.
    pub fn chunk_ranges(&self) -> Vec<(i128, i128)> {
        let b = self.bounds[0];
        let len = 2 * b + 1;
        let pieces = (self.options.chunks.max(1) as i128).min(len);
        (0..pieces)
            .map(|i| (-b + len * i / pieces, -b + len * (i + 1) / pieces - 1))
            .collect()
    }

    /// Folds every member, chunk by chunk, and merges chunk results in
    /// chunk order.
    pub fn fold<A, I, F, M>(&self, init: I, fold: F, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync,
        F: Fn(&mut A, &[i128]) + Sync,
        M: Fn(A, A) -> A,
    {
        let ranges = self.chunk_ranges();
        let work = || -> Vec<A> {
            ranges
                .par_iter()
                .map(|&(lo, hi)| {
                    let mut acc = init();
                    self.visit_chunk(lo, hi, &mut |a| fold(&mut acc, a));
                    acc
                })
                .collect()
        };
        let parts = match self.options.jobs {
            0 => work(),
            n => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool")
                .install(work),
        };
        let mut parts = parts.into_iter();
        let first = parts.next().unwrap_or_else(&init);
        parts.fold(first, merge)
    }

    pub fn count(&self) -> u64 {
        self.fold(|| 0u64, |n, _| *n += 1, |a, b| a + b)
    }

    /// Members in lexicographic order, buffered per chunk.
    pub fn members(&self) -> Vec<Vec<i128>> {
        self.fold(
            Vec::new,
            |v, a| v.push(a.to_vec()),
            |mut a, mut b| {
                a.append(&mut b);
                a
            },
        )
    }

    /// Serialized delivery in lexicographic order.
    pub fn for_each_ordered(&self, mut visitor: impl FnMut(&WeilCoefficients)) -> u64 {
        let members = self.members();
        for a in &members {
            visitor(&to_weil(a));
        }
        members.len() as u64
    }

    /// Concurrent delivery; the visitor may run on several threads at once.
    pub fn for_each_concurrent(&self, visitor: impl Fn(&WeilCoefficients) + Sync) -> u64 {
        self.fold(
            || 0u64,
            |n, a| {
                visitor(&to_weil(a));
                *n += 1;
            },
            |a, b| a + b,
        )
    }

    fn visit_chunk(&self, lo: i128, hi: i128, f: &mut dyn FnMut(&[i128])) {
        let mut prefix = Vec::with_capacity(self.g());
        if self.g() == 1 {
            self.scan_last(&mut prefix, lo, hi, f);
            return;
        }
        let pruner = Pruner::new(&self.tester);
        for a1 in lo..=hi {
            prefix.push(a1);
            if self.feasible(&pruner, &prefix) {
                self.descend(&pruner, &mut prefix, f);
            }
            prefix.pop();
        }
    }

    fn feasible(&self, pruner: &Pruner<'_>, prefix: &[i128]) -> bool {
        !self.options.prune || pruner.check(&kernel::widen(prefix)) == Feasibility::Maybe
    }

    fn descend(&self, pruner: &Pruner<'_>, prefix: &mut Vec<i128>, f: &mut dyn FnMut(&[i128])) {
        let k = prefix.len();
        let b = self.bounds[k];
        if k + 1 == self.g() {
            self.scan_last(prefix, -b, b, f);
            return;
        }
        for c in -b..=b {
            prefix.push(c);
            if self.feasible(pruner, prefix) {
                self.descend(pruner, prefix, f);
            }
            prefix.pop();
        }
    }

    fn test(&self, prefix: &mut Vec<i128>, c: i128) -> bool {
        prefix.push(c);
        let r = self.tester.is_member_small(prefix);
        prefix.pop();
        r
    }

    fn emit(prefix: &mut Vec<i128>, c: i128, f: &mut dyn FnMut(&[i128])) {
        prefix.push(c);
        f(prefix);
        prefix.pop();
    }

    fn scan_last(&self, prefix: &mut Vec<i128>, lo: i128, hi: i128, f: &mut dyn FnMut(&[i128])) {
        if self.options.prune {
            if let Some(hint) = self.last_coordinate_hint(prefix) {
                let c0 = hint.clamp(lo, hi);
                let seed = [0i128, -1, 1, -2, 2]
                    .into_iter()
                    .map(|d| c0 + d)
                    .find(|&c| (lo..=hi).contains(&c) && self.test(prefix, c));
                if let Some(m) = seed {
                    let mut start = m;
                    while start > lo && self.test(prefix, start - 1) {
                        start -= 1;
                    }
                    let mut end = m;
                    while end < hi && self.test(prefix, end + 1) {
                        end += 1;
                    }
                    for c in start..=end {
                        Self::emit(prefix, c, f);
                    }
                    return;
                }
            }
        }
        for c in lo..=hi {
            if self.test(prefix, c) {
                Self::emit(prefix, c, f);
            }
        }
    }

    /// Floating-point estimate of the centre of the feasible `a_g` range for
    /// `h = h_0 + a_g`: the shift must keep local maxima non-negative, local
    /// minima non-positive, and the correct signs at both endpoints.
    fn last_coordinate_hint(&self, prefix: &[i128]) -> Option<i128> {
        let g = self.g();
        let mut padded = kernel::widen(prefix);
        padded.push(BigInt::zero());
        let h0: Vec<f64> = weil::real_weil_coefficients(&padded, self.tester.family())
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect();
        let eval = |x: f64| h0.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        let half_width = 2.0 * self.q().q_f64().sqrt();
        let mut lo = -eval(half_width);
        let mut hi = f64::INFINITY;
        let left = -eval(-half_width);
        if g.is_multiple_of(2) {
            lo = lo.max(left);
        } else {
            hi = hi.min(left);
        }
        if g >= 2 {
            let dh: Vec<f64> = h0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| k as f64 * c)
                .collect();
            let approx = numeric::numeric_roots_f64(&dh).ok()?;
            let mut crit: Vec<f64> = Vec::with_capacity(g - 1);
            for z in &approx.roots {
                if z.im.abs() > 1e-6 * (1.0 + z.re.abs()) {
                    return None;
                }
                crit.push(z.re);
            }
            crit.sort_by(f64::total_cmp);
            for (j, &x) in crit.iter().enumerate() {
                let value = -eval(x);
                if (g - 2 - j).is_multiple_of(2) {
                    // local minimum of h_0
                    hi = hi.min(value);
                } else {
                    lo = lo.max(value);
                }
            }
        }
        let mid = (lo + hi) / 2.0;
        (mid.is_finite() && lo <= hi + 1.0).then(|| mid.round() as i128)
    }
}

fn to_weil(a: &[i128]) -> WeilCoefficients {
    WeilCoefficients::new(kernel::widen(a)).expect("g >= 1")
}

/// Visits every member of `Lambda_q ∩ V_g` in lexicographic order.
pub fn enumerate_members(
    g: usize,
    q: &PrimePower,
    visitor: impl FnMut(&WeilCoefficients),
) -> Result<u64> {
    Ok(Enumerator::new(g, q, EnumerationOptions::default())?.for_each_ordered(visitor))
}

pub(crate) fn small_divisible(a: i128, d: &BigInt) -> bool {
    match d.to_i128() {
        Some(d) => a % d == 0,
        // |a| < d
        None => a == 0,
    }
}
