//! Exact membership in `V_g`.
//!
//! A coefficient vector lies in `V_g` iff every root of its real Weil
//! polynomial `h` is real and lies in `[-2 sqrt(q), 2 sqrt(q)]`. The test
//! runs on the squarefree part of `h`: endpoint roots are split off by an
//! explicit divisibility test, and interior roots are counted with a Sturm
//! chain whose signs at `+-2 sqrt(q)` are evaluated exactly in `Z[sqrt(q)]`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Result, WeilError};
use crate::kernel::{self, Interval, Scalar};
use crate::poly::IntPolynomial;
use crate::weil::{self, PrimePower, WeilCoefficients};

/// Monic degree-`g` integer polynomial `h` with `P(T) = T^g h(T + q/T)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealWeilPoly {
    g: usize,
    h: IntPolynomial,
    q: PrimePower,
}

impl RealWeilPoly {
    pub(crate) fn from_parts(g: usize, h: IntPolynomial, q: PrimePower) -> Self {
        debug_assert!(h.is_monic() && h.degree() == Some(g));
        Self { g, h, q }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn h(&self) -> &IntPolynomial {
        &self.h
    }

    pub fn q(&self) -> &PrimePower {
        &self.q
    }
}

/// Exact value `u + v sqrt(q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdValue {
    pub u: BigRational,
    pub v: BigRational,
    pub q: BigInt,
}

impl SurdValue {
    pub fn new(u: BigRational, v: BigRational, q: BigInt) -> Self {
        assert!(q.is_positive(), "sqrt(q) needs q > 0");
        Self { u, v, q }
    }

    /// The endpoint `2 sigma sqrt(q)`.
    pub fn endpoint(q: &PrimePower, sigma: i32) -> Self {
        Self::new(
            BigRational::zero(),
            BigRational::from_integer(BigInt::from(2 * sigma)),
            q.q().clone(),
        )
    }

    pub fn sign(&self) -> Ordering {
        let (su, sv) = (sign_of(&self.u), sign_of(&self.v));
        if su == Ordering::Equal {
            return sv;
        }
        if sv == Ordering::Equal || su == sv {
            return su;
        }
        let lhs = &self.u * &self.u;
        let rhs = &self.v * &self.v * BigRational::from_integer(self.q.clone());
        match lhs.cmp(&rhs) {
            Ordering::Greater => su,
            Ordering::Less => sv,
            Ordering::Equal => Ordering::Equal,
        }
    }

    /// Evaluates an integer polynomial at `2 sigma sqrt(q)`.
    #[cfg(test)]
    fn of_poly_at_endpoint(f: &IntPolynomial, q: &BigInt, sigma: i32) -> Self {
        let (u, v) = kernel::surd_parts(f.coefficients(), &(q * 4), sigma)
            .expect("BigInt arithmetic cannot overflow");
        Self::new(
            BigRational::from_integer(u),
            BigRational::from_integer(v),
            q.clone(),
        )
    }
}

fn sign_of(x: &BigRational) -> Ordering {
    x.cmp(&BigRational::zero())
}

/// Sturm chain of a squarefree polynomial. Each entry is a positive
/// rational multiple of the classical chain `f, f', -rem(f, f'), ...`,
/// scaled to primitive integer coefficients; positive scaling leaves every
/// sign variation count unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SturmChain {
    entries: Vec<IntPolynomial>,
}

impl SturmChain {
    pub fn new(f: &IntPolynomial) -> Result<Self> {
        if f.is_zero() {
            return Err(WeilError::ZeroPolynomial);
        }
        if !is_squarefree(f) {
            return Err(WeilError::NotSquarefree);
        }
        let chain =
            kernel::sturm_chain(f.coefficients()).expect("BigInt arithmetic cannot overflow");
        Ok(Self {
            entries: chain.into_iter().map(IntPolynomial::new).collect(),
        })
    }

    pub fn entries(&self) -> &[IntPolynomial] {
        &self.entries
    }

    /// Sign changes of the chain at the given exact point.
    pub fn variations_at(&self, x: &SurdValue) -> usize {
        let mut last = Ordering::Equal;
        let mut changes = 0;
        for p in &self.entries {
            let s = eval_at_surd(p, x).sign();
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                changes += 1;
            }
            last = s;
        }
        changes
    }
}

/// Evaluates an integer polynomial at `u + v sqrt(q)` exactly.
pub fn eval_at_surd(f: &IntPolynomial, x: &SurdValue) -> SurdValue {
    let qr = BigRational::from_integer(x.q.clone());
    let mut u = BigRational::zero();
    let mut v = BigRational::zero();
    for c in f.coefficients().iter().rev() {
        let nu = &u * &x.u + &v * &x.v * &qr + BigRational::from_integer(c.clone());
        let nv = &u * &x.v + &v * &x.u;
        u = nu;
        v = nv;
    }
    SurdValue::new(u, v, x.q.clone())
}

pub fn is_squarefree(f: &IntPolynomial) -> bool {
    run(
        f.coefficients(),
        kernel::is_squarefree,
        kernel::is_squarefree,
    )
}

/// `f / gcd(f, f')` with primitive integer coefficients and positive
/// leading coefficient.
pub fn squarefree_part(f: &IntPolynomial) -> Result<IntPolynomial> {
    if f.is_zero() {
        return Err(WeilError::ZeroPolynomial);
    }
    Ok(IntPolynomial::new(run_vec(
        f.coefficients(),
        kernel::squarefree,
        kernel::squarefree,
    )))
}

/// Distinct real roots of the squarefree `f` in `[-2 sqrt(q), 2 sqrt(q)]`.
pub fn count_real_roots_in_closed_interval(f: &IntPolynomial, q: &PrimePower) -> Result<usize> {
    if f.is_zero() {
        return Err(WeilError::ZeroPolynomial);
    }
    if !is_squarefree(f) {
        return Err(WeilError::NotSquarefree);
    }
    let coeffs = f.coefficients();
    if let (Some(small), Some(iv)) = (kernel::narrow(coeffs), q.interval_i128()) {
        if let Ok(n) = kernel::count_closed(&small, &iv) {
            return Ok(n);
        }
    }
    Ok(kernel::count_closed(coeffs, &q.interval_big()).expect("BigInt arithmetic cannot overflow"))
}

/// True iff all roots of `f` (nonzero, degree >= 1) are real and lie in
/// `[-2 sqrt(q), 2 sqrt(q)]`.
pub fn all_roots_in_interval(f: &IntPolynomial, q: &PrimePower) -> bool {
    let sf = squarefree_part(f).expect("nonzero polynomial");
    count_real_roots_in_closed_interval(&sf, q).expect("squarefree by construction")
        == sf.degree().expect("nonzero")
}

/// Membership of `(a_1, ..., a_g)` in `Lambda_q ∩ V_g`.
pub fn is_member(w: &WeilCoefficients, q: &PrimePower) -> bool {
    MemberTester::new(w.g(), q).is_member(w.coefficients())
}

fn run<R>(
    f: &[BigInt],
    small: impl Fn(&[i128]) -> kernel::K<R>,
    big: impl Fn(&[BigInt]) -> kernel::K<R>,
) -> R {
    if let Some(s) = kernel::narrow(f) {
        if let Ok(r) = small(&s) {
            return r;
        }
    }
    big(f).expect("BigInt arithmetic cannot overflow")
}

fn run_vec(
    f: &[BigInt],
    small: impl Fn(&[i128]) -> kernel::K<Vec<i128>>,
    big: impl Fn(&[BigInt]) -> kernel::K<Vec<BigInt>>,
) -> Vec<BigInt> {
    if let Some(s) = kernel::narrow(f) {
        if let Ok(r) = small(&s) {
            return kernel::widen(&r);
        }
    }
    big(f).expect("BigInt arithmetic cannot overflow")
}

/// Reusable membership tester for one `(g, q)`: caches the `c_k` family
/// in both exact representations.
#[derive(Clone, Debug)]
pub struct MemberTester {
    g: usize,
    q: PrimePower,
    family: Vec<IntPolynomial>,
    family_small: Option<Vec<Vec<i128>>>,
    iv_small: Option<Interval<i128>>,
    iv_big: Interval<BigInt>,
}

impl MemberTester {
    pub fn new(g: usize, q: &PrimePower) -> Self {
        let family = weil::chebyshev_family(g, q.q());
        let family_small = family
            .iter()
            .map(|c| kernel::narrow(c.coefficients()))
            .collect();
        Self {
            g,
            q: q.clone(),
            family,
            family_small,
            iv_small: q.interval_i128(),
            iv_big: q.interval_big(),
        }
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn q(&self) -> &PrimePower {
        &self.q
    }

    pub(crate) fn family(&self) -> &[IntPolynomial] {
        &self.family
    }

    pub fn is_member(&self, a: &[BigInt]) -> bool {
        assert_eq!(a.len(), self.g, "coefficient vector has wrong length");
        if let Some(small) = kernel::narrow(a) {
            if let Some(r) = self.small_path(&small) {
                return r;
            }
        }
        let h = weil::real_weil_coefficients(a, &self.family);
        kernel::all_roots_in_closed(&h, &self.iv_big).expect("BigInt arithmetic cannot overflow")
    }

    /// Same as [`is_member`](Self::is_member) for machine-sized coefficients.
    pub fn is_member_small(&self, a: &[i128]) -> bool {
        assert_eq!(a.len(), self.g, "coefficient vector has wrong length");
        if let Some(r) = self.small_path(a) {
            return r;
        }
        let big = kernel::widen(a);
        let h = weil::real_weil_coefficients(&big, &self.family);
        kernel::all_roots_in_closed(&h, &self.iv_big).expect("BigInt arithmetic cannot overflow")
    }

    fn small_path(&self, a: &[i128]) -> Option<bool> {
        let (fam, iv) = (self.family_small.as_ref()?, self.iv_small.as_ref()?);
        let h = real_weil_small(a, fam).ok()?;
        kernel::all_roots_in_closed(&h, iv).ok()
    }

    /// Root-location test for an arbitrary nonzero polynomial against this
    /// tester's interval.
    pub(crate) fn roots_in_interval(&self, f: &[BigInt]) -> bool {
        if let (Some(small), Some(iv)) = (kernel::narrow(f), self.iv_small.as_ref()) {
            if let Ok(r) = kernel::all_roots_in_closed(&small, iv) {
                return r;
            }
        }
        kernel::all_roots_in_closed(f, &self.iv_big).expect("BigInt arithmetic cannot overflow")
    }
}

fn real_weil_small(a: &[i128], family: &[Vec<i128>]) -> kernel::K<Vec<i128>> {
    let g = a.len();
    let mut h = family[g].clone();
    for (i, ai) in a.iter().enumerate().take(g - 1) {
        if *ai == 0 {
            continue;
        }
        for (k, c) in family[g - 1 - i].iter().enumerate() {
            h[k] = h[k].add(&ai.mul(c)?)?;
        }
    }
    h[0] = h[0].add(&a[g - 1])?;
    Ok(h)
}
