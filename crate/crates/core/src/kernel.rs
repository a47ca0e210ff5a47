//! Exact univariate polynomial kernels over the integers.
//!
//! The same code runs on checked `i128` (hot path) and on `BigInt`. Any
//! `i128` overflow surfaces as [`Overflow`], and callers redo the whole
//! computation on `BigInt`, so results never depend on which path ran.
//!
//! Polynomials are coefficient vectors, lowest degree first, with no
//! trailing zeros; the zero polynomial is the empty vector.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Overflow;

pub(crate) type K<T> = Result<T, Overflow>;

pub(crate) trait Scalar: Clone + PartialEq + Debug {
    fn zero() -> Self;
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    fn signum(&self) -> i32;
    fn add(&self, o: &Self) -> K<Self>;
    fn sub(&self, o: &Self) -> K<Self>;
    fn mul(&self, o: &Self) -> K<Self>;
    fn neg(&self) -> K<Self>;
    /// Truncating division; `o` must be nonzero.
    fn div_rem(&self, o: &Self) -> K<(Self, Self)>;
    /// Non-negative gcd.
    fn gcd(&self, o: &Self) -> K<Self>;
}

impl Scalar for i128 {
    fn zero() -> Self {
        0
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn signum(&self) -> i32 {
        i128::signum(*self) as i32
    }
    fn add(&self, o: &Self) -> K<Self> {
        self.checked_add(*o).ok_or(Overflow)
    }
    fn sub(&self, o: &Self) -> K<Self> {
        self.checked_sub(*o).ok_or(Overflow)
    }
    fn mul(&self, o: &Self) -> K<Self> {
        self.checked_mul(*o).ok_or(Overflow)
    }
    fn neg(&self) -> K<Self> {
        self.checked_neg().ok_or(Overflow)
    }
    fn div_rem(&self, o: &Self) -> K<(Self, Self)> {
        Ok((
            self.checked_div(*o).ok_or(Overflow)?,
            self.checked_rem(*o).ok_or(Overflow)?,
        ))
    }
    fn gcd(&self, o: &Self) -> K<Self> {
        let mut a = self.checked_abs().ok_or(Overflow)?;
        let mut b = o.checked_abs().ok_or(Overflow)?;
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        Ok(a)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn signum(&self) -> i32 {
        match self.sign() {
            num_bigint::Sign::Minus => -1,
            num_bigint::Sign::NoSign => 0,
            num_bigint::Sign::Plus => 1,
        }
    }
    fn add(&self, o: &Self) -> K<Self> {
        Ok(self + o)
    }
    fn sub(&self, o: &Self) -> K<Self> {
        Ok(self - o)
    }
    fn mul(&self, o: &Self) -> K<Self> {
        Ok(self * o)
    }
    fn neg(&self) -> K<Self> {
        Ok(-self)
    }
    fn div_rem(&self, o: &Self) -> K<(Self, Self)> {
        Ok(Integer::div_rem(self, o))
    }
    fn gcd(&self, o: &Self) -> K<Self> {
        Ok(Integer::gcd(self, o))
    }
}

/// Converts a `BigInt` coefficient vector to `i128`, if every entry fits.
pub(crate) fn narrow(v: &[BigInt]) -> Option<Vec<i128>> {
    v.iter().map(|c| c.to_i128()).collect()
}

pub(crate) fn widen(v: &[i128]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

pub(crate) fn trim<T: Scalar>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

pub(crate) fn degree<T: Scalar>(v: &[T]) -> Option<usize> {
    v.len().checked_sub(1)
}

pub(crate) fn add<T: Scalar>(a: &[T], b: &[T]) -> K<Vec<T>> {
    let n = a.len().max(b.len());
    let zero = T::zero();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(a.get(i).unwrap_or(&zero).add(b.get(i).unwrap_or(&zero))?);
    }
    trim(&mut out);
    Ok(out)
}

pub(crate) fn sub<T: Scalar>(a: &[T], b: &[T]) -> K<Vec<T>> {
    let n = a.len().max(b.len());
    let zero = T::zero();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(a.get(i).unwrap_or(&zero).sub(b.get(i).unwrap_or(&zero))?);
    }
    trim(&mut out);
    Ok(out)
}

pub(crate) fn mul<T: Scalar>(a: &[T], b: &[T]) -> K<Vec<T>> {
    if a.is_empty() || b.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y)?)?;
        }
    }
    trim(&mut out);
    Ok(out)
}

pub(crate) fn scale<T: Scalar>(a: &[T], c: &T) -> K<Vec<T>> {
    let mut out = a.iter().map(|x| x.mul(c)).collect::<K<Vec<_>>>()?;
    trim(&mut out);
    Ok(out)
}

pub(crate) fn derivative<T: Scalar>(a: &[T]) -> K<Vec<T>> {
    let mut out = Vec::with_capacity(a.len().saturating_sub(1));
    for (i, c) in a.iter().enumerate().skip(1) {
        out.push(c.mul(&T::from_i64(i as i64))?);
    }
    trim(&mut out);
    Ok(out)
}

pub(crate) fn eval<T: Scalar>(a: &[T], x: &T) -> K<T> {
    let mut acc = T::zero();
    for c in a.iter().rev() {
        acc = acc.mul(x)?.add(c)?;
    }
    Ok(acc)
}

/// Non-negative gcd of the coefficients (zero for the zero polynomial).
pub(crate) fn content<T: Scalar>(a: &[T]) -> K<T> {
    let mut g = T::zero();
    for c in a {
        g = g.gcd(c)?;
    }
    Ok(g)
}

fn div_scalar<T: Scalar>(a: &[T], d: &T) -> K<Vec<T>> {
    a.iter().map(|c| c.div_rem(d).map(|(q, _)| q)).collect()
}

/// Divides by the positive content; signs are preserved.
pub(crate) fn primitive_keep_sign<T: Scalar>(a: &[T]) -> K<Vec<T>> {
    let c = content(a)?;
    if c.is_zero() || c == T::from_i64(1) {
        return Ok(a.to_vec());
    }
    div_scalar(a, &c)
}

/// Primitive part with positive leading coefficient.
pub(crate) fn normalize_positive<T: Scalar>(a: &[T]) -> K<Vec<T>> {
    let p = primitive_keep_sign(a)?;
    match p.last() {
        Some(lc) if lc.signum() < 0 => p.iter().map(|c| c.neg()).collect(),
        _ => Ok(p),
    }
}

/// Pseudo-remainder scaled by a positive factor: returns `R` with
/// `lambda * a = Q * b + R`, `lambda > 0`, `deg R < deg b`.
pub(crate) fn prem_positive<T: Scalar>(a: &[T], b: &[T]) -> K<Vec<T>> {
    let db = degree(b).expect("pseudo-division by the zero polynomial");
    let lb = &b[db];
    let mut r = a.to_vec();
    let mut steps = 0usize;
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next = Vec::with_capacity(r.len());
        for (i, c) in r.iter().enumerate() {
            let mut v = c.mul(lb)?;
            if i >= shift {
                if let Some(bc) = b.get(i - shift) {
                    v = v.sub(&lr.mul(bc)?)?;
                }
            }
            next.push(v);
        }
        trim(&mut next);
        r = next;
        steps += 1;
    }
    if lb.signum() < 0 && steps % 2 == 1 {
        r = r.iter().map(|c| c.neg()).collect::<K<Vec<_>>>()?;
    }
    Ok(r)
}

/// Primitive gcd with positive leading coefficient (primitive PRS).
pub(crate) fn gcd<T: Scalar>(a: &[T], b: &[T]) -> K<Vec<T>> {
    let mut x = normalize_positive(a)?;
    let mut y = normalize_positive(b)?;
    if degree(&x) < degree(&y) {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = prem_positive(&x, &y)?;
        x = y;
        y = normalize_positive(&r)?;
    }
    normalize_positive(&x)
}

/// Exact quotient `a / b` over the integers, or `None` if `b` does not
/// divide `a` in `Z[x]`.
pub(crate) fn div_exact<T: Scalar>(a: &[T], b: &[T]) -> K<Option<Vec<T>>> {
    let db = degree(b).expect("division by the zero polynomial");
    let lb = &b[db];
    let mut r = a.to_vec();
    let Some(da) = degree(&r) else {
        return Ok(Some(Vec::new()));
    };
    if da < db {
        return Ok(None);
    }
    let mut quot = vec![T::zero(); da - db + 1];
    while let Some(dr) = degree(&r) {
        if dr < db {
            return Ok(None);
        }
        let (qc, rem) = r[dr].div_rem(lb)?;
        if !rem.is_zero() {
            return Ok(None);
        }
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            r[i + shift] = r[i + shift].sub(&qc.mul(bc)?)?;
        }
        quot[shift] = qc;
        trim(&mut r);
    }
    Ok(Some(quot))
}

/// `f / gcd(f, f')`, primitive with positive leading coefficient.
pub(crate) fn squarefree<T: Scalar>(f: &[T]) -> K<Vec<T>> {
    let d = derivative(f)?;
    if d.is_empty() {
        return normalize_positive(f);
    }
    let g = gcd(f, &d)?;
    if degree(&g) == Some(0) {
        return normalize_positive(f);
    }
    let quot = div_exact(f, &g)?.expect("gcd divides its argument over Z by Gauss's lemma");
    normalize_positive(&quot)
}

pub(crate) fn is_squarefree<T: Scalar>(f: &[T]) -> K<bool> {
    let d = derivative(f)?;
    if d.is_empty() {
        return Ok(true);
    }
    Ok(degree(&gcd(f, &d)?) == Some(0))
}

/// Sturm chain up to positive scaling of each entry: `f`, `f'`, then
/// negated pseudo-remainders, until the remainder vanishes.
pub(crate) fn sturm_chain<T: Scalar>(f: &[T]) -> K<Vec<Vec<T>>> {
    let mut chain = vec![primitive_keep_sign(f)?];
    let d = derivative(f)?;
    if d.is_empty() {
        return Ok(chain);
    }
    chain.push(primitive_keep_sign(&d)?);
    loop {
        let n = chain.len();
        let r = prem_positive(&chain[n - 2], &chain[n - 1])?;
        if r.is_empty() {
            break;
        }
        let r = primitive_keep_sign(&r)?;
        chain.push(r.iter().map(|c| c.neg()).collect::<K<Vec<_>>>()?);
    }
    Ok(chain)
}

/// Exact sign of `u + v*sqrt(q)` for integers `u`, `v` and `q > 0`.
pub(crate) fn surd_sign<T: Scalar>(u: &T, v: &T, q: &T) -> K<i32> {
    let (su, sv) = (u.signum(), v.signum());
    if su == 0 {
        return Ok(sv);
    }
    if sv == 0 || su == sv {
        return Ok(su);
    }
    let lhs = u.mul(u)?;
    let rhs = q.mul(v)?.mul(v)?;
    let cmp = lhs.sub(&rhs)?.signum();
    Ok(match cmp {
        1 => su,
        -1 => sv,
        _ => 0,
    })
}

/// Writes `f(2*sigma*sqrt(q))` as `u + v*sqrt(q)` with integer `u`, `v`.
pub(crate) fn surd_parts<T: Scalar>(f: &[T], four_q: &T, sigma: i32) -> K<(T, T)> {
    let mut u = T::zero();
    let mut w = T::zero();
    for (k, c) in f.iter().enumerate().rev() {
        if k % 2 == 0 {
            u = u.mul(four_q)?.add(c)?;
        } else {
            w = w.mul(four_q)?.add(c)?;
        }
    }
    let v = w.mul(&T::from_i64(2 * sigma as i64))?;
    Ok((u, v))
}

fn sign_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut changes = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            changes += 1;
        }
        last = s;
    }
    changes
}

/// Parameters of the closed interval `[-2 sqrt(q), 2 sqrt(q)]`.
#[derive(Debug, Clone)]
pub(crate) struct Interval<T> {
    pub q: T,
    pub four_q: T,
    /// `sqrt(q)` when `q` is a perfect square.
    pub sqrt_q: Option<T>,
}

impl<T: Scalar> Interval<T> {
    fn sign_at(&self, f: &[T], sigma: i32) -> K<i32> {
        match &self.sqrt_q {
            Some(t) => {
                let e = t.mul(&T::from_i64(2 * sigma as i64))?;
                Ok(eval(f, &e)?.signum())
            }
            None => {
                let (u, v) = surd_parts(f, &self.four_q, sigma)?;
                surd_sign(&u, &v, &self.q)
            }
        }
    }

    /// Number of sign changes of the chain at `2*sigma*sqrt(q)`.
    pub(crate) fn variations(&self, chain: &[Vec<T>], sigma: i32) -> K<usize> {
        let signs = chain
            .iter()
            .map(|p| self.sign_at(p, sigma))
            .collect::<K<Vec<_>>>()?;
        Ok(sign_changes(signs.into_iter()))
    }
}

/// Distinct real roots of the squarefree `f` in the closed interval.
pub(crate) fn count_closed<T: Scalar>(f: &[T], iv: &Interval<T>) -> K<usize> {
    let mut f = f.to_vec();
    let mut count = 0;
    match &iv.sqrt_q {
        Some(t) => {
            for sigma in [-1i64, 1] {
                let e = t.mul(&T::from_i64(2 * sigma))?;
                if eval(&f, &e)?.is_zero() {
                    let lin = vec![e.neg()?, T::from_i64(1)];
                    f = div_exact(&f, &lin)?.expect("linear factor at a root divides");
                    count += 1;
                }
            }
        }
        None => {
            let quad = vec![iv.four_q.neg()?, T::zero(), T::from_i64(1)];
            if degree(&f) >= Some(2) {
                if let Some(quot) = div_exact(&f, &quad)? {
                    f = quot;
                    count += 2;
                }
            }
        }
    }
    if degree(&f).unwrap_or(0) == 0 {
        return Ok(count);
    }
    let chain = sturm_chain(&f)?;
    let left = iv.variations(&chain, -1)?;
    let right = iv.variations(&chain, 1)?;
    Ok(count + left.saturating_sub(right))
}

/// True iff every root of `f` (with multiplicity) is real and lies in the
/// closed interval. `f` must be nonzero.
pub(crate) fn all_roots_in_closed<T: Scalar>(f: &[T], iv: &Interval<T>) -> K<bool> {
    let sf = squarefree(f)?;
    let deg = degree(&sf).expect("nonzero input");
    Ok(count_closed(&sf, iv)? == deg)
}

#[cfg(test)]
fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.sign() == num_bigint::Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}
