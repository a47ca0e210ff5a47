//! Coefficient data model for Weil q-polynomials
//!
//! A Weil polynomial of dimension `g` over `F_q` has the shape
//!
//! ```text
//! P(T) = (T^2g + q^g) + a_1 (T^(2g-1) + q^(g-1) T) + ... + a_(g-1) (T^(g+1) + q T^(g-1)) + a_g T^g
//! ```
//!
//! and is determined by `(a_1, ..., a_g)`. The real Weil polynomial `h` is
//! the monic degree-`g` integer polynomial with `P(T) = T^g h(T + q/T)`.
//! All arithmetic here is exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive, Zero};

use crate::error::{Result, WeilError};
use crate::kernel;
use crate::poly::IntPolynomial;
use crate::real_rooted::RealWeilPoly;

/// `q = p^r` together with `s`, the smallest power of `p` with `q | s^2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimePower {
    p: u64,
    r: u32,
    q: BigInt,
    s: BigInt,
    sqrt_q: Option<BigInt>,
}

impl PrimePower {
    pub fn new(p: u64, r: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(WeilError::NotPrime(p));
        }
        if r < 1 {
            return Err(WeilError::InvalidExponent(r));
        }
        let pb = BigInt::from(p);
        let q = Pow::pow(&pb, r);
        let s = Pow::pow(&pb, r.div_ceil(2));
        let sqrt_q = r.is_multiple_of(2).then(|| Pow::pow(&pb, r / 2));
        Ok(Self { p, r, q, s, sqrt_q })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn s(&self) -> &BigInt {
        &self.s
    }

    /// `sqrt(q)` when `r` is even.
    pub fn sqrt_q(&self) -> Option<&BigInt> {
        self.sqrt_q.as_ref()
    }

    pub fn is_square(&self) -> bool {
        self.sqrt_q.is_some()
    }

    pub fn q_f64(&self) -> f64 {
        self.q.to_f64().unwrap_or(f64::INFINITY)
    }

    /// `r(q) = 1 - 1/p`.
    pub fn ordinary_density(&self) -> f64 {
        1.0 - 1.0 / self.p as f64
    }

    /// Validates an auxiliary prime `ell != p`.
    pub fn check_ell(&self, ell: u64) -> Result<()> {
        if !is_prime(ell) {
            return Err(WeilError::EllNotPrime(ell));
        }
        if ell == self.p {
            return Err(WeilError::EllEqualsP(ell));
        }
        Ok(())
    }

    pub(crate) fn interval_big(&self) -> kernel::Interval<BigInt> {
        kernel::Interval {
            q: self.q.clone(),
            four_q: &self.q * 4,
            sqrt_q: self.sqrt_q.clone(),
        }
    }

    pub(crate) fn interval_i128(&self) -> Option<kernel::Interval<i128>> {
        let q = self.q.to_i128()?;
        Some(kernel::Interval {
            q,
            four_q: q.checked_mul(4)?,
            sqrt_q: match &self.sqrt_q {
                Some(t) => Some(t.to_i128()?),
                None => None,
            },
        })
    }
}

/// Convenience constructor mirroring [`PrimePower::new`].
pub fn make_prime_power(p: u64, r: u32) -> Result<PrimePower> {
    PrimePower::new(p, r)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    let d = (n - 1) >> (n - 1).trailing_zeros();
    let twos = (n - 1).trailing_zeros();
    'witness: for a in SMALL {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..twos {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The integer vector `(a_1, ..., a_g)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeilCoefficients {
    a: Vec<BigInt>,
}

impl WeilCoefficients {
    pub fn new(a: Vec<BigInt>) -> Result<Self> {
        if a.is_empty() {
            return Err(WeilError::InvalidDimension);
        }
        Ok(Self { a })
    }

    pub fn from_i64(a: &[i64]) -> Result<Self> {
        Self::new(a.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn g(&self) -> usize {
        self.a.len()
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.a
    }

    /// `a_i` for `1 <= i <= g`.
    pub fn a(&self, i: usize) -> &BigInt {
        &self.a[i - 1]
    }

    pub fn last(&self) -> &BigInt {
        self.a.last().expect("g >= 1")
    }
}

/// `c_0, ..., c_n` with `c_0 = 2`, `c_1 = x`, `c_(k+1) = x c_k - q c_(k-1)`,
/// so that `T^k + q^k / T^k = c_k(T + q/T)`.
pub(crate) fn chebyshev_family(n: usize, q: &BigInt) -> Vec<IntPolynomial> {
    let mut out = vec![IntPolynomial::constant(BigInt::from(2))];
    if n == 0 {
        return out;
    }
    out.push(IntPolynomial::x());
    let x = IntPolynomial::x();
    for k in 1..n {
        let next = &(&x * &out[k]) - &out[k - 1].scale(q);
        out.push(next);
    }
    out
}

/// `c_k` for the given `q`.
pub fn chebyshev_like(k: usize, q: &PrimePower) -> IntPolynomial {
    chebyshev_family(k, q.q())
        .pop()
        .expect("family is non-empty")
}

/// Coefficients of `h = c_g + a_1 c_(g-1) + ... + a_(g-1) c_1 + a_g`, given
/// the family `c_0..=c_g`.
pub(crate) fn real_weil_coefficients(a: &[BigInt], family: &[IntPolynomial]) -> Vec<BigInt> {
    let g = a.len();
    let mut h: Vec<BigInt> = family[g].coefficients().to_vec();
    for (i, ai) in a.iter().enumerate().take(g - 1) {
        if ai.is_zero() {
            continue;
        }
        for (k, c) in family[g - 1 - i].coefficients().iter().enumerate() {
            h[k] += ai * c;
        }
    }
    h[0] += &a[g - 1];
    h
}

/// The real Weil polynomial `h` with `T^g h(T + q/T) = P(T)`.
pub fn to_real_weil(w: &WeilCoefficients, q: &PrimePower) -> RealWeilPoly {
    let family = chebyshev_family(w.g(), q.q());
    let h = IntPolynomial::new(real_weil_coefficients(w.coefficients(), &family));
    RealWeilPoly::from_parts(w.g(), h, q.clone())
}

/// The full degree-`2g` polynomial `P(T)`.
pub fn weil_polynomial(w: &WeilCoefficients, q: &PrimePower) -> IntPolynomial {
    let g = w.g();
    let mut c = vec![BigInt::zero(); 2 * g + 1];
    c[2 * g] = BigInt::one();
    c[0] = Pow::pow(q.q(), g as u32);
    for i in 1..g {
        c[2 * g - i] = w.a(i).clone();
        c[i] = w.a(i) * Pow::pow(q.q(), (g - i) as u32);
    }
    c[g] = w.last().clone();
    IntPolynomial::new(c)
}

/// `P(x)`, exactly.
pub fn eval_p(w: &WeilCoefficients, q: &PrimePower, x: &BigInt) -> BigInt {
    let g = w.g();
    let qp = |e: usize| Pow::pow(q.q(), e as u32);
    let xp = |e: usize| Pow::pow(x, e as u32);
    let mut acc = xp(2 * g) + qp(g);
    for i in 1..g {
        acc += w.a(i) * (xp(2 * g - i) + qp(g - i) * xp(i));
    }
    acc + w.last() * xp(g)
}

/// `(a_1 mod ell, ..., a_g mod ell)`, each in `[0, ell)`.
pub fn residue_vector(w: &WeilCoefficients, ell: u64) -> Vec<u64> {
    let m = BigInt::from(ell);
    w.coefficients()
        .iter()
        .map(|a| a.mod_floor(&m).to_u64().expect("reduced residue fits"))
        .collect()
}

/// `P(1) mod ell` from a residue vector, using
/// `P(1) = (1 + q^g) + sum_(i<g) a_i (1 + q^(g-i)) + a_g`.
pub fn p_at_one_mod(residues: &[u64], q: &PrimePower, ell: u64) -> u64 {
    let g = residues.len();
    let l = ell as u128;
    let qm = q.q().mod_floor(&BigInt::from(ell)).to_u64().expect("fits") as u128;
    let mut powers = vec![1u128; g + 1];
    for k in 1..=g {
        powers[k] = powers[k - 1] * qm % l;
    }
    let mut acc = (1 + powers[g]) % l;
    for (i, &m) in residues.iter().enumerate().take(g - 1) {
        let weight = (1 + powers[g - 1 - i]) % l;
        acc = (acc + m as u128 * weight) % l;
    }
    acc = (acc + residues[g - 1] as u128) % l;
    acc as u64
}
