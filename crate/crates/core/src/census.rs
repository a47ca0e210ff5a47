//! Exact lattice-point censuses over one `(g, q)` and sweeps over `r`.
//!
//! Lattice points of `Lambda_q ∩ V_g` stand in for isogeny classes: the
//! ordinary ones (`p` does not divide `a_g`) correspond exactly, and the
//! remaining isogeny classes lie among the `Lambda''_q` points, so exact
//! isogeny-class counts are bracketed by `[ordinary, ordinary + lambda2]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Pow, ToPrimitive};

use crate::error::{Result, WeilError};
use crate::kernel;
use crate::lattice::{check_residues, small_divisible, EnumerationOptions, Enumerator};
use crate::volume::VolumeEstimate;
use crate::weil::{self, PrimePower, WeilCoefficients};

const MAX_CLASSES: u64 = 1 << 22;

/// Target residues `(m_1, ..., m_g)` modulo `ell`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueClass {
    ell: u64,
    m: Vec<u64>,
}

impl ResidueClass {
    pub fn new(ell: u64, m: Vec<u64>) -> Result<Self> {
        if !weil::is_prime(ell) {
            return Err(WeilError::EllNotPrime(ell));
        }
        check_residues(m.len(), ell, &m)?;
        if m.is_empty() {
            return Err(WeilError::InvalidDimension);
        }
        Ok(Self { ell, m })
    }

    /// Reduces arbitrary integers modulo `ell`.
    pub fn reduce(ell: u64, m: &[i64]) -> Result<Self> {
        let reduced = m.iter().map(|&v| v.rem_euclid(ell as i64) as u64).collect();
        Self::new(ell, reduced)
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn residues(&self) -> &[u64] {
        &self.m
    }

    pub fn g(&self) -> usize {
        self.m.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCount {
    pub m: Vec<u64>,
    pub total: u64,
    pub ordinary: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CensusCounts {
    pub g: usize,
    pub q: PrimePower,
    pub ell: u64,
    /// `#(Lambda_q ∩ V_g)`
    pub total: u64,
    /// `#((Lambda_q \ Lambda'_q) ∩ V_g)`
    pub ordinary: u64,
    /// `#(Lambda'_q ∩ V_g)`
    pub prime_sub: u64,
    /// `#(Lambda''_q ∩ V_g)`
    pub lambda2: u64,
    /// Every class in lexicographic order of `m`, including empty ones.
    pub per_residue: Vec<ClassCount>,
    /// Members with `ell | P(1)`.
    pub congruence_total: u64,
    pub congruence_ordinary: u64,
    /// Number of residue classes selected by `ell | P(1)`; always `ell^(g-1)`.
    pub congruence_classes: u64,
}

impl CensusCounts {
    pub fn class(&self, m: &[u64]) -> Option<&ClassCount> {
        let idx = class_index(m, self.ell)?;
        self.per_residue.get(idx)
    }

    /// Bracket `[ordinary, ordinary + lambda2]` for the isogeny-class count.
    pub fn isogeny_bracket(&self) -> (u64, u64) {
        (self.ordinary, self.ordinary + self.lambda2)
    }
}

fn class_index(m: &[u64], ell: u64) -> Option<usize> {
    m.iter().try_fold(0usize, |acc, &v| {
        (v < ell).then(|| acc * ell as usize + v as usize)
    })
}

fn class_of_index(mut idx: usize, ell: u64, g: usize) -> Vec<u64> {
    let mut m = vec![0; g];
    for slot in m.iter_mut().rev() {
        *slot = (idx % ell as usize) as u64;
        idx /= ell as usize;
    }
    m
}

#[derive(Clone, Debug)]
struct Tally {
    total: u64,
    ordinary: u64,
    prime_sub: u64,
    lambda2: u64,
    buckets: Vec<(u64, u64)>,
}

impl Tally {
    fn new(classes: usize) -> Self {
        Self {
            total: 0,
            ordinary: 0,
            prime_sub: 0,
            lambda2: 0,
            buckets: vec![(0, 0); classes],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.total += other.total;
        self.ordinary += other.ordinary;
        self.prime_sub += other.prime_sub;
        self.lambda2 += other.lambda2;
        for (a, b) in self.buckets.iter_mut().zip(other.buckets) {
            a.0 += b.0;
            a.1 += b.1;
        }
        self
    }
}

fn census_enumerator(
    g: usize,
    q: &PrimePower,
    ell: u64,
    options: EnumerationOptions,
) -> Result<Enumerator> {
    q.check_ell(ell)?;
    Enumerator::new(g, q, options)
}

pub fn run_census(g: usize, q: &PrimePower, ell: u64) -> Result<CensusCounts> {
    run_census_with(g, q, ell, EnumerationOptions::default())
}

/// Single enumeration pass filling every count.
pub fn run_census_with(
    g: usize,
    q: &PrimePower,
    ell: u64,
    options: EnumerationOptions,
) -> Result<CensusCounts> {
    let en = census_enumerator(g, q, ell, options)?;
    let classes = (ell as u128).pow(g as u32);
    if classes > MAX_CLASSES as u128 {
        return Err(WeilError::TooManyClasses { ell, g });
    }
    let classes = classes as usize;
    let p = BigInt::from(q.p());
    let s = q.s().clone();
    let tally = en.fold(
        || Tally::new(classes),
        |t, a| {
            let last = *a.last().expect("g >= 1");
            let in_prime_sub = small_divisible(last, &p);
            t.total += 1;
            if in_prime_sub {
                t.prime_sub += 1;
            } else {
                t.ordinary += 1;
            }
            if small_divisible(last, &s) {
                t.lambda2 += 1;
            }
            let idx = a.iter().fold(0usize, |acc, &v| {
                acc * ell as usize + v.rem_euclid(ell as i128) as usize
            });
            let bucket = &mut t.buckets[idx];
            bucket.0 += 1;
            if !in_prime_sub {
                bucket.1 += 1;
            }
        },
        Tally::merge,
    );

    let mut per_residue = Vec::with_capacity(classes);
    let (mut congruence_total, mut congruence_ordinary, mut selected) = (0, 0, 0u64);
    for (idx, &(total, ordinary)) in tally.buckets.iter().enumerate() {
        let m = class_of_index(idx, ell, g);
        if weil::p_at_one_mod(&m, q, ell) == 0 {
            selected += 1;
            congruence_total += total;
            congruence_ordinary += ordinary;
        }
        per_residue.push(ClassCount { m, total, ordinary });
    }
    let expected = ell.pow(g as u32 - 1);
    if selected != expected {
        return Err(WeilError::ClassCount {
            expected,
            found: selected,
        });
    }
    Ok(CensusCounts {
        g,
        q: q.clone(),
        ell,
        total: tally.total,
        ordinary: tally.ordinary,
        prime_sub: tally.prime_sub,
        lambda2: tally.lambda2,
        per_residue,
        congruence_total,
        congruence_ordinary,
        congruence_classes: selected,
    })
}

/// Members with `a ≡ m (mod ell)` componentwise.
pub fn count_residue_class(g: usize, q: &PrimePower, cls: &ResidueClass) -> Result<u64> {
    count_residue_class_with(g, q, cls, EnumerationOptions::default())
}

pub fn count_residue_class_with(
    g: usize,
    q: &PrimePower,
    cls: &ResidueClass,
    options: EnumerationOptions,
) -> Result<u64> {
    if cls.g() != g {
        return Err(WeilError::ResidueLength {
            expected: g,
            found: cls.g(),
        });
    }
    let en = census_enumerator(g, q, cls.ell(), options)?;
    let ell = cls.ell() as i128;
    Ok(en.fold(
        || 0u64,
        |n, a| {
            if a.iter()
                .zip(cls.residues())
                .all(|(&v, &m)| v.rem_euclid(ell) as u64 == m)
            {
                *n += 1;
            }
        },
        |a, b| a + b,
    ))
}

/// Members with `P(x) ≡ y (mod ell)`.
pub fn point_count_congruence(
    g: usize,
    q: &PrimePower,
    ell: u64,
    x: &BigInt,
    y: &BigInt,
) -> Result<u64> {
    point_count_congruence_with(g, q, ell, x, y, EnumerationOptions::default())
}

pub fn point_count_congruence_with(
    g: usize,
    q: &PrimePower,
    ell: u64,
    x: &BigInt,
    y: &BigInt,
    options: EnumerationOptions,
) -> Result<u64> {
    let en = census_enumerator(g, q, ell, options)?;
    let modulus = BigInt::from(ell);
    let target = y.mod_floor(&modulus);
    Ok(en.fold(
        || 0u64,
        |n, a| {
            let w = WeilCoefficients::new(kernel::widen(a)).expect("g >= 1");
            if weil::eval_p(&w, q, x).mod_floor(&modulus) == target {
                *n += 1;
            }
        },
        |a, b| a + b,
    ))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub r: u32,
    pub q: BigInt,
    pub total: u64,
    pub congruence_total: u64,
    pub class_total: u64,
    /// Fraction of members with `ell ∤ P(1)`.
    pub d_frac: f64,
    /// Fraction of members with `ell | P(1)`.
    pub congruence_frac: f64,
    /// Fraction of members in the target residue class.
    pub e_frac: f64,
    pub dev_d: f64,
    pub dev_e: f64,
    pub sqrt_q_dev_d: f64,
    pub sqrt_q_dev_e: f64,
}

impl SweepRow {
    pub fn from_census(c: &CensusCounts, cls: &ResidueClass) -> Result<Self> {
        if cls.ell() != c.ell {
            return Err(WeilError::EllNotPrime(cls.ell()));
        }
        let class_total = c
            .class(cls.residues())
            .ok_or(WeilError::ResidueLength {
                expected: c.g,
                found: cls.g(),
            })?
            .total;
        let ell = c.ell as f64;
        let total = c.total as f64;
        let d_frac = (c.total - c.congruence_total) as f64 / total;
        let congruence_frac = c.congruence_total as f64 / total;
        let e_frac = class_total as f64 / total;
        let dev_d = (d_frac - (ell - 1.0) / ell).abs();
        let dev_e = (e_frac - ell.powi(-(c.g as i32))).abs();
        let sqrt_q = c.q.q_f64().sqrt();
        Ok(Self {
            r: c.q.r(),
            q: c.q.q().clone(),
            total: c.total,
            congruence_total: c.congruence_total,
            class_total,
            d_frac,
            congruence_frac,
            e_frac,
            dev_d,
            dev_e,
            sqrt_q_dev_d: sqrt_q * dev_d,
            sqrt_q_dev_e: sqrt_q * dev_e,
        })
    }
}

/// One census per `r` in `r_min..=r_max`.
pub fn sweep(
    g: usize,
    p: u64,
    ell: u64,
    r_min: u32,
    r_max: u32,
    cls: &ResidueClass,
    options: EnumerationOptions,
) -> Result<Vec<SweepRow>> {
    sweep_with(g, p, ell, r_min, r_max, cls, |q| {
        run_census_with(g, q, ell, options)
    })
}

/// Like [`sweep`], with a caller-supplied census source (e.g. a cache).
pub fn sweep_with(
    g: usize,
    p: u64,
    ell: u64,
    r_min: u32,
    r_max: u32,
    cls: &ResidueClass,
    mut census: impl FnMut(&PrimePower) -> Result<CensusCounts>,
) -> Result<Vec<SweepRow>> {
    if r_min < 1 {
        return Err(WeilError::InvalidExponent(r_min));
    }
    if r_min > r_max {
        return Err(WeilError::EmptyRange { r_min, r_max });
    }
    if cls.g() != g {
        return Err(WeilError::ResidueLength {
            expected: g,
            found: cls.g(),
        });
    }
    if cls.ell() != ell {
        return Err(WeilError::EllNotPrime(cls.ell()));
    }
    let at = |r: u32| {
        move |e: WeilError| WeilError::Sweep {
            r,
            source: Box::new(e),
        }
    };
    (r_min..=r_max)
        .map(|r| {
            let q = PrimePower::new(p, r).map_err(at(r))?;
            let c = census(&q).map_err(at(r))?;
            SweepRow::from_census(&c, cls).map_err(at(r))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassBound {
    pub m: Vec<u64>,
    pub leading: f64,
    pub normalized_residual: f64,
}

/// Leading term `v_g r(q) q^(g(g+1)/4)` against the ordinary count, and
/// `v_g q^(g(g+1)/4)` against the full lattice count. Residuals are divided
/// by `q^(g(g+1)/4 - 1/2)` (times `ell^(1-g)` for single classes).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub g: usize,
    pub q: BigInt,
    pub volume: f64,
    pub volume_std_err: f64,
    /// `r(q) = 1 - 1/p`
    pub ordinary_density: f64,
    pub leading: f64,
    pub leading_std_err: f64,
    pub normalized_residual: f64,
    pub normalized_residual_std_err: f64,
    pub total_leading: f64,
    pub total_normalized_residual: f64,
    pub classes: Vec<ClassBound>,
}

pub fn bound_report(c: &CensusCounts, v: &VolumeEstimate) -> Result<BoundReport> {
    if v.g != c.g {
        return Err(WeilError::DimensionMismatch {
            census: c.g,
            volume: v.g,
        });
    }
    let q = c.q.q_f64();
    let g = c.g as f64;
    let ell = c.ell as f64;
    let scale = q.powf(g * (g + 1.0) / 4.0);
    let error_scale = q.powf(g * (g + 1.0) / 4.0 - 0.5);
    let density = c.q.ordinary_density();
    let leading = v.mean * density * scale;
    let leading_std_err = v.std_err * density * scale;
    let total_leading = v.mean * scale;
    let class_leading = leading * ell.powf(-g);
    let class_scale = error_scale * ell.powf(1.0 - g);
    let classes = c
        .per_residue
        .iter()
        .map(|k| ClassBound {
            m: k.m.clone(),
            leading: class_leading,
            normalized_residual: (k.ordinary as f64 - class_leading) / class_scale,
        })
        .collect();
    Ok(BoundReport {
        g: c.g,
        q: c.q.q().clone(),
        volume: v.mean,
        volume_std_err: v.std_err,
        ordinary_density: density,
        leading,
        leading_std_err,
        normalized_residual: (c.ordinary as f64 - leading) / error_scale,
        normalized_residual_std_err: leading_std_err / error_scale,
        total_leading,
        total_normalized_residual: (c.total as f64 - total_leading) / error_scale,
        classes,
    })
}

/// `ell^(g-1)`, the number of classes the `P(1)` congruence selects.
pub fn expected_congruence_classes(ell: u64, g: usize) -> u64 {
    Pow::pow(BigInt::from(ell), g as u32 - 1)
        .to_u64()
        .expect("small")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(p: u64, r: u32) -> PrimePower {
        PrimePower::new(p, r).unwrap()
    }

    #[test]
    fn census_g1_q5() {
        let c = run_census(1, &pp(5, 1), 3).unwrap();
        assert_eq!((c.total, c.ordinary, c.congruence_total), (9, 8, 3));
        let per: Vec<u64> = c.per_residue.iter().map(|k| k.total).collect();
        assert_eq!(per, vec![3, 3, 3]);
        assert_eq!(c.prime_sub, 1);
        assert_eq!(c.lambda2, 1);
        assert_eq!(c.congruence_classes, 1);
    }

    #[test]
    fn census_g1_q4() {
        let c = run_census(1, &pp(2, 2), 3).unwrap();
        assert_eq!((c.total, c.ordinary, c.lambda2), (9, 4, 5));
        assert_eq!(c.isogeny_bracket(), (4, 9));
    }

    #[test]
    fn census_rejects_ell_equal_p() {
        assert_eq!(run_census(1, &pp(5, 1), 5), Err(WeilError::EllEqualsP(5)));
        assert_eq!(run_census(1, &pp(5, 1), 4), Err(WeilError::EllNotPrime(4)));
    }

    #[test]
    fn residue_class_examples() {
        let cls = ResidueClass::new(3, vec![0]).unwrap();
        assert_eq!(count_residue_class(1, &pp(5, 1), &cls).unwrap(), 3);
        let cls = ResidueClass::new(5, vec![1]).unwrap();
        assert_eq!(count_residue_class(1, &pp(2, 1), &cls).unwrap(), 1);
        assert!(ResidueClass::new(3, vec![3]).is_err());
        assert_eq!(
            ResidueClass::reduce(3, &[-4, 6]).unwrap().residues(),
            &[2, 0]
        );
    }

    #[test]
    fn congruence_examples() {
        let q = pp(5, 1);
        let n = |x: i64, y: i64| point_count_congruence(1, &q, 3, &x.into(), &y.into()).unwrap();
        assert_eq!(n(1, 0), 3);
        assert_eq!(n(0, 2), 9);
        assert_eq!(n(0, 0), 0);
        assert_eq!(n(0, -1), 9);
    }

    #[test]
    fn sweep_rows_are_complementary() {
        let cls = ResidueClass::new(3, vec![0]).unwrap();
        let rows = sweep(1, 2, 3, 1, 6, &cls, EnumerationOptions::default()).unwrap();
        assert_eq!(rows.len(), 6);
        for row in &rows {
            assert!((row.d_frac + row.congruence_frac - 1.0).abs() < 1e-15);
        }
        assert!(rows[5].dev_e < rows[0].dev_e);
    }

    #[test]
    fn sweep_errors() {
        let cls = ResidueClass::new(3, vec![0]).unwrap();
        let opts = EnumerationOptions::default();
        assert_eq!(
            sweep(1, 2, 3, 3, 2, &cls, opts),
            Err(WeilError::EmptyRange { r_min: 3, r_max: 2 })
        );
        let bad = ResidueClass::new(2, vec![0]).unwrap();
        match sweep(1, 2, 2, 1, 2, &bad, opts) {
            Err(WeilError::Sweep { r: 1, source }) => assert_eq!(*source, WeilError::EllEqualsP(2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn class_indexing_roundtrip() {
        for idx in 0..125 {
            let m = class_of_index(idx, 5, 3);
            assert_eq!(class_index(&m, 5), Some(idx));
        }
    }

    #[test]
    fn bound_report_g1() {
        let c = run_census(1, &pp(5, 1), 3).unwrap();
        let v = VolumeEstimate::exact(1, 4.0);
        let b = bound_report(&c, &v).unwrap();
        let leading = 4.0 * 0.8 * 5f64.sqrt();
        assert!((b.leading - leading).abs() < 1e-12);
        assert!((b.leading - 7.155).abs() < 1e-3);
        assert!((b.normalized_residual - (8.0 - leading)).abs() < 1e-12);
        assert!((b.total_normalized_residual - (9.0 - 4.0 * 5f64.sqrt())).abs() < 1e-12);
        assert_eq!(b.classes.len(), 3);
        let mismatched = VolumeEstimate::exact(2, 10.0);
        assert_eq!(
            bound_report(&c, &mismatched),
            Err(WeilError::DimensionMismatch {
                census: 1,
                volume: 2
            })
        );
    }

    #[test]
    fn ordinary_density_depends_on_p_only() {
        for r in 1..6 {
            assert_eq!(pp(2, r).ordinary_density(), 0.5);
        }
    }
}
