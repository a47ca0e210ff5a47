//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as part of `cargo test`; heavy criteria take minutes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::result::Result;
use std::time::Instant;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use serde_json::Value;
use weil_core::real_rooted::MemberTester;
use weil_core::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn pp(p: u64, r: u32) -> PrimePower {
    PrimePower::new(p, r).unwrap()
}

fn q_of(q: u64) -> PrimePower {
    for p in 2..=q {
        if weil::is_prime(p) {
            let mut r = 1;
            while p.pow(r) < q {
                r += 1;
            }
            if p.pow(r) == q {
                return pp(p, r);
            }
        }
    }
    panic!("{q} is not a prime power")
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn small(x: &BigInt) -> i64 {
    i64::try_from(x).unwrap()
}

fn criterion_1() -> Outcome {
    let mut checked = 0;
    for q in 2..=100u64 {
        let is_pp = (2..=q).any(|p| weil::is_prime(p) && (1..8).any(|r| p.pow(r) == q));
        if !is_pp {
            continue;
        }
        let pq = q_of(q);
        let qi = q as i64;
        let brute = (-2 * qi..=2 * qi).filter(|a| a * a <= 4 * qi).count() as u64;
        let ell = if pq.p() == 3 { 5 } else { 3 };
        let total = run_census(1, &pq, ell).map_err(|e| e.to_string())?.total;
        let formula = (2 * isqrt(4 * qi) + 1) as u64;
        ensure!(
            total == brute && brute == formula,
            "q={q}: census {total}, brute {brute}, formula {formula}"
        );
        checked += 1;
    }
    Ok(format!("{checked} prime powers q <= 100"))
}

fn criterion_2() -> Outcome {
    let c = run_census(1, &pp(5, 1), 3).map_err(|e| e.to_string())?;
    let members: Vec<i64> = (-6..=6).filter(|a: &i64| a * a <= 20).collect();
    let ordinary = members.iter().filter(|a| *a % 5 != 0).count() as u64;
    let congruence = members.iter().filter(|a| (6 + *a) % 3 == 0).count() as u64;
    let per: Vec<u64> = c.per_residue.iter().map(|k| k.total).collect();
    let brute_per: Vec<u64> = (0..3)
        .map(|m| members.iter().filter(|a| a.rem_euclid(3) == m).count() as u64)
        .collect();
    ensure!(
        (c.total, c.ordinary, c.congruence_total) == (9, 8, 3) && per == vec![3, 3, 3],
        "got total {} ordinary {} congruence {} per {per:?}",
        c.total,
        c.ordinary,
        c.congruence_total
    );
    ensure!(
        (
            members.len() as u64,
            ordinary,
            congruence,
            brute_per.clone()
        ) == (c.total, c.ordinary, c.congruence_total, per),
        "exhaustive check disagrees: {} {ordinary} {congruence} {brute_per:?}",
        members.len()
    );
    Ok("total 9, ordinary 8, congruence_total 3, per-residue (3,3,3)".into())
}

fn criterion_3() -> Outcome {
    let (mut points, mut members, mut uncertain) = (0u64, 0u64, 0u64);
    for g in 1..=3 {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let pq = q_of(q);
            let tester = MemberTester::new(g, &pq);
            let b: Vec<i64> = coefficient_box(g, &pq).bounds.iter().map(small).collect();
            let mut a = b.iter().map(|x| -x).collect::<Vec<i64>>();
            loop {
                let exact =
                    tester.is_member_small(&a.iter().map(|&x| x as i128).collect::<Vec<_>>());
                let w = WeilCoefficients::from_i64(&a).unwrap();
                let verdict =
                    numeric_is_member(&w, &pq, 1e-9).map_err(|e| format!("{a:?} q={q}: {e}"))?;
                ensure!(
                    verdict.admits(exact),
                    "g={g} q={q} a={a:?}: exact {exact}, numeric {verdict:?}"
                );
                points += 1;
                members += exact as u64;
                uncertain += (verdict == NumericVerdict::BoundaryUncertain) as u64;
                // odometer step over the box
                let mut i = g;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if a[i] < b[i] {
                        a[i] += 1;
                        break;
                    }
                    a[i] = -b[i];
                }
                if a.iter().zip(&b).all(|(x, y)| *x == -y) {
                    break;
                }
            }
        }
    }
    Ok(format!(
        "{points} box points, {members} members, {uncertain} boundary-uncertain, 0 contradictions"
    ))
}

/// `T^g h(T + q/T)` expanded as `sum_k h_k T^(g-k) (T^2 + q)^k`.
fn pull_back(h: &IntPolynomial, g: usize, q: &BigInt) -> IntPolynomial {
    let t2q = IntPolynomial::new(vec![q.clone(), BigInt::from(0), BigInt::from(1)]);
    let mut acc = IntPolynomial::zero();
    for (k, c) in h.coefficients().iter().enumerate() {
        let mut shift = vec![BigInt::from(0); g - k];
        shift.push(c.clone());
        acc = &acc + &(&t2q.pow(k as u32) * &IntPolynomial::new(shift));
    }
    acc
}

fn criterion_4() -> Outcome {
    let mut rng = rand::rngs::StdRng::seed_from_u64(20261014);
    let qs = [2u64, 3, 4, 5, 8, 9];
    for n in 0..200 {
        let g = rng.gen_range(1..=4);
        let q = q_of(qs[rng.gen_range(0..qs.len())]);
        let a: Vec<i64> = (0..g).map(|_| rng.gen_range(-1000..=1000)).collect();
        let w = WeilCoefficients::from_i64(&a).unwrap();
        let h = to_real_weil(&w, &q);
        ensure!(
            pull_back(h.h(), g, q.q()) == weil_polynomial(&w, &q),
            "vector {n}: a={a:?} q={}",
            q.q()
        );
    }
    Ok("200 random vectors, g <= 4".into())
}

fn p_at_one_direct(m: &[u64], q: u64, ell: u64) -> u64 {
    // (1 + q^g) + sum_(i<g) m_i (1 + q^(g-i)) + m_g, reduced at the end
    let g = m.len() as u32;
    let q = q as i128;
    let mut acc = 1 + q.pow(g);
    for (i, &mi) in m.iter().enumerate().take(m.len() - 1) {
        acc += mi as i128 * (1 + q.pow(g - 1 - i as u32));
    }
    acc += m[m.len() - 1] as i128;
    acc.rem_euclid(ell as i128) as u64
}

fn criterion_5() -> Outcome {
    let mut runs = 0;
    let mut skipped = Vec::new();
    for g in [1usize, 2] {
        for ell in [3u64, 5] {
            for q in [2u64, 3, 4, 5, 8, 9, 16, 25] {
                let pq = q_of(q);
                if pq.p() == ell {
                    skipped.push(format!("(g={g},ell={ell},q={q})"));
                    continue;
                }
                let c = run_census(g, &pq, ell).map_err(|e| e.to_string())?;
                let sum: u64 = c.per_residue.iter().map(|k| k.total).sum();
                ensure!(
                    sum == c.total,
                    "g={g} ell={ell} q={q}: sum {sum} != total {}",
                    c.total
                );
                let selected: Vec<&ClassCount> = c
                    .per_residue
                    .iter()
                    .filter(|k| p_at_one_direct(&k.m, q, ell) == 0)
                    .collect();
                let want = ell.pow(g as u32 - 1);
                ensure!(
                    selected.len() as u64 == want && c.congruence_classes == want,
                    "g={g} ell={ell} q={q}: {} classes selected, expected {want}",
                    selected.len()
                );
                let via_classes: u64 = selected.iter().map(|k| k.total).sum();
                let direct =
                    point_count_congruence(g, &pq, ell, &BigInt::from(1), &BigInt::from(0))
                        .map_err(|e| e.to_string())?;
                ensure!(
                    via_classes == c.congruence_total && direct == c.congruence_total,
                    "g={g} ell={ell} q={q}: congruence {} vs classes {via_classes} vs direct {direct}",
                    c.congruence_total
                );
                runs += 1;
            }
        }
    }
    Ok(format!(
        "{runs} censuses; ell = p combinations rejected by design: {}",
        skipped.join(" ")
    ))
}

fn scaled_bounded(rows: &[SweepRow], pick: impl Fn(&SweepRow) -> f64) -> (f64, f64, bool) {
    let first = rows
        .iter()
        .filter(|r| r.r <= 3)
        .map(&pick)
        .fold(0.0, f64::max);
    let all = rows.iter().map(&pick).fold(0.0, f64::max);
    (first, all, all <= 2.0 * first)
}

fn criterion_6() -> Outcome {
    let cls = ResidueClass::new(3, vec![0]).unwrap();
    let rows =
        sweep(1, 2, 3, 1, 14, &cls, EnumerationOptions::default()).map_err(|e| e.to_string())?;
    let (d1, d14) = (rows[0].dev_d, rows[13].dev_d);
    ensure!(d14 < d1, "dev_d(14) = {d14} not below dev_d(1) = {d1}");
    let (first, all, ok) = scaled_bounded(&rows, |r| r.sqrt_q_dev_d);
    ensure!(ok, "max sqrt(q) dev_d {all} exceeds 2 x {first}");
    Ok(format!(
        "dev_d(1) = {d1:.4}, dev_d(14) = {d14:.4}; max sqrt(q) dev_d {all:.4} <= 2 x {first:.4}"
    ))
}

fn criterion_7() -> Outcome {
    let cls = ResidueClass::new(3, vec![0, 0]).unwrap();
    let rows =
        sweep(2, 2, 3, 1, 9, &cls, EnumerationOptions::default()).map_err(|e| e.to_string())?;
    let (e1, e9) = (rows[0].dev_e, rows[8].dev_e);
    ensure!(e9 < e1, "dev_e(9) = {e9} not below dev_e(1) = {e1}");
    let (first, all, ok) = scaled_bounded(&rows, |r| r.sqrt_q_dev_e);
    ensure!(ok, "max sqrt(q) dev_e {all} exceeds 2 x {first}");
    Ok(format!(
        "dev_e(1) = {e1:.4}, dev_e(9) = {e9:.4}; max sqrt(q) dev_e {all:.4} <= 2 x {first:.4}"
    ))
}

fn criterion_8() -> Outcome {
    let seed = 1;
    let native = estimate_volume(1, 1_000_000, seed).map_err(|e| e.to_string())?;
    ensure!(
        native.mean == 4.0 && native.std_err == 0.0,
        "native g=1 mean {}",
        native.mean
    );
    let opts = VolumeOptions {
        box_scale: 1.5,
        jobs: 0,
    };
    let wide = estimate_volume_with(1, 1_000_000, seed, opts).map_err(|e| e.to_string())?;
    ensure!(
        (wide.mean - 4.0).abs() <= 3.0 * wide.std_err,
        "widened g=1 mean {} +- {}",
        wide.mean,
        wide.std_err
    );
    let v2 = estimate_volume(2, 1_000_000, seed).map_err(|e| e.to_string())?;
    let mut residual_max: f64 = 0.0;
    let mut ratios = Vec::new();
    for r in 1..=9 {
        let q = pp(2, r);
        let c = run_census(2, &q, 3).map_err(|e| e.to_string())?;
        let b = bound_report(&c, &v2).map_err(|e| e.to_string())?;
        if r <= 5 {
            residual_max = residual_max.max(b.normalized_residual.abs());
        }
        if r >= 4 {
            let qf = q.q_f64();
            ratios.push((
                r,
                c.ordinary as f64 / (q.ordinary_density() * qf.powf(1.5)),
                qf,
            ));
        }
    }
    for &(r, ratio, qf) in &ratios {
        let band = 3.0 * v2.std_err + 2.0 * residual_max / qf.sqrt();
        ensure!(
            (ratio - v2.mean).abs() <= band,
            "r={r}: ratio {ratio:.4} outside {:.4} +- {band:.4}",
            v2.mean
        );
    }
    let shown: Vec<String> = ratios
        .iter()
        .map(|(r, x, _)| format!("r={r}:{x:.4}"))
        .collect();
    Ok(format!(
        "v_1 = 4 exact, widened {:.4} +- {:.4}; v_2 ~ {:.4} +- {:.4}; N_ord/(r(q) q^1.5): {}",
        wide.mean,
        wide.std_err,
        v2.mean,
        v2.std_err,
        shown.join(" ")
    ))
}

fn run_cli(args: &[&str]) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_weil"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(
        out.status.success(),
        "weil {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    v.as_object_mut()
        .ok_or("record is not an object")?
        .remove("timing");
    Ok(v)
}

fn criterion_9() -> Outcome {
    let cases: [&[&str]; 3] = [
        &[
            "census",
            "--g",
            "2",
            "--p",
            "2",
            "--r",
            "6",
            "--ell",
            "3",
            "--residues",
            "0,0",
        ],
        &["census", "--g", "3", "--p", "3", "--r", "1", "--ell", "5"],
        &[
            "census",
            "--g",
            "2",
            "--p",
            "5",
            "--r",
            "2",
            "--ell",
            "7",
            "--no-prune",
        ],
    ];
    for case in cases {
        let one = run_cli(&[case, &["--jobs", "1"]].concat())?;
        let eight = run_cli(&[case, &["--jobs", "8"]].concat())?;
        ensure!(one == eight, "records differ for {case:?}");
    }
    let a = estimate_volume_with(
        2,
        200_000,
        42,
        VolumeOptions {
            box_scale: 1.0,
            jobs: 1,
        },
    )
    .map_err(|e| e.to_string())?;
    let b = estimate_volume_with(
        2,
        200_000,
        42,
        VolumeOptions {
            box_scale: 1.0,
            jobs: 8,
        },
    )
    .map_err(|e| e.to_string())?;
    ensure!(a.hits == b.hits, "volume hits {} vs {}", a.hits, b.hits);
    let vol = ["volume", "--g", "3", "--samples", "50000", "--seed", "9"];
    let x = run_cli(&[&vol[..], &["--jobs", "1"]].concat())?;
    let y = run_cli(&[&vol[..], &["--jobs", "8"]].concat())?;
    ensure!(x == y, "volume records differ across --jobs");
    Ok(format!(
        "3 censuses identical under --jobs 1/8; volume hits {} reproduced",
        a.hits
    ))
}

fn main() {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let only: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let mut failed = 0;
    for (n, f) in criteria {
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({secs:.1}s) {detail}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.1}s) {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
