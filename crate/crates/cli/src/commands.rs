use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::Instant;

use weil_core::census::SweepRow;
use weil_core::{
    estimate_volume_with, run_census_with, EnumerationOptions, Enumerator, PrimePower,
    ResidueClass, VolumeOptions, WeilError,
};

use crate::args::{
    CensusArgs, Cli, Command, EngineArgs, EnumerateArgs, Format, SweepArgs, VolumeArgs,
};
use crate::cache::{census_key, Cache};
use crate::error::{CliError, Result};
use crate::record::*;

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Census(args) => {
            let rec = census(&args)?;
            match args.format {
                Format::Json => write_json(out, &rec),
                Format::Csv => write_csv(out, &CENSUS_HEADER, [census_row(&rec)]),
            }
        }
        Command::Sweep(args) => {
            let rec = sweep(&args)?;
            match args.format {
                Format::Json => write_json(out, &rec),
                Format::Csv => {
                    write_csv(out, &SWEEP_HEADER, rec.results.rows.iter().map(|r| r.csv()))
                }
            }
        }
        Command::Volume(args) => {
            let rec = volume(&args)?;
            match args.format {
                Format::Json => write_json(out, &rec),
                Format::Csv => write_csv(out, &VOLUME_HEADER, [rec.csv()]),
            }
        }
        Command::Enumerate(args) => match &args.out {
            Some(path) => {
                let mut file = BufWriter::new(File::create(path)?);
                enumerate(&args, &mut file)?;
                file.flush()?;
                Ok(())
            }
            None => enumerate(&args, out).map(|_| ()),
        },
    }
}

fn write_json<T: serde::Serialize>(out: &mut dyn Write, rec: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, rec)?;
    writeln!(out)?;
    Ok(())
}

fn write_csv<I>(out: &mut dyn Write, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn options(engine: &EngineArgs) -> EnumerationOptions {
    EnumerationOptions {
        prune: !engine.no_prune,
        jobs: engine.jobs,
        ..EnumerationOptions::default()
    }
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Parses `m_1,...,m_g`, each reduced modulo `ell`.
pub fn parse_residues(text: &str, g: usize, ell: u64) -> Result<Vec<u64>> {
    let m = text
        .split(',')
        .map(|part| part.trim().parse::<u64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| {
            CliError::Usage(format!("malformed residues {text:?}: expected m_1,...,m_g"))
        })?;
    if m.len() != g {
        return Err(WeilError::ResidueLength {
            expected: g,
            found: m.len(),
        }
        .into());
    }
    Ok(ResidueClass::new(ell, m)?.residues().to_vec())
}

fn census_cached(
    g: usize,
    q: &PrimePower,
    ell: u64,
    residues: Option<&[u64]>,
    opts: EnumerationOptions,
    cache: Option<&Cache>,
) -> Result<CensusRecord> {
    let start = Instant::now();
    let parameters = CensusParameters {
        g,
        p: q.p(),
        r: q.r(),
        q: q_u128(q)?,
        ell,
        residues: residues.map(<[u64]>::to_vec),
    };
    let key = census_key(g, q.p(), q.r(), ell, residues);
    if let Some(cache) = cache {
        if let Some(mut rec) = cache.load::<CensusRecord>(&key) {
            if rec.parameters == parameters {
                rec.timing = Timing {
                    elapsed_ms: elapsed_ms(start),
                    cached: true,
                };
                return Ok(rec);
            }
        }
    }
    let counts = run_census_with(g, q, ell, opts)?;
    let results = CensusResults::from_counts(&counts, residues);
    let rec = Record::new(
        "census",
        parameters,
        results,
        Timing {
            elapsed_ms: elapsed_ms(start),
            cached: false,
        },
    );
    if let Some(cache) = cache {
        cache.store(&key, &rec)?;
    }
    Ok(rec)
}

pub fn census(args: &CensusArgs) -> Result<CensusRecord> {
    let g = args.g as usize;
    let q = PrimePower::new(args.p, args.r)?;
    q.check_ell(args.ell)?;
    let residues = args
        .residues
        .as_deref()
        .map(|s| parse_residues(s, g, args.ell))
        .transpose()?;
    let cache = args.cache_dir.as_ref().map(Cache::new);
    census_cached(
        g,
        &q,
        args.ell,
        residues.as_deref(),
        options(&args.engine),
        cache.as_ref(),
    )
}

pub fn sweep(args: &SweepArgs) -> Result<SweepRecord> {
    let start = Instant::now();
    let g = args.g as usize;
    PrimePower::new(args.p, 1)?.check_ell(args.ell)?;
    let residues = match &args.residues {
        Some(s) => parse_residues(s, g, args.ell)?,
        None => vec![0; g],
    };
    let cls = ResidueClass::new(args.ell, residues.clone())?;
    if args.rmin < 1 {
        return Err(WeilError::InvalidExponent(args.rmin).into());
    }
    if args.rmin > args.rmax {
        return Err(WeilError::EmptyRange {
            r_min: args.rmin,
            r_max: args.rmax,
        }
        .into());
    }
    let cache = args.cache_dir.as_ref().map(Cache::new);
    let opts = options(&args.engine);
    let mut all_cached = true;
    let mut rows = Vec::new();
    for r in args.rmin..=args.rmax {
        let at = |e: WeilError| {
            CliError::Weil(WeilError::Sweep {
                r,
                source: Box::new(e),
            })
        };
        let q = PrimePower::new(args.p, r).map_err(at)?;
        let rec =
            census_cached(g, &q, args.ell, Some(&residues), opts, cache.as_ref()).map_err(|e| {
                match e {
                    CliError::Weil(e) => at(e),
                    other => other,
                }
            })?;
        all_cached &= rec.timing.cached;
        rows.push(
            SweepRow::from_census(&rec.results.to_counts(g, &q, args.ell), &cls).map_err(at)?,
        );
    }
    let rows = rows
        .iter()
        .map(SweepRowRecord::from_row)
        .collect::<Result<Vec<_>>>()?;
    let parameters = SweepParameters {
        g,
        p: args.p,
        ell: args.ell,
        rmin: args.rmin,
        rmax: args.rmax,
        residues,
    };
    let timing = Timing {
        elapsed_ms: elapsed_ms(start),
        cached: all_cached,
    };
    Ok(Record::new(
        "sweep",
        parameters,
        SweepResults { rows },
        timing,
    ))
}

pub fn volume(args: &VolumeArgs) -> Result<VolumeRecord> {
    let start = Instant::now();
    let opts = VolumeOptions {
        box_scale: args.box_scale,
        jobs: args.jobs,
    };
    let v = estimate_volume_with(args.g as usize, args.samples, args.seed, opts)?;
    Ok(VolumeRecord::from_estimate(
        &v,
        Timing {
            elapsed_ms: elapsed_ms(start),
            cached: false,
        },
    ))
}

/// Writes `a_1,...,a_g,ordinary,in_lambda2[,P1_mod_ell]` rows; returns the row count.
pub fn enumerate(args: &EnumerateArgs, out: &mut dyn Write) -> Result<u64> {
    let g = args.g as usize;
    let q = PrimePower::new(args.p, args.r)?;
    if let Some(ell) = args.ell {
        q.check_ell(ell)?;
    }
    let en = Enumerator::new(g, &q, options(&args.engine))?;
    let p = q.p() as i128;
    let s = i128::try_from(q.s()).ok();
    let mut line = String::new();
    let mut n = 0;
    for a in en.members() {
        use std::fmt::Write as _;
        line.clear();
        for v in &a {
            write!(line, "{v},").expect("string write");
        }
        let last = a[g - 1];
        let lambda2 = match s {
            Some(s) => last % s == 0,
            None => last == 0,
        };
        write!(line, "{},{}", u8::from(last % p != 0), u8::from(lambda2)).expect("string write");
        if let Some(ell) = args.ell {
            let m: Vec<u64> = a.iter().map(|v| v.rem_euclid(ell as i128) as u64).collect();
            write!(line, ",{}", weil_core::p_at_one_mod(&m, &q, ell)).expect("string write");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
        n += 1;
    }
    out.flush().or_else(|e| {
        if e.kind() == io::ErrorKind::BrokenPipe {
            Ok(())
        } else {
            Err(e)
        }
    })?;
    Ok(n)
}
