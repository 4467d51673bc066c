//! Command-line interface. Each command renders its whole output into a
//! string so the binary and the tests share one code path.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use stbc_core::gain::GainEngine;
use stbc_core::optimize::{optimize, optimize_step1, verify_step2};
use stbc_core::{Constellation, DesignCoefficient, Method, Normalization};

use crate::config::{parse_snr_grid, FileConfig};
use crate::csvio::{fmt12, write_sim, write_table1, write_table2};
use crate::sim::{run_ber, Decoder, SimConfig};
use crate::sweeps::Level;
use crate::{par, sweeps, tables, workers, Error, Result};

#[derive(Debug, Parser)]
#[command(name = "stbc", version, about = "Coding gain, design-coefficient optimization and BER simulation for a fast-decodable 2x2 space-time code")]
pub struct Cli {
    /// TOML file with default values for the subcommand flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: $STBC_WORKERS, else all cores).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Write to this file instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the points of a constellation.
    Constellation(ConstellationArgs),
    /// Coding gain for one constellation and design coefficient.
    Gain(GainArgs),
    /// Optimal design coefficient for a constellation.
    Optimize(OptimizeArgs),
    /// Run the number-theory checks.
    Lemmas(LemmasArgs),
    /// Coding gains of the proposed and Golden codes.
    Table1,
    /// Conventional against square-grid APSK.
    Table2,
    /// Monte Carlo bit-error rate over the 2x2 Rayleigh channel.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct ConstellationArgs {
    /// qam4, qam16, qam64, psk<M>, apsk8, apsk16, proposed-8, proposed-16
    #[arg(long)]
    pub name: Option<String>,
    /// integer-grid, unit-power or min-dist-1
    #[arg(long)]
    pub norm: Option<String>,
    #[arg(long, default_value = "csv")]
    pub emit: String,
}

#[derive(Debug, Args)]
pub struct GainArgs {
    #[arg(long)]
    pub constellation: Option<String>,
    #[arg(long)]
    pub norm: Option<String>,
    /// `auto` or `u,v`
    #[arg(long)]
    pub r: Option<String>,
    /// auto, exhaustive or aggregated
    #[arg(long)]
    pub method: Option<String>,
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub constellation: Option<String>,
    #[arg(long)]
    pub norm: Option<String>,
    /// Append a `name,min_distance,u,v,gain` CSV row.
    #[arg(long)]
    pub emit: Option<String>,
}

#[derive(Debug, Args)]
pub struct LemmasArgs {
    /// small or full
    #[arg(long, default_value = "small")]
    pub sweep: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub constellation: Option<String>,
    #[arg(long)]
    pub norm: Option<String>,
    /// `auto` or `u,v`
    #[arg(long)]
    pub r: Option<String>,
    /// ml or fast
    #[arg(long)]
    pub decoder: Option<String>,
    /// start:step:stop in dB, or a comma list
    #[arg(long)]
    pub snr: Option<String>,
    #[arg(long)]
    pub codewords: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "csv")]
    pub emit: String,
}

fn norm(s: Option<&str>) -> Result<Normalization> {
    let s = s.unwrap_or("unit-power");
    Normalization::parse(s).ok_or_else(|| Error::Config(format!("unknown normalization `{s}`")))
}

fn pick<T: Clone>(flag: &Option<T>, file: &Option<T>) -> Option<T> {
    flag.clone().or_else(|| file.clone())
}

fn required(v: Option<String>, what: &str) -> Result<String> {
    v.ok_or_else(|| Error::Config(format!("missing --{what}")))
}

/// `auto` runs the optimizer; `u,v` is taken as given (rescaled to unit
/// modulus).
pub fn parse_r(s: &str, c: &Constellation) -> Result<DesignCoefficient> {
    if s == "auto" {
        return Ok(optimize(c)?.0);
    }
    let bad = || Error::Config(format!("malformed r `{s}`, expected auto or u,v"));
    let (u, v) = s.split_once(',').ok_or_else(bad)?;
    let u: f64 = u.trim().parse().map_err(|_| bad())?;
    let v: f64 = v.trim().parse().map_err(|_| bad())?;
    Ok(DesignCoefficient::user(u, v)?)
}

fn csv_only(emit: &str) -> Result<()> {
    if emit != "csv" {
        return Err(Error::Config(format!("unsupported --emit `{emit}`, only csv")));
    }
    Ok(())
}

fn tuple_str(t: &stbc_core::DifferenceTuple) -> String {
    t.0.iter()
        .map(|z| format!("{}{}{}j", fmt12(z.re), if z.im < 0.0 { '-' } else { '+' }, fmt12(z.im.abs())))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn run(cli: &Cli) -> Result<String> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let workers = workers::resolve(cli.workers.or(file.workers));
    match &cli.command {
        Command::Constellation(a) => cmd_constellation(a, &file),
        Command::Gain(a) => cmd_gain(a, &file, workers),
        Command::Optimize(a) => cmd_optimize(a, &file),
        Command::Lemmas(a) => cmd_lemmas(a, workers),
        Command::Table1 => cmd_table1(workers),
        Command::Table2 => cmd_table2(workers),
        Command::Simulate(a) => cmd_simulate(a, &file, workers),
    }
}

fn cmd_constellation(a: &ConstellationArgs, file: &FileConfig) -> Result<String> {
    csv_only(&a.emit)?;
    let name = required(pick(&a.name, &file.constellation.name), "name")?;
    let n = norm(pick(&a.norm, &file.constellation.norm).as_deref())?;
    let c = crate::constellation(&name, n)?;
    let mut out = String::new();
    writeln!(out, "# stbc constellation").unwrap();
    writeln!(out, "# name = {name}").unwrap();
    writeln!(out, "# norm = {}", n.id()).unwrap();
    writeln!(out, "index,re,im,label").unwrap();
    for (i, (p, l)) in c.points().iter().zip(c.labels()).enumerate() {
        writeln!(out, "{i},{},{},{l}", fmt12(p.re), fmt12(p.im)).unwrap();
    }
    writeln!(
        out,
        "# min_distance={}, papr={}, avg_power={}",
        fmt12(c.min_distance()?),
        fmt12(c.papr()?),
        fmt12(c.avg_power())
    )
    .unwrap();
    Ok(out)
}

fn cmd_gain(a: &GainArgs, file: &FileConfig, workers: usize) -> Result<String> {
    let f = &file.gain;
    let name = required(pick(&a.constellation, &f.constellation), "constellation")?;
    let n = norm(pick(&a.norm, &f.norm).as_deref())?;
    let c = crate::constellation(&name, n)?;
    let r_arg = pick(&a.r, &f.r).unwrap_or_else(|| "auto".into());
    let r = parse_r(&r_arg, &c)?;
    let m_arg = pick(&a.method, &f.method).unwrap_or_else(|| "auto".into());
    let method = if m_arg == "auto" {
        Method::auto(&c)
    } else {
        Method::parse(&m_arg).ok_or_else(|| Error::Config(format!("unknown method `{m_arg}`")))?
    };
    let engine = GainEngine::new(&c, method)?;
    let rep = par::coding_gain_with(&engine, &r, workers)?;
    let mut out = String::new();
    writeln!(out, "# stbc gain").unwrap();
    writeln!(out, "# constellation = {name}").unwrap();
    writeln!(out, "# norm = {}", n.id()).unwrap();
    writeln!(out, "# r = {r_arg}").unwrap();
    writeln!(out, "# method = {}", method.id()).unwrap();
    writeln!(out, "# argmin = {}", tuple_str(&rep.argmin)).unwrap();
    writeln!(out, "# evaluated = {}, exact = {}, case2_bound_min = {}, bound_violations = {}", rep.evaluated, rep.exact, fmt12(rep.case2_bound_min), rep.bound_violations).unwrap();
    writeln!(out, "constellation,norm,u,v,gain,case,case1_min,case2_min").unwrap();
    writeln!(
        out,
        "{name},{},{},{},{},{},{},{}",
        n.id(),
        fmt12(r.u()),
        fmt12(r.v()),
        fmt12(rep.gain),
        rep.case_of_argmin.id(),
        fmt12(rep.case1_min),
        fmt12(rep.case2_min)
    )
    .unwrap();
    Ok(out)
}

fn cmd_optimize(a: &OptimizeArgs, file: &FileConfig) -> Result<String> {
    let f = &file.optimize;
    let name = required(pick(&a.constellation, &f.constellation), "constellation")?;
    let n = norm(pick(&a.norm, &f.norm).as_deref())?;
    let c = crate::constellation(&name, n)?;
    let mut out = String::new();
    writeln!(out, "# stbc optimize").unwrap();
    writeln!(out, "# constellation = {name}").unwrap();
    writeln!(out, "# norm = {}", n.id()).unwrap();
    let (r, rep) = optimize(&c)?;
    if c.is_integer_grid() {
        writeln!(out, "# integer grid: u - v = 1/2 (analytic)").unwrap();
    } else {
        let res = verify_step2(&c, optimize_step1(&c)?)?;
        writeln!(out, "# t = u - v = {}", fmt12(res.t)).unwrap();
        writeln!(out, "# case1_gain = {}", fmt12(res.case1_gain)).unwrap();
        writeln!(out, "# case1_witness = {}", tuple_str(&res.case1_witness)).unwrap();
        writeln!(out, "# breakpoints_examined = {}", res.breakpoints_examined).unwrap();
        if let Some(c2) = res.case2_min {
            writeln!(out, "# case2_min = {}", fmt12(c2)).unwrap();
        }
        writeln!(out, "# case2_dominates = {}", res.case2_dominates).unwrap();
        for (i, cand) in res.r_candidates.iter().enumerate() {
            writeln!(out, "# candidate {i}: u = {}, v = {}", fmt12(cand.u()), fmt12(cand.v())).unwrap();
        }
    }
    writeln!(out, "u = {}", fmt12(r.u())).unwrap();
    writeln!(out, "v = {}", fmt12(r.v())).unwrap();
    writeln!(out, "gain = {}", fmt12(rep.gain)).unwrap();
    writeln!(out, "case1_min = {}", fmt12(rep.case1_min)).unwrap();
    writeln!(out, "case2_min = {}", fmt12(rep.case2_min)).unwrap();
    writeln!(out, "argmin = {}", tuple_str(&rep.argmin)).unwrap();
    match a.emit.as_deref() {
        None => {}
        Some("csv") => {
            writeln!(out, "name,min_distance,u,v,gain").unwrap();
            writeln!(out, "{name},{},{},{},{}", fmt12(c.min_distance()?), fmt12(r.u()), fmt12(r.v()), fmt12(rep.gain)).unwrap();
        }
        Some(e) => return Err(Error::Config(format!("unsupported --emit `{e}`, only csv"))),
    }
    Ok(out)
}

fn cmd_lemmas(a: &LemmasArgs, workers: usize) -> Result<String> {
    let level = Level::parse(&a.sweep).ok_or_else(|| Error::Config(format!("unknown sweep `{}`", a.sweep)))?;
    let pool = workers::pool(workers)?;
    let outcomes = pool.install(|| sweeps::run(level, a.seed))?;
    let mut out = String::new();
    writeln!(out, "# stbc lemmas").unwrap();
    writeln!(out, "# sweep = {}", a.sweep).unwrap();
    writeln!(out, "# seed = {}", a.seed).unwrap();
    writeln!(out, "check,scope,checked,failures,status").unwrap();
    let mut all = true;
    for o in &outcomes {
        all &= o.passed();
        writeln!(
            out,
            "{},\"{}\",{},{},{}",
            o.name,
            o.scope,
            o.report.checked,
            o.report.failures,
            if o.passed() { "pass" } else { "FAIL" }
        )
        .unwrap();
    }
    writeln!(out, "# {}", if all { "all checks passed" } else { "some checks FAILED" }).unwrap();
    if !all {
        return Err(Error::Config(format!("lemma checks failed\n{out}")));
    }
    Ok(out)
}

fn cmd_table1(workers: usize) -> Result<String> {
    let rows = tables::table1(workers)?;
    let mut header = vec!["stbc table1".to_string(), "symbols at unit average power".to_string()];
    header.extend(tables::table1_rounded(&rows));
    let mut buf = Vec::new();
    write_table1(&mut buf, &header, &rows)?;
    Ok(String::from_utf8(buf).expect("utf-8"))
}

fn cmd_table2(workers: usize) -> Result<String> {
    let rows = tables::table2(workers)?;
    let mut header = vec!["stbc table2".to_string(), "constellations at unit average power".to_string()];
    header.extend(tables::table2_rounded(&rows));
    let mut buf = Vec::new();
    write_table2(&mut buf, &header, &rows)?;
    Ok(String::from_utf8(buf).expect("utf-8"))
}

fn cmd_simulate(a: &SimulateArgs, file: &FileConfig, workers: usize) -> Result<String> {
    csv_only(&a.emit)?;
    let f = &file.simulate;
    let name = pick(&a.constellation, &f.constellation).unwrap_or_else(|| "qam4".into());
    let n = norm(pick(&a.norm, &f.norm).as_deref())?;
    let c = crate::constellation(&name, n)?;
    let r_arg = pick(&a.r, &f.r).unwrap_or_else(|| "auto".into());
    let r = parse_r(&r_arg, &c)?;
    let dec_arg = pick(&a.decoder, &f.decoder).unwrap_or_else(|| "fast".into());
    let decoder = Decoder::parse(&dec_arg).ok_or_else(|| Error::Config(format!("unknown decoder `{dec_arg}`")))?;
    let snr_arg = pick(&a.snr, &f.snr).unwrap_or_else(|| "0:5:30".into());
    let cfg = SimConfig {
        r,
        decoder,
        snr_db: parse_snr_grid(&snr_arg)?,
        codewords: pick(&a.codewords, &f.codewords).unwrap_or(100_000),
        seed: pick(&a.seed, &f.seed).unwrap_or(1),
        noiseless: false,
    };
    let res = run_ber(&c, &cfg, workers)?;
    let header = vec![
        "stbc simulate".to_string(),
        format!("constellation = {name}"),
        format!("norm = {}", n.id()),
        format!("r = {r_arg} ({}, {})", fmt12(r.u()), fmt12(r.v())),
        format!("decoder = {}", decoder.id()),
        format!("snr = {snr_arg}"),
        format!("codewords = {}", cfg.codewords),
        format!("seed = {}", cfg.seed),
        "snr_db is received power per antenna over N0 (SNR = 2/N0)".to_string(),
    ];
    let mut buf = Vec::new();
    write_sim(&mut buf, &header, &res)?;
    Ok(String::from_utf8(buf).expect("utf-8"))
}
