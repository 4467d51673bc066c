//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit status
//! if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stbc::sim::{diversity_slope, highest_decade, random_channel, run_ber, transmit, Decoder, SimConfig, SimResult, AMPLITUDE};
use stbc::sweeps::{self, Level};
use stbc::tables::{table1, table2};
use stbc::workers;
use stbc_core::constellation::{
    make_proposed16, make_proposed8, make_psk, make_qam, Normalization,
};
use stbc_core::detect::{equivalent_channel, Detector};
use stbc_core::gain::{golden_coding_gain, vanishing_probe, Family, RPolicy};
use stbc_core::optimize::{analytic_integer_optimum, optimize, optimize_step1, verify_step2};
use stbc_core::{build_codeword, coding_gain, coding_gain_scaled, Complex64, DesignCoefficient, Method};

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(name: &str, got: f64, want: f64, tol: f64) -> Result<(), String> {
    check((got - want).abs() <= tol, format!("{name}: got {got}, want {want} ± {tol}"))
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn min_dist_one_half() -> Outcome {
    let r = analytic_integer_optimum()[0];
    let n = Normalization::MinDistOne;
    let mut parts = Vec::new();
    for c in [
        make_qam(4, n).map_err(e)?,
        make_qam(16, n).map_err(e)?,
        make_qam(64, n).map_err(e)?,
        make_proposed8(n).map_err(e)?,
        make_proposed16(n).map_err(e)?,
    ] {
        let t = Instant::now();
        let rep = coding_gain(&c, &r, Method::auto(&c)).map_err(e)?;
        let secs = t.elapsed().as_secs_f64();
        check(rep.exact, format!("{}: exact path not taken", c.name()))?;
        close(c.name(), rep.gain, 0.5, 1e-12)?;
        check(secs <= 10.0, format!("{}: {secs:.1} s", c.name()))?;
        parts.push(format!("{}={}", c.name(), rep.gain));
    }
    Ok(parts.join(" "))
}

fn table1_proposed() -> Outcome {
    let rows = table1(workers::resolve(None)).map_err(e)?;
    let get = |code: &str, c: &str| rows.iter().find(|r| r.code == code && r.constellation == c).map(|r| r.gain);
    let s2 = 2f64.sqrt();
    let psk = (22572.0 - 15912.0 * s2) / 2401.0;
    close("qam4", get("proposed", "qam4").ok_or("missing row")?, 2.0, 1e-9)?;
    close("qam16", get("proposed", "qam16").ok_or("missing row")?, 0.08, 1e-9)?;
    let g = get("proposed", "psk8").ok_or("missing row")?;
    close("psk8", g, psk, 1e-9)?;
    check(format!("{g:.4}") == "0.0288", "psk8 rounding")?;
    Ok(format!("qam4=2 qam16=0.08 psk8={g:.12}"))
}

fn table1_golden() -> Outcome {
    let u = Normalization::UnitAveragePower;
    let g4 = golden_coding_gain(&make_qam(4, u).map_err(e)?).map_err(e)?.gain;
    let g16 = golden_coding_gain(&make_qam(16, u).map_err(e)?).map_err(e)?.gain;
    close("golden qam4", g4, 3.2, 1e-6)?;
    close("golden qam16", g16, 0.128, 1e-6)?;
    Ok(format!("qam4={g4:.9} qam16={g16:.9}"))
}

fn psk8_closed_form() -> Outcome {
    let t0 = Instant::now();
    let c = make_psk(8, Normalization::UnitAveragePower).map_err(e)?;
    let res = verify_step2(&c, optimize_step1(&c).map_err(e)?).map_err(e)?;
    let s2 = 2f64.sqrt();
    let disc = (4609.0 - 132.0 * s2).sqrt();
    let u = (11.0 + 6.0 * s2 + disc) / 98.0;
    let v = (-11.0 - 6.0 * s2 + disc) / 98.0;
    let r = res.principal();
    close("u", r.u(), u, 1e-9)?;
    close("v", r.v(), v, 1e-9)?;
    check(res.case2_dominates, "case II does not dominate")?;
    check(t0.elapsed().as_secs() <= 60, "slower than 1 min")?;
    Ok(format!("u={:.12} v={:.12} case2_min={:.6}", r.u(), r.v(), res.case2_min.unwrap_or(f64::NAN)))
}

fn table2_values() -> Outcome {
    let t0 = Instant::now();
    let rows = table2(workers::resolve(None)).map_err(e)?;
    let row = |n: &str| rows.iter().find(|r| r.apsk == n).ok_or(format!("missing {n}"));
    let p8 = row("proposed-8apsk")?;
    let p16 = row("proposed-16apsk")?;
    let c8 = row("conventional-8apsk")?;
    let c16 = row("conventional-16apsk")?;
    close("proposed-8 gain", p8.gain, 0.2222, 1e-3)?;
    close("proposed-16 gain", p16.gain, 0.03125, 1e-9)?;
    close("conventional-8 u", c8.u, 0.9454, 1e-3)?;
    close("conventional-8 v", c8.v, 0.3258, 1e-3)?;
    close("conventional-8 gain", c8.gain, 0.0230, 1e-3)?;
    close("conventional-16 u", c16.u, 0.8294, 1e-3)?;
    close("conventional-16 v", c16.v, 0.5587, 1e-3)?;
    check(
        (c16.gain - 0.0004).abs() <= 0.25 * 0.0004,
        format!("conventional-16 gain {} not within 25% of 0.0004", c16.gain),
    )?;
    for (r, d) in [(c8, 0.9194), (c16, 0.5848), (p8, 0.8165), (p16, 0.5)] {
        close(&format!("{} min distance", r.apsk), r.min_distance, d, 1e-3)?;
    }
    for r in [p8, p16] {
        close("proposed u", r.u, 0.9114, 5e-5)?;
        close("proposed v", r.v, 0.4114, 5e-5)?;
    }
    check(t0.elapsed().as_secs() <= 300, "slower than 5 min")?;
    Ok(format!("c8={:.4} c16={:.6} p8={:.4} p16={}", c8.gain, c16.gain, p8.gain, p16.gain))
}

fn case2_floor() -> Outcome {
    let r = analytic_integer_optimum()[0];
    let mut parts = Vec::new();
    for m in [4, 16] {
        let c = make_qam(m, Normalization::MinDistOne).map_err(e)?;
        let rep = coding_gain(&c, &r, Method::Exhaustive).map_err(e)?;
        check(rep.case2_min >= 7.0 / 8.0 - 1e-12, format!("qam{m}: case2_min {}", rep.case2_min))?;
        check(rep.bound_violations == 0, format!("qam{m}: {} bound violations", rep.bound_violations))?;
        parts.push(format!("qam{m}: case2_min={} tuples={}", rep.case2_min, rep.evaluated));
    }
    Ok(parts.join(", "))
}

fn lemma_sweeps() -> Outcome {
    let t0 = Instant::now();
    let pool = workers::pool(workers::resolve(None)).map_err(e)?;
    let outcomes = pool.install(|| sweeps::run(Level::Full, 2024)).map_err(e)?;
    let mut parts = Vec::new();
    for o in &outcomes {
        check(o.passed(), format!("{}: {} failures of {}", o.name, o.report.failures, o.report.checked))?;
        parts.push(format!("{}={}", o.name, o.report.checked));
    }
    check(t0.elapsed().as_secs() <= 60, format!("took {:?}", t0.elapsed()))?;
    Ok(parts.join(" "))
}

fn decoder_equivalence() -> Outcome {
    let r = analytic_integer_optimum()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let u = Normalization::UnitAveragePower;
    for c in [make_qam(4, u).map_err(e)?, make_psk(8, u).map_err(e)?] {
        let det = Detector::new(&c, r, AMPLITUDE);
        let mut disagreements = 0;
        let mut wrong = 0;
        for _ in 0..1000 {
            let idx: [usize; 4] = std::array::from_fn(|_| rng.random_range(0..c.len()));
            let h = random_channel(&mut rng);
            let n0 = 10f64.powf(-rng.random_range(0.0..2.5));
            let x = build_codeword(det.symbols(idx), &r).scale(AMPLITUDE);
            let y = transmit(&x, &h, n0, &mut rng);
            let ml = det.ml_decode_exhaustive(&y, &h).map_err(e)?;
            let fast = det.fast_decode(&y, &h);
            disagreements += (ml != fast) as u32;
            wrong += (ml != idx) as u32;
        }
        check(disagreements == 0, format!("{}: {disagreements} disagreements", c.name()))?;
        check(wrong > 0, format!("{}: noise never caused an error", c.name()))?;
    }
    let mut worst = 0f64;
    for _ in 0..1000 {
        let h = random_channel(&mut rng);
        let (f1, f2) = equivalent_channel(&h);
        let ip: Complex64 = f1.iter().zip(&f2).map(|(a, b)| a.conj() * b).sum();
        worst = worst.max(ip.norm());
    }
    check(worst <= 1e-12, format!("column inner product {worst}"))?;
    Ok(format!("2000 instances agree, max inner product {worst:.1e}"))
}

fn vanishing() -> Outcome {
    let psk = vanishing_probe(Family::Psk, &[4, 8], RPolicy::Reoptimize).map_err(e)?;
    check(psk[1].1 < psk[0].1, format!("psk not decreasing: {psk:?}"))?;
    let qam = vanishing_probe(Family::Qam, &[4, 16, 64], RPolicy::Analytic).map_err(e)?;
    for (m, g) in &qam {
        close(&format!("qam{m}"), *g, 0.5, 1e-12)?;
    }
    Ok(format!("psk4={:.6} psk8={:.6} qam=0.5", psk[0].1, psk[1].1))
}

fn monotone(res: &SimResult) -> Result<(), String> {
    let mut inversions = 0;
    for w in res.points.windows(2) {
        if w[1].ber > w[0].ber {
            inversions += 1;
            let sd = |p: &stbc::sim::SnrPoint| (p.ber * (1.0 - p.ber) / p.bits as f64).sqrt();
            let sigma = (sd(&w[0]).powi(2) + sd(&w[1]).powi(2)).sqrt();
            check(w[1].ber - w[0].ber <= 2.0 * sigma, format!("BER rises at {} dB beyond 2σ", w[1].snr_db))?;
        }
    }
    check(inversions <= 1, format!("{inversions} inversions"))
}

fn ber_behaviour() -> Outcome {
    let workers = workers::resolve(None);
    let c = make_qam(4, Normalization::UnitAveragePower).map_err(e)?;
    let snr: Vec<f64> = (0..6).map(|i| 16.0 + 2.0 * i as f64).collect();
    let good = SimConfig {
        r: optimize(&c).map_err(e)?.0,
        decoder: Decoder::Fast,
        snr_db: snr.clone(),
        codewords: 25_000_000,
        seed: 20_240_601,
        noiseless: false,
    };
    let res = run_ber(&c, &good, workers).map_err(e)?;
    monotone(&res)?;
    let window = highest_decade(&res, 100).ok_or("no decade with at least 100 errors per point")?;
    let slope = diversity_slope(&res, window).map_err(e)?;
    check(slope >= 3.0, format!("slope {slope:.3} over {window:?}"))?;

    let flat = DesignCoefficient::user(1.0, 1.0).map_err(e)?;
    let g = coding_gain(&c, &flat, Method::Aggregated).map_err(e)?.gain;
    check(g < 1e-12, format!("degenerate coefficient has gain {g}"))?;
    let bad = SimConfig {
        r: flat,
        codewords: 2_000_000,
        ..good.clone()
    };
    let res_bad = run_ber(&c, &bad, workers).map_err(e)?;
    let w = highest_decade(&res_bad, 100).ok_or("degenerate run: no usable decade")?;
    let slope_bad = diversity_slope(&res_bad, w).map_err(e)?;
    check(slope_bad <= 0.75 * slope, format!("degenerate slope {slope_bad:.3} vs {slope:.3}"))?;
    Ok(format!(
        "slope {slope:.3} over {:.0}-{:.0} dB, degenerate {slope_bad:.3}",
        window.0.round(),
        window.1
    ))
}

fn scaling_law() -> Outcome {
    let r = analytic_integer_optimum()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let u = Normalization::UnitAveragePower;
    let mut worst = 0f64;
    for c in [make_qam(4, u).map_err(e)?, make_proposed8(u).map_err(e)?] {
        let g = coding_gain(&c, &r, Method::auto(&c)).map_err(e)?.gain;
        for _ in 0..10 {
            let a: f64 = rng.random_range(0.3..3.0);
            let gs = coding_gain_scaled(&c, &r, a).map_err(e)?.gain;
            let rel = (gs - a.powi(4) * g).abs() / (a.powi(4) * g);
            worst = worst.max(rel);
        }
    }
    check(worst <= 1e-9, format!("relative error {worst}"))?;
    Ok(format!("max relative error {worst:.1e}"))
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_stbc")).args(args).output().map_err(e)?;
    check(out.status.success(), format!("stbc {args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    for cmd in ["table1", "table2"] {
        let a = run_cli(&[cmd, "--workers", "1"])?;
        let b = run_cli(&[cmd, "--workers", "3"])?;
        let c = run_cli(&[cmd])?;
        check(a == b && b == c, format!("{cmd} output differs"))?;
    }
    let sim = ["simulate", "--constellation", "qam4", "--snr", "0:4:16", "--codewords", "30000", "--seed", "99"];
    let one = run_cli(&[&sim[..], &["--workers", "1"]].concat())?;
    let four = run_cli(&[&sim[..], &["--workers", "4"]].concat())?;
    let again = run_cli(&[&sim[..], &["--workers", "4"]].concat())?;
    check(one == four && four == again, "simulate output differs")?;
    Ok("table1, table2, simulate byte-identical across runs and worker counts".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("integer-grid gain is 1/2", min_dist_one_half),
        ("proposed code gains (4-QAM, 16-QAM, 8-PSK)", table1_proposed),
        ("Golden code gains", table1_golden),
        ("8-PSK optimizer closed form", psk8_closed_form),
        ("APSK comparison table", table2_values),
        ("Case II floor and bound", case2_floor),
        ("number-theory sweeps", lemma_sweeps),
        ("fast decoder equals ML", decoder_equivalence),
        ("PSK gain vanishes, QAM does not", vanishing),
        ("BER monotone with full-diversity slope", ber_behaviour),
        ("quartic scaling law", scaling_law),
        ("deterministic CSV output", determinism),
    ];
    let only: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if !only.is_empty() && !only.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let res = f();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(detail) => println!("AC{n:02} PASS  {name} ({secs:.1} s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("AC{n:02} FAIL  {name} ({secs:.1} s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    } else {
        println!("all criteria passed");
        ExitCode::SUCCESS
    }
}
