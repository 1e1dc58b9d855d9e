//! Batch front-end: reproducible experiments over the twisted L-function
//! family, with key=value config files, CLI overrides, cached coefficient
//! tables, and atomically written JSON/CSV artifacts.
//!
//! Exit codes: 0 ok, 1 usage/validation, 2 numeric failure, 3 resource.

mod config;
mod output;

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use twistl::characters::CharacterTable;
use twistl::forms::HeckeForm;
use twistl::lfunc::TwistedL;
use twistl::zeros::ScanOptions;
use twistl::Error as CoreError;

use config::RunConfig;
use output::{fmt_f64, OutputSink};

#[derive(Parser)]
#[command(name = "twistl", version, about = "Twisted L-function experiments")]
struct Cli {
    /// key=value config file; CLI flags override file entries
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// form descriptor: "delta" or a path to a form file
    #[arg(long, global = true)]
    form: Option<String>,
    /// coefficient table size
    #[arg(long, global = true)]
    n_max: Option<usize>,
    /// output directory for artifacts
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// worker count for character sweeps
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// coefficient cache directory
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// absolute accuracy budget for completed-function evaluation
    #[arg(long, global = true)]
    target_accuracy: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate (and cache) the coefficient table; run the Deligne gate.
    Coeffs,
    /// Character-table diagnostics and Gauss-sum dump for one modulus.
    Chars {
        #[arg(long)]
        q: u64,
    },
    /// Evaluate L and Lambda at one point for one character.
    Eval {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        j: u64,
        #[arg(long)]
        re: f64,
        #[arg(long)]
        im: f64,
    },
    /// S, M, R per character at fixed t.
    Sarg {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x_cubed: u64,
        /// restrict to one character index
        #[arg(long)]
        j: Option<u64>,
    },
    /// Critical-line zeros and the joint audit for one character pair.
    Zeros {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        j: u64,
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        #[arg(long, default_value = "0.0625")]
        step: f64,
    },
    /// Averaged zero-density profile over a sigma-grid.
    Density {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t1: f64,
        #[arg(long)]
        t2: f64,
        /// comma-separated sigma values right of 1/2
        #[arg(long, value_delimiter = ',')]
        sigma_grid: Vec<f64>,
    },
    /// Character-averaged |LM - 1|^2 deviation.
    Mollifier {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        t: f64,
        /// paper exponent c in (0, 1/360)
        #[arg(long, default_value = "0.002")]
        c: f64,
        /// desk-scale length override (recorded in the report)
        #[arg(long)]
        length: Option<f64>,
    },
    /// Character-averaged moments of S, M, R.
    Moments {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        x_cubed: u64,
        #[arg(long, value_delimiter = ',')]
        n: Vec<u32>,
    },
    /// Empirical distribution of S/sqrt(loglog q) vs the normal law.
    Clt {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value = "40")]
        bins: usize,
    },
    /// Run the invariant suite at one modulus.
    Check {
        #[arg(long)]
        q: u64,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap help/version print normally; everything else is usage
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    };
    std::process::exit(code);
}

fn exit_code(e: &anyhow::Error) -> i32 {
    if let Some(core) = e.downcast_ref::<CoreError>() {
        match core {
            CoreError::Validation(_) | CoreError::Domain(_) | CoreError::Format(_) => 1,
            CoreError::Resource(_) => 3,
            _ => 2,
        }
    } else {
        1
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = RunConfig::resolve(&cli)?;
    twistl::sweep::with_workers(cfg.workers, || dispatch(&cli.cmd, &cfg))
}

fn load_form(cfg: &RunConfig) -> anyhow::Result<Arc<HeckeForm>> {
    if cfg.form == "delta" {
        let (form, outcome) = twistl::forms::delta_cached(cfg.n_max, &cfg.cache_dir)?;
        eprintln!("coefficients: cache {outcome:?}");
        Ok(form)
    } else {
        Ok(twistl::forms::load_form(std::path::Path::new(&cfg.form), cfg.n_max)?)
    }
}

fn build_pair(
    form: &Arc<HeckeForm>,
    table: &Arc<CharacterTable>,
    j: u64,
) -> anyhow::Result<(TwistedL, TwistedL)> {
    let tl = TwistedL::new(Arc::clone(form), table.character(j))?;
    let tl_bar = TwistedL::new(Arc::clone(form), table.character(j).conjugate())?;
    Ok((tl, tl_bar))
}

fn validate_q(form: &HeckeForm, q: u64) -> anyhow::Result<()> {
    if !twistl::primes::is_prime(q) || q < 3 || q % 2 == 0 {
        anyhow::bail!(CoreError::Validation(format!("q = {q} is not an odd prime")));
    }
    if form.level() % q == 0 {
        anyhow::bail!(CoreError::Validation(format!(
            "gcd(q, level) != 1 for q = {q}"
        )));
    }
    Ok(())
}

fn dispatch(cmd: &Cmd, cfg: &RunConfig) -> anyhow::Result<()> {
    match cmd {
        Cmd::Coeffs => {
            let form = load_form(cfg)?;
            form.deligne_check(form.n_max() as u64)?;
            let sink = OutputSink::new(cfg)?;
            let report = serde_json::json!({
                "n_max": form.n_max(),
                "weight": form.weight(),
                "level": form.level(),
                "form_id": form.id(),
                "deligne_ok": true,
                "lambda_2": fmt_f64(form.lambda(2)?),
            });
            sink.write_json("coeffs.json", &report, cfg)?;
            println!("coeffs ok: n_max = {}", form.n_max());
            Ok(())
        }
        Cmd::Chars { q } => {
            let form = load_form(cfg)?;
            validate_q(&form, *q)?;
            let table = CharacterTable::build(*q)?;
            let sink = OutputSink::new(cfg)?;
            let mut dlog_rows = vec!["a,ind".to_string()];
            dlog_rows.extend(table.dlog_rows().map(|(a, i)| format!("{a},{i}")));
            sink.write_csv(&format!("chars-dlog-q{q}.csv"), &dlog_rows, cfg)?;
            let mut gauss_rows = vec!["j,re_eps,im_eps".to_string()];
            let mut worst = 0.0f64;
            for chi in table.enumerate_primitive() {
                let g = chi.gauss_sum()?;
                worst = worst.max((g.norm() - 1.0).abs());
                gauss_rows.push(format!("{},{},{}", chi.index(), fmt_f64(g.re), fmt_f64(g.im)));
            }
            sink.write_csv(&format!("chars-gauss-q{q}.csv"), &gauss_rows, cfg)?;
            println!(
                "chars ok: q = {q}, generator = {}, max ||eps|-1| = {worst:.3e}",
                table.generator()
            );
            if worst > 1e-10 {
                anyhow::bail!(CoreError::Convergence("gauss sum modulus check".into()));
            }
            Ok(())
        }
        Cmd::Eval { q, j, re, im } => {
            let form = load_form(cfg)?;
            validate_q(&form, *q)?;
            let table = CharacterTable::build(*q)?;
            let tl = TwistedL::with_options(
                Arc::clone(&form),
                table.character(*j),
                cfg.target_accuracy,
                -0.5,
                3.5,
            )?;
            let s = Complex64::new(*re, *im);
            let lam = tl.completed_lambda(s)?;
            let l = tl.l_value(s)?;
            let refl = tl.completed_lambda(Complex64::new(1.0, 0.0) - s.conj())?;
            let fe_resid = (lam - tl.eps() * refl.conj()).norm();
            let out = serde_json::json!({
                "q": q, "j": j,
                "s": [fmt_f64(*re), fmt_f64(*im)],
                "lambda": [fmt_f64(lam.re), fmt_f64(lam.im)],
                "l": [fmt_f64(l.re), fmt_f64(l.im)],
                "eps": [fmt_f64(tl.eps().re), fmt_f64(tl.eps().im)],
                "fe_residual": fmt_f64(fe_resid),
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
            Ok(())
        }
        Cmd::Sarg { q, t, x_cubed, j } => {
            let form = load_form(cfg)?;
            validate_q(&form, *q)?;
            if *t <= 0.0 {
                anyhow::bail!(CoreError::Validation("sarg requires t > 0".into()));
            }
            let table = CharacterTable::build(*q)?;
            let x = (*x_cubed as f64).cbrt();
            let sink = OutputSink::new(cfg)?;
            let mut rows = vec!["j,t_used,s,m,r,nudged".to_string()];
            match j {
                Some(j) => {
                    let ev = twistl::argument::SweepEvaluator::new(
                        Arc::clone(&form),
                        Arc::clone(&table),
                        *t,
                        cfg.target_accuracy,
                    )?;
                    let sv = ev.s_arg_nudged(*j)?;
                    let m = twistl::argument::m_sum(&form, &table.character(*j), sv.t_used, x)?;
                    rows.push(format!(
                        "{j},{},{},{},{},{}",
                        fmt_f64(sv.t_used),
                        fmt_f64(sv.value),
                        fmt_f64(m),
                        fmt_f64(sv.value - m),
                        sv.nudged
                    ));
                }
                None => {
                    let vals =
                        twistl::moments::sweep_values(&form, &table, *t, x, cfg.target_accuracy)?;
                    for r in vals {
                        rows.push(format!(
                            "{},{},{},{},{},{}",
                            r.j,
                            fmt_f64(r.t_used),
                            fmt_f64(r.s),
                            fmt_f64(r.m),
                            fmt_f64(r.r),
                            r.nudged
                        ));
                    }
                }
            }
            sink.write_csv(&format!("sarg-q{q}-t{t}.csv"), &rows, cfg)?;
            println!("sarg ok: {} rows", rows.len() - 1);
            Ok(())
        }
        Cmd::Zeros { q, j, t1, t2, step } => {
            let form = load_form(cfg)?;
            validate_q(&form, *q)?;
            let table = CharacterTable::build(*q)?;
            let (tl, tl_bar) = build_pair(&form, &table, *j)?;
            let opts = ScanOptions {
                step: *step,
                ..ScanOptions::default()
            };
            let (list, list_bar) =
                twistl::zeros::find_zeros_on_line(&tl, &tl_bar, *t1, *t2, opts)?;
            let sink = OutputSink::new(cfg)?;
            let mut rows = vec!["j,gamma,scan_step".to_string()];
            for &g in &list.ordinates {
                rows.push(format!("{},{},{}", list.chi_index, fmt_f64(g), fmt_f64(list.scan_step)));
            }
            for &g in &list_bar.ordinates {
                rows.push(format!(
                    "{},{},{}",
                    list_bar.chi_index,
                    fmt_f64(g),
                    fmt_f64(list_bar.scan_step)
                ));
            }
            sink.write_csv(&format!("zeros-q{q}-j{j}.csv"), &rows, cfg)?;
            println!(
                "zeros ok: chi {} -> {} line zeros (rect {}), conjugate -> {} (rect {}), offline pairs {}",
                list.chi_index,
                list.ordinates.len(),
                list.rect_count,
                list_bar.ordinates.len(),
                list_bar.rect_count,
                list.offline_pairs + list_bar.offline_pairs
            );
            Ok(())
        }
        Cmd::Density { q, t1, t2, sigma_grid } => {
            let form = load_form(cfg)?;
            validate_q(&form, *q)?;
            if sigma_grid.is_empty() {
                anyhow::bail!(CoreError::Validation("empty sigma grid".into()));
            }
            let table = CharacterTable::build(*q)?;
            let profile = twistl::zeros::density_profile(
                &form,
                &table,
                *t1,
                *t2,
                sigma_grid,
                ScanOptions::default(),
            )?;
            let sink = OutputSink::new(cfg)?;
            let mut rows = vec!["sigma,n_avg,in_theorem_regime".to_string()];
            rows.push(format!(
                "{},{},anchor",
                fmt_f64(profile.anchor_sigma),
                fmt_f64(profile.anchor_n_avg)
            ));
            for ((s, v), flag) in profile
                .sigmas
                .iter()
                .zip(&profile.n_avg)
                .zip(&profile.in_theorem_regime)
            {
                rows.push(format!("{},{},{}", fmt_f64(*s), fmt_f64(*v), flag));
            }
            sink.write_csv(&format!("density-q{q}.csv"), &rows, cfg)?;
            sink.write_json(&format!("density-q{q}.json"), &profile, cfg)?;
            println!(
                "density ok: anchor {} -> slope {}",
                fmt_f64(profile.anchor_n_avg),
                fmt_f64(profile.fit_slope)
            );
            Ok(())
        }
        Cmd::Mollifier { q, sigma, t, c, length } => {
            let form = load_form(cfg)?;
            validate_q(&form, *q)?;
            let spec = match length {
                Some(l) => twistl::mollifier::MollifierSpec::with_length(&form, *c, *l)?,
                None => twistl::mollifier::MollifierSpec::new(&form, *q, *c)?,
            };
            let table = CharacterTable::build(*q)?;
            let dev = twistl::mollifier::lm_deviation_average(
                &form,
                &table,
                &spec,
                *sigma,
                *t,
                cfg.target_accuracy,
            )?;
            let sink = OutputSink::new(cfg)?;
            let rows = vec![
                "q,sigma,t,l_effective,length_overridden,average,count".to_string(),
                format!(
                    "{q},{},{},{},{},{},{}",
                    fmt_f64(*sigma),
                    fmt_f64(*t),
                    fmt_f64(dev.l_effective),
                    spec.overridden(),
                    fmt_f64(dev.average),
                    dev.count
                ),
            ];
            sink.write_csv(&format!("mollifier-q{q}.csv"), &rows, cfg)?;
            println!("mollifier ok: average = {}", fmt_f64(dev.average));
            Ok(())
        }
        Cmd::Moments { q, t, x_cubed, n } => {
            let form = load_form(cfg)?;
            validate_q(&form, *q)?;
            if n.is_empty() {
                anyhow::bail!(CoreError::Validation("empty n list".into()));
            }
            let table = CharacterTable::build(*q)?;
            let x = (*x_cubed as f64).cbrt();
            let report =
                twistl::moments::sweep_moments(&form, &table, *t, x, n, cfg.target_accuracy)?;
            let sink = OutputSink::new(cfg)?;
            sink.write_json(&format!("moments-q{q}.json"), &report, cfg)?;
            println!(
                "moments ok: {} characters ({} nudged)",
                report.success + report.nudged,
                report.nudged
            );
            Ok(())
        }
        Cmd::Clt { q, t, bins } => {
            let form = load_form(cfg)?;
            validate_q(&form, *q)?;
            let table = CharacterTable::build(*q)?;
            let report = twistl::moments::clt_distribution(
                &form,
                &table,
                *t,
                *bins,
                cfg.target_accuracy,
            )?;
            let sink = OutputSink::new(cfg)?;
            let mut rows = vec!["bin_left,bin_right,mass,gaussian_mass".to_string()];
            for b in &report.bins {
                rows.push(format!(
                    "{},{},{},{}",
                    fmt_f64(b.lo),
                    fmt_f64(b.hi),
                    fmt_f64(b.mass),
                    fmt_f64(b.gaussian_mass)
                ));
            }
            sink.write_csv(&format!("clt-q{q}.csv"), &rows, cfg)?;
            sink.write_json(&format!("clt-q{q}.json"), &report, cfg)?;
            println!("clt ok: ks = {}", fmt_f64(report.ks_distance));
            Ok(())
        }
        Cmd::Check { q } => {
            let form = load_form(cfg)?;
            validate_q(&form, *q)?;
            let results = twistl::verify::run_all(&form, *q)?;
            let mut all_ok = true;
            for r in &results {
                println!("{} {} - {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                all_ok &= r.passed;
            }
            if !all_ok {
                anyhow::bail!(CoreError::Convergence("invariant suite failed".into()));
            }
            Ok(())
        }
    }
}
