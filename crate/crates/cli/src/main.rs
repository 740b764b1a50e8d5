use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use zmlab_core::lab::{
    integrate_moment, poly_moment, poly_moment_exact, run_suite, twisted_poly_moment, LabConfig, MomentEstimate,
    SuiteSelection,
};
use zmlab_core::partition::{build_partition, product_poly_coeffs, sieve_range, DirichletPoly, PartitionScheme};
use zmlab_core::twisted4::{direct_twisted_integral, prop3_main_term, Weight};
use zmlab_core::verify::{
    budget_from_ladder, fmt_f64, lemma1_suite, paper_ladder, prop1_suite, random_line_sites, theorem_budget,
    write_margin_csv,
};
use zmlab_core::zeta::GridCache;
use zmlab_core::PartitionParams;

const GRID_TARGET: f64 = 1e-8;

#[derive(Parser)]
#[command(name = "zmlab", version, about = "Numerical experiments on moments of the Riemann zeta function")]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Paper,
    Desk,
}

#[derive(Clone, Copy, ValueEnum)]
enum Twist {
    Unit,
    Scheme,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Lemma1,
    Prop1,
    Budget,
}

#[derive(Subcommand)]
enum Command {
    /// Print the primes in [lo, hi).
    Sieve {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
    /// Build a prime-window scheme and print it as JSON.
    Scheme {
        #[arg(long = "T")]
        t: f64,
        #[arg(long, value_enum, default_value = "desk")]
        mode: Mode,
        #[arg(long)]
        theta_min: Option<f64>,
        #[arg(long)]
        c_p: Option<f64>,
        #[arg(long)]
        c_omega: Option<f64>,
        /// Explicit boundaries T_1, T_2, ... starting at e^2.
        #[arg(long = "override", value_delimiter = ',')]
        tj: Option<Vec<f64>>,
    },
    /// Tabulate Z(t) and theta(t) on a uniform grid as CSV.
    Zeta {
        #[arg(long)]
        t_start: f64,
        #[arg(long)]
        t_end: f64,
        #[arg(long)]
        spacing: f64,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Moments I_k(T) over [T, 2T].
    Moment {
        #[arg(long, value_delimiter = ',', required = true)]
        k: Vec<f64>,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        spacing: Option<f64>,
    },
    /// Mean square of a window product, with and without the fourth power of zeta.
    PolyMoment {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: f64,
        #[arg(long = "T")]
        t: Option<f64>,
    },
    /// Twisted fourth moment: contour main term against the direct integral.
    Twisted {
        #[arg(long, value_enum, default_value = "unit")]
        twist: Twist,
        #[arg(long = "T")]
        t: f64,
        /// Largest number of nodes per circle.
        #[arg(long, default_value_t = 256)]
        nodes: usize,
        #[arg(long, default_value_t = 2.0)]
        k: f64,
        #[arg(long, default_value_t = 2)]
        v: usize,
        #[arg(long, default_value_t = 0)]
        r: usize,
    },
    /// Pointwise inequality checks or the summation budget.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        sites: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// k for prop1 and budget; the exponent for lemma1.
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        k: f64,
    },
    /// Run the configured suites and write reports.
    Report {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_config(path: Option<&Path>) -> Result<Option<LabConfig>> {
    path.map(|p| LabConfig::load(p).with_context(|| format!("loading {}", p.display())))
        .transpose()
}

fn cache_for(cfg: Option<&LabConfig>, flag: Option<PathBuf>) -> GridCache {
    match (flag, cfg) {
        (Some(dir), _) => GridCache::from_env_or(dir),
        (None, Some(c)) => c.grid_cache(),
        (None, None) => GridCache::from_env_or(".zmlab-cache"),
    }
}

fn scheme_for(cfg: Option<&LabConfig>) -> Result<PartitionScheme> {
    let params = cfg.map_or_else(|| LabConfig::new(1e4).partition, |c| c.partition.clone());
    Ok(build_partition(&params)?)
}

fn moment_csv(rows: &[MomentEstimate]) -> Result<()> {
    let mut w = csv::Writer::from_writer(io::stdout().lock());
    w.write_record(["T", "k", "spacing", "value", "richardson_err", "comparator", "ratio"])?;
    for m in rows {
        w.write_record(
            [m.t, m.k, m.spacing, m.value, m.richardson_err, m.comparator, m.ratio].map(fmt_f64),
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Spacing at most `h` dividing `len` into a multiple of four panels.
fn fitted_spacing(len: f64, h: f64) -> f64 {
    len / ((len / (4.0 * h)).ceil().max(1.0) * 4.0)
}

fn run(cli: Cli) -> Result<bool> {
    let cfg = load_config(cli.config.as_deref())?;
    let cfg = cfg.as_ref();
    match cli.command {
        Command::Sieve { lo, hi, count } => {
            if hi < lo {
                bail!("need lo <= hi");
            }
            let primes = sieve_range(lo, hi);
            let mut out = io::BufWriter::new(io::stdout().lock());
            if count {
                writeln!(out, "{}", primes.len())?;
            } else {
                for p in primes {
                    writeln!(out, "{p}")?;
                }
            }
        }
        Command::Scheme {
            t,
            mode,
            theta_min,
            c_p,
            c_omega,
            tj,
        } => {
            let mut params = match mode {
                Mode::Paper => PartitionParams::paper(t),
                Mode::Desk => PartitionParams::desk_small(t),
            };
            params.theta_min = theta_min.unwrap_or(params.theta_min);
            params.c_p = c_p.unwrap_or(params.c_p);
            params.c_omega = c_omega.unwrap_or(params.c_omega);
            params.explicit_tj_override = tj;
            let scheme = build_partition(&params)?;
            if scheme.length_warning {
                eprintln!("warning: T_ell exceeds T^(1/10)");
            }
            serde_json::to_writer_pretty(io::stdout().lock(), &scheme.export())?;
            println!();
        }
        Command::Zeta {
            t_start,
            t_end,
            spacing,
            cache,
        } => {
            let (grid, stats) =
                cache_for(cfg, cache).load_or_compute(t_start, t_end, spacing, GRID_TARGET)?;
            eprintln!(
                "{} points, cache {}, {} evaluations",
                grid.len(),
                if stats.hit { "hit" } else { "miss" },
                stats.evaluations
            );
            let mut w = csv::Writer::from_writer(io::BufWriter::new(io::stdout().lock()));
            w.write_record(["t", "Z", "theta"])?;
            for i in 0..grid.len() {
                w.write_record([grid.t(i), grid.z_values[i], grid.theta[i]].map(fmt_f64))?;
            }
            w.flush()?;
        }
        Command::Moment { k, t, spacing } => {
            let h = spacing
                .or(cfg.and_then(|c| c.spacing))
                .unwrap_or_else(|| zmlab_core::zeta::default_spacing(2.0 * t));
            let (grid, _) = cache_for(cfg, None).load_or_compute(t, 2.0 * t, fitted_spacing(t, h), GRID_TARGET)?;
            let rows = k
                .iter()
                .map(|&k| integrate_moment(k, t, &grid))
                .collect::<zmlab_core::Result<Vec<_>>>()?;
            moment_csv(&rows)?;
        }
        Command::PolyMoment { v, r, k, t } => {
            let t = t.or(cfg.map(|c| c.t)).unwrap_or(1e4);
            let scheme = scheme_for(cfg)?;
            let h = cfg.and_then(|c| c.spacing).unwrap_or_else(|| zmlab_core::zeta::default_spacing(2.0 * t));
            let (grid, _) = cache_for(cfg, None).load_or_compute(t, 2.0 * t, fitted_spacing(t, h), GRID_TARGET)?;
            let plain = poly_moment(&scheme, k, v, r, t, &grid)?;
            let twisted = twisted_poly_moment(&scheme, k, v, r, t, &grid)?;
            let exact = match poly_moment_exact(&scheme, k, v, r, t) {
                Ok(x) => Some(x),
                Err(zmlab_core::LabError::Capacity(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let out = serde_json::json!({ "poly": plain, "twisted": twisted, "exact": exact });
            serde_json::to_writer_pretty(io::stdout().lock(), &out)?;
            println!();
        }
        Command::Twisted {
            twist,
            t,
            nodes,
            k,
            v,
            r,
        } => {
            let poly = match twist {
                Twist::Unit => DirichletPoly::one(),
                Twist::Scheme => product_poly_coeffs(&scheme_for(cfg)?, k - 2.0, v, r)?,
            };
            let mut contour = cfg.map(|c| c.contour.clone()).unwrap_or_default();
            contour.max_nodes = nodes;
            contour.start_nodes = contour.start_nodes.min(nodes);
            let main = prop3_main_term(&poly, t, &contour)?;
            let b = contour.bump;
            let (lo, hi) = (b.support_lo * t, b.support_hi * t);
            let h = cfg
                .and_then(|c| c.spacing)
                .unwrap_or_else(|| zmlab_core::zeta::default_spacing(hi));
            let (grid, _) = cache_for(cfg, None).load_or_compute(lo, hi, fitted_spacing(hi - lo, h), GRID_TARGET)?;
            let direct = direct_twisted_integral(&poly, t, &grid, Weight::Bump(b))?;
            let out = serde_json::json!({
                "T": t,
                "twist_terms": poly.len(),
                "contour": main,
                "direct": direct,
                "ratio": main.value / direct.value,
            });
            serde_json::to_writer_pretty(io::stdout().lock(), &out)?;
            println!();
        }
        Command::Verify { suite, sites, seed, k } => {
            let scheme = scheme_for(cfg)?;
            let t = cfg.map_or(1e4, |c| c.t);
            let pts = random_line_sites(sites, seed, t, 2.0 * t);
            match suite {
                Suite::Lemma1 | Suite::Prop1 => {
                    let reports = if matches!(suite, Suite::Lemma1) {
                        lemma1_suite(&scheme, &pts, k)?
                    } else {
                        prop1_suite(&scheme, &pts, k)?
                    };
                    write_margin_csv(&reports, io::stdout().lock())?;
                    let violations = reports.iter().filter(|r| r.is_violation()).count();
                    let certified = reports.iter().filter(|r| r.certified).count();
                    eprintln!("{} reports, {certified} certified, {violations} violations", reports.len());
                    return Ok(violations == 0);
                }
                Suite::Budget => {
                    let ladder = budget_from_ladder(&paper_ladder(), k, 50.0)?;
                    let own = if scheme.ell >= 2 { Some(theorem_budget(&scheme, k)?) } else { None };
                    let ok = ladder.max_ln_term() < (1e-100f64).ln();
                    let out = serde_json::json!({ "paper_ladder": ladder, "scheme": own });
                    serde_json::to_writer_pretty(io::stdout().lock(), &out)?;
                    println!();
                    return Ok(ok);
                }
            }
        }
        Command::Report { out } => {
            let mut config = match cfg {
                Some(c) => c.clone(),
                None => {
                    let mut c = LabConfig::new(1e4);
                    c.suites = SuiteSelection::all();
                    c
                }
            };
            if let Some(dir) = out {
                config.out_dir = dir;
            }
            let bundle = run_suite(&config)?;
            for suite in &bundle.suites {
                for c in &suite.checks {
                    let status = match (c.passed, c.asserted) {
                        (true, _) => "ok",
                        (false, true) => "FAILED",
                        (false, false) => "note",
                    };
                    println!("{:<12} {:<6} {}: {}", suite.name, status, c.name, c.detail);
                }
            }
            println!(
                "cache: {} hits, {} misses, {} zeta evaluations",
                bundle.cache.hits, bundle.cache.misses, bundle.cache.zeta_evaluations
            );
            return Ok(bundle.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
