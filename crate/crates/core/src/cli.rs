//! Command-line front end.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::metrics::{other_bin_change, suppression_percent, SpectrumResult};
use crate::report::{fmt_g9, Cell, Csv};
use crate::sensing::SensingScheme;
use crate::signal_recon::{freq_response_foh, freq_response_zoh};
use crate::simloop::{run_closed_loop, run_open_loop_sensing, SimResult};

// stdout may be a closed pipe (`| head`); output is best effort
macro_rules! say {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ASSERTION: i32 = 2;
pub const EXIT_DIVERGENCE: i32 = 3;

/// Band the 2 Hz error suppression of FOH against ZOH must fall in, percent.
pub const SUPPRESSION_BAND: (f64, f64) = (20.0, 60.0);

#[derive(Debug, Parser)]
#[command(
    name = "holdtrack",
    version,
    about = "ZOH/FOH sensing reconstruction and closed-loop pendulum tracking"
)]
pub struct Args {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// key = value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory for CSV files
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Override one configuration key (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub set: Vec<String>,

    /// Comma separated subset of zoh,foh,zoh+filter,foh+filter
    #[arg(long, global = true)]
    pub schemes: Option<String>,

    /// Print the effective configuration and exit
    #[arg(long, global = true)]
    pub print_config: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Hold magnitude and phase responses
    FreqResponse,
    /// Open-loop sensing error per scheme
    OpenLoop,
    /// Closed-loop tracking error per scheme, with traces
    ClosedLoop,
    /// Steady-state error spectrum, ZOH against FOH
    Spectrum,
    /// Everything above
    All,
}

/// Whether the run's checks held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    fn and(self, other: Verdict) -> Verdict {
        if self == Verdict::Pass && other == Verdict::Pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    fn from_bool(ok: bool) -> Verdict {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }
}

pub fn parse_schemes(list: &str) -> Result<Vec<SensingScheme>> {
    let mut picked: Vec<SensingScheme> = Vec::new();
    for part in list.split(',').filter(|s| !s.trim().is_empty()) {
        let s = SensingScheme::parse(part)?;
        if !picked.contains(&s) {
            picked.push(s);
        }
    }
    if picked.is_empty() {
        return Err(Error::InvalidParameter("scheme list is empty".into()));
    }
    picked.sort_by_key(|s| SensingScheme::ALL.iter().position(|a| a == s));
    Ok(picked)
}

/// Loads the file (if any), then applies overrides in order.
pub fn effective_config(path: Option<&Path>, overrides: &[String]) -> Result<Config> {
    let mut cfg = match path {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    for kv in overrides {
        cfg.apply_override(kv)?;
    }
    Ok(cfg)
}

/// True when every listed scheme is present and `values` strictly decreases
/// in ZOH, FOH, ZOH+Filter, FOH+Filter order. `None` if a scheme is missing.
pub fn ordering_holds(values: &[(SensingScheme, f64)]) -> Option<bool> {
    let get = |s: SensingScheme| {
        values
            .iter()
            .find(|(k, _)| k.label() == s.label())
            .map(|v| v.1)
    };
    let v: Option<Vec<f64>> = SensingScheme::ALL.iter().map(|&s| get(s)).collect();
    v.map(|v| v.windows(2).all(|w| w[0] > w[1]))
}

fn run_parallel<T: Send>(
    schemes: &[SensingScheme],
    f: impl Fn(SensingScheme) -> Result<T> + Sync,
) -> Vec<(SensingScheme, Result<T>)> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = schemes
            .iter()
            .map(|&s| {
                let f = &f;
                scope.spawn(move || f(s))
            })
            .collect();
        schemes
            .iter()
            .zip(handles)
            .map(|(&s, h)| (s, h.join().expect("simulation thread panicked")))
            .collect()
    })
}

fn named(scheme: SensingScheme, e: Error) -> Error {
    match e {
        Error::Divergence { .. } => {
            eprintln!("scheme {scheme} diverged");
            e
        }
        other => other,
    }
}

pub fn freq_response_csv(cfg: &Config) -> Result<Csv> {
    let mut csv = Csv::new(&[
        "omega_rad_s",
        "zoh_mag",
        "zoh_phase_rad",
        "foh_mag",
        "foh_phase_rad",
    ]);
    for w in cfg.freq_grid()? {
        let z = freq_response_zoh(w, cfg.sample_period);
        let f = freq_response_foh(w, cfg.sample_period);
        csv.row(&[
            Cell::F(w),
            Cell::F(z.magnitude),
            Cell::F(z.phase),
            Cell::F(f.magnitude),
            Cell::F(f.phase),
        ]);
    }
    Ok(csv)
}

fn cmd_freq_response(cfg: &Config, out: &Path) -> Result<Verdict> {
    freq_response_csv(cfg)?.write_to(&out.join("freq_response.csv"))?;
    let w = cfg.omega;
    let z = freq_response_zoh(w, cfg.sample_period);
    let f = freq_response_foh(w, cfg.sample_period);
    say!(
        "hold response at {} Hz:",
        fmt_g9(w / (2.0 * std::f64::consts::PI))
    );
    say!(
        "  ZOH |H| = {:.7}  phase = {:.4e} rad",
        z.magnitude,
        z.phase
    );
    say!(
        "  FOH |H| = {:.7}  phase = {:.4e} rad",
        f.magnitude,
        f.phase
    );
    Ok(Verdict::Pass)
}

pub fn open_loop_table(
    cfg: &Config,
    schemes: &[SensingScheme],
) -> Result<Vec<(SensingScheme, f64)>> {
    let ol = cfg.open_loop_config()?;
    run_parallel(schemes, |s| {
        run_open_loop_sensing(cfg.scheme(s), &ol)?.p2p_percent()
    })
    .into_iter()
    .map(|(s, r)| r.map(|v| (s, v)))
    .collect()
}

fn print_table(title: &str, rows: &[(SensingScheme, f64)]) {
    say!("{title}");
    for (s, v) in rows {
        say!("  {:<11} {:>9.4} %", s.label(), v);
    }
}

fn table_csv(column: &str, rows: &[(SensingScheme, f64)]) -> Csv {
    let mut csv = Csv::new(&["scheme", column]);
    for (s, v) in rows {
        csv.row(&[Cell::S(s.label()), Cell::F(*v)]);
    }
    csv
}

fn check_ordering(rows: &[(SensingScheme, f64)]) -> Verdict {
    match ordering_holds(rows) {
        Some(true) => {
            say!("  ordering ZOH > FOH > ZOH+Filter > FOH+Filter: holds");
            Verdict::Pass
        }
        Some(false) => {
            say!("  ordering ZOH > FOH > ZOH+Filter > FOH+Filter: FAILS");
            Verdict::Fail
        }
        None => Verdict::Pass,
    }
}

fn cmd_open_loop(cfg: &Config, schemes: &[SensingScheme], out: &Path) -> Result<Verdict> {
    let rows = open_loop_table(cfg, schemes)?;
    table_csv("p2p_error_percent", &rows).write_to(&out.join("table2.csv"))?;
    print_table("open-loop peak-to-peak error:", &rows);
    Ok(check_ordering(&rows))
}

pub fn closed_loop_runs(
    cfg: &Config,
    schemes: &[SensingScheme],
) -> Result<Vec<(SensingScheme, SimResult)>> {
    run_parallel(schemes, |s| run_closed_loop(&cfg.sim_config(s)?))
        .into_iter()
        .map(|(s, r)| r.map(|v| (s, v)).map_err(|e| named(s, e)))
        .collect()
}

pub fn trace_csv(r: &SimResult) -> Csv {
    let mut csv = Csv::new(&["t", "theta_d", "theta", "theta_hat", "error", "va"]);
    for row in &r.traces {
        csv.row(&[
            Cell::F(row.t),
            Cell::F(row.theta_d),
            Cell::F(row.theta_true),
            Cell::F(row.theta_hat),
            Cell::F(row.error),
            Cell::F(row.va),
        ]);
    }
    csv
}

fn cmd_closed_loop(runs: &[(SensingScheme, SimResult)], out: &Path) -> Result<Verdict> {
    let rows: Vec<(SensingScheme, f64)> = runs
        .iter()
        .map(|(s, r)| r.steady_p2p_percent().map(|v| (*s, v)))
        .collect::<Result<_>>()?;
    for (s, r) in runs {
        trace_csv(r).write_to(&out.join(format!("traces_{}.csv", s.slug())))?;
    }
    table_csv("closed_loop_p2p_percent", &rows).write_to(&out.join("table3.csv"))?;
    print_table("closed-loop peak-to-peak tracking error:", &rows);
    let find = |l: &str| rows.iter().find(|(s, _)| s.label() == l).map(|v| v.1);
    if let (Some(z), Some(f)) = (find("ZOH"), find("FOH")) {
        say!("  FOH improvement over ZOH: {:.2} %", 100.0 * (z - f) / z);
    }
    Ok(check_ordering(&rows))
}

/// ZOH and FOH spectra, both normalized to the ZOH maximum.
pub fn spectra(zoh: &SimResult, foh: &SimResult) -> Result<(SpectrumResult, SpectrumResult)> {
    let z = zoh.steady_spectrum(None)?;
    let f = foh.steady_spectrum(Some(z.max_magnitude()))?;
    Ok((z, f))
}

fn cmd_spectrum(cfg: &Config, zoh: &SimResult, foh: &SimResult, out: &Path) -> Result<Verdict> {
    let (z, f) = spectra(zoh, foh)?;
    let mut csv = Csv::new(&["freq_hz", "zoh_pct", "foh_pct"]);
    for k in 0..z.freqs.len() {
        csv.row(&[
            Cell::F(z.freqs[k]),
            Cell::F(z.normalized_magnitude[k]),
            Cell::F(f.normalized_magnitude[k]),
        ]);
    }
    csv.write_to(&out.join("spectrum.csv"))?;
    let f0 = cfg.omega / (2.0 * std::f64::consts::PI);
    let supp = suppression_percent(&z, &f, f0);
    let (other, at) = other_bin_change(&z, &f, f0);
    say!(
        "error spectrum (bin spacing {} Hz):",
        fmt_g9(z.bin_spacing())
    );
    say!(
        "  {} Hz suppression, FOH against ZOH: {supp:.2} %",
        fmt_g9(f0)
    );
    say!(
        "  largest change elsewhere: {other:.3} points (at {} Hz: {at:.3} points)",
        fmt_g9(f0)
    );
    let in_band = (SUPPRESSION_BAND.0..=SUPPRESSION_BAND.1).contains(&supp);
    if !in_band {
        say!(
            "  suppression outside [{}, {}] %",
            SUPPRESSION_BAND.0,
            SUPPRESSION_BAND.1
        );
    }
    Ok(Verdict::from_bool(in_band && other < at))
}

fn dispatch(args: &Args, cfg: &Config) -> Result<Verdict> {
    let schemes = match &args.schemes {
        Some(list) => parse_schemes(list)?,
        None => SensingScheme::ALL.to_vec(),
    };
    let Some(command) = args.command else {
        return Err(Error::InvalidParameter("no subcommand given".into()));
    };
    std::fs::create_dir_all(&args.out)
        .map_err(|e| Error::Io(format!("{}: {e}", args.out.display())))?;
    let out = args.out.as_path();

    let needs_closed = matches!(
        command,
        Command::ClosedLoop | Command::Spectrum | Command::All
    );
    let mut closed_schemes = if matches!(command, Command::Spectrum) {
        Vec::new()
    } else {
        schemes.clone()
    };
    if matches!(command, Command::Spectrum | Command::All) {
        for s in [SensingScheme::ZOH, SensingScheme::FOH] {
            if !closed_schemes.contains(&s) {
                closed_schemes.push(s);
            }
        }
        closed_schemes.sort_by_key(|s| SensingScheme::ALL.iter().position(|a| a == s));
    }
    let runs = if needs_closed {
        closed_loop_runs(cfg, &closed_schemes)?
    } else {
        Vec::new()
    };
    let pick = |s: SensingScheme| {
        runs.iter()
            .find(|(k, _)| *k == s)
            .map(|v| &v.1)
            .expect("run present")
    };

    let mut verdict = Verdict::Pass;
    if matches!(command, Command::FreqResponse | Command::All) {
        verdict = verdict.and(cmd_freq_response(cfg, out)?);
    }
    if matches!(command, Command::OpenLoop | Command::All) {
        verdict = verdict.and(cmd_open_loop(cfg, &schemes, out)?);
    }
    if matches!(command, Command::ClosedLoop | Command::All) {
        let selected: Vec<_> = runs
            .iter()
            .filter(|(s, _)| schemes.contains(s))
            .cloned()
            .collect();
        verdict = verdict.and(cmd_closed_loop(&selected, out)?);
    }
    if matches!(command, Command::Spectrum | Command::All) {
        verdict = verdict.and(cmd_spectrum(
            cfg,
            pick(SensingScheme::ZOH),
            pick(SensingScheme::FOH),
            out,
        )?);
    }
    Ok(verdict)
}

/// Runs the CLI on `argv` and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cfg = match effective_config(args.config.as_deref(), &args.set) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    if args.print_config {
        {
            use std::io::Write as _;
            let _ = std::io::stdout().write_all(cfg.to_text().as_bytes());
        }
        return EXIT_OK;
    }
    match dispatch(&args, &cfg) {
        Ok(Verdict::Pass) => EXIT_OK,
        Ok(Verdict::Fail) => EXIT_ASSERTION,
        Err(e @ Error::Divergence { .. }) => {
            eprintln!("error: {e}");
            EXIT_DIVERGENCE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
