//! Convergence studies over `(ε, p)` grids and their report files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem1d::{norms_1d, solve_1d, Difference};
use crate::fem2d::{norms_2d, solve_mixed, DiskMeshConfig, MixedNumbering};
use crate::problems::{catalog_1d, catalog_2d};

/// Errors at or below this value are solver-precision noise and are left
/// out of the exponential fits.
pub const FIT_FLOOR: f64 = 1e-12;
/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "SBL_FEM_THREADS";
pub const CSV_HEADER: &str = "problem,eps,p,kappa,energy,balanced,max,c1max,dofs,wall_ms,status";
pub const NORM_NAMES: [&str; 4] = ["energy", "balanced", "max", "c1max"];

fn default_kappa() -> f64 {
    1.0
}
fn default_rho0() -> f64 {
    0.5
}
fn default_sectors() -> usize {
    8
}
fn default_one() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_norms() -> Vec<String> {
    NORM_NAMES.iter().map(|s| s.to_string()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub dimension: u8,
    pub problem: String,
    pub eps: Vec<f64>,
    pub p_min: usize,
    pub p_max: usize,
    #[serde(default = "default_kappa")]
    pub kappa: f64,
    #[serde(default = "default_rho0")]
    pub rho0: f64,
    #[serde(default = "default_sectors")]
    pub n_sectors: usize,
    /// 2D coefficients and constant forcing of the Bessel problem.
    #[serde(default = "default_one")]
    pub b: f64,
    #[serde(default = "default_one")]
    pub c: f64,
    #[serde(default = "default_one")]
    pub f0: f64,
    #[serde(default = "default_norms")]
    pub norms: Vec<String>,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// When false, `wall_ms` is written as 0 so that reruns are
    /// byte-identical.
    #[serde(default = "default_true")]
    pub record_timing: bool,
}

impl StudyConfig {
    pub fn new_1d(problem: &str, eps: Vec<f64>, p_min: usize, p_max: usize) -> Self {
        Self {
            dimension: 1,
            problem: problem.to_string(),
            eps,
            p_min,
            p_max,
            kappa: 1.0,
            rho0: 0.5,
            n_sectors: 8,
            b: 1.0,
            c: 1.0,
            f0: 1.0,
            norms: default_norms(),
            out: default_out(),
            record_timing: true,
        }
    }

    pub fn new_2d(problem: &str, eps: Vec<f64>, p_min: usize, p_max: usize) -> Self {
        Self {
            dimension: 2,
            ..Self::new_1d(problem, eps, p_min, p_max)
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = match self.dimension {
            1 => (3, 16),
            2 => (2, 8),
            d => return Err(Error::Config(format!("dimension must be 1 or 2, got {d}"))),
        };
        if self.p_min < lo || self.p_max > hi || self.p_min > self.p_max {
            return Err(Error::Config(format!(
                "p range {}..={} outside the supported {lo}..={hi} for dimension {}",
                self.p_min, self.p_max, self.dimension
            )));
        }
        if self.eps.is_empty() {
            return Err(Error::Config("eps list is empty".into()));
        }
        if let Some(e) = self.eps.iter().find(|e| !(**e > 0.0 && **e <= 1.0)) {
            return Err(Error::Config(format!("eps = {e} outside (0, 1]")));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(Error::Config(format!(
                "kappa = {} must be positive",
                self.kappa
            )));
        }
        if let Some(n) = self
            .norms
            .iter()
            .find(|n| !NORM_NAMES.contains(&n.as_str()))
        {
            return Err(Error::Config(format!("unknown norm {n:?}")));
        }
        match self.dimension {
            1 => {
                catalog_1d(&self.problem, self.eps[0])?;
            }
            _ => {
                catalog_2d(&self.problem, self.eps[0], self.b, self.c, self.f0)?;
            }
        }
        Ok(())
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> {
        self.p_min..=self.p_max
    }
}

/// One `(ε, p)` run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub problem: String,
    pub eps: f64,
    pub p: usize,
    pub kappa: f64,
    pub energy: f64,
    pub balanced: f64,
    pub max: f64,
    /// `NaN` in 2D, where no C¹ norm is defined.
    pub c1max: f64,
    pub dofs: usize,
    pub wall_ms: f64,
    /// `ok` or the error message of a failed run.
    pub status: String,
}

impl StudyRow {
    pub fn norm(&self, name: &str) -> f64 {
        match name {
            "energy" => self.energy,
            "balanced" => self.balanced,
            "max" => self.max,
            "c1max" => self.c1max,
            _ => f64::NAN,
        }
    }

    fn failed(cfg: &StudyConfig, eps: f64, p: usize, err: &Error) -> Self {
        Self {
            problem: cfg.problem.clone(),
            eps,
            p,
            kappa: cfg.kappa,
            energy: f64::NAN,
            balanced: f64::NAN,
            max: f64::NAN,
            c1max: f64::NAN,
            dofs: 0,
            wall_ms: 0.0,
            status: err.to_string().replace([',', '\n'], ";"),
        }
    }
}

/// Least-squares fit `ln(err) = ln C − βp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpFit {
    pub beta: f64,
    pub c: f64,
    pub r2: f64,
    pub points: usize,
}

/// Fits `ln y = a + s·x` by least squares and returns `(a, s, R²)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - icpt - slope * a).powi(2))
        .sum();
    let r2 = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Some((icpt, slope, r2))
}

/// Exponential fit over the rows with `floor < err < ∞`.
pub fn fit_exponential(ps: &[usize], errs: &[f64], floor: f64) -> Option<ExpFit> {
    let (x, y): (Vec<f64>, Vec<f64>) = ps
        .iter()
        .zip(errs)
        .filter(|(_, e)| e.is_finite() && **e > floor)
        .map(|(p, e)| (*p as f64, e.ln()))
        .unzip();
    let (a, s, r2) = linear_fit(&x, &y)?;
    Some(ExpFit {
        beta: -s,
        c: a.exp(),
        r2,
        points: x.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsFit {
    pub eps: f64,
    pub fit: Option<ExpFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormFits {
    pub norm: String,
    pub per_eps: Vec<EpsFit>,
    /// Fit of the max-over-ε envelope.
    pub envelope: Option<ExpFit>,
    pub envelope_values: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: StudyConfig,
    pub rows: Vec<StudyRow>,
    pub fits: Vec<NormFits>,
}

impl StudyReport {
    pub fn fit(&self, norm: &str) -> Option<&NormFits> {
        self.fits.iter().find(|f| f.norm == norm)
    }
}

/// Max over ε of a norm at each `p`; `p` with any failed run are skipped.
pub fn envelope(rows: &[StudyRow], norm: &str) -> Vec<(usize, f64)> {
    let mut ps: Vec<usize> = rows.iter().map(|r| r.p).collect();
    ps.sort_unstable();
    ps.dedup();
    ps.into_iter()
        .filter_map(|p| {
            let vals: Vec<f64> = rows
                .iter()
                .filter(|r| r.p == p)
                .map(|r| r.norm(norm))
                .collect();
            if vals.iter().any(|v| !v.is_finite()) {
                return None;
            }
            Some((p, vals.into_iter().fold(0.0, f64::max)))
        })
        .collect()
}

fn fits_for(rows: &[StudyRow], cfg: &StudyConfig) -> Vec<NormFits> {
    cfg.norms
        .iter()
        .map(|norm| {
            let per_eps = cfg
                .eps
                .iter()
                .map(|&eps| {
                    let sel: Vec<&StudyRow> = rows.iter().filter(|r| r.eps == eps).collect();
                    let ps: Vec<usize> = sel.iter().map(|r| r.p).collect();
                    let errs: Vec<f64> = sel.iter().map(|r| r.norm(norm)).collect();
                    EpsFit {
                        eps,
                        fit: fit_exponential(&ps, &errs, FIT_FLOOR),
                    }
                })
                .collect();
            let env = envelope(rows, norm);
            let (ps, errs): (Vec<usize>, Vec<f64>) = env.iter().cloned().unzip();
            NormFits {
                norm: norm.clone(),
                per_eps,
                envelope: fit_exponential(&ps, &errs, FIT_FLOOR),
                envelope_values: env,
            }
        })
        .collect()
}

fn run_one(cfg: &StudyConfig, eps: f64, p: usize) -> Result<StudyRow> {
    let start = Instant::now();
    let mut row = match cfg.dimension {
        1 => {
            let problem = catalog_1d(&cfg.problem, eps)?;
            let uh = solve_1d(&problem, cfg.kappa, p)?;
            let exact = problem.exact().ok_or(Error::MissingDecomposition)?;
            let err = Difference(&exact.u, &uh);
            let r = norms_1d(&err, &problem, &uh.mesh, cfg.kappa);
            StudyRow {
                problem: problem.name.clone(),
                eps,
                p,
                kappa: cfg.kappa,
                energy: r.energy,
                balanced: r.balanced,
                max: r.max,
                c1max: r.c1max,
                dofs: uh.free_coeffs().len(),
                wall_ms: 0.0,
                status: "ok".into(),
            }
        }
        _ => {
            let problem = catalog_2d(&cfg.problem, eps, cfg.b, cfg.c, cfg.f0)?;
            let mesh_cfg = DiskMeshConfig {
                rho0: cfg.rho0,
                n_sectors: cfg.n_sectors,
            };
            let field = solve_mixed(&problem, cfg.kappa, p, mesh_cfg)?;
            let r = norms_2d(&problem, &field, cfg.kappa)?;
            StudyRow {
                problem: problem.name.clone(),
                eps,
                p,
                kappa: cfg.kappa,
                energy: r.energy,
                balanced: r.balanced,
                max: r.max_u,
                c1max: f64::NAN,
                dofs: MixedNumbering::new(&field.dofs).len,
                wall_ms: 0.0,
                status: "ok".into(),
            }
        }
    };
    if cfg.record_timing {
        row.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    Ok(row)
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
}

/// Runs the whole grid on a worker pool; rows come back sorted by the
/// position of `ε` in the config, then by `p`. Failed runs are recorded
/// and do not stop the study.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyReport> {
    cfg.validate()?;
    let grid: Vec<(usize, f64, usize)> = cfg
        .eps
        .iter()
        .enumerate()
        .flat_map(|(i, &e)| cfg.degrees().map(move |p| (i, e, p)))
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let mut rows: Vec<(usize, StudyRow)> = pool.install(|| {
        grid.par_iter()
            .map(|&(i, eps, p)| {
                let row =
                    run_one(cfg, eps, p).unwrap_or_else(|e| StudyRow::failed(cfg, eps, p, &e));
                (i, row)
            })
            .collect()
    });
    rows.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.p.cmp(&b.1.p)));
    let rows: Vec<StudyRow> = rows.into_iter().map(|(_, r)| r).collect();
    let fits = fits_for(&rows, cfg);
    Ok(StudyReport {
        config: cfg.clone(),
        rows,
        fits,
    })
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6e}")
    } else {
        "nan".into()
    }
}

pub fn to_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{:e},{},{},{},{},{},{},{},{:.3},{}",
            r.problem,
            r.eps,
            r.p,
            r.kappa,
            fmt_num(r.energy),
            fmt_num(r.balanced),
            fmt_num(r.max),
            fmt_num(r.c1max),
            r.dofs,
            r.wall_ms,
            r.status
        );
    }
    out
}

/// Gnuplot script plotting every reported norm against `p` per `ε`, with
/// the fitted envelope.
pub fn plot_script(report: &StudyReport) -> String {
    let cfg = &report.config;
    let mut s = String::new();
    let _ = writeln!(s, "# {}D study of {}", cfg.dimension, cfg.problem);
    s.push_str("set datafile separator ','\nset logscale y\nset key outside\nset xlabel 'p'\nset terminal pngcairo size 900,600\n");
    let eps_list: Vec<String> = cfg.eps.iter().map(|e| format!("{e:e}")).collect();
    let _ = writeln!(s, "eps_list = \"{}\"", eps_list.join(" "));
    for fit in &report.fits {
        let col = 5 + NORM_NAMES.iter().position(|n| *n == fit.norm).unwrap_or(0);
        let _ = writeln!(
            s,
            "set output '{}.png'\nset ylabel '{} error'",
            fit.norm, fit.norm
        );
        let env = match fit.envelope {
            Some(f) => format!(
                ", {:e}*exp(-{:e}*x) title 'envelope fit' dashtype 2",
                f.c, f.beta
            ),
            None => String::new(),
        };
        let _ = writeln!(
            s,
            "plot for [e in eps_list] 'results.csv' using (($2 == e + 0) ? $3 : 1/0):{col} with linespoints title 'eps = '.e{env}"
        );
    }
    s
}

/// Writes `results.csv`, `fit.json` and `plot.gp` into `dir`.
pub fn write_report(report: &StudyReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("results.csv"), to_csv(&report.rows))?;
    let fit = serde_json::json!({
        "problem": report.config.problem,
        "dimension": report.config.dimension,
        "kappa": report.config.kappa,
        "floor": FIT_FLOOR,
        "fits": report.fits,
    });
    std::fs::write(dir.join("fit.json"), serde_json::to_string_pretty(&fit)?)?;
    std::fs::write(dir.join("plot.gp"), plot_script(report))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_exponential_fit() {
        let ps: Vec<usize> = (3..10).collect();
        let errs: Vec<f64> = ps.iter().map(|&p| 2.0 * (-0.7 * p as f64).exp()).collect();
        let f = fit_exponential(&ps, &errs, FIT_FLOOR).unwrap();
        assert!((f.beta - 0.7).abs() < 1e-12 && (f.c - 2.0).abs() < 1e-10 && f.r2 > 1.0 - 1e-12);
    }

    #[test]
    fn floor_rows_are_dropped() {
        let f = fit_exponential(&[1, 2, 3, 4], &[1e-2, 1e-3, 1e-13, 0.0], FIT_FLOOR).unwrap();
        assert_eq!(f.points, 2);
        assert!(fit_exponential(&[1], &[1.0], FIT_FLOOR).is_none());
    }

    #[test]
    fn config_validation() {
        let good = "dimension = 1\nproblem = \"layered\"\neps = [1e-2]\np_min = 3\np_max = 5\n";
        assert!(StudyConfig::from_toml_str(good).is_ok());
        for bad in [
            "dimension = 3\nproblem = \"layered\"\neps = [1e-2]\np_min = 3\np_max = 5\n",
            "dimension = 1\nproblem = \"layered\"\neps = [2.0]\np_min = 3\np_max = 5\n",
            "dimension = 1\nproblem = \"layered\"\neps = [1e-2]\np_min = 2\np_max = 5\n",
            "dimension = 2\nproblem = \"bessel\"\neps = [1e-2]\np_min = 2\np_max = 9\n",
            "dimension = 1\nproblem = \"nope\"\neps = [1e-2]\np_min = 3\np_max = 5\n",
            "dimension = 1\nproblem = \"layered\"\neps = [1e-2]\np_min = 3\np_max = 5\nbogus = 1\n",
        ] {
            assert!(StudyConfig::from_toml_str(bad).is_err(), "{bad}");
        }
    }
}
