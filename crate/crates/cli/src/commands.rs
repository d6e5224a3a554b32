//! One function per subcommand. Each reads and validates all of its
//! configuration first, then computes and fills an [`Outcome`].

use num_complex::Complex64;
use serde_json::{json, Value};

use xychain::driven::{
    driven_partition, eps_at, equal_time_driven, equal_time_driven_thermodynamic, kz_sweep, DriveKind, DriveProtocol, KzOptions, TimeGrid,
    MAX_EPS_STEP, MIN_GRID_POINTS,
};
use xychain::dynamic_correlators::{
    critical_exponents, majorana_correlator, majorana_correlator_thermodynamic, xx_bessel_series, zz_connected_time, zz_connected_time_thermodynamic,
    ExponentOptions,
};
use xychain::entanglement::{covariance_from_correlators, entropy, entropy_scaling_fit_source, CorrelatorSource, FiniteChain, InfiniteChain};
use xychain::oracle::{
    bdg_mode_solve, ed_block_entropy, ed_build_and_diagonalize, ed_expectation, toy_model_check, Boundary, Parity, PauliString, RealSpaceBdg,
    SpinChainSpec, StateSelection,
};
use xychain::propagators::{oscillator_partition, Prescription};
use xychain::spectrum::{ground_energy, mode_set, momentum};
use xychain::static_correlators::{transverse_magnetization, transverse_magnetization_thermodynamic, zz_connected_static, MagnetizationIntegrand};
use xychain::{ChainParams, Error};

use crate::config::{ConfigError, RunConfig};
use crate::output::{num_json, Cell, Outcome, Table};

#[derive(Debug)]
pub enum CmdError {
    Config(ConfigError),
    Numeric(Error),
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e)
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        CmdError::Numeric(e)
    }
}

type CmdResult = Result<Outcome, CmdError>;

pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [&'static str],
    pub run: fn(&mut RunConfig) -> CmdResult,
}

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "spectrum",
        about: "Mode momenta, energies and Bogoliubov angles of a finite chain",
        keys: &["n", "r", "h"],
        run: spectrum,
    },
    CommandSpec {
        name: "prescription-demo",
        about: "Single-oscillator partition function under both equal-time prescriptions",
        keys: &["omega", "beta"],
        run: prescription_demo,
    },
    CommandSpec {
        name: "static",
        about: "Equal-time Majorana and connected zz correlators",
        keys: &["n", "r", "h", "l", "tol"],
        run: static_correlators,
    },
    CommandSpec {
        name: "dynamic",
        about: "Real-time Majorana and connected zz correlators",
        keys: &["n", "r", "h", "l", "t", "tol"],
        run: dynamic,
    },
    CommandSpec {
        name: "exponents",
        about: "Critical exponents nu and z of the XX chain near h = 1",
        keys: &["lambda-min", "lambda-max", "n-lambda", "l", "tol"],
        run: exponents,
    },
    CommandSpec {
        name: "driven",
        about: "Equal-time correlators of the chain under a time-dependent field",
        keys: &["n", "r", "omega", "protocol", "beta", "grid", "tau", "l", "tol", "partition", "max-order"],
        run: driven,
    },
    CommandSpec {
        name: "kz",
        about: "Kibble-Zurek length and quantum correlator part versus drive rate",
        keys: &["omega", "r", "sigma", "l", "phi-min", "n-phi", "tol"],
        run: kz,
    },
    CommandSpec {
        name: "entropy",
        about: "Block entanglement entropy and its logarithmic scaling",
        keys: &["n", "r", "h", "lengths", "tol"],
        run: entropy_cmd,
    },
    CommandSpec {
        name: "oracle-compare",
        about: "Closed-form results against BdG and exact diagonalization",
        keys: &["n", "r", "h", "l"],
        run: oracle_compare,
    },
    CommandSpec {
        name: "toy",
        about: "Two-spin toy model traced in spin, Fock and Majorana bases",
        keys: &["omega", "beta"],
        run: toy,
    },
];

pub fn key_help(key: &str) -> &'static str {
    match key {
        "n" => "Number of sites (even); omit for the infinite chain where supported",
        "r" => "Anisotropy r (1 = Ising, 0 = XX)",
        "h" => "Transverse field h",
        "l" => "Separations or block sizes: value, list or range",
        "t" => "Real times: value, list or range",
        "tol" => "Target tolerance of quadratures and series",
        "omega" => "Oscillator frequency or drive rate: value, list or range",
        "beta" => "Inverse temperature (driven: length of the imaginary-time interval)",
        "lambda-min" => "Smallest distance 1 - h from criticality",
        "lambda-max" => "Largest distance 1 - h from criticality",
        "n-lambda" => "Number of log-spaced lambda values",
        "protocol" => "`linear` (h = omega*tau) or a file with (sigma, h) columns",
        "grid" => "Number of imaginary-time grid points",
        "tau" => "Imaginary times at which to evaluate",
        "partition" => "Also compute the driven partition function (true/false)",
        "max-order" => "Highest trace order in the Fredholm series",
        "sigma" => "Rescaled time omega*tau at which correlators are evaluated",
        "phi-min" => "Smallest momentum in the log-spaced scan",
        "n-phi" => "Number of momenta in the scan",
        "lengths" => "Block lengths: value, list or range",
        "output" => "Output file; omitted or `-` prints to stdout",
        "format" => "csv or json",
        "threads" => "Worker threads (XY_THREADS takes precedence)",
        _ => "",
    }
}

/// Records a convergence failure in the outcome and hands back `None`.
fn soft<T>(r: xychain::Result<T>, out: &mut Outcome) -> Result<Option<T>, CmdError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NotConverged { est_error, .. }) => {
            out.converged = false;
            out.note_error(est_error);
            Ok(None)
        }
        Err(e) => Err(e.into()),
    }
}

fn chain(cfg: &mut RunConfig, n: usize) -> Result<ChainParams, CmdError> {
    let r = cfg.f64_or("r", 1.0)?;
    let h = cfg.req_f64("h")?;
    ChainParams::new(n, r, h).map_err(|e| CmdError::Config(cfg.invalid("n", e.to_string())))
}

fn complex_cells(z: Option<Complex64>) -> [Cell; 2] {
    match z {
        Some(z) => [z.re.into(), z.im.into()],
        None => [Cell::Missing, Cell::Missing],
    }
}

fn spectrum(cfg: &mut RunConfig) -> CmdResult {
    let n = cfg.req_usize("n")?;
    let p = chain(cfg, n)?;
    let modes = mode_set(&p)?;
    let mut t = Table::new(&["m", "phi", "k", "l", "eps", "two_theta"]);
    for md in &modes {
        t.push(vec![md.m.into(), md.phi.into(), md.k.into(), md.l.into(), md.eps.into(), md.two_theta().into()]);
    }
    let mut out = Outcome::new(t);
    let e0 = ground_energy(&p)?;
    let gap = modes.iter().map(|m| m.eps).fold(f64::INFINITY, f64::min);
    out.result("ground_energy", e0);
    out.result("min_eps", gap);
    out.summary = format!("{n} modes, ground energy {e0:.12}, smallest eps {gap:.6e}");
    Ok(out)
}

fn prescription_demo(cfg: &mut RunConfig) -> CmdResult {
    let omegas = cfg.list_or("omega", "0.5,1,2,3")?;
    let betas = cfg.list_or("beta", "0.5,1,2,5,10")?;
    let mut t = Table::new(&[
        "omega",
        "beta",
        "z_exact",
        "z_symmetric",
        "det_asymmetric",
        "one_plus_exp",
        "z_mismatched",
        "one_plus_exp_plus",
        "err_symmetric",
        "err_asymmetric",
    ]);
    let mut worst: f64 = 0.0;
    for &w in &omegas {
        for &b in &betas {
            let sym = oscillator_partition(w, b, Prescription::Symmetric);
            let asym = oscillator_partition(w, b, Prescription::Asymmetric);
            let bare = 1.0 + (-b * w).exp();
            let wrong = 1.0 + (b * w).exp();
            let e_sym = (sym.z - sym.z_exact).abs() / sym.z_exact;
            let e_asym = (asym.functional_det - bare).abs() / bare;
            worst = worst.max(e_sym).max(e_asym);
            t.push(vec![
                w.into(),
                b.into(),
                sym.z_exact.into(),
                sym.z.into(),
                asym.functional_det.into(),
                bare.into(),
                sym.z_standard_symbol.into(),
                wrong.into(),
                e_sym.into(),
                e_asym.into(),
            ]);
        }
    }
    let mut out = Outcome::new(t);
    out.note_error(worst);
    out.result("max_rel_error", worst);
    out.summary = format!("{} pairs, largest relative deviation {worst:.2e}", omegas.len() * betas.len());
    Ok(out)
}

fn static_correlators(cfg: &mut RunConfig) -> CmdResult {
    let n = cfg.opt_usize("n")?;
    let p = chain(cfg, n.unwrap_or(2))?;
    let ls = cfg.int_list_or("l", "1..4")?;
    let tol = cfg.positive_f64_or("tol", 1e-8)?;
    let mut out = Outcome::new(Table::new(&["l", "b_l", "zz_connected"]));
    for &l in &ls {
        let (b, zz) = match n {
            Some(_) => (
                soft(majorana_correlator(&p, l, 0.0).map(|z| z.re), &mut out)?,
                if l == 0 { None } else { soft(zz_connected_static(&p, l), &mut out)? },
            ),
            None => (
                soft(majorana_correlator_thermodynamic(p.h, p.r, l, 0.0, tol).map(|z| z.re), &mut out)?,
                if l == 0 { None } else { soft(zz_connected_time_thermodynamic(p.h, p.r, l, 0.0, tol).map(|z| z.re), &mut out)? },
            ),
        };
        out.table.push(vec![l.into(), b.into(), zz.into()]);
    }
    let mag = match n {
        Some(_) => transverse_magnetization(&p)?,
        None => {
            let q = transverse_magnetization_thermodynamic(p.h, p.r, MagnetizationIntegrand::Signed, tol);
            out.note_error(q.est_error);
            if !q.converged {
                out.converged = false;
            }
            q.value
        }
    };
    out.result("magnetization", mag);
    out.summary = format!("{} separations, magnetization {mag:.10}", ls.len());
    Ok(out)
}

fn dynamic(cfg: &mut RunConfig) -> CmdResult {
    let n = cfg.opt_usize("n")?;
    let p = chain(cfg, n.unwrap_or(2))?;
    let ls = cfg.int_list_or("l", "1")?;
    let ts = cfg.req_list("t")?;
    let tol = cfg.positive_f64_or("tol", 1e-8)?;
    let bessel = n.is_none() && p.r == 0.0 && p.h.abs() <= 1.0;
    let mut out = Outcome::new(Table::new(&["t", "l", "b_re", "b_im", "zz_re", "zz_im", "bessel", "bessel_tail"]));
    for &l in &ls {
        for &t in &ts {
            let b = match n {
                Some(_) => soft(majorana_correlator(&p, l, t), &mut out)?,
                None => soft(majorana_correlator_thermodynamic(p.h, p.r, l, t, tol), &mut out)?,
            };
            let zz = if l == 0 {
                None
            } else {
                match n {
                    Some(_) => soft(zz_connected_time(&p, l, t), &mut out)?,
                    None => soft(zz_connected_time_thermodynamic(p.h, p.r, l, t, tol), &mut out)?,
                }
            };
            let series = if bessel { soft(xx_bessel_series(p.h, l, t, tol), &mut out)? } else { None };
            let [b_re, b_im] = complex_cells(b);
            let [z_re, z_im] = complex_cells(zz);
            out.table.push(vec![
                t.into(),
                l.into(),
                b_re,
                b_im,
                z_re,
                z_im,
                series.as_ref().map(|s| s.value).into(),
                series.as_ref().map(|s| s.tail_bound).into(),
            ]);
        }
    }
    out.summary = format!("{} rows", out.table.rows.len());
    Ok(out)
}

fn exponents(cfg: &mut RunConfig) -> CmdResult {
    let d = ExponentOptions::default();
    let opts = ExponentOptions {
        lambda_min: cfg.positive_f64_or("lambda-min", d.lambda_min)?,
        lambda_max: cfg.positive_f64_or("lambda-max", d.lambda_max)?,
        n_lambda: cfg.usize_or("n-lambda", d.n_lambda)?,
        l: *cfg.int_list_or("l", &d.l.to_string())?.first().unwrap(),
        tol: cfg.positive_f64_or("tol", d.tol)?,
    };
    if opts.lambda_max <= opts.lambda_min {
        return Err(cfg.invalid("lambda-max", "must exceed lambda-min").into());
    }
    let mut out = Outcome::new(Table::new(&["lambda", "phi_h", "xi", "t_star"]));
    let Some(ex) = soft(critical_exponents(&opts), &mut out)? else {
        out.summary = "decorrelation times did not converge".into();
        return Ok(out);
    };
    for pt in &ex.points {
        out.table.push(vec![pt.lambda.into(), pt.phi_h.into(), (1.0 / pt.phi_h).into(), pt.t_star.into()]);
    }
    out.result("nu", ex.nu);
    out.result("nu_stderr", ex.nu_fit.slope_stderr);
    out.result("nu_r_squared", ex.nu_fit.r_squared);
    out.result("z", ex.z);
    out.result("z_stderr", ex.z_fit.slope_stderr);
    out.result("z_r_squared", ex.z_fit.r_squared);
    out.note_error(ex.nu_fit.slope_stderr.max(ex.z_fit.slope_stderr));
    out.summary = format!("nu = {:.4} +- {:.1e}, z = {:.4} +- {:.1e}", ex.nu, ex.nu_fit.slope_stderr, ex.z, ex.z_fit.slope_stderr);
    Ok(out)
}

/// Smallest gap over the sampled momenta and the field range the drive visits.
fn min_gap(r: f64, phis: &[f64], h_lo: f64, h_hi: f64) -> f64 {
    phis.iter()
        .map(|&phi| {
            let c = phi.cos();
            let h = c.clamp(h_lo, h_hi);
            eps_at(r, phi, h)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Largest β for which every mode satisfies ε·Δτ ≤ MAX_EPS_STEP on the grid.
fn beta_cap(protocol: &DriveProtocol, grid_points: usize) -> f64 {
    let g = grid_points as f64;
    let w = protocol.omega;
    match protocol.kind {
        // ε ≤ 2(|h| + 1) with |h| ≤ ωβ/2 at the interval ends.
        DriveKind::Linear => 0.99 * (-2.0 + (4.0 + 4.0 * MAX_EPS_STEP * w * g).sqrt()) / (2.0 * w),
        DriveKind::Custom => {
            let hmax = protocol.samples().iter().map(|s| s.1.abs()).fold(0.0, f64::max);
            0.99 * MAX_EPS_STEP * g / (2.0 * (hmax + 1.0))
        }
    }
}

fn driven(cfg: &mut RunConfig) -> CmdResult {
    let r = cfg.f64_or("r", 1.0)?;
    let omega = cfg.req_f64("omega")?;
    if omega <= 0.0 {
        return Err(cfg.invalid("omega", "must be positive").into());
    }
    let protocol_text = cfg.string_or("protocol", "linear");
    let protocol = if protocol_text == "linear" {
        DriveProtocol::linear(omega)?
    } else {
        let text = std::fs::read_to_string(&protocol_text).map_err(|e| cfg.invalid("protocol", format!("cannot read `{protocol_text}`: {e}")))?;
        DriveProtocol::parse_table(omega, &text).map_err(|e| cfg.invalid("protocol", e.to_string()))?
    };
    // r = 0 has an exact closed-form trace, so the chain is taken infinite.
    let xx = r == 0.0;
    let n = if xx { None } else { Some(cfg.usize_or("n", 64)?) };
    let params = match n {
        Some(n) => Some(ChainParams::new(n, r, 0.0).map_err(|e| cfg.invalid("n", e.to_string()))?),
        None => None,
    };
    let grid_points = cfg.usize_or("grid", 512)?;
    if grid_points < MIN_GRID_POINTS || grid_points % 2 == 1 {
        return Err(cfg.invalid("grid", format!("must be even and at least {MIN_GRID_POINTS}")).into());
    }
    let beta = match cfg.opt_f64("beta")? {
        Some(b) => b,
        None => {
            let phis: Vec<f64> = n.map_or_else(Vec::new, |n| (0..n).map(|m| momentum(m, n)).collect());
            let (lo, hi) = match protocol.kind {
                DriveKind::Linear => (f64::NEG_INFINITY, f64::INFINITY),
                DriveKind::Custom => {
                    let hs = protocol.samples().iter().map(|s| s.1);
                    (hs.clone().fold(f64::INFINITY, f64::min), hs.fold(f64::NEG_INFINITY, f64::max))
                }
            };
            let gap = min_gap(r, &phis, lo, hi);
            let cap = beta_cap(&protocol, grid_points);
            let b = if gap > 0.0 && gap.is_finite() { (200.0 / gap).min(cap) } else { cap };
            cfg.f64_or("beta", b)?
        }
    };
    let grid = TimeGrid::new(beta, grid_points).map_err(|e| cfg.invalid("beta", e.to_string()))?;
    let taus = cfg.list_or("tau", "0")?;
    if let Some(t) = taus.iter().find(|t| t.abs() > 0.5 * beta) {
        return Err(cfg.invalid("tau", format!("{t} lies outside [-beta/2, beta/2]")).into());
    }
    let ls = cfg.int_list_or("l", "1")?;
    let tol = cfg.positive_f64_or("tol", 1e-8)?;
    let partition = cfg.bool_or("partition", false)?;
    let max_order = cfg.usize_or("max-order", 24)?;

    let mut out = Outcome::new(Table::new(&[
        "tau", "sigma", "h", "l", "b_re", "b_im", "b_s_re", "b_s_im", "b_q_re", "b_q_im", "b_q1_re", "b_q1_im", "xx_reference",
    ]));
    let mut worst_ref: Option<f64> = None;
    for &tau in &taus {
        for &l in &ls {
            let c = match params {
                Some(p) => soft(equal_time_driven(&p, &protocol, &grid, l, tau), &mut out)?,
                None => soft(equal_time_driven_thermodynamic(r, &protocol, &grid, l, tau, tol), &mut out)?,
            };
            let Some(c) = c else {
                let mut row = vec![tau.into(), Cell::Missing, Cell::Missing, l.into()];
                row.extend(std::iter::repeat(Cell::Missing).take(9));
                out.table.push(row);
                continue;
            };
            let reference = if xx && c.h.abs() < 1.0 { Some(InfiniteChain { h: c.h, r: 0.0, tol }.b(l)?) } else { None };
            if let Some(v) = reference {
                let d = (c.value.re - v).abs();
                worst_ref = Some(worst_ref.map_or(d, |w: f64| w.max(d)));
            }
            let mut row: Vec<Cell> = vec![c.tau.into(), c.sigma.into(), c.h.into(), l.into()];
            for z in [c.value, c.b_s, c.b_q, c.b_q1] {
                row.extend(complex_cells(Some(z)));
            }
            row.push(reference.into());
            out.table.push(row);
        }
    }
    out.result("beta", beta);
    out.result("path", if xx { "xx_exact" } else { "finite_chain" });
    if let Some(w) = worst_ref {
        out.result("max_deviation_from_xx_reference", w);
        out.note_error(w);
    }
    if partition {
        let p = params.ok_or_else(|| cfg.invalid("partition", "needs a finite chain (r != 0)"))?;
        if let Some(z) = soft(driven_partition(&p, &protocol, &grid, max_order), &mut out)? {
            let worst = z
                .modes
                .iter()
                .map(|m| (m.e_series - m.e_dense).abs() / m.e_dense.abs().max(1e-300))
                .fold(0.0, f64::max);
            out.result("log_z0", z.log_z0);
            out.result("log_z", z.log_z);
            out.result("series_dense_max_rel_diff", worst);
            out.result("near_gapless_modes", z.modes.iter().filter(|m| m.near_gapless).count());
            out.extra.insert(
                "mode_energies".into(),
                Value::Array(
                    z.modes
                        .iter()
                        .map(|m| json!({"m": m.m, "phi": num_json(m.phi), "e_series": num_json(m.e_series), "e_dense": num_json(m.e_dense)}))
                        .collect(),
                ),
            );
        }
    }
    out.summary = format!("{} rows on a {grid_points}-point grid, beta {beta:.4}", out.table.rows.len());
    Ok(out)
}

fn kz(cfg: &mut RunConfig) -> CmdResult {
    let omegas = cfg.req_list("omega")?;
    if omegas.iter().any(|w| *w <= 0.0) {
        return Err(cfg.invalid("omega", "rates must be positive").into());
    }
    let d = KzOptions::default();
    let opts = KzOptions {
        r: cfg.f64_or("r", d.r)?,
        sigma: cfg.f64_or("sigma", d.sigma)?,
        phi_min: cfg.positive_f64_or("phi-min", d.phi_min)?,
        n_phi: cfg.usize_or("n-phi", d.n_phi)?,
        tol: cfg.positive_f64_or("tol", d.tol)?,
    };
    let ls = cfg.int_list_or("l", "0,1,2")?;
    let mut out = Outcome::new(Table::new(&["omega", "phi0", "xi", "max_abs_c1", "phi_peak"]));
    let Some(sweep) = soft(kz_sweep(&omegas, &ls, &opts), &mut out)? else {
        out.summary = "sweep did not converge".into();
        return Ok(out);
    };
    for row in &sweep.rows {
        out.table
            .push(vec![row.omega.into(), row.phi0.into(), row.xi.into(), row.max_abs_c1.into(), row.phi_peak.into()]);
    }
    out.result("xi_exponent", sweep.fit.as_ref().map(|f| f.slope));
    out.result("xi_exponent_stderr", sweep.fit.as_ref().map(|f| f.slope_stderr));
    out.result("peak_exponent", sweep.peak_fit.as_ref().map(|f| f.slope));
    out.result("windows_located", sweep.rows.iter().filter(|r| r.xi.is_some()).count());
    out.extra.insert(
        "b_q".into(),
        Value::Array(
            sweep
                .blq
                .iter()
                .map(|b| {
                    json!({
                        "omega": num_json(b.omega),
                        "l": b.l,
                        "b_q_re": num_json(b.b_q.re),
                        "b_q_im": num_json(b.b_q.im),
                        "b_q1_re": num_json(b.b_q1.re),
                        "b_q1_im": num_json(b.b_q1.im),
                        "predicted": b.predicted.map_or(Value::Null, num_json),
                    })
                })
                .collect(),
        ),
    );
    out.summary = match &sweep.fit {
        Some(f) => format!("xi ~ omega^{:.3} (+- {:.1e}) over {} rates", f.slope, f.slope_stderr, omegas.len()),
        None => format!(
            "no |c1| window above threshold at any of {} rates; peak momentum scales as omega^{:.3}",
            omegas.len(),
            sweep.peak_fit.as_ref().map_or(f64::NAN, |f| -f.slope)
        ),
    };
    Ok(out)
}

fn entropy_cmd(cfg: &mut RunConfig) -> CmdResult {
    let n = cfg.opt_usize("n")?;
    let p = chain(cfg, n.unwrap_or(2))?;
    let lengths: Vec<usize> = cfg
        .int_list_or("lengths", "2..40")?
        .into_iter()
        .map(|l| if l > 0 { Ok(l as usize) } else { Err(cfg.invalid("lengths", "block lengths must be positive")) })
        .collect::<Result<_, _>>()?;
    let tol = cfg.positive_f64_or("tol", 1e-12)?;
    if let (Some(n), Some(&lmax)) = (n, lengths.iter().max()) {
        if lmax > n {
            return Err(cfg.invalid("lengths", format!("block length {lmax} exceeds the chain length {n}")).into());
        }
    }
    let source: Box<dyn CorrelatorSource> = match n {
        Some(_) => Box::new(FiniteChain(p)),
        None => Box::new(InfiniteChain { h: p.h, r: p.r, tol }),
    };
    let mut out = Outcome::new(Table::new(&["length", "entropy_nats", "entropy_bits"]));
    if lengths.len() >= 2 {
        let Some(scaling) = soft(entropy_scaling_fit_source(source.as_ref(), &lengths), &mut out)? else {
            out.summary = "correlators did not converge".into();
            return Ok(out);
        };
        for (&l, &s) in scaling.lengths.iter().zip(&scaling.entropies) {
            out.table.push(vec![l.into(), s.into(), (s / std::f64::consts::LN_2).into()]);
        }
        out.result("slope", scaling.fit.slope);
        out.result("slope_stderr", scaling.fit.slope_stderr);
        out.result("intercept", scaling.fit.intercept);
        out.summary = format!("S = {:.5} ln L + {:.5} over {} lengths", scaling.fit.slope, scaling.fit.intercept, lengths.len());
    } else {
        let l = lengths[0];
        if let Some(cov) = soft(covariance_from_correlators(source.as_ref(), l), &mut out)? {
            let s = entropy(&cov)?;
            out.table.push(vec![l.into(), s.into(), (s / std::f64::consts::LN_2).into()]);
            out.summary = format!("S({l}) = {s:.10} nats");
        }
    }
    Ok(out)
}

fn oracle_compare(cfg: &mut RunConfig) -> CmdResult {
    let n = cfg.usize_or("n", 10)?;
    if n > 12 {
        return Err(cfg.invalid("n", "exact diagonalization is limited to 12 sites").into());
    }
    let p = chain(cfg, n)?;
    let ls = cfg.int_list_or("l", "1..3")?;
    if let Some(l) = ls.iter().find(|&&l| l < 1 || l as usize >= n) {
        return Err(cfg.invalid("l", format!("separation {l} must lie in 1..{}", n - 1)).into());
    }
    let mut t = Table::new(&["quantity", "index", "analytic", "oracle", "abs_diff"]);
    let mut worst: f64 = 0.0;
    let mut row = |t: &mut Table, q: &str, i: i64, a: f64, o: f64| {
        worst = worst.max((a - o).abs());
        t.push(vec![q.into(), i.into(), a.into(), o.into(), (a - o).abs().into()]);
    };
    for md in mode_set(&p)? {
        let b = bdg_mode_solve(&p, md.m)?;
        row(&mut t, "eps", md.m as i64, md.eps, b.eigenvalues[0]);
        row(&mut t, "cos_two_theta", md.m as i64, md.cos2theta(), (2.0 * b.theta_num()).cos());
    }
    let spec = SpinChainSpec::xy(&p, Boundary::Periodic)?;
    let data = ed_build_and_diagonalize(&spec)?;
    let even = data.sector(Parity::Even).expect("even sector present");
    let rs = RealSpaceBdg::xy_chain(&p)?;
    let e0 = ground_energy(&p)?;
    row(&mut t, "ground_energy_ed", 0, e0, even.ground_energy());
    row(&mut t, "ground_energy_bdg", 0, e0, rs.ground_energy());
    let sel = StateSelection::SectorGround(Parity::Even);
    let mz = ed_expectation(&data, &PauliString::z(0), sel)?;
    row(&mut t, "magnetization", 0, transverse_magnetization(&p)?, mz);
    let ground = even.full_vector(0, n);
    for &l in &ls {
        let b = majorana_correlator(&p, l, 0.0)?.re;
        let o = (Complex64::i() * rs.majorana_pair(1, 2 * (l as usize + 1))).re;
        row(&mut t, "b_l", l, b, o);
        let zz = ed_expectation(&data, &PauliString::zz(0, l as usize), sel)? - mz * mz;
        row(&mut t, "zz_connected", l, zz_connected_static(&p, l)?, zz);
        let s = entropy(&covariance_from_correlators(&FiniteChain(p), l as usize)?)?;
        row(&mut t, "entropy", l, s, ed_block_entropy(&ground, n, l as usize));
    }
    let mut out = Outcome::new(t);
    out.note_error(worst);
    out.result("max_abs_diff", worst);
    out.summary = format!("{} comparisons, largest difference {worst:.2e}", out.table.rows.len());
    Ok(out)
}

fn toy(cfg: &mut RunConfig) -> CmdResult {
    let omegas = cfg.list_or("omega", "0.5,1.5")?;
    let betas = cfg.list_or("beta", "0.3,1,2,4,8")?;
    let mut t = Table::new(&["omega", "beta", "z_spin", "z_fock", "z_majorana", "z_closed_form", "max_abs_diff"]);
    let mut worst: f64 = 0.0;
    for &w in &omegas {
        for &b in &betas {
            let c = toy_model_check(w, b);
            worst = worst.max(c.diff);
            t.push(vec![w.into(), b.into(), c.z_spin.into(), c.z_fock.into(), c.z_majorana.into(), c.z_closed_form.into(), c.diff.into()]);
        }
    }
    let mut out = Outcome::new(t);
    out.note_error(worst);
    out.result("max_abs_diff", worst);
    out.summary = format!("{} pairs, largest difference {worst:.2e}", omegas.len() * betas.len());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn every_key_has_help() {
        for c in COMMANDS {
            for k in c.keys {
                assert!(!key_help(k).is_empty(), "{k}");
            }
        }
    }

    #[test]
    fn beta_cap_respects_step_limit() {
        let p = DriveProtocol::linear(0.1).unwrap();
        let b = beta_cap(&p, 512);
        let eps_edge = 2.0 * (0.5 * 0.1 * b + 1.0);
        assert!(eps_edge * b / 512.0 <= MAX_EPS_STEP);
    }

    #[test]
    fn gap_of_linear_drive_is_off_diagonal_term() {
        let g = min_gap(0.5, &[PI / 2.0], f64::NEG_INFINITY, f64::INFINITY);
        assert!((g - 1.0).abs() < 1e-15);
    }
}
