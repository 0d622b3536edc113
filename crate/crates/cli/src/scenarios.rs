//! One function per scenario. Each computes everything in memory and returns
//! the artifacts; nothing touches the file system here.

use std::f64::consts::PI;

use chiral_decay::baths::{
    floquet_cycle_evolve, floquet_effective, harper_edge_modes, hofstadter_evolve, zone_grid, FloquetCycle,
    GapSelector, StripAttachment, StripGeometry,
};
use chiral_decay::dynamics::{
    bloch_scenario, propagate, quiescence_from_curve, quiescence_time, sigma_max_curve, uniform_grid, DecayTrace,
};
use chiral_decay::manybody::{nondecay_probability, StatisticsKind};
use chiral_decay::model::{
    build_bidirectional, build_unidirectional, delta_closed_form, delta_numeric, Dispersion, EffectiveHamiltonian,
    Level, LevelChain, QuadratureOptions,
};
use chiral_decay::numerics::eigvals;
use num_complex::Complex;
use rayon::prelude::*;

use crate::config::{
    Bloch, ChainSpec, CouplingKind, Decay, Effective, Floquet, Hofstadter, Manybody, Quiescence, VerifyMarkov,
};
use crate::error::CliError;
use crate::output::{trace_table, Table};
use crate::svg::{Plot, Series};

type C = Complex<f64>;

/// Reference levels of the resilience-time sweep.
pub const SWEEP_LEVELS: [f64; 3] = [0.996, 0.97, 0.5];

#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub plots: Vec<Plot>,
    pub summary: String,
}

fn chain_from(spec: &ChainSpec) -> Result<LevelChain<f64>, CliError> {
    let levels = spec.levels()?.into_iter().map(|(w, k, s)| Level::new(w, k, s)).collect();
    Ok(LevelChain::new(levels)?)
}

fn hamiltonian(
    chain: &LevelChain<f64>,
    coupling: CouplingKind,
    velocity: f64,
    hopping: f64,
) -> Result<EffectiveHamiltonian<f64>, CliError> {
    Ok(match coupling {
        CouplingKind::Unidirectional => build_unidirectional(chain, &Dispersion::chiral_linear(velocity, 0.0)?)?,
        CouplingKind::Bidirectional => build_bidirectional(chain, hopping)?,
    })
}

fn grid(t_max: f64, dt: f64) -> Result<Vec<f64>, CliError> {
    if !(dt > 0.0 && t_max > 0.0 && t_max.is_finite()) {
        return Err(CliError::Config(format!("need t_max > 0 and dt > 0, got {t_max} and {dt}")));
    }
    Ok(uniform_grid(dt, (t_max / dt).round().max(1.0) as usize))
}

/// Unit vector on the 1-based level `excite` of the chain as given, in the
/// Hamiltonian's site-sorted basis.
fn excitation(h: &EffectiveHamiltonian<f64>, excite: usize) -> Result<Vec<C>, CliError> {
    let n = h.n();
    if excite == 0 || excite > n {
        return Err(CliError::Config(format!("excite must lie in 1..={n}, got {excite}")));
    }
    let mut c0 = vec![C::new(0.0, 0.0); n];
    c0[excite - 1] = C::new(1.0, 0.0);
    Ok(h.to_sorted(&c0)?)
}

/// `trace.csv` with amplitudes in the caller's level order.
fn effective_trace(h: &EffectiveHamiltonian<f64>, tr: &DecayTrace<f64>) -> Result<Table, CliError> {
    let levels: Vec<Vec<C>> = tr.amplitudes.iter().map(|c| h.to_original(c)).collect::<Result<_, _>>()?;
    Ok(trace_table(&tr.times, &levels))
}

fn eig_table(h: &EffectiveHamiltonian<f64>) -> Result<(Table, Vec<C>), CliError> {
    let eigs = eigvals(h.matrix())?.values;
    let mut t = Table::new("eigs.csv", &["re", "im"]);
    for z in &eigs {
        t.push(vec![z.re, z.im]);
    }
    Ok((t, eigs))
}

fn occupation_plot(file: &str, title: &str, trace: &Table, log_y: bool) -> Plot {
    let t = trace.column("t").unwrap_or_default();
    let n = (trace.header.len() - 2) / 2;
    let mut series: Vec<Series> = (1..=n.min(5))
        .map(|a| {
            let re = trace.column(&format!("re_c{a}")).unwrap_or_default();
            let im = trace.column(&format!("im_c{a}")).unwrap_or_default();
            let p: Vec<f64> = re.iter().zip(&im).map(|(x, y)| x * x + y * y).collect();
            Series::new(format!("|c{a}|^2"), &t, &p)
        })
        .collect();
    series.push(Series::new("survival", &t, &trace.column("survival").unwrap_or_default()));
    Plot { file: file.into(), title: title.into(), x_label: "t".into(), y_label: "occupation".into(), log_y, series }
}

/// Least-squares slope of `ln y` against `t` over positive samples.
fn log_slope(t: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = t.iter().zip(y).filter(|(_, &v)| v > 0.0).map(|(&a, &b)| (a, b.ln())).collect();
    let n = pts.len() as f64;
    if n < 2.0 {
        return f64::NAN;
    }
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / n, sy / n);
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn rms(a: &[f64], b: &[f64]) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len().max(1) as f64).sqrt()
}

pub fn effective(p: Effective) -> Result<Artifacts, CliError> {
    let spec = ChainSpec {
        n: p.n,
        omega: p.omega,
        kappa: p.kappa,
        spacing: p.spacing,
        omegas: &p.omegas,
        kappas: &p.kappas,
        sites: &p.sites,
    };
    let h = hamiltonian(&chain_from(&spec)?, p.coupling, p.velocity, p.hopping)?;
    let (eigs, values) = eig_table(&h)?;
    let mut matrix = Table::new("hamiltonian.csv", &["row", "col", "re", "im"]);
    for i in 0..h.n() {
        for j in 0..h.n() {
            let z = h.matrix()[(i, j)];
            matrix.push(vec![(i + 1) as f64, (j + 1) as f64, z.re, z.im]);
        }
    }
    let trace = effective_trace(&h, &propagate(&h, &excitation(&h, 1)?, &grid(p.t_max, p.dt)?)?)?;
    let rate = -2.0 * h.matrix().trace().im;
    let slowest = values.iter().map(|z| -z.im).fold(f64::INFINITY, f64::min);
    let plots = vec![occupation_plot("trace.svg", "level occupations", &trace, false)];
    Ok(Artifacts {
        summary: format!(
            "effective: {} levels, total decay rate -2 Im tr H = {rate:.6}, slowest eigenvalue linewidth {slowest:.6}",
            h.n()
        ),
        tables: vec![trace, eigs, matrix],
        plots,
    })
}

pub fn decay(p: Decay) -> Result<Artifacts, CliError> {
    let spec = ChainSpec {
        n: p.n,
        omega: p.omega,
        kappa: p.kappa,
        spacing: p.spacing,
        omegas: &p.omegas,
        kappas: &p.kappas,
        sites: &p.sites,
    };
    let h = hamiltonian(&chain_from(&spec)?, p.coupling, p.velocity, p.hopping)?;
    let tr: DecayTrace<f64> = propagate(&h, &excitation(&h, p.excite)?, &grid(p.t_max, p.dt)?)?;
    let half = tr.len() / 2;
    let rate = -log_slope(&tr.times[half..], &tr.survival[half..]);
    let last = *tr.survival.last().unwrap_or(&1.0);
    let trace = effective_trace(&h, &tr)?;
    let plots = vec![occupation_plot("trace.svg", "survival", &trace, true)];
    Ok(Artifacts {
        summary: format!(
            "decay: {} levels, P(t_max) = {last:.6e}, fitted late-time decay rate {rate:.6}",
            h.n()
        ),
        tables: vec![trace],
        plots,
    })
}

fn degenerate(n: usize, kappa: f64, velocity: f64) -> Result<EffectiveHamiltonian<f64>, CliError> {
    let chain = LevelChain::uniform(n, 0.0, kappa, 1)?;
    Ok(build_unidirectional(&chain, &Dispersion::chiral_linear(velocity, 0.0)?)?)
}

pub fn quiescence(p: Quiescence) -> Result<Artifacts, CliError> {
    if p.n_min == 0 || p.n_min > p.n_max {
        return Err(CliError::Config(format!("need 1 <= n_min <= n_max, got {} and {}", p.n_min, p.n_max)));
    }
    let h = degenerate(p.n, p.kappa, p.velocity)?;
    let result = quiescence_time(&h, p.pb, p.t_max, p.dt)?;
    let mut sigma = Table::new("sigma_max.csv", &["t", "sigma_max"]);
    for (t, s) in result.sigma_curve.times.iter().zip(&result.sigma_curve.sigma) {
        sigma.push(vec![*t, *s]);
    }
    let trace = effective_trace(&h, &propagate(&h, &result.optimal_state, &result.sigma_curve.times)?)?;

    let linewidth = p.kappa * p.kappa / (2.0 * p.velocity);
    let sweep: Vec<Result<Vec<f64>, CliError>> = (p.n_min..=p.n_max)
        .into_par_iter()
        .map(|n| {
            let h = degenerate(n, p.kappa, p.velocity)?;
            // resilience times grow roughly linearly in N (unit linewidth)
            let t_max = (3.0 * n as f64 + 20.0) / linewidth;
            let curve = sigma_max_curve(&h, &uniform_grid(t_max / 400.0, 400))?;
            let mut row = vec![n as f64];
            for pb in SWEEP_LEVELS {
                row.push(quiescence_from_curve(&h, curve.clone(), pb)?.tau);
            }
            Ok(row)
        })
        .collect();
    let mut taus = Table::new("tau_vs_n.csv", &["n", "tau_pb0996", "tau_pb097", "tau_pb05"]);
    for row in sweep {
        taus.push(row?);
    }
    let ns = taus.column("n").unwrap_or_default();
    let mut plots = vec![Plot {
        file: "sigma_max.svg".into(),
        title: "optimal survival bound".into(),
        x_label: "t".into(),
        y_label: "sigma_max".into(),
        log_y: false,
        series: vec![Series::new("sigma_max", &result.sigma_curve.times, &result.sigma_curve.sigma)],
    }];
    plots.push(Plot {
        file: "tau_vs_n.svg".into(),
        title: "resilience time".into(),
        x_label: "N".into(),
        y_label: "tau".into(),
        log_y: false,
        series: ["tau_pb0996", "tau_pb097", "tau_pb05"]
            .iter()
            .zip(SWEEP_LEVELS)
            .map(|(c, pb)| Series::new(format!("P_b = {pb}"), &ns, &taus.column(c).unwrap_or_default()))
            .collect(),
    });
    Ok(Artifacts {
        summary: format!("quiescence: N = {}, P_b = {}, tau = {:.4}", p.n, p.pb, result.tau),
        tables: vec![trace, sigma, taus],
        plots,
    })
}

pub fn bloch(p: Bloch) -> Result<Artifacts, CliError> {
    if p.n == 0 || p.samples_per_period == 0 || p.periods == 0 {
        return Err(CliError::Config("n, periods and samples_per_period must be positive".into()));
    }
    if p.excite == 0 || p.excite > p.n {
        return Err(CliError::Config(format!("excite must lie in 1..={}, got {}", p.n, p.excite)));
    }
    let c = p.c_over_delta * p.delta;
    let t_b = 2.0 * PI / c;
    let times: Vec<f64> =
        (0..=p.periods * p.samples_per_period).map(|j| j as f64 * t_b / p.samples_per_period as f64).collect();
    let mut c0 = vec![C::new(0.0, 0.0); p.n];
    c0[p.excite - 1] = C::new(1.0, 0.0);
    let r = bloch_scenario(p.n, c, p.delta, &c0, &times)?;
    let (eigs, _) = eig_table(&r.hamiltonian)?;
    let trace = effective_trace(&r.hamiltonian, &r.trace)?;
    let plots = vec![occupation_plot("trace.svg", "Bloch oscillations", &trace, true)];
    Ok(Artifacts {
        summary: format!("bloch: N = {}, C = {c:.6}, T_B = 2 pi / C = {t_b:.6}", p.n),
        tables: vec![trace, eigs],
        plots,
    })
}

pub fn hofstadter(p: Hofstadter) -> Result<Artifacts, CliError> {
    let n = p.sites.len();
    if n == 0 || p.kappas.len() != n || p.omegas.len() != n {
        return Err(CliError::Config("sites, kappas and omegas must list the same, non-zero number of levels".into()));
    }
    if p.excite == 0 || p.excite > n {
        return Err(CliError::Config(format!("excite must lie in 1..={n}, got {}", p.excite)));
    }
    if p.k_points < 16 {
        return Err(CliError::Config("k_points must be at least 16".into()));
    }
    let phi = p.phi_over_pi * PI;
    let branch = harper_edge_modes(phi, p.kappa, p.n_max, &zone_grid(p.k_points), GapSelector::Lower)?;
    let band = branch.dispersion()?;
    let mut dispersion = Table::new("dispersion.csv", &["k", "omega", "v"]);
    for (&k, &w) in branch.k.iter().zip(&branch.omega) {
        dispersion.push(vec![k, w, band.group_velocity(k)]);
    }

    let t_max = p.t_max;
    let times = grid(t_max, p.dt)?;
    let max_coupling = p.kappas.iter().fold(0.0f64, |a, k| a.max(k.abs()));
    let rk_dt = 0.05 / (4.0 * p.kappa.abs() + max_coupling);
    let last_site = *p.sites.iter().max().expect("non-empty");
    let strip = StripGeometry::for_run(t_max, p.strip_velocity, last_site);
    let attachments: Vec<StripAttachment<f64>> = (0..n)
        .map(|a| StripAttachment { n: 1, m: p.sites[a], kappa: p.kappas[a], omega: p.omegas[a] })
        .collect();
    let mut c0 = vec![C::new(0.0, 0.0); n];
    c0[p.excite - 1] = C::new(1.0, 0.0);
    let exact = hofstadter_evolve(phi, p.kappa, strip, &attachments, &c0, &times, rk_dt)?;

    let chain = LevelChain::new((0..n).map(|a| Level::new(p.omegas[a], p.kappas[a], p.sites[a])).collect())?;
    let h = build_unidirectional(&chain, &band)?;
    let model = propagate(&h, &h.to_sorted(&c0)?, &times)?;
    let model_first = model.occupation(h.order().iter().position(|&o| o == p.excite - 1).unwrap_or(0));
    let exact_first = exact.occupation(p.excite - 1);
    let mismatch = rms(&exact_first, &model_first);
    let r = band.solve_resonance(p.omegas[p.excite - 1])?;

    let trace = trace_table(&exact.times, &exact.levels);
    let mut plots = vec![occupation_plot("trace.svg", "exact level occupations", &trace, false)];
    plots[0].series.push(Series::new("effective |c_e|^2", &times, &model_first));
    plots.push(Plot {
        file: "dispersion.svg".into(),
        title: "edge branch".into(),
        x_label: "k".into(),
        y_label: "omega".into(),
        log_y: false,
        series: vec![Series::new("omega(k)", &branch.k, &branch.omega)],
    });
    Ok(Artifacts {
        summary: format!(
            "hofstadter: k_beta = {:.4}, v_beta = {:.4}, effective rate {:.5}, exact fitted rate {:.5}, RMS exact vs effective {mismatch:.4}",
            r.k,
            r.velocity,
            p.kappas[p.excite - 1].powi(2) / r.velocity,
            -log_slope(&exact.times, &exact_first),
        ),
        tables: vec![trace, dispersion],
        plots,
    })
}

pub fn floquet(p: Floquet) -> Result<Artifacts, CliError> {
    let n = p.sites.len();
    if n == 0 || p.rho_over_kappa.len() != n || p.omegas.len() != n {
        return Err(CliError::Config("sites, rho_over_kappa and omegas must list the same, non-zero number of levels".into()));
    }
    if p.excite == 0 || p.excite > n {
        return Err(CliError::Config(format!("excite must lie in 1..={n}, got {}", p.excite)));
    }
    if !(p.t1_frac > 0.0 && p.t1_frac <= 0.5) {
        return Err(CliError::Config(format!("t1_frac must lie in (0, 0.5], got {}", p.t1_frac)));
    }
    let t1 = p.t1_frac * p.period;
    let t2 = p.period - 2.0 * t1;
    let kappa = PI / (2.0 * t1);
    let rho: Vec<f64> = p.rho_over_kappa.iter().map(|r| r * kappa).collect();
    let cycle = FloquetCycle::new(t1, t2, rho, p.sites.clone())?;
    let span = (p.sites.iter().max().expect("non-empty") - p.sites.iter().min().expect("non-empty")) as usize;
    let lattice_size = 2 * (2 * p.cycles + span + 8);
    let mut c0 = vec![C::new(0.0, 0.0); n];
    c0[p.excite - 1] = C::new(1.0, 0.0);
    let exact = floquet_cycle_evolve(&cycle, lattice_size, &p.omegas, &c0, p.cycles)?;
    let eff = floquet_effective(&cycle, &p.omegas)?;
    let h = &eff.hamiltonian;
    let model = propagate(h, &h.to_sorted(&c0)?, &exact.times)?;
    let model_levels: Vec<Vec<C>> = model.amplitudes.iter().map(|c| h.to_original(c)).collect::<Result<_, _>>()?;
    let exact_first = exact.occupation(p.excite - 1);
    let model_first: Vec<f64> = model_levels.iter().map(|c| c[p.excite - 1].norm_sqr()).collect();
    let mismatch = rms(&exact_first, &model_first);
    let delta = -h.matrix().diagonal()[0].im;

    let trace = trace_table(&exact.times, &exact.levels);
    let mut plots = vec![occupation_plot("trace.svg", "stroboscopic level occupations", &trace, false)];
    plots[0].series.push(Series::new("effective |c_e|^2", &exact.times, &model_first));
    Ok(Artifacts {
        summary: format!(
            "floquet: kappa = {kappa:.6}, Delta_1 = {delta:.6}, commutator estimate {:.4}, RMS exact vs effective {mismatch:.4}",
            eff.commutator_estimate
        ),
        tables: vec![trace],
        plots,
    })
}

pub fn manybody(p: Manybody) -> Result<Artifacts, CliError> {
    let spec = ChainSpec {
        n: p.n,
        omega: p.omega,
        kappa: p.kappa,
        spacing: p.spacing,
        omegas: &p.omegas,
        kappas: &p.kappas,
        sites: &p.sites,
    };
    let h = hamiltonian(&chain_from(&spec)?, p.coupling, p.velocity, p.hopping)?;
    let times = grid(p.t_max, p.dt)?;
    let rows: Vec<Result<Vec<f64>, CliError>> = times
        .par_iter()
        .map(|&t| {
            let f = nondecay_probability(&h, t, StatisticsKind::Fermion)?;
            let b = nondecay_probability(&h, t, StatisticsKind::Boson)?;
            Ok(vec![t, f, b])
        })
        .collect();
    let mut table = Table::new("manybody.csv", &["t", "p_fermi", "p_bose"]);
    for row in rows {
        table.push(row?);
    }
    let trace = effective_trace(&h, &propagate(&h, &excitation(&h, 1)?, &times)?)?;
    let last = table.rows.last().cloned().unwrap_or_default();
    let plots = vec![Plot {
        file: "manybody.svg".into(),
        title: "non-decay probability".into(),
        x_label: "t".into(),
        y_label: "P".into(),
        log_y: true,
        series: vec![
            Series::new("fermions", &times, &table.column("p_fermi").unwrap_or_default()),
            Series::new("bosons", &times, &table.column("p_bose").unwrap_or_default()),
        ],
    }];
    Ok(Artifacts {
        summary: format!(
            "manybody: {} particles, at t = {:.4}: P_fermi = {:.6e}, P_bose = {:.6e}",
            h.n(),
            last.first().copied().unwrap_or(0.0),
            last.get(1).copied().unwrap_or(f64::NAN),
            last.get(2).copied().unwrap_or(f64::NAN)
        ),
        tables: vec![trace, table],
        plots,
    })
}

pub fn verify_markov(p: VerifyMarkov) -> Result<Artifacts, CliError> {
    let spec = ChainSpec {
        n: p.n,
        omega: p.omega,
        kappa: p.kappa,
        spacing: p.spacing,
        omegas: &p.omegas,
        kappas: &p.kappas,
        sites: &p.sites,
    };
    let chain = chain_from(&spec)?;
    let band = Dispersion::chiral_linear(p.velocity, 0.0)?;
    let closed = delta_closed_form(&chain, &band)?;
    let numeric = delta_numeric(&chain, &band, QuadratureOptions::new(p.grid_points))?;
    let mut table = Table::new("markov.csv", &["row", "col", "re_closed", "im_closed", "re_numeric", "im_numeric"]);
    for i in 0..closed.rows() {
        for j in 0..closed.cols() {
            let (a, b) = (closed[(i, j)], numeric[(i, j)]);
            table.push(vec![(i + 1) as f64, (j + 1) as f64, a.re, a.im, b.re, b.im]);
        }
    }
    let scale = closed.max_abs();
    let rel = if scale > 0.0 { numeric.max_abs_diff(&closed) / scale } else { numeric.max_abs() };
    let h = build_unidirectional(&chain, &band)?;
    let trace = effective_trace(&h, &propagate(&h, &excitation(&h, 1)?, &grid(p.t_max, p.dt)?)?)?;
    let plots = vec![occupation_plot("trace.svg", "level occupations", &trace, false)];
    Ok(Artifacts {
        summary: format!("verify-markov: {} levels, max relative deviation quadrature vs closed form {rel:.3e}", chain.len()),
        tables: vec![trace, table],
        plots,
    })
}
