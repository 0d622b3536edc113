//! Scenario parameters: command-line flags over an optional TOML file over the
//! built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Deserialize;

use crate::error::CliError;

/// Declares a scenario's flag struct (every field optional, also the TOML table)
/// and its resolved counterpart with defaults filled in.
macro_rules! params {
    (
        $(#[$doc:meta])*
        $args:ident => $resolved:ident {
            $( $(#[$fdoc:meta])* $field:ident : $ty:ty = $default:expr ),* $(,)?
        }
    ) => {
        $(#[$doc])*
        #[derive(Args, Deserialize, Debug, Clone, Default, PartialEq)]
        #[serde(deny_unknown_fields)]
        pub struct $args {
            $( $(#[$fdoc])* #[arg(long, value_delimiter = ',', allow_negative_numbers = true)] pub $field: Option<$ty>, )*
        }

        #[derive(Debug, Clone, PartialEq)]
        pub struct $resolved {
            $( pub $field: $ty, )*
        }

        impl $args {
            /// Fields set here win over `base`.
            pub fn overlay(self, base: Self) -> Self {
                Self { $( $field: self.$field.or(base.$field), )* }
            }

            pub fn resolve(self) -> $resolved {
                $resolved { $( $field: self.$field.unwrap_or_else(|| $default), )* }
            }
        }
    };
}

#[derive(ValueEnum, Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CouplingKind {
    Unidirectional,
    Bidirectional,
}

params! {
    /// Effective Hamiltonian of a level chain and its eigenvalues.
    EffectiveArgs => Effective {
        /// Number of levels in a uniform chain.
        n: usize = 3,
        /// Level frequency of a uniform chain.
        omega: f64 = 0.0,
        /// Coupling of a uniform chain.
        kappa: f64 = 1.0,
        /// Site spacing of a uniform chain.
        spacing: i64 = 1,
        /// Explicit level frequencies (overrides the uniform chain).
        omegas: Vec<f64> = Vec::new(),
        /// Explicit couplings.
        kappas: Vec<f64> = Vec::new(),
        /// Explicit sites.
        sites: Vec<i64> = Vec::new(),
        coupling: CouplingKind = CouplingKind::Unidirectional,
        /// Group velocity of the linear chiral band.
        velocity: f64 = 0.5,
        /// Hopping of the cosine band (bidirectional coupling).
        hopping: f64 = 1.0,
        t_max: f64 = 10.0,
        dt: f64 = 0.05,
    }
}

params! {
    /// Survival of a level chain launched from one level.
    DecayArgs => Decay {
        n: usize = 20,
        omega: f64 = 0.0,
        kappa: f64 = 1.0,
        spacing: i64 = 1,
        omegas: Vec<f64> = Vec::new(),
        kappas: Vec<f64> = Vec::new(),
        sites: Vec<i64> = Vec::new(),
        coupling: CouplingKind = CouplingKind::Unidirectional,
        velocity: f64 = 0.5,
        hopping: f64 = 1.0,
        /// Initially excited level (1-based, in chain order).
        excite: usize = 1,
        t_max: f64 = 50.0,
        dt: f64 = 0.1,
    }
}

params! {
    /// Optimal-state bound and resilience time of a degenerate chain.
    QuiescenceArgs => Quiescence {
        n: usize = 20,
        /// Reference survival level.
        pb: f64 = 0.97,
        kappa: f64 = 1.0,
        velocity: f64 = 0.5,
        t_max: f64 = 50.0,
        dt: f64 = 0.1,
        /// Smallest chain of the tau-versus-N sweep.
        n_min: usize = 4,
        /// Largest chain of the tau-versus-N sweep.
        n_max: usize = 20,
    }
}

params! {
    /// Equally spaced ladder of levels on a linear chiral band.
    BlochArgs => Bloch {
        n: usize = 6,
        /// Ladder spacing in units of the linewidth.
        c_over_delta: f64 = 10.0,
        delta: f64 = 0.05,
        /// Initially excited level (1-based).
        excite: usize = 1,
        periods: usize = 4,
        samples_per_period: usize = 50,
    }
}

params! {
    /// Two levels on the edge of a Harper–Hofstadter strip.
    HofstadterArgs => Hofstadter {
        /// Flux per plaquette in units of pi.
        phi_over_pi: f64 = 0.5,
        /// Lattice hopping.
        kappa: f64 = 1.0,
        /// Level couplings.
        kappas: Vec<f64> = vec![0.2, 0.2],
        /// Level frequencies.
        omegas: Vec<f64> = vec![-1.5, -1.5],
        /// Edge columns of the levels.
        sites: Vec<i64> = vec![0, 3],
        /// Truncation depth of the edge-mode problem.
        n_max: usize = 40,
        k_points: usize = 512,
        /// Edge velocity used to size the strip.
        strip_velocity: f64 = 1.6,
        excite: usize = 1,
        t_max: f64 = 150.0,
        /// Output spacing.
        dt: f64 = 1.0,
    }
}

params! {
    /// Two levels on an anomalous Floquet lattice.
    FloquetArgs => Floquet {
        period: f64 = 1.0,
        /// Pulse length as a fraction of the period.
        t1_frac: f64 = 1.0 / 3.0,
        /// Level couplings in units of the pulse hopping.
        rho_over_kappa: Vec<f64> = vec![0.15, 0.15],
        omegas: Vec<f64> = vec![0.0, 0.0],
        /// A cells of the levels.
        sites: Vec<i64> = vec![0, 2],
        excite: usize = 1,
        cycles: usize = 60,
    }
}

params! {
    /// Fermion and boson non-decay probabilities of a filled chain.
    ManybodyArgs => Manybody {
        n: usize = 2,
        omega: f64 = 0.0,
        kappa: f64 = 0.5,
        spacing: i64 = 1,
        omegas: Vec<f64> = Vec::new(),
        kappas: Vec<f64> = Vec::new(),
        sites: Vec<i64> = Vec::new(),
        coupling: CouplingKind = CouplingKind::Bidirectional,
        velocity: f64 = 1.0,
        hopping: f64 = 1.0,
        t_max: f64 = 20.0,
        dt: f64 = 0.1,
    }
}

params! {
    /// Quadrature check of the Markov decay matrix against its closed form.
    VerifyMarkovArgs => VerifyMarkov {
        n: usize = 4,
        omega: f64 = 0.0,
        kappa: f64 = 0.1,
        spacing: i64 = 1,
        omegas: Vec<f64> = Vec::new(),
        kappas: Vec<f64> = Vec::new(),
        sites: Vec<i64> = Vec::new(),
        velocity: f64 = 1.0,
        grid_points: usize = 4096,
        t_max: f64 = 100.0,
        dt: f64 = 0.5,
    }
}

/// Scenario name as written in a config file.
#[derive(Deserialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    Effective,
    Decay,
    Quiescence,
    Bloch,
    Hofstadter,
    Floquet,
    Manybody,
    VerifyMarkov,
}

/// Contents of a `--config` file.
#[derive(Deserialize, Debug, Clone, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenario: Option<ScenarioName>,
    pub output_dir: Option<PathBuf>,
    pub emit_svg: Option<bool>,
    pub effective: Option<EffectiveArgs>,
    pub decay: Option<DecayArgs>,
    pub quiescence: Option<QuiescenceArgs>,
    pub bloch: Option<BlochArgs>,
    pub hofstadter: Option<HofstadterArgs>,
    pub floquet: Option<FloquetArgs>,
    pub manybody: Option<ManybodyArgs>,
    #[serde(alias = "verify-markov")]
    pub verify_markov: Option<VerifyMarkovArgs>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))
    }
}

/// Uniform chain, or explicit per-level lists when any list is given.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec<'a> {
    pub n: usize,
    pub omega: f64,
    pub kappa: f64,
    pub spacing: i64,
    pub omegas: &'a [f64],
    pub kappas: &'a [f64],
    pub sites: &'a [i64],
}

impl ChainSpec<'_> {
    /// `(omega, kappa, site)` per level.
    pub fn levels(&self) -> Result<Vec<(f64, f64, i64)>, CliError> {
        if self.omegas.is_empty() && self.kappas.is_empty() && self.sites.is_empty() {
            if self.n == 0 {
                return Err(CliError::Config("n must be at least 1".into()));
            }
            return Ok((0..self.n).map(|a| (self.omega, self.kappa, a as i64 * self.spacing)).collect());
        }
        let n = self.omegas.len().max(self.kappas.len()).max(self.sites.len());
        let pick = |v: &[f64], fallback: f64, what: &str| -> Result<Vec<f64>, CliError> {
            match v.len() {
                0 => Ok(vec![fallback; n]),
                l if l == n => Ok(v.to_vec()),
                l => Err(CliError::Config(format!("{what} lists {l} levels, other lists have {n}"))),
            }
        };
        let omegas = pick(self.omegas, self.omega, "omegas")?;
        let kappas = pick(self.kappas, self.kappa, "kappas")?;
        let sites: Vec<i64> = match self.sites.len() {
            0 => (0..n as i64).map(|a| a * self.spacing).collect(),
            l if l == n => self.sites.to_vec(),
            l => return Err(CliError::Config(format!("sites lists {l} levels, other lists have {n}"))),
        };
        Ok((0..n).map(|a| (omegas[a], kappas[a], sites[a])).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_over_file() {
        let file = DecayArgs { n: Some(5), kappa: Some(0.3), ..Default::default() };
        let flags = DecayArgs { n: Some(7), ..Default::default() };
        let d = flags.overlay(file).resolve();
        assert_eq!((d.n, d.kappa, d.dt), (7, 0.3, 0.1));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<ConfigFile>("[decay]\nn = 3\nbogus = 1\n").is_err());
        assert!(toml::from_str::<ConfigFile>("colour = 1\n").is_err());
        let ok: ConfigFile = toml::from_str("scenario = \"verify-markov\"\n[verify-markov]\nn = 3\n").unwrap();
        assert_eq!(ok.scenario, Some(ScenarioName::VerifyMarkov));
        assert_eq!(ok.verify_markov.unwrap().n, Some(3));
    }

    #[test]
    fn explicit_lists_must_agree() {
        let spec = ChainSpec { n: 2, omega: 0.0, kappa: 1.0, spacing: 1, omegas: &[0.0, 0.1], kappas: &[], sites: &[0, 4] };
        assert_eq!(spec.levels().unwrap(), vec![(0.0, 1.0, 0), (0.1, 1.0, 4)]);
        let bad = ChainSpec { sites: &[0], ..spec };
        assert!(bad.levels().is_err());
    }
}
