use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use sis_core::family::FamilyConfig;
use sis_core::functional::{ZSpec, ZVariant};
use sis_core::{Complex64, Error, Result};

#[derive(Debug, Parser)]
#[command(name = "sis", version, about = "Generalized coherent states for shape-invariant potentials")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// typeA, typeC, typeD or selfSimilar
    #[arg(long, global = true)]
    pub family: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true)]
    pub q: Option<f64>,
    #[arg(long, global = true)]
    pub rscale: Option<f64>,
    /// const, typeC_G, typeA_PT1, typeA_BG, typeA_Whittaker, ss_R or ss_Ramanujan
    #[arg(long, global = true)]
    pub zfunc: Option<String>,
    /// Value of the constant functional
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub zconst: Option<f64>,
    /// Parameter of typeA_Whittaker
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Parameter c of ss_Ramanujan
    #[arg(long, global = true)]
    pub cram: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Coherent-state label as re,im
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = parse_complex)]
    pub z: Option<Complex64>,
    #[arg(long, global = true)]
    pub nmax: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub output: Option<Format>,
    /// JSON run configuration; its values override flags
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write data here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Remainders, energies and nested products for n = 1..nmax
    Spectrum,
    /// Orbit products of the functional and the coefficients h_n
    Coeffs,
    /// Coefficients of the coherent state
    State,
    /// Overlap <z|other> with a second label or a state dump
    Overlap {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex, conflicts_with = "with")]
        z2: Option<Complex64>,
        /// State dump written by `sis state --output json`
        #[arg(long = "with")]
        with: Option<PathBuf>,
    },
    /// The state after time t
    Evolve {
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
    /// Energy expectation and action variable
    Action {
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
    },
    /// Moment check of a resolution-of-unity measure
    VerifyMeasure {
        /// hoFlat, diskTypeC, sechTypeA, besselBG, whittakerPT, ramanujanQ or ramanujanGeneralQ
        #[arg(long)]
        case: String,
        /// JSON object of case parameters; reference values when omitted
        #[arg(long)]
        params: Option<String>,
        #[arg(long, default_value_t = 8)]
        nmoments: usize,
    },
    /// Eigenfunction Psi_n, or the coherent wavepacket with --packet, on a grid
    Wavefunction {
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long)]
        packet: bool,
        /// xmin:xmax:npoints
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Crank-Nicolson propagation of the wavepacket (or Psi_n with --n)
    EvolveGrid {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Run the acceptance suite
    Report {
        /// Criterion names or numbers, comma separated
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Scale one measure by a wrong constant, as case:factor
        #[arg(long)]
        inject_measure_fault: Option<String>,
        /// Run criteria one after another
        #[arg(long)]
        serial: bool,
    },
}

pub fn parse_complex(s: &str) -> std::result::Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("'{p}': {e}"));
    let z = match parts.as_slice() {
        [re] => Complex64::new(num(re)?, 0.0),
        [re, im] => Complex64::new(num(re)?, num(im)?),
        _ => return Err(format!("expected re,im, got '{s}'")),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("complex value must be finite, got '{s}'"))
    }
}

/// The JSON run configuration.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Option<FamilyConfig>,
    pub zspec: Option<ZSpec>,
    pub z: Option<Complex64>,
    pub alpha: Option<f64>,
    pub nmax: Option<usize>,
    pub tol: Option<f64>,
    pub output: Option<Format>,
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

pub const DEFAULT_TOL: f64 = 1e-8;

/// Flags merged with the configuration file.
#[derive(Debug)]
pub struct Resolved {
    family: Option<Result<FamilyConfig>>,
    zspec: Result<ZSpec>,
    pub z: Complex64,
    /// Explicit truncation, if one was requested.
    pub nmax: Option<usize>,
    pub tol: f64,
    pub output: Format,
    pub out: Option<PathBuf>,
}

impl Resolved {
    pub fn new(c: &Common) -> Result<Self> {
        let cfg = match &c.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        let family = match cfg.family {
            Some(f) => Some(Ok(f)),
            None => c.family.as_deref().map(|kind| family_from_flags(kind, c)),
        };
        let zspec = match cfg.zspec {
            Some(z) => Ok(z),
            None => zspec_from_flags(c),
        }
        .map(|zs| match cfg.alpha.or(c.alpha) {
            Some(a) => zs.with_alpha(a),
            None => zs,
        });
        let tol = cfg.tol.or(c.tol).unwrap_or(DEFAULT_TOL);
        if !(tol > 0.0) {
            return Err(Error::Config(format!("tol must be positive, got {tol}")));
        }
        Ok(Resolved {
            family,
            zspec,
            z: cfg.z.or(c.z).unwrap_or(Complex64::new(0.0, 0.0)),
            nmax: cfg.nmax.or(c.nmax),
            tol,
            output: cfg.output.or(c.output).unwrap_or(Format::Json),
            out: cfg.out_path.or_else(|| c.out.clone()),
        })
    }

    pub fn family(&self) -> Result<FamilyConfig> {
        match &self.family {
            Some(f) => f.clone(),
            None => Err(Error::Config("no family given; use --family or a config file with a \"family\" block".into())),
        }
    }

    pub fn zspec(&self) -> Result<ZSpec> {
        let zs = self.zspec.clone()?;
        zs.check(&self.family()?)?;
        Ok(zs)
    }
}

fn family_from_flags(kind: &str, c: &Common) -> Result<FamilyConfig> {
    let mut obj = serde_json::Map::new();
    obj.insert("kind".into(), kind.into());
    let fields = [("a1", c.a1), ("beta", c.beta), ("gamma", c.gamma), ("delta", c.delta), ("lambda", c.lambda), ("q", c.q), ("r_scale", c.rscale)];
    for (k, v) in fields {
        if let Some(v) = v {
            obj.insert(k.into(), v.into());
        }
    }
    // the oscillator orbit sits at a = β
    if matches!(kind, "typeD" | "D" | "d") && c.a1.is_none() {
        if let Some(b) = c.beta {
            obj.insert("a1".into(), b.into());
        }
    }
    serde_json::from_value(serde_json::Value::Object(obj)).map_err(|e| Error::Config(e.to_string()))
}

fn zspec_from_flags(c: &Common) -> Result<ZSpec> {
    let need = |v: Option<f64>, flag: &str, name: &str| v.ok_or_else(|| Error::Config(format!("--zfunc {name} needs --{flag}")));
    let name = c.zfunc.as_deref().unwrap_or("const");
    let variant = match name.to_ascii_lowercase().as_str() {
        "const" => ZVariant::Const { c: c.zconst.unwrap_or(1.0) },
        "typec_g" => ZVariant::TypeCG,
        "typea_pt1" => ZVariant::TypeAPT1,
        "typea_bg" => ZVariant::TypeABG,
        "typea_whittaker" => ZVariant::TypeAWhittaker { sigma: need(c.sigma, "sigma", name)? },
        "ss_r" => ZVariant::SsR,
        "ss_ramanujan" => ZVariant::SsRamanujan { c: need(c.cram, "cram", name)? },
        _ => {
            return Err(Error::Config(format!(
                "unknown --zfunc '{name}'; expected const, typeC_G, typeA_PT1, typeA_BG, typeA_Whittaker, ss_R or ss_Ramanujan"
            )))
        }
    };
    Ok(ZSpec::new(variant, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5,-0.25").unwrap(), Complex64::new(0.5, -0.25));
        assert_eq!(parse_complex("-2").unwrap(), Complex64::new(-2.0, 0.0));
        assert!(parse_complex("1,2,3").is_err());
        assert!(parse_complex("1+2i").is_err());
        assert!(parse_complex("nan,0").is_err());
    }

    #[test]
    fn config_rejects_unknown_keys() {
        let e = serde_json::from_str::<RunConfig>(r#"{"nmax": 3, "colour": "red"}"#).unwrap_err();
        assert!(e.to_string().contains("colour"));
        let c: RunConfig = serde_json::from_str(r#"{"z": [0.3, 0.1], "output": "csv", "zspec": {"variant": {"const": {"c": 2}}}}"#).unwrap();
        assert_eq!(c.z, Some(Complex64::new(0.3, 0.1)));
        assert_eq!(c.output, Some(Format::Csv));
    }
}
