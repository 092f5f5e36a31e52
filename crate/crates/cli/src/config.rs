//! Run configuration: a flat TOML file, command-line overrides on top, and
//! the resolved settings every subcommand works from.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use serde::{Deserialize, Serialize};

use storparity::dispatch::BatteryTechnology;
use storparity::finance::{CountryData, CountryTable, EconomicParams};
use storparity::profiles::{
    parse_profile_csv, LoadShapeParams, ProfileKind, PvShapeParams, TimeSeriesProfile,
};
use storparity::sweep::SystemModel;

use crate::CliError;

pub const DATA_DIR_ENV: &str = "STORPARITY_DATA_DIR";
const COUNTRIES_FILE: &str = "countries.csv";

/// Keys accepted in the config file. Relative paths are taken from the
/// file's own directory.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub countries: Option<PathBuf>,
    pub load_profile: Option<PathBuf>,
    pub pv_profile: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub parallel: Option<usize>,
    pub discount_rate: Option<f64>,
    pub maintenance_rate: Option<f64>,
    pub horizon_years: Option<u32>,
    pub pv_degradation_rate: Option<f64>,
    pub pv_price_eur_per_kwp: Option<f64>,
    pub round_trip_efficiency: Option<f64>,
    pub usable_fraction: Option<f64>,
    pub c_rate_per_hour: Option<f64>,
    pub steps_per_hour: Option<u32>,
    #[serde(default)]
    pub vat: BTreeMap<String, f64>,
}

/// Options shared by `simulate` and `sweep`. Flags win over the config file.
#[derive(Debug, Default, Clone, Args)]
pub struct RunArgs {
    /// TOML config file.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Country CSV. Defaults to $STORPARITY_DATA_DIR/countries.csv, then
    /// to the built-in table.
    #[arg(long, value_name = "CSV")]
    pub countries: Option<PathBuf>,
    /// Load profile CSV (`timestamp,power_kw`), rescaled to each type's demand.
    #[arg(long, value_name = "CSV")]
    pub load_profile: Option<PathBuf>,
    /// PV profile CSV (`timestamp,power_kw`), rescaled to kWp x country yield.
    #[arg(long, value_name = "CSV")]
    pub pv_profile: Option<PathBuf>,
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub discount_rate: Option<f64>,
    /// Yearly maintenance as a share of pre-VAT CAPEX.
    #[arg(long)]
    pub maintenance_rate: Option<f64>,
    #[arg(long)]
    pub horizon_years: Option<u32>,
    #[arg(long)]
    pub pv_degradation_rate: Option<f64>,
    #[arg(long)]
    pub pv_price_eur_per_kwp: Option<f64>,
    #[arg(long)]
    pub round_trip_efficiency: Option<f64>,
    #[arg(long)]
    pub usable_fraction: Option<f64>,
    /// Battery power limit per kWh of capacity.
    #[arg(long)]
    pub c_rate_per_hour: Option<f64>,
    /// Synthetic profile resolution: 1 (hourly) or 4 (quarter-hourly).
    #[arg(long)]
    pub steps_per_hour: Option<u32>,
    /// VAT override, repeatable.
    #[arg(long, value_name = "COUNTRY=RATE")]
    pub vat: Vec<String>,
}

/// Where the country table came from, for messages and the manifest.
#[derive(Debug, Clone)]
pub enum TableSource {
    File(PathBuf),
    Builtin,
}

impl std::fmt::Display for TableSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TableSource::File(p) => write!(f, "{}", p.display()),
            TableSource::Builtin => write!(f, "built-in country table"),
        }
    }
}

pub struct Settings {
    pub countries: CountryTable,
    pub countries_source: TableSource,
    pub econ: EconomicParams,
    pub model: SystemModel,
    pub load_source: Option<PathBuf>,
    pub pv_source: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub parallel: Option<usize>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg: FileConfig = toml::from_str(&text)
        .map_err(|e| usage(format!("invalid config {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new(""));
    for p in [
        &mut cfg.countries,
        &mut cfg.load_profile,
        &mut cfg.pv_profile,
        &mut cfg.out_dir,
    ]
    .into_iter()
    .flatten()
    {
        if p.is_relative() {
            *p = base.join(&*p);
        }
    }
    Ok(cfg)
}

fn load_countries(path: Option<PathBuf>) -> Result<(CountryTable, TableSource), CliError> {
    let path = path
        .or_else(|| std::env::var_os(DATA_DIR_ENV).map(|d| PathBuf::from(d).join(COUNTRIES_FILE)));
    match path {
        None => Ok((CountryTable::builtin(), TableSource::Builtin)),
        Some(p) => {
            let text = fs::read_to_string(&p)
                .map_err(|e| usage(format!("cannot read country CSV {}: {e}", p.display())))?;
            let table = CountryTable::parse_csv(&text)
                .map_err(|e| usage(format!("{}: {e}", p.display())))?;
            Ok((table, TableSource::File(p)))
        }
    }
}

fn load_profile(path: &Path, kind: ProfileKind) -> Result<Arc<TimeSeriesProfile>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read profile {}: {e}", path.display())))?;
    parse_profile_csv(&text, kind)
        .map(Arc::new)
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn parse_vat(raw: &str) -> Result<(String, f64), CliError> {
    let (name, rate) = raw
        .split_once('=')
        .ok_or_else(|| usage(format!("--vat expects COUNTRY=RATE, got `{raw}`")))?;
    let rate: f64 = rate
        .trim()
        .parse()
        .map_err(|_| usage(format!("--vat rate `{rate}` is not a number")))?;
    Ok((name.trim().to_string(), rate))
}

fn apply_vat(
    table: &mut CountryTable,
    overrides: &[(String, f64)],
    source: &TableSource,
) -> Result<(), CliError> {
    for (name, rate) in overrides {
        if !(0.0..1.0).contains(rate) {
            return Err(usage(format!("VAT {rate} for {name} outside [0, 1)")));
        }
        let row = table.get_mut(name).ok_or_else(|| {
            usage(format!(
                "VAT override for unknown country `{name}` (searched {source})"
            ))
        })?;
        row.vat_rate = *rate;
    }
    Ok(())
}

impl Settings {
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => read_file_config(p)?,
            None => FileConfig::default(),
        };

        let (mut countries, countries_source) =
            load_countries(args.countries.clone().or(file.countries))?;
        let mut vat: Vec<(String, f64)> = file.vat.into_iter().collect();
        for raw in &args.vat {
            vat.push(parse_vat(raw)?);
        }
        apply_vat(&mut countries, &vat, &countries_source)?;

        let base = EconomicParams::default();
        let econ = EconomicParams {
            discount_rate: args
                .discount_rate
                .or(file.discount_rate)
                .unwrap_or(base.discount_rate),
            maintenance_rate: args
                .maintenance_rate
                .or(file.maintenance_rate)
                .unwrap_or(base.maintenance_rate),
            horizon_years: args
                .horizon_years
                .or(file.horizon_years)
                .unwrap_or(base.horizon_years),
            pv_degradation_rate: args
                .pv_degradation_rate
                .or(file.pv_degradation_rate)
                .unwrap_or(base.pv_degradation_rate),
            pv_price_eur_per_kwp: args
                .pv_price_eur_per_kwp
                .or(file.pv_price_eur_per_kwp)
                .unwrap_or(base.pv_price_eur_per_kwp),
            ..base
        };
        econ.validate().map_err(|e| usage(e.to_string()))?;

        let tech = BatteryTechnology::default();
        let battery = BatteryTechnology {
            round_trip_efficiency: args
                .round_trip_efficiency
                .or(file.round_trip_efficiency)
                .unwrap_or(tech.round_trip_efficiency),
            usable_fraction: args
                .usable_fraction
                .or(file.usable_fraction)
                .unwrap_or(tech.usable_fraction),
            c_rate_per_hour: args
                .c_rate_per_hour
                .or(file.c_rate_per_hour)
                .unwrap_or(tech.c_rate_per_hour),
        };
        if !(battery.c_rate_per_hour.is_finite() && battery.c_rate_per_hour > 0.0) {
            return Err(usage(format!(
                "C-rate {} must be > 0",
                battery.c_rate_per_hour
            )));
        }
        battery
            .sized(1.0)
            .validate()
            .map_err(|e| usage(e.to_string()))?;

        let steps_per_hour = args.steps_per_hour.or(file.steps_per_hour).unwrap_or(1);
        if !matches!(steps_per_hour, 1 | 4) {
            return Err(usage(format!(
                "steps per hour must be 1 or 4, got {steps_per_hour}"
            )));
        }
        let pv_shape = PvShapeParams::default().with_steps_per_hour(steps_per_hour);
        let load_shape = if steps_per_hour == 1 {
            LoadShapeParams::default()
        } else {
            LoadShapeParams::default().subdivided(steps_per_hour as usize)
        };

        let load_source = args.load_profile.clone().or(file.load_profile);
        let pv_source = args.pv_profile.clone().or(file.pv_profile);
        let model = SystemModel {
            load_shape,
            pv_shape,
            battery,
            load_profile: load_source
                .as_deref()
                .map(|p| load_profile(p, ProfileKind::Load))
                .transpose()?,
            pv_profile: pv_source
                .as_deref()
                .map(|p| load_profile(p, ProfileKind::Pv))
                .transpose()?,
        };

        let parallel = file.parallel;
        if parallel == Some(0) {
            return Err(usage("parallel must be at least 1"));
        }
        Ok(Self {
            countries,
            countries_source,
            econ,
            model,
            load_source,
            pv_source,
            out_dir: args
                .out_dir
                .clone()
                .or(file.out_dir)
                .unwrap_or_else(|| PathBuf::from(".")),
            parallel,
        })
    }

    pub fn country(&self, name: &str) -> Result<&CountryData, CliError> {
        self.countries.get(name).ok_or_else(|| {
            usage(format!(
                "unknown country `{name}` (searched {})",
                self.countries_source
            ))
        })
    }
}

/// Every parameter that shapes the numbers, echoed next to the outputs.
#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: ToolInfo,
    pub economics: ManifestEconomics,
    pub battery: BatteryTechnology,
    pub profiles: ManifestProfiles,
    pub countries: ManifestCountries,
    pub grid: ManifestGrid,
    pub conventions: Conventions,
}

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
}

#[derive(Debug, Serialize)]
pub struct ManifestEconomics {
    pub discount_rate: f64,
    pub maintenance_rate: f64,
    pub horizon_years: u32,
    pub pv_degradation_rate: f64,
    pub pv_price_eur_per_kwp: f64,
    pub battery_replacement: bool,
}

#[derive(Debug, Serialize)]
pub struct ManifestProfiles {
    pub load: String,
    pub pv: String,
    pub load_shape: LoadShapeParams,
    pub pv_shape: PvShapeParams,
}

#[derive(Debug, Serialize)]
pub struct ManifestCountries {
    pub source: String,
    pub rows: Vec<CountryData>,
}

#[derive(Debug, Serialize)]
pub struct ManifestGrid {
    pub prosumer_types: Vec<String>,
    pub ratios_kwh_per_kwp: Vec<f64>,
    pub bess_prices_eur_per_kwh: Vec<f64>,
    pub scenarios: usize,
    pub failed: usize,
}

#[derive(Debug, Serialize)]
pub struct Conventions {
    pub grid_parity: &'static str,
    pub quartiles: &'static str,
    pub vat: &'static str,
}

impl Settings {
    pub fn manifest(&self, grid: ManifestGrid) -> Manifest {
        let source = |p: &Option<PathBuf>| match p {
            Some(p) => format!("file {}", p.display()),
            None => "synthetic".to_string(),
        };
        Manifest {
            tool: ToolInfo {
                name: "storparity",
                version: env!("CARGO_PKG_VERSION"),
            },
            economics: ManifestEconomics {
                discount_rate: self.econ.discount_rate,
                maintenance_rate: self.econ.maintenance_rate,
                horizon_years: self.econ.horizon_years,
                pv_degradation_rate: self.econ.pv_degradation_rate,
                pv_price_eur_per_kwp: self.econ.pv_price_eur_per_kwp,
                battery_replacement: false,
            },
            battery: self.model.battery,
            profiles: ManifestProfiles {
                load: source(&self.load_source),
                pv: source(&self.pv_source),
                load_shape: self.model.load_shape.clone(),
                pv_shape: self.model.pv_shape.clone(),
            },
            countries: ManifestCountries {
                source: self.countries_source.to_string(),
                rows: self.countries.rows().to_vec(),
            },
            grid,
            conventions: Conventions {
                grid_parity: "lcou < retail price (strict)",
                quartiles: "inclusive linear interpolation at p * (n - 1)",
                vat: "applied to PV and battery prices; maintenance on pre-VAT CAPEX",
            },
        }
    }
}

impl Manifest {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest is plain data")
    }
}
