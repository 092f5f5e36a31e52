use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::FinanceError;

const BUILTIN_CSV: &str = include_str!("../../data/countries.csv");

/// Per-country tariff, PV yield and VAT.
///
/// Tariffs are total residential prices for energy drawn from the grid
/// (April 2019). Yields are annual kWh per installed kWp for the capital
/// city. VAT rates are editable defaults supplied with this tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountryData {
    #[serde(rename = "country")]
    pub name: String,
    #[serde(rename = "retail_eur_per_kwh")]
    pub retail_price_eur_per_kwh: f64,
    pub annual_yield_kwh_per_kwp: f64,
    pub vat_rate: f64,
}

impl CountryData {
    fn validate(&self) -> Result<(), FinanceError> {
        let bad = |m: String| Err(FinanceError::CountryData(format!("{}: {m}", self.name)));
        if self.name.trim().is_empty() {
            return Err(FinanceError::CountryData("empty country name".into()));
        }
        if !(self.retail_price_eur_per_kwh.is_finite() && self.retail_price_eur_per_kwh > 0.0) {
            return bad(format!(
                "retail price {} must be > 0",
                self.retail_price_eur_per_kwh
            ));
        }
        if !(self.annual_yield_kwh_per_kwp.is_finite() && self.annual_yield_kwh_per_kwp > 0.0) {
            return bad(format!(
                "yield {} must be > 0",
                self.annual_yield_kwh_per_kwp
            ));
        }
        if !(0.0..1.0).contains(&self.vat_rate) {
            return bad(format!("VAT {} outside [0, 1)", self.vat_rate));
        }
        Ok(())
    }
}

/// Ordered set of countries, looked up by case-insensitive name.
#[derive(Debug, Clone, PartialEq)]
pub struct CountryTable {
    rows: Vec<CountryData>,
}

impl CountryTable {
    pub fn new(rows: Vec<CountryData>) -> Result<Self, FinanceError> {
        let mut seen = HashSet::new();
        for row in &rows {
            row.validate()?;
            if !seen.insert(row.name.to_lowercase()) {
                return Err(FinanceError::CountryData(format!(
                    "duplicate country {}",
                    row.name
                )));
            }
        }
        Ok(Self { rows })
    }

    /// Parses `country,retail_eur_per_kwh,annual_yield_kwh_per_kwp,vat_rate`.
    pub fn parse_csv(text: &str) -> Result<Self, FinanceError> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| FinanceError::CountryData(e.to_string()))?
            .clone();
        let expected = [
            "country",
            "retail_eur_per_kwh",
            "annual_yield_kwh_per_kwp",
            "vat_rate",
        ];
        if headers.iter().ne(expected) {
            return Err(FinanceError::CountryData(format!(
                "expected header `{}`",
                expected.join(",")
            )));
        }
        let rows = reader
            .deserialize()
            .enumerate()
            .map(|(i, r)| r.map_err(|e| FinanceError::CountryData(format!("line {}: {e}", i + 2))))
            .collect::<Result<Vec<CountryData>, _>>()?;
        Self::new(rows)
    }

    /// The six Mediterranean countries shipped with the tool.
    pub fn builtin() -> Self {
        Self::parse_csv(BUILTIN_CSV).expect("built-in country table is valid")
    }

    pub fn builtin_csv() -> &'static str {
        BUILTIN_CSV
    }

    pub fn get(&self, name: &str) -> Option<&CountryData> {
        self.rows.iter().find(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut CountryData> {
        self.rows
            .iter_mut()
            .find(|c| c.name.eq_ignore_ascii_case(name))
    }

    pub fn rows(&self) -> &[CountryData] {
        &self.rows
    }

    pub fn names(&self) -> Vec<String> {
        self.rows.iter().map(|c| c.name.clone()).collect()
    }
}
