//! CSV layouts for sweep results and their summaries. Floats are written
//! with six decimals so that identical inputs give identical bytes.

use std::io::Write;

use serde::Serialize;

use super::{box_stats, BoxStats, ProsumerType, Scenario, ScenarioResult, SweepError};

pub const RESULTS_HEADER: &str =
    "country,prosumer_type,pv_kwp,ratio_kwh_per_kwp,bess_price_eur_per_kwh,scr,ssr,lcoe,lcou,npv,grid_parity";

pub fn write_results_csv<W: Write>(results: &[ScenarioResult], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{RESULTS_HEADER}")?;
    for r in results {
        let s = &r.scenario;
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{}",
            s.country,
            s.prosumer_type,
            s.pv_kwp,
            s.ratio_kwh_per_kwp,
            s.bess_price_eur_per_kwh,
            r.scr,
            r.ssr,
            r.lcoe,
            r.lcou,
            r.npv,
            r.grid_parity
        )?;
    }
    Ok(())
}

/// Reads a results file written by [`write_results_csv`].
pub fn read_results_csv(text: &str) -> Result<Vec<ScenarioResult>, SweepError> {
    let bad = |m: String| SweepError::MalformedResults(m);
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?;
    if headers.iter().ne(RESULTS_HEADER.split(',')) {
        return Err(bad(format!("expected header `{RESULTS_HEADER}`")));
    }

    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| bad(format!("line {line}: {e}")))?;
        if record.len() != 11 {
            return Err(bad(format!(
                "line {line}: expected 11 fields, found {}",
                record.len()
            )));
        }
        let float = |idx: usize| -> Result<f64, SweepError> {
            record[idx]
                .parse::<f64>()
                .map_err(|_| bad(format!("line {line}: `{}` is not a number", &record[idx])))
        };
        let prosumer_type: ProsumerType = record[1].parse().map_err(|_| {
            bad(format!(
                "line {line}: unknown prosumer type `{}`",
                &record[1]
            ))
        })?;
        let pv_kwp: u32 = record[2]
            .parse()
            .map_err(|_| bad(format!("line {line}: `{}` is not a whole kWp", &record[2])))?;
        let grid_parity: bool = record[10]
            .parse()
            .map_err(|_| bad(format!("line {line}: `{}` is not true/false", &record[10])))?;
        out.push(ScenarioResult {
            scenario: Scenario {
                country: record[0].to_string(),
                prosumer_type,
                pv_kwp,
                ratio_kwh_per_kwp: float(3)?,
                bess_price_eur_per_kwh: float(4)?,
            },
            scr: float(5)?,
            ssr: float(6)?,
            lcoe: float(7)?,
            lcou: float(8)?,
            npv: float(9)?,
            grid_parity,
        });
    }
    Ok(out)
}

/// Groups of (country, battery price) in name-then-price order.
fn groups(results: &[ScenarioResult]) -> Vec<(String, f64)> {
    let mut keys: Vec<(String, f64)> = results
        .iter()
        .map(|r| {
            (
                r.scenario.country.clone(),
                r.scenario.bess_price_eur_per_kwh,
            )
        })
        .collect();
    keys.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    keys.dedup();
    keys
}

fn in_group<'a>(
    results: &'a [ScenarioResult],
    country: &'a str,
    price: Option<f64>,
) -> impl Iterator<Item = &'a ScenarioResult> + 'a {
    results.iter().filter(move |r| {
        r.scenario.country == country
            && price.is_none_or(|p| r.scenario.bess_price_eur_per_kwh == p)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxRow {
    pub country: String,
    pub bess_price: f64,
    pub stats: BoxStats,
}

/// LCOU box-plot statistics per country and battery price, pooling every
/// prosumer type, PV size and storage ratio.
pub fn box_table(results: &[ScenarioResult]) -> Vec<BoxRow> {
    groups(results)
        .into_iter()
        .map(|(country, bess_price)| {
            let lcou: Vec<f64> = in_group(results, &country, Some(bess_price))
                .map(|r| r.lcou)
                .collect();
            let stats = box_stats(&lcou).expect("group is non-empty");
            BoxRow {
                country,
                bess_price,
                stats,
            }
        })
        .collect()
}

pub fn write_box_csv<W: Write>(rows: &[BoxRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "country,bess_price,min,q1,median,q3,max")?;
    for r in rows {
        let s = &r.stats;
        writeln!(
            out,
            "{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            r.country, r.bess_price, s.min, s.q1, s.median, s.q3, s.max
        )?;
    }
    Ok(())
}

/// Parity share for one country, at one battery price or pooled (`None`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParityRow {
    pub country: String,
    pub bess_price: Option<f64>,
    pub scenarios: usize,
    pub parity_count: usize,
    pub share_pct: f64,
}

pub fn parity_table(results: &[ScenarioResult]) -> Vec<ParityRow> {
    let keys = groups(results);
    let mut countries: Vec<&String> = keys.iter().map(|(c, _)| c).collect();
    countries.dedup();

    let row = |country: &str, price: Option<f64>| {
        let (n, hits) = in_group(results, country, price).fold((0usize, 0usize), |(n, h), r| {
            (n + 1, h + r.grid_parity as usize)
        });
        ParityRow {
            country: country.to_string(),
            bess_price: price,
            scenarios: n,
            parity_count: hits,
            share_pct: 100.0 * hits as f64 / n as f64,
        }
    };
    let mut rows = Vec::new();
    for country in countries {
        rows.extend(
            keys.iter()
                .filter(|(c, _)| c == country)
                .map(|(c, p)| row(c, Some(*p))),
        );
        rows.push(row(country, None));
    }
    rows
}

pub fn write_parity_csv<W: Write>(rows: &[ParityRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "country,bess_price,scenarios,parity_count,share_pct")?;
    for r in rows {
        let price = r
            .bess_price
            .map_or_else(|| "pooled".to_string(), |p| format!("{p:.6}"));
        writeln!(
            out,
            "{},{},{},{},{:.6}",
            r.country, price, r.scenarios, r.parity_count, r.share_pct
        )?;
    }
    Ok(())
}
