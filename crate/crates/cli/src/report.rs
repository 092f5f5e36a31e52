//! Plain-text and JSON summaries of a results file.

use std::fmt::Write as _;

use serde::Serialize;

use storparity::sweep::{
    best_pv_size, box_table, parity_table, BoxRow, ParityRow, ProsumerType, ScenarioResult,
};

#[derive(Debug, Serialize)]
pub struct BestSize {
    pub country: String,
    pub prosumer_type: ProsumerType,
    pub ratio_kwh_per_kwp: f64,
    pub bess_price: f64,
    pub pv_kwp: u32,
    pub lcou: f64,
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub scenarios: usize,
    pub parity_shares: Vec<ParityRow>,
    pub best_pv_sizes: Vec<BestSize>,
    pub lcou_quartiles: Vec<BoxRow>,
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn best_sizes(results: &[ScenarioResult]) -> Vec<BestSize> {
    let mut countries: Vec<&str> = results
        .iter()
        .map(|r| r.scenario.country.as_str())
        .collect();
    countries.sort();
    countries.dedup();
    let ratios = sorted_unique(
        results
            .iter()
            .map(|r| r.scenario.ratio_kwh_per_kwp)
            .collect(),
    );
    let prices = sorted_unique(
        results
            .iter()
            .map(|r| r.scenario.bess_price_eur_per_kwh)
            .collect(),
    );

    let mut out = Vec::new();
    for country in countries {
        for t in ProsumerType::ALL {
            for &ratio in &ratios {
                for &price in &prices {
                    let Ok(pv_kwp) = best_pv_size(results, country, t, ratio, price) else {
                        continue;
                    };
                    let lcou = results
                        .iter()
                        .find(|r| {
                            let s = &r.scenario;
                            s.country == country
                                && s.prosumer_type == t
                                && s.pv_kwp == pv_kwp
                                && s.ratio_kwh_per_kwp == ratio
                                && s.bess_price_eur_per_kwh == price
                        })
                        .map(|r| r.lcou)
                        .expect("best size comes from the results");
                    out.push(BestSize {
                        country: country.to_string(),
                        prosumer_type: t,
                        ratio_kwh_per_kwp: ratio,
                        bess_price: price,
                        pv_kwp,
                        lcou,
                    });
                }
            }
        }
    }
    out
}

pub fn summarize(results: &[ScenarioResult]) -> Summary {
    Summary {
        scenarios: results.len(),
        parity_shares: parity_table(results),
        best_pv_sizes: best_sizes(results),
        lcou_quartiles: box_table(results),
    }
}

fn price_label(p: Option<f64>) -> String {
    match p {
        Some(p) => format!("{p:.0} EUR/kWh"),
        None => "pooled".into(),
    }
}

pub fn render_text(s: &Summary) -> String {
    let mut out = String::new();
    let w = &mut out;
    writeln!(w, "{} scenarios", s.scenarios).unwrap();

    writeln!(w, "\nGrid parity share").unwrap();
    for r in &s.parity_shares {
        writeln!(
            w,
            "  {:<10} {:>14}  {:>5.1}% ({}/{})",
            r.country,
            price_label(r.bess_price),
            r.share_pct,
            r.parity_count,
            r.scenarios
        )
        .unwrap();
    }

    writeln!(w, "\nPV size with the lowest LCOU").unwrap();
    for b in &s.best_pv_sizes {
        writeln!(
            w,
            "  {:<10} type {} ratio {:<4} {:>14}  {:>2} kWp  LCOU {:.4}",
            b.country,
            b.prosumer_type,
            b.ratio_kwh_per_kwp,
            price_label(Some(b.bess_price)),
            b.pv_kwp,
            b.lcou
        )
        .unwrap();
    }

    writeln!(w, "\nLCOU quartiles (EUR/kWh)").unwrap();
    writeln!(
        w,
        "  {:<10} {:>14}  {:>7} {:>7} {:>7} {:>7} {:>7}",
        "country", "battery", "min", "q1", "median", "q3", "max"
    )
    .unwrap();
    for b in &s.lcou_quartiles {
        let q = &b.stats;
        writeln!(
            w,
            "  {:<10} {:>14}  {:.4}  {:.4}  {:.4}  {:.4}  {:.4}",
            b.country,
            price_label(Some(b.bess_price)),
            q.min,
            q.q1,
            q.median,
            q.q3,
            q.max
        )
        .unwrap();
    }
    out
}
