//! Reference implementations used as oracles by the integration tests.
//! They are written for clarity, not speed, and share no code with the crate.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use storparity::dispatch::BatterySpec;
use storparity::profiles::{ProfileKind, TimeSeriesProfile};

/// Relative closeness with an absolute floor of `tol` near zero.
pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NaiveStep {
    pub direct: f64,
    pub charge: f64,
    pub delivered: f64,
    pub import: f64,
    pub curtail: f64,
    pub soc: f64,
}

/// Textbook state machine on the absolute state of charge.
pub fn naive_dispatch(pv: &[f64], load: &[f64], dt: f64, b: &BatterySpec) -> Vec<NaiveStep> {
    let soc_min = (1.0 - b.usable_fraction) * b.capacity_kwh;
    let soc_max = b.capacity_kwh;
    let mut soc = b.soc_init_kwh;
    let mut out = Vec::with_capacity(pv.len());
    for i in 0..pv.len() {
        let mut step = NaiveStep {
            direct: 0.0,
            charge: 0.0,
            delivered: 0.0,
            import: 0.0,
            curtail: 0.0,
            soc: 0.0,
        };
        if pv[i] >= load[i] {
            step.direct = load[i];
            let surplus = pv[i] - load[i];
            let mut take = surplus;
            if take > b.max_charge_kw {
                take = b.max_charge_kw;
            }
            let room = (soc_max - soc) / (b.eta_charge * dt);
            if take > room {
                take = room.max(0.0);
            }
            soc += take * b.eta_charge * dt;
            if soc > soc_max {
                soc = soc_max;
            }
            step.charge = take;
            step.curtail = surplus - take;
        } else {
            step.direct = pv[i];
            let deficit = load[i] - pv[i];
            let mut give = deficit;
            if give > b.max_discharge_kw {
                give = b.max_discharge_kw;
            }
            let stock = (soc - soc_min) * b.eta_discharge / dt;
            if give > stock {
                give = stock.max(0.0);
            }
            soc -= give * dt / b.eta_discharge;
            if soc < soc_min {
                soc = soc_min;
            }
            step.delivered = give;
            step.import = deficit - give;
        }
        step.soc = soc;
        out.push(step);
    }
    out
}

/// Straightforward year-by-year discounting with `powi`.
pub struct NaiveDcf {
    pub discount_rate: f64,
    pub maintenance_rate: f64,
    pub vat_rate: f64,
    pub horizon: u32,
    pub degradation: f64,
}

impl NaiveDcf {
    fn d(&self, n: u32) -> f64 {
        1.0 / (1.0 + self.discount_rate).powi(n as i32)
    }

    fn cost(&self, capex: f64) -> f64 {
        let yearly = self.maintenance_rate * capex / (1.0 + self.vat_rate);
        let mut total = capex;
        for n in 1..=self.horizon {
            total += yearly * self.d(n);
        }
        total
    }

    fn energy(&self, e1: f64, n: u32) -> f64 {
        e1 * (1.0 - self.degradation).powi(n as i32 - 1)
    }

    pub fn lcoe(&self, capex: f64, e1: f64) -> f64 {
        let mut den = 0.0;
        for n in 1..=self.horizon {
            den += self.energy(e1, n) * self.d(n);
        }
        self.cost(capex) / den
    }

    pub fn lcou(&self, capex: f64, e1: f64, scr: &[f64]) -> f64 {
        let mut den = 0.0;
        for n in 1..=self.horizon {
            den += self.energy(e1, n) * scr[n as usize - 1] * self.d(n);
        }
        self.cost(capex) / den
    }

    pub fn npv(&self, capex: f64, self_consumed: &[f64], price: f64) -> f64 {
        let yearly = self.maintenance_rate * capex / (1.0 + self.vat_rate);
        let mut total = -capex;
        for n in 1..=self.horizon {
            total += (price * self_consumed[n as usize - 1] - yearly) * self.d(n);
        }
        total
    }
}

/// Quantile by the 1-based textbook recipe: h = (n - 1) p + 1, then
/// interpolate between the floor(h)-th and next order statistics.
pub fn naive_quantile(values: &[f64], p: f64) -> f64 {
    let mut x = values.to_vec();
    x.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = x.len();
    let h = (n as f64 - 1.0) * p + 1.0;
    let k = h.floor() as usize;
    if k >= n {
        return x[n - 1];
    }
    x[k - 1] + (h - k as f64) * (x[k] - x[k - 1])
}

/// A short dispatch instance embedded in a valid profile year.
#[derive(Debug, Clone)]
pub struct Instance {
    pub pv: TimeSeriesProfile,
    pub load: TimeSeriesProfile,
    pub battery: BatterySpec,
    /// Number of leading steps carrying the random pattern.
    pub active: usize,
}

fn draw_power(rng: &mut ChaCha8Rng) -> f64 {
    match rng.gen_range(0..10) {
        0 => 0.0,
        1 => 1.0,
        _ => rng.gen_range(0.0..6.0),
    }
}

/// Random instance with at most 48 active steps. Either hourly steps padded
/// with zeros to a full year, or 8760/n-hour steps covering the year exactly.
pub fn random_instance(rng: &mut ChaCha8Rng) -> Instance {
    let n = rng.gen_range(1..=48);
    let pv: Vec<f64> = (0..n).map(|_| draw_power(rng)).collect();
    let load: Vec<f64> = (0..n).map(|_| draw_power(rng)).collect();

    let (dt, pv, load) = if rng.gen_bool(0.5) {
        let mut p = pv;
        let mut l = load;
        p.resize(8760, 0.0);
        l.resize(8760, 0.0);
        (1.0, p, l)
    } else {
        (8760.0 / n as f64, pv, load)
    };

    let capacity = match rng.gen_range(0..8) {
        0 => 0.0,
        _ => rng.gen_range(0.0..3.0) * 6.0 * dt,
    };
    let usable_fraction = if rng.gen_bool(0.2) {
        1.0
    } else {
        rng.gen_range(0.3..=1.0)
    };
    let eta = |rng: &mut ChaCha8Rng| {
        if rng.gen_bool(0.2) {
            1.0
        } else {
            rng.gen_range(0.7..=1.0)
        }
    };
    let eta_charge = eta(rng);
    let eta_discharge = eta(rng);
    let soc_min = (1.0 - usable_fraction) * capacity;
    let battery = BatterySpec {
        capacity_kwh: capacity,
        usable_fraction,
        eta_charge,
        eta_discharge,
        max_charge_kw: rng.gen_range(0.0..5.0),
        max_discharge_kw: rng.gen_range(0.0..5.0),
        soc_init_kwh: soc_min + rng.gen_range(0.0..=1.0) * (capacity - soc_min),
    };
    Instance {
        pv: TimeSeriesProfile::new(ProfileKind::Pv, dt, pv).unwrap(),
        load: TimeSeriesProfile::new(ProfileKind::Load, dt, load).unwrap(),
        battery,
        active: n,
    }
}
