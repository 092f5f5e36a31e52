//! Techno-economic simulation of residential PV-and-storage systems under a
//! pure self-consumption scheme, where exported energy earns nothing.
//!
//! The pipeline for one scenario is:
//!
//! 1. [`profiles`]: synthesize (or import) an annual PV year and load year.
//! 2. [`dispatch`]: run the greedy self-consumption battery controller and
//!    aggregate the annual energy balance (SCR, SSR).
//! 3. [`finance`]: CAPEX, LCOE, LCOU (levelized cost of *self-consumed*
//!    energy), NPV of avoided purchases, and grid parity.
//! 4. [`sweep`]: enumerate the country x prosumer x size x storage grid and
//!    summarize it (parity shares, box plots, best sizes).

pub mod dispatch;
pub mod finance;
pub mod profiles;
pub mod sweep;
