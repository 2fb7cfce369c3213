//! Two-sample test based on maximal precedence and maximal exceedance.
//!
//! Given a training sample X of size `m` and a test sample Y of size `n`,
//! the statistic `T = P_r + E_s` adds the largest number of X values in any
//! of the first `r` gaps of the ordered Y sample to the largest number in
//! any of the last `s` gaps. Large values point to a difference in either
//! direction.
//!
//! ```
//! use maxprec::{statistics::{statistic_bundle, Sample}, Design};
//! use maxprec::inference::{critical_value, CriticalMethod};
//!
//! let x = Sample::new("training", vec![0.2, 0.4, 0.5, 0.9]).unwrap();
//! let y = Sample::new("test", vec![0.1, 0.3, 0.6, 0.7, 0.8]).unwrap();
//! let stats = statistic_bundle(&x, &y, 1, 1).unwrap();
//! assert_eq!((stats.p, stats.e, stats.t), (0, 1, 1));
//!
//! let cv = critical_value(Design::new(4, 5, 1, 1).unwrap(), 0.05, CriticalMethod::Exact).unwrap();
//! assert!(cv.alpha1 <= 0.05);
//! ```
//!
//! Modules:
//!
//! * [`combinatorics`]: exact counts and the Γ/B functions,
//! * [`statistics`]: frequency vectors and the T, Q and V statistics,
//! * [`null_dist`]: exact, brute-force and large-sample null laws,
//! * [`lehmann`]: the law of `T` under `G = F^gamma` and exact power,
//! * [`inference`]: critical values, the randomized test, simulation.

pub mod combinatorics;
pub mod design;
pub mod error;
pub mod inference;
pub mod lehmann;
pub mod null_dist;
pub mod rational;
pub mod statistics;
pub mod summation;

pub use design::Design;
pub use error::{Error, Result};
