//! Verifiers for the asymptotic laws: each returns a typed record and can
//! be rendered as a [`Report`].

mod exp;
mod rates;
mod watson;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub use exp::{
    buckholtz_check, counts, cvw_order_check, dilcher_rubel_check, erfc_parabola, exp_section,
    g_n_exact, g_n_szego, lft_relation_check, nr_grid, nr_limit_check, Buckholtz,
    ConvergenceReport, CountMode, CountReport, CvwReport, DilcherRubel, ErfcZero, LftReport,
};
pub use rates::{
    fit_rate, fit_rate_sides, fit_rate_with, imag_axis_check, rate_constants, FitOptions,
    ImagAxisReport, RateFit, Side,
};
pub use watson::{decreasing_to_floor, watson_check, WatsonMode, WATSON_FLOOR};

/// Machine-readable verifier outcome. Numbers are carried as decimal
/// strings.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub check: String,
    pub params: Value,
    pub pass: bool,
    pub statistics: BTreeMap<String, Value>,
    pub artifacts: Vec<String>,
}

impl Report {
    pub fn new(check: &str, params: Value) -> Self {
        Report {
            check: check.to_string(),
            params,
            pass: true,
            statistics: BTreeMap::new(),
            artifacts: Vec::new(),
        }
    }

    pub fn stat(&mut self, key: &str, v: f64) -> &mut Self {
        self.statistics
            .insert(key.to_string(), Value::String(num(v)));
        self
    }

    pub fn stat_value(&mut self, key: &str, v: Value) -> &mut Self {
        self.statistics.insert(key.to_string(), v);
        self
    }

    pub fn stat_list(&mut self, key: &str, v: &[f64]) -> &mut Self {
        let list = v.iter().map(|x| Value::String(num(*x))).collect();
        self.statistics.insert(key.to_string(), Value::Array(list));
        self
    }

    /// Records a named criterion and folds it into `pass`.
    pub fn require(&mut self, key: &str, ok: bool) -> &mut Self {
        self.statistics.insert(format!("ok_{key}"), Value::Bool(ok));
        self.pass &= ok;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Shortest round-trip decimal for an f64.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        v.to_string()
    }
}

/// Least-squares slope of log y against log x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let rows: Vec<[f64; 2]> = xs.iter().map(|x| [x.ln(), 1.0]).collect();
    let rhs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    crate::series::least_squares(&rows, &rhs).map_or(f64::NAN, |p| p[0])
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}
