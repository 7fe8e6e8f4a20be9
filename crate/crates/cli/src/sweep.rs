//! One-parameter sweeps.

use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::output::SweepRow;
use crate::runner;
use crate::CliError;

/// Parses a comma-separated list of numbers; blank input is an empty list.
pub fn parse_values(list: &str) -> Result<Vec<f64>, CliError> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| CliError::Config(format!("sweep value '{s}' is not a number"))))
        .collect()
}

fn row(base: &ScenarioConfig, param: &str, value: f64) -> SweepRow {
    let result = (|| {
        let mut c = base.clone();
        c.set_param(param, value)?;
        runner::run(&c)
    })();
    match result {
        Ok(out) => {
            let m = out.metrics;
            let harmonic = |n: usize| m.harmonics.as_ref().and_then(|h| h.get(n).copied());
            SweepRow {
                value,
                status: "ok".into(),
                gamma_bar: m.gamma_bar,
                xi: m.xi,
                xi_lower: m.xi_lower,
                xi_upper: m.xi_upper,
                im_spread: m.im_spread,
                a1: harmonic(1),
                a2: harmonic(2),
                gamma_eff_zigzag: m.gamma_eff_zigzag,
                gamma_eff_armchair: m.gamma_eff_armchair,
                q: m.q,
                max_deviation: m.max_deviation,
                error: None,
            }
        }
        Err(e) => SweepRow { value, status: "error".into(), error: Some(e.to_string()), ..SweepRow::default() },
    }
}

/// Runs `base` once per value of `param`. Failed points become error rows.
pub fn sweep(base: &ScenarioConfig, param: &str, values: &[f64]) -> Result<Vec<SweepRow>, CliError> {
    // reject an unknown parameter up front instead of once per row
    base.clone().set_param(param, values.first().copied().unwrap_or(1.0))?;
    Ok(values.par_iter().map(|&v| row(base, param, v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scenario;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("").unwrap(), Vec::<f64>::new());
        assert_eq!(parse_values(" 0.1, 0.2 ,").unwrap(), vec![0.1, 0.2]);
        assert!(parse_values("0.1,x").is_err());
    }

    #[test]
    fn bad_points_become_error_rows() {
        let base = ScenarioConfig::new(Scenario::Chern);
        let rows = sweep(&base, "t2", &[0.2, 0.0]).unwrap();
        assert_eq!(rows[0].status, "ok");
        assert_eq!(rows[0].q, Some(1));
        assert_eq!(rows[1].status, "error");
        assert!(rows[1].error.is_some());
        assert!(sweep(&base, "nope", &[1.0]).is_err());
    }
}
