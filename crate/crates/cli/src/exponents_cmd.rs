//! `dnls exponents`: the full exponent set for one `(d, p)`, computed exactly.

use dnls_core::exponents::sdc_check;
use dnls_core::{DecayExponent, ExactExponents, ExactParams, Rational};

use crate::CliError;

/// Parses `7/5`, `-3`, `1.4` or `+0.125` exactly.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let s = text.trim();
    let bad = || format!("expected an integer, fraction a/b or decimal, got {text:?}");
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err("zero denominator".into());
        }
        return Ok(Rational::new(num, den));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if (int.is_empty() && frac.is_empty()) || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac.len() > 18 {
        return Err(format!("too many decimal digits in {text:?}"));
    }
    let digits = format!("{int}{frac}");
    let num: i64 = digits.parse().map_err(|_| bad())?;
    let den = 10i64.pow(frac.len() as u32);
    let value = Rational::new(num, den);
    Ok(if neg { -value } else { value })
}

fn show(x: &Rational) -> String {
    let approx = *x.numer() as f64 / *x.denom() as f64;
    format!("{x} ({approx:.16e})")
}

/// Text report of every exponent and, given λ, the dissipative classification.
pub fn exponents_report(d: u32, p: Rational, lambda: Option<(Rational, Rational)>) -> Result<String, CliError> {
    let (re, im) = lambda.unwrap_or((Rational::from(0), Rational::from(-1)));
    let params = ExactParams::new(d, p, re, im).map_err(|e| CliError::Usage(e.to_string()))?;
    let set = ExactExponents::compute(&params);
    let none = || "undefined".to_string();
    let mut out = String::new();
    let mut row = |k: &str, v: String| out.push_str(&format!("{k:<16} {v}\n"));
    row("d", d.to_string());
    row("p", show(&p));
    row("critical_power", show(&params.critical_power()));
    row("q", show(&set.q));
    row("alpha", show(&set.alpha));
    row("beta", show(&set.beta));
    row("theta", set.theta.as_ref().map_or_else(none, show));
    row("p1", set.p1.as_ref().map_or_else(none, show));
    let regime = match &set.kappa {
        Some(DecayExponent::Subcritical { kappa }) => {
            row("kappa", show(kappa));
            "subcritical"
        }
        Some(DecayExponent::Critical { log_exponent }) => {
            row("kappa", none());
            row("log_exponent", show(log_exponent));
            "critical"
        }
        None => {
            row("kappa", none());
            "supercritical"
        }
    };
    if !matches!(set.kappa, Some(DecayExponent::Critical { .. })) {
        row("log_exponent", show(&set.log_exp));
    }
    row("regime", regime.into());
    let res = set.identity_residuals(&params);
    row("identities", if res.within(&Rational::from(0)) { "exact".into() } else { format!("residuals {res:?}") });
    if lambda.is_some() {
        row("lambda", format!("{re} + {im}i"));
        match sdc_check(&params) {
            Ok(sdc) => {
                row("sdc", if sdc.satisfied { "satisfied" } else { "violated" }.into());
                row("nonlinearity", if sdc.attractive { "attractive" } else { "repulsive" }.into());
            }
            Err(e) => row("sdc", format!("not applicable: {e}")),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_forms() {
        assert_eq!(parse_rational("7/5").unwrap(), Rational::new(7, 5));
        assert_eq!(parse_rational("1.4").unwrap(), Rational::new(7, 5));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new(-1, 2));
        assert_eq!(parse_rational("3").unwrap(), Rational::from(3));
        assert_eq!(parse_rational("0.0").unwrap(), Rational::from(0));
        assert_eq!(parse_rational(".25").unwrap(), Rational::new(1, 4));
        for bad in ["", "1/0", "abc", "1e3", "1.2.3", "-"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn report_for_cubic_line() {
        let text = exponents_report(1, Rational::from(3), Some((Rational::from(-1), Rational::from(-1)))).unwrap();
        assert!(text.contains("regime           critical"), "{text}");
        assert!(text.contains("log_exponent     1/3"), "{text}");
        assert!(text.contains("sdc              satisfied"), "{text}");
        assert!(text.contains("identities       exact"));
    }

    #[test]
    fn report_for_quadratic_line() {
        let text = exponents_report(1, Rational::from(2), Some((Rational::from(-3), Rational::new(-1, 2)))).unwrap();
        assert!(text.contains("kappa            1/3"), "{text}");
        assert!(text.contains("sdc              violated"), "{text}");
        assert!(exponents_report(1, Rational::from(1), None).is_err());
    }
}
