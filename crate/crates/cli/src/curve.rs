use std::fs;

use momentgap_core::curves::{
    christoffel_on_curve, lift_and_test, pushforward_to_curve, CurveFile, CurveSpec, LiftConfig,
    PolynomialCurve,
};
use momentgap_core::hamburger::Sufficiency;
use momentgap_core::moments::Exact;
use momentgap_core::scalar::{imag_unit, parse_rational};
use momentgap_core::{BigFloat, MomentSequence, Rational, Scalar, ScalarMode};

use crate::analyze::flavor_of;
use crate::args::CurveArgs;
use crate::error::CliError;
use crate::input::Input;
use crate::report::{CriterionRecord, Number, Report};

/// `catalog:NAME` or `catalog:NAME:A`, else a JSON file holding a curve.
pub fn parse_curve(s: &str) -> Result<CurveSpec, CliError> {
    if let Some(rest) = s.strip_prefix("catalog:") {
        let (name, a) = match rest.split_once(':') {
            Some((name, a)) => (name, Some(Exact(parse_rational(a)?))),
            None => (rest, None),
        };
        return Ok(CurveSpec::Catalog {
            catalog: name.to_string(),
            a,
        });
    }
    let text = fs::read_to_string(s).map_err(|source| CliError::Io {
        path: s.to_string(),
        source,
    })?;
    serde_json::from_str::<CurveSpec>(&text)
        .or_else(|_| serde_json::from_str::<CurveFile>(&text).map(CurveSpec::Explicit))
        .map_err(|e| CliError::Usage(format!("{s}: not a curve: {e}")))
}

fn run_in<S: Scalar>(
    input: &Input,
    ctx: S::Context,
    curve: &PolynomialCurve,
    args: &CurveArgs,
    report: &mut Report,
) -> Result<(), CliError> {
    let m = curve.max_component_degree();
    let sigma: MomentSequence<S> = input.sequence(ctx, args.degree.map(|n| n * m), None)?;
    report.describe(&sigma);
    let n = args.degree.unwrap_or(sigma.max_degree() / m);
    let cm = pushforward_to_curve(&sigma, curve, n)?;
    report.criteria.push(CriterionRecord {
        criterion: "curve_moments".into(),
        sufficiency: Sufficiency::Heuristic,
        certified: S::is_exact(),
        indicates: None,
        degree: n,
        values: vec![Number::of("mass", cm.curve_moments.mass())],
        note: format!("{} in {} variables", curve.name(), curve.dim()),
    });
    report.criteria.push(CriterionRecord {
        criterion: "ramification".into(),
        sufficiency: Sufficiency::Heuristic,
        certified: true,
        indicates: None,
        degree: 0,
        values: curve
            .ramification()
            .iter()
            .enumerate()
            .map(|(k, t)| Number::of(format!("t_{k}"), t))
            .collect(),
        note: "parameters where the curve map fails to be an immersion".into(),
    });

    let config = LiftConfig {
        weight_exponent: args.weight_exponent,
        flavor: flavor_of(args.flavor),
        ..LiftConfig::default()
    };
    match lift_and_test(&cm, &config) {
        Ok(v) => report.verdict = Some(v),
        Err(e) => report.error("verdict", &e.into()),
    }
    let level = sigma.max_degree() / 2;
    match christoffel_on_curve(&cm, &imag_unit(sigma.ctx()), level) {
        Ok(rho) => report.criteria.push(CriterionRecord {
            criterion: "christoffel".into(),
            sufficiency: Sufficiency::LimitRigorousNumeric,
            certified: S::is_exact(),
            indicates: None,
            degree: 2 * level,
            values: vec![Number::of(format!("rho_{level}"), &rho)],
            note: "squared-weight lift at t = i".into(),
        }),
        Err(e) => report.error("christoffel", &e.into()),
    }
    Ok(())
}

pub fn curve(args: &CurveArgs) -> Report {
    let input = match Input::read(&args.sigma) {
        Ok(i) => i,
        Err(e) => return failed(args, &e),
    };
    let mode = match input.mode(args.mode.as_deref()) {
        Ok(m) => m,
        Err(e) => return failed(args, &e),
    };
    let mut report = Report::new("curve", &input, mode.to_string(), 1);
    let spec = match parse_curve(&args.curve) {
        Ok(s) => s,
        Err(e) => {
            report.error("input", &e);
            return report;
        }
    };
    report.provenance.curve = Some(spec.name());
    let outcome = spec
        .resolve()
        .map_err(CliError::from)
        .and_then(|curve| match mode {
            ScalarMode::Rational => run_in::<Rational>(&input, (), &curve, args, &mut report),
            ScalarMode::Float { bits } => {
                run_in::<BigFloat>(&input, bits, &curve, args, &mut report)
            }
        });
    if let Err(e) = outcome {
        report.error("input", &e);
    }
    report.finish();
    report
}

fn failed(args: &CurveArgs, e: &CliError) -> Report {
    let mut report = Report::new(
        "curve",
        &Input::placeholder(&args.sigma),
        args.mode.clone().unwrap_or_default(),
        1,
    );
    report.error("input", e);
    report
}
