use momentgap_core::moments::pushforward_direction;
use momentgap_core::riesz::{poisson_kappa_1d, poisson_kappa_estimate, sphere_average_kappa, Grid};
use momentgap_core::scalar::parse_rational;
use momentgap_core::{BigFloat, MomentSequence, Rational, Scalar, ScalarMode};

use crate::args::KappaArgs;
use crate::error::CliError;
use crate::input::Input;
use crate::report::csv_cells;

/// `LO:HI:COUNT`, evenly spaced and inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub lo: Rational,
    pub hi: Rational,
    pub count: usize,
}

impl Axis {
    pub fn points(&self) -> Vec<Rational> {
        if self.count == 1 {
            return vec![self.lo.clone()];
        }
        let step = (&self.hi - &self.lo) / Rational::from_integer((self.count as i64 - 1).into());
        (0..self.count)
            .map(|i| &self.lo + &step * Rational::from_integer((i as i64).into()))
            .collect()
    }
}

/// Parse `x=LO:HI:N,t=LO:HI:N`.
pub fn parse_field(s: &str) -> Result<(Axis, Axis), CliError> {
    let bad = |why: &str| CliError::Usage(format!("bad field `{s}`: {why}"));
    let (mut x, mut t) = (None, None);
    for part in s.split(',') {
        let (name, range) = part
            .split_once('=')
            .ok_or_else(|| bad("expected NAME=LO:HI:COUNT"))?;
        let pieces: Vec<&str> = range.split(':').collect();
        let [lo, hi, count] = pieces[..] else {
            return Err(bad("expected LO:HI:COUNT"));
        };
        let axis = Axis {
            lo: parse_rational(lo)?,
            hi: parse_rational(hi)?,
            count: count
                .trim()
                .parse()
                .map_err(|_| bad("count is not a positive integer"))?,
        };
        if axis.count == 0 {
            return Err(bad("count must be positive"));
        }
        match name.trim() {
            "x" => x = Some(axis),
            "t" => t = Some(axis),
            other => return Err(bad(&format!("unknown axis `{other}`"))),
        }
    }
    let (x, t) = (
        x.ok_or_else(|| bad("missing x"))?,
        t.ok_or_else(|| bad("missing t"))?,
    );
    if t.points()
        .iter()
        .any(|v| *v <= Rational::from_integer(0.into()))
    {
        return Err(bad("heights must be positive"));
    }
    Ok((x, t))
}

fn run_in<S: Scalar>(input: &Input, ctx: S::Context, args: &KappaArgs) -> Result<String, CliError> {
    let seq: MomentSequence<S> = input.sequence(ctx, args.input.degree, args.input.support)?;
    let ctx = seq.ctx();
    let d = seq.dim();
    let big_n = seq.max_degree();
    let (xs, ts) = parse_field(&args.field)?;
    let radius = args
        .sphere_radius
        .as_deref()
        .map(|r| parse_rational(r).map(|r| S::from_rational(&r, ctx)))
        .transpose()?;
    if big_n < 4 {
        return Err(momentgap_core::Error::DegreeInsufficient {
            needed: 4,
            available: big_n,
        }
        .into());
    }
    // Level of the Weyl disks: moments through 2n + 2 are needed.
    let n = big_n / 2 - 1;
    let grid_degree = args.grid_degree.unwrap_or(4).min(big_n);
    let grid = if d == 1 {
        None
    } else {
        Some(Grid::default_for(&seq)?)
    };
    let first_axis = if d == 1 {
        None
    } else {
        let mut e1 = vec![S::from_int(0, ctx); d];
        e1[0] = S::from_int(1, ctx);
        Some(pushforward_direction(&seq, &e1, big_n)?)
    };

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["x", "t", "kappa", "kappa_hex", "method", "certified"];
    if d > 1 {
        header.extend(["first_axis_kappa", "first_axis_kappa_hex"]);
    }
    if radius.is_some() {
        header.extend(["sphere_mean", "sphere_mean_hex"]);
    }
    w.write_record(&header)?;

    for x in xs.points() {
        for t in ts.points() {
            let xv = S::from_rational(&x, ctx);
            let tv = S::from_rational(&t, ctx);
            let mut point = vec![S::from_int(0, ctx); d];
            point[0] = xv.clone();
            let (kappa, method, certified) = match &grid {
                None => (poisson_kappa_1d(&seq, &xv, &tv, n)?, "weyl", S::is_exact()),
                Some(g) => (
                    poisson_kappa_estimate(&seq, &point, &tv, grid_degree, g)?.gap,
                    "grid_lp",
                    false,
                ),
            };
            let (value, hex) = csv_cells(&kappa);
            let mut row = vec![
                x.to_string(),
                t.to_string(),
                value,
                hex,
                method.into(),
                certified.to_string(),
            ];
            if let Some(pf) = &first_axis {
                let (v, h) = csv_cells(&poisson_kappa_1d(pf, &xv, &tv, n)?);
                row.extend([v, h]);
            }
            if let Some(r) = &radius {
                let avg = sphere_average_kappa(
                    &seq,
                    &point,
                    &tv,
                    r,
                    args.sphere_nodes,
                    if d == 1 { big_n } else { grid_degree },
                    grid.as_ref(),
                )?;
                let (v, h) = csv_cells(&avg.mean);
                row.extend([v, h]);
            }
            w.write_record(&row)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

pub fn kappa(args: &KappaArgs) -> Result<String, CliError> {
    let input = Input::read(&args.input.input)?;
    match input.mode(args.input.mode.as_deref())? {
        ScalarMode::Rational => run_in::<Rational>(&input, (), args),
        ScalarMode::Float { bits } => run_in::<BigFloat>(&input, bits, args),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_grammar() {
        let (x, t) = parse_field("x=-1:1:3,t=1/2:1:2").unwrap();
        assert_eq!(
            x.points().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            ["-1", "0", "1"]
        );
        assert_eq!(
            t.points().iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            ["1/2", "1"]
        );
        assert!(parse_field("x=0:1:2").is_err());
        assert!(parse_field("x=0:1:2,t=0:1:2").is_err());
        assert!(parse_field("x=0:1,t=1:2:2").is_err());
    }
}
