use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use momentgap_core::hamburger::{
    admissibility_check, carleman, christoffel_chain, hankel, recurrence_from_moments,
    stieltjes_convergents, verdict_1d, weyl_disk, Admissibility, Evidence, Flavor, Status,
    Sufficiency, Verdict, VerdictConfig, WeylDisk,
};
use momentgap_core::moments::pushforward_direction;
use momentgap_core::moments::Exact;
use momentgap_core::poly::MPoly;
use momentgap_core::riesz::{
    cm_gap_criterion, cosine_envelope, direction_scan, geometric_envelope, grid_gap_lp,
    hyperplane_gap, orthant_criterion, poisson_kappa_estimate, CmFunction, Grid, Phase,
    SeparatingFunction,
};
use momentgap_core::{BigFloat, MomentSequence, Rational, Scalar, ScalarMode};
use num_complex::Complex;

use crate::args::{AnalyzeArgs, FlavorArg, FormatArg, SupportArg};
use crate::directions::{directions, DirectionSpec};
use crate::error::CliError;
use crate::input::Input;
use crate::report::{CriterionRecord, GridRecord, Number, Report};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    Admissibility,
    Carleman,
    Christoffel,
    Weyl,
    Stieltjes,
    Fantappie,
    Cosine,
    Maclaurin,
    Poisson,
    Orthant,
    Hyperplane,
    Scan,
    Curve,
}

impl Criterion {
    pub const ALL: [Criterion; 13] = [
        Criterion::Admissibility,
        Criterion::Carleman,
        Criterion::Christoffel,
        Criterion::Weyl,
        Criterion::Stieltjes,
        Criterion::Fantappie,
        Criterion::Cosine,
        Criterion::Maclaurin,
        Criterion::Poisson,
        Criterion::Orthant,
        Criterion::Hyperplane,
        Criterion::Scan,
        Criterion::Curve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Admissibility => "admissibility",
            Criterion::Carleman => "carleman",
            Criterion::Christoffel => "christoffel",
            Criterion::Weyl => "weyl",
            Criterion::Stieltjes => "stieltjes",
            Criterion::Fantappie => "fantappie",
            Criterion::Cosine => "cosine",
            Criterion::Maclaurin => "maclaurin",
            Criterion::Poisson => "poisson",
            Criterion::Orthant => "orthant",
            Criterion::Hyperplane => "hyperplane",
            Criterion::Scan => "scan",
            Criterion::Curve => "curve",
        }
    }

    fn needs_cone(self) -> bool {
        matches!(
            self,
            Criterion::Stieltjes
                | Criterion::Fantappie
                | Criterion::Maclaurin
                | Criterion::Hyperplane
        )
    }

    /// Whether the criterion is defined in dimension `d`.
    fn fits_dimension(self, d: usize) -> bool {
        match self {
            Criterion::Admissibility
            | Criterion::Carleman
            | Criterion::Christoffel
            | Criterion::Weyl
            | Criterion::Stieltjes
            | Criterion::Maclaurin => d == 1,
            Criterion::Scan => d >= 2,
            _ => true,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Criterion {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Criterion::ALL
            .into_iter()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| CliError::Usage(format!("unknown criterion `{s}`")))
    }
}

/// Everything `analyze` needs, resolved from the command line.
#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub input: PathBuf,
    pub mode: Option<String>,
    pub degree: Option<usize>,
    pub support: Option<SupportArg>,
    /// Requested criteria; empty selects every applicable one.
    pub criteria: Vec<Criterion>,
    pub flavor: Flavor,
    pub directions: Option<DirectionSpec>,
    pub grid_degree: Option<usize>,
    pub format: FormatArg,
    pub out: Option<PathBuf>,
}

pub fn flavor_of(f: FlavorArg) -> Flavor {
    match f {
        FlavorArg::Hamburger => Flavor::Hamburger,
        FlavorArg::Stieltjes => Flavor::Stieltjes,
    }
}

impl AnalysisConfig {
    pub fn from_args(args: &AnalyzeArgs) -> Result<AnalysisConfig, CliError> {
        let mut criteria = args
            .criteria
            .iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.parse())
            .collect::<Result<Vec<Criterion>, _>>()?;
        criteria.sort();
        criteria.dedup();
        Ok(AnalysisConfig {
            input: args.input.input.clone(),
            mode: args.input.mode.clone(),
            degree: args.input.degree,
            support: args.input.support,
            criteria,
            flavor: flavor_of(args.flavor),
            directions: args
                .directions
                .as_deref()
                .map(DirectionSpec::parse)
                .transpose()?,
            grid_degree: args.grid_degree,
            format: args.format,
            out: args.out.clone(),
        })
    }

    /// The criteria to run; explicit requests that cannot apply are load
    /// errors.
    fn select(&self, d: usize, conic: bool) -> Result<Vec<Criterion>, CliError> {
        if self.criteria.is_empty() {
            return Ok(Criterion::ALL
                .into_iter()
                .filter(|c| {
                    *c != Criterion::Curve && c.fits_dimension(d) && (conic || !c.needs_cone())
                })
                .collect());
        }
        for c in &self.criteria {
            if *c == Criterion::Curve {
                return Err(CliError::Usage(
                    "curve criteria run through the `curve` subcommand".into(),
                ));
            }
            if c.needs_cone() && !conic {
                return Err(CliError::Usage(format!(
                    "criterion `{c}` needs a cone support hint; pass --support orthant if the data live on the orthant"
                )));
            }
            if !c.fits_dimension(d) {
                return Err(CliError::Usage(format!(
                    "criterion `{c}` is not defined in dimension {d}"
                )));
            }
        }
        Ok(self.criteria.clone())
    }
}

fn record(
    criterion: &str,
    sufficiency: Sufficiency,
    certified: bool,
    indicates: Option<Status>,
    degree: usize,
    values: Vec<Number>,
    note: impl Into<String>,
) -> CriterionRecord {
    CriterionRecord {
        criterion: criterion.into(),
        sufficiency,
        certified,
        indicates,
        degree,
        values,
        note: note.into(),
    }
}

fn ones<S: Scalar>(d: usize, ctx: &S::Context) -> Vec<S> {
    vec![S::from_int(1, ctx); d]
}

/// One-variable state shared between criteria.
struct Line<S: Scalar> {
    n: usize,
    disks: Option<Result<Vec<WeylDisk<S>>, momentgap_core::Error>>,
}

impl<S: Scalar> Line<S> {
    /// Weyl disks at `z = i` for degrees `1..n`, computed once.
    fn disks(&mut self, seq: &MomentSequence<S>) -> Result<&[WeylDisk<S>], CliError> {
        let n = self.n;
        let computed = self.disks.get_or_insert_with(|| {
            let rec = recurrence_from_moments(seq, n)?;
            let z = Complex::new(S::from_int(0, seq.ctx()), S::from_int(1, seq.ctx()));
            (1..n).map(|k| weyl_disk(&rec, &z, k)).collect()
        });
        computed.as_deref().map_err(|e| e.clone().into())
    }
}

fn run_criterion<S: Scalar>(
    c: Criterion,
    seq: &MomentSequence<S>,
    cfg: &AnalysisConfig,
    line: &mut Line<S>,
    report: &mut Report,
) -> Result<Vec<CriterionRecord>, CliError> {
    let ctx = seq.ctx();
    let d = seq.dim();
    let big_n = seq.max_degree();
    let n = line.n;
    let grid_degree = cfg
        .grid_degree
        .unwrap_or(if d == 1 { 8 } else { 4 })
        .min(big_n);
    let name = c.name();
    Ok(match c {
        Criterion::Admissibility => {
            let (suff, ind, note, v) = match admissibility_check(&hankel(seq, n)?)? {
                Admissibility::PositiveDefinite => (
                    Sufficiency::NecessaryOnly,
                    None,
                    "positive definite".to_string(),
                    (n + 1) as f64,
                ),
                Admissibility::PositiveSemidefiniteRank(r) => (
                    Sufficiency::RigorousSufficient,
                    Some(Status::Determinate),
                    format!("singular: exactly {r} atoms"),
                    r as f64,
                ),
                Admissibility::Indefinite => {
                    return Err(momentgap_core::Error::NotAdmissible(format!(
                        "Hankel matrix of order {} is indefinite",
                        n + 1
                    ))
                    .into())
                }
            };
            vec![record(
                name,
                suff,
                true,
                ind,
                2 * n,
                vec![Number::double("rank", v)],
                note,
            )]
        }
        Criterion::Carleman => {
            let horizon = if cfg.flavor == Flavor::Hamburger {
                n
            } else {
                big_n
            };
            let r = carleman(
                seq,
                cfg.flavor,
                horizon,
                VerdictConfig::default().carleman_c,
            )?;
            let (suff, ind) = match (r.diverging, r.certified) {
                (true, true) => (Sufficiency::RigorousSufficient, Some(Status::Determinate)),
                (true, false) => (Sufficiency::LimitRigorousNumeric, Some(Status::Determinate)),
                _ => (Sufficiency::Heuristic, None),
            };
            let last = r.terms.last().copied().unwrap_or(0.0);
            vec![record(
                name,
                suff,
                r.certified,
                ind,
                horizon,
                vec![
                    Number::double("partial_sum", r.partial_sum),
                    Number::double("last_term", last),
                ],
                if r.diverging {
                    "slope test fires"
                } else {
                    "slope test silent"
                },
            )]
        }
        Criterion::Christoffel => {
            let rec = recurrence_from_moments(seq, n)?;
            let z = Complex::new(S::from_int(0, ctx), S::from_int(1, ctx));
            let chain = christoffel_chain(&rec, &z, n)?;
            let values = chain
                .iter()
                .enumerate()
                .map(|(k, v)| Number::of(format!("rho_{k}"), v))
                .collect();
            vec![record(
                name,
                Sufficiency::LimitRigorousNumeric,
                S::is_exact(),
                None,
                2 * n,
                values,
                "at z = i",
            )]
        }
        Criterion::Weyl => {
            let disks = line.disks(seq)?;
            let values = disks
                .iter()
                .map(|w| Number::of(format!("radius_{}", w.degree), &w.radius()))
                .collect();
            vec![record(
                name,
                Sufficiency::LimitRigorousNumeric,
                S::is_exact(),
                None,
                2 * n,
                values,
                "at z = i",
            )]
        }
        Criterion::Poisson if d == 1 => {
            let pi = S::pi(ctx);
            let disks = line.disks(seq)?;
            let values = disks
                .iter()
                .map(|w| Number::of(format!("kappa_{}", w.degree), &(w.diameter() / pi.clone())))
                .collect();
            vec![record(
                name,
                Sufficiency::LimitRigorousNumeric,
                S::is_exact(),
                None,
                2 * n,
                values,
                "at (0, 1)",
            )]
        }
        Criterion::Poisson => {
            let grid = Grid::default_for(seq)?;
            let zero = vec![S::from_int(0, ctx); d];
            let est = poisson_kappa_estimate(seq, &zero, &S::from_int(1, ctx), grid_degree, &grid)?;
            report.provenance.grids.push(GridRecord {
                criterion: name.into(),
                label: grid.label.clone(),
                points: grid.points.len(),
                degree: grid_degree,
            });
            vec![record(
                name,
                Sufficiency::Heuristic,
                false,
                None,
                grid_degree,
                vec![
                    Number::of("sup_side", &est.sup_side),
                    Number::of("inf_side", &est.inf_side),
                    Number::of("gap", &est.gap),
                ],
                "grid relaxation at the origin, t = 1; no certificate in several variables",
            )]
        }
        Criterion::Stieltjes => {
            let z = S::from_int(-1, ctx);
            let levels = stieltjes_convergents(seq, &z, n)?;
            let values = levels
                .iter()
                .map(|l| Number::of(format!("width_{}", l.level), &l.width))
                .collect();
            vec![record(
                name,
                Sufficiency::LimitRigorousNumeric,
                S::is_exact(),
                None,
                2 * n,
                values,
                "at z = -1",
            )]
        }
        Criterion::Fantappie => {
            let grid = Grid::default_for(seq)?;
            let a: Vec<Exact> = vec![Exact(Rational::from_integer(1.into())); d];
            let est = grid_gap_lp(
                seq,
                &SeparatingFunction::Fantappie { a },
                grid_degree,
                &grid,
            )?;
            report.provenance.grids.push(GridRecord {
                criterion: name.into(),
                label: grid.label.clone(),
                points: grid.points.len(),
                degree: grid_degree,
            });
            vec![record(
                name,
                Sufficiency::Heuristic,
                false,
                None,
                grid_degree,
                vec![
                    Number::of("sup_side", &est.sup_side),
                    Number::of("inf_side", &est.inf_side),
                    Number::of("gap", &est.gap),
                ],
                "a = (1, ..., 1)",
            )]
        }
        Criterion::Cosine if d == 1 => {
            let top = n.min(10);
            let values = (1..=top)
                .map(|m| {
                    cosine_envelope(seq, m, Phase::Zero)
                        .map(|e| Number::of(format!("gap_{}", 2 * m), &e.gap))
                })
                .collect::<Result<Vec<_>, _>>()?;
            vec![record(
                name,
                Sufficiency::Heuristic,
                S::is_exact(),
                None,
                2 * top,
                values,
                "cos t on the line",
            )]
        }
        Criterion::Cosine => {
            let m = big_n / 2;
            let mut values = Vec::with_capacity(d);
            for j in 0..d {
                let mut axis = vec![S::from_int(0, ctx); d];
                axis[j] = S::from_int(1, ctx);
                let pf = pushforward_direction(seq, &axis, big_n)?;
                values.push(Number::of(
                    format!("gap_axis_{}", j + 1),
                    &cosine_envelope(&pf, m, Phase::Zero)?.gap,
                ));
            }
            vec![record(
                name,
                Sufficiency::Heuristic,
                S::is_exact(),
                None,
                2 * m,
                values,
                "per coordinate push-forward",
            )]
        }
        Criterion::Maclaurin => {
            let top = n.min(10);
            let geometric = (1..=top)
                .map(|k| {
                    geometric_envelope(seq, k)
                        .map(|e| Number::of(format!("geometric_gap_{}", 2 * k), &e.gap))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let omega = MPoly::variable(1, 0, ctx);
            let cm = cm_gap_criterion(&CmFunction::NegExp, seq, &omega, n)?;
            let mut cm_values: Vec<Number> = cm
                .values
                .iter()
                .enumerate()
                .map(|(k, v)| Number::of(format!("neg_exp_gap_{}", k + 1), v))
                .collect();
            cm_values.push(Number::of("neg_exp_inf", &cm.inf_value));
            vec![
                record(
                    name,
                    Sufficiency::Heuristic,
                    S::is_exact(),
                    None,
                    2 * top,
                    geometric,
                    "1 / (1 + s)",
                ),
                record(
                    name,
                    Sufficiency::Heuristic,
                    S::is_exact(),
                    None,
                    2 * n,
                    cm_values,
                    format!("e^(-s), omega = s, trend {:?}", cm.trend).to_lowercase(),
                ),
            ]
        }
        Criterion::Orthant => {
            let zero = vec![S::from_int(0, ctx); d];
            let r = orthant_criterion(seq, &zero, None)?;
            let indicates = (!r.slack.is_positive()).then_some(Status::Determinate);
            vec![record(
                name,
                Sufficiency::NecessaryOnly,
                S::is_exact(),
                indicates,
                r.degree,
                vec![Number::of("slack", &r.slack)],
                "h = t^2 + t + 1, a = 0",
            )]
        }
        Criterion::Hyperplane => {
            let grid = Grid::default_for(seq)?;
            let deg = grid_degree.min(big_n.saturating_sub(1));
            let h = hyperplane_gap(seq, &ones::<S>(d, ctx), deg, &grid)?;
            report.provenance.grids.push(GridRecord {
                criterion: name.into(),
                label: grid.label.clone(),
                points: grid.points.len(),
                degree: deg,
            });
            vec![record(
                name,
                Sufficiency::Heuristic,
                false,
                None,
                deg,
                vec![
                    Number::of("value_plus", &h.value_plus),
                    Number::of("value_minus", &h.value_minus),
                ],
                "a = (1, ..., 1)",
            )]
        }
        Criterion::Scan => {
            let dirs = directions::<S>(cfg.directions.as_ref(), d, true, ctx)?;
            let scan = direction_scan(seq, &dirs, cfg.flavor, &VerdictConfig::default())?;
            let values = scan
                .entries
                .iter()
                .enumerate()
                .map(|(k, e)| {
                    let code = match &e.verdict {
                        Ok(v) => match v.status {
                            Status::Determinate => 1.0,
                            Status::Indeterminate => -1.0,
                            Status::Inconclusive => 0.0,
                        },
                        Err(_) => f64::NAN,
                    };
                    Number::double(format!("direction_{k}"), code)
                })
                .collect();
            let evidence = Evidence {
                criterion: "direction_scan".into(),
                degree: big_n,
                value: scan.determinate_rank as f64,
                exact: Some(scan.determinate_rank.to_string()),
                sufficiency: scan.sufficiency.unwrap_or(Sufficiency::Heuristic),
                indicates: (scan.status != Status::Inconclusive).then_some(scan.status),
                note: scan.note.clone(),
            };
            report.verdict = Some(Verdict {
                status: scan.status,
                flavor: cfg.flavor,
                evidence: vec![evidence],
                numeric: scan.status == Status::Indeterminate || !S::is_exact(),
                warnings: Vec::new(),
            });
            vec![record(
                name,
                scan.sufficiency.unwrap_or(Sufficiency::Heuristic),
                false,
                (scan.status != Status::Inconclusive).then_some(scan.status),
                big_n,
                values,
                format!(
                    "{}; 1 determinate, -1 indeterminate, 0 inconclusive, null failed",
                    scan.note
                ),
            )]
        }
        Criterion::Curve => unreachable!("rejected in select"),
    })
}

fn run_suite<S: Scalar>(
    input: &Input,
    ctx: S::Context,
    cfg: &AnalysisConfig,
    report: &mut Report,
) -> Result<(), CliError> {
    let seq: MomentSequence<S> = input.sequence(ctx, cfg.degree, cfg.support)?;
    report.describe(&seq);
    let d = seq.dim();
    let selected = cfg.select(d, seq.support().is_conic())?;
    if d == 1 {
        match verdict_1d(&seq, cfg.flavor, &VerdictConfig::default()) {
            Ok(v) => report.verdict = Some(v),
            Err(e) => report.error("verdict", &e.into()),
        }
    }
    let mut line = Line {
        n: seq.max_degree() / 2,
        disks: None,
    };
    for c in selected {
        match run_criterion(c, &seq, cfg, &mut line, report) {
            Ok(records) => report.criteria.extend(records),
            Err(e) => report.error(c.name(), &e),
        }
    }
    Ok(())
}

/// Runs the suite; the report is produced even when loading fails.
pub fn analyze(cfg: &AnalysisConfig) -> Report {
    let input = match Input::read(&cfg.input) {
        Ok(i) => i,
        Err(e) => return failed_report(cfg, &e),
    };
    let mode = match input.mode(cfg.mode.as_deref()) {
        Ok(m) => m,
        Err(e) => return failed_report(cfg, &e),
    };
    let mut report = Report::new(
        "analyze",
        &input,
        mode.to_string(),
        input.dimension().unwrap_or(0),
    );
    let outcome = match mode {
        ScalarMode::Rational => run_suite::<Rational>(&input, (), cfg, &mut report),
        ScalarMode::Float { bits } => run_suite::<BigFloat>(&input, bits, cfg, &mut report),
    };
    if let Err(e) = outcome {
        report.error("input", &e);
    }
    report.finish();
    report
}

fn failed_report(cfg: &AnalysisConfig, e: &CliError) -> Report {
    let input = Input::placeholder(&cfg.input);
    let mut report = Report::new("analyze", &input, cfg.mode.clone().unwrap_or_default(), 0);
    report.error("input", e);
    report
}

/// One row per number: criterion, label, value, hex, sufficiency, certified.
pub fn to_csv(report: &Report) -> Result<String, CliError> {
    let float = report.provenance.mode.starts_with("float");
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "criterion",
        "label",
        "value",
        "hex",
        "sufficiency",
        "certified",
    ])?;
    for r in &report.criteria {
        let suff = serde_json::to_value(r.sufficiency).expect("enum serializes");
        for v in &r.values {
            let (value, hex) = match (float, v.value) {
                (true, Some(f)) if v.exact.contains("0x") => (format!("{f:?}"), v.exact.clone()),
                (_, Some(f)) if !v.exact.contains('/') && v.exact.parse::<f64>().is_ok() => {
                    (format!("{f:?}"), String::new())
                }
                _ => (v.exact.clone(), String::new()),
            };
            w.write_record([
                r.criterion.as_str(),
                v.label.as_str(),
                value.as_str(),
                hex.as_str(),
                suff.as_str().unwrap_or_default(),
                if r.certified { "true" } else { "false" },
            ])?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
