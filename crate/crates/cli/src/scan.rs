use momentgap_core::hamburger::{Evidence, Status, Sufficiency, Verdict, VerdictConfig};
use momentgap_core::riesz::{direction_scan, Scan};
use momentgap_core::{BigFloat, Rational, Scalar, ScalarMode};

use crate::analyze::flavor_of;
use crate::args::ScanArgs;
use crate::directions::{directions, DirectionSpec};
use crate::error::CliError;
use crate::input::Input;
use crate::report::csv_cells;

/// Evidence columns, in order. Cells hold the double value; exact values
/// stay in JSON reports.
const EVIDENCE: [&str; 4] = [
    "carleman",
    "christoffel_plateau",
    "weyl_radius_trend",
    "stieltjes_width_trend",
];

fn label<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

fn evidence_cell(v: &Verdict, name: &str) -> String {
    v.evidence
        .iter()
        .find(|e| e.criterion == name)
        .map(|e| format!("{:?}", e.value))
        .unwrap_or_default()
}

/// Strongest sufficiency among the evidence backing the status.
fn backing(v: &Verdict) -> Option<Sufficiency> {
    v.evidence
        .iter()
        .filter(|e: &&Evidence| e.indicates == Some(v.status))
        .map(|e| e.sufficiency)
        .min_by_key(|s| strength(*s))
}

fn strength(s: Sufficiency) -> u8 {
    match s {
        Sufficiency::RigorousSufficient => 0,
        Sufficiency::LimitRigorousNumeric => 1,
        Sufficiency::NecessaryOnly => 2,
        Sufficiency::Heuristic => 3,
    }
}

/// The scan as CSV: one row per direction, then an `aggregate` footer.
pub fn scan_csv<S: Scalar>(scan: &Scan<S>, d: usize) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["index".to_string()];
    for j in 1..=d {
        header.push(format!("xi_{j}"));
        if !S::is_exact() {
            header.push(format!("xi_{j}_hex"));
        }
    }
    header.extend(["status", "sufficiency", "numeric"].map(String::from));
    header.extend(EVIDENCE.map(String::from));
    header.push("note".into());
    w.write_record(&header)?;

    let xi_width = if S::is_exact() { d } else { 2 * d };
    for (k, entry) in scan.entries.iter().enumerate() {
        let mut row = vec![k.to_string()];
        for x in &entry.direction {
            let (value, hex) = csv_cells(x);
            row.push(value);
            if !S::is_exact() {
                row.push(hex);
            }
        }
        match &entry.verdict {
            Ok(v) => {
                row.push(label(&v.status));
                row.push(backing(v).map(|s| label(&s)).unwrap_or_default());
                row.push(v.numeric.to_string());
                row.extend(EVIDENCE.iter().map(|n| evidence_cell(v, n)));
                row.push(v.warnings.join("; "));
            }
            Err(e) => {
                row.push(label(&Status::Inconclusive));
                row.extend(std::iter::repeat_n(String::new(), 2 + EVIDENCE.len()));
                row.push(format!("{}: {e}", e.kind()));
            }
        }
        w.write_record(&row)?;
    }

    let mut footer = vec!["aggregate".to_string()];
    footer.extend(std::iter::repeat_n(String::new(), xi_width));
    footer.push(label(&scan.status));
    footer.push(scan.sufficiency.map(|s| label(&s)).unwrap_or_default());
    footer.push((scan.status == Status::Indeterminate || !S::is_exact()).to_string());
    footer.extend(std::iter::repeat_n(String::new(), EVIDENCE.len()));
    footer.push(format!(
        "determinate rank {}; {}",
        scan.determinate_rank, scan.note
    ));
    w.write_record(&footer)?;

    let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn run_in<S: Scalar>(input: &Input, ctx: S::Context, args: &ScanArgs) -> Result<String, CliError> {
    let seq = input.sequence::<S>(ctx, args.input.degree, args.input.support)?;
    let d = seq.dim();
    if d < 2 {
        return Err(CliError::Usage(
            "direction scans need two or more variables".into(),
        ));
    }
    let spec = DirectionSpec::parse(&args.directions)?;
    let dirs = directions::<S>(Some(&spec), d, args.include_axes, seq.ctx())?;
    let scan = direction_scan(
        &seq,
        &dirs,
        flavor_of(args.flavor),
        &VerdictConfig::default(),
    )?;
    scan_csv(&scan, d)
}

pub fn scan(args: &ScanArgs) -> Result<String, CliError> {
    let input = Input::read(&args.input.input)?;
    match input.mode(args.input.mode.as_deref())? {
        ScalarMode::Rational => run_in::<Rational>(&input, (), args),
        ScalarMode::Float { bits } => run_in::<BigFloat>(&input, bits, args),
    }
}
