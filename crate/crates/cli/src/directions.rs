use std::fs;
use std::path::PathBuf;

use momentgap_core::moments::Exact;
use momentgap_core::riesz::sphere_nodes;
use momentgap_core::Scalar;

use crate::error::CliError;

/// How scan directions are chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DirectionSpec {
    /// This many nearly uniform unit vectors.
    Count(usize),
    /// A JSON array of vectors, entries as `"p/q"` strings or integers.
    File(PathBuf),
}

impl DirectionSpec {
    pub fn parse(s: &str) -> Result<DirectionSpec, CliError> {
        match s.trim().parse::<usize>() {
            Ok(0) => Err(CliError::Usage("direction count must be positive".into())),
            Ok(n) => Ok(DirectionSpec::Count(n)),
            Err(_) => Ok(DirectionSpec::File(PathBuf::from(s))),
        }
    }
}

/// Bits kept in sampled direction coordinates.
const SAMPLE_BITS: u32 = 20;

/// Sampled unit vectors in `R^d`, one per antipodal pair.
fn sampled(d: usize, count: usize) -> Result<Vec<Vec<f64>>, CliError> {
    if d == 2 {
        // A third-step offset keeps every sample off both axes.
        return Ok((0..count)
            .map(|k| {
                let a = std::f64::consts::PI * (k as f64 + 1.0 / 3.0) / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect());
    }
    let mut nodes = sphere_nodes(d - 1, count)?;
    for v in &mut nodes {
        if v.iter().find(|x| **x != 0.0).is_some_and(|x| *x < 0.0) {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    Ok(nodes)
}

/// The direction set for a scan: optionally the axes, then the requested
/// extras.
pub fn directions<S: Scalar>(
    spec: Option<&DirectionSpec>,
    d: usize,
    include_axes: bool,
    ctx: &S::Context,
) -> Result<Vec<Vec<S>>, CliError> {
    let mut out = Vec::new();
    if include_axes {
        for j in 0..d {
            out.push(
                (0..d)
                    .map(|i| S::from_int(i64::from(i == j), ctx))
                    .collect(),
            );
        }
    }
    match spec {
        None => {}
        Some(DirectionSpec::Count(n)) => {
            // Short dyadics keep exact push-forwards cheap.
            let scale = f64::from(1u32 << SAMPLE_BITS);
            for v in sampled(d, *n)? {
                out.push(
                    v.into_iter()
                        .map(|x| S::from_f64((x * scale).round(), ctx) / S::from_f64(scale, ctx))
                        .collect(),
                );
            }
        }
        Some(DirectionSpec::File(path)) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let raw: Vec<Vec<Exact>> = serde_json::from_str(&text).map_err(|e| {
                CliError::Usage(format!(
                    "{}: expected an array of vectors: {e}",
                    path.display()
                ))
            })?;
            for v in raw {
                if v.len() != d {
                    return Err(CliError::Usage(format!(
                        "{}: direction of length {} in dimension {d}",
                        path.display(),
                        v.len()
                    )));
                }
                out.push(v.iter().map(|e| S::from_rational(&e.0, ctx)).collect());
            }
        }
    }
    if out.is_empty() {
        return Err(CliError::Usage("no scan directions".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use momentgap_core::Rational;

    #[test]
    fn axes_then_samples() {
        let dirs = directions::<Rational>(Some(&DirectionSpec::Count(3)), 2, true, &()).unwrap();
        assert_eq!(dirs.len(), 5);
        assert_eq!(
            dirs[1],
            vec![
                Rational::from_integer(0.into()),
                Rational::from_integer(1.into())
            ]
        );
        for v in &dirs[2..] {
            let norm: f64 = v.iter().map(|x| x.to_f64().powi(2)).sum();
            assert!((norm - 1.0).abs() < 1e-5);
            assert!(v.iter().all(|x| x.to_f64() != 0.0));
        }
    }

    #[test]
    fn parse_spec() {
        assert_eq!(DirectionSpec::parse("7").unwrap(), DirectionSpec::Count(7));
        assert!(DirectionSpec::parse("0").is_err());
        assert_eq!(
            DirectionSpec::parse("dirs.json").unwrap(),
            DirectionSpec::File("dirs.json".into())
        );
    }
}
