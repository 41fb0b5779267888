use std::fmt;
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use crate::linarith::{Assignment, Variable, Vocabulary};
use crate::pac::{blur, BlurConfig, Interval, PartialInterval, GRID_BITS};
use crate::rational::{int, parse_rational, snap_f64, to_decimal_string, to_f64, Rational};

use super::{BenchError, ProblemSpec};

/// Draws per check of the rejection sampler's acceptance rate.
const BATCH: u64 = 100_000;
/// Minimum acceptance rate before sampling gives up.
const MIN_RATE: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    fn flip(self) -> Self {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Positive => "pos",
            Label::Negative => "neg",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledSample {
    /// The true point; empty when only the observation is known.
    pub point: Assignment,
    pub label: Label,
    /// True when the label was deliberately flipped.
    pub outlier: bool,
    /// What the learner sees. Present for positive samples.
    pub blurred: Option<PartialInterval>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Dataset {
    pub vocab: Vocabulary,
    pub samples: Vec<LabelledSample>,
}

impl Dataset {
    /// The observations handed to the learner: blurred positives.
    pub fn observations(&self) -> Vec<PartialInterval> {
        self.samples
            .iter()
            .filter(|s| s.label == Label::Positive)
            .filter_map(|s| s.blurred.clone())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    pub count: usize,
    /// Fraction of samples drawn from the feasible region.
    pub pos_ratio: Rational,
    /// Noise level `n`; the Gaussian std is `n / √dims`.
    pub noise: Rational,
    /// Probability of flipping each label.
    pub outlier_ratio: Rational,
    pub mask_probability: f64,
}

impl DatasetConfig {
    pub fn new(count: usize) -> Self {
        Self {
            count,
            pos_ratio: Rational::new(1.into(), 2.into()),
            noise: int(0),
            outlier_ratio: int(0),
            mask_probability: 0.0,
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        let unit = |name, value: &Rational| {
            if value < &int(0) || value > &int(1) {
                Err(BenchError::OutOfRange {
                    name,
                    value: value.to_string(),
                    range: "[0, 1]",
                })
            } else {
                Ok(())
            }
        };
        unit("pos_ratio", &self.pos_ratio)?;
        unit("outlier_ratio", &self.outlier_ratio)?;
        if self.noise < int(0) {
            return Err(BenchError::OutOfRange {
                name: "noise",
                value: self.noise.to_string(),
                range: "[0, ∞)",
            });
        }
        if self.count == 0 {
            return Err(BenchError::OutOfRange {
                name: "count",
                value: "0".into(),
                range: "positive integers",
            });
        }
        Ok(())
    }
}

fn uniform_point<R: Rng + ?Sized>(spec: &ProblemSpec, rng: &mut R) -> Assignment {
    spec.vars()
        .iter()
        .zip(&spec.domain)
        .map(|(v, (lo, hi))| {
            let u = snap_f64(rng.random::<f64>(), GRID_BITS);
            (v.clone(), lo + (hi - lo) * u)
        })
        .collect()
}

struct Rejection {
    what: &'static str,
    hits: u64,
    draws: u64,
}

impl Rejection {
    fn draw<R: Rng + ?Sized>(
        &mut self,
        spec: &ProblemSpec,
        inside: bool,
        rng: &mut R,
    ) -> Result<Assignment, BenchError> {
        loop {
            let point = uniform_point(spec, rng);
            self.draws += 1;
            if spec.is_feasible_point(&point) == inside {
                self.hits += 1;
                return Ok(point);
            }
            if self.draws.is_multiple_of(BATCH) && (self.hits as f64) < MIN_RATE * self.draws as f64 {
                return Err(BenchError::RejectionBudgetExceeded {
                    what: self.what,
                    hits: self.hits,
                    draws: self.draws,
                });
            }
        }
    }
}

/// Draws `count` labelled points: positives uniformly from the feasible
/// region, negatives uniformly from the rest of the box, each label
/// flipped with probability `outlier_ratio`. Positive samples are blurred
/// with Gaussian std `noise / √dims`.
pub fn sample_dataset<R: Rng + ?Sized>(
    spec: &ProblemSpec,
    config: &DatasetConfig,
    rng: &mut R,
) -> Result<Dataset, BenchError> {
    config.validate()?;
    let positives = (&config.pos_ratio * int(config.count as i64)).floor().to_integer();
    let positives: usize = positives.try_into().unwrap_or(config.count);
    let outlier_p = to_f64(&config.outlier_ratio);
    let blur_config = BlurConfig {
        domain: spec.domain_map(),
        mask_probability: config.mask_probability,
        sigma: to_f64(&config.noise) / (spec.dims() as f64).sqrt(),
    };
    let mut inside = Rejection {
        what: "feasible region",
        hits: 0,
        draws: 0,
    };
    let mut outside = Rejection {
        what: "region complement",
        hits: 0,
        draws: 0,
    };
    let mut samples = Vec::with_capacity(config.count);
    for k in 0..config.count {
        let truth = if k < positives {
            Label::Positive
        } else {
            Label::Negative
        };
        let point = match truth {
            Label::Positive => inside.draw(spec, true, rng)?,
            Label::Negative => outside.draw(spec, false, rng)?,
        };
        let outlier = outlier_p > 0.0 && rng.random::<f64>() < outlier_p;
        let label = if outlier { truth.flip() } else { truth };
        let blurred = match label {
            Label::Positive => Some(blur(&point, &blur_config, rng)?),
            Label::Negative => None,
        };
        samples.push(LabelledSample {
            point,
            label,
            outlier,
            blurred,
        });
    }
    Ok(Dataset {
        vocab: spec.vocab.clone(),
        samples,
    })
}

fn bound_text(b: Option<&Rational>, infinity: &str) -> String {
    b.map_or_else(|| infinity.to_string(), to_decimal_string)
}

/// `.data` text: a `# vars:` header, then `label;point;intervals` per line.
pub fn format_dataset(dataset: &Dataset) -> String {
    let vars = dataset.vocab.vars();
    let mut s = String::new();
    let names: Vec<&str> = vars.iter().map(Variable::name).collect();
    let _ = writeln!(s, "# vars: {}", names.join(","));
    for sample in &dataset.samples {
        let point: Vec<String> = if sample.point.is_empty() {
            Vec::new()
        } else {
            vars.iter()
                .map(|v| sample.point.get(v).map_or_else(String::new, to_decimal_string))
                .collect()
        };
        let intervals: Vec<String> = match &sample.blurred {
            None => Vec::new(),
            Some(phi) => vars
                .iter()
                .map(|v| {
                    let i = phi.get(v);
                    format!("{},{}", bound_text(i.lower(), "-inf"), bound_text(i.upper(), "inf"))
                })
                .collect(),
        };
        let _ = writeln!(s, "{};{};{}", sample.label, point.join(","), intervals.join(","));
    }
    s
}

fn parse_bound(token: &str, infinity: &str, line: usize) -> Result<Option<Rational>, BenchError> {
    let t = token.trim();
    if t == infinity || (infinity == "inf" && t == "+inf") {
        return Ok(None);
    }
    parse_rational(t)
        .map(Some)
        .map_err(|e| BenchError::parse(line, e.to_string()))
}

fn split_fields(field: &str) -> Vec<&str> {
    if field.trim().is_empty() {
        Vec::new()
    } else {
        field.split(',').collect()
    }
}

/// Column variables for a dataset: the `# vars:` names (interned into
/// `vocab`), else `vocab` in order, else `x1..xd`.
fn columns(header: Option<&str>, vocab: &mut Vocabulary, width: usize) -> Vec<Variable> {
    match header {
        Some(names) => names
            .split(',')
            .map(str::trim)
            .filter(|n| !n.is_empty())
            .map(|n| vocab.intern(n))
            .collect(),
        None if vocab.is_empty() => (1..=width).map(|i| vocab.intern(&format!("x{i}"))).collect(),
        None => vocab.vars().to_vec(),
    }
}

/// Parses `.data` text against `vocab` (see [`format_dataset`]).
pub fn parse_dataset(text: &str, vocab: &mut Vocabulary) -> Result<Dataset, BenchError> {
    let mut header = None;
    let mut rows = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(names) = comment.trim().strip_prefix("vars:") {
                if header.is_some() || !rows.is_empty() {
                    return Err(BenchError::parse(k + 1, "`# vars:` must come before the samples"));
                }
                header = Some(names);
            }
            continue;
        }
        if !line.is_empty() {
            rows.push((k + 1, line));
        }
    }
    let width = rows
        .first()
        .map(|(_, l)| {
            let parts: Vec<&str> = l.split(';').collect();
            let p = parts.get(1).map_or(0, |f| split_fields(f).len());
            let i = parts.get(2).map_or(0, |f| split_fields(f).len() / 2);
            p.max(i)
        })
        .unwrap_or(0);
    let cols = columns(header, vocab, width);
    let d = cols.len();

    let mut samples = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        let parts: Vec<&str> = row.split(';').collect();
        let [label, point, intervals] = parts[..] else {
            return Err(BenchError::parse(line, "expected `label;point;intervals`"));
        };
        let label = match label.trim() {
            "pos" => Label::Positive,
            "neg" => Label::Negative,
            other => return Err(BenchError::parse(line, format!("unknown label `{other}`"))),
        };
        let values = split_fields(point);
        if !values.is_empty() && values.len() != d {
            return Err(BenchError::parse(
                line,
                format!("expected {d} coordinates, got {}", values.len()),
            ));
        }
        let mut assignment = Assignment::new();
        for (v, t) in cols.iter().zip(&values) {
            let x = parse_rational(t).map_err(|e| BenchError::parse(line, e.to_string()))?;
            assignment.insert(v.clone(), x);
        }
        let bounds = split_fields(intervals);
        let blurred = if bounds.is_empty() {
            None
        } else {
            if bounds.len() != 2 * d {
                return Err(BenchError::parse(
                    line,
                    format!("expected {} interval ends, got {}", 2 * d, bounds.len()),
                ));
            }
            let mut phi = PartialInterval::new();
            for (v, pair) in cols.iter().zip(bounds.chunks(2)) {
                let lo = parse_bound(pair[0], "-inf", line)?;
                let hi = parse_bound(pair[1], "inf", line)?;
                let interval = Interval::new(lo, hi).map_err(|e| BenchError::parse(line, e.to_string()))?;
                phi.set(v, interval);
            }
            Some(phi)
        };
        samples.push(LabelledSample {
            point: assignment,
            label,
            outlier: false,
            blurred,
        });
    }
    Ok(Dataset {
        vocab: vocab.clone(),
        samples,
    })
}

pub fn write_dataset(path: impl AsRef<Path>, dataset: &Dataset) -> Result<(), BenchError> {
    let path = path.as_ref();
    std::fs::write(path, format_dataset(dataset)).map_err(|e| BenchError::io(path, e))
}

pub fn read_dataset(path: impl AsRef<Path>, vocab: &mut Vocabulary) -> Result<Dataset, BenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_dataset(&text, vocab)
}
