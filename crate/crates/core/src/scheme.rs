//! Sampling schemes: physical set generation, ranking by the auxiliary
//! variate, and per-protocol unit selection, plus a direct inverse-CDF
//! sampler used for fast Monte Carlo and as a cross-validation route.

use std::fmt;
use std::io;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::concomitant::ConcomitantLaw;
use crate::error::{Error, Result};
use crate::mtbged::{sample_pair, BivariatePair, ModelParams};

/// Cap on raw units a single physical draw may generate (protects against
/// runaway multistage budgets; the direct sampler has no such limit).
const RAW_UNIT_LIMIT: u128 = 10_000_000;

/// A sampling scheme together with its configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "snake_case")]
pub enum SchemeSpec {
    /// Balanced ranked set sampling: rank r from set r.
    Rss { n: usize },
    /// RSS with only the listed diagonal ranks measured.
    Crss { n: usize, retained: Vec<usize> },
    /// L ranked set sampling with trimming coefficient k.
    Lrss { n: usize, k: usize },
    /// Extreme RSS, even set size: alternating minima and maxima.
    Erss1 { n: usize },
    /// Extreme RSS, odd set size: final set contributes the averaged
    /// min-max pair.
    Erss2 { n: usize },
    /// Extreme RSS, odd set size: final set contributes its median.
    Erss3 { n: usize },
    /// Moving extreme RSS: n minima plus n maxima from 2n sets.
    Merss { n: usize },
    /// Single-stage unbalanced RSS: the maximum from every set.
    Urss { n: usize },
    /// Multistage unbalanced RSS with l maximum-selection stages.
    Msrss { n: usize, l: u32 },
    /// Steady-state unbalanced RSS (the l → ∞ limit; no finite protocol).
    Ussrss { n: usize },
}

impl SchemeSpec {
    /// LRSS with k = ⌊nγ⌋ for a trimming fraction 0 ≤ γ < 0.5.
    pub fn lrss_from_gamma(n: usize, gamma: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&gamma) {
            return Err(Error::OutOfRange {
                name: "gamma",
                low: 0.0,
                high: 0.5,
                value: gamma,
            });
        }
        let spec = SchemeSpec::Lrss {
            n,
            k: (n as f64 * gamma).floor() as usize,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            SchemeSpec::Rss { .. } => "rss",
            SchemeSpec::Crss { .. } => "crss",
            SchemeSpec::Lrss { .. } => "lrss",
            SchemeSpec::Erss1 { .. } => "erss1",
            SchemeSpec::Erss2 { .. } => "erss2",
            SchemeSpec::Erss3 { .. } => "erss3",
            SchemeSpec::Merss { .. } => "merss",
            SchemeSpec::Urss { .. } => "urss",
            SchemeSpec::Msrss { .. } => "msrss",
            SchemeSpec::Ussrss { .. } => "ussrss",
        }
    }

    /// The set size n.
    pub fn set_size(&self) -> usize {
        match *self {
            SchemeSpec::Rss { n }
            | SchemeSpec::Crss { n, .. }
            | SchemeSpec::Lrss { n, .. }
            | SchemeSpec::Erss1 { n }
            | SchemeSpec::Erss2 { n }
            | SchemeSpec::Erss3 { n }
            | SchemeSpec::Merss { n }
            | SchemeSpec::Urss { n }
            | SchemeSpec::Msrss { n, .. }
            | SchemeSpec::Ussrss { n } => n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.set_size();
        if n < 2 {
            return Err(Error::SetSizeTooSmall(n));
        }
        match self {
            SchemeSpec::Crss { retained, .. } => {
                if retained.is_empty() {
                    return Err(Error::InvalidScheme("retained rank list is empty".into()));
                }
                if !retained.windows(2).all(|w| w[0] < w[1]) {
                    return Err(Error::InvalidScheme(
                        "retained ranks must be strictly increasing".into(),
                    ));
                }
                if retained[0] < 1 || *retained.last().unwrap() > n {
                    return Err(Error::InvalidScheme(format!(
                        "retained ranks must lie in 1..={n}"
                    )));
                }
            }
            SchemeSpec::Lrss { k, .. } => {
                if 2 * k >= n {
                    return Err(Error::InvalidScheme(format!(
                        "LRSS coefficient k = {k} must satisfy k < n/2 for n = {n}"
                    )));
                }
            }
            SchemeSpec::Erss1 { .. } => {
                if n % 2 != 0 {
                    return Err(Error::ParityMismatch {
                        scheme: "erss1",
                        expected: "even",
                        n,
                    });
                }
            }
            SchemeSpec::Erss2 { .. } => {
                if n % 2 == 0 {
                    return Err(Error::ParityMismatch {
                        scheme: "erss2",
                        expected: "odd",
                        n,
                    });
                }
            }
            SchemeSpec::Erss3 { .. } => {
                if n % 2 == 0 {
                    return Err(Error::ParityMismatch {
                        scheme: "erss3",
                        expected: "odd",
                        n,
                    });
                }
            }
            SchemeSpec::Msrss { l, .. } => {
                if *l < 1 {
                    return Err(Error::InvalidScheme("stage count must be at least 1".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Number of observation records a drawn sample carries. The ERSS₂
    /// averaged pair is stored as two linked records, so its count is n + 1.
    pub fn observation_count(&self) -> usize {
        let n = self.set_size();
        match self {
            SchemeSpec::Crss { retained, .. } => retained.len(),
            SchemeSpec::Erss2 { .. } => n + 1,
            SchemeSpec::Merss { .. } => 2 * n,
            _ => n,
        }
    }

    /// Raw bivariate units a physical draw consumes; `None` when the scheme
    /// has no finite physical protocol.
    pub fn raw_unit_budget(&self) -> Option<u128> {
        let n = self.set_size() as u128;
        match self {
            SchemeSpec::Merss { .. } => Some(2 * n * n),
            SchemeSpec::Msrss { l, .. } => n.checked_pow(l + 1),
            SchemeSpec::Ussrss { .. } => None,
            _ => Some(n * n),
        }
    }

    /// Maximum-selection schemes are developed for positive dependence only.
    pub fn requires_positive_lambda(&self) -> bool {
        matches!(
            self,
            SchemeSpec::Urss { .. } | SchemeSpec::Msrss { .. } | SchemeSpec::Ussrss { .. }
        )
    }

    /// The (set_index, rank_label) layout of a drawn sample, in storage order.
    pub fn expected_layout(&self) -> Vec<(usize, RankLabel)> {
        let n = self.set_size();
        match self {
            SchemeSpec::Rss { .. } => (1..=n).map(|r| (r, RankLabel::Rank(r))).collect(),
            SchemeSpec::Crss { retained, .. } => {
                retained.iter().map(|&m| (m, RankLabel::Rank(m))).collect()
            }
            SchemeSpec::Lrss { k, .. } => (1..=n)
                .map(|r| (r, RankLabel::Rank(lrss_rank(n, *k, r))))
                .collect(),
            SchemeSpec::Erss1 { .. } => (1..=n)
                .map(|r| (r, if r % 2 == 1 { RankLabel::Min } else { RankLabel::Max }))
                .collect(),
            SchemeSpec::Erss2 { .. } => {
                let mut layout: Vec<_> = (1..n)
                    .map(|r| (r, if r % 2 == 1 { RankLabel::Min } else { RankLabel::Max }))
                    .collect();
                layout.push((n, RankLabel::Min));
                layout.push((n, RankLabel::Max));
                layout
            }
            SchemeSpec::Erss3 { .. } => {
                let mut layout: Vec<_> = (1..n)
                    .map(|r| (r, if r % 2 == 1 { RankLabel::Min } else { RankLabel::Max }))
                    .collect();
                layout.push((n, RankLabel::Median));
                layout
            }
            SchemeSpec::Merss { .. } => (1..=n)
                .map(|r| (r, RankLabel::Min))
                .chain((1..=n).map(|r| (n + r, RankLabel::Max)))
                .collect(),
            SchemeSpec::Urss { .. } | SchemeSpec::Msrss { .. } | SchemeSpec::Ussrss { .. } => {
                (1..=n).map(|r| (r, RankLabel::Max)).collect()
            }
        }
    }

    /// Shape coefficient of the concomitant law governing each observation,
    /// in the same order as [`SchemeSpec::expected_layout`]. `None` for
    /// ERSS₂, whose final pair is jointly (not independently) distributed.
    pub fn shape_coefficients(&self, lambda: f64) -> Result<Option<Vec<f64>>> {
        use crate::special::{delta_r, stage_ratio};
        let n = self.set_size();
        let ds = match self {
            SchemeSpec::Erss2 { .. } => return Ok(None),
            SchemeSpec::Msrss { l, .. } => {
                vec![-lambda * stage_ratio(n, *l); n]
            }
            SchemeSpec::Ussrss { .. } => vec![-lambda; n],
            _ => {
                let mut ds = Vec::with_capacity(self.observation_count());
                for (_, label) in self.expected_layout() {
                    let r = match label {
                        RankLabel::Rank(r) => r,
                        RankLabel::Min => 1,
                        RankLabel::Max => n,
                        RankLabel::Median => (n + 1) / 2,
                    };
                    ds.push(delta_r(n, r, lambda)?);
                }
                ds
            }
        };
        Ok(Some(ds))
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::Crss { n, retained } => {
                let list: Vec<String> = retained.iter().map(|m| m.to_string()).collect();
                write!(f, "crss(n={n}, retained={})", list.join(","))
            }
            SchemeSpec::Lrss { n, k } => write!(f, "lrss(n={n}, k={k})"),
            SchemeSpec::Msrss { n, l } => write!(f, "msrss(n={n}, l={l})"),
            other => write!(f, "{}(n={})", other.name(), other.set_size()),
        }
    }
}

/// LRSS rank selection: the first k sets take rank k+1, the middle sets the
/// diagonal rank, the last k sets rank n−k.
fn lrss_rank(n: usize, k: usize, set: usize) -> usize {
    if set <= k {
        k + 1
    } else if set <= n - k {
        set
    } else {
        n - k
    }
}

/// Rank provenance of a measured observation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankLabel {
    Rank(usize),
    Min,
    Max,
    Median,
}

impl fmt::Display for RankLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankLabel::Rank(r) => write!(f, "{r}"),
            RankLabel::Min => write!(f, "min"),
            RankLabel::Max => write!(f, "max"),
            RankLabel::Median => write!(f, "median"),
        }
    }
}

impl FromStr for RankLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(RankLabel::Min),
            "max" => Ok(RankLabel::Max),
            "median" => Ok(RankLabel::Median),
            other => other
                .parse::<usize>()
                .map(RankLabel::Rank)
                .map_err(|_| Error::CsvSchema(format!("unrecognized rank label {other:?}"))),
        }
    }
}

impl Serialize for RankLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RankLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One measured study-variate observation with its rank provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub set_index: usize,
    #[serde(rename = "rank_label")]
    pub rank: RankLabel,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
}

/// The measured observations produced by one execution of a scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSample {
    pub scheme: SchemeSpec,
    pub observations: Vec<Observation>,
}

impl RankedSample {
    /// Wrap observations, checking they follow the scheme's layout.
    pub fn new(scheme: SchemeSpec, observations: Vec<Observation>) -> Result<Self> {
        scheme.validate()?;
        let layout = scheme.expected_layout();
        if observations.len() != layout.len() {
            return Err(Error::MalformedSample(format!(
                "{} expects {} observations, got {}",
                scheme,
                layout.len(),
                observations.len()
            )));
        }
        for (obs, (set_index, rank)) in observations.iter().zip(&layout) {
            if obs.set_index != *set_index || obs.rank != *rank {
                return Err(Error::MalformedSample(format!(
                    "observation (set {}, rank {}) does not match the {} layout entry (set {}, rank {})",
                    obs.set_index, obs.rank, scheme, set_index, rank
                )));
            }
        }
        Ok(RankedSample {
            scheme,
            observations,
        })
    }

    pub fn ys(&self) -> impl Iterator<Item = f64> + '_ {
        self.observations.iter().map(|o| o.y)
    }

    /// CSV with the fixed column order `set_index,rank_label,y,x`.
    pub fn write_csv<W: io::Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        wtr.write_record(["set_index", "rank_label", "y", "x"])?;
        for o in &self.observations {
            wtr.write_record(&[
                o.set_index.to_string(),
                o.rank.to_string(),
                o.y.to_string(),
                o.x.map(|x| x.to_string()).unwrap_or_default(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Parse CSV written by [`RankedSample::write_csv`], validating the
    /// header and the scheme layout.
    pub fn read_csv<R: io::Read>(scheme: SchemeSpec, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["set_index", "rank_label", "y", "x"];
        let got: Vec<&str> = headers.iter().collect();
        if got != expected {
            return Err(Error::CsvSchema(format!(
                "expected header {expected:?}, got {got:?}"
            )));
        }
        let mut observations = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let field = |i: usize| record.get(i).unwrap_or("");
            let set_index: usize = field(0)
                .parse()
                .map_err(|_| Error::CsvSchema(format!("bad set_index {:?}", field(0))))?;
            let rank: RankLabel = field(1).parse()?;
            let y: f64 = field(2)
                .parse()
                .map_err(|_| Error::CsvSchema(format!("bad y value {:?}", field(2))))?;
            let x = match field(3) {
                "" => None,
                s => Some(
                    s.parse::<f64>()
                        .map_err(|_| Error::CsvSchema(format!("bad x value {s:?}")))?,
                ),
            };
            observations.push(Observation {
                set_index,
                rank,
                y,
                x,
            });
        }
        RankedSample::new(scheme, observations)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sample serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sample: RankedSample =
            serde_json::from_str(text).map_err(|e| Error::MalformedSample(e.to_string()))?;
        RankedSample::new(sample.scheme, sample.observations)
    }
}

fn check_lambda_for(spec: &SchemeSpec, params: &ModelParams) -> Result<()> {
    if spec.requires_positive_lambda() && params.lambda() <= 0.0 {
        return Err(Error::LambdaNotPositive(params.lambda()));
    }
    Ok(())
}

/// Concomitant of the rank-th smallest auxiliary value in the set.
fn select_rank(set: &[BivariatePair], rank: usize) -> BivariatePair {
    debug_assert!(rank >= 1 && rank <= set.len());
    if rank == 1 {
        return *set
            .iter()
            .min_by(|a, b| a.x.total_cmp(&b.x))
            .expect("nonempty set");
    }
    if rank == set.len() {
        return *set
            .iter()
            .max_by(|a, b| a.x.total_cmp(&b.x))
            .expect("nonempty set");
    }
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&i, &j| set[i].x.total_cmp(&set[j].x));
    set[order[rank - 1]]
}

fn draw_set<R: Rng + ?Sized>(size: usize, params: &ModelParams, rng: &mut R) -> Vec<BivariatePair> {
    (0..size).map(|_| sample_pair(params, rng)).collect()
}

/// Execute the scheme physically: generate raw bivariate sets, rank each by
/// the auxiliary variate, and measure the protocol's selections.
///
/// USSRSS has no finite physical protocol and delegates to [`draw_direct`].
/// The stream is consumed set by set in storage order, so observations from
/// distinct sets never share draws.
pub fn draw<R: Rng + ?Sized>(
    spec: &SchemeSpec,
    params: &ModelParams,
    rng: &mut R,
) -> Result<RankedSample> {
    Ok(draw_traced(spec, params, rng)?.0)
}

/// [`draw`] that also returns every raw set it generated, for structural
/// validation of the selection protocol.
pub fn draw_traced<R: Rng + ?Sized>(
    spec: &SchemeSpec,
    params: &ModelParams,
    rng: &mut R,
) -> Result<(RankedSample, Vec<Vec<BivariatePair>>)> {
    spec.validate()?;
    check_lambda_for(spec, params)?;
    if let Some(budget) = spec.raw_unit_budget() {
        if budget > RAW_UNIT_LIMIT {
            return Err(Error::DrawBudgetExceeded {
                units: budget,
                limit: RAW_UNIT_LIMIT,
            });
        }
    }

    let n = spec.set_size();
    let mut sets: Vec<Vec<BivariatePair>> = Vec::new();
    let mut observations = Vec::with_capacity(spec.observation_count());
    let mut push = |set_index: usize, rank: RankLabel, pair: BivariatePair| {
        observations.push(Observation {
            set_index,
            rank,
            y: pair.y,
            x: Some(pair.x),
        });
    };

    match spec {
        SchemeSpec::Rss { .. } => {
            for r in 1..=n {
                let set = draw_set(n, params, rng);
                push(r, RankLabel::Rank(r), select_rank(&set, r));
                sets.push(set);
            }
        }
        SchemeSpec::Crss { retained, .. } => {
            // all n sets are generated; only the retained diagonal entries
            // are measured
            for r in 1..=n {
                let set = draw_set(n, params, rng);
                if retained.contains(&r) {
                    push(r, RankLabel::Rank(r), select_rank(&set, r));
                }
                sets.push(set);
            }
        }
        SchemeSpec::Lrss { k, .. } => {
            for r in 1..=n {
                let set = draw_set(n, params, rng);
                let rank = lrss_rank(n, *k, r);
                push(r, RankLabel::Rank(rank), select_rank(&set, rank));
                sets.push(set);
            }
        }
        SchemeSpec::Erss1 { .. } => {
            for r in 1..=n {
                let set = draw_set(n, params, rng);
                if r % 2 == 1 {
                    push(r, RankLabel::Min, select_rank(&set, 1));
                } else {
                    push(r, RankLabel::Max, select_rank(&set, n));
                }
                sets.push(set);
            }
        }
        SchemeSpec::Erss2 { .. } => {
            for r in 1..n {
                let set = draw_set(n, params, rng);
                if r % 2 == 1 {
                    push(r, RankLabel::Min, select_rank(&set, 1));
                } else {
                    push(r, RankLabel::Max, select_rank(&set, n));
                }
                sets.push(set);
            }
            // the final set contributes both extremes as a linked pair
            let set = draw_set(n, params, rng);
            push(n, RankLabel::Min, select_rank(&set, 1));
            push(n, RankLabel::Max, select_rank(&set, n));
            sets.push(set);
        }
        SchemeSpec::Erss3 { .. } => {
            for r in 1..n {
                let set = draw_set(n, params, rng);
                if r % 2 == 1 {
                    push(r, RankLabel::Min, select_rank(&set, 1));
                } else {
                    push(r, RankLabel::Max, select_rank(&set, n));
                }
                sets.push(set);
            }
            let set = draw_set(n, params, rng);
            push(n, RankLabel::Median, select_rank(&set, (n + 1) / 2));
            sets.push(set);
        }
        SchemeSpec::Merss { .. } => {
            for r in 1..=n {
                let set = draw_set(n, params, rng);
                push(r, RankLabel::Min, select_rank(&set, 1));
                sets.push(set);
            }
            for r in 1..=n {
                let set = draw_set(n, params, rng);
                push(n + r, RankLabel::Max, select_rank(&set, n));
                sets.push(set);
            }
        }
        SchemeSpec::Urss { .. } => {
            for r in 1..=n {
                let set = draw_set(n, params, rng);
                push(r, RankLabel::Max, select_rank(&set, n));
                sets.push(set);
            }
        }
        SchemeSpec::Msrss { l, .. } => {
            // maximum selection at every stage keeps exactly the overall
            // maximum of the nˡ units feeding one final observation, so the
            // flat pool and the staged tournament select the same unit
            let pool = (n as u64).pow(*l) as usize;
            for r in 1..=n {
                let set = draw_set(pool, params, rng);
                push(r, RankLabel::Max, select_rank(&set, pool));
                sets.push(set);
            }
        }
        SchemeSpec::Ussrss { .. } => {
            return Ok((draw_direct(spec, params, rng)?, Vec::new()));
        }
    }

    let sample = RankedSample {
        scheme: spec.clone(),
        observations,
    };
    debug_assert!(RankedSample::new(sample.scheme.clone(), sample.observations.clone()).is_ok());
    Ok((sample, sets))
}

/// Literal stage-by-stage execution of the multistage maximum scheme,
/// kept as a validation route for [`draw`]'s flat-pool shortcut.
pub fn draw_msrss_staged<R: Rng + ?Sized>(
    n: usize,
    l: u32,
    params: &ModelParams,
    rng: &mut R,
) -> Result<RankedSample> {
    let spec = SchemeSpec::Msrss { n, l };
    spec.validate()?;
    check_lambda_for(&spec, params)?;
    let budget = spec.raw_unit_budget().unwrap_or(u128::MAX);
    if budget > RAW_UNIT_LIMIT {
        return Err(Error::DrawBudgetExceeded {
            units: budget,
            limit: RAW_UNIT_LIMIT,
        });
    }
    let mut observations = Vec::with_capacity(n);
    for r in 1..=n {
        let mut units = draw_set((n as u64).pow(l) as usize, params, rng);
        while units.len() > 1 {
            units = units
                .chunks(n)
                .map(|set| select_rank(set, set.len()))
                .collect();
        }
        observations.push(Observation {
            set_index: r,
            rank: RankLabel::Max,
            y: units[0].y,
            x: Some(units[0].x),
        });
    }
    Ok(RankedSample {
        scheme: spec,
        observations,
    })
}

/// Sample each observation directly from its concomitant law by inverse
/// CDF, bypassing physical set construction. Statistically identical to
/// [`draw`] for every scheme whose observations are independent; ERSS₂ is
/// rejected because its final min-max pair is dependent.
pub fn draw_direct<R: Rng + ?Sized>(
    spec: &SchemeSpec,
    params: &ModelParams,
    rng: &mut R,
) -> Result<RankedSample> {
    spec.validate()?;
    check_lambda_for(spec, params)?;
    let ds = spec
        .shape_coefficients(params.lambda())?
        .ok_or_else(|| Error::UnsupportedDirectDraw(spec.name().into()))?;
    let layout = spec.expected_layout();
    let mut observations = Vec::with_capacity(layout.len());
    for ((set_index, rank), d) in layout.into_iter().zip(ds) {
        let law = ConcomitantLaw::new(params.alpha2(), params.theta2(), d)?;
        observations.push(Observation {
            set_index,
            rank,
            y: law.sample(rng),
            x: None,
        });
    }
    Ok(RankedSample {
        scheme: spec.clone(),
        observations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamFactory;

    fn params(lambda: f64) -> ModelParams {
        ModelParams::new(1.0, 1.0, 1.0, 1.0, lambda).unwrap()
    }

    #[test]
    fn validation_rules() {
        assert!(SchemeSpec::Rss { n: 1 }.validate().is_err());
        assert!(SchemeSpec::Rss { n: 2 }.validate().is_ok());
        assert!(SchemeSpec::Crss { n: 3, retained: vec![] }.validate().is_err());
        assert!(SchemeSpec::Crss { n: 3, retained: vec![2, 2] }.validate().is_err());
        assert!(SchemeSpec::Crss { n: 3, retained: vec![2, 4] }.validate().is_err());
        assert!(SchemeSpec::Crss { n: 3, retained: vec![2, 3] }.validate().is_ok());
        assert!(SchemeSpec::Lrss { n: 4, k: 2 }.validate().is_err());
        assert!(SchemeSpec::Lrss { n: 5, k: 2 }.validate().is_ok());
        assert!(SchemeSpec::Erss1 { n: 3 }.validate().is_err());
        assert!(SchemeSpec::Erss2 { n: 4 }.validate().is_err());
        assert!(SchemeSpec::Erss3 { n: 4 }.validate().is_err());
        assert!(SchemeSpec::Msrss { n: 2, l: 0 }.validate().is_err());
    }

    #[test]
    fn lrss_gamma_constructor() {
        assert_eq!(
            SchemeSpec::lrss_from_gamma(5, 0.4).unwrap(),
            SchemeSpec::Lrss { n: 5, k: 2 }
        );
        assert_eq!(
            SchemeSpec::lrss_from_gamma(5, 0.0).unwrap(),
            SchemeSpec::Lrss { n: 5, k: 0 }
        );
        assert!(SchemeSpec::lrss_from_gamma(5, 0.5).is_err());
        assert!(SchemeSpec::lrss_from_gamma(5, -0.1).is_err());
    }

    #[test]
    fn rss_layout_is_diagonal() {
        let sample = draw(&SchemeSpec::Rss { n: 3 }, &params(0.5), &mut StreamFactory::new(1).stream(0)).unwrap();
        assert_eq!(sample.observations.len(), 3);
        for (i, obs) in sample.observations.iter().enumerate() {
            assert_eq!(obs.set_index, i + 1);
            assert_eq!(obs.rank, RankLabel::Rank(i + 1));
            assert!(obs.x.is_some());
        }
    }

    #[test]
    fn crss_layout_keeps_retained_ranks() {
        let spec = SchemeSpec::Crss { n: 3, retained: vec![2, 3] };
        let sample = draw(&spec, &params(1.0), &mut StreamFactory::new(2).stream(0)).unwrap();
        assert_eq!(sample.observations.len(), 2);
        assert_eq!(sample.observations[0].rank, RankLabel::Rank(2));
        assert_eq!(sample.observations[1].rank, RankLabel::Rank(3));
    }

    #[test]
    fn observation_counts() {
        assert_eq!(SchemeSpec::Rss { n: 4 }.observation_count(), 4);
        assert_eq!(SchemeSpec::Erss2 { n: 5 }.observation_count(), 6);
        assert_eq!(SchemeSpec::Merss { n: 3 }.observation_count(), 6);
        assert_eq!(
            SchemeSpec::Crss { n: 4, retained: vec![1, 3] }.observation_count(),
            2
        );
    }

    #[test]
    fn draw_follows_protocol_selections() {
        let factory = StreamFactory::new(77);
        for spec in [
            SchemeSpec::Rss { n: 4 },
            SchemeSpec::Lrss { n: 5, k: 2 },
            SchemeSpec::Erss1 { n: 4 },
            SchemeSpec::Erss2 { n: 5 },
            SchemeSpec::Erss3 { n: 5 },
            SchemeSpec::Merss { n: 3 },
            SchemeSpec::Urss { n: 3 },
            SchemeSpec::Msrss { n: 2, l: 2 },
        ] {
            let mut rng = factory.stream(0);
            let (sample, sets) = draw_traced(&spec, &params(0.8), &mut rng).unwrap();
            let mut set_iter = sets.iter();
            let mut current = set_iter.next().unwrap();
            let mut last_set_index = sample.observations[0].set_index;
            for obs in &sample.observations {
                if obs.set_index != last_set_index {
                    current = set_iter.next().unwrap();
                    last_set_index = obs.set_index;
                }
                let rank = match obs.rank {
                    RankLabel::Rank(r) => r,
                    RankLabel::Min => 1,
                    RankLabel::Max => current.len(),
                    RankLabel::Median => (current.len() + 1) / 2,
                };
                let selected = select_rank(current, rank);
                assert_eq!(obs.y, selected.y, "{spec} selection mismatch");
                assert_eq!(obs.x, Some(selected.x));
            }
        }
    }

    #[test]
    fn erss2_final_pair_is_linked() {
        let spec = SchemeSpec::Erss2 { n: 5 };
        let (sample, sets) = draw_traced(&spec, &params(1.0), &mut StreamFactory::new(5).stream(0)).unwrap();
        let pair: Vec<&Observation> = sample
            .observations
            .iter()
            .filter(|o| o.set_index == 5)
            .collect();
        assert_eq!(pair.len(), 2);
        assert_eq!(pair[0].rank, RankLabel::Min);
        assert_eq!(pair[1].rank, RankLabel::Max);
        let last = sets.last().unwrap();
        assert_eq!(pair[0].y, select_rank(last, 1).y);
        assert_eq!(pair[1].y, select_rank(last, 5).y);
    }

    #[test]
    fn unbalanced_schemes_reject_nonpositive_lambda() {
        let mut rng = StreamFactory::new(3).stream(0);
        for spec in [
            SchemeSpec::Urss { n: 3 },
            SchemeSpec::Msrss { n: 2, l: 2 },
            SchemeSpec::Ussrss { n: 3 },
        ] {
            assert_eq!(
                draw(&spec, &params(0.0), &mut rng),
                Err(Error::LambdaNotPositive(0.0))
            );
            assert!(draw_direct(&spec, &params(-0.5), &mut rng).is_err());
        }
    }

    #[test]
    fn erss2_direct_draw_unsupported() {
        let mut rng = StreamFactory::new(4).stream(0);
        assert_eq!(
            draw_direct(&SchemeSpec::Erss2 { n: 3 }, &params(1.0), &mut rng),
            Err(Error::UnsupportedDirectDraw("erss2".into()))
        );
    }

    #[test]
    fn msrss_budget_guard() {
        let mut rng = StreamFactory::new(4).stream(0);
        let spec = SchemeSpec::Msrss { n: 10, l: 7 };
        assert!(matches!(
            draw(&spec, &params(0.5), &mut rng),
            Err(Error::DrawBudgetExceeded { .. })
        ));
        // the direct sampler has no budget limit
        assert!(draw_direct(&spec, &params(0.5), &mut rng).is_ok());
    }

    #[test]
    fn msrss_staged_equals_flat_pool() {
        // maximum selection commutes with staging, so with a shared stream
        // both paths must select the identical unit
        let factory = StreamFactory::new(11);
        let flat = draw(
            &SchemeSpec::Msrss { n: 3, l: 2 },
            &params(0.9),
            &mut factory.stream(7),
        )
        .unwrap();
        let staged = draw_msrss_staged(3, 2, &params(0.9), &mut factory.stream(7)).unwrap();
        assert_eq!(flat, staged);
    }

    #[test]
    fn csv_roundtrip() {
        let spec = SchemeSpec::Rss { n: 3 };
        let sample = draw(&spec, &params(0.4), &mut StreamFactory::new(8).stream(0)).unwrap();
        let mut buf = Vec::new();
        sample.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("set_index,rank_label,y,x\n"));
        let back = RankedSample::read_csv(spec, &buf[..]).unwrap();
        assert_eq!(back, sample);
    }

    #[test]
    fn csv_schema_errors() {
        let spec = SchemeSpec::Rss { n: 2 };
        let missing = "set_index,y,x\n1,0.5,\n2,0.6,\n";
        assert!(matches!(
            RankedSample::read_csv(spec.clone(), missing.as_bytes()),
            Err(Error::CsvSchema(_))
        ));
        let bad_label = "set_index,rank_label,y,x\n1,first,0.5,\n2,2,0.6,\n";
        assert!(matches!(
            RankedSample::read_csv(spec.clone(), bad_label.as_bytes()),
            Err(Error::CsvSchema(_))
        ));
        let wrong_layout = "set_index,rank_label,y,x\n1,2,0.5,\n2,1,0.6,\n";
        assert!(matches!(
            RankedSample::read_csv(spec, wrong_layout.as_bytes()),
            Err(Error::MalformedSample(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let spec = SchemeSpec::Msrss { n: 2, l: 3 };
        let sample = draw(&spec, &params(0.7), &mut StreamFactory::new(9).stream(0)).unwrap();
        let text = sample.to_json();
        assert_eq!(RankedSample::from_json(&text).unwrap(), sample);
    }
}
