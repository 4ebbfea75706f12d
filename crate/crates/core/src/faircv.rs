//! Synthetic resume profiles with controllable demographic bias.
//!
//! Each profile has a gender `g` (0 = male, 1 = female), an ethnic group `e`
//! (0, 1, 2) and twelve integer merits `i1..i12`. Three raw scores share the
//! merit term `Σ α_k · i_k` and differ only in the demographic offset β:
//! none, per-gender, or per-ethnic-group. Raw scores are cut into four
//! classes `0..=3` by three edges.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mvl::{Schema, Transition, Variable};

pub const N_MERITS: usize = 12;
pub const N_CLASSES: u32 = 4;
pub const TARGET_NAME: &str = "scores";
/// `i1` is education and `i2` experience, both `0..=5`; the rest are `0..=4`.
pub const DEFAULT_MERIT_MAX: [u32; N_MERITS] = [5, 5, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4];
/// Records per independently seeded generation chunk.
const CHUNK: usize = 1024;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("merit weights must be non-negative and sum to 1 (sum = {0})")]
    Alphas(f64),
    #[error("score edges must be finite and strictly increasing: {0:?}")]
    Edges([f64; 3]),
    #[error("invalid generator setting: {0}")]
    Config(String),
    #[error("raw scores are required but the dataset has none")]
    MissingRaw,
    #[error("unknown scenario `{0}` (expected s1..s11)")]
    UnknownScenario(String),
    #[error("dataset CSV: {0}")]
    Csv(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for SynthError {
    fn from(e: csv::Error) -> Self {
        SynthError::Csv(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub n_records: usize,
    pub alphas: [f64; N_MERITS],
    /// Offsets for (male, female).
    pub beta_gender: [f64; 2],
    /// Offsets for ethnic groups 0, 1, 2.
    pub beta_ethnicity: [f64; 3],
    /// Probability that `i3`/`i7` of a male profile is shifted up by one.
    pub correlation: f64,
    pub seed: u64,
    /// Score edges; `None` uses the quartiles of the unbiased raw scores.
    pub quantile_edges: Option<[f64; 3]>,
    pub merit_max: [u32; N_MERITS],
}

/// Weights `(k + 12) / 222`: near-uniform but distinct, so the weighted merit
/// sum takes hundreds of distinct values and quartile cuts stay balanced.
pub fn default_alphas() -> [f64; N_MERITS] {
    std::array::from_fn(|k| (k as f64 + 13.0) / 222.0)
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n_records: 24_000,
            alphas: default_alphas(),
            beta_gender: [0.2, 0.0],
            beta_ethnicity: [0.0, 0.15, 0.3],
            correlation: 0.3,
            seed: 0,
            quantile_edges: None,
            merit_max: DEFAULT_MERIT_MAX,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let sum: f64 = self.alphas.iter().sum();
        if self.alphas.iter().any(|a| !a.is_finite() || *a < 0.0) || (sum - 1.0).abs() > 1e-9 {
            return Err(SynthError::Alphas(sum));
        }
        if let Some(edges) = self.quantile_edges {
            check_edges(&edges)?;
        }
        if self.n_records == 0 {
            return Err(SynthError::Config("n_records must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.correlation) {
            return Err(SynthError::Config(format!("correlation {} outside [0, 1]", self.correlation)));
        }
        if self.beta_gender.iter().chain(&self.beta_ethnicity).any(|b| !b.is_finite()) {
            return Err(SynthError::Config("non-finite bias offset".into()));
        }
        Ok(())
    }
}

fn check_edges(edges: &[f64; 3]) -> Result<(), SynthError> {
    if edges.iter().all(|e| e.is_finite()) && edges[0] < edges[1] && edges[1] < edges[2] {
        Ok(())
    } else {
        Err(SynthError::Edges(*edges))
    }
}

/// Which score a run is trained and explained on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BiasMode {
    #[serde(alias = "none")]
    Unbiased,
    Gender,
    Ethnicity,
}

impl BiasMode {
    pub fn index(self) -> usize {
        match self {
            BiasMode::Unbiased => 0,
            BiasMode::Gender => 1,
            BiasMode::Ethnicity => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            BiasMode::Unbiased => "none",
            BiasMode::Gender => "gender",
            BiasMode::Ethnicity => "ethnicity",
        }
    }
}

/// The protected attribute a scenario includes as a feature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Demographic {
    Gender,
    Ethnicity,
}

impl Demographic {
    pub fn attribute(self) -> &'static str {
        match self {
            Demographic::Gender => "g",
            Demographic::Ethnicity => "e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawScores {
    pub unbiased: f64,
    pub gender: f64,
    pub ethnicity: f64,
}

impl RawScores {
    pub fn get(&self, mode: BiasMode) -> f64 {
        match mode {
            BiasMode::Unbiased => self.unbiased,
            BiasMode::Gender => self.gender,
            BiasMode::Ethnicity => self.ethnicity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRecord {
    pub gender: u32,
    pub ethnicity: u32,
    pub merits: [u32; N_MERITS],
    pub raw: Option<RawScores>,
    /// Discretized (unbiased, gender-biased, ethnicity-biased) scores.
    pub scores: [u32; 3],
}

impl CvRecord {
    pub fn score(&self, mode: BiasMode) -> u32 {
        self.scores[mode.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub records: Vec<CvRecord>,
    pub merit_max: [u32; N_MERITS],
}

fn quantize(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

fn generate_chunk(cfg: &GenConfig, chunk: usize, len: usize) -> Vec<CvRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(chunk as u64);
    (0..len)
        .map(|_| {
            let gender = rng.random_range(0..2u32);
            let ethnicity = rng.random_range(0..3u32);
            let mut merits: [u32; N_MERITS] = std::array::from_fn(|k| rng.random_range(0..=cfg.merit_max[k]));
            for k in [2, 6] {
                let shift = rng.random::<f64>() < cfg.correlation;
                if gender == 0 && shift {
                    merits[k] = (merits[k] + 1).min(cfg.merit_max[k]);
                }
            }
            let base: f64 = cfg.alphas.iter().zip(&merits).map(|(a, &v)| a * f64::from(v)).sum();
            let raw = RawScores {
                unbiased: quantize(base),
                gender: quantize(cfg.beta_gender[gender as usize] + base),
                ethnicity: quantize(cfg.beta_ethnicity[ethnicity as usize] + base),
            };
            CvRecord { gender, ethnicity, merits, raw: Some(raw), scores: [0; 3] }
        })
        .collect()
}

/// Generates `cfg.n_records` profiles and discretizes their scores.
///
/// Records are produced in fixed-size chunks, each drawn from its own
/// ChaCha stream of `cfg.seed`, so the output does not depend on how many
/// threads generate it.
pub fn generate(cfg: &GenConfig) -> Result<Dataset, SynthError> {
    cfg.validate()?;
    let chunks = cfg.n_records.div_ceil(CHUNK);
    let records: Vec<CvRecord> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| generate_chunk(cfg, c, CHUNK.min(cfg.n_records - c * CHUNK)))
        .collect();
    discretize_scores(Dataset { records, merit_max: cfg.merit_max }, cfg.quantile_edges)
}

/// Quartile cut points (nearest-rank) of `values`.
pub fn quartile_edges(values: &[f64]) -> [f64; 3] {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    std::array::from_fn(|k| {
        let rank = ((k + 1) * n).div_ceil(4).max(1);
        sorted[rank - 1]
    })
}

/// Number of edges strictly below `raw`.
pub fn score_class(raw: f64, edges: &[f64; 3]) -> u32 {
    edges.iter().filter(|&&e| e < raw).count() as u32
}

/// Recomputes the three discrete scores from the raw ones. Without explicit
/// edges the quartiles of the unbiased raw scores are used for all three.
pub fn discretize_scores(mut dataset: Dataset, edges: Option<[f64; 3]>) -> Result<Dataset, SynthError> {
    let raws: Vec<RawScores> = dataset
        .records
        .iter()
        .map(|r| r.raw.ok_or(SynthError::MissingRaw))
        .collect::<Result<_, _>>()?;
    let edges = match edges {
        Some(e) => e,
        None => quartile_edges(&raws.iter().map(|r| r.unbiased).collect::<Vec<_>>()),
    };
    // Quartiles of heavily tied data can coincide; those edges are still
    // usable as cut points.
    if edges.iter().any(|e| !e.is_finite()) || edges[0] > edges[1] || edges[1] > edges[2] {
        return Err(SynthError::Edges(edges));
    }
    for (rec, raw) in dataset.records.iter_mut().zip(&raws) {
        rec.scores = [
            score_class(raw.unbiased, &edges),
            score_class(raw.gender, &edges),
            score_class(raw.ethnicity, &edges),
        ];
    }
    Ok(dataset)
}

/// One of the nested input sets `s1..s11`: the protected attribute plus
/// merits `i1..i(k+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    index: u8,
    pub demographic: Demographic,
}

impl Scenario {
    pub fn new(index: u8, demographic: Demographic) -> Result<Self, SynthError> {
        if (1..=11).contains(&index) {
            Ok(Scenario { index, demographic })
        } else {
            Err(SynthError::UnknownScenario(format!("s{index}")))
        }
    }

    pub fn parse(id: &str, demographic: Demographic) -> Result<Self, SynthError> {
        let index = id
            .strip_prefix('s')
            .and_then(|n| n.parse::<u8>().ok())
            .ok_or_else(|| SynthError::UnknownScenario(id.to_string()))?;
        Scenario::new(index, demographic).map_err(|_| SynthError::UnknownScenario(id.to_string()))
    }

    pub fn index(&self) -> u8 {
        self.index
    }

    pub fn id(&self) -> String {
        format!("s{}", self.index)
    }

    /// Zero-based merit indices used as inputs.
    pub fn merits(&self) -> std::ops::Range<usize> {
        0..usize::from(self.index) + 1
    }

    /// Feature names in schema order.
    pub fn feature_names(&self) -> Vec<String> {
        std::iter::once(self.demographic.attribute().to_string())
            .chain(self.merits().map(|k| format!("i{}", k + 1)))
            .collect()
    }
}

pub fn scenario_schema(dataset: &Dataset, scenario: &Scenario) -> Schema {
    let demographic = match scenario.demographic {
        Demographic::Gender => Variable::range("g", 1),
        Demographic::Ethnicity => Variable::range("e", 2),
    };
    let features = std::iter::once(demographic)
        .chain(scenario.merits().map(|k| Variable::range(format!("i{}", k + 1), dataset.merit_max[k])))
        .collect();
    Schema::new(features, vec![Variable::range(TARGET_NAME, N_CLASSES - 1)]).expect("scenario schema is well formed")
}

/// Feature values of a record under a scenario, in schema order.
pub fn scenario_features(rec: &CvRecord, scenario: &Scenario) -> Vec<u32> {
    let demographic = match scenario.demographic {
        Demographic::Gender => rec.gender,
        Demographic::Ethnicity => rec.ethnicity,
    };
    std::iter::once(demographic).chain(scenario.merits().map(|k| rec.merits[k])).collect()
}

/// One transition per record (duplicates kept) with the selected score as
/// the single target.
pub fn build_scenario(dataset: &Dataset, scenario: &Scenario, mode: BiasMode) -> (Schema, Vec<Transition>) {
    let schema = scenario_schema(dataset, scenario);
    let ts = dataset
        .records
        .iter()
        .map(|r| Transition::new(scenario_features(r, scenario), vec![r.score(mode)]))
        .collect();
    (schema, ts)
}

const SCORE_COLS: [&str; 3] = ["score_u", "score_g", "score_e"];
const RAW_COLS: [&str; 3] = ["raw_u", "raw_g", "raw_e"];

/// Writes `g,e,i1..i12,score_u,score_g,score_e` and, with `include_raw`,
/// `raw_u,raw_g,raw_e` with six decimals.
pub fn write_dataset_csv<W: Write>(dataset: &Dataset, include_raw: bool, out: W) -> Result<(), SynthError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = vec!["g".into(), "e".into()];
    header.extend((1..=N_MERITS).map(|k| format!("i{k}")));
    header.extend(SCORE_COLS.iter().map(|s| s.to_string()));
    if include_raw {
        header.extend(RAW_COLS.iter().map(|s| s.to_string()));
    }
    w.write_record(&header)?;
    for r in &dataset.records {
        let mut row: Vec<String> = vec![r.gender.to_string(), r.ethnicity.to_string()];
        row.extend(r.merits.iter().map(u32::to_string));
        row.extend(r.scores.iter().map(u32::to_string));
        if include_raw {
            let raw = r.raw.ok_or(SynthError::MissingRaw)?;
            row.extend([raw.unbiased, raw.gender, raw.ethnicity].iter().map(|x| format!("{x:.6}")));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset_csv<R: Read>(input: R) -> Result<Dataset, SynthError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| SynthError::Csv(format!("missing column `{name}`")))
    };
    let g = col("g")?;
    let e = col("e")?;
    let merit_cols: Vec<usize> = (1..=N_MERITS).map(|k| col(&format!("i{k}"))).collect::<Result<_, _>>()?;
    let score_cols: Vec<usize> = SCORE_COLS.iter().map(|c| col(c)).collect::<Result<_, _>>()?;
    let raw_cols: Option<Vec<usize>> = RAW_COLS.iter().map(|c| col(c).ok()).collect();

    let mut merit_max = DEFAULT_MERIT_MAX;
    let mut records = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let at = |i: usize| -> Result<&str, SynthError> {
            row.get(i).ok_or_else(|| SynthError::Csv(format!("row {}: missing field", line + 2)))
        };
        let int = |i: usize| -> Result<u32, SynthError> {
            let s = at(i)?;
            s.trim().parse().map_err(|_| SynthError::Csv(format!("row {}: `{s}` is not an integer", line + 2)))
        };
        let real = |i: usize| -> Result<f64, SynthError> {
            let s = at(i)?;
            s.trim().parse().map_err(|_| SynthError::Csv(format!("row {}: `{s}` is not a number", line + 2)))
        };
        let gender = int(g)?;
        let ethnicity = int(e)?;
        if gender > 1 || ethnicity > 2 {
            return Err(SynthError::Csv(format!("row {}: demographic value out of range", line + 2)));
        }
        let mut merits = [0u32; N_MERITS];
        for (k, &c) in merit_cols.iter().enumerate() {
            merits[k] = int(c)?;
            merit_max[k] = merit_max[k].max(merits[k]);
        }
        let mut scores = [0u32; 3];
        for (k, &c) in score_cols.iter().enumerate() {
            scores[k] = int(c)?;
            if scores[k] >= N_CLASSES {
                return Err(SynthError::Csv(format!("row {}: score {} out of range", line + 2, scores[k])));
            }
        }
        let raw = match &raw_cols {
            Some(c) => Some(RawScores { unbiased: real(c[0])?, gender: real(c[1])?, ethnicity: real(c[2])? }),
            None => None,
        };
        records.push(CvRecord { gender, ethnicity, merits, raw, scores });
    }
    Ok(Dataset { records, merit_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(n: usize, seed: u64) -> GenConfig {
        GenConfig { n_records: n, seed, ..GenConfig::default() }
    }

    fn zero_record(cfg: &GenConfig, gender: u32, ethnicity: u32) -> RawScores {
        let base = 0.0;
        RawScores {
            unbiased: quantize(base),
            gender: quantize(cfg.beta_gender[gender as usize] + base),
            ethnicity: quantize(cfg.beta_ethnicity[ethnicity as usize] + base),
        }
    }

    #[test]
    fn offsets_on_zero_merits() {
        let cfg = GenConfig::default();
        assert_eq!(zero_record(&cfg, 1, 0).unbiased, 0.0);
        assert_eq!(zero_record(&cfg, 0, 0).gender, 0.2);
        assert_eq!(zero_record(&cfg, 1, 0).gender, 0.0);
        assert_eq!(zero_record(&cfg, 0, 2).ethnicity, 0.3);
        assert_eq!(zero_record(&cfg, 0, 1).ethnicity, 0.15);
    }

    #[test]
    fn generated_scores_follow_the_linear_model() {
        let cfg = GenConfig { correlation: 0.0, ..small(500, 3) };
        let ds = generate(&cfg).unwrap();
        for r in &ds.records {
            let base: f64 = cfg.alphas.iter().zip(&r.merits).map(|(a, &v)| a * f64::from(v)).sum();
            let raw = r.raw.unwrap();
            assert!((raw.unbiased - base).abs() <= 5e-7);
            assert!((raw.gender - base - cfg.beta_gender[r.gender as usize]).abs() <= 5e-7);
            assert!((raw.ethnicity - base - cfg.beta_ethnicity[r.ethnicity as usize]).abs() <= 5e-7);
            for (k, &m) in r.merits.iter().enumerate() {
                assert!(m <= cfg.merit_max[k]);
            }
        }
    }

    #[test]
    fn validation() {
        let mut cfg = small(10, 0);
        cfg.alphas[0] += 0.1;
        assert!(matches!(generate(&cfg), Err(SynthError::Alphas(_))));
        let cfg = GenConfig { quantile_edges: Some([1.0, 1.0, 2.0]), ..small(10, 0) };
        assert!(matches!(generate(&cfg), Err(SynthError::Edges(_))));
        let cfg = GenConfig { correlation: 1.5, ..small(10, 0) };
        assert!(matches!(generate(&cfg), Err(SynthError::Config(_))));
    }

    #[test]
    fn score_class_counts_edges_strictly_below() {
        let edges = [1.0, 2.0, 3.0];
        assert_eq!(score_class(0.5, &edges), 0);
        assert_eq!(score_class(1.0, &edges), 0);
        assert_eq!(score_class(1.5, &edges), 1);
        assert_eq!(score_class(3.5, &edges), 3);
    }

    #[test]
    fn default_edges_balance_classes() {
        let ds = generate(&small(2000, 11)).unwrap();
        let mut counts = [0usize; 4];
        for r in &ds.records {
            counts[r.score(BiasMode::Unbiased) as usize] += 1;
        }
        for c in counts {
            let share = c as f64 / 2000.0;
            assert!((share - 0.25).abs() <= 0.02, "{counts:?}");
        }
    }

    #[test]
    fn determinism_and_chunk_independence() {
        let a = generate(&small(3000, 5)).unwrap();
        let b = generate(&small(3000, 5)).unwrap();
        assert_eq!(a, b);
        // A prefix of a larger run equals the smaller run chunk for chunk.
        let big = generate(&GenConfig { quantile_edges: Some([1.0, 2.0, 3.0]), ..small(3000, 5) }).unwrap();
        let part = generate(&GenConfig { quantile_edges: Some([1.0, 2.0, 3.0]), ..small(CHUNK, 5) }).unwrap();
        assert_eq!(&big.records[..CHUNK], &part.records[..]);
        let other = generate(&small(3000, 6)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn correlation_shifts_male_i3_i7_only() {
        let base = generate(&GenConfig { correlation: 0.0, ..small(4000, 9) }).unwrap();
        let shifted = generate(&GenConfig { correlation: 1.0, ..small(4000, 9) }).unwrap();
        for (a, b) in base.records.iter().zip(&shifted.records) {
            assert_eq!((a.gender, a.ethnicity), (b.gender, b.ethnicity));
            for k in 0..N_MERITS {
                let expect = if a.gender == 0 && (k == 2 || k == 6) {
                    (a.merits[k] + 1).min(4)
                } else {
                    a.merits[k]
                };
                assert_eq!(b.merits[k], expect);
            }
        }
    }

    #[test]
    fn scenarios_are_nested() {
        for k in 1..11u8 {
            let a = Scenario::new(k, Demographic::Gender).unwrap().feature_names();
            let b = Scenario::new(k + 1, Demographic::Gender).unwrap().feature_names();
            assert_eq!(&b[..a.len()], &a[..]);
            assert_eq!(b.len(), a.len() + 1);
        }
        assert_eq!(Scenario::parse("s1", Demographic::Gender).unwrap().feature_names(), ["g", "i1", "i2"]);
        let s11 = Scenario::parse("s11", Demographic::Gender).unwrap().feature_names();
        assert_eq!(s11.len(), 13);
        assert_eq!(s11.last().unwrap(), "i12");
        assert!(Scenario::parse("s12", Demographic::Gender).is_err());
        assert!(Scenario::parse("x3", Demographic::Gender).is_err());
    }

    #[test]
    fn scenario_transitions() {
        let ds = generate(&small(300, 2)).unwrap();
        let s1 = Scenario::parse("s1", Demographic::Gender).unwrap();
        let (schema, ts) = build_scenario(&ds, &s1, BiasMode::Gender);
        let names: Vec<&str> = schema.features().iter().map(|v| v.name.as_str()).collect();
        assert_eq!(names, ["g", "i1", "i2"]);
        assert_eq!(schema.targets()[0].name, "scores");
        assert_eq!(ts.len(), 300);
        for (t, r) in ts.iter().zip(&ds.records) {
            schema.check_transition(t).unwrap();
            assert_eq!(t.targets.values(), &[r.scores[1]]);
        }
        let s4e = Scenario::parse("s4", Demographic::Ethnicity).unwrap();
        let (schema, _) = build_scenario(&ds, &s4e, BiasMode::Unbiased);
        assert_eq!(schema.features()[0].name, "e");
        assert_eq!(schema.features().len(), 6);
    }

    #[test]
    fn csv_round_trip() {
        let ds = generate(&small(50, 8)).unwrap();
        let mut buf = Vec::new();
        write_dataset_csv(&ds, true, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("g,e,i1,i2,i3,i4,i5,i6,i7,i8,i9,i10,i11,i12,score_u,score_g,score_e,raw_u,raw_g,raw_e\n"));
        let back = read_dataset_csv(&buf[..]).unwrap();
        assert_eq!(back, ds);

        let mut lean = Vec::new();
        write_dataset_csv(&ds, false, &mut lean).unwrap();
        let back = read_dataset_csv(&lean[..]).unwrap();
        assert!(back.records.iter().all(|r| r.raw.is_none()));
        assert!(matches!(discretize_scores(back, None), Err(SynthError::MissingRaw)));
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let text = "g,e,i1,i2,i3,i4,i5,i6,i7,i8,i9,i10,i11,i12,score_u,score_g,score_e\n\
                    0,0,1,1,1,1,1,1,1,1,1,1,1,1,9,0,0\n";
        assert!(matches!(read_dataset_csv(text.as_bytes()), Err(SynthError::Csv(_))));
        assert!(matches!(read_dataset_csv("g,e\n0,0\n".as_bytes()), Err(SynthError::Csv(_))));
    }
}
