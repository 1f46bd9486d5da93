//! KDD Cup 1999 connection records: parsing, categorical vocabularies,
//! attack taxonomy and numeric encoding.

use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::str::FromStr;

use flate2::read::GzDecoder;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Dataset, FeatureId, ScalingParams};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const N_FEATURES: usize = 41;
pub const N_FIELDS: usize = N_FEATURES + 1;

pub const FEATURE_NAMES: [&str; N_FEATURES] = [
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    Binary,
    Categorical,
}

/// Kind of the column at 0-based position `col`.
pub fn column_kind(col: usize) -> ColumnKind {
    match FEATURE_NAMES[col] {
        "protocol_type" | "service" | "flag" => ColumnKind::Categorical,
        "land" | "logged_in" | "is_host_login" | "is_guest_login" => ColumnKind::Binary,
        _ => ColumnKind::Continuous,
    }
}

/// One connection record: 41 feature tokens followed by the label token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRecord {
    pub line: u64,
    fields: Vec<String>,
}

impl RawRecord {
    pub fn new(line: u64, mut fields: Vec<String>) -> Result<Self> {
        if fields.len() != N_FIELDS {
            return Err(Error::Parse {
                line,
                message: format!("expected {N_FIELDS} fields, found {}", fields.len()),
            });
        }
        let label = fields.last_mut().unwrap();
        let trimmed = label.trim().trim_end_matches('.').to_owned();
        if trimmed.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty label".into(),
            });
        }
        *label = trimmed;
        Ok(RawRecord { line, fields })
    }

    pub fn features(&self) -> &[String] {
        &self.fields[..N_FEATURES]
    }

    pub fn label(&self) -> &str {
        &self.fields[N_FEATURES]
    }
}

pub fn parse_kdd<R: Read>(reader: R) -> Result<Vec<RawRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        out.push(RawRecord::new(line, record.iter().map(str::to_owned).collect())?);
    }
    Ok(out)
}

/// Reads a KDD file, transparently decompressing gzip input.
pub fn read_kdd_file(path: impl AsRef<Path>) -> Result<Vec<RawRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let is_gzip = reader
        .fill_buf()
        .map_err(|e| Error::io(path, e))?
        .starts_with(&[0x1f, 0x8b]);
    if is_gzip {
        parse_kdd(GzDecoder::new(reader))
    } else {
        parse_kdd(reader)
    }
}

/// Attack categories with their fixed label codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttackCategory {
    Dos,
    U2r,
    R2l,
    Probe,
}

impl AttackCategory {
    pub fn code(self) -> u8 {
        match self {
            AttackCategory::Dos => 1,
            AttackCategory::U2r => 2,
            AttackCategory::R2l => 3,
            AttackCategory::Probe => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            1 => AttackCategory::Dos,
            2 => AttackCategory::U2r,
            3 => AttackCategory::R2l,
            4 => AttackCategory::Probe,
            _ => return None,
        })
    }
}

impl FromStr for AttackCategory {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "dos" => Ok(AttackCategory::Dos),
            "u2r" => Ok(AttackCategory::U2r),
            "r2l" => Ok(AttackCategory::R2l),
            "probe" => Ok(AttackCategory::Probe),
            other => Err(format!("unknown attack category `{other}`")),
        }
    }
}

const DEFAULT_ATTACK_MAP: &str = include_str!("attack_map.txt");

/// Attack name to category lookup.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AttackMap(BTreeMap<String, AttackCategory>);

impl Default for AttackMap {
    fn default() -> Self {
        AttackMap::parse(DEFAULT_ATTACK_MAP).expect("built-in attack map is well formed")
    }
}

impl AttackMap {
    /// Parses `attack_name,category` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: n as u64 + 1,
                message,
            };
            let (name, category) = line
                .split_once(',')
                .ok_or_else(|| err("expected `attack_name,category`".into()))?;
            let category = category.parse().map_err(err)?;
            map.insert(name.trim().trim_end_matches('.').to_owned(), category);
        }
        Ok(AttackMap(map))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        AttackMap::parse(&text)
    }

    pub fn get(&self, attack: &str) -> Option<AttackCategory> {
        self.0.get(attack).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// normal -> 0, known attack -> its category code.
    pub fn label_code(&self, label: &str) -> Option<u8> {
        if label == "normal" {
            Some(0)
        } else {
            self.get(label).map(AttackCategory::code)
        }
    }
}

/// Column kinds, categorical vocabularies and the attack map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub kinds: Vec<ColumnKind>,
    /// Keyed by column name; values in descending frequency order.
    pub vocabularies: BTreeMap<String, Vec<String>>,
    pub attack_map: AttackMap,
}

impl Schema {
    pub fn vocabulary(&self, column: &str) -> Option<&[String]> {
        self.vocabularies.get(column).map(Vec::as_slice)
    }
}

pub fn build_schema(records: &[RawRecord], attack_map: AttackMap) -> Result<Schema> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let kinds: Vec<ColumnKind> = (0..N_FEATURES).map(column_kind).collect();
    let mut vocabularies = BTreeMap::new();
    for (col, kind) in kinds.iter().enumerate() {
        if *kind != ColumnKind::Categorical {
            continue;
        }
        let mut freq: HashMap<&str, usize> = HashMap::new();
        for r in records {
            *freq.entry(r.features()[col].as_str()).or_default() += 1;
        }
        let mut values: Vec<(&str, usize)> = freq.into_iter().collect();
        // descending frequency, ties alphabetical
        values.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
        vocabularies.insert(
            FEATURE_NAMES[col].to_owned(),
            values.into_iter().map(|(v, _)| v.to_owned()).collect(),
        );
    }
    Ok(Schema {
        kinds,
        vocabularies,
        attack_map,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Encode categorical values missing from the vocabulary as 0.
    pub allow_unknown: bool,
}

/// Encoded dataset plus the unknown categorical values that were mapped to 0.
#[derive(Debug, Clone)]
pub struct Encoded {
    pub dataset: Dataset,
    pub unknown_values: BTreeMap<(String, String), usize>,
}

/// Encoded values, label code and the unseen categoricals of one record.
type Row = (Vec<f64>, u8, Vec<(usize, String)>);

pub fn encode(records: &[RawRecord], schema: &Schema, opts: EncodeOptions) -> Result<Encoded> {
    let lookups: Vec<Option<HashMap<&str, f64>>> = (0..N_FEATURES)
        .map(|col| {
            schema.vocabulary(FEATURE_NAMES[col]).map(|vocab| {
                vocab
                    .iter()
                    .enumerate()
                    .map(|(rank, v)| (v.as_str(), (rank + 1) as f64))
                    .collect()
            })
        })
        .collect();

    let rows: Vec<Row> = records
        .par_iter()
        .map(|r| encode_record(r, schema, &lookups, opts))
        .collect::<Result<_>>()?;

    let mut data = Vec::with_capacity(rows.len() * N_FEATURES);
    let mut labels = Vec::with_capacity(rows.len());
    let mut unknown_values = BTreeMap::new();
    for (values, label, unknown) in rows {
        data.extend(values);
        labels.push(label);
        for (col, value) in unknown {
            *unknown_values
                .entry((FEATURE_NAMES[col].to_owned(), value))
                .or_insert(0) += 1;
        }
    }
    for ((column, value), count) in &unknown_values {
        log::warn!("{column}: {count} rows with unseen value `{value}` encoded as 0");
    }
    let features = Matrix::new(labels.len(), N_FEATURES, data)?;
    let dataset = Dataset::new(
        features,
        labels,
        (1..=N_FEATURES).map(FeatureId).collect(),
        FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
    )?;
    Ok(Encoded {
        dataset,
        unknown_values,
    })
}

fn encode_record(
    record: &RawRecord,
    schema: &Schema,
    lookups: &[Option<HashMap<&str, f64>>],
    opts: EncodeOptions,
) -> Result<Row> {
    let mut values = Vec::with_capacity(N_FEATURES);
    let mut unknown = Vec::new();
    for (col, tok) in record.features().iter().enumerate() {
        let encode_err = || Error::Encode {
            column: FEATURE_NAMES[col].to_owned(),
            value: tok.clone(),
        };
        let v = match (schema.kinds[col], &lookups[col]) {
            (ColumnKind::Categorical, Some(lookup)) => match lookup.get(tok.as_str()) {
                Some(&code) => code,
                None if opts.allow_unknown => {
                    unknown.push((col, tok.clone()));
                    0.0
                }
                None => return Err(encode_err()),
            },
            (ColumnKind::Categorical, None) => return Err(encode_err()),
            (ColumnKind::Binary, _) => match tok.parse::<f64>() {
                Ok(v) if v == 0.0 || v == 1.0 => v,
                _ => return Err(encode_err()),
            },
            (ColumnKind::Continuous, _) => match tok.parse::<f64>() {
                Ok(v) if v.is_finite() => v,
                _ => return Err(encode_err()),
            },
        };
        values.push(v);
    }
    let label = schema
        .attack_map
        .label_code(record.label())
        .ok_or_else(|| Error::UnknownLabel {
            line: record.line,
            label: record.label().to_owned(),
        })?;
    Ok((values, label, unknown))
}

/// Everything needed to preprocess further KDD files the same way as the
/// training file: vocabularies, attack map and the fitted scaling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preprocessor {
    pub schema: Schema,
    pub scaling: ScalingParams,
}

impl Preprocessor {
    /// Builds the schema and scaling from training records.
    pub fn fit(records: &[RawRecord], attack_map: AttackMap) -> Result<(Self, Dataset)> {
        let schema = build_schema(records, attack_map)?;
        let encoded = encode(records, &schema, EncodeOptions::default())?;
        let scaling = ScalingParams::fit(&encoded.dataset);
        let scaled = scaling.apply(&encoded.dataset)?;
        Ok((Preprocessor { schema, scaling }, scaled))
    }

    /// Encodes (unseen categoricals -> 0) and scales records with fitted params.
    pub fn transform(&self, records: &[RawRecord]) -> Result<Dataset> {
        let encoded = encode(records, &self.schema, EncodeOptions { allow_unknown: true })?;
        self.scaling.apply(&encoded.dataset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn line(protocol: &str, service: &str, flag: &str, label: &str) -> String {
        let mut f: Vec<String> = vec!["0".into(); N_FIELDS];
        f[1] = protocol.into();
        f[2] = service.into();
        f[3] = flag.into();
        f[4] = "181".into();
        f[5] = "5450".into();
        f[N_FEATURES] = label.into();
        f.join(",")
    }

    #[test]
    fn parses_record_and_strips_trailing_period() {
        let text = line("tcp", "http", "SF", "normal.");
        let recs = parse_kdd(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].label(), "normal");
        assert_eq!(recs[0].features().len(), 41);
        assert_eq!(recs[0].features()[2], "http");
    }

    #[test]
    fn empty_input_is_empty() {
        assert!(parse_kdd("".as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn short_line_reports_line_number() {
        let text = format!(
            "{}\n0,1,2,3,4,5,6,7,8,normal.\n",
            line("tcp", "http", "SF", "normal.")
        );
        match parse_kdd(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn vocabularies_by_descending_frequency() {
        let text = [
            line("udp", "private", "SF", "normal."),
            line("tcp", "http", "SF", "normal."),
            line("tcp", "http", "REJ", "smurf."),
            line("icmp", "ecr_i", "SF", "smurf."),
            line("tcp", "http", "SF", "neptune."),
        ]
        .join("\n");
        let recs = parse_kdd(text.as_bytes()).unwrap();
        let schema = build_schema(&recs, AttackMap::default()).unwrap();
        assert_eq!(
            schema.vocabulary("protocol_type").unwrap(),
            &["tcp", "icmp", "udp"]
        );
        assert_eq!(schema.vocabulary("flag").unwrap(), &["SF", "REJ"]);

        let ds = encode(&recs, &schema, EncodeOptions::default()).unwrap().dataset;
        assert_eq!(ds.features().get(1, 1), 1.0); // tcp
        assert_eq!(ds.labels(), &[0, 0, 1, 1, 1]);
        assert_eq!(ds.features().get(0, 4), 181.0);
    }

    #[test]
    fn single_record_vocabularies_have_size_one() {
        let recs = parse_kdd(line("tcp", "http", "SF", "normal.").as_bytes()).unwrap();
        let schema = build_schema(&recs, AttackMap::default()).unwrap();
        assert_eq!(schema.vocabularies.len(), 3);
        assert!(schema.vocabularies.values().all(|v| v.len() == 1));
    }

    #[test]
    fn unknown_categorical_is_error_or_zero() {
        let train = parse_kdd(line("tcp", "http", "SF", "normal.").as_bytes()).unwrap();
        let test = parse_kdd(line("tcp", "gopher", "SF", "normal.").as_bytes()).unwrap();
        let schema = build_schema(&train, AttackMap::default()).unwrap();
        match encode(&test, &schema, EncodeOptions::default()) {
            Err(Error::Encode { column, value }) => {
                assert_eq!(column, "service");
                assert_eq!(value, "gopher");
            }
            other => panic!("unexpected {other:?}"),
        }
        let enc = encode(&test, &schema, EncodeOptions { allow_unknown: true }).unwrap();
        assert_eq!(enc.dataset.features().get(0, 2), 0.0);
        assert_eq!(enc.unknown_values.len(), 1);
    }

    #[test]
    fn unparsable_numeric_is_error() {
        let bad = line("tcp", "http", "SF", "normal.").replacen("181", "abc", 1);
        let recs = parse_kdd(bad.as_bytes()).unwrap();
        let schema = build_schema(&recs, AttackMap::default()).unwrap();
        assert!(matches!(
            encode(&recs, &schema, EncodeOptions::default()),
            Err(Error::Encode { .. })
        ));
    }

    #[test]
    fn unknown_label_is_error() {
        let recs = parse_kdd(line("tcp", "http", "SF", "martian.").as_bytes()).unwrap();
        let schema = build_schema(&recs, AttackMap::default()).unwrap();
        assert!(matches!(
            encode(&recs, &schema, EncodeOptions::default()),
            Err(Error::UnknownLabel { .. })
        ));
    }

    #[test]
    fn default_attack_map_round_trips_codes() {
        let map = AttackMap::default();
        assert_eq!(map.label_code("normal"), Some(0));
        assert_eq!(map.label_code("smurf"), Some(1));
        assert_eq!(map.label_code("buffer_overflow"), Some(2));
        assert_eq!(map.label_code("guess_passwd"), Some(3));
        assert_eq!(map.label_code("portsweep"), Some(4));
        for attack in ["smurf", "rootkit", "warezclient", "satan"] {
            let cat = map.get(attack).unwrap();
            assert_eq!(AttackCategory::from_code(cat.code()), Some(cat));
        }
    }

    #[test]
    fn attack_map_file_syntax() {
        let map = AttackMap::parse("# comment\nfoo,DoS\n\nbar , probe # trailing\n").unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map.get("bar"), Some(AttackCategory::Probe));
        match AttackMap::parse("ok,dos\nbaz,flood\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn column_kinds_match_layout() {
        assert_eq!(column_kind(1), ColumnKind::Categorical);
        assert_eq!(column_kind(6), ColumnKind::Binary);
        assert_eq!(column_kind(11), ColumnKind::Binary);
        assert_eq!(column_kind(4), ColumnKind::Continuous);
        assert_eq!(FEATURE_NAMES[23], "srv_count");
    }
}
