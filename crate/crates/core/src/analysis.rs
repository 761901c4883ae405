//! Dialect-geography analyses over a distance matrix: mean distance to all
//! other dialects, and distances to two reference languages.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::distance::language_distance;
use crate::error::{Error, Result};
use crate::fixtures::{DialectRegistry, RegionGroup};
use crate::matrix::DistanceMatrix;
use crate::wordlist::WordList;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageEntry {
    pub language_id: String,
    pub mean_distance: f64,
    /// 1 is the smallest mean.
    pub rank: usize,
    /// Other languages with exactly the same mean.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tied_with: Vec<String>,
}

/// Entries in matrix label order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AverageDistanceReport {
    pub entries: Vec<AverageEntry>,
}

impl AverageDistanceReport {
    pub fn get(&self, language_id: &str) -> Option<&AverageEntry> {
        self.entries.iter().find(|e| e.language_id == language_id)
    }

    /// Entries sorted by rank.
    pub fn ranked(&self) -> Vec<&AverageEntry> {
        let mut v: Vec<&AverageEntry> = self.entries.iter().collect();
        v.sort_by_key(|e| e.rank);
        v
    }
}

/// Mean of each row over the other N-1 languages, ranked ascending. Equal
/// means are ordered by language id and listed in `tied_with`.
pub fn average_distances(m: &DistanceMatrix) -> Result<AverageDistanceReport> {
    let n = m.len();
    if n < 2 {
        return Err(Error::TooFew {
            what: "languages",
            needed: 2,
            got: n,
        });
    }
    let means: Vec<f64> = (0..n).map(|i| m.row(i).iter().sum::<f64>() / (n - 1) as f64).collect();
    let labels = m.labels();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| means[a].total_cmp(&means[b]).then_with(|| labels[a].cmp(&labels[b])));
    let mut rank = vec![0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r + 1;
    }
    let entries = (0..n)
        .map(|i| AverageEntry {
            language_id: labels[i].clone(),
            mean_distance: means[i],
            rank: rank[i],
            tied_with: (0..n)
                .filter(|&j| j != i && means[j] == means[i])
                .map(|j| labels[j].clone())
                .collect(),
        })
        .collect();
    Ok(AverageDistanceReport { entries })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefRecord {
    pub language_id: String,
    pub d_ref1: f64,
    pub d_ref2: f64,
    /// `d_ref1 / d_ref2`; `None` when `d_ref2` is zero.
    pub ratio: Option<f64>,
    pub slots_ref1: usize,
    pub slots_ref2: usize,
}

/// Per-dialect distances to two reference languages. The ratio is always
/// reference 1 over reference 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RefComparison {
    pub ref1: String,
    pub ref2: String,
    pub records: Vec<RefRecord>,
}

impl RefComparison {
    /// Records whose ratio is undefined.
    pub fn flagged(&self) -> impl Iterator<Item = &RefRecord> {
        self.records.iter().filter(|r| r.ratio.is_none())
    }
}

pub fn reference_comparison(dialects: &[WordList], ref1: &WordList, ref2: &WordList) -> Result<RefComparison> {
    let records = dialects
        .iter()
        .map(|d| {
            let a = language_distance(d, ref1)?;
            let b = language_distance(d, ref2)?;
            Ok(RefRecord {
                language_id: d.language_id().to_owned(),
                d_ref1: a.value,
                d_ref2: b.value,
                ratio: (b.value > 0.0).then(|| a.value / b.value),
                slots_ref1: a.slots_compared,
                slots_ref2: b.slots_compared,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RefComparison {
        ref1: ref1.language_id().to_owned(),
        ref2: ref2.language_id().to_owned(),
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Dominance {
    /// Every dialect is closer to reference 2 than any dialect is to reference 1.
    pub holds: bool,
    /// `min(d_ref1) - max(d_ref2)`.
    pub margin: f64,
}

pub fn dominance_check(rc: &RefComparison) -> Result<Dominance> {
    if rc.records.is_empty() {
        return Err(Error::TooFew {
            what: "dialects",
            needed: 1,
            got: 0,
        });
    }
    let min_ref1 = rc.records.iter().map(|r| r.d_ref1).fold(f64::INFINITY, f64::min);
    let max_ref2 = rc.records.iter().map(|r| r.d_ref2).fold(f64::NEG_INFINITY, f64::max);
    Ok(Dominance {
        holds: max_ref2 < min_ref1,
        margin: min_ref1 - max_ref2,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomelandCandidate {
    pub language_id: String,
    pub mean_distance: f64,
    pub rank: usize,
    pub town: String,
    pub region: RegionGroup,
}

/// The `k` languages with the smallest mean distance, annotated from the
/// registry.
pub fn homeland_candidates(
    report: &AverageDistanceReport,
    registry: &DialectRegistry,
    k: usize,
) -> Result<Vec<HomelandCandidate>> {
    let n = report.entries.len();
    if k == 0 || k > n {
        return Err(Error::contract(format!("k must lie in 1..={n}, got {k}")));
    }
    report
        .ranked()
        .into_iter()
        .take(k)
        .map(|e| {
            let d = registry
                .by_label(&e.language_id)
                .ok_or_else(|| Error::contract(format!("{:?} is not in the registry", e.language_id)))?;
            Ok(HomelandCandidate {
                language_id: e.language_id.clone(),
                mean_distance: e.mean_distance,
                rank: e.rank,
                town: d.town.clone(),
                region: d.region,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupRatio {
    pub region: RegionGroup,
    pub count: usize,
    pub mean_ratio: f64,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Ratio summaries per region group, for records whose language id is a
/// registry label and whose ratio is defined.
pub fn group_ratio_summary(rc: &RefComparison, registry: &DialectRegistry) -> Vec<GroupRatio> {
    let mut by_group: BTreeMap<RegionGroup, Vec<f64>> = BTreeMap::new();
    for r in &rc.records {
        if let (Some(d), Some(ratio)) = (registry.by_label(&r.language_id), r.ratio) {
            by_group.entry(d.region).or_default().push(ratio);
        }
    }
    by_group
        .into_iter()
        .map(|(region, v)| GroupRatio {
            region,
            count: v.len(),
            mean_ratio: v.iter().sum::<f64>() / v.len() as f64,
            min_ratio: v.iter().copied().fold(f64::INFINITY, f64::min),
            max_ratio: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect()
}

/// Rounds to the 6 decimal digits used in report files.
pub fn round6(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct AverageRow<'a> {
    language_id: &'a str,
    town: &'a str,
    mean_distance: f64,
    rank: usize,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    tied_with: &'a [String],
}

fn average_rows<'a>(report: &'a AverageDistanceReport, registry: &'a DialectRegistry) -> Vec<AverageRow<'a>> {
    report
        .ranked()
        .into_iter()
        .map(|e| AverageRow {
            language_id: &e.language_id,
            town: registry.by_label(&e.language_id).map_or("", |d| d.town.as_str()),
            mean_distance: round6(e.mean_distance),
            rank: e.rank,
            tied_with: &e.tied_with,
        })
        .collect()
}

/// `languageId,town,meanDistance,rank`, one row per language in rank order.
/// Towns come from the registry and are blank for unknown labels.
pub fn averages_csv(report: &AverageDistanceReport, registry: &DialectRegistry) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["languageId", "town", "meanDistance", "rank"])?;
    for r in average_rows(report, registry) {
        w.write_record([
            r.language_id.to_owned(),
            r.town.to_owned(),
            format!("{:.6}", r.mean_distance),
            r.rank.to_string(),
        ])?;
    }
    finish_csv(w)
}

pub fn averages_json(report: &AverageDistanceReport, registry: &DialectRegistry) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&average_rows(report, registry))?;
    s.push('\n');
    Ok(s)
}

/// `languageId,d<ref1>,d<ref2>,ratio`; the ratio cell is blank when undefined.
pub fn refcomp_csv(rc: &RefComparison, ref1_name: &str, ref2_name: &str) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "languageId".to_owned(),
        format!("d{ref1_name}"),
        format!("d{ref2_name}"),
        "ratio".to_owned(),
    ])?;
    for r in &rc.records {
        w.write_record([
            r.language_id.clone(),
            format!("{:.6}", r.d_ref1),
            format!("{:.6}", r.d_ref2),
            r.ratio.map(|x| format!("{x:.6}")).unwrap_or_default(),
        ])?;
    }
    finish_csv(w)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RefRow<'a> {
    language_id: &'a str,
    d_ref1: f64,
    d_ref2: f64,
    ratio: Option<f64>,
    slots_ref1: usize,
    slots_ref2: usize,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RefReport<'a> {
    ref1: &'a str,
    ref2: &'a str,
    ref1_name: &'a str,
    ref2_name: &'a str,
    orientation: String,
    records: Vec<RefRow<'a>>,
    dominance: Option<Dominance>,
    groups: Vec<GroupRatio>,
}

pub fn refcomp_json(
    rc: &RefComparison,
    ref1_name: &str,
    ref2_name: &str,
    registry: &DialectRegistry,
) -> Result<String> {
    let dominance = dominance_check(rc).ok().map(|d| Dominance {
        holds: d.holds,
        margin: round6(d.margin),
    });
    let groups = group_ratio_summary(rc, registry)
        .into_iter()
        .map(|g| GroupRatio {
            mean_ratio: round6(g.mean_ratio),
            min_ratio: round6(g.min_ratio),
            max_ratio: round6(g.max_ratio),
            ..g
        })
        .collect();
    let report = RefReport {
        ref1: &rc.ref1,
        ref2: &rc.ref2,
        ref1_name,
        ref2_name,
        orientation: format!("ratio = d{ref1_name} / d{ref2_name}"),
        records: rc
            .records
            .iter()
            .map(|r| RefRow {
                language_id: &r.language_id,
                d_ref1: round6(r.d_ref1),
                d_ref2: round6(r.d_ref2),
                ratio: r.ratio.map(round6),
                slots_ref1: r.slots_ref1,
                slots_ref2: r.slots_ref2,
            })
            .collect(),
        dominance,
        groups,
    };
    let mut s = serde_json::to_string_pretty(&report)?;
    s.push('\n');
    Ok(s)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
