//! Seeded synthetic-corpus generator with planted ground truth.
//!
//! Stands in for corpora that cannot be shared, at realistic scale
//! (~2000 features, ~6000 trouble reports, 19 subsystems, a biannual to
//! monthly release-cadence switch mid-timeline). Every draw flows from
//! one master seed through named streams, so regenerating with the same
//! seed is byte-identical and adding entities never perturbs unrelated
//! draws.
//!
//! Planted structure the tests recover later: feature archetypes with
//! distinct change footprints (one diffuse, DBSCAN-unclusterable), one
//! high-fault-rate "causal" archetype, the pre-release detection
//! fraction, and the early post-release detection fraction.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    bundle_from_records, CommitRecord, CorpusBundle, FeatureRecord, Release, TroubleReport,
};
use crate::rng::Rng;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synth config: {0}")]
    InvalidConfig(String),
}

/// First month of the synthetic timeline; month 24 lands on 2015-07,
/// matching the mid-2015 cadence switch the defaults mimic.
pub const TIMELINE_START: (i32, u32) = (2013, 7);

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchetypeSpec {
    pub name: String,
    /// Mixture weight (relative).
    pub weight: f64,
    /// Subsystem index -> expected per-feature files changed there.
    pub footprint: BTreeMap<usize, f64>,
    /// Expected trouble reports per feature.
    pub fault_rate: f64,
    pub dev_time_mean: f64,
    pub dev_time_spread: f64,
    /// Diffuse archetypes redraw their support per feature (planted noise).
    pub diffuse: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_features: usize,
    pub n_subsystems: usize,
    pub n_systems: usize,
    pub months: usize,
    /// Month index at which releases switch from biannual to monthly.
    pub cadence_switch_month: usize,
    pub cluster_archetypes: Vec<ArchetypeSpec>,
    /// Probability a report is dated before its release.
    pub pre_release_detect_prob: f64,
    /// Probability a post-release report lands within 122 days.
    pub early_post_prob: f64,
    /// AR(1) coefficient of the release-level fault-mass factor.
    pub inflow_ar_coefficient: f64,
    /// Noise scale of the AR(1) factor.
    pub inflow_ar_sigma: f64,
    /// Importance-class mix for classes 1..5; sums to 1.
    pub importance_class_weights: [f64; 5],
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            n_features: 2000,
            n_subsystems: 19,
            n_systems: 5,
            months: 48,
            cadence_switch_month: 24,
            cluster_archetypes: default_archetypes(),
            pre_release_detect_prob: 0.63,
            early_post_prob: 0.58,
            inflow_ar_coefficient: 0.6,
            inflow_ar_sigma: 0.05,
            importance_class_weights: [0.10, 0.20, 0.30, 0.25, 0.15],
        }
    }
}

/// Four structured archetypes on disjoint subsystem supports plus one
/// diffuse scattered archetype. "core-hot" is the planted causal
/// archetype: its fault rate dwarfs the others.
pub fn default_archetypes() -> Vec<ArchetypeSpec> {
    let footprint = |pairs: &[(usize, f64)]| pairs.iter().copied().collect::<BTreeMap<_, _>>();
    vec![
        ArchetypeSpec {
            name: "small-ui".to_string(),
            weight: 0.30,
            footprint: footprint(&[(0, 130.0), (1, 90.0)]),
            fault_rate: 0.5,
            dev_time_mean: 20.0,
            dev_time_spread: 6.0,
            diffuse: false,
        },
        ArchetypeSpec {
            name: "core-hot".to_string(),
            weight: 0.25,
            footprint: footprint(&[(4, 420.0), (5, 300.0)]),
            fault_rate: 11.0,
            dev_time_mean: 45.0,
            dev_time_spread: 10.0,
            diffuse: false,
        },
        ArchetypeSpec {
            name: "io-heavy".to_string(),
            weight: 0.20,
            footprint: footprint(&[(8, 900.0), (9, 700.0), (10, 500.0)]),
            fault_rate: 0.8,
            dev_time_mean: 30.0,
            dev_time_spread: 8.0,
            diffuse: false,
        },
        ArchetypeSpec {
            name: "platform".to_string(),
            weight: 0.15,
            footprint: footprint(&[(12, 1800.0), (13, 1400.0), (14, 1100.0), (15, 800.0)]),
            fault_rate: 0.3,
            dev_time_mean: 60.0,
            dev_time_spread: 15.0,
            diffuse: false,
        },
        ArchetypeSpec {
            name: "scattered".to_string(),
            weight: 0.10,
            footprint: BTreeMap::new(),
            fault_rate: 0.6,
            dev_time_mean: 35.0,
            dev_time_spread: 20.0,
            diffuse: true,
        },
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArchetypeSummary {
    pub id: usize,
    pub name: String,
    pub fault_rate: f64,
    pub dev_time_mean: f64,
    pub member_count: usize,
    pub diffuse: bool,
}

/// Everything the corpus files do not reveal: the oracle for tests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    pub archetype_of: BTreeMap<String, usize>,
    pub archetypes: Vec<ArchetypeSummary>,
    /// Archetype with the highest fault rate.
    pub causal_archetype: usize,
    pub pre_release_detect_prob: f64,
    pub early_post_prob: f64,
    pub release_calendar: Vec<(String, NaiveDate)>,
    pub biannual_release_count: usize,
}

fn month_start(month: usize) -> NaiveDate {
    let total = TIMELINE_START.1 as usize - 1 + month;
    let year = TIMELINE_START.0 + (total / 12) as i32;
    let m = (total % 12) as u32 + 1;
    NaiveDate::from_ymd_opt(year, m, 1).expect("valid synthetic month")
}

fn month_end(month: usize) -> NaiveDate {
    month_start(month + 1).pred_opt().expect("valid month end")
}

fn days_in_month(month: usize) -> i64 {
    (month_end(month) - month_start(month)).num_days() + 1
}

/// Release months: every sixth month-end before the switch, every month
/// from the switch on.
fn release_months(config: &SynthConfig) -> (Vec<usize>, usize) {
    let mut months = Vec::new();
    let mut m = 5usize;
    while m < config.cadence_switch_month && m < config.months {
        months.push(m);
        m += 6;
    }
    let biannual = months.len();
    for m in config.cadence_switch_month..config.months {
        months.push(m);
    }
    (months, biannual)
}

fn validate(config: &SynthConfig) -> Result<(), SynthError> {
    if config.n_features == 0 {
        return Err(SynthError::InvalidConfig("n_features must be positive".into()));
    }
    if config.n_systems == 0 || config.n_subsystems < config.n_systems {
        return Err(SynthError::InvalidConfig(
            "need at least one system and n_subsystems >= n_systems".into(),
        ));
    }
    if config.cadence_switch_month >= config.months {
        return Err(SynthError::InvalidConfig(
            "cadence_switch_month must precede the last month".into(),
        ));
    }
    for p in [config.pre_release_detect_prob, config.early_post_prob] {
        if !(0.0..=1.0).contains(&p) {
            return Err(SynthError::InvalidConfig(format!("probability {p} outside [0,1]")));
        }
    }
    if config.inflow_ar_coefficient.abs() >= 1.0 {
        return Err(SynthError::InvalidConfig("AR coefficient must be in (-1,1)".into()));
    }
    let weight_sum: f64 = config.importance_class_weights.iter().sum();
    if (weight_sum - 1.0).abs() > 1e-9 {
        return Err(SynthError::InvalidConfig(format!(
            "importance weights sum to {weight_sum}, expected 1"
        )));
    }
    if config.cluster_archetypes.is_empty() {
        return Err(SynthError::InvalidConfig("need at least one archetype".into()));
    }
    for a in &config.cluster_archetypes {
        if a.weight <= 0.0 {
            return Err(SynthError::InvalidConfig(format!("archetype '{}' weight <= 0", a.name)));
        }
        if a.fault_rate < 0.0 {
            return Err(SynthError::InvalidConfig(format!(
                "archetype '{}' fault rate < 0",
                a.name
            )));
        }
        if !a.diffuse && a.footprint.is_empty() {
            return Err(SynthError::InvalidConfig(format!(
                "archetype '{}' has an empty footprint",
                a.name
            )));
        }
        for &sub in a.footprint.keys() {
            if sub >= config.n_subsystems {
                return Err(SynthError::InvalidConfig(format!(
                    "archetype '{}' references subsystem {sub} >= {}",
                    a.name, config.n_subsystems
                )));
            }
        }
    }
    Ok(())
}

fn subsystem_name(idx: usize) -> String {
    format!("SS{:02}", idx + 1)
}

fn system_of(idx: usize, config: &SynthConfig) -> String {
    format!("SYS{}", idx * config.n_systems / config.n_subsystems + 1)
}

/// Generates the four-subset corpus plus the planted ground truth.
pub fn generate_corpus(config: &SynthConfig) -> Result<(CorpusBundle, GroundTruth), SynthError> {
    validate(config)?;
    let (rel_months, biannual_count) = release_months(config);
    if rel_months.is_empty() {
        return Err(SynthError::InvalidConfig("no release months".into()));
    }

    let releases: Vec<Release> = rel_months
        .iter()
        .enumerate()
        .map(|(i, &m)| Release {
            release_id: format!("R{:02}", i + 1),
            release_date: month_end(m),
        })
        .collect();

    // AR(1) release-level fault-mass factor, clamped for sanity
    let mut ar = Rng::stream(config.seed, "ar_factor");
    let mut level = 0.0f64;
    let factors: Vec<f64> = (0..releases.len())
        .map(|_| {
            level = config.inflow_ar_coefficient * level
                + config.inflow_ar_sigma * ar.next_gaussian();
            level = level.clamp(-1.5, 1.5);
            level.exp()
        })
        .collect();

    // delivery month -> index of the first release at or after its end
    let release_for_month: Vec<Option<usize>> = (0..config.months)
        .map(|m| rel_months.iter().position(|&rm| rm >= m))
        .collect();

    let weights: Vec<f64> = config.cluster_archetypes.iter().map(|a| a.weight).collect();
    let mut features = Vec::with_capacity(config.n_features);
    let mut commits = Vec::new();
    let mut trouble_reports = Vec::new();
    let mut archetype_of = BTreeMap::new();
    let mut member_counts = vec![0usize; config.cluster_archetypes.len()];
    let mut commit_counter = 0usize;
    let mut tr_counter = 0usize;

    for i in 0..config.n_features {
        let feature_id = format!("F{:04}", i + 1);
        let mut rng = Rng::substream(config.seed, "feature", i as u64);

        let archetype_idx = rng.next_weighted(&weights);
        let archetype = &config.cluster_archetypes[archetype_idx];
        archetype_of.insert(feature_id.clone(), archetype_idx);
        member_counts[archetype_idx] += 1;

        // delivery roadmaps run in phase-shifted yearly waves per
        // archetype, so cluster composition swings month to month while
        // total throughput stays roughly flat
        let phase = archetype_idx as f64 / config.cluster_archetypes.len() as f64;
        let month_weights: Vec<f64> = (0..config.months)
            .map(|m| {
                1.0 + 0.9
                    * (std::f64::consts::TAU * (m as f64 / 12.0 + phase)).sin()
            })
            .collect();
        let delivery_month = rng.next_weighted(&month_weights);
        let release_idx = release_for_month[delivery_month].expect("month after last release");
        let release = &releases[release_idx];

        // realized footprint: template magnitudes with mild jitter;
        // diffuse archetypes redraw support per feature
        let footprint: Vec<(usize, f64)> = if archetype.diffuse {
            let span = 2 + rng.next_below(4) as usize;
            let mut subs: Vec<usize> = Vec::new();
            while subs.len() < span {
                let s = rng.next_below(config.n_subsystems as u64) as usize;
                if !subs.contains(&s) {
                    subs.push(s);
                }
            }
            subs.sort_unstable();
            subs.into_iter()
                .map(|s| (s, rng.next_f64_range(1.0, 600.0)))
                .collect()
        } else {
            archetype
                .footprint
                .iter()
                .map(|(&s, &mag)| (s, mag * rng.next_f64_range(0.9, 1.1)))
                .collect()
        };

        let dev_time = (archetype.dev_time_mean
            + archetype.dev_time_spread * rng.next_gaussian())
        .round()
        .max(1.0) as u64;

        let last_day = 1 + rng.next_below(days_in_month(delivery_month) as u64) as i64;
        let last_commit_date = month_start(delivery_month) + chrono::Days::new(last_day as u64 - 1);

        // one commit per touched unit; the final one carries the
        // feature's latest date so linking lands on `release`
        let unit_count = footprint.len();
        for (k, (sub, magnitude)) in footprint.iter().enumerate() {
            commit_counter += 1;
            let date = if k == unit_count - 1 {
                last_commit_date
            } else {
                let back = 1 + rng.next_below(dev_time.clamp(1, 45));
                last_commit_date - chrono::Days::new(back)
            };
            let files = magnitude.round().max(1.0) as u64;
            let loc = files * (11 + rng.next_below(3));
            let added = (loc as f64 * rng.next_f64_range(0.4, 0.7)) as u64;
            let removed = (loc as f64 * rng.next_f64_range(0.05, 0.25)) as u64;
            commits.push(CommitRecord {
                commit_id: format!("C{:06}", commit_counter),
                feature_id: feature_id.clone(),
                date,
                system: system_of(*sub, config),
                subsystem: subsystem_name(*sub),
                files_changed: files,
                loc_added: added,
                loc_removed: removed,
                loc_modified: loc - added.min(loc) - removed.min(loc - added.min(loc)),
            });
        }

        features.push(FeatureRecord {
            feature_id: feature_id.clone(),
            completion_date: last_commit_date,
            development_time_days: dev_time,
            release_id: None,
        });

        // trouble reports caused by this feature
        let mut tr_rng = Rng::substream(config.seed, "trs", i as u64);
        let count = tr_rng.next_poisson(archetype.fault_rate * factors[release_idx]);
        for _ in 0..count {
            tr_counter += 1;
            let date = if tr_rng.next_f64() < config.pre_release_detect_prob {
                // internal testing clusters tightly before the release
                release.release_date - chrono::Days::new(1 + tr_rng.next_below(20))
            } else if tr_rng.next_f64() < config.early_post_prob {
                // early field reports arrive in the first weeks of use,
                // comfortably inside the 122-day window
                release.release_date + chrono::Days::new(tr_rng.next_below(31))
            } else {
                release.release_date + chrono::Days::new(123 + tr_rng.next_below(243))
            };
            let class_weights: Vec<f64> = config.importance_class_weights.to_vec();
            let class = 1 + tr_rng.next_weighted(&class_weights) as u8;
            trouble_reports.push(TroubleReport {
                tr_id: format!("T{:05}", tr_counter),
                date_reported: date,
                release_id: release.release_id.clone(),
                importance_class: class,
            });
        }
    }

    let causal = config
        .cluster_archetypes
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.fault_rate.total_cmp(&b.1.fault_rate))
        .map(|(i, _)| i)
        .unwrap_or(0);

    let ground_truth = GroundTruth {
        archetype_of,
        archetypes: config
            .cluster_archetypes
            .iter()
            .enumerate()
            .map(|(id, a)| ArchetypeSummary {
                id,
                name: a.name.clone(),
                fault_rate: a.fault_rate,
                dev_time_mean: a.dev_time_mean,
                member_count: member_counts[id],
                diffuse: a.diffuse,
            })
            .collect(),
        causal_archetype: causal,
        pre_release_detect_prob: config.pre_release_detect_prob,
        early_post_prob: config.early_post_prob,
        release_calendar: releases
            .iter()
            .map(|r| (r.release_id.clone(), r.release_date))
            .collect(),
        biannual_release_count: biannual_count,
    };

    let bundle = bundle_from_records(commits, trouble_reports, features, releases)
        .expect("generated corpus always validates");
    Ok((bundle, ground_truth))
}

/// Human-readable summary of the planted archetypes and fractions.
pub fn describe_ground_truth(gt: &GroundTruth) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "planted fractions: pre-release {:.2}, early-post {:.2}\n",
        gt.pre_release_detect_prob, gt.early_post_prob
    ));
    out.push_str(&format!(
        "releases: {} ({} biannual, {} monthly)\n",
        gt.release_calendar.len(),
        gt.biannual_release_count,
        gt.release_calendar.len() - gt.biannual_release_count
    ));
    out.push_str("id  name        members  fault_rate  dev_time  diffuse\n");
    for a in &gt.archetypes {
        out.push_str(&format!(
            "{:<3} {:<11} {:<8} {:<11} {:<9} {}{}\n",
            a.id,
            a.name,
            a.member_count,
            a.fault_rate,
            a.dev_time_mean,
            a.diffuse,
            if a.id == gt.causal_archetype { "  <- causal" } else { "" }
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{link_features_to_releases, save_corpus};
    use crate::dataset::{aggregate_periods, Granularity};

    fn small_config(seed: u64) -> SynthConfig {
        SynthConfig {
            seed,
            n_features: 300,
            months: 36,
            cadence_switch_month: 18,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn same_seed_same_corpus() {
        let (a, gta) = generate_corpus(&small_config(7)).unwrap();
        let (b, gtb) = generate_corpus(&small_config(7)).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&gta).unwrap(),
            serde_json::to_string(&gtb).unwrap()
        );
        let (c, _) = generate_corpus(&small_config(8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_fault_rates_give_zero_reports() {
        let mut config = small_config(1);
        for a in &mut config.cluster_archetypes {
            a.fault_rate = 0.0;
        }
        let (bundle, _) = generate_corpus(&config).unwrap();
        assert!(bundle.trouble_reports.is_empty());
    }

    #[test]
    fn scale_anchors_hold_for_defaults() {
        let (bundle, gt) = generate_corpus(&SynthConfig::default()).unwrap();
        assert_eq!(bundle.features.len(), 2000);
        let subsystems: std::collections::BTreeSet<&str> =
            bundle.commits.iter().map(|c| c.subsystem.as_str()).collect();
        assert!(subsystems.len() <= 19);
        assert!(
            bundle.trouble_reports.len() >= 5000,
            "got {} TRs",
            bundle.trouble_reports.len()
        );
        let members: usize = gt.archetypes.iter().map(|a| a.member_count).sum();
        assert_eq!(members, 2000);
    }

    #[test]
    fn generated_corpus_roundtrips_through_csv() {
        let (bundle, _) = generate_corpus(&small_config(3)).unwrap();
        let dir = std::env::temp_dir().join(format!("inflow_synth_rt_{}", std::process::id()));
        save_corpus(&bundle, &dir).unwrap();
        let loaded = crate::corpus::load_corpus_dir(&dir).unwrap();
        assert_eq!(loaded, bundle);
        assert!(loaded.orphan_feature_ids.is_empty());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn tr_attribution_matches_linking_rule() {
        let (bundle, _) = generate_corpus(&small_config(5)).unwrap();
        let linked = link_features_to_releases(&bundle);
        assert!(linked.unreleased_features().is_empty());
        // every feature's TRs cite exactly the release linking assigns
        let release_of: BTreeMap<&str, &str> = linked
            .features
            .iter()
            .map(|f| (f.feature_id.as_str(), f.release_id.as_deref().unwrap()))
            .collect();
        // ground truth attributions are keyed per feature through tr ids,
        // so recheck via the releases' trouble-report dates instead: each
        // TR's release must exist in the calendar (validated at build) and
        // each feature's commits must not postdate its release
        for f in &linked.features {
            let release = linked.release_by_id(release_of[f.feature_id.as_str()]).unwrap();
            let last_commit = linked
                .commits
                .iter()
                .filter(|c| c.feature_id == f.feature_id)
                .map(|c| c.date)
                .max()
                .unwrap();
            assert!(last_commit <= release.release_date);
        }
    }

    #[test]
    fn planted_fractions_recovered_at_scale() {
        let (bundle, _) = generate_corpus(&SynthConfig::default()).unwrap();
        let stats = crate::corpus::corpus_inflow_stats(&bundle).unwrap();
        assert!(stats.total >= 5000);
        assert!(
            (stats.pre_release_fraction - 0.63).abs() <= 0.03,
            "pre-release fraction {}",
            stats.pre_release_fraction
        );
        let early = stats.early_post_fraction.unwrap();
        assert!((early - 0.58).abs() <= 0.04, "early-post fraction {early}");
    }

    #[test]
    fn per_release_inflow_drops_after_cadence_switch() {
        // constant per-feature fault rates; biannual releases accumulate
        // about six months of features each, monthly releases one
        let mut before_total = 0.0;
        let mut after_total = 0.0;
        for seed in 0..10 {
            let (bundle, gt) = generate_corpus(&small_config(100 + seed)).unwrap();
            let linked = link_features_to_releases(&bundle);
            let table = aggregate_periods(&linked, Granularity::Release).unwrap();
            let biannual_ids: std::collections::BTreeSet<&str> = gt.release_calendar
                [..gt.biannual_release_count]
                .iter()
                .map(|(id, _)| id.as_str())
                .collect();
            let (mut before, mut nb, mut after, mut na) = (0.0, 0, 0.0, 0);
            for row in &table.rows {
                if biannual_ids.contains(row.period_key.as_str()) {
                    before += row.tr_inflow as f64;
                    nb += 1;
                } else {
                    after += row.tr_inflow as f64;
                    na += 1;
                }
            }
            before_total += before / nb as f64;
            after_total += after / na as f64;
        }
        assert!(
            before_total / 10.0 > after_total / 10.0,
            "before {} after {}",
            before_total / 10.0,
            after_total / 10.0
        );
    }

    #[test]
    fn describe_lists_every_archetype() {
        let (_, gt) = generate_corpus(&small_config(2)).unwrap();
        let report = describe_ground_truth(&gt);
        for a in &gt.archetypes {
            assert!(report.contains(&a.name));
            assert!(report.contains(&format!("{}", a.fault_rate)));
        }
        assert!(report.contains("<- causal"));
        assert_eq!(gt.causal_archetype, 1); // core-hot
    }

    #[test]
    fn two_archetype_config() {
        let config = SynthConfig {
            cluster_archetypes: default_archetypes().into_iter().take(2).collect(),
            ..small_config(9)
        };
        let (_, gt) = generate_corpus(&config).unwrap();
        assert_eq!(gt.archetypes.len(), 2);
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad_switch = SynthConfig {
            cadence_switch_month: 48,
            ..SynthConfig::default()
        };
        assert!(generate_corpus(&bad_switch).is_err());

        let bad_weights = SynthConfig {
            importance_class_weights: [0.5, 0.5, 0.5, 0.0, 0.0],
            ..SynthConfig::default()
        };
        assert!(generate_corpus(&bad_weights).is_err());

        let bad_prob = SynthConfig {
            pre_release_detect_prob: 1.4,
            ..SynthConfig::default()
        };
        assert!(generate_corpus(&bad_prob).is_err());
    }
}
