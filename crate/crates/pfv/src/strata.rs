//! Binary task construction: (class-pair x stratum) slices of a labeled
//! cohort, gated by a sample-adequacy policy.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cohort::{ClassLabel, LabeledCohort, RowAttrs};
use crate::error::{Error, Result};

/// A subpopulation slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StratumSpec {
    All,
    Sex(String),
    Race(String),
    AgeGt(f64),
    AgeLe(f64),
}

impl StratumSpec {
    pub fn matches(&self, attrs: &RowAttrs) -> bool {
        match self {
            StratumSpec::All => true,
            StratumSpec::Sex(v) => attrs.sex == *v,
            StratumSpec::Race(v) => attrs.race == *v,
            StratumSpec::AgeGt(t) => attrs.age > *t,
            StratumSpec::AgeLe(t) => attrs.age <= *t,
        }
    }

    /// Filesystem-safe identifier for artifact paths.
    pub fn slug(&self) -> String {
        match self {
            StratumSpec::All => "all".into(),
            StratumSpec::Sex(v) => format!("sex_{v}"),
            StratumSpec::Race(v) => format!("race_{v}"),
            StratumSpec::AgeGt(t) => format!("age_gt_{t}"),
            StratumSpec::AgeLe(t) => format!("age_le_{t}"),
        }
    }
}

impl fmt::Display for StratumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StratumSpec::All => write!(f, "all"),
            StratumSpec::Sex(v) => write!(f, "sex={v}"),
            StratumSpec::Race(v) => write!(f, "race={v}"),
            StratumSpec::AgeGt(t) => write!(f, "age>{t}"),
            StratumSpec::AgeLe(t) => write!(f, "age<={t}"),
        }
    }
}

impl FromStr for StratumSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(StratumSpec::All);
        }
        if let Some(v) = s.strip_prefix("sex=") {
            return Ok(StratumSpec::Sex(v.to_string()));
        }
        if let Some(v) = s.strip_prefix("race=") {
            return Ok(StratumSpec::Race(v.to_string()));
        }
        if let Some(v) = s.strip_prefix("age<=") {
            let t: f64 = v
                .parse()
                .map_err(|_| Error::Config(format!("bad age threshold '{v}'")))?;
            return Ok(StratumSpec::AgeLe(t));
        }
        if let Some(v) = s.strip_prefix("age>") {
            let t: f64 = v
                .parse()
                .map_err(|_| Error::Config(format!("bad age threshold '{v}'")))?;
            return Ok(StratumSpec::AgeGt(t));
        }
        Err(Error::Config(format!("unknown stratum spec '{s}'")))
    }
}

/// Binary classification slice: rows of two classes within one stratum.
/// `y` encodes membership of `class1` as 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryTask {
    pub class1: ClassLabel,
    pub class2: ClassLabel,
    pub stratum: StratumSpec,
    pub x: DMatrix<f64>,
    pub y: Vec<u8>,
    pub n1: usize,
    pub n2: usize,
    pub feature_names: Vec<String>,
}

impl BinaryTask {
    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    pub fn pair_slug(&self) -> String {
        format!("{}_vs_{}", self.class1, self.class2)
    }
}

/// Sample-size gate for analyzing a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdequacyPolicy {
    pub min_minority: usize,
    pub min_total: usize,
}

impl Default for AdequacyPolicy {
    /// The smallest-minority and smallest-total bounds jointly consistent
    /// with every adequacy verdict in the reference cohort inventory.
    fn default() -> Self {
        AdequacyPolicy {
            min_minority: 10,
            min_total: 48,
        }
    }
}

impl AdequacyPolicy {
    pub fn validate(&self) -> Result<()> {
        if self.min_minority < 1 || self.min_total < 1 {
            return Err(Error::InvalidParams(
                "adequacy bounds must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Slice a cohort down to the rows of two classes within a stratum.
///
/// An empty result is returned rather than an error; the adequacy gate
/// decides downstream whether the task is analyzable.
pub fn make_task(
    cohort: &LabeledCohort,
    class1: ClassLabel,
    class2: ClassLabel,
    stratum: &StratumSpec,
) -> Result<BinaryTask> {
    if class1 == class2 {
        return Err(Error::InvalidParams(format!(
            "class pair must be distinct, got {class1} vs {class2}"
        )));
    }
    let keep: Vec<usize> = (0..cohort.n_rows())
        .filter(|&i| {
            (cohort.labels[i] == class1 || cohort.labels[i] == class2)
                && stratum.matches(&cohort.strata_attrs[i])
        })
        .collect();
    let y: Vec<u8> = keep
        .iter()
        .map(|&i| (cohort.labels[i] == class1) as u8)
        .collect();
    let n1 = y.iter().filter(|&&v| v == 1).count();
    let n2 = y.len() - n1;
    let x = cohort.features.select_rows(keep.iter());
    Ok(BinaryTask {
        class1,
        class2,
        stratum: stratum.clone(),
        x,
        y,
        n1,
        n2,
        feature_names: cohort.feature_names.clone(),
    })
}

/// True iff min(n1, n2) >= min_minority and n1 + n2 >= min_total.
pub fn is_adequate(task: &BinaryTask, policy: &AdequacyPolicy) -> bool {
    adequate_counts(task.n1, task.n2, policy)
}

/// Adequacy on bare class counts.
pub fn adequate_counts(n1: usize, n2: usize, policy: &AdequacyPolicy) -> bool {
    n1.min(n2) >= policy.min_minority && n1 + n2 >= policy.min_total
}

/// Build every (pair x stratum) task with its adequacy verdict, pairs outer
/// and strata inner.
pub fn enumerate_tasks(
    cohort: &LabeledCohort,
    pairs: &[(ClassLabel, ClassLabel)],
    strata: &[StratumSpec],
    policy: &AdequacyPolicy,
) -> Result<Vec<(BinaryTask, bool)>> {
    let mut out = Vec::with_capacity(pairs.len() * strata.len());
    for &(c1, c2) in pairs {
        for stratum in strata {
            let task = make_task(cohort, c1, c2, stratum)?;
            let adequate = is_adequate(&task, policy);
            out.push((task, adequate));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohort::RowAttrs;
    use nalgebra::DMatrix;

    fn tiny_cohort() -> LabeledCohort {
        // 6 rows: 2 LATE, 2 AD, 2 CONTROL with mixed attrs.
        let features = DMatrix::from_row_slice(6, 2, &[
            0.0, 1.0, //
            1.0, 2.0, //
            2.0, 3.0, //
            3.0, 4.0, //
            4.0, 5.0, //
            5.0, 6.0,
        ]);
        let labels = vec![
            ClassLabel::Late,
            ClassLabel::Late,
            ClassLabel::Ad,
            ClassLabel::Ad,
            ClassLabel::Control,
            ClassLabel::Control,
        ];
        let attrs = vec![
            ("Male", "White", 80.0),
            ("Female", "White", 90.0),
            ("Male", "Black", 85.0),
            ("Female", "White", 86.0),
            ("Male", "White", 70.0),
            ("Female", "Black", 88.0),
        ];
        LabeledCohort {
            features,
            feature_names: vec!["f0".into(), "f1".into()],
            labels,
            strata_attrs: attrs
                .into_iter()
                .map(|(s, r, a)| RowAttrs {
                    sex: s.into(),
                    race: r.into(),
                    age: a,
                })
                .collect(),
        }
    }

    #[test]
    fn make_task_filters_and_encodes() {
        let cohort = tiny_cohort();
        let task = make_task(&cohort, ClassLabel::Late, ClassLabel::Ad, &StratumSpec::All).unwrap();
        assert_eq!(task.n1, 2);
        assert_eq!(task.n2, 2);
        assert_eq!(task.y, vec![1, 1, 0, 0]);
        assert_eq!(task.x.nrows(), 4);
        assert_eq!(task.x[(2, 0)], 2.0);
    }

    #[test]
    fn stratum_predicates() {
        let cohort = tiny_cohort();
        let male = make_task(
            &cohort,
            ClassLabel::Late,
            ClassLabel::Control,
            &StratumSpec::Sex("Male".into()),
        )
        .unwrap();
        assert_eq!((male.n1, male.n2), (1, 1));
        // Age boundary: exactly 85 goes to the <=85 stratum.
        let le85 = make_task(
            &cohort,
            ClassLabel::Ad,
            ClassLabel::Control,
            &StratumSpec::AgeLe(85.0),
        )
        .unwrap();
        assert_eq!((le85.n1, le85.n2), (1, 1)); // AD at 85, control at 70
        let gt85 = make_task(
            &cohort,
            ClassLabel::Ad,
            ClassLabel::Control,
            &StratumSpec::AgeGt(85.0),
        )
        .unwrap();
        assert_eq!((gt85.n1, gt85.n2), (1, 1)); // AD at 86, control at 88
    }

    #[test]
    fn empty_stratum_gives_empty_task() {
        let cohort = tiny_cohort();
        let task = make_task(
            &cohort,
            ClassLabel::Late,
            ClassLabel::Ad,
            &StratumSpec::Sex("Unknown".into()),
        )
        .unwrap();
        assert_eq!(task.n_rows(), 0);
    }

    #[test]
    fn swapped_pair_complements_y() {
        let cohort = tiny_cohort();
        let a = make_task(&cohort, ClassLabel::Late, ClassLabel::Ad, &StratumSpec::All).unwrap();
        let b = make_task(&cohort, ClassLabel::Ad, ClassLabel::Late, &StratumSpec::All).unwrap();
        assert_eq!(a.x, b.x);
        let complemented: Vec<u8> = a.y.iter().map(|&v| 1 - v).collect();
        assert_eq!(b.y, complemented);
    }

    #[test]
    fn same_class_pair_rejected() {
        let cohort = tiny_cohort();
        assert!(make_task(&cohort, ClassLabel::Ad, ClassLabel::Ad, &StratumSpec::All).is_err());
    }

    fn task_with_counts(n1: usize, n2: usize) -> BinaryTask {
        BinaryTask {
            class1: ClassLabel::Late,
            class2: ClassLabel::Ad,
            stratum: StratumSpec::All,
            x: DMatrix::zeros(n1 + n2, 1),
            y: (0..n1 + n2).map(|i| (i < n1) as u8).collect(),
            n1,
            n2,
            feature_names: vec!["f0".into()],
        }
    }

    #[test]
    fn adequacy_reference_rows() {
        let policy = AdequacyPolicy::default();
        assert!(is_adequate(&task_with_counts(33, 15), &policy));
        assert!(!is_adequate(&task_with_counts(14, 15), &policy));
        assert!(!is_adequate(&task_with_counts(2, 88), &policy));
        assert!(!is_adequate(&task_with_counts(14, 33), &policy));
        assert!(is_adequate(&task_with_counts(14, 117), &policy));
    }

    #[test]
    fn adequacy_is_monotone() {
        let policy = AdequacyPolicy::default();
        for n1 in 0..60 {
            for n2 in 0..60 {
                if adequate_counts(n1, n2, &policy) {
                    assert!(adequate_counts(n1 + 1, n2, &policy));
                    assert!(adequate_counts(n1, n2 + 1, &policy));
                }
            }
        }
    }

    #[test]
    fn enumerate_cartesian_order() {
        let cohort = tiny_cohort();
        let pairs = vec![
            (ClassLabel::Late, ClassLabel::Ad),
            (ClassLabel::Late, ClassLabel::Control),
        ];
        let strata = vec![StratumSpec::All, StratumSpec::Sex("Male".into())];
        let tasks = enumerate_tasks(&cohort, &pairs, &strata, &AdequacyPolicy::default()).unwrap();
        assert_eq!(tasks.len(), 4);
        assert_eq!(tasks[0].0.stratum, StratumSpec::All);
        assert_eq!(tasks[1].0.stratum, StratumSpec::Sex("Male".into()));
        assert_eq!(tasks[2].0.class2, ClassLabel::Control);
        // Empty strata list gives empty output.
        assert!(enumerate_tasks(&cohort, &pairs, &[], &AdequacyPolicy::default())
            .unwrap()
            .is_empty());
        let one = enumerate_tasks(
            &cohort,
            &pairs[..1],
            &strata[..1],
            &AdequacyPolicy::default(),
        )
        .unwrap();
        assert_eq!(one.len(), 1);
    }

    #[test]
    fn stratum_spec_round_trips_from_str() {
        for s in ["all", "sex=Male", "race=White", "age>85", "age<=85"] {
            let spec: StratumSpec = s.parse().unwrap();
            assert_eq!(spec.to_string(), s);
        }
        assert!("age=85".parse::<StratumSpec>().is_err());
    }
}
