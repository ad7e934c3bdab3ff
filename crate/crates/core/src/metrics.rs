//! Ontology quality metrics: relationship, attribute and class richness,
//! average population, and the two composite knowledge scores.
//!
//! Symbols: |Prop| is object plus data properties, |Attribute| is data
//! properties, |rel| is object properties, |Subclass| is asserted
//! `subClassOf` statements.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ontology::{MetricCounts, OntologySchema};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{metric} is undefined: {reason}")]
pub struct MetricError {
    pub metric: &'static str,
    pub reason: &'static str,
}

fn ratio(metric: &'static str, num: f64, den: f64, reason: &'static str) -> Result<f64, MetricError> {
    if den == 0.0 {
        Err(MetricError { metric, reason })
    } else {
        Ok(num / den)
    }
}

/// Which members make a class "populated".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Population {
    /// Members of the class or of any subclass.
    #[default]
    Inferred,
    /// Directly asserted members only.
    Direct,
}

impl Population {
    fn count(self, counts: &MetricCounts) -> usize {
        match self {
            Population::Inferred => counts.populated_class_count,
            Population::Direct => counts.populated_class_count_direct,
        }
    }
}

/// RR = |Prop| / (|Subclass| + |Prop|)
pub fn relationship_richness(counts: &MetricCounts) -> Result<f64, MetricError> {
    let prop = counts.property_count() as f64;
    ratio("RR", prop, counts.subclassof_count as f64 + prop, "no subclass axioms and no properties")
}

/// AR = |Attribute| / |Class|
pub fn attribute_richness(counts: &MetricCounts) -> Result<f64, MetricError> {
    ratio("AR", counts.data_property_count as f64, counts.class_count as f64, "no classes")
}

/// CR = |Class with instance| / |Class|, with population read from the schema.
pub fn class_richness(
    counts: &MetricCounts,
    schema: &OntologySchema,
    population: Population,
) -> Result<f64, MetricError> {
    let populated = schema.populated_classes(population == Population::Inferred).len();
    ratio("CR", populated as f64, counts.class_count as f64, "no classes")
}

/// CR computed from the populated-class count already in `counts`.
pub fn class_richness_from_counts(counts: &MetricCounts, population: Population) -> Result<f64, MetricError> {
    ratio("CR", population.count(counts) as f64, counts.class_count as f64, "no classes")
}

/// AP = |Individual| / |Class|
pub fn average_population(counts: &MetricCounts) -> Result<f64, MetricError> {
    ratio("AP", counts.individual_count as f64, counts.class_count as f64, "no classes")
}

/// Score_rk = (|rel|·|class|·100 + (|subclass|+|rel|)·|prop|) / ((|subclass|+|rel|)·|class|)
pub fn score_rk(counts: &MetricCounts) -> Result<f64, MetricError> {
    let rel = counts.object_property_count as f64;
    let class = counts.class_count as f64;
    let sub = counts.subclassof_count as f64;
    let prop = counts.property_count() as f64;
    ratio(
        "Score_rk",
        rel * class * 100.0 + (sub + rel) * prop,
        (sub + rel) * class,
        "no classes, or no subclass axioms and no object properties",
    )
}

/// Score_bk = (|Class with instance|·100 + |Individual|) / |class|
pub fn score_bk(counts: &MetricCounts, population: Population) -> Result<f64, MetricError> {
    ratio(
        "Score_bk",
        population.count(counts) as f64 * 100.0 + counts.individual_count as f64,
        counts.class_count as f64,
        "no classes",
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub rr: f64,
    pub ar: f64,
    pub cr: f64,
    pub ap: f64,
    pub score_rk: f64,
    pub score_bk: f64,
    pub population: Population,
    pub inputs: MetricCounts,
}

impl MetricsReport {
    pub fn compute(counts: MetricCounts, population: Population) -> Result<MetricsReport, MetricError> {
        Ok(MetricsReport {
            rr: relationship_richness(&counts)?,
            ar: attribute_richness(&counts)?,
            cr: class_richness_from_counts(&counts, population)?,
            ap: average_population(&counts)?,
            score_rk: score_rk(&counts)?,
            score_bk: score_bk(&counts, population)?,
            population,
            inputs: counts,
        })
    }

    /// Metric name and full-precision value, in display order.
    pub fn rows(&self) -> [(&'static str, f64); 6] {
        [
            ("RR", self.rr),
            ("AR", self.ar),
            ("CR", self.cr),
            ("AP", self.ap),
            ("Score_rk", self.score_rk),
            ("Score_bk", self.score_bk),
        ]
    }
}

impl fmt::Display for MetricsReport {
    /// Two-decimal console table.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>10}", "Metric", "Value")?;
        for (name, value) in self.rows() {
            writeln!(f, "{name:<10} {value:>10.2}")?;
        }
        let c = &self.inputs;
        writeln!(f)?;
        writeln!(f, "{:<28} {:>8}", "Count", "Value")?;
        for (name, value) in [
            ("Axiom", c.axiom_count),
            ("Class", c.class_count),
            ("SubClassOf", c.subclassof_count),
            ("Object property", c.object_property_count),
            ("Data property", c.data_property_count),
            ("Individual", c.individual_count),
            ("DisjointClasses", c.disjoint_classes_count),
            ("Annotation", c.annotation_count),
            ("Populated class (inferred)", c.populated_class_count),
            ("Populated class (direct)", c.populated_class_count_direct),
        ] {
            writeln!(f, "{name:<28} {value:>8}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts() -> MetricCounts {
        MetricCounts::default()
    }

    #[test]
    fn rr_direct_evaluation() {
        let c = MetricCounts { object_property_count: 2, data_property_count: 1, subclassof_count: 2, ..counts() };
        assert!((relationship_richness(&c).unwrap() - 0.6).abs() < 1e-12);
        let c = MetricCounts { subclassof_count: 5, ..counts() };
        assert_eq!(relationship_richness(&c).unwrap(), 0.0);
        assert!(relationship_richness(&counts()).is_err());
    }

    #[test]
    fn ar_and_ap() {
        let c = MetricCounts { class_count: 25, data_property_count: 8, ..counts() };
        assert!((attribute_richness(&c).unwrap() - 0.32).abs() < 1e-12);
        assert_eq!(average_population(&c).unwrap(), 0.0);
        let c = MetricCounts { class_count: 10, individual_count: 24, ..counts() };
        assert!((average_population(&c).unwrap() - 2.4).abs() < 1e-12);
        assert_eq!(attribute_richness(&c).unwrap(), 0.0);
        assert!(attribute_richness(&counts()).is_err());
        assert!(average_population(&counts()).is_err());
    }

    #[test]
    fn score_rk_direct_evaluation() {
        let c = MetricCounts {
            object_property_count: 2,
            data_property_count: 3,
            class_count: 4,
            subclassof_count: 3,
            ..counts()
        };
        assert!((score_rk(&c).unwrap() - 41.25).abs() < 1e-12);
        let c = MetricCounts { class_count: 4, subclassof_count: 3, ..counts() };
        assert_eq!(score_rk(&c).unwrap(), 0.0);
        assert!(score_rk(&MetricCounts { class_count: 3, ..counts() }).is_err());
    }

    #[test]
    fn score_bk_direct_evaluation() {
        let c = MetricCounts { class_count: 10, populated_class_count: 9, individual_count: 20, ..counts() };
        assert!((score_bk(&c, Population::Inferred).unwrap() - 92.0).abs() < 1e-12);
        assert_eq!(score_bk(&MetricCounts { class_count: 10, ..counts() }, Population::Inferred).unwrap(), 0.0);
        assert!(score_bk(&counts(), Population::Direct).is_err());
    }

    #[test]
    fn report_on_empty_counts_fails() {
        assert!(MetricsReport::compute(counts(), Population::Inferred).is_err());
    }
}
