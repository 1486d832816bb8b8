//! Interval certification of the n = 6 region bounds and randomized search
//! against the averaged sequence lemmas.

mod interval;
mod lemma_search;
mod regions;

pub use interval::Interval;
pub use lemma_search::{
    index_wise_slack, lemma_hypothesis_check, random_counterexample_search, transformed_slack,
    HypothesisCheck, HypothesisForm, SearchMode, SearchReport, SequenceError, SequenceTriple, Violation,
    SAMPLE_RESOLUTION,
};
pub use regions::{
    certify_all_regions, certify_region, certify_region_against, g_function, region, region_box, region_eval,
    CornerCheck, HotBox, RegionCertificate, RegionError, RegionOutcome, RegionSpec, RegionsReport, SurdValue,
    ZCondition, DEFAULT_MAX_DEPTH, DEFAULT_TOL, REGIONS,
};
