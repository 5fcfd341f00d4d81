//! Grammar instrumentation for disjunct coverage.
//!
//! A grammar is parsed ([`grammar`]), every disjunct is given a marker
//! ([`instrument`]), test sentences are parsed against the instrumented
//! grammar ([`engine`]) and the recorded marker usage is analysed
//! ([`analysis`]).

pub mod grammar;
pub mod instrument;
pub mod engine;
pub mod analysis;
