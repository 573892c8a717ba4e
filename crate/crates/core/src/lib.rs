//! Reversible reachability for vector addition systems.
//!
//! Configurations may carry `*` slots (projected components). The modules
//! follow the constructions bottom-up: vectors and runs, subreachability
//! graphs, Kirchhoff functions and Diophantine solving, reversibility of
//! graphs, extractors and pumping, and finally the decider, short-run
//! synthesis and reversibility domains.

pub mod bounds;
pub mod decide;
pub mod diophantine;
pub mod domains;
pub mod error;
pub mod extract;
pub mod flow;
pub mod graph;
pub mod pump;
pub mod reversibility;
pub mod synth;
pub mod text;
pub mod vector;

pub use bounds::{bound_report, BoundReport, PowerBound};
pub use decide::{decide_reversible, oracle_reversible, ReversibilityCertificate, SearchPolicy, Verdict};
pub use domains::{is_upward_closed_in_box, reversibility_domain_min, DomainResult};
pub use error::{Result, VasError};
pub use extract::Extractor;
pub use flow::{KirchhoffFunction, Limits};
pub use graph::{GraphPath, ParikhImage, SubreachabilityGraph, Transition};
pub use pump::{pump_witness, PumpCertificate};
pub use synth::{synthesize_short_run, ShortRun};
pub use vector::{Action, Configuration, IndexSet, ProjectedVector, Run, Slot, Vas};
