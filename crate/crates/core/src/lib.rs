//! Learning minimal multi-valued logic programs from the input/output
//! behaviour of a classifier, and auditing those programs for demographic
//! bias.
//!
//! * [`mvl`]: variables, atoms, rules, programs and the program text format;
//! * [`pride`]: the polynomial rule learner;
//! * [`oracle`]: brute-force optimal programs for small instances;
//! * [`faircv`]: synthetic resume data with injected bias and the nested
//!   scenarios `s1..s11`;
//! * [`blackbox`]: the classifier being explained;
//! * [`audit`]: rule-frequency bias metrics;
//! * [`pipeline`]: end-to-end scenario runs.

pub mod audit;
pub mod blackbox;
pub mod faircv;
pub mod io;
pub mod mvl;
pub mod oracle;
pub mod pipeline;
pub mod pride;

pub use audit::{AuditConfig, AuditReport};
pub use blackbox::{ModelConfig, TrainedModel};
pub use faircv::{BiasMode, Dataset, Demographic, GenConfig, Scenario};
pub use mvl::{Atom, Program, Role, Rule, Schema, State, Transition, Variable};
pub use pride::{pride, LearnerConfig, TieBreak};
