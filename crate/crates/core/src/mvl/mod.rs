//! Multi-valued propositional logic substrate.
//!
//! Variables carry explicit finite integer domains and are split into
//! *features* (rule bodies) and *targets* (rule heads). A rule
//! `y(1) :- a(1), b(0).` has a head atom over a target variable and a body of
//! feature atoms, at most one per variable. States are dense value vectors
//! indexed by the variable's position within its role, so a feature state for
//! a schema with features `[a, b]` is `[value_of_a, value_of_b]`.

mod text;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use text::{parse_program, parse_program_standalone, serialize_program, ParseError};

/// Errors raised when values or states do not fit a schema.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MvlError {
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("invalid variable name `{0}`")]
    InvalidName(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("value {value} is not in the domain of `{variable}`")]
    ValueOutOfDomain { variable: String, value: u32 },
    #[error("{role} state has {got} values, schema declares {expected}")]
    StateArity { role: Role, expected: usize, got: usize },
    #[error("rule mentions {role} variable #{index}, schema has only {len}")]
    VariableIndex { role: Role, index: usize, len: usize },
    #[error("rule body mentions feature variable `{0}` more than once")]
    RepeatedBodyVariable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Feature,
    Target,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Role::Feature => f.write_str("feature"),
            Role::Target => f.write_str("target"),
        }
    }
}

/// A named variable with an explicit, sorted, duplicate-free domain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub domain: Vec<u32>,
}

impl Variable {
    pub fn new(name: impl Into<String>, domain: impl IntoIterator<Item = u32>) -> Self {
        let mut domain: Vec<u32> = domain.into_iter().collect();
        domain.sort_unstable();
        domain.dedup();
        Variable { name: name.into(), domain }
    }

    /// Variable with domain `0..=max`.
    pub fn range(name: impl Into<String>, max: u32) -> Self {
        Variable::new(name, 0..=max)
    }

    pub fn contains(&self, value: u32) -> bool {
        self.domain.binary_search(&value).is_ok()
    }
}

/// Feature and target variables, each in declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SchemaRepr", into = "SchemaRepr")]
pub struct Schema {
    features: Vec<Variable>,
    targets: Vec<Variable>,
}

#[derive(Serialize, Deserialize)]
struct SchemaRepr {
    features: Vec<Variable>,
    targets: Vec<Variable>,
}

impl TryFrom<SchemaRepr> for Schema {
    type Error = MvlError;
    fn try_from(r: SchemaRepr) -> Result<Self, MvlError> {
        Schema::new(r.features, r.targets)
    }
}

impl From<Schema> for SchemaRepr {
    fn from(s: Schema) -> Self {
        SchemaRepr { features: s.features, targets: s.targets }
    }
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Schema {
    pub fn new(features: Vec<Variable>, targets: Vec<Variable>) -> Result<Self, MvlError> {
        let mut seen = BTreeSet::new();
        for v in features.iter().chain(&targets) {
            if !valid_name(&v.name) {
                return Err(MvlError::InvalidName(v.name.clone()));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(MvlError::DuplicateVariable(v.name.clone()));
            }
            if v.domain.is_empty() {
                return Err(MvlError::EmptyDomain(v.name.clone()));
            }
        }
        let normalize = |vs: Vec<Variable>| -> Vec<Variable> {
            vs.into_iter().map(|v| Variable::new(v.name, v.domain)).collect()
        };
        Ok(Schema { features: normalize(features), targets: normalize(targets) })
    }

    /// Builds a schema from an ordered variable list and a role per variable.
    pub fn from_roles(vars: Vec<(Variable, Role)>) -> Result<Self, MvlError> {
        let (f, t): (Vec<_>, Vec<_>) = vars.into_iter().partition(|(_, r)| *r == Role::Feature);
        Schema::new(f.into_iter().map(|(v, _)| v).collect(), t.into_iter().map(|(v, _)| v).collect())
    }

    pub fn features(&self) -> &[Variable] {
        &self.features
    }

    pub fn targets(&self) -> &[Variable] {
        &self.targets
    }

    pub fn variables(&self, role: Role) -> &[Variable] {
        match role {
            Role::Feature => &self.features,
            Role::Target => &self.targets,
        }
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|v| v.name == name)
    }

    pub fn target_index(&self, name: &str) -> Option<usize> {
        self.targets.iter().position(|v| v.name == name)
    }

    /// Every target atom, in canonical order (variable, then value).
    pub fn target_atoms(&self) -> Vec<Atom> {
        self.targets
            .iter()
            .enumerate()
            .flat_map(|(var, v)| v.domain.iter().map(move |&value| Atom { var, value }))
            .collect()
    }

    pub fn check_atom(&self, role: Role, atom: Atom) -> Result<(), MvlError> {
        let vars = self.variables(role);
        let v = vars.get(atom.var).ok_or(MvlError::VariableIndex {
            role,
            index: atom.var,
            len: vars.len(),
        })?;
        if v.contains(atom.value) {
            Ok(())
        } else {
            Err(MvlError::ValueOutOfDomain { variable: v.name.clone(), value: atom.value })
        }
    }

    pub fn check_state(&self, role: Role, state: &State) -> Result<(), MvlError> {
        let vars = self.variables(role);
        if state.len() != vars.len() {
            return Err(MvlError::StateArity { role, expected: vars.len(), got: state.len() });
        }
        for (v, &value) in vars.iter().zip(state.values()) {
            if !v.contains(value) {
                return Err(MvlError::ValueOutOfDomain { variable: v.name.clone(), value });
            }
        }
        Ok(())
    }

    pub fn check_transition(&self, t: &Transition) -> Result<(), MvlError> {
        self.check_state(Role::Feature, &t.features)?;
        self.check_state(Role::Target, &t.targets)
    }

    pub fn check_rule(&self, rule: &Rule) -> Result<(), MvlError> {
        self.check_atom(Role::Target, rule.head)?;
        for &a in rule.body() {
            self.check_atom(Role::Feature, a)?;
        }
        Ok(())
    }
}

/// A `variable(value)` pair. `var` is the variable's index within its role
/// (target index for heads, feature index for body atoms).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Atom {
    pub var: usize,
    pub value: u32,
}

impl Atom {
    pub const fn new(var: usize, value: u32) -> Self {
        Atom { var, value }
    }
}

/// A total assignment of values to every variable of one role.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct State(Vec<u32>);

impl State {
    pub fn new(values: Vec<u32>) -> Self {
        State(values)
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, var: usize) -> Option<u32> {
        self.0.get(var).copied()
    }

    pub fn contains(&self, atom: Atom) -> bool {
        self.get(atom.var) == Some(atom.value)
    }

    /// Atom-set view of the state.
    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.0.iter().enumerate().map(|(var, &value)| Atom { var, value })
    }
}

impl From<Vec<u32>> for State {
    fn from(v: Vec<u32>) -> Self {
        State(v)
    }
}

/// One observation: a feature state and the target state that followed it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub features: State,
    pub targets: State,
}

impl Transition {
    pub fn new(features: impl Into<State>, targets: impl Into<State>) -> Self {
        Transition { features: features.into(), targets: targets.into() }
    }
}

/// `head :- body.` with an observation-count weight.
///
/// Equality, hashing and ordering ignore the weight. The body is kept sorted
/// by feature index, which makes the derived order the canonical one: head
/// variable, head value, then body atoms lexicographically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Rule {
    pub head: Atom,
    body: Vec<Atom>,
    pub weight: u64,
}

impl Rule {
    /// Rule with an empty body.
    pub fn fact(head: Atom) -> Self {
        Rule { head, body: Vec::new(), weight: 0 }
    }

    pub fn new(head: Atom, body: impl IntoIterator<Item = Atom>) -> Result<Self, MvlError> {
        let mut body: Vec<Atom> = body.into_iter().collect();
        body.sort_unstable();
        body.dedup();
        if let Some(w) = body.windows(2).find(|w| w[0].var == w[1].var) {
            return Err(MvlError::RepeatedBodyVariable(format!("#{}", w[0].var)));
        }
        Ok(Rule { head, body, weight: 0 })
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn body_var(&self, var: usize) -> Option<u32> {
        self.body
            .binary_search_by_key(&var, |a| a.var)
            .ok()
            .map(|i| self.body[i].value)
    }

    /// Adds `atom` to the body. Fails if the variable is already constrained.
    pub fn with_condition(&self, atom: Atom) -> Result<Rule, MvlError> {
        match self.body.binary_search_by_key(&atom.var, |a| a.var) {
            Ok(_) => Err(MvlError::RepeatedBodyVariable(format!("#{}", atom.var))),
            Err(pos) => {
                let mut r = self.clone();
                r.body.insert(pos, atom);
                Ok(r)
            }
        }
    }

    /// Removes the body atom at position `idx` (in canonical body order).
    pub fn without_condition(&self, idx: usize) -> Rule {
        let mut r = self.clone();
        r.body.remove(idx);
        r
    }

    /// `b(R) ⊆ s` over raw feature values, without arity checks.
    #[inline]
    pub fn matches_values(&self, values: &[u32]) -> bool {
        self.body.iter().all(|a| values.get(a.var) == Some(&a.value))
    }

    /// True iff every body atom holds in `s`. Errors if the body mentions a
    /// variable the state does not have.
    pub fn matches(&self, s: &State) -> Result<bool, MvlError> {
        if let Some(a) = self.body.iter().find(|a| a.var >= s.len()) {
            return Err(MvlError::VariableIndex { role: Role::Feature, index: a.var, len: s.len() });
        }
        Ok(self.matches_values(s.values()))
    }

    /// `self` dominates `other`: same head and `b(self) ⊆ b(other)`.
    pub fn dominates(&self, other: &Rule) -> bool {
        self.head == other.head && self.body.iter().all(|a| other.body_var(a.var) == Some(a.value))
    }

    /// The rule matches the transition's features and its head holds in the targets.
    pub fn realizes(&self, t: &Transition) -> bool {
        self.matches_values(t.features.values()) && t.targets.contains(self.head)
    }

    /// Correctness w.r.t. `ts`: whenever the rule matches a feature state,
    /// some transition from that same state yields the head atom.
    pub fn is_consistent(&self, ts: &[Transition]) -> bool {
        ts.iter().filter(|t| self.matches_values(t.features.values())).all(|t| {
            ts.iter()
                .any(|u| u.features == t.features && u.targets.contains(self.head))
        })
    }
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.head == other.head && self.body == other.body
    }
}

impl Eq for Rule {}

impl std::hash::Hash for Rule {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.head.hash(state);
        self.body.hash(state);
    }
}

impl PartialOrd for Rule {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rule {
    fn cmp(&self, other: &Self) -> Ordering {
        self.head.cmp(&other.head).then_with(|| self.body.cmp(&other.body))
    }
}

/// A dynamic MVLP: a canonically ordered, duplicate-free rule set over a schema.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Program {
    schema: Schema,
    rules: Vec<Rule>,
}

impl Program {
    /// Validates every rule against the schema, sorts canonically and drops
    /// duplicates (keeping the first occurrence's weight).
    pub fn new(schema: Schema, rules: impl IntoIterator<Item = Rule>) -> Result<Self, MvlError> {
        let mut rules: Vec<Rule> = rules.into_iter().collect();
        for r in &rules {
            schema.check_rule(r)?;
        }
        rules.sort();
        rules.dedup();
        Ok(Program { schema, rules })
    }

    pub fn empty(schema: Schema) -> Self {
        Program { schema, rules: Vec::new() }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn contains(&self, rule: &Rule) -> bool {
        self.rules.binary_search(rule).is_ok()
    }

    /// Rules with the given head atom.
    pub fn rules_for(&self, head: Atom) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(move |r| r.head == head)
    }

    /// Copy of the program where each rule's weight is the number of
    /// transitions (duplicates included) whose feature state it matches.
    pub fn weighted(&self, ts: &[Transition]) -> Program {
        let rules = self
            .rules
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.weight = ts.iter().filter(|t| r.matches_values(t.features.values())).count() as u64;
                r
            })
            .collect();
        Program { schema: self.schema.clone(), rules }
    }

    /// Every atom of every observed target state is realized by some rule.
    pub fn is_complete(&self, ts: &[Transition]) -> bool {
        ts.iter().all(|t| {
            t.targets.atoms().all(|atom| {
                self.rules_for(atom).any(|r| r.matches_values(t.features.values()))
            })
        })
    }

    /// Every rule is consistent with `ts`.
    pub fn is_correct(&self, ts: &[Transition]) -> bool {
        self.rules.iter().all(|r| r.is_consistent(ts))
    }

    /// Weighted vote per target variable over the rules matching `features`.
    /// Each value scores the summed weight of its matching rules (weight 0
    /// counts as 1); the best score wins and ties go to the lower value.
    /// `None` for a target variable no rule speaks about.
    pub fn replay(&self, features: &State) -> Vec<Option<u32>> {
        let mut votes: Vec<BTreeMap<u32, u64>> = vec![BTreeMap::new(); self.schema.targets.len()];
        for r in self.rules.iter().filter(|r| r.matches_values(features.values())) {
            *votes[r.head.var].entry(r.head.value).or_default() += r.weight.max(1);
        }
        votes
            .into_iter()
            .map(|v| {
                v.into_iter()
                    .fold(None, |best: Option<(u32, u64)>, (val, w)| match best {
                        Some((_, bw)) if bw >= w => best,
                        _ => Some((val, w)),
                    })
                    .map(|(val, _)| val)
            })
            .collect()
    }
}

/// Weights every rule of `p` by the transitions it matches.
pub fn weight_rules(p: &Program, ts: &[Transition]) -> Program {
    p.weighted(ts)
}

/// A feature state observed with more than one distinct target state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conflict {
    pub features: State,
    pub targets: Vec<State>,
}

/// Feature states that lead to several target states, in canonical order.
/// Such states are indistinguishable from the features alone.
pub fn find_conflicts(ts: &[Transition]) -> Vec<Conflict> {
    let mut seen: BTreeMap<&State, BTreeSet<&State>> = BTreeMap::new();
    for t in ts {
        seen.entry(&t.features).or_default().insert(&t.targets);
    }
    seen.into_iter()
        .filter(|(_, ts)| ts.len() > 1)
        .map(|(f, ts)| Conflict { features: f.clone(), targets: ts.into_iter().cloned().collect() })
        .collect()
}

/// Deduplicated feature states with the set of values each target variable
/// takes after them.
pub(crate) fn group_by_features(ts: &[Transition], n_targets: usize) -> BTreeMap<State, Vec<BTreeSet<u32>>> {
    let mut grouped: BTreeMap<State, Vec<BTreeSet<u32>>> = BTreeMap::new();
    for t in ts {
        let entry = grouped
            .entry(t.features.clone())
            .or_insert_with(|| vec![BTreeSet::new(); n_targets]);
        for (var, &v) in t.targets.values().iter().enumerate() {
            entry[var].insert(v);
        }
    }
    grouped
}

/// Name lookup used by the text format and CSV readers.
pub(crate) fn name_index(vars: &[Variable]) -> HashMap<&str, usize> {
    vars.iter().enumerate().map(|(i, v)| (v.name.as_str(), i)).collect()
}
