//! PRIDE: polynomial-time learning of an optimal-rule subset from transitions.
//!
//! For every target atom the feature states are split into positives (some
//! transition from the state yields the atom) and negatives (none does).
//! Rules start with an empty body, are specialized with atoms of one positive
//! until no negative matches, then every condition that is not needed to
//! keep the negatives out is dropped. Positives matched by the new rule are
//! retired and the loop continues until none are left.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mvl::{group_by_features, Atom, MvlError, Program, Role, Rule, Schema, State, Transition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LearnError {
    #[error("no transitions to learn from")]
    EmptyInput,
    #[error("transition #{index} does not fit the schema: {source}")]
    Schema { index: usize, source: MvlError },
    #[error("target atom is not part of the schema: {0}")]
    UnknownAtom(MvlError),
    #[error("positive and negative states are identical, no condition can separate them")]
    Inseparable,
}

/// Order in which "pick a positive" and "pick a condition" resolve.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    /// First positive in canonical state order; condition on the lowest
    /// feature index.
    #[default]
    LowestIndex,
    /// Last positive in canonical state order; condition on the highest
    /// feature index.
    HighestIndex,
    /// Positives in order of first observation in the transitions; the
    /// condition that rules out the most still-matched negatives, lowest
    /// feature index on ties. Keeps the schema order from deciding which
    /// feature describes a rule.
    MostExcluding,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerConfig {
    pub tie_break: TieBreak,
    pub parallel_targets: bool,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig { tie_break: TieBreak::LowestIndex, parallel_targets: true }
    }
}

/// Deduplicated positive and negative feature states of one target atom,
/// each sorted in canonical order. `learn_atom` picks positives front to
/// back, so reordering `positives` changes the pick order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosNegSplit {
    pub atom: Atom,
    pub positives: Vec<State>,
    pub negatives: Vec<State>,
}

fn validate(ts: &[Transition], schema: &Schema) -> Result<(), LearnError> {
    if ts.is_empty() {
        return Err(LearnError::EmptyInput);
    }
    for (index, t) in ts.iter().enumerate() {
        schema.check_transition(t).map_err(|source| LearnError::Schema { index, source })?;
    }
    Ok(())
}

pub fn extract_pos_neg(ts: &[Transition], schema: &Schema, atom: Atom) -> Result<PosNegSplit, LearnError> {
    validate(ts, schema)?;
    schema.check_atom(Role::Target, atom).map_err(LearnError::UnknownAtom)?;
    let grouped = group_by_features(ts, schema.targets().len());
    Ok(split_grouped(&grouped, atom))
}

fn split_grouped(grouped: &BTreeMap<State, Vec<BTreeSet<u32>>>, atom: Atom) -> PosNegSplit {
    let (mut positives, mut negatives) = (Vec::new(), Vec::new());
    for (state, seen) in grouped {
        if seen[atom.var].contains(&atom.value) {
            positives.push(state.clone());
        } else {
            negatives.push(state.clone());
        }
    }
    PosNegSplit { atom, positives, negatives }
}

/// Adds one condition taken from `pos` but absent from `neg`, so the rule
/// keeps matching `pos` and stops matching `neg`. `MostExcluding` has no
/// other negatives to compare with here and falls back to the lowest index.
pub fn specialize_against(rule: &Rule, pos: &State, neg: &State, tie: TieBreak) -> Result<Rule, LearnError> {
    let differs = |&var: &usize| pos.get(var) != neg.get(var) && rule.body_var(var).is_none();
    let var = match tie {
        TieBreak::LowestIndex | TieBreak::MostExcluding => (0..pos.len()).find(differs),
        TieBreak::HighestIndex => (0..pos.len()).rev().find(differs),
    }
    .ok_or(LearnError::Inseparable)?;
    rule.with_condition(Atom::new(var, pos.values()[var]))
        .map_err(|_| LearnError::Inseparable)
}

/// Drops, in canonical body order, every condition whose removal still
/// leaves all negatives unmatched. One pass is enough: removing conditions
/// only widens the rule, so a condition found necessary stays necessary.
pub fn minimize(rule: &Rule, negatives: &[State]) -> Rule {
    let mut current = rule.clone();
    let mut idx = 0;
    while idx < current.body().len() {
        let candidate = current.without_condition(idx);
        let conflict = negatives.iter().any(|n| candidate.matches_values(n.values()));
        if conflict {
            idx += 1;
        } else {
            current = candidate;
        }
    }
    current
}

/// Specializes the empty rule with atoms of `pos`, each time taking the
/// atom that excludes the most negatives still matched.
fn grow_greedy(head: Atom, pos: &State, negatives: &[State]) -> Result<Rule, LearnError> {
    let mut rule = Rule::fact(head);
    let mut matched: Vec<&State> = negatives.iter().collect();
    while !matched.is_empty() {
        let mut best: Option<(usize, usize)> = None;
        for var in 0..pos.len() {
            if rule.body_var(var).is_some() {
                continue;
            }
            let excluded = matched.iter().filter(|n| n.get(var) != pos.get(var)).count();
            if excluded > 0 && best.is_none_or(|(_, b)| excluded > b) {
                best = Some((var, excluded));
            }
        }
        let (var, _) = best.ok_or(LearnError::Inseparable)?;
        let value = pos.values()[var];
        rule = rule.with_condition(Atom::new(var, value)).map_err(|_| LearnError::Inseparable)?;
        matched.retain(|n| n.get(var) == Some(value));
    }
    Ok(rule)
}

/// Rules for one target atom that jointly cover every positive and match no
/// negative.
pub fn learn_atom(split: &PosNegSplit, cfg: &LearnerConfig) -> Result<Vec<Rule>, LearnError> {
    let mut remaining: Vec<&State> = split.positives.iter().collect();
    let mut rules = Vec::new();
    while !remaining.is_empty() {
        let pos = match cfg.tie_break {
            TieBreak::LowestIndex | TieBreak::MostExcluding => remaining[0],
            TieBreak::HighestIndex => remaining[remaining.len() - 1],
        };
        let rule = match cfg.tie_break {
            TieBreak::MostExcluding => grow_greedy(split.atom, pos, &split.negatives)?,
            tie => {
                let mut rule = Rule::fact(split.atom);
                for neg in &split.negatives {
                    if rule.matches_values(neg.values()) {
                        rule = specialize_against(&rule, pos, neg, tie)?;
                    }
                }
                rule
            }
        };
        let rule = minimize(&rule, &split.negatives);
        remaining.retain(|s| !rule.matches_values(s.values()));
        rules.push(rule);
    }
    Ok(rules)
}

/// Learns a weighted program that realizes every transition, with every rule
/// consistent and irreducible.
pub fn pride(ts: &[Transition], schema: &Schema, cfg: &LearnerConfig) -> Result<Program, LearnError> {
    validate(ts, schema)?;
    let grouped = group_by_features(ts, schema.targets().len());
    let atoms = schema.target_atoms();
    let first_seen: HashMap<&State, usize> = match cfg.tie_break {
        TieBreak::MostExcluding => ts.iter().enumerate().rev().map(|(i, t)| (&t.features, i)).collect(),
        _ => HashMap::new(),
    };
    let learn = |&atom: &Atom| {
        let mut split = split_grouped(&grouped, atom);
        if !first_seen.is_empty() {
            split.positives.sort_by_key(|s| first_seen[s]);
        }
        learn_atom(&split, cfg)
    };
    let per_atom: Vec<Vec<Rule>> = if cfg.parallel_targets {
        atoms.par_iter().map(learn).collect::<Result<_, _>>()?
    } else {
        atoms.iter().map(learn).collect::<Result<_, _>>()?
    };
    let program = Program::new(schema.clone(), per_atom.into_iter().flatten())
        .expect("learned rules are built from schema-checked states");
    Ok(program.weighted(ts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvl::Variable;

    fn bool_schema(n: usize) -> Schema {
        let names = ["a", "b", "c", "d"];
        Schema::new(
            (0..n).map(|i| Variable::range(names[i], 1)).collect(),
            vec![Variable::range("y", 1)],
        )
        .unwrap()
    }

    fn truth_table(f: impl Fn(u32, u32) -> u32) -> Vec<Transition> {
        let mut ts = Vec::new();
        for a in 0..2 {
            for b in 0..2 {
                ts.push(Transition::new(vec![a, b], vec![f(a, b)]));
            }
        }
        ts
    }

    fn r(head: u32, body: &[(usize, u32)]) -> Rule {
        Rule::new(Atom::new(0, head), body.iter().map(|&(v, x)| Atom::new(v, x))).unwrap()
    }

    fn st(v: &[u32]) -> State {
        State::new(v.to_vec())
    }

    #[test]
    fn split_examples() {
        let schema = Schema::new(vec![Variable::range("a", 1)], vec![Variable::range("y", 2)]).unwrap();
        let ts = vec![Transition::new(vec![1], vec![1]), Transition::new(vec![0], vec![0])];
        let s = extract_pos_neg(&ts, &schema, Atom::new(0, 1)).unwrap();
        assert_eq!(s.positives, vec![st(&[1])]);
        assert_eq!(s.negatives, vec![st(&[0])]);

        let nondet = vec![Transition::new(vec![1], vec![0]), Transition::new(vec![1], vec![1])];
        let s = extract_pos_neg(&nondet, &schema, Atom::new(0, 1)).unwrap();
        assert_eq!(s.positives, vec![st(&[1])]);
        assert!(s.negatives.is_empty());

        let s = extract_pos_neg(&ts, &schema, Atom::new(0, 2)).unwrap();
        assert!(s.positives.is_empty());
        assert_eq!(s.negatives, vec![st(&[0]), st(&[1])]);

        let err = extract_pos_neg(&ts, &schema, Atom::new(0, 5)).unwrap_err();
        assert!(matches!(err, LearnError::UnknownAtom(_)));
        assert_eq!(extract_pos_neg(&[], &schema, Atom::new(0, 1)).unwrap_err(), LearnError::EmptyInput);
    }

    #[test]
    fn specialize_examples() {
        let tie = TieBreak::LowestIndex;
        let got = specialize_against(&Rule::fact(Atom::new(0, 1)), &st(&[1, 0]), &st(&[1, 1]), tie).unwrap();
        assert_eq!(got, r(1, &[(1, 0)]));
        let got = specialize_against(&Rule::fact(Atom::new(0, 1)), &st(&[1, 0]), &st(&[0, 1]), tie).unwrap();
        assert_eq!(got, r(1, &[(0, 1)]));
        let got = specialize_against(&Rule::fact(Atom::new(0, 1)), &st(&[1, 0]), &st(&[0, 1]), TieBreak::HighestIndex)
            .unwrap();
        assert_eq!(got, r(1, &[(1, 0)]));
        let got = specialize_against(&r(1, &[(0, 1)]), &st(&[1, 0, 0]), &st(&[1, 0, 1]), tie).unwrap();
        assert_eq!(got, r(1, &[(0, 1), (2, 0)]));
        let err = specialize_against(&Rule::fact(Atom::new(0, 1)), &st(&[1, 0]), &st(&[1, 0]), tie);
        assert_eq!(err.unwrap_err(), LearnError::Inseparable);
    }

    #[test]
    fn minimize_examples() {
        let got = minimize(&r(1, &[(0, 1), (1, 0)]), &[st(&[0, 0])]);
        assert_eq!(got, r(1, &[(0, 1)]));
        assert_eq!(minimize(&Rule::fact(Atom::new(0, 1)), &[]), Rule::fact(Atom::new(0, 1)));
        let both = r(1, &[(0, 1), (1, 1)]);
        assert_eq!(minimize(&both, &[st(&[1, 0]), st(&[0, 1])]), both);
    }

    #[test]
    fn learn_atom_on_and() {
        let schema = bool_schema(2);
        let ts = truth_table(|a, b| a & b);
        let cfg = LearnerConfig::default();
        let s1 = extract_pos_neg(&ts, &schema, Atom::new(0, 1)).unwrap();
        assert_eq!(learn_atom(&s1, &cfg).unwrap(), vec![r(1, &[(0, 1), (1, 1)])]);
        let s0 = extract_pos_neg(&ts, &schema, Atom::new(0, 0)).unwrap();
        let mut got = learn_atom(&s0, &cfg).unwrap();
        got.sort();
        assert_eq!(got, vec![r(0, &[(0, 0)]), r(0, &[(1, 0)])]);
    }

    #[test]
    fn constant_target_gives_fact() {
        let schema = bool_schema(2);
        let ts = truth_table(|_, _| 1);
        let s = extract_pos_neg(&ts, &schema, Atom::new(0, 1)).unwrap();
        assert_eq!(learn_atom(&s, &LearnerConfig::default()).unwrap(), vec![Rule::fact(Atom::new(0, 1))]);
        let s = extract_pos_neg(&ts, &schema, Atom::new(0, 0)).unwrap();
        assert!(learn_atom(&s, &LearnerConfig::default()).unwrap().is_empty());
    }

    #[test]
    fn xor_program() {
        let schema = bool_schema(2);
        let p = pride(&truth_table(|a, b| a ^ b), &schema, &LearnerConfig::default()).unwrap();
        let expected = Program::new(
            schema,
            [r(0, &[(0, 0), (1, 0)]), r(0, &[(0, 1), (1, 1)]), r(1, &[(0, 0), (1, 1)]), r(1, &[(0, 1), (1, 0)])],
        )
        .unwrap();
        assert_eq!(p, expected);
        assert!(p.rules().iter().all(|r| r.weight == 1));
    }

    #[test]
    fn single_transition_gives_fact() {
        let schema = Schema::new(vec![Variable::range("a", 1)], vec![Variable::range("y", 2)]).unwrap();
        let p = pride(&[Transition::new(vec![0], vec![2])], &schema, &LearnerConfig::default()).unwrap();
        assert_eq!(p.rules(), &[Rule::fact(Atom::new(0, 2))]);
        assert_eq!(p.rules()[0].weight, 1);
    }

    #[test]
    fn schema_violations_are_reported() {
        let schema = bool_schema(2);
        let ts = vec![Transition::new(vec![0, 1], vec![1]), Transition::new(vec![0, 2], vec![1])];
        let err = pride(&ts, &schema, &LearnerConfig::default()).unwrap_err();
        assert!(matches!(err, LearnError::Schema { index: 1, .. }));
        assert_eq!(pride(&[], &schema, &LearnerConfig::default()).unwrap_err(), LearnError::EmptyInput);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let schema = bool_schema(3);
        let ts: Vec<_> = (0..8u32)
            .map(|i| Transition::new(vec![i & 1, (i >> 1) & 1, (i >> 2) & 1], vec![u32::from(i % 3 == 0)]))
            .collect();
        let par = pride(&ts, &schema, &LearnerConfig { parallel_targets: true, ..Default::default() }).unwrap();
        let ser = pride(&ts, &schema, &LearnerConfig { parallel_targets: false, ..Default::default() }).unwrap();
        assert_eq!(crate::mvl::serialize_program(&par), crate::mvl::serialize_program(&ser));
    }

    fn greedy() -> LearnerConfig {
        LearnerConfig { tie_break: TieBreak::MostExcluding, ..Default::default() }
    }

    #[test]
    fn greedy_matches_lowest_index_on_toy_tables() {
        let schema = bool_schema(2);
        for f in [|a, b| a & b, |a, b| a | b, |a, b| a ^ b, |_, _| 1] {
            let ts = truth_table(f);
            let lo = pride(&ts, &schema, &LearnerConfig::default()).unwrap();
            assert_eq!(pride(&ts, &schema, &greedy()).unwrap(), lo);
        }
    }

    #[test]
    fn greedy_takes_the_most_excluding_condition() {
        // a separates one negative, b separates all three.
        let schema = Schema::new(
            vec![Variable::range("a", 1), Variable::range("b", 1)],
            vec![Variable::range("y", 1)],
        )
        .unwrap();
        let ts = vec![
            Transition::new(vec![0, 1], vec![1]),
            Transition::new(vec![0, 0], vec![0]),
            Transition::new(vec![1, 0], vec![0]),
        ];
        let p = pride(&ts, &schema, &greedy()).unwrap();
        assert_eq!(p.rules_for(Atom::new(0, 1)).collect::<Vec<_>>(), vec![&r(1, &[(1, 1)])]);
        let lo = pride(&ts, &schema, &LearnerConfig::default()).unwrap();
        assert_eq!(lo.rules_for(Atom::new(0, 1)).collect::<Vec<_>>(), vec![&r(1, &[(1, 1)])]);
    }

    #[test]
    fn greedy_picks_positives_in_observation_order() {
        // Seeded by (1,1,0) the first rule is y(1) <- a(1), which leaves
        // (0,1,1) for a second rule; seeded by (0,1,1) one rule covers both.
        let schema = bool_schema(3);
        let ts = vec![
            Transition::new(vec![1, 1, 0], vec![1]),
            Transition::new(vec![0, 1, 1], vec![1]),
            Transition::new(vec![0, 0, 0], vec![0]),
        ];
        let swapped = vec![ts[1].clone(), ts[0].clone(), ts[2].clone()];
        let a = pride(&ts, &schema, &greedy()).unwrap();
        let b = pride(&swapped, &schema, &greedy()).unwrap();
        let heads = |p: &Program| p.rules_for(Atom::new(0, 1)).cloned().collect::<Vec<_>>();
        assert_eq!(heads(&a), vec![r(1, &[(0, 1)]), r(1, &[(1, 1)])]);
        assert_eq!(heads(&b), vec![r(1, &[(1, 1)])]);
        for p in [&a, &b] {
            assert!(p.is_complete(&ts) && p.is_correct(&ts));
        }
    }
}
