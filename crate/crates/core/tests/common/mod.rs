#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use funrole::kb::{Category, Record};
use funrole::{ClassificationReport, Label};
use rand::seq::SliceRandom;
use rand::Rng;

/// Upper bound on organismal bearings, so candidate sets stay small enough
/// for the exhaustive oracle.
pub const MAX_ORGANISMAL_BEARINGS: usize = 12;

const PREVALENCES: [f64; 8] = [0.0, 0.1, 0.3, 0.5, 0.51, 0.7, 0.9, 1.0];

/// Random small knowledge base as a record list. Some prevalences and some
/// species' relatedness are left out so open-world gaps occur.
pub fn random_records<R: Rng>(rng: &mut R) -> Vec<Record> {
    let mut records = Vec::new();
    let n_species = rng.gen_range(1..=5);
    let species: Vec<String> = (0..n_species).map(|i| format!("sp{i}")).collect();
    for s in &species {
        records.push(Record::Species {
            id: s.clone(),
            extant: rng.gen_bool(0.8),
        });
    }
    for i in 0..n_species {
        for j in i + 1..n_species {
            if rng.gen_bool(0.5) {
                let (a, b) = if rng.gen_bool(0.5) { (i, j) } else { (j, i) };
                records.push(Record::Related {
                    a: species[a].clone(),
                    b: species[b].clone(),
                });
            }
        }
    }

    let n_organismal = rng.gen_range(1..=7);
    let organismal: Vec<String> = (0..n_organismal).map(|i| format!("org{i}")).collect();
    for s in &organismal {
        records.push(Record::Structure {
            id: s.clone(),
            category: if rng.gen_bool(0.7) {
                Category::OrganismPart
            } else {
                Category::WholeOrganism
            },
            species: Some(species.choose(rng).unwrap().clone()),
            name: None,
        });
    }
    let n_other = rng.gen_range(0..=2);
    let others: Vec<String> = (0..n_other).map(|i| format!("thing{i}")).collect();
    for s in &others {
        records.push(Record::Structure {
            id: s.clone(),
            category: if rng.gen_bool(0.5) {
                Category::Artifact
            } else {
                Category::Other
            },
            species: None,
            name: None,
        });
    }

    let realizables: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("r{i}")).collect();
    let processes: Vec<String> = (0..rng.gen_range(1..=2)).map(|i| format!("p{i}")).collect();
    for r in &realizables {
        records.push(Record::Realizable {
            id: r.clone(),
            name: None,
        });
    }
    for p in &processes {
        records.push(Record::Process {
            id: p.clone(),
            name: None,
        });
    }
    for r in &realizables {
        if rng.gen_bool(0.7) {
            records.push(Record::Realizes {
                realizable: r.clone(),
                process: processes.choose(rng).unwrap().clone(),
            });
        }
    }

    let mut organismal_bearings = 0;
    let mut bearings = Vec::new();
    for s in &organismal {
        for r in &realizables {
            if organismal_bearings < MAX_ORGANISMAL_BEARINGS && rng.gen_bool(0.6) {
                organismal_bearings += 1;
                let prevalence = if rng.gen_bool(0.15) {
                    None
                } else if rng.gen_bool(0.7) {
                    Some(*PREVALENCES.choose(rng).unwrap())
                } else {
                    Some(rng.gen_range(0.0..=1.0))
                };
                bearings.push((s.clone(), r.clone(), prevalence));
            }
        }
    }
    for s in &others {
        for r in &realizables {
            if rng.gen_bool(0.5) {
                bearings.push((s.clone(), r.clone(), None));
            }
        }
    }
    for (s, r, p) in &bearings {
        records.push(Record::Bears {
            structure: s.clone(),
            realizable: r.clone(),
            prevalence: *p,
        });
    }

    if organismal.len() >= 2 {
        for _ in 0..rng.gen_range(0..=organismal.len() + 2) {
            let pair: Vec<_> = organismal.choose_multiple(rng, 2).cloned().collect();
            records.push(Record::Homolog {
                left: pair[0].clone(),
                right: pair[1].clone(),
            });
        }
    }

    let all_structures: Vec<&String> = organismal.iter().chain(&others).collect();
    for _ in 0..rng.gen_range(0..=3) {
        records.push(Record::Designed {
            structure: (*all_structures.choose(rng).unwrap()).clone(),
            process: processes.choose(rng).unwrap().clone(),
        });
    }

    for (s, r, _) in &bearings {
        if rng.gen_bool(0.1) {
            records.push(Record::AssertedFunction {
                structure: s.clone(),
                realizable: r.clone(),
            });
        }
    }
    records
}

pub fn labels(report: &ClassificationReport) -> BTreeMap<(String, String), Label> {
    report
        .traces
        .iter()
        .map(|t| ((t.structure.clone(), t.realizable.clone()), t.label))
        .collect()
}

pub fn biological_keys(report: &ClassificationReport) -> BTreeSet<(String, String)> {
    report
        .traces
        .iter()
        .filter(|t| t.label.is_biological())
        .map(|t| (t.structure.clone(), t.realizable.clone()))
        .collect()
}

/// Indices of records of a given shape, for single-record mutations.
pub fn positions(records: &[Record], pred: impl Fn(&Record) -> bool) -> Vec<usize> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| pred(r))
        .map(|(i, _)| i)
        .collect()
}

/// Independent reading of the raw records: homology classes by
/// breadth-first search over asserted pairs, relatedness as an unordered
/// pair set, species per structure.
pub struct RawFacts {
    pub species_of: BTreeMap<String, String>,
    pub related: BTreeSet<(String, String)>,
    pub class_of: BTreeMap<String, usize>,
    pub bears: Vec<(String, String, Option<f64>)>,
}

impl RawFacts {
    pub fn new(records: &[Record]) -> Self {
        let mut species_of = BTreeMap::new();
        let mut related = BTreeSet::new();
        let mut adjacent: BTreeMap<String, Vec<String>> = BTreeMap::new();
        let mut bears = Vec::new();
        for r in records {
            match r {
                Record::Structure {
                    id,
                    species: Some(s),
                    ..
                } => {
                    species_of.insert(id.clone(), s.clone());
                    adjacent.entry(id.clone()).or_default();
                }
                Record::Related { a, b } => {
                    related.insert((a.clone(), b.clone()));
                    related.insert((b.clone(), a.clone()));
                }
                Record::Homolog { left, right } => {
                    adjacent
                        .entry(left.clone())
                        .or_default()
                        .push(right.clone());
                    adjacent
                        .entry(right.clone())
                        .or_default()
                        .push(left.clone());
                }
                Record::Bears {
                    structure,
                    realizable,
                    prevalence,
                } => bears.push((structure.clone(), realizable.clone(), *prevalence)),
                _ => {}
            }
        }
        let mut class_of = BTreeMap::new();
        let mut next = 0;
        for start in adjacent.keys() {
            if class_of.contains_key(start) {
                continue;
            }
            let mut queue = VecDeque::from([start.clone()]);
            class_of.insert(start.clone(), next);
            while let Some(x) = queue.pop_front() {
                for y in &adjacent[&x] {
                    if !class_of.contains_key(y) {
                        class_of.insert(y.clone(), next);
                        queue.push_back(y.clone());
                    }
                }
            }
            next += 1;
        }
        RawFacts {
            species_of,
            related,
            class_of,
            bears,
        }
    }

    /// Whether some other bearing of `realizable` sits on a homologous
    /// structure of a distinct, related species.
    pub fn has_cross_species_cobearer(&self, structure: &str, realizable: &str) -> bool {
        let (Some(class), Some(species)) =
            (self.class_of.get(structure), self.species_of.get(structure))
        else {
            return false;
        };
        self.bears.iter().any(|(s, r, _)| {
            r == realizable
                && self.class_of.get(s) == Some(class)
                && self.species_of.get(s).is_some_and(|sp| {
                    sp != species && self.related.contains(&(species.clone(), sp.clone()))
                })
        })
    }
}
