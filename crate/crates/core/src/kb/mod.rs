//! Domain vocabulary and the validated knowledge base.
//!
//! A [`KnowledgeBase`] is built once from a flat list of [`Record`]s and is
//! immutable afterwards. Construction canonicalises everything: entities are
//! ordered by id, symmetric assertions are stored as ordered pairs and
//! duplicates are collapsed, so two permutations of the same record list
//! produce equal knowledge bases.

mod partition;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use partition::UnionFind;

macro_rules! index_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub(crate) u32);

        impl $name {
            pub fn index(self) -> usize {
                self.0 as usize
            }
        }
    };
}

index_type!(
    /// Position of a species in [`KnowledgeBase::species`].
    SpeciesRef
);
index_type!(
    /// Position of a structure in [`KnowledgeBase::structures`].
    StructureRef
);
index_type!(RealizableRef);
index_type!(ProcessRef);
index_type!(
    /// Position of a bearing in [`KnowledgeBase::bearings`]. Bearings are
    /// ordered by (structure id, realizable id).
    BearingRef
);
index_type!(
    /// A homology equivalence class.
    GroupRef
);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    OrganismPart,
    WholeOrganism,
    Artifact,
    Other,
}

impl Category {
    /// Organism parts and whole organisms; the only structures that take
    /// part in homology and carry a species.
    pub fn is_organismal(self) -> bool {
        matches!(self, Category::OrganismPart | Category::WholeOrganism)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::OrganismPart => "organism-part",
            Category::WholeOrganism => "whole-organism",
            Category::Artifact => "artifact",
            Category::Other => "other",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "organism-part" => Ok(Category::OrganismPart),
            "whole-organism" => Ok(Category::WholeOrganism),
            "artifact" => Ok(Category::Artifact),
            "other" => Ok(Category::Other),
            _ => Err(format!("unknown category `{s}`")),
        }
    }
}

/// One declaration or assertion, as it appears in an input file.
#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Species {
        id: String,
        extant: bool,
    },
    Related {
        a: String,
        b: String,
    },
    Structure {
        id: String,
        category: Category,
        species: Option<String>,
        name: Option<String>,
    },
    Realizable {
        id: String,
        name: Option<String>,
    },
    Process {
        id: String,
        name: Option<String>,
    },
    Realizes {
        realizable: String,
        process: String,
    },
    Bears {
        structure: String,
        realizable: String,
        prevalence: Option<f64>,
    },
    Designed {
        structure: String,
        process: String,
    },
    Homolog {
        left: String,
        right: String,
    },
    AssertedFunction {
        structure: String,
        realizable: String,
    },
}

impl Record {
    /// True if `id` appears anywhere in the record.
    pub fn mentions(&self, id: &str) -> bool {
        match self {
            Record::Species { id: x, .. }
            | Record::Structure { id: x, .. }
            | Record::Realizable { id: x, .. }
            | Record::Process { id: x, .. } => {
                x == id || matches!(self, Record::Structure { species: Some(s), .. } if s == id)
            }
            Record::Related { a, b } => a == id || b == id,
            Record::Realizes {
                realizable,
                process,
            } => realizable == id || process == id,
            Record::Bears {
                structure,
                realizable,
                ..
            }
            | Record::AssertedFunction {
                structure,
                realizable,
            } => structure == id || realizable == id,
            Record::Designed { structure, process } => structure == id || process == id,
            Record::Homolog { left, right } => left == id || right == id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Species {
    pub id: String,
    pub name: String,
    pub extant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub id: String,
    pub name: String,
    pub category: Category,
    pub species: Option<SpeciesRef>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizableKind {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessKind {
    pub id: String,
    pub name: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bearing {
    pub structure: StructureRef,
    pub realizable: RealizableRef,
    /// Fraction of individuals of the structure's species bearing the
    /// realizable. Always `None` for artifacts and other non-organismal
    /// structures.
    pub prevalence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DesignAssertion {
    pub designee: StructureRef,
    pub purpose: ProcessRef,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KbError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("{context} refers to unknown {expected} `{id}`")]
    DanglingReference {
        id: String,
        expected: &'static str,
        context: &'static str,
    },
    #[error("structure `{0}` is an artifact or other non-organismal entity but names a species")]
    SpeciesOnArtifact(String),
    #[error("structure `{0}` is organismal but has no species")]
    MissingSpeciesOnOrganismal(String),
    #[error("prevalence {value} of `{realizable}` on `{structure}` is outside [0, 1]")]
    PrevalenceOutOfRange {
        structure: String,
        realizable: String,
        value: f64,
    },
    #[error("prevalence given for `{realizable}` on non-organismal structure `{structure}`")]
    PrevalenceOnNonOrganismal {
        structure: String,
        realizable: String,
    },
    #[error("structure `{0}` is asserted homologous to itself")]
    SelfHomology(String),
    #[error("homology asserted on non-organismal structure `{0}`")]
    NonOrganismalHomolog(String),
    #[error("species `{0}` is asserted related to itself")]
    SelfRelatedness(String),
    #[error("realizable `{0}` is linked to more than one process")]
    DuplicateRealizationLink(String),
    #[error("`{structure}` bears `{realizable}` more than once")]
    DuplicateBearing {
        structure: String,
        realizable: String,
    },
    #[error("asserted function `{realizable}` of `{structure}` has no matching bearing")]
    AssertedFunctionWithoutBearing {
        structure: String,
        realizable: String,
    },
    #[error("unknown structure `{0}`")]
    UnknownStructure(String),
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
}

impl KbError {
    /// The id most directly responsible for the error, used to point back
    /// at a source line.
    pub fn subject(&self) -> &str {
        match self {
            KbError::DuplicateId(id)
            | KbError::SpeciesOnArtifact(id)
            | KbError::MissingSpeciesOnOrganismal(id)
            | KbError::SelfHomology(id)
            | KbError::NonOrganismalHomolog(id)
            | KbError::SelfRelatedness(id)
            | KbError::DuplicateRealizationLink(id)
            | KbError::UnknownStructure(id)
            | KbError::UnknownSpecies(id) => id,
            KbError::DanglingReference { id, .. } => id,
            KbError::PrevalenceOutOfRange { structure, .. }
            | KbError::PrevalenceOnNonOrganismal { structure, .. }
            | KbError::DuplicateBearing { structure, .. }
            | KbError::AssertedFunctionWithoutBearing { structure, .. } => structure,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EntityKind {
    Species,
    Structure,
    Realizable,
    Process,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    species: Vec<Species>,
    structures: Vec<Structure>,
    realizables: Vec<RealizableKind>,
    processes: Vec<ProcessKind>,
    bearings: Vec<Bearing>,
    homologies: Vec<(StructureRef, StructureRef)>,
    relatedness: Vec<(SpeciesRef, SpeciesRef)>,
    designs: Vec<DesignAssertion>,
    realized_by: Vec<Option<ProcessRef>>,
    asserted_functions: Vec<BearingRef>,

    ids: HashMap<String, (EntityKind, u32)>,
    bearing_index: HashMap<(StructureRef, RealizableRef), BearingRef>,
    group_of: Vec<Option<GroupRef>>,
    groups: Vec<Vec<StructureRef>>,
    related_to: Vec<Vec<SpeciesRef>>,
    designs_of: Vec<Vec<ProcessRef>>,
}

/// Builds and validates a knowledge base from declaration and assertion
/// records. The result does not depend on record order.
pub fn build_kb<I>(records: I) -> Result<KnowledgeBase, KbError>
where
    I: IntoIterator<Item = Record>,
{
    KnowledgeBase::build(records)
}

fn sorted_by_id<T>(mut items: Vec<T>, id: impl Fn(&T) -> &str) -> Vec<T> {
    items.sort_by(|a, b| id(a).cmp(id(b)));
    items
}

impl KnowledgeBase {
    pub fn empty() -> Self {
        build_kb(Vec::new()).expect("empty knowledge base is valid")
    }

    fn build<I>(records: I) -> Result<Self, KbError>
    where
        I: IntoIterator<Item = Record>,
    {
        let mut species = Vec::new();
        let mut structures = Vec::new();
        let mut realizables = Vec::new();
        let mut processes = Vec::new();
        let mut related = Vec::new();
        let mut realizes = Vec::new();
        let mut bears = Vec::new();
        let mut designed = Vec::new();
        let mut homologs = Vec::new();
        let mut asserted = Vec::new();

        for record in records {
            match record {
                Record::Species { id, extant } => species.push(Species {
                    name: id.clone(),
                    id,
                    extant,
                }),
                Record::Structure {
                    id,
                    category,
                    species,
                    name,
                } => structures.push((id, category, species, name)),
                Record::Realizable { id, name } => realizables.push(RealizableKind {
                    name: name.unwrap_or_else(|| id.clone()),
                    id,
                }),
                Record::Process { id, name } => processes.push(ProcessKind {
                    name: name.unwrap_or_else(|| id.clone()),
                    id,
                }),
                Record::Related { a, b } => related.push((a, b)),
                Record::Realizes {
                    realizable,
                    process,
                } => realizes.push((realizable, process)),
                Record::Bears {
                    structure,
                    realizable,
                    prevalence,
                } => bears.push((structure, realizable, prevalence)),
                Record::Designed { structure, process } => designed.push((structure, process)),
                Record::Homolog { left, right } => homologs.push((left, right)),
                Record::AssertedFunction {
                    structure,
                    realizable,
                } => asserted.push((structure, realizable)),
            }
        }

        let species = sorted_by_id(species, |s| &s.id);
        let structures = sorted_by_id(structures, |s| &s.0);
        let realizables = sorted_by_id(realizables, |r| &r.id);
        let processes = sorted_by_id(processes, |p| &p.id);

        let mut ids = HashMap::new();
        let declared = species
            .iter()
            .map(|s| (s.id.as_str(), EntityKind::Species))
            .enumerate()
            .chain(
                structures
                    .iter()
                    .map(|s| (s.0.as_str(), EntityKind::Structure))
                    .enumerate(),
            )
            .chain(
                realizables
                    .iter()
                    .map(|r| (r.id.as_str(), EntityKind::Realizable))
                    .enumerate(),
            )
            .chain(
                processes
                    .iter()
                    .map(|p| (p.id.as_str(), EntityKind::Process))
                    .enumerate(),
            );
        for (pos, (id, kind)) in declared {
            if ids.insert(id.to_owned(), (kind, pos as u32)).is_some() {
                return Err(KbError::DuplicateId(id.to_owned()));
            }
        }

        let lookup = |id: &str, kind: EntityKind, expected, context| match ids.get(id) {
            Some(&(k, pos)) if k == kind => Ok(pos),
            _ => Err(KbError::DanglingReference {
                id: id.to_owned(),
                expected,
                context,
            }),
        };
        let species_ref =
            |id: &str, context| lookup(id, EntityKind::Species, "species", context).map(SpeciesRef);
        let structure_ref = |id: &str, context| {
            lookup(id, EntityKind::Structure, "structure", context).map(StructureRef)
        };
        let realizable_ref = |id: &str, context| {
            lookup(id, EntityKind::Realizable, "realizable", context).map(RealizableRef)
        };
        let process_ref =
            |id: &str, context| lookup(id, EntityKind::Process, "process", context).map(ProcessRef);

        let structures = structures
            .into_iter()
            .map(|(id, category, species, name)| {
                let species = match (category.is_organismal(), species) {
                    (true, Some(s)) => Some(species_ref(&s, "structure")?),
                    (true, None) => return Err(KbError::MissingSpeciesOnOrganismal(id)),
                    (false, Some(_)) => return Err(KbError::SpeciesOnArtifact(id)),
                    (false, None) => None,
                };
                Ok(Structure {
                    name: name.unwrap_or_else(|| id.clone()),
                    id,
                    category,
                    species,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let mut realized_by: Vec<Option<ProcessRef>> = vec![None; realizables.len()];
        for (r, p) in &realizes {
            let r_ref = realizable_ref(r, "realizes")?;
            let p_ref = process_ref(p, "realizes")?;
            match realized_by[r_ref.index()] {
                None => realized_by[r_ref.index()] = Some(p_ref),
                Some(existing) if existing == p_ref => {}
                Some(_) => return Err(KbError::DuplicateRealizationLink(r.clone())),
            }
        }

        let mut bearings = Vec::with_capacity(bears.len());
        for (s, r, prevalence) in &bears {
            let s_ref = structure_ref(s, "bears")?;
            let r_ref = realizable_ref(r, "bears")?;
            if let Some(p) = *prevalence {
                if !structures[s_ref.index()].category.is_organismal() {
                    return Err(KbError::PrevalenceOnNonOrganismal {
                        structure: s.clone(),
                        realizable: r.clone(),
                    });
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(KbError::PrevalenceOutOfRange {
                        structure: s.clone(),
                        realizable: r.clone(),
                        value: p,
                    });
                }
            }
            bearings.push(Bearing {
                structure: s_ref,
                realizable: r_ref,
                prevalence: *prevalence,
            });
        }
        bearings.sort_by_key(|b| (b.structure, b.realizable));
        let mut bearing_index = HashMap::with_capacity(bearings.len());
        for (pos, b) in bearings.iter().enumerate() {
            if bearing_index
                .insert((b.structure, b.realizable), BearingRef(pos as u32))
                .is_some()
            {
                return Err(KbError::DuplicateBearing {
                    structure: structures[b.structure.index()].id.clone(),
                    realizable: realizables[b.realizable.index()].id.clone(),
                });
            }
        }

        let mut homology_set = BTreeSet::new();
        for (l, r) in &homologs {
            let l_ref = structure_ref(l, "homolog")?;
            let r_ref = structure_ref(r, "homolog")?;
            if l_ref == r_ref {
                return Err(KbError::SelfHomology(l.clone()));
            }
            for (id, s) in [(l, l_ref), (r, r_ref)] {
                if !structures[s.index()].category.is_organismal() {
                    return Err(KbError::NonOrganismalHomolog(id.clone()));
                }
            }
            homology_set.insert((l_ref.min(r_ref), l_ref.max(r_ref)));
        }
        let homologies: Vec<_> = homology_set.into_iter().collect();

        let mut related_set = BTreeSet::new();
        for (a, b) in &related {
            let a_ref = species_ref(a, "related")?;
            let b_ref = species_ref(b, "related")?;
            if a_ref == b_ref {
                return Err(KbError::SelfRelatedness(a.clone()));
            }
            related_set.insert((a_ref.min(b_ref), a_ref.max(b_ref)));
        }
        let relatedness: Vec<_> = related_set.into_iter().collect();

        let designs: Vec<_> = designed
            .iter()
            .map(|(s, p)| {
                Ok(DesignAssertion {
                    designee: structure_ref(s, "designed")?,
                    purpose: process_ref(p, "designed")?,
                })
            })
            .collect::<Result<BTreeSet<_>, KbError>>()?
            .into_iter()
            .collect();

        let asserted_functions: Vec<_> = asserted
            .iter()
            .map(|(s, r)| {
                let key = (
                    structure_ref(s, "asserted_function")?,
                    realizable_ref(r, "asserted_function")?,
                );
                bearing_index.get(&key).copied().ok_or_else(|| {
                    KbError::AssertedFunctionWithoutBearing {
                        structure: s.clone(),
                        realizable: r.clone(),
                    }
                })
            })
            .collect::<Result<BTreeSet<_>, KbError>>()?
            .into_iter()
            .collect();

        // Homology classes over organismal structures only.
        let mut uf = UnionFind::new(structures.len());
        for &(l, r) in &homologies {
            uf.union(l.index(), r.index());
        }
        let (labels, _) = uf.into_labels();
        let mut group_of = vec![None; structures.len()];
        let mut groups: Vec<Vec<StructureRef>> = Vec::new();
        let mut dense = HashMap::new();
        for (pos, s) in structures.iter().enumerate() {
            if !s.category.is_organismal() {
                continue;
            }
            let next = dense.len() as u32;
            let g = *dense.entry(labels[pos]).or_insert(next);
            if g as usize == groups.len() {
                groups.push(Vec::new());
            }
            groups[g as usize].push(StructureRef(pos as u32));
            group_of[pos] = Some(GroupRef(g));
        }

        let mut related_to = vec![Vec::new(); species.len()];
        for &(a, b) in &relatedness {
            related_to[a.index()].push(b);
            related_to[b.index()].push(a);
        }
        for adjacent in &mut related_to {
            adjacent.sort();
        }

        let mut designs_of = vec![Vec::new(); structures.len()];
        for d in &designs {
            designs_of[d.designee.index()].push(d.purpose);
        }

        Ok(KnowledgeBase {
            species,
            structures,
            realizables,
            processes,
            bearings,
            homologies,
            relatedness,
            designs,
            realized_by,
            asserted_functions,
            ids,
            bearing_index,
            group_of,
            groups,
            related_to,
            designs_of,
        })
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn structures(&self) -> &[Structure] {
        &self.structures
    }

    pub fn realizables(&self) -> &[RealizableKind] {
        &self.realizables
    }

    pub fn processes(&self) -> &[ProcessKind] {
        &self.processes
    }

    pub fn bearings(&self) -> &[Bearing] {
        &self.bearings
    }

    /// Asserted homology pairs, each ordered `(smaller, larger)`.
    pub fn homologies(&self) -> &[(StructureRef, StructureRef)] {
        &self.homologies
    }

    /// Asserted relatedness pairs, each ordered `(smaller, larger)`.
    pub fn relatedness(&self) -> &[(SpeciesRef, SpeciesRef)] {
        &self.relatedness
    }

    pub fn designs(&self) -> &[DesignAssertion] {
        &self.designs
    }

    pub fn asserted_functions(&self) -> &[BearingRef] {
        &self.asserted_functions
    }

    pub fn is_asserted_function(&self, b: BearingRef) -> bool {
        self.asserted_functions.binary_search(&b).is_ok()
    }

    /// Realization links as `(realizable, process)` pairs in realizable order.
    pub fn realization_links(&self) -> impl Iterator<Item = (RealizableRef, ProcessRef)> + '_ {
        self.realized_by
            .iter()
            .enumerate()
            .filter_map(|(r, p)| p.map(|p| (RealizableRef(r as u32), p)))
    }

    pub fn realized_by(&self, r: RealizableRef) -> Option<ProcessRef> {
        self.realized_by[r.index()]
    }

    pub fn designed_for(&self, s: StructureRef) -> &[ProcessRef] {
        &self.designs_of[s.index()]
    }

    pub fn structure(&self, s: StructureRef) -> &Structure {
        &self.structures[s.index()]
    }

    pub fn species_of(&self, s: StructureRef) -> Option<SpeciesRef> {
        self.structures[s.index()].species
    }

    pub fn species_at(&self, s: SpeciesRef) -> &Species {
        &self.species[s.index()]
    }

    pub fn realizable(&self, r: RealizableRef) -> &RealizableKind {
        &self.realizables[r.index()]
    }

    pub fn process(&self, p: ProcessRef) -> &ProcessKind {
        &self.processes[p.index()]
    }

    pub fn bearing(&self, b: BearingRef) -> &Bearing {
        &self.bearings[b.index()]
    }

    pub fn bearing_refs(&self) -> impl ExactSizeIterator<Item = BearingRef> {
        (0..self.bearings.len() as u32).map(BearingRef)
    }

    fn lookup(&self, id: &str, kind: EntityKind) -> Option<u32> {
        match self.ids.get(id) {
            Some(&(k, pos)) if k == kind => Some(pos),
            _ => None,
        }
    }

    pub fn species_ref(&self, id: &str) -> Option<SpeciesRef> {
        self.lookup(id, EntityKind::Species).map(SpeciesRef)
    }

    pub fn structure_ref(&self, id: &str) -> Option<StructureRef> {
        self.lookup(id, EntityKind::Structure).map(StructureRef)
    }

    pub fn realizable_ref(&self, id: &str) -> Option<RealizableRef> {
        self.lookup(id, EntityKind::Realizable).map(RealizableRef)
    }

    pub fn process_ref(&self, id: &str) -> Option<ProcessRef> {
        self.lookup(id, EntityKind::Process).map(ProcessRef)
    }

    pub fn bearing_ref(&self, structure: &str, realizable: &str) -> Option<BearingRef> {
        let key = (
            self.structure_ref(structure)?,
            self.realizable_ref(realizable)?,
        );
        self.bearing_index.get(&key).copied()
    }

    pub fn find_bearing(&self, s: StructureRef, r: RealizableRef) -> Option<BearingRef> {
        self.bearing_index.get(&(s, r)).copied()
    }

    /// Homology class of an organismal structure; `None` for artifacts and
    /// other non-organismal structures.
    pub fn group_of(&self, s: StructureRef) -> Option<GroupRef> {
        self.group_of[s.index()]
    }

    /// All homology classes. Together they partition the organismal
    /// structures.
    pub fn groups(&self) -> &[Vec<StructureRef>] {
        &self.groups
    }

    pub fn group_members(&self, g: GroupRef) -> &[StructureRef] {
        &self.groups[g.index()]
    }

    /// Species with a relatedness assertion to `s`, in id order.
    pub fn related_species(&self, s: SpeciesRef) -> &[SpeciesRef] {
        &self.related_to[s.index()]
    }

    pub fn are_related(&self, a: SpeciesRef, b: SpeciesRef) -> bool {
        self.related_to[a.index()].binary_search(&b).is_ok()
    }

    /// The structures sharing common descent with `structure`, including
    /// itself. Non-organismal structures are their own singleton class.
    pub fn homology_group(&self, structure: &str) -> Result<BTreeSet<&str>, KbError> {
        let s = self
            .structure_ref(structure)
            .ok_or_else(|| KbError::UnknownStructure(structure.to_owned()))?;
        Ok(match self.group_of(s) {
            Some(g) => self
                .group_members(g)
                .iter()
                .map(|&m| self.structure(m).id.as_str())
                .collect(),
            None => BTreeSet::from([self.structure(s).id.as_str()]),
        })
    }

    /// Explicit relatedness lookup. Symmetric, and false for a species
    /// compared with itself.
    pub fn closely_related(&self, a: &str, b: &str) -> Result<bool, KbError> {
        let a_ref = self
            .species_ref(a)
            .ok_or_else(|| KbError::UnknownSpecies(a.to_owned()))?;
        let b_ref = self
            .species_ref(b)
            .ok_or_else(|| KbError::UnknownSpecies(b.to_owned()))?;
        Ok(self.are_related(a_ref, b_ref))
    }

    pub fn is_empty(&self) -> bool {
        self.species.is_empty()
            && self.structures.is_empty()
            && self.realizables.is_empty()
            && self.processes.is_empty()
    }
}
