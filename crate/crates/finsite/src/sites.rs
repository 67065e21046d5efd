//! Sieves, covers, pretopologies and Grothendieck topologies on finitely
//! presented categories. Topologies are generated by fixpoint saturation of
//! the covering axioms inside the (finite) universe of all sieves; the
//! result is always re-checkable with [`is_topology`].

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fincat::{FinCat, MorId, ObjId};

/// A sieve on `base`: a set of morphisms into `base` closed under
/// precomposition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sieve {
    pub base: ObjId,
    pub arrows: BTreeSet<MorId>,
}

impl Sieve {
    pub fn empty(base: &ObjId) -> Self {
        Sieve {
            base: base.clone(),
            arrows: BTreeSet::new(),
        }
    }

    pub fn is_subsieve_of(&self, other: &Sieve) -> bool {
        self.base == other.base && self.arrows.is_subset(&other.arrows)
    }
}

/// The maximal sieve on `u`: every arrow into `u`.
pub fn maximal_sieve(c: &FinCat, u: &ObjId) -> Sieve {
    Sieve {
        base: u.clone(),
        arrows: c.arrows_into(u).into_iter().cloned().collect(),
    }
}

/// Checks closure under precomposition.
pub fn is_sieve(c: &FinCat, s: &Sieve) -> bool {
    s.arrows.iter().all(|f| c.cod(f) == &s.base)
        && s.arrows.iter().all(|f| {
            c.arrows_into(c.dom(f))
                .into_iter()
                .all(|g| match c.composite(f, g) {
                    Some(fg) => s.arrows.contains(fg),
                    None => false,
                })
        })
}

/// A covering family: finitely many morphisms into a common base.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cover {
    pub base: ObjId,
    pub family: Vec<MorId>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SiteError {
    #[error("morphism {mor} has codomain {found}, expected cover base {base}")]
    WrongCodomain {
        mor: MorId,
        found: ObjId,
        base: ObjId,
    },
    #[error("morphism {0} is not in the category")]
    UnknownMorphism(MorId),
    #[error("object {0} is not in the category")]
    UnknownObject(ObjId),
}

/// The sieve generated by a cover: all composites `φ_i ∘ ψ` with `φ_i` in
/// the family and `ψ` composable into it (identities included, so the family
/// itself is a subset).
pub fn generate_sieve(c: &FinCat, cover: &Cover) -> Result<Sieve, SiteError> {
    if !c.has_object(&cover.base) {
        return Err(SiteError::UnknownObject(cover.base.clone()));
    }
    let mut arrows = BTreeSet::new();
    for phi in &cover.family {
        let d = c
            .morphism(phi)
            .ok_or_else(|| SiteError::UnknownMorphism(phi.clone()))?;
        if d.cod != cover.base {
            return Err(SiteError::WrongCodomain {
                mor: phi.clone(),
                found: d.cod.clone(),
                base: cover.base.clone(),
            });
        }
        for psi in c.arrows_into(&d.dom) {
            if let Some(comp) = c.composite(phi, psi) {
                arrows.insert(comp.clone());
            }
        }
    }
    Ok(Sieve {
        base: cover.base.clone(),
        arrows,
    })
}

/// Base change g*S = { h into dom(g) | g∘h ∈ S } for g: V → U.
pub fn pullback_sieve(c: &FinCat, s: &Sieve, g: &MorId) -> Result<Sieve, SiteError> {
    let gd = c
        .morphism(g)
        .ok_or_else(|| SiteError::UnknownMorphism(g.clone()))?;
    if gd.cod != s.base {
        return Err(SiteError::WrongCodomain {
            mor: g.clone(),
            found: gd.cod.clone(),
            base: s.base.clone(),
        });
    }
    let arrows = c
        .arrows_into(&gd.dom)
        .into_iter()
        .filter(|h| match c.composite(g, h) {
            Some(gh) => s.arrows.contains(gh),
            None => false,
        })
        .cloned()
        .collect();
    Ok(Sieve {
        base: gd.dom.clone(),
        arrows,
    })
}

/// Enumerates every sieve on `u` (sets of arrows into `u` closed under
/// precomposition), smallest first. Exhaustive closure over the finite
/// category; fixtures keep the arrow counts small enough for this.
pub fn all_sieves_on(c: &FinCat, u: &ObjId) -> Vec<BTreeSet<MorId>> {
    let arrows: Vec<MorId> = c.arrows_into(u).into_iter().cloned().collect();
    // close(S) = S ∪ {f∘ψ}; a sieve is a fixed point of close.
    let close = |set: &BTreeSet<MorId>| -> BTreeSet<MorId> {
        let mut out = set.clone();
        loop {
            let mut grew = false;
            let current: Vec<MorId> = out.iter().cloned().collect();
            for f in &current {
                for psi in c.arrows_into(c.dom(f)) {
                    if let Some(comp) = c.composite(f, psi) {
                        if out.insert(comp.clone()) {
                            grew = true;
                        }
                    }
                }
            }
            if !grew {
                break;
            }
        }
        out
    };
    let mut seen: BTreeSet<BTreeSet<MorId>> = BTreeSet::new();
    seen.insert(BTreeSet::new());
    // Grow each known sieve by one generator and re-close; this touches every
    // sieve (each is the closure of its own elements) without walking 2^n
    // subsets.
    let mut frontier: Vec<BTreeSet<MorId>> = vec![BTreeSet::new()];
    while let Some(s) = frontier.pop() {
        for a in &arrows {
            if s.contains(a) {
                continue;
            }
            let mut t = s.clone();
            t.insert(a.clone());
            let t = close(&t);
            if seen.insert(t.clone()) {
                frontier.push(t);
            }
        }
    }
    let mut out: Vec<BTreeSet<MorId>> = seen.into_iter().collect();
    out.sort_by_key(|s| (s.len(), s.clone()));
    out
}

/// A Grothendieck topology: for every object, its set of covering sieves
/// (stored extensionally as arrow sets).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub covering: BTreeMap<ObjId, BTreeSet<BTreeSet<MorId>>>,
}

impl Topology {
    pub fn covering_sieves(&self, u: &ObjId) -> impl Iterator<Item = Sieve> + '_ {
        let u = u.clone();
        self.covering
            .get(&u)
            .into_iter()
            .flatten()
            .map(move |arrows| Sieve {
                base: u.clone(),
                arrows: arrows.clone(),
            })
    }

    pub fn covers(&self, s: &Sieve) -> bool {
        self.covering
            .get(&s.base)
            .map(|set| set.contains(&s.arrows))
            .unwrap_or(false)
    }

    pub fn sieve_count(&self) -> usize {
        self.covering.values().map(|s| s.len()).sum()
    }
}

/// The topology whose only covering sieves are the maximal ones.
pub fn trivial_topology(c: &FinCat) -> Topology {
    let covering = c
        .objects()
        .iter()
        .map(|u| {
            let mut set = BTreeSet::new();
            set.insert(maximal_sieve(c, u).arrows);
            (u.clone(), set)
        })
        .collect();
    Topology { covering }
}

/// A violated topology axiom, with the offending data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopologyViolation {
    MissingObject { object: ObjId },
    NotASieve { object: ObjId, sieve: BTreeSet<MorId> },
    MissingMaximal { object: ObjId },
    BaseChange { object: ObjId, sieve: BTreeSet<MorId>, along: MorId },
    LocalCharacter { object: ObjId, sieve: BTreeSet<MorId>, witness: BTreeSet<MorId> },
    UpwardClosure { object: ObjId, sieve: BTreeSet<MorId>, larger: BTreeSet<MorId> },
}

/// Checks all four topology axioms exhaustively (maximality, base change,
/// local character, upward closure), quantifying local character over every
/// sieve of the category.
pub fn is_topology(c: &FinCat, j: &Topology) -> Result<(), TopologyViolation> {
    for u in c.objects() {
        if !j.covering.contains_key(u) {
            return Err(TopologyViolation::MissingObject { object: u.clone() });
        }
    }
    for (u, sieves) in &j.covering {
        let max = maximal_sieve(c, u).arrows;
        for s in sieves {
            let sv = Sieve {
                base: u.clone(),
                arrows: s.clone(),
            };
            if !is_sieve(c, &sv) {
                return Err(TopologyViolation::NotASieve {
                    object: u.clone(),
                    sieve: s.clone(),
                });
            }
        }
        if !sieves.contains(&max) {
            return Err(TopologyViolation::MissingMaximal { object: u.clone() });
        }
        // Base change.
        for s in sieves {
            let sv = Sieve {
                base: u.clone(),
                arrows: s.clone(),
            };
            for g in c.arrows_into(u) {
                let pb = pullback_sieve(c, &sv, g).expect("arrow into base");
                let ok = j
                    .covering
                    .get(&pb.base)
                    .map(|set| set.contains(&pb.arrows))
                    .unwrap_or(false);
                if !ok {
                    return Err(TopologyViolation::BaseChange {
                        object: u.clone(),
                        sieve: s.clone(),
                        along: g.clone(),
                    });
                }
            }
        }
        // Local character and upward closure over the full sieve universe.
        let universe = all_sieves_on(c, u);
        for r in &universe {
            if sieves.contains(r) {
                continue;
            }
            let rv = Sieve {
                base: u.clone(),
                arrows: r.clone(),
            };
            for s in sieves {
                let locally_covering = s.iter().all(|f| {
                    let pb = pullback_sieve(c, &rv, f).expect("arrow into base");
                    j.covering
                        .get(&pb.base)
                        .map(|set| set.contains(&pb.arrows))
                        .unwrap_or(false)
                });
                if locally_covering {
                    return Err(TopologyViolation::LocalCharacter {
                        object: u.clone(),
                        sieve: r.clone(),
                        witness: s.clone(),
                    });
                }
                if s.is_subset(r) {
                    return Err(TopologyViolation::UpwardClosure {
                        object: u.clone(),
                        sieve: s.clone(),
                        larger: r.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Least topology containing the seed sieves: fixpoint saturation over the
/// four axioms inside the finite universe of sieves.
pub fn generate_topology(c: &FinCat, seeds: &[Sieve]) -> Topology {
    saturate(c, seeds, None)
}

/// Same fixpoint, but the scan order of objects and candidate sieves is
/// shuffled by the given seed. The result must coincide with the canonical
/// order: this is the randomized-order oracle for order independence.
pub fn generate_topology_shuffled(c: &FinCat, seeds: &[Sieve], seed: u64) -> Topology {
    saturate(c, seeds, Some(seed))
}

fn saturate(c: &FinCat, seeds: &[Sieve], shuffle_seed: Option<u64>) -> Topology {
    let mut rng = shuffle_seed.map(ChaCha8Rng::seed_from_u64);
    let mut universe: BTreeMap<ObjId, Vec<BTreeSet<MorId>>> = BTreeMap::new();
    for u in c.objects() {
        universe.insert(u.clone(), all_sieves_on(c, u));
    }
    let mut covering: BTreeMap<ObjId, BTreeSet<BTreeSet<MorId>>> = BTreeMap::new();
    for u in c.objects() {
        let mut set = BTreeSet::new();
        set.insert(maximal_sieve(c, u).arrows);
        covering.insert(u.clone(), set);
    }
    for s in seeds {
        covering
            .entry(s.base.clone())
            .or_default()
            .insert(s.arrows.clone());
    }
    loop {
        let mut grew = false;
        let mut objects: Vec<ObjId> = c.objects().to_vec();
        if let Some(r) = rng.as_mut() {
            objects.shuffle(r);
        }
        for u in &objects {
            // Base change out of u.
            let sieves: Vec<BTreeSet<MorId>> =
                covering.get(u).map(|s| s.iter().cloned().collect()).unwrap_or_default();
            for s in &sieves {
                let sv = Sieve {
                    base: u.clone(),
                    arrows: s.clone(),
                };
                for g in c.arrows_into(u) {
                    let pb = pullback_sieve(c, &sv, g).expect("arrow into base");
                    if covering
                        .get_mut(&pb.base)
                        .expect("all objects present")
                        .insert(pb.arrows)
                    {
                        grew = true;
                    }
                }
            }
            // Local character (subsumes upward closure and transitivity):
            // a candidate R joins once some covering S pulls it back to
            // covering sieves everywhere.
            let mut candidates: Vec<BTreeSet<MorId>> = universe
                .get(u)
                .expect("all objects present")
                .iter()
                .filter(|r| !covering.get(u).unwrap().contains(*r))
                .cloned()
                .collect();
            if let Some(r) = rng.as_mut() {
                candidates.shuffle(r);
            }
            for r in candidates {
                let rv = Sieve {
                    base: u.clone(),
                    arrows: r.clone(),
                };
                let admitted = covering.get(u).unwrap().iter().any(|s| {
                    s.iter().all(|f| {
                        let pb = pullback_sieve(c, &rv, f).expect("arrow into base");
                        covering
                            .get(&pb.base)
                            .map(|set| set.contains(&pb.arrows))
                            .unwrap_or(false)
                    })
                });
                if admitted && covering.get_mut(u).unwrap().insert(r) {
                    grew = true;
                }
            }
        }
        if !grew {
            return Topology { covering };
        }
    }
}

/// A pretopology: for each object, a set of covering families.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pretopology {
    pub covers: BTreeMap<ObjId, Vec<Cover>>,
}

impl Pretopology {
    pub fn all_covers(&self) -> impl Iterator<Item = &Cover> {
        self.covers.values().flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PretopologyViolation {
    WrongBase { cover: Cover },
    MissingIdentityCover { object: ObjId },
    Stability { base: ObjId, cover: Cover, along: MorId },
    Transitivity { base: ObjId, cover: Cover },
}

/// Validates the pretopology axioms. Stability is only required where the
/// needed pullbacks exist in the category, matching the generality of sites
/// whose underlying category need not admit pullbacks.
pub fn validate_pretopology(c: &FinCat, tau: &Pretopology) -> Vec<PretopologyViolation> {
    use crate::fincat::{verify_square, Square, SquareMode};
    let mut out = Vec::new();
    for (u, covers) in &tau.covers {
        let has_id = covers.iter().any(|cov| {
            cov.family.len() == 1 && Some(&cov.family[0]) == c.identity_of(u)
        });
        if !has_id {
            out.push(PretopologyViolation::MissingIdentityCover { object: u.clone() });
        }
        for cov in covers {
            if cov.base != *u || cov.family.iter().any(|m| c.cod(m) != u) {
                out.push(PretopologyViolation::WrongBase { cover: cov.clone() });
                continue;
            }
            // Stability along every g: V → u for which all pullbacks exist.
            for g in c.arrows_into(u) {
                if c.is_identity(g) {
                    continue;
                }
                let v = c.dom(g);
                // For each member φ, the candidate pullback legs into V.
                let mut legs_per_member: Vec<BTreeSet<MorId>> = Vec::new();
                let mut all_exist = true;
                for phi in &cov.family {
                    let mut legs = BTreeSet::new();
                    for apex in c.objects() {
                        for p1 in c.hom(apex, v) {
                            for p2 in c.hom(apex, c.dom(phi)) {
                                let sq = Square {
                                    apex: apex.clone(),
                                    left: p1.clone(),
                                    right: p2.clone(),
                                    co_left: g.clone(),
                                    co_right: phi.clone(),
                                };
                                if let Ok(verdict) = verify_square(c, &sq, SquareMode::Pullback) {
                                    if verdict.holds {
                                        legs.insert(p1.clone());
                                    }
                                }
                            }
                        }
                    }
                    if legs.is_empty() {
                        all_exist = false;
                        break;
                    }
                    legs_per_member.push(legs);
                }
                if !all_exist {
                    continue; // pullbacks missing: stability not required here
                }
                // Some choice of one pullback leg per member must land in
                // τ(V), compared as a set of morphisms.
                let stable = tau.covers.get(v).map_or(false, |vcovers| {
                    vcovers.iter().any(|d| {
                        let ds: BTreeSet<MorId> = d.family.iter().cloned().collect();
                        ds.iter().all(|h| legs_per_member.iter().any(|l| l.contains(h)))
                            && legs_per_member.iter().all(|l| l.iter().any(|h| ds.contains(h)))
                    })
                });
                if !stable {
                    out.push(PretopologyViolation::Stability {
                        base: u.clone(),
                        cover: cov.clone(),
                        along: g.clone(),
                    });
                }
            }
            // Transitivity: refining each member by a cover of its domain
            // yields a composite family that is again in the assignment.
            let refined = composite_refinements(c, tau, cov);
            for fam in refined {
                let fam_set: BTreeSet<MorId> = fam.family.iter().cloned().collect();
                let present = covers.iter().any(|d| {
                    d.family.iter().cloned().collect::<BTreeSet<MorId>>() == fam_set
                });
                if !present {
                    out.push(PretopologyViolation::Transitivity {
                        base: u.clone(),
                        cover: cov.clone(),
                    });
                }
            }
        }
    }
    out
}

/// All one-step composite refinements of `cov` by covers of its members'
/// domains.
fn composite_refinements(c: &FinCat, tau: &Pretopology, cov: &Cover) -> Vec<Cover> {
    let mut choices: Vec<Vec<&Cover>> = Vec::new();
    for phi in &cov.family {
        match tau.covers.get(c.dom(phi)) {
            Some(list) if !list.is_empty() => choices.push(list.iter().collect()),
            _ => return Vec::new(),
        }
    }
    let mut out = vec![Vec::new()];
    for (phi, opts) in cov.family.iter().zip(&choices) {
        let mut next = Vec::new();
        for partial in &out {
            for d in opts {
                let mut fam: Vec<MorId> = partial.clone();
                for psi in &d.family {
                    if let Some(comp) = c.composite(phi, psi) {
                        fam.push(comp.clone());
                    }
                }
                next.push(fam);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|family| Cover {
            base: cov.base.clone(),
            family,
        })
        .collect()
}

/// Topology generated by a pretopology: saturate over the sieves generated
/// by its covers.
pub fn pretopology_to_topology(c: &FinCat, tau: &Pretopology) -> Topology {
    let seeds: Vec<Sieve> = tau
        .all_covers()
        .map(|cov| generate_sieve(c, cov).expect("pretopology cover valid"))
        .collect();
    generate_topology(c, &seeds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::fincat::ObjId;

    fn interval() -> FinCat {
        fixtures::interval()
    }

    #[test]
    fn sieve_generated_by_single_arrow_cover() {
        let c = interval();
        let cover = Cover {
            base: ObjId::new("b"),
            family: vec![MorId::new("f")],
        };
        let s = generate_sieve(&c, &cover).unwrap();
        assert_eq!(s.arrows, BTreeSet::from([MorId::new("f")]));
    }

    #[test]
    fn identity_cover_generates_maximal_sieve() {
        let c = interval();
        let cover = Cover {
            base: ObjId::new("b"),
            family: vec![MorId::new("1_b")],
        };
        let s = generate_sieve(&c, &cover).unwrap();
        assert_eq!(s, maximal_sieve(&c, &ObjId::new("b")));
    }

    #[test]
    fn empty_cover_generates_empty_sieve() {
        let c = interval();
        let cover = Cover {
            base: ObjId::new("b"),
            family: vec![],
        };
        let s = generate_sieve(&c, &cover).unwrap();
        assert!(s.arrows.is_empty());
    }

    #[test]
    fn wrong_codomain_cover_is_rejected() {
        let c = interval();
        let cover = Cover {
            base: ObjId::new("a"),
            family: vec![MorId::new("f")],
        };
        assert!(generate_sieve(&c, &cover).is_err());
    }

    #[test]
    fn generated_sieve_is_intersection_of_all_sieves_containing_family() {
        // Oracle: enumerate every sieve on the base and intersect those
        // containing the cover.
        let cats = [fixtures::opens_two_point_space(), fixtures::bg(&fixtures::group_c3())];
        for c in &cats {
            for u in c.objects() {
                let arrows: Vec<MorId> = c.arrows_into(u).into_iter().cloned().collect();
                // try singleton and pair covers
                let mut covers: Vec<Vec<MorId>> = arrows.iter().map(|a| vec![a.clone()]).collect();
                if arrows.len() >= 2 {
                    covers.push(vec![arrows[0].clone(), arrows[1].clone()]);
                }
                for family in covers {
                    let cover = Cover {
                        base: u.clone(),
                        family: family.clone(),
                    };
                    let generated = generate_sieve(c, &cover).unwrap();
                    let mut inter: Option<BTreeSet<MorId>> = None;
                    for s in all_sieves_on(c, u) {
                        if family.iter().all(|m| s.contains(m)) {
                            inter = Some(match inter {
                                None => s,
                                Some(prev) => prev.intersection(&s).cloned().collect(),
                            });
                        }
                    }
                    assert_eq!(generated.arrows, inter.unwrap());
                }
            }
        }
    }

    #[test]
    fn pullback_of_maximal_is_maximal() {
        let c = interval();
        let max_b = maximal_sieve(&c, &ObjId::new("b"));
        let pb = pullback_sieve(&c, &max_b, &MorId::new("f")).unwrap();
        assert_eq!(pb, maximal_sieve(&c, &ObjId::new("a")));
    }

    #[test]
    fn pullback_of_generated_f_sieve_along_f_is_maximal() {
        let c = interval();
        let s = Sieve {
            base: ObjId::new("b"),
            arrows: BTreeSet::from([MorId::new("f")]),
        };
        let pb = pullback_sieve(&c, &s, &MorId::new("f")).unwrap();
        assert_eq!(pb, maximal_sieve(&c, &ObjId::new("a")));
    }

    #[test]
    fn pullback_of_empty_sieve_is_empty() {
        let c = interval();
        let s = Sieve::empty(&ObjId::new("b"));
        let pb = pullback_sieve(&c, &s, &MorId::new("f")).unwrap();
        assert!(pb.arrows.is_empty());
    }

    #[test]
    fn no_seeds_generate_trivial_topology() {
        let c = fixtures::opens_two_point_space();
        let j = generate_topology(&c, &[]);
        assert_eq!(j, trivial_topology(&c));
        assert!(is_topology(&c, &j).is_ok());
    }

    #[test]
    fn interval_seed_topology_matches_hand_computation() {
        let c = interval();
        let seed = Sieve {
            base: ObjId::new("b"),
            arrows: BTreeSet::from([MorId::new("f")]),
        };
        let j = generate_topology(&c, &[seed]);
        assert!(is_topology(&c, &j).is_ok());
        let at_a = j.covering.get(&ObjId::new("a")).unwrap();
        let at_b = j.covering.get(&ObjId::new("b")).unwrap();
        assert_eq!(at_a.len(), 1);
        assert_eq!(
            at_b,
            &BTreeSet::from([
                BTreeSet::from([MorId::new("f")]),
                BTreeSet::from([MorId::new("f"), MorId::new("1_b")]),
            ])
        );
    }

    #[test]
    fn maximal_seed_generates_trivial_topology() {
        let c = interval();
        let seed = maximal_sieve(&c, &ObjId::new("b"));
        let j = generate_topology(&c, &[seed]);
        assert_eq!(j, trivial_topology(&c));
    }

    #[test]
    fn missing_maximal_sieve_is_reported() {
        let c = interval();
        let mut j = trivial_topology(&c);
        let at_b = j.covering.get_mut(&ObjId::new("b")).unwrap();
        at_b.clear();
        at_b.insert(BTreeSet::from([MorId::new("f")]));
        match is_topology(&c, &j) {
            Err(TopologyViolation::MissingMaximal { object }) => {
                assert_eq!(object, ObjId::new("b"))
            }
            other => panic!("expected missing-maximal violation, got {other:?}"),
        }
    }

    #[test]
    fn identity_only_pretopology_generates_trivial_topology() {
        let c = interval();
        let tau = fixtures::identity_pretopology(&c);
        assert!(validate_pretopology(&c, &tau).is_empty());
        assert_eq!(pretopology_to_topology(&c, &tau), trivial_topology(&c));
    }

    #[test]
    fn two_point_space_surjective_pretopology() {
        let c = fixtures::opens_two_point_space();
        let tau = fixtures::surjective_pretopology_two_point();
        assert!(validate_pretopology(&c, &tau).is_empty());
        let j = pretopology_to_topology(&c, &tau);
        assert!(is_topology(&c, &j).is_ok());
        // {l → lr, r → lr} generates a covering sieve on lr.
        let gen = generate_sieve(
            &c,
            &Cover {
                base: ObjId::new("lr"),
                family: vec![MorId::new("l_lr"), MorId::new("r_lr")],
            },
        )
        .unwrap();
        assert!(j.covers(&gen));
    }

    #[test]
    fn pretopology_and_seed_paths_agree_on_interval() {
        let c = interval();
        let mut tau = fixtures::identity_pretopology(&c);
        tau.covers.get_mut(&ObjId::new("b")).unwrap().push(Cover {
            base: ObjId::new("b"),
            family: vec![MorId::new("f")],
        });
        let via_pretopology = pretopology_to_topology(&c, &tau);
        let seed = Sieve {
            base: ObjId::new("b"),
            arrows: BTreeSet::from([MorId::new("f")]),
        };
        let via_seed = generate_topology(&c, &[seed]);
        assert_eq!(via_pretopology, via_seed);
    }

    #[test]
    fn saturation_is_order_independent() {
        let c = fixtures::opens_two_point_space();
        let tau = fixtures::surjective_pretopology_two_point();
        let seeds: Vec<Sieve> = tau
            .all_covers()
            .map(|cov| generate_sieve(&c, cov).unwrap())
            .collect();
        let canonical = generate_topology(&c, &seeds);
        for seed in [0u64, 1, 7, 1234] {
            assert_eq!(generate_topology_shuffled(&c, &seeds, seed), canonical);
        }
    }
}
