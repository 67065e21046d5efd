//! Locally constant finite sheaves, indecomposable and normal objects,
//! fibre functors given by evaluation at a point, and fundamental groups
//! computed as limits of automorphism groups over normal objects.
//!
//! Pro-finiteness is truncated: the lcf subcategory is enumerated under an
//! explicit size bound, so every inverse system here is finite and every
//! group comes with a full multiplication table.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::fincat::{FinCat, FunctorData, MorId, ObjId};
use crate::sheaves::{
    check_sheaf, compose_nat_trans, coproduct_presheaf, enumerate_nat_trans, find_iso,
    is_bijective_nat, sheafify, validate_presheaf, Elem, NatTrans, Presheaf,
};
use crate::sites::{Sieve, Topology};
use crate::transfer::build_adhesive_site;

/// A finite group presented by its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupTable {
    pub name: String,
    pub elems: Vec<String>,
    /// mul[i][j] = index of elems[i] · elems[j].
    pub mul: Vec<Vec<usize>>,
    pub id: usize,
}

impl GroupTable {
    pub fn from_strings(name: &str, elems: &[&str], rows: &[&[&str]]) -> GroupTable {
        let names: Vec<String> = elems.iter().map(|s| s.to_string()).collect();
        let idx = |s: &str| -> usize {
            names
                .iter()
                .position(|n| n == s)
                .unwrap_or_else(|| panic!("unknown element {s}"))
        };
        let mul: Vec<Vec<usize>> = rows
            .iter()
            .map(|row| row.iter().map(|s| idx(s)).collect())
            .collect();
        let id = (0..names.len())
            .find(|&e| (0..names.len()).all(|j| mul[e][j] == j && mul[j][e] == j))
            .expect("table has an identity");
        GroupTable {
            name: name.to_string(),
            elems: names,
            mul,
            id,
        }
    }

    pub fn order(&self) -> usize {
        self.elems.len()
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|i| (0..n).all(|j| self.mul[i][j] == self.mul[j][i]))
    }

    pub fn inverse(&self, g: usize) -> usize {
        (0..self.order())
            .find(|&h| self.mul[g][h] == self.id)
            .expect("group element has an inverse")
    }

    /// Group axioms, exhaustively.
    pub fn validate(&self) -> bool {
        let n = self.order();
        if self.mul.len() != n || self.mul.iter().any(|r| r.len() != n) {
            return false;
        }
        if self.mul.iter().flatten().any(|&k| k >= n) {
            return false;
        }
        let id_ok = (0..n).all(|j| self.mul[self.id][j] == j && self.mul[j][self.id] == j);
        let assoc = (0..n).all(|i| {
            (0..n).all(|j| {
                (0..n).all(|k| self.mul[self.mul[i][j]][k] == self.mul[i][self.mul[j][k]])
            })
        });
        let inverses = (0..n).all(|g| (0..n).any(|h| self.mul[g][h] == self.id));
        id_ok && assoc && inverses
    }

    /// Backtracking isomorphism search; returns the image of each element.
    pub fn find_isomorphism(&self, other: &GroupTable) -> Option<Vec<usize>> {
        let n = self.order();
        if n != other.order() {
            return None;
        }
        let mut map = vec![usize::MAX; n];
        let mut used = vec![false; n];
        map[self.id] = other.id;
        used[other.id] = true;
        fn rec(
            a: &GroupTable,
            b: &GroupTable,
            map: &mut Vec<usize>,
            used: &mut Vec<bool>,
            g: usize,
        ) -> bool {
            let n = a.order();
            if g == n {
                // full homomorphism check
                return (0..n)
                    .all(|i| (0..n).all(|j| map[a.mul[i][j]] == b.mul[map[i]][map[j]]));
            }
            if map[g] != usize::MAX {
                return rec(a, b, map, used, g + 1);
            }
            for h in 0..n {
                if used[h] {
                    continue;
                }
                // partial consistency: products with already-mapped elements
                map[g] = h;
                used[h] = true;
                let ok = (0..n).filter(|&x| map[x] != usize::MAX).all(|x| {
                    let gx = a.mul[g][x];
                    let xg = a.mul[x][g];
                    (map[gx] == usize::MAX || map[gx] == b.mul[h][map[x]])
                        && (map[xg] == usize::MAX || map[xg] == b.mul[map[x]][h])
                });
                if ok && rec(a, b, map, used, g + 1) {
                    return true;
                }
                map[g] = usize::MAX;
                used[h] = false;
            }
            false
        }
        if rec(self, other, &mut map, &mut used, 0) {
            Some(map)
        } else {
            None
        }
    }
}

/// Evaluation-style point of a site: the fibre of a sheaf is its section
/// set at the designated object, and of a map its component there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreFunctor {
    pub at: ObjId,
}

impl FibreFunctor {
    pub fn fibre<'a>(&self, p: &'a Presheaf) -> &'a [Elem] {
        p.sections(&self.at)
    }

    pub fn fibre_map<'a>(&self, t: &'a NatTrans) -> Option<&'a BTreeMap<Elem, Elem>> {
        t.components.get(&self.at)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FibreViolation {
    NotExactOnProduct { left: String, right: String },
    NotExactOnCoproduct { left: String, right: String },
    NotExactOnEqualizer { left: String, right: String },
    NotExactOnCoequalizer { left: String, right: String },
    DoesNotReflectIso { source: String, target: String },
}

/// Exactness and iso-reflection of the evaluation fibre, checked on
/// diagrams generated from the given sheaves. Flatness is checked, never
/// derived.
pub fn validate_fibre_functor(
    j: &Topology,
    fibre: &FibreFunctor,
    test_sheaves: &[Presheaf],
) -> Vec<FibreViolation> {
    let mut out = Vec::new();
    for x in test_sheaves {
        for y in test_sheaves {
            // products are pointwise, so the fibre of x×y is the product of
            // fibres by construction; still verify cardinalities.
            let (prod, _, _) = crate::sheaves::product_presheaf(x, y);
            if fibre.fibre(&prod).len() != fibre.fibre(x).len() * fibre.fibre(y).len() {
                out.push(FibreViolation::NotExactOnProduct {
                    left: x.name.clone(),
                    right: y.name.clone(),
                });
            }
            // coproducts are sheafified; the canonical comparison must be a
            // bijection on fibres.
            let (cop, _, _) = coproduct_presheaf(x, y);
            let sh = sheafify(&cop, j);
            let unit_at = sh.unit.components.get(&fibre.at).cloned().unwrap_or_default();
            let image: BTreeSet<&Elem> = unit_at.values().collect();
            let expected = fibre.fibre(x).len() + fibre.fibre(y).len();
            if fibre.fibre(&sh.sheaf).len() != expected
                || image.len() != unit_at.len()
                || unit_at.len() != expected
            {
                out.push(FibreViolation::NotExactOnCoproduct {
                    left: x.name.clone(),
                    right: y.name.clone(),
                });
            }
            // equalizers and coequalizers over every parallel pair.
            for f in enumerate_nat_trans(x, y) {
                for g in enumerate_nat_trans(x, y) {
                    let (eq, _) = crate::sheaves::equalizer_presheaf(x, y, &f, &g);
                    let expected: usize = fibre
                        .fibre(x)
                        .iter()
                        .filter(|e| f.apply(&fibre.at, e) == g.apply(&fibre.at, e))
                        .count();
                    if fibre.fibre(&eq).len() != expected {
                        out.push(FibreViolation::NotExactOnEqualizer {
                            left: x.name.clone(),
                            right: y.name.clone(),
                        });
                    }
                    let (coeq, proj) = crate::sheaves::coequalizer_presheaf(x, y, &f, &g);
                    let sh = sheafify(&coeq, j);
                    // fibre-level coequalizer size
                    let mut parent: BTreeMap<Elem, Elem> = fibre
                        .fibre(y)
                        .iter()
                        .map(|e| (e.clone(), e.clone()))
                        .collect();
                    fn find(parent: &mut BTreeMap<Elem, Elem>, x: &Elem) -> Elem {
                        let p = parent.get(x).unwrap().clone();
                        if p == *x {
                            return p;
                        }
                        let r = find(parent, &p);
                        parent.insert(x.clone(), r.clone());
                        r
                    }
                    for e in fibre.fibre(x) {
                        let a = find(&mut parent, f.apply(&fibre.at, e));
                        let b = find(&mut parent, g.apply(&fibre.at, e));
                        if a != b {
                            parent.insert(a, b);
                        }
                    }
                    let classes: BTreeSet<Elem> = fibre
                        .fibre(y)
                        .iter()
                        .map(|e| find(&mut parent, e))
                        .collect();
                    let _ = proj;
                    if fibre.fibre(&sh.sheaf).len() != classes.len() {
                        out.push(FibreViolation::NotExactOnCoequalizer {
                            left: x.name.clone(),
                            right: y.name.clone(),
                        });
                    }
                }
            }
            // iso reflection: bijective on the fibre forces bijective
            // everywhere.
            for t in enumerate_nat_trans(x, y) {
                let fibre_bij = {
                    let m = t.components.get(&fibre.at).cloned().unwrap_or_default();
                    let img: BTreeSet<&Elem> = m.values().collect();
                    m.len() == fibre.fibre(x).len()
                        && img.len() == fibre.fibre(y).len()
                        && fibre.fibre(x).len() == fibre.fibre(y).len()
                };
                if fibre_bij && !is_bijective_nat(x, y, &t) {
                    out.push(FibreViolation::DoesNotReflectIso {
                        source: x.name.clone(),
                        target: y.name.clone(),
                    });
                }
            }
        }
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GaloisError {
    #[error("search budget exceeded under size bound {bound}: {detail}")]
    SearchBudget { bound: usize, detail: String },
    #[error("no normal object is cofinal under size bound {bound}")]
    NoCofinalNormal { bound: usize },
    #[error("tower map construction failed: {0}")]
    TowerMap(String),
    #[error("decomposition verification failed for {0}")]
    Decomposition(String),
    #[error("precondition {hypothesis} fails: {detail}")]
    Precondition { hypothesis: String, detail: String },
}

const WORK_LIMIT: usize = 20_000_000;

/// Enumerates every sheaf on the site with at most `bound` sections per
/// object, up to isomorphism, by assigning action tables to a generating
/// set of morphisms and completing via the composition table.
pub fn enumerate_sheaves(
    c: &FinCat,
    j: &Topology,
    bound: usize,
) -> Result<Vec<Presheaf>, GaloisError> {
    let gens = category_generators(c);
    let derivations = derivation_order(c, &gens);
    let objects: Vec<ObjId> = c.objects().to_vec();
    let mut out: Vec<Presheaf> = Vec::new();
    let mut work = 0usize;
    // iterate size vectors
    let mut sizes = vec![0usize; objects.len()];
    loop {
        enumerate_with_sizes(
            c,
            j,
            &gens,
            &derivations,
            &objects,
            &sizes,
            &mut out,
            &mut work,
        )
        .map_err(|detail| GaloisError::SearchBudget { bound, detail })?;
        // odometer over sizes
        let mut pos = 0;
        loop {
            if pos == sizes.len() {
                return Ok(out);
            }
            sizes[pos] += 1;
            if sizes[pos] <= bound {
                break;
            }
            sizes[pos] = 0;
            pos += 1;
        }
    }
}

/// Greedy generating set: identities plus the least morphisms not yet in the
/// composition closure.
pub fn category_generators(c: &FinCat) -> Vec<MorId> {
    let mut have: BTreeSet<MorId> = c
        .objects()
        .iter()
        .map(|o| c.identity_of(o).expect("valid category").clone())
        .collect();
    let close = |have: &mut BTreeSet<MorId>| loop {
        let mut grew = false;
        let current: Vec<MorId> = have.iter().cloned().collect();
        for g in &current {
            for f in &current {
                if let Some(gf) = c.composite(g, f) {
                    if have.insert(gf.clone()) {
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    };
    close(&mut have);
    let mut gens = Vec::new();
    // primitives first: morphisms with no nontrivial factorization
    let primitive = |m: &MorId| -> bool {
        !c.compose_table().iter().any(|((g, f), gf)| {
            gf == m && !c.is_identity(g) && !c.is_identity(f)
        })
    };
    let mut remaining: Vec<MorId> = c
        .morphisms()
        .iter()
        .map(|m| m.id.clone())
        .filter(|m| !have.contains(m))
        .collect();
    remaining.sort_by_key(|m| (!primitive(m), m.clone()));
    for m in remaining {
        if !have.contains(&m) {
            gens.push(m.clone());
            have.insert(m);
            close(&mut have);
        }
    }
    gens
}

/// For every non-generator, non-identity morphism, one (g, f) derivation
/// with g∘f equal to it, ordered so each derivation only uses earlier
/// morphisms.
fn derivation_order(c: &FinCat, gens: &[MorId]) -> Vec<(MorId, (MorId, MorId))> {
    let mut have: BTreeSet<MorId> = c
        .objects()
        .iter()
        .map(|o| c.identity_of(o).expect("valid").clone())
        .collect();
    have.extend(gens.iter().cloned());
    let mut order = Vec::new();
    loop {
        let mut grew = false;
        let current: Vec<MorId> = have.iter().cloned().collect();
        for g in &current {
            for f in &current {
                if let Some(gf) = c.composite(g, f) {
                    if !have.contains(gf) {
                        order.push((gf.clone(), (g.clone(), f.clone())));
                        have.insert(gf.clone());
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    order
}

type Fun = Vec<usize>; // function stored as images by index

#[allow(clippy::too_many_arguments)]
fn enumerate_with_sizes(
    c: &FinCat,
    j: &Topology,
    gens: &[MorId],
    derivations: &[(MorId, (MorId, MorId))],
    objects: &[ObjId],
    sizes: &[usize],
    out: &mut Vec<Presheaf>,
    work: &mut usize,
) -> Result<(), String> {
    let size_of = |o: &ObjId| -> usize {
        sizes[objects.iter().position(|x| x == o).unwrap()]
    };
    // candidate functions per generator, filtered by its cyclic relation
    let mut candidates: Vec<Vec<Fun>> = Vec::new();
    for g in gens {
        let dom_n = size_of(c.dom(g));
        let cod_n = size_of(c.cod(g));
        let mut funs = Vec::new();
        // all functions from cod sections to dom sections
        let total = if cod_n == 0 {
            1
        } else {
            dom_n.checked_pow(cod_n as u32).unwrap_or(usize::MAX)
        };
        if cod_n > 0 && dom_n == 0 {
            candidates.push(Vec::new());
            continue;
        }
        let relation = endo_relation(c, g);
        let mut fun = vec![0usize; cod_n];
        for _ in 0..total {
            *work += 1;
            if *work > WORK_LIMIT {
                return Err("function enumeration".into());
            }
            let keep = match (&relation, c.dom(g) == c.cod(g)) {
                (Some((i, jj)), true) => fun_pow(&fun, *i) == fun_pow(&fun, *jj),
                _ => true,
            };
            if keep {
                funs.push(fun.clone());
            }
            // advance the odometer
            let mut pos = 0;
            while pos < fun.len() {
                fun[pos] += 1;
                if fun[pos] < dom_n {
                    break;
                }
                fun[pos] = 0;
                pos += 1;
            }
        }
        candidates.push(funs);
    }
    // DFS over generators with incremental completion checks
    let mut assign: BTreeMap<MorId, Fun> = BTreeMap::new();
    for o in objects {
        let idm = c.identity_of(o).expect("valid").clone();
        assign.insert(idm, (0..size_of(o)).collect());
    }
    dfs_generators(
        c, j, gens, derivations, objects, sizes, &candidates, 0, &mut assign, out, work,
    )
}

fn endo_relation(c: &FinCat, g: &MorId) -> Option<(usize, usize)> {
    if c.dom(g) != c.cod(g) {
        return None;
    }
    // powers g, g², …: find the first repetition
    let mut seen: Vec<MorId> = vec![g.clone()];
    let mut current = g.clone();
    loop {
        current = c.composite(g, &current)?.clone();
        if let Some(i) = seen.iter().position(|m| m == &current) {
            return Some((i + 1, seen.len() + 1));
        }
        seen.push(current.clone());
        if seen.len() > 64 {
            return None;
        }
    }
}

fn fun_pow(f: &Fun, k: usize) -> Fun {
    let mut out: Fun = (0..f.len()).collect();
    for _ in 0..k {
        out = out.iter().map(|&i| f[i]).collect();
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs_generators(
    c: &FinCat,
    j: &Topology,
    gens: &[MorId],
    derivations: &[(MorId, (MorId, MorId))],
    objects: &[ObjId],
    sizes: &[usize],
    candidates: &[Vec<Fun>],
    k: usize,
    assign: &mut BTreeMap<MorId, Fun>,
    out: &mut Vec<Presheaf>,
    work: &mut usize,
) -> Result<(), String> {
    if k == gens.len() {
        if let Some(p) = complete_presheaf(c, derivations, objects, sizes, assign) {
            debug_assert!(validate_presheaf(&p).is_empty());
            if check_sheaf(&p, j).is_ok() && !out.iter().any(|q| find_iso(&p, q).is_some()) {
                out.push(p);
            }
        }
        return Ok(());
    }
    for fun in &candidates[k] {
        *work += 1;
        if *work > WORK_LIMIT {
            return Err("generator assignment".into());
        }
        assign.insert(gens[k].clone(), fun.clone());
        if partial_consistent(c, derivations, assign) {
            dfs_generators(
                c, j, gens, derivations, objects, sizes, candidates, k + 1, assign, out, work,
            )?;
        }
        assign.remove(&gens[k]);
    }
    Ok(())
}

/// Derives all derivable morphism actions from the current assignment and
/// checks every fully-derived composition-table entry.
fn partial_consistent(
    c: &FinCat,
    derivations: &[(MorId, (MorId, MorId))],
    assign: &BTreeMap<MorId, Fun>,
) -> bool {
    let mut derived: BTreeMap<MorId, Fun> = assign.clone();
    for (m, (g, f)) in derivations {
        if let (Some(pg), Some(pf)) = (derived.get(g), derived.get(f)) {
            // contravariant: P(g∘f) = P(f) ∘ P(g)
            let fun: Fun = pg.iter().map(|&i| pf[i]).collect();
            derived.insert(m.clone(), fun);
        }
    }
    for ((g, f), gf) in c.compose_table() {
        if let (Some(pg), Some(pf), Some(pgf)) =
            (derived.get(g), derived.get(f), derived.get(gf))
        {
            let composed: Fun = pg.iter().map(|&i| pf[i]).collect();
            if &composed != pgf {
                return false;
            }
        }
    }
    true
}

fn complete_presheaf(
    c: &FinCat,
    derivations: &[(MorId, (MorId, MorId))],
    objects: &[ObjId],
    sizes: &[usize],
    assign: &BTreeMap<MorId, Fun>,
) -> Option<Presheaf> {
    let mut derived: BTreeMap<MorId, Fun> = assign.clone();
    for (m, (g, f)) in derivations {
        let pg = derived.get(g)?.clone();
        let pf = derived.get(f)?;
        let fun: Fun = pg.iter().map(|&i| pf[i]).collect();
        derived.insert(m.clone(), fun);
    }
    for ((g, f), gf) in c.compose_table() {
        let (pg, pf, pgf) = (derived.get(g)?, derived.get(f)?, derived.get(gf)?);
        let composed: Fun = pg.iter().map(|&i| pf[i]).collect();
        if &composed != pgf {
            return None;
        }
    }
    let elem = |i: usize| Elem::new(format!("x{i}"));
    let size_of = |o: &ObjId| -> usize { sizes[objects.iter().position(|x| x == o).unwrap()] };
    let sections: BTreeMap<ObjId, Vec<Elem>> = objects
        .iter()
        .map(|o| (o.clone(), (0..size_of(o)).map(elem).collect()))
        .collect();
    let restriction: BTreeMap<MorId, BTreeMap<Elem, Elem>> = c
        .morphisms()
        .iter()
        .map(|m| {
            let fun = derived.get(&m.id).expect("all derived");
            let table = fun
                .iter()
                .enumerate()
                .map(|(i, &img)| (elem(i), elem(img)))
                .collect();
            (m.id.clone(), table)
        })
        .collect();
    Some(Presheaf::new(
        &format!("sheaf{}", sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("_")),
        c.clone(),
        sections,
        restriction,
    ))
}

/// Objects whose empty sieve is covering; every sheaf is a singleton there
/// and coproducts re-collapse those sections.
pub fn degenerate_objects(c: &FinCat, j: &Topology) -> BTreeSet<ObjId> {
    c.objects()
        .iter()
        .filter(|u| j.covers(&Sieve::empty(u)))
        .cloned()
        .collect()
}

/// The subsheaf generated by one element: the closure of its restrictions,
/// extended by full sections at degenerate objects.
fn generated_subsheaf(
    p: &Presheaf,
    j: &Topology,
    at: &ObjId,
    x: &Elem,
    name: &str,
) -> Option<Presheaf> {
    let c = p.base();
    let degenerate = degenerate_objects(c, j);
    let mut chosen: BTreeMap<ObjId, BTreeSet<Elem>> = BTreeMap::new();
    for u in c.objects() {
        chosen.insert(u.clone(), BTreeSet::new());
    }
    chosen.get_mut(at).unwrap().insert(x.clone());
    loop {
        let mut grew = false;
        for m in c.morphisms() {
            let at_cod: Vec<Elem> = chosen.get(&m.cod).unwrap().iter().cloned().collect();
            for e in at_cod {
                let img = p.restrict(&m.id, &e).clone();
                if chosen.get_mut(&m.dom).unwrap().insert(img) {
                    grew = true;
                }
            }
        }
        if !grew {
            break;
        }
    }
    for u in &degenerate {
        let all: BTreeSet<Elem> = p.sections(u).iter().cloned().collect();
        chosen.insert(u.clone(), all);
    }
    let sub = crate::sheaves::subpresheaf(p, &chosen, name)?;
    if check_sheaf(&sub, j).is_ok() {
        Some(sub)
    } else {
        None
    }
}

/// Decomposition into pairwise-disjoint indecomposable subsheaves whose
/// sheaf coproduct is isomorphic to the input. Summands are the minimal
/// element-generated subsheaves; elements forced back by sheafification
/// (sections over degenerate objects, product sections) live in no summand.
pub fn decompose(p: &Presheaf, j: &Topology) -> Result<Vec<Presheaf>, GaloisError> {
    let c = p.base();
    let degenerate = degenerate_objects(c, j);
    let mut support: Vec<(ObjId, Elem)> = Vec::new();
    for u in c.objects() {
        if degenerate.contains(u) {
            continue;
        }
        for x in p.sections(u) {
            support.push((u.clone(), x.clone()));
        }
    }
    if support.is_empty() {
        return Ok(Vec::new());
    }
    let mut generated: Vec<Presheaf> = Vec::new();
    for (i, (u, x)) in support.iter().enumerate() {
        if let Some(sub) = generated_subsheaf(p, j, u, x, &format!("{}#{}", p.name, i)) {
            generated.push(sub);
        }
    }
    let support_of = |q: &Presheaf| -> BTreeSet<(ObjId, Elem)> {
        c.objects()
            .iter()
            .filter(|u| !degenerate.contains(*u))
            .flat_map(|u| q.sections(u).iter().map(move |x| (u.clone(), x.clone())))
            .collect()
    };
    // minimal supports, deduplicated
    let mut atoms: Vec<Presheaf> = Vec::new();
    for q in &generated {
        let sq = support_of(q);
        if sq.is_empty() {
            continue;
        }
        let minimal = generated.iter().all(|r| {
            let sr = support_of(r);
            sr.is_empty() || !sr.is_subset(&sq) || sr == sq
        });
        if minimal && !atoms.iter().any(|a| support_of(a) == sq) {
            atoms.push(q.clone());
        }
    }
    // verification: coproduct of the atoms, sheafified, is isomorphic to p
    let mut sum: Option<Presheaf> = None;
    for a in &atoms {
        sum = Some(match sum {
            None => a.clone(),
            Some(s) => coproduct_presheaf(&s, a).0,
        });
    }
    let total = match sum {
        None => return Err(GaloisError::Decomposition(p.name.clone())),
        Some(s) => sheafify(&s, j).sheaf,
    };
    if find_iso(&total, p).is_none() {
        return Err(GaloisError::Decomposition(p.name.clone()));
    }
    Ok(atoms)
}

/// Whether the decomposition of `p` is trivial (a single summand).
pub fn is_indecomposable(p: &Presheaf, j: &Topology) -> Result<bool, GaloisError> {
    Ok(decompose(p, j)?.len() == 1)
}

/// X is locally constant when some cover object U (all sections nonempty)
/// splits it: X × U ≅ Δk × U for the constant sheaf on k points.
pub fn is_locally_constant(
    p: &Presheaf,
    j: &Topology,
    universe: &[Presheaf],
) -> bool {
    let c = p.base();
    let covers: Vec<&Presheaf> = universe
        .iter()
        .filter(|u| c.objects().iter().all(|o| !u.sections(o).is_empty()))
        .collect();
    let k = p
        .sections_map()
        .values()
        .map(|v| v.len())
        .max()
        .unwrap_or(0);
    // constant candidate rank: section counts of a locally constant sheaf
    // are constant along a splitting cover, so only one k can work.
    let labels: Vec<String> = (0..k).map(|i| format!("k{i}")).collect();
    let label_refs: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
    let const_k = sheafify(
        &crate::sheaves::constant_presheaf("Δ", c, &label_refs),
        j,
    )
    .sheaf;
    for u in covers {
        let (xu, _, _) = crate::sheaves::product_presheaf(p, u);
        let (ku, _, _) = crate::sheaves::product_presheaf(&const_k, u);
        if find_iso(&xu, &ku).is_some() {
            return true;
        }
    }
    false
}

/// A normal object: indecomposable, non-initial, all endomorphisms are
/// automorphisms, and the automorphisms act simply transitively on the
/// fibre.
#[derive(Clone, Debug)]
pub struct NormalObject {
    pub object: Presheaf,
    pub automorphisms: Vec<NatTrans>,
    pub aut: GroupTable,
}

/// The automorphism group of a presheaf, with its multiplication table.
pub fn aut_group(p: &Presheaf) -> (GroupTable, Vec<NatTrans>) {
    let autos: Vec<NatTrans> = enumerate_nat_trans(p, p)
        .into_iter()
        .filter(|t| is_bijective_nat(p, p, t))
        .collect();
    let index_of = |t: &NatTrans| -> usize {
        autos
            .iter()
            .position(|a| a.components == t.components)
            .expect("closed under composition")
    };
    let mul: Vec<Vec<usize>> = autos
        .iter()
        .map(|a| {
            autos
                .iter()
                .map(|b| index_of(&compose_nat_trans(a, b)))
                .collect()
        })
        .collect();
    let id = index_of(&NatTrans::identity(p));
    let table = GroupTable {
        name: format!("Aut({})", p.name),
        elems: (0..autos.len()).map(|i| format!("g{i}")).collect(),
        mul,
        id,
    };
    (table, autos)
}

fn is_normal(p: &Presheaf, j: &Topology, fibre: &FibreFunctor) -> Result<Option<NormalObject>, GaloisError> {
    if p.total_size() == 0 || fibre.fibre(p).is_empty() {
        return Ok(None);
    }
    if !is_indecomposable(p, j)? {
        return Ok(None);
    }
    let endos = enumerate_nat_trans(p, p);
    if endos.iter().any(|t| !is_bijective_nat(p, p, t)) {
        return Ok(None);
    }
    let (aut, autos) = aut_group(p);
    let fib = fibre.fibre(p);
    if aut.order() != fib.len() {
        return Ok(None);
    }
    // simple transitivity on the fibre
    for a in fib {
        for b in fib {
            let movers = autos
                .iter()
                .filter(|t| t.apply(&fibre.at, a) == b)
                .count();
            if movers != 1 {
                return Ok(None);
            }
        }
    }
    Ok(Some(NormalObject {
        object: p.clone(),
        automorphisms: autos,
        aut,
    }))
}

/// All lcf sheaves under the size bound, up to isomorphism.
pub fn lcf_sheaves(
    c: &FinCat,
    j: &Topology,
    bound: usize,
) -> Result<Vec<Presheaf>, GaloisError> {
    let universe = enumerate_sheaves(c, j, bound)?;
    Ok(universe
        .iter()
        .filter(|p| is_locally_constant(p, j, &universe))
        .cloned()
        .collect())
}

/// Normal objects of the lcf subcategory under the size bound, with Aut
/// tables.
pub fn find_normal_objects(
    c: &FinCat,
    j: &Topology,
    fibre: &FibreFunctor,
    bound: usize,
) -> Result<Vec<NormalObject>, GaloisError> {
    let lcf = lcf_sheaves(c, j, bound)?;
    let mut out = Vec::new();
    for p in &lcf {
        if let Some(n) = is_normal(p, j, fibre)? {
            out.push(n);
        }
    }
    Ok(out)
}

/// One level of the tower: a normal object together with the transition map
/// from the automorphism group of the top object.
#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub object_name: String,
    pub aut: GroupTable,
    /// image in `aut` of each element of the top group.
    pub transition: Vec<usize>,
}

/// A fundamental group: the limit of Aut over the (finite, star-shaped)
/// inverse system of normal objects, presented by a multiplication table.
#[derive(Clone, Debug)]
pub struct FundamentalGroup {
    pub group: GroupTable,
    pub tower: Vec<TowerLevel>,
}

/// Computes the fundamental group at the given fibre: the automorphism
/// group of a cofinal normal object, verified to surject onto Aut of every
/// other normal object.
pub fn fundamental_group(
    c: &FinCat,
    j: &Topology,
    fibre: &FibreFunctor,
    bound: usize,
) -> Result<FundamentalGroup, GaloisError> {
    let normals = find_normal_objects(c, j, fibre, bound)?;
    if normals.is_empty() {
        return Err(GaloisError::NoCofinalNormal { bound });
    }
    // top: maximal fibre, ties broken by name for determinism
    let top = normals
        .iter()
        .max_by_key(|n| (fibre.fibre(&n.object).len(), std::cmp::Reverse(n.object.name.clone())))
        .expect("nonempty");
    // cofinality: the top object maps onto every normal object
    for n in &normals {
        if !crate::sheaves::exists_nat_trans(&top.object, &n.object) {
            return Err(GaloisError::NoCofinalNormal { bound });
        }
    }
    let mut tower = Vec::new();
    for n in &normals {
        let phi = enumerate_nat_trans(&top.object, &n.object)
            .into_iter()
            .next()
            .expect("cofinality checked");
        let mut transition = Vec::new();
        for alpha in &top.automorphisms {
            let lhs = compose_nat_trans(&phi, alpha);
            let matches: Vec<usize> = n
                .automorphisms
                .iter()
                .enumerate()
                .filter(|(_, beta)| {
                    compose_nat_trans(beta, &phi).components == lhs.components
                })
                .map(|(i, _)| i)
                .collect();
            match matches.as_slice() {
                [unique] => transition.push(*unique),
                other => {
                    return Err(GaloisError::TowerMap(format!(
                        "{} automorphism descends to {} candidates at {}",
                        top.object.name,
                        other.len(),
                        n.object.name
                    )))
                }
            }
        }
        // surjectivity of the transition homomorphism
        let image: BTreeSet<usize> = transition.iter().copied().collect();
        if image.len() != n.aut.order() {
            return Err(GaloisError::TowerMap(format!(
                "transition to {} not surjective",
                n.object.name
            )));
        }
        // homomorphism property
        let top_aut = &top.aut;
        for i in 0..top_aut.order() {
            for k in 0..top_aut.order() {
                if transition[top_aut.mul[i][k]] != n.aut.mul[transition[i]][transition[k]] {
                    return Err(GaloisError::TowerMap(format!(
                        "transition to {} not a homomorphism",
                        n.object.name
                    )));
                }
            }
        }
        tower.push(TowerLevel {
            object_name: n.object.name.clone(),
            aut: n.aut.clone(),
            transition,
        });
    }
    let mut group = top.aut.clone();
    group.name = format!("pi1@{}", fibre.at);
    Ok(FundamentalGroup { group, tower })
}

/// Result of the fundamental-group comparison along a functor.
#[derive(Clone, Debug)]
pub struct Pi1Comparison {
    pub holds: bool,
    pub source_group: GroupTable,
    pub target_group: GroupTable,
    pub isomorphism: Option<Vec<usize>>,
}

/// Verifies the standing hypotheses mechanically, computes both fundamental
/// groups (the target site is the transferred topology, the target fibre is
/// evaluation at the image point), and searches for a group isomorphism.
pub fn check_pi1_isomorphism(
    f: &FunctorData,
    j: &Topology,
    fibre_src: &FibreFunctor,
    bound: usize,
) -> Result<Pi1Comparison, GaloisError> {
    // A3: every target object sees the image through some arrow.
    for v in f.target.objects() {
        let seen = f.source.objects().iter().any(|x| {
            let fx = f.apply_obj(x);
            !f.target.hom(v, fx).is_empty() || !f.target.hom(fx, v).is_empty()
        });
        if !seen {
            return Err(GaloisError::Precondition {
                hypothesis: "A3".into(),
                detail: format!("object {v} has no arrow to or from the image"),
            });
        }
    }
    let k = build_adhesive_site(f, j);
    // A1: the pullback is fully faithful on lcf sheaves of the target site.
    let tgt_lcf = lcf_sheaves(&f.target, &k, bound)?;
    for x in &tgt_lcf {
        for y in &tgt_lcf {
            let homs = enumerate_nat_trans(x, y);
            let px = crate::transfer::pullback_presheaf(f, x);
            let py = crate::transfer::pullback_presheaf(f, y);
            let pulled_homs = enumerate_nat_trans(&px, &py);
            let mut images = BTreeSet::new();
            for t in &homs {
                let pt = crate::transfer::pullback_nat_trans(f, t);
                images.insert(pt.components.clone());
            }
            if images.len() != homs.len() || images.len() != pulled_homs.len() {
                return Err(GaloisError::Precondition {
                    hypothesis: "A1".into(),
                    detail: format!(
                        "pullback not fully faithful at ({}, {}): {} vs {}",
                        x.name,
                        y.name,
                        homs.len(),
                        pulled_homs.len()
                    ),
                });
            }
        }
    }
    // A2: the source fibre is exact and iso-reflecting on lcf fixtures.
    let src_lcf = lcf_sheaves(&f.source, j, bound)?;
    let violations = validate_fibre_functor(j, fibre_src, &src_lcf);
    if let Some(v) = violations.first() {
        return Err(GaloisError::Precondition {
            hypothesis: "A2".into(),
            detail: format!("{v:?}"),
        });
    }
    let src_group = fundamental_group(&f.source, j, fibre_src, bound)?;
    let fibre_tgt = FibreFunctor {
        at: f.apply_obj(&fibre_src.at).clone(),
    };
    let tgt_group = fundamental_group(&f.target, &k, &fibre_tgt, bound)?;
    let iso = src_group.group.find_isomorphism(&tgt_group.group);
    Ok(Pi1Comparison {
        holds: iso.is_some(),
        source_group: src_group.group,
        target_group: tgt_group.group,
        isomorphism: iso,
    })
}

// ---------------------------------------------------------------------------
// Transport of representation categories along a group isomorphism.
// ---------------------------------------------------------------------------

/// A finite right G-set given by its action table: `action[g][point]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GSet {
    pub name: String,
    pub size: usize,
    pub action: Vec<Vec<usize>>,
}

impl GSet {
    pub fn validate(&self, g: &GroupTable) -> bool {
        self.action.len() == g.order()
            && self.action.iter().all(|row| row.len() == self.size)
            && (0..self.size).all(|x| self.action[g.id][x] == x)
            && (0..g.order()).all(|a| {
                (0..g.order()).all(|b| {
                    (0..self.size).all(|x| {
                        // right action: x·(ab) = (x·a)·b
                        self.action[g.mul[a][b]][x] == self.action[b][self.action[a][x]]
                    })
                })
            })
    }

    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for x in 0..self.size {
            if seen[x] {
                continue;
            }
            let mut orbit = vec![x];
            seen[x] = true;
            let mut idx = 0;
            while idx < orbit.len() {
                let y = orbit[idx];
                for row in &self.action {
                    let z = row[y];
                    if !seen[z] {
                        seen[z] = true;
                        orbit.push(z);
                    }
                }
                idx += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    /// Multiset of orbit sizes, sorted.
    pub fn orbit_type(&self) -> Vec<usize> {
        let mut t: Vec<usize> = self.orbits().into_iter().map(|o| o.len()).collect();
        t.sort_unstable();
        t
    }
}

pub fn is_equivariant(g: &GroupTable, x: &GSet, y: &GSet, map: &[usize]) -> bool {
    map.len() == x.size
        && map.iter().all(|&i| i < y.size)
        && (0..g.order()).all(|a| (0..x.size).all(|p| map[x.action[a][p]] == y.action[a][map[p]]))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransportError {
    #[error("the given map is not a group isomorphism")]
    NotAnIsomorphism,
}

/// Transport of G-sets and equivariant maps along a verified isomorphism
/// G ≅ H: carriers are unchanged, the H-action is the G-action through the
/// inverse isomorphism, and maps pass through untouched.
pub struct RepTransport {
    g: GroupTable,
    h: GroupTable,
    iso: Vec<usize>,
    inv: Vec<usize>,
}

impl RepTransport {
    pub fn new(g: GroupTable, h: GroupTable, iso: Vec<usize>) -> Result<Self, TransportError> {
        let n = g.order();
        if h.order() != n || iso.len() != n {
            return Err(TransportError::NotAnIsomorphism);
        }
        let distinct: BTreeSet<usize> = iso.iter().copied().collect();
        if distinct.len() != n || iso.iter().any(|&i| i >= n) {
            return Err(TransportError::NotAnIsomorphism);
        }
        let hom_ok = (0..n).all(|a| (0..n).all(|b| iso[g.mul[a][b]] == h.mul[iso[a]][iso[b]]));
        if !hom_ok {
            return Err(TransportError::NotAnIsomorphism);
        }
        let mut inv = vec![0usize; n];
        for (a, &ha) in iso.iter().enumerate() {
            inv[ha] = a;
        }
        Ok(RepTransport { g, h, iso, inv })
    }

    pub fn transport_gset(&self, x: &GSet) -> GSet {
        let action = (0..self.h.order())
            .map(|hidx| x.action[self.inv[hidx]].clone())
            .collect();
        GSet {
            name: format!("T({})", x.name),
            size: x.size,
            action,
        }
    }

    /// Inverse transport (along the inverse isomorphism).
    pub fn transport_back(&self, y: &GSet) -> GSet {
        let action = (0..self.g.order())
            .map(|gidx| y.action[self.iso[gidx]].clone())
            .collect();
        GSet {
            name: format!("T'({})", y.name),
            size: y.size,
            action,
        }
    }

    /// Equivariant maps are carried unchanged; the result is equivariant for
    /// the transported actions.
    pub fn transport_map(&self, x: &GSet, y: &GSet, map: &[usize]) -> Option<Vec<usize>> {
        if !is_equivariant(&self.g, x, y, map) {
            return None;
        }
        let tx = self.transport_gset(x);
        let ty = self.transport_gset(y);
        debug_assert!(is_equivariant(&self.h, &tx, &ty, map));
        Some(map.to_vec())
    }

    pub fn groups(&self) -> (&GroupTable, &GroupTable) {
        (&self.g, &self.h)
    }
}
