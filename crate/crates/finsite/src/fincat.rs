//! Finitely presented categories given by explicit composition tables,
//! functors between them, and brute-force verification of universal
//! properties (pullbacks, pushouts, monos).
//!
//! Identifiers are opaque strings; equality is identifier equality, so
//! fixtures stay diffable. All searches are exhaustive: the categories in
//! play have at most a dozen objects and a few dozen morphisms.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Opaque object identifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub String);

/// Opaque morphism identifier.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MorId(pub String);

impl ObjId {
    pub fn new(s: impl Into<String>) -> Self {
        ObjId(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl MorId {
    pub fn new(s: impl Into<String>) -> Self {
        MorId(s.into())
    }
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ObjId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for MorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObjId {
    fn from(s: &str) -> Self {
        ObjId(s.to_string())
    }
}

impl From<&str> for MorId {
    fn from(s: &str) -> Self {
        MorId(s.to_string())
    }
}

/// A single morphism record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorData {
    pub id: MorId,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// A finitely presented category: objects, morphisms, designated identities
/// and a total composition table on composable pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCat {
    name: String,
    objects: Vec<ObjId>,
    morphisms: Vec<MorData>,
    identity: BTreeMap<ObjId, MorId>,
    /// (g, f) -> g∘f, keyed on cod(f) = dom(g).
    compose: BTreeMap<(MorId, MorId), MorId>,
}

/// Incremental constructor for [`FinCat`]. Identities are created on
/// `object` and identity compositions are filled in on `build` unless an
/// explicit (possibly wrong, for negative fixtures) entry overrides them.
pub struct FinCatBuilder {
    cat: FinCat,
}

impl FinCatBuilder {
    pub fn object(self, o: &str) -> Self {
        let id = format!("1_{o}");
        self.object_with_identity(o, &id)
    }

    /// Adds an object whose identity morphism carries a custom name, e.g.
    /// the unit element of a group viewed as a one-object category.
    pub fn object_with_identity(mut self, o: &str, id_name: &str) -> Self {
        let obj = ObjId::new(o);
        if !self.cat.objects.contains(&obj) {
            let id = MorId::new(id_name);
            self.cat.morphisms.push(MorData {
                id: id.clone(),
                dom: obj.clone(),
                cod: obj.clone(),
            });
            self.cat.identity.insert(obj.clone(), id);
            self.cat.objects.push(obj);
        }
        self
    }

    pub fn morphism(mut self, id: &str, dom: &str, cod: &str) -> Self {
        self.cat.morphisms.push(MorData {
            id: MorId::new(id),
            dom: ObjId::new(dom),
            cod: ObjId::new(cod),
        });
        self
    }

    /// Record g∘f = result. Later entries win, so tests can deliberately
    /// mis-set identity rows.
    pub fn compose(mut self, g: &str, f: &str, result: &str) -> Self {
        self.cat
            .compose
            .insert((MorId::new(g), MorId::new(f)), MorId::new(result));
        self
    }

    pub fn build(mut self) -> FinCat {
        // Fill in identity compositions that were not explicitly set.
        let pairs: Vec<(MorId, MorId, MorId)> = self
            .cat
            .morphisms
            .iter()
            .flat_map(|m| {
                let lid = self.cat.identity.get(&m.cod).cloned();
                let rid = self.cat.identity.get(&m.dom).cloned();
                let mut v = Vec::new();
                if let Some(l) = lid {
                    v.push((l, m.id.clone(), m.id.clone()));
                }
                if let Some(r) = rid {
                    v.push((m.id.clone(), r, m.id.clone()));
                }
                v
            })
            .collect();
        for (g, f, res) in pairs {
            self.cat.compose.entry((g, f)).or_insert(res);
        }
        self.cat.objects.sort();
        self.cat.morphisms.sort_by(|a, b| a.id.cmp(&b.id));
        self.cat
    }
}

impl FinCat {
    pub fn builder(name: &str) -> FinCatBuilder {
        FinCatBuilder {
            cat: FinCat {
                name: name.to_string(),
                objects: Vec::new(),
                morphisms: Vec::new(),
                identity: BTreeMap::new(),
                compose: BTreeMap::new(),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> &[ObjId] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[MorData] {
        &self.morphisms
    }

    pub fn has_object(&self, o: &ObjId) -> bool {
        self.objects.contains(o)
    }

    pub fn morphism(&self, m: &MorId) -> Option<&MorData> {
        self.morphisms.iter().find(|d| &d.id == m)
    }

    pub fn dom(&self, m: &MorId) -> &ObjId {
        &self.morphism(m).expect("morphism not in category").dom
    }

    pub fn cod(&self, m: &MorId) -> &ObjId {
        &self.morphism(m).expect("morphism not in category").cod
    }

    pub fn identity_of(&self, o: &ObjId) -> Option<&MorId> {
        self.identity.get(o)
    }

    pub fn is_identity(&self, m: &MorId) -> bool {
        self.identity.values().any(|i| i == m)
    }

    /// g∘f, defined when cod(f) = dom(g) and the table has the entry.
    pub fn composite(&self, g: &MorId, f: &MorId) -> Option<&MorId> {
        self.compose.get(&(g.clone(), f.clone()))
    }

    pub fn compose_table(&self) -> &BTreeMap<(MorId, MorId), MorId> {
        &self.compose
    }

    pub fn hom(&self, a: &ObjId, b: &ObjId) -> Vec<&MorId> {
        self.morphisms
            .iter()
            .filter(|m| &m.dom == a && &m.cod == b)
            .map(|m| &m.id)
            .collect()
    }

    /// All morphisms with codomain `u`, identities included.
    pub fn arrows_into(&self, u: &ObjId) -> Vec<&MorId> {
        self.morphisms
            .iter()
            .filter(|m| &m.cod == u)
            .map(|m| &m.id)
            .collect()
    }

    pub fn arrows_out_of(&self, u: &ObjId) -> Vec<&MorId> {
        self.morphisms
            .iter()
            .filter(|m| &m.dom == u)
            .map(|m| &m.id)
            .collect()
    }

    /// Exhaustive two-sided inverse search.
    pub fn is_iso(&self, m: &MorId) -> bool {
        let d = match self.morphism(m) {
            Some(d) => d,
            None => return false,
        };
        let (ida, idb) = match (self.identity_of(&d.dom), self.identity_of(&d.cod)) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            _ => return false,
        };
        self.hom(&d.cod, &d.dom).into_iter().any(|g| {
            self.composite(g, m) == Some(&ida) && self.composite(m, g) == Some(&idb)
        })
    }

    /// Returns a mutated copy with one composition entry overridden.
    /// Used by negative tests and the validation property suite.
    pub fn with_composite(&self, g: &MorId, f: &MorId, result: &MorId) -> FinCat {
        let mut c = self.clone();
        c.compose
            .insert((g.clone(), f.clone()), result.clone());
        c
    }
}

/// One violated category axiom, naming the offending data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryViolation {
    UnknownObjectRef { mor: MorId, object: ObjId },
    DuplicateMorphism { mor: MorId },
    MissingIdentity { object: ObjId },
    BadIdentityType { object: ObjId, mor: MorId },
    MissingComposite { g: MorId, f: MorId },
    SpuriousComposite { g: MorId, f: MorId },
    CompositeTypeMismatch { g: MorId, f: MorId, result: MorId },
    IdentityLaw { mor: MorId },
    Associativity { h: MorId, g: MorId, f: MorId },
}

impl fmt::Display for CategoryViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CategoryViolation::UnknownObjectRef { mor, object } => {
                write!(f, "morphism {mor} references unknown object {object}")
            }
            CategoryViolation::DuplicateMorphism { mor } => {
                write!(f, "duplicate morphism id {mor}")
            }
            CategoryViolation::MissingIdentity { object } => {
                write!(f, "object {object} has no identity")
            }
            CategoryViolation::BadIdentityType { object, mor } => {
                write!(f, "identity {mor} of {object} has wrong dom/cod")
            }
            CategoryViolation::MissingComposite { g, f: ff } => {
                write!(f, "composable pair ({g}, {ff}) has no composite")
            }
            CategoryViolation::SpuriousComposite { g, f: ff } => {
                write!(f, "non-composable pair ({g}, {ff}) has a table entry")
            }
            CategoryViolation::CompositeTypeMismatch { g, f: ff, result } => {
                write!(f, "composite {g}∘{ff} = {result} has wrong dom/cod")
            }
            CategoryViolation::IdentityLaw { mor } => {
                write!(f, "identity law fails at {mor}")
            }
            CategoryViolation::Associativity { h, g, f: ff } => {
                write!(f, "associativity fails at ({h}, {g}, {ff})")
            }
        }
    }
}

/// Checks every category axiom exhaustively. An empty report means the
/// tables present a genuine category.
pub fn validate_category(c: &FinCat) -> Vec<CategoryViolation> {
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for m in &c.morphisms {
        if !seen.insert(m.id.clone()) {
            out.push(CategoryViolation::DuplicateMorphism { mor: m.id.clone() });
        }
        for o in [&m.dom, &m.cod] {
            if !c.has_object(o) {
                out.push(CategoryViolation::UnknownObjectRef {
                    mor: m.id.clone(),
                    object: o.clone(),
                });
            }
        }
    }
    for o in &c.objects {
        match c.identity.get(o) {
            None => out.push(CategoryViolation::MissingIdentity { object: o.clone() }),
            Some(i) => match c.morphism(i) {
                Some(d) if d.dom == *o && d.cod == *o => {}
                _ => out.push(CategoryViolation::BadIdentityType {
                    object: o.clone(),
                    mor: i.clone(),
                }),
            },
        }
    }
    if !out.is_empty() {
        return out; // structural problems make the rest unreadable
    }
    // Composition is total on (exactly) composable pairs, with correct types.
    for g in &c.morphisms {
        for f in &c.morphisms {
            let composable = f.cod == g.dom;
            match c.composite(&g.id, &f.id) {
                None if composable => out.push(CategoryViolation::MissingComposite {
                    g: g.id.clone(),
                    f: f.id.clone(),
                }),
                Some(_) if !composable => out.push(CategoryViolation::SpuriousComposite {
                    g: g.id.clone(),
                    f: f.id.clone(),
                }),
                Some(r) => {
                    let ok = c
                        .morphism(r)
                        .map(|d| d.dom == f.dom && d.cod == g.cod)
                        .unwrap_or(false);
                    if !ok {
                        out.push(CategoryViolation::CompositeTypeMismatch {
                            g: g.id.clone(),
                            f: f.id.clone(),
                            result: r.clone(),
                        });
                    }
                }
                None => {}
            }
        }
    }
    // Identity laws.
    for m in &c.morphisms {
        let l = c.identity.get(&m.cod).unwrap();
        let r = c.identity.get(&m.dom).unwrap();
        let left_ok = c.composite(l, &m.id) == Some(&m.id);
        let right_ok = c.composite(&m.id, r) == Some(&m.id);
        if !(left_ok && right_ok) {
            out.push(CategoryViolation::IdentityLaw { mor: m.id.clone() });
        }
    }
    // Associativity over every composable triple.
    for h in &c.morphisms {
        for g in &c.morphisms {
            if g.cod != h.dom {
                continue;
            }
            for f in &c.morphisms {
                if f.cod != g.dom {
                    continue;
                }
                let hg = c.composite(&h.id, &g.id);
                let gf = c.composite(&g.id, &f.id);
                if let (Some(hg), Some(gf)) = (hg, gf) {
                    if c.composite(hg, &f.id) != c.composite(&h.id, gf) {
                        out.push(CategoryViolation::Associativity {
                            h: h.id.clone(),
                            g: g.id.clone(),
                            f: f.id.clone(),
                        });
                    }
                }
            }
        }
    }
    out
}

/// Object and morphism maps between two finitely presented categories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorData {
    pub name: String,
    pub source: FinCat,
    pub target: FinCat,
    pub obj_map: BTreeMap<ObjId, ObjId>,
    pub mor_map: BTreeMap<MorId, MorId>,
}

impl FunctorData {
    pub fn new(
        name: &str,
        source: FinCat,
        target: FinCat,
        obj_map: BTreeMap<ObjId, ObjId>,
        mor_map: BTreeMap<MorId, MorId>,
    ) -> Self {
        FunctorData {
            name: name.to_string(),
            source,
            target,
            obj_map,
            mor_map,
        }
    }

    pub fn identity(c: &FinCat) -> Self {
        let obj_map = c.objects().iter().map(|o| (o.clone(), o.clone())).collect();
        let mor_map = c
            .morphisms()
            .iter()
            .map(|m| (m.id.clone(), m.id.clone()))
            .collect();
        FunctorData::new("id", c.clone(), c.clone(), obj_map, mor_map)
    }

    pub fn apply_obj(&self, o: &ObjId) -> &ObjId {
        self.obj_map.get(o).expect("object not in functor domain")
    }

    pub fn apply_mor(&self, m: &MorId) -> &MorId {
        self.mor_map.get(m).expect("morphism not in functor domain")
    }
}

/// One violated functor axiom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorViolation {
    MissingObjectImage { object: ObjId },
    MissingMorphismImage { mor: MorId },
    UnknownImage { mor: MorId, image: MorId },
    DomainMismatch { mor: MorId },
    CodomainMismatch { mor: MorId },
    IdentityNotPreserved { object: ObjId },
    CompositionNotPreserved { g: MorId, f: MorId },
}

impl fmt::Display for FunctorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorViolation::MissingObjectImage { object } => {
                write!(f, "no image for object {object}")
            }
            FunctorViolation::MissingMorphismImage { mor } => {
                write!(f, "no image for morphism {mor}")
            }
            FunctorViolation::UnknownImage { mor, image } => {
                write!(f, "image {image} of {mor} is not in the target")
            }
            FunctorViolation::DomainMismatch { mor } => {
                write!(f, "image of {mor} has wrong domain")
            }
            FunctorViolation::CodomainMismatch { mor } => {
                write!(f, "image of {mor} has wrong codomain")
            }
            FunctorViolation::IdentityNotPreserved { object } => {
                write!(f, "identity of {object} not preserved")
            }
            FunctorViolation::CompositionNotPreserved { g, f: ff } => {
                write!(f, "composition not preserved at ({g}, {ff})")
            }
        }
    }
}

/// Checks dom/cod, identity and composition preservation exhaustively.
pub fn validate_functor(fd: &FunctorData) -> Vec<FunctorViolation> {
    let mut out = Vec::new();
    for o in fd.source.objects() {
        if !fd.obj_map.contains_key(o) {
            out.push(FunctorViolation::MissingObjectImage { object: o.clone() });
        }
    }
    for m in fd.source.morphisms() {
        match fd.mor_map.get(&m.id) {
            None => out.push(FunctorViolation::MissingMorphismImage { mor: m.id.clone() }),
            Some(im) => match fd.target.morphism(im) {
                None => out.push(FunctorViolation::UnknownImage {
                    mor: m.id.clone(),
                    image: im.clone(),
                }),
                Some(imd) => {
                    if Some(&imd.dom) != fd.obj_map.get(&m.dom) {
                        out.push(FunctorViolation::DomainMismatch { mor: m.id.clone() });
                    }
                    if Some(&imd.cod) != fd.obj_map.get(&m.cod) {
                        out.push(FunctorViolation::CodomainMismatch { mor: m.id.clone() });
                    }
                }
            },
        }
    }
    if !out.is_empty() {
        return out;
    }
    for o in fd.source.objects() {
        let src_id = fd.source.identity_of(o).unwrap();
        let tgt_id = fd.target.identity_of(fd.apply_obj(o));
        if Some(fd.apply_mor(src_id)) != tgt_id {
            out.push(FunctorViolation::IdentityNotPreserved { object: o.clone() });
        }
    }
    for ((g, f), gf) in fd.source.compose_table() {
        if fd.source.morphism(g).is_none() || fd.source.morphism(f).is_none() {
            continue;
        }
        let img = fd.target.composite(fd.apply_mor(g), fd.apply_mor(f));
        if img != Some(fd.apply_mor(gf)) {
            out.push(FunctorViolation::CompositionNotPreserved {
                g: g.clone(),
                f: f.clone(),
            });
        }
    }
    out
}

/// G∘F where F: A → B, G: B → C.
pub fn compose_functors(g: &FunctorData, f: &FunctorData) -> FunctorData {
    let obj_map = f
        .obj_map
        .iter()
        .map(|(o, fo)| (o.clone(), g.apply_obj(fo).clone()))
        .collect();
    let mor_map = f
        .mor_map
        .iter()
        .map(|(m, fm)| (m.clone(), g.apply_mor(fm).clone()))
        .collect();
    FunctorData::new(
        &format!("{}∘{}", g.name, f.name),
        f.source.clone(),
        g.target.clone(),
        obj_map,
        mor_map,
    )
}

/// A commuting square: legs `left: apex → U`, `right: apex → V` and a
/// cospan `co_left: U → W`, `co_right: V → W`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Square {
    pub apex: ObjId,
    pub left: MorId,
    pub right: MorId,
    pub co_left: MorId,
    pub co_right: MorId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SquareMode {
    Pullback,
    Pushout,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SquareError {
    #[error("square references morphism {0} missing from the category")]
    MissingMorphism(MorId),
    #[error("square legs/cospan do not typecheck at {0}")]
    TypeMismatch(MorId),
    #[error("square does not commute: {co_left}∘{left} ≠ {co_right}∘{right}")]
    NotCommuting {
        left: MorId,
        right: MorId,
        co_left: MorId,
        co_right: MorId,
    },
}

/// A cone (or cocone) that breaks a universal property: it admits either no
/// mediating morphism or at least two.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareWitness {
    pub object: ObjId,
    pub to_left: MorId,
    pub to_right: MorId,
    pub mediators: Vec<MorId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareVerdict {
    pub holds: bool,
    pub witness: Option<SquareWitness>,
}

fn check_square_wellformed(c: &FinCat, sq: &Square) -> Result<(), SquareError> {
    for m in [&sq.left, &sq.right, &sq.co_left, &sq.co_right] {
        if c.morphism(m).is_none() {
            return Err(SquareError::MissingMorphism(m.clone()));
        }
    }
    if c.dom(&sq.left) != &sq.apex || c.dom(&sq.right) != &sq.apex {
        return Err(SquareError::TypeMismatch(sq.left.clone()));
    }
    if c.dom(&sq.co_left) != c.cod(&sq.left) {
        return Err(SquareError::TypeMismatch(sq.co_left.clone()));
    }
    if c.dom(&sq.co_right) != c.cod(&sq.right) {
        return Err(SquareError::TypeMismatch(sq.co_right.clone()));
    }
    if c.cod(&sq.co_left) != c.cod(&sq.co_right) {
        return Err(SquareError::TypeMismatch(sq.co_right.clone()));
    }
    let lhs = c.composite(&sq.co_left, &sq.left);
    let rhs = c.composite(&sq.co_right, &sq.right);
    if lhs.is_none() || lhs != rhs {
        return Err(SquareError::NotCommuting {
            left: sq.left.clone(),
            right: sq.right.clone(),
            co_left: sq.co_left.clone(),
            co_right: sq.co_right.clone(),
        });
    }
    Ok(())
}

/// Decides whether a commuting square is a pullback or a pushout by testing
/// the universal property against every candidate cone (resp. cocone) in the
/// category. On failure, returns the offending cone with its mediator list.
pub fn verify_square(c: &FinCat, sq: &Square, mode: SquareMode) -> Result<SquareVerdict, SquareError> {
    check_square_wellformed(c, sq)?;
    let u = c.cod(&sq.left).clone();
    let v = c.cod(&sq.right).clone();
    match mode {
        SquareMode::Pullback => {
            // Cones (q, q1: q→U, q2: q→V) with co_left∘q1 = co_right∘q2.
            for q in c.objects() {
                for q1 in c.hom(q, &u) {
                    for q2 in c.hom(q, &v) {
                        let l = c.composite(&sq.co_left, q1);
                        let r = c.composite(&sq.co_right, q2);
                        if l.is_none() || l != r {
                            continue;
                        }
                        let mediators: Vec<MorId> = c
                            .hom(q, &sq.apex)
                            .into_iter()
                            .filter(|m| {
                                c.composite(&sq.left, m) == Some(q1)
                                    && c.composite(&sq.right, m) == Some(q2)
                            })
                            .cloned()
                            .collect();
                        if mediators.len() != 1 {
                            return Ok(SquareVerdict {
                                holds: false,
                                witness: Some(SquareWitness {
                                    object: q.clone(),
                                    to_left: q1.clone(),
                                    to_right: q2.clone(),
                                    mediators,
                                }),
                            });
                        }
                    }
                }
            }
        }
        SquareMode::Pushout => {
            let w = c.cod(&sq.co_left).clone();
            // Cocones (q, r1: U→q, r2: V→q) with r1∘left = r2∘right.
            for q in c.objects() {
                for r1 in c.hom(&u, q) {
                    for r2 in c.hom(&v, q) {
                        let l = c.composite(r1, &sq.left);
                        let r = c.composite(r2, &sq.right);
                        if l.is_none() || l != r {
                            continue;
                        }
                        let mediators: Vec<MorId> = c
                            .hom(&w, q)
                            .into_iter()
                            .filter(|m| {
                                c.composite(m, &sq.co_left) == Some(r1)
                                    && c.composite(m, &sq.co_right) == Some(r2)
                            })
                            .cloned()
                            .collect();
                        if mediators.len() != 1 {
                            return Ok(SquareVerdict {
                                holds: false,
                                witness: Some(SquareWitness {
                                    object: q.clone(),
                                    to_left: r1.clone(),
                                    to_right: r2.clone(),
                                    mediators,
                                }),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(SquareVerdict {
        holds: true,
        witness: None,
    })
}

/// f is monic iff f∘g = f∘h forces g = h, over every parallel pair.
pub fn is_mono(c: &FinCat, f: &MorId) -> bool {
    let d = match c.morphism(f) {
        Some(d) => d,
        None => return false,
    };
    for x in c.objects() {
        let par = c.hom(x, &d.dom);
        for g in &par {
            for h in &par {
                if g == h {
                    continue;
                }
                if c.composite(f, g) == c.composite(f, h) {
                    return false;
                }
            }
        }
    }
    true
}

/// Squares declared simultaneously pullback and pushout ("open gluings"),
/// plus an abstract class of designated monos standing in for open
/// immersions. Finite categories carry no topology of their own, so the
/// open-subobject structure is supplied with the fixture.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DesignatedSquares {
    pub unions: Vec<Square>,
    pub monos: Vec<MorId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DesignatedViolation {
    SquareIllFormed { square: Square, reason: String },
    NotPullback { square: Square },
    NotPushout { square: Square },
    MonoMissing { mor: MorId },
    NotMono { mor: MorId },
}

impl fmt::Display for DesignatedViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DesignatedViolation::SquareIllFormed { square, reason } => {
                write!(f, "designated square at {} ill-formed: {reason}", square.apex)
            }
            DesignatedViolation::NotPullback { square } => {
                write!(f, "designated square at {} is not a pullback", square.apex)
            }
            DesignatedViolation::NotPushout { square } => {
                write!(f, "designated square at {} is not a pushout", square.apex)
            }
            DesignatedViolation::MonoMissing { mor } => {
                write!(f, "designated mono {mor} is not in the category")
            }
            DesignatedViolation::NotMono { mor } => {
                write!(f, "designated mono {mor} is not left-cancellable")
            }
        }
    }
}

/// Verifies every designated union square as a pullback and a pushout, and
/// every designated mono as left-cancellable.
pub fn validate_designated(c: &FinCat, d: &DesignatedSquares) -> Vec<DesignatedViolation> {
    let mut out = Vec::new();
    for sq in &d.unions {
        match verify_square(c, sq, SquareMode::Pullback) {
            Err(e) => {
                out.push(DesignatedViolation::SquareIllFormed {
                    square: sq.clone(),
                    reason: e.to_string(),
                });
                continue;
            }
            Ok(v) if !v.holds => out.push(DesignatedViolation::NotPullback { square: sq.clone() }),
            _ => {}
        }
        if let Ok(v) = verify_square(c, sq, SquareMode::Pushout) {
            if !v.holds {
                out.push(DesignatedViolation::NotPushout { square: sq.clone() });
            }
        }
    }
    for m in &d.monos {
        if c.morphism(m).is_none() {
            out.push(DesignatedViolation::MonoMissing { mor: m.clone() });
        } else if !is_mono(c, m) {
            out.push(DesignatedViolation::NotMono { mor: m.clone() });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn terminal_category_is_valid() {
        let c = fixtures::terminal_cat();
        assert!(validate_category(&c).is_empty());
    }

    #[test]
    fn interval_category_is_valid() {
        let c = fixtures::interval();
        assert!(validate_category(&c).is_empty());
    }

    #[test]
    fn mis_set_identity_row_is_reported_at_f() {
        let c = fixtures::interval();
        let broken = c.with_composite(&MorId::new("1_b"), &MorId::new("f"), &MorId::new("1_b"));
        let report = validate_category(&broken);
        assert!(report
            .iter()
            .any(|v| matches!(v, CategoryViolation::CompositeTypeMismatch { f, .. } if f.as_str() == "f")
                || matches!(v, CategoryViolation::IdentityLaw { mor } if mor.as_str() == "f")));
    }

    #[test]
    fn every_single_composite_mutation_is_caught() {
        // Mutating any single entry of a valid table must produce a report.
        let c = fixtures::opens_two_point_space();
        assert!(validate_category(&c).is_empty());
        let mors: Vec<MorId> = c.morphisms().iter().map(|m| m.id.clone()).collect();
        let mut tried = 0;
        for ((g, f), r) in c.compose_table().clone() {
            for alt in &mors {
                if *alt == r {
                    continue;
                }
                let broken = c.with_composite(&g, &f, alt);
                assert!(
                    !validate_category(&broken).is_empty(),
                    "mutation ({g},{f})->{alt} not caught"
                );
                tried += 1;
            }
        }
        assert!(tried > 0);
    }

    #[test]
    fn identity_functor_is_valid() {
        let c = fixtures::interval();
        assert!(validate_functor(&FunctorData::identity(&c)).is_empty());
    }

    #[test]
    fn constant_functor_to_terminal_is_valid() {
        let c = fixtures::interval();
        let t = fixtures::terminal_cat();
        let f = fixtures::constant_functor("const", &c, &t, &ObjId::new("pt"));
        assert!(validate_functor(&f).is_empty());
    }

    #[test]
    fn wrong_domain_image_is_reported() {
        let c = fixtures::interval();
        let mut f = FunctorData::identity(&c);
        // Send f: a→b to 1_b, whose domain is b, not F(a) = a.
        f.mor_map.insert(MorId::new("f"), MorId::new("1_b"));
        let report = validate_functor(&f);
        assert!(report
            .iter()
            .any(|v| matches!(v, FunctorViolation::DomainMismatch { mor } if mor.as_str() == "f")));
    }

    #[test]
    fn functor_composition_of_valid_functors_is_valid() {
        let c = fixtures::interval();
        let t = fixtures::terminal_cat();
        let f = fixtures::constant_functor("const", &c, &t, &ObjId::new("pt"));
        let g = FunctorData::identity(&t);
        let gf = compose_functors(&g, &f);
        assert!(validate_functor(&gf).is_empty());
    }

    #[test]
    fn two_point_space_square_is_pullback_and_pushout() {
        let c = fixtures::opens_two_point_space();
        let sq = fixtures::opens_two_point_union_square();
        assert!(verify_square(&c, &sq, SquareMode::Pullback).unwrap().holds);
        assert!(verify_square(&c, &sq, SquareMode::Pushout).unwrap().holds);
    }

    #[test]
    fn degenerate_identity_square_holds_both_ways() {
        let c = fixtures::terminal_cat();
        let sq = Square {
            apex: ObjId::new("pt"),
            left: MorId::new("1_pt"),
            right: MorId::new("1_pt"),
            co_left: MorId::new("1_pt"),
            co_right: MorId::new("1_pt"),
        };
        assert!(verify_square(&c, &sq, SquareMode::Pullback).unwrap().holds);
        assert!(verify_square(&c, &sq, SquareMode::Pushout).unwrap().holds);
    }

    #[test]
    fn interval_false_pullback_claim_has_witness() {
        // Claim: a is the pullback of b ←1_b→ b with both legs f. The cone
        // (b, 1_b, 1_b) admits no mediator b → a.
        let c = fixtures::interval();
        let sq = Square {
            apex: ObjId::new("a"),
            left: MorId::new("f"),
            right: MorId::new("f"),
            co_left: MorId::new("1_b"),
            co_right: MorId::new("1_b"),
        };
        let v = verify_square(&c, &sq, SquareMode::Pullback).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        assert_eq!(w.object, ObjId::new("b"));
        assert!(w.mediators.is_empty());
    }

    #[test]
    fn noncommuting_square_is_rejected_input() {
        let c = fixtures::opens_two_point_space();
        // legs into different opens with a cospan that does not commute with them
        let sq = Square {
            apex: ObjId::new("o"),
            left: MorId::new("o_l"),
            right: MorId::new("o_l"),
            co_left: MorId::new("l_lr"),
            co_right: MorId::new("1_l"),
        };
        assert!(verify_square(&c, &sq, SquareMode::Pullback).is_err());
    }

    #[test]
    fn identities_and_interval_f_are_mono() {
        let c = fixtures::interval();
        assert!(is_mono(&c, &MorId::new("1_a")));
        assert!(is_mono(&c, &MorId::new("f")));
    }

    #[test]
    fn group_elements_are_mono_in_bc2() {
        let c = fixtures::bg(&fixtures::group_c2());
        assert!(is_mono(&c, &MorId::new("s")));
        assert!(is_mono(&c, &MorId::new("e")));
    }

    #[test]
    fn oracle_verify_square_matches_independent_cone_enumeration() {
        // Independent oracle: enumerate all spans/cospans and mediators with
        // a flat triple loop, no early exit, and compare verdicts.
        fn oracle_pullback(c: &FinCat, sq: &Square) -> bool {
            let u = c.cod(&sq.left).clone();
            let v = c.cod(&sq.right).clone();
            let mut ok = true;
            for q in c.objects() {
                for q1 in c.hom(q, &u) {
                    for q2 in c.hom(q, &v) {
                        let l = c.composite(&sq.co_left, q1);
                        let r = c.composite(&sq.co_right, q2);
                        if l.is_none() || l != r {
                            continue;
                        }
                        let n = c
                            .hom(q, &sq.apex)
                            .into_iter()
                            .filter(|m| {
                                c.composite(&sq.left, m) == Some(q1)
                                    && c.composite(&sq.right, m) == Some(q2)
                            })
                            .count();
                        if n != 1 {
                            ok = false;
                        }
                    }
                }
            }
            ok
        }
        let c = fixtures::opens_three_point_space();
        let mut squares = Vec::new();
        for m1 in c.morphisms() {
            for m2 in c.morphisms() {
                if m1.dom != m2.dom {
                    continue;
                }
                for c1 in c.arrows_out_of(&m1.cod) {
                    for c2 in c.arrows_out_of(&m2.cod) {
                        if c.cod(c1) != c.cod(c2) {
                            continue;
                        }
                        let sq = Square {
                            apex: m1.dom.clone(),
                            left: m1.id.clone(),
                            right: m2.id.clone(),
                            co_left: c1.clone(),
                            co_right: c2.clone(),
                        };
                        if check_square_wellformed(&c, &sq).is_ok() {
                            squares.push(sq);
                        }
                    }
                }
            }
        }
        assert!(!squares.is_empty());
        for sq in squares {
            let got = verify_square(&c, &sq, SquareMode::Pullback).unwrap().holds;
            assert_eq!(got, oracle_pullback(&c, &sq), "square {sq:?}");
        }
    }
}
