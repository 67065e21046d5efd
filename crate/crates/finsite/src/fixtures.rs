//! The fixture corpus: small hand-checked categories, sites, presheaves and
//! functors reused across the test suites and the command-line driver.
//! Everything here is at most 8 objects / 40 morphisms so exhaustive
//! verification stays fast.

use std::collections::BTreeMap;

use crate::fincat::{DesignatedSquares, FinCat, FunctorData, MorId, ObjId, Square};
use crate::galois::GroupTable;
use crate::sheaves::{Elem, Presheaf};
use crate::sites::{Cover, Pretopology, Topology};

/// Thin category of a finite poset: one morphism `x_y` per strict relation
/// x < y, with composition forced by uniqueness.
pub fn poset_category(name: &str, objects: &[&str], leq: impl Fn(&str, &str) -> bool) -> FinCat {
    let mut b = FinCat::builder(name);
    for o in objects {
        b = b.object(o);
    }
    let rel: Vec<(&str, &str)> = objects
        .iter()
        .flat_map(|x| objects.iter().map(move |y| (*x, *y)))
        .filter(|(x, y)| x != y && leq(x, y))
        .collect();
    for (x, y) in &rel {
        b = b.morphism(&format!("{x}_{y}"), x, y);
    }
    for (x, y) in &rel {
        for (y2, z) in &rel {
            if y == y2 {
                // z ≠ x in a poset; x ≤ z holds by transitivity
                b = b.compose(&format!("{y2}_{z}"), &format!("{x}_{y}"), &format!("{x}_{z}"));
            }
        }
    }
    b.build()
}

pub fn terminal_cat() -> FinCat {
    FinCat::builder("terminal").object("pt").build()
}

/// The interval category a → b.
pub fn interval() -> FinCat {
    FinCat::builder("interval")
        .object("a")
        .object("b")
        .morphism("f", "a", "b")
        .build()
}

/// Opens of the discrete two-point space: e ⊂ l, r ⊂ lr.
pub fn opens_two_point_space() -> FinCat {
    let contains = |x: &str, y: &str| y.contains(x) || x == "e";
    poset_category("opens2", &["e", "l", "r", "lr"], |x, y| {
        x != y && (x == "e" || contains(x, y))
    })
}

/// Opens of the discrete three-point space {0,1,2}; objects are named by
/// the points they contain, `n` for the empty open.
pub fn opens_three_point_space() -> FinCat {
    let objs = ["n", "a0", "a1", "a2", "a01", "a02", "a12", "a012"];
    poset_category("opens3", &objs, |x, y| {
        let pts = |s: &str| -> Vec<char> {
            if s == "n" {
                vec![]
            } else {
                s[1..].chars().collect()
            }
        };
        x != y && pts(x).iter().all(|p| pts(y).contains(p))
    })
}

/// The union square e = l ∩ r, lr = l ∪ r in `opens_two_point_space`.
pub fn opens_two_point_union_square() -> Square {
    Square {
        apex: ObjId::new("e"),
        left: MorId::new("e_l"),
        right: MorId::new("e_r"),
        co_left: MorId::new("l_lr"),
        co_right: MorId::new("r_lr"),
    }
}

pub fn opens_two_point_designated() -> DesignatedSquares {
    DesignatedSquares {
        unions: vec![opens_two_point_union_square()],
        monos: vec![
            MorId::new("e_l"),
            MorId::new("e_r"),
            MorId::new("e_lr"),
            MorId::new("l_lr"),
            MorId::new("r_lr"),
        ],
    }
}

pub fn opens_three_point_designated() -> DesignatedSquares {
    DesignatedSquares {
        unions: vec![Square {
            apex: ObjId::new("n"),
            left: MorId::new("n_a0"),
            right: MorId::new("n_a1"),
            co_left: MorId::new("a0_a01"),
            co_right: MorId::new("a1_a01"),
        }],
        monos: opens_three_point_space()
            .morphisms()
            .iter()
            .filter(|m| !opens_three_point_space().is_identity(&m.id))
            .map(|m| m.id.clone())
            .collect(),
    }
}

/// The open-subspace inclusion {0,1} ⊆ {0,1,2} as a functor of open posets.
pub fn opens_inclusion_functor() -> FunctorData {
    let src = opens_two_point_space();
    let tgt = opens_three_point_space();
    let on_obj = |o: &str| -> &'static str {
        match o {
            "e" => "n",
            "l" => "a0",
            "r" => "a1",
            "lr" => "a01",
            _ => unreachable!(),
        }
    };
    let obj_map: BTreeMap<ObjId, ObjId> = src
        .objects()
        .iter()
        .map(|o| (o.clone(), ObjId::new(on_obj(o.as_str()))))
        .collect();
    let mor_map: BTreeMap<MorId, MorId> = src
        .morphisms()
        .iter()
        .map(|m| {
            let d = on_obj(m.dom.as_str());
            let c = on_obj(m.cod.as_str());
            let img = if m.dom == m.cod {
                format!("1_{d}")
            } else {
                format!("{d}_{c}")
            };
            (m.id.clone(), MorId::new(img))
        })
        .collect();
    FunctorData::new("incl01", src, tgt, obj_map, mor_map)
}

/// Functor sending every object to `target_obj` and every morphism to its
/// identity.
pub fn constant_functor(name: &str, src: &FinCat, tgt: &FinCat, target_obj: &ObjId) -> FunctorData {
    let idm = tgt
        .identity_of(target_obj)
        .expect("target object exists")
        .clone();
    let obj_map = src
        .objects()
        .iter()
        .map(|o| (o.clone(), target_obj.clone()))
        .collect();
    let mor_map = src
        .morphisms()
        .iter()
        .map(|m| (m.id.clone(), idm.clone()))
        .collect();
    FunctorData::new(name, src.clone(), tgt.clone(), obj_map, mor_map)
}

// ---------------------------------------------------------------------------
// Groups and their one-object categories.
// ---------------------------------------------------------------------------

pub fn group_c2() -> GroupTable {
    GroupTable::from_strings("C2", &["e", "s"], &[&["e", "s"], &["s", "e"]])
}

pub fn group_c3() -> GroupTable {
    GroupTable::from_strings(
        "C3",
        &["e", "t", "t2"],
        &[&["e", "t", "t2"], &["t", "t2", "e"], &["t2", "e", "t"]],
    )
}

pub fn group_v4() -> GroupTable {
    GroupTable::from_strings(
        "V4",
        &["e", "a", "b", "ab"],
        &[
            &["e", "a", "b", "ab"],
            &["a", "e", "ab", "b"],
            &["b", "ab", "e", "a"],
            &["ab", "b", "a", "e"],
        ],
    )
}

/// S3 with s a transposition and t a 3-cycle; st ≠ ts.
pub fn group_s3() -> GroupTable {
    // elements: e, t, t2, s, st, st2 with relations s² = e, t³ = e, ts = st².
    let e = 0;
    let t = 1;
    let t2 = 2;
    let s = 3;
    let st = 4;
    let st2 = 5;
    let names = ["e", "t", "t2", "s", "st", "st2"];
    let mut mul = [[0usize; 6]; 6];
    // represent as permutations of {0,1,2}: t = (012), s = (01).
    let perm = |g: usize| -> [usize; 3] {
        match g {
            x if x == e => [0, 1, 2],
            x if x == t => [1, 2, 0],
            x if x == t2 => [2, 0, 1],
            x if x == s => [1, 0, 2],
            x if x == st => [0, 2, 1], // s∘t as functions: apply t then s
            x if x == st2 => [2, 1, 0],
            _ => unreachable!(),
        }
    };
    let of_perm = |p: [usize; 3]| -> usize {
        (0..6).find(|g| perm(*g) == p).expect("closed")
    };
    for (g, row) in mul.iter_mut().enumerate() {
        for (h, cell) in row.iter_mut().enumerate() {
            let (pg, ph) = (perm(g), perm(h));
            let composed = [pg[ph[0]], pg[ph[1]], pg[ph[2]]];
            *cell = of_perm(composed);
        }
    }
    let rows: Vec<Vec<String>> = mul
        .iter()
        .map(|row| row.iter().map(|&k| names[k].to_string()).collect())
        .collect();
    let row_refs: Vec<Vec<&str>> = rows
        .iter()
        .map(|r| r.iter().map(|s| s.as_str()).collect())
        .collect();
    let row_slices: Vec<&[&str]> = row_refs.iter().map(|r| r.as_slice()).collect();
    GroupTable::from_strings("S3", &names, &row_slices)
}

/// The one-object category of a finite group; the identity morphism is the
/// unit element.
pub fn bg(group: &GroupTable) -> FinCat {
    let mut b = FinCat::builder(&format!("B({})", group.name));
    b = b.object_with_identity("pt", &group.elems[group.id]);
    for (i, g) in group.elems.iter().enumerate() {
        if i != group.id {
            b = b.morphism(g, "pt", "pt");
        }
    }
    for (i, g) in group.elems.iter().enumerate() {
        for (j, h) in group.elems.iter().enumerate() {
            b = b.compose(g, h, &group.elems[group.mul[i][j]]);
        }
    }
    b.build()
}

/// B(C2) extended by one extra object `v` with a free orbit of arrows into
/// the group object. Every object has an arrow to or from the image of
/// `bc2_inclusion_functor`.
pub fn bc2_plus_point() -> FinCat {
    FinCat::builder("B(C2)+v")
        .object_with_identity("pt", "e")
        .object("v")
        .morphism("s", "pt", "pt")
        .morphism("f", "v", "pt")
        .morphism("sf", "v", "pt")
        .compose("s", "s", "e")
        .compose("s", "f", "sf")
        .compose("s", "sf", "f")
        .compose("e", "f", "f")
        .compose("e", "sf", "sf")
        .compose("e", "s", "s")
        .compose("s", "e", "s")
        .compose("e", "e", "e")
        .build()
}

pub fn bc2_inclusion_functor() -> FunctorData {
    let src = bg(&group_c2());
    let tgt = bc2_plus_point();
    let obj_map = BTreeMap::from([(ObjId::new("pt"), ObjId::new("pt"))]);
    let mor_map = BTreeMap::from([
        (MorId::new("e"), MorId::new("e")),
        (MorId::new("s"), MorId::new("s")),
    ]);
    FunctorData::new("incl_bc2", src, tgt, obj_map, mor_map)
}

/// A relabeled copy of B(C2) and the corresponding isomorphism of
/// categories.
pub fn bc2_renamed() -> FinCat {
    FinCat::builder("B(C2)'")
        .object_with_identity("qt", "e2")
        .morphism("s2", "qt", "qt")
        .compose("s2", "s2", "e2")
        .compose("e2", "s2", "s2")
        .compose("s2", "e2", "s2")
        .compose("e2", "e2", "e2")
        .build()
}

pub fn bc2_equivalence_functor() -> FunctorData {
    let src = bg(&group_c2());
    let tgt = bc2_renamed();
    let obj_map = BTreeMap::from([(ObjId::new("pt"), ObjId::new("qt"))]);
    let mor_map = BTreeMap::from([
        (MorId::new("e"), MorId::new("e2")),
        (MorId::new("s"), MorId::new("s2")),
    ]);
    FunctorData::new("relabel_bc2", src, tgt, obj_map, mor_map)
}

/// The quotient V4 → C2 killing b, as a functor of one-object categories.
/// Full and essentially surjective but not faithful.
pub fn v4_quotient_functor() -> FunctorData {
    let src = bg(&group_v4());
    let tgt = bg(&group_c2());
    let obj_map = BTreeMap::from([(ObjId::new("pt"), ObjId::new("pt"))]);
    let mor_map = BTreeMap::from([
        (MorId::new("e"), MorId::new("e")),
        (MorId::new("a"), MorId::new("s")),
        (MorId::new("b"), MorId::new("e")),
        (MorId::new("ab"), MorId::new("s")),
    ]);
    FunctorData::new("quot_v4_c2", src, tgt, obj_map, mor_map)
}

// ---------------------------------------------------------------------------
// Pretopologies and topologies.
// ---------------------------------------------------------------------------

/// Only the singleton identity covers.
pub fn identity_pretopology(c: &FinCat) -> Pretopology {
    let covers = c
        .objects()
        .iter()
        .map(|u| {
            (
                u.clone(),
                vec![Cover {
                    base: u.clone(),
                    family: vec![c.identity_of(u).unwrap().clone()],
                }],
            )
        })
        .collect();
    Pretopology { covers }
}

/// Jointly-surjective open covers of the two-point space, with the empty
/// family covering the empty open and all composite refinements included.
pub fn surjective_pretopology_two_point() -> Pretopology {
    let mut tau = identity_pretopology(&opens_two_point_space());
    let add = |tau: &mut Pretopology, base: &str, family: &[&str]| {
        tau.covers
            .get_mut(&ObjId::new(base))
            .unwrap()
            .push(Cover {
                base: ObjId::new(base),
                family: family.iter().map(|m| MorId::new(*m)).collect(),
            });
    };
    add(&mut tau, "e", &[]);
    add(&mut tau, "l", &["1_l", "e_l"]);
    add(&mut tau, "r", &["1_r", "e_r"]);
    add(&mut tau, "lr", &["l_lr", "r_lr"]);
    add(&mut tau, "lr", &["l_lr", "r_lr", "e_lr"]);
    tau
}

pub fn surjective_topology_two_point() -> Topology {
    crate::sites::pretopology_to_topology(
        &opens_two_point_space(),
        &surjective_pretopology_two_point(),
    )
}

// ---------------------------------------------------------------------------
// Presheaves.
// ---------------------------------------------------------------------------

/// Product-form sheaf on the two-point space: sections over `lr` are pairs,
/// the empty open carries a singleton.
pub fn product_sheaf_two_point(stalk_l: &[&str], stalk_r: &[&str]) -> Presheaf {
    let c = opens_two_point_space();
    let star = Elem::new("*");
    let pair = |x: &str, y: &str| Elem::new(format!("({x},{y})"));
    let mut sections = BTreeMap::new();
    sections.insert(ObjId::new("e"), vec![star.clone()]);
    sections.insert(
        ObjId::new("l"),
        stalk_l.iter().map(|x| Elem::new(*x)).collect(),
    );
    sections.insert(
        ObjId::new("r"),
        stalk_r.iter().map(|x| Elem::new(*x)).collect(),
    );
    let mut lr = Vec::new();
    for x in stalk_l {
        for y in stalk_r {
            lr.push(pair(x, y));
        }
    }
    sections.insert(ObjId::new("lr"), lr);
    let mut restriction: BTreeMap<MorId, BTreeMap<Elem, Elem>> = BTreeMap::new();
    let ident = |elems: &[Elem]| -> BTreeMap<Elem, Elem> {
        elems.iter().map(|e| (e.clone(), e.clone())).collect()
    };
    restriction.insert(MorId::new("1_e"), ident(&sections[&ObjId::new("e")]));
    restriction.insert(MorId::new("1_l"), ident(&sections[&ObjId::new("l")]));
    restriction.insert(MorId::new("1_r"), ident(&sections[&ObjId::new("r")]));
    restriction.insert(MorId::new("1_lr"), ident(&sections[&ObjId::new("lr")]));
    let to_star = |elems: &[Elem]| -> BTreeMap<Elem, Elem> {
        elems.iter().map(|e| (e.clone(), star.clone())).collect()
    };
    restriction.insert(MorId::new("e_l"), to_star(&sections[&ObjId::new("l")]));
    restriction.insert(MorId::new("e_r"), to_star(&sections[&ObjId::new("r")]));
    restriction.insert(MorId::new("e_lr"), to_star(&sections[&ObjId::new("lr")]));
    let mut proj_l = BTreeMap::new();
    let mut proj_r = BTreeMap::new();
    for x in stalk_l {
        for y in stalk_r {
            proj_l.insert(pair(x, y), Elem::new(*x));
            proj_r.insert(pair(x, y), Elem::new(*y));
        }
    }
    restriction.insert(MorId::new("l_lr"), proj_l);
    restriction.insert(MorId::new("r_lr"), proj_r);
    Presheaf::new("product_sheaf", c, sections, restriction)
}

/// A presheaf with two sections over the empty open; fails the sheaf axiom
/// for the empty cover.
pub fn two_elem_at_empty_presheaf() -> Presheaf {
    let c = opens_two_point_space();
    let star = Elem::new("*");
    let u = Elem::new("u");
    let mut sections = BTreeMap::new();
    sections.insert(ObjId::new("e"), vec![u.clone(), Elem::new("v")]);
    for o in ["l", "r", "lr"] {
        sections.insert(ObjId::new(o), vec![star.clone()]);
    }
    let mut restriction: BTreeMap<MorId, BTreeMap<Elem, Elem>> = BTreeMap::new();
    restriction.insert(
        MorId::new("1_e"),
        BTreeMap::from([
            (u.clone(), u.clone()),
            (Elem::new("v"), Elem::new("v")),
        ]),
    );
    for o in ["l", "r", "lr"] {
        restriction.insert(
            MorId::new(format!("1_{o}")),
            BTreeMap::from([(star.clone(), star.clone())]),
        );
    }
    for m in ["e_l", "e_r", "e_lr"] {
        restriction.insert(MorId::new(m), BTreeMap::from([(star.clone(), u.clone())]));
    }
    for m in ["l_lr", "r_lr"] {
        restriction.insert(MorId::new(m), BTreeMap::from([(star.clone(), star.clone())]));
    }
    Presheaf::new("two_at_empty", c, sections, restriction)
}

/// Two distinct global sections collapsing on the cover: a matching family
/// with two amalgamations.
pub fn nonseparated_presheaf_two_point() -> Presheaf {
    let c = opens_two_point_space();
    let star = Elem::new("*");
    let mut sections = BTreeMap::new();
    sections.insert(ObjId::new("e"), vec![star.clone()]);
    sections.insert(ObjId::new("l"), vec![star.clone()]);
    sections.insert(ObjId::new("r"), vec![star.clone()]);
    sections.insert(ObjId::new("lr"), vec![Elem::new("u"), Elem::new("v")]);
    let mut restriction: BTreeMap<MorId, BTreeMap<Elem, Elem>> = BTreeMap::new();
    for o in ["e", "l", "r"] {
        restriction.insert(
            MorId::new(format!("1_{o}")),
            BTreeMap::from([(star.clone(), star.clone())]),
        );
    }
    restriction.insert(
        MorId::new("1_lr"),
        BTreeMap::from([
            (Elem::new("u"), Elem::new("u")),
            (Elem::new("v"), Elem::new("v")),
        ]),
    );
    for m in ["e_l", "e_r"] {
        restriction.insert(MorId::new(m), BTreeMap::from([(star.clone(), star.clone())]));
    }
    let collapse = BTreeMap::from([
        (Elem::new("u"), star.clone()),
        (Elem::new("v"), star.clone()),
    ]);
    restriction.insert(MorId::new("l_lr"), collapse.clone());
    restriction.insert(MorId::new("r_lr"), collapse.clone());
    restriction.insert(MorId::new("e_lr"), collapse);
    Presheaf::new("nonseparated", c, sections, restriction)
}

/// Product-form sheaf on the three-point space with the given stalks.
pub fn product_sheaf_three_point(s0: &[&str], s1: &[&str], s2: &[&str]) -> Presheaf {
    let c = opens_three_point_space();
    let stalks: BTreeMap<char, Vec<String>> = BTreeMap::from([
        ('0', s0.iter().map(|s| s.to_string()).collect()),
        ('1', s1.iter().map(|s| s.to_string()).collect()),
        ('2', s2.iter().map(|s| s.to_string()).collect()),
    ]);
    let pts = |o: &ObjId| -> Vec<char> {
        if o.as_str() == "n" {
            vec![]
        } else {
            o.as_str()[1..].chars().collect()
        }
    };
    // sections over U = tuples of stalk choices at the points of U
    let tuples = |points: &[char]| -> Vec<Vec<String>> {
        let mut out = vec![Vec::new()];
        for p in points {
            let mut next = Vec::new();
            for t in &out {
                for v in &stalks[p] {
                    let mut t2 = t.clone();
                    t2.push(v.clone());
                    next.push(t2);
                }
            }
            out = next;
        }
        out
    };
    let elem_name = |points: &[char], t: &[String]| -> Elem {
        if points.is_empty() {
            Elem::new("*")
        } else {
            Elem::new(
                points
                    .iter()
                    .zip(t)
                    .map(|(p, v)| format!("{p}={v}"))
                    .collect::<Vec<_>>()
                    .join(","),
            )
        }
    };
    let mut sections: BTreeMap<ObjId, Vec<Elem>> = BTreeMap::new();
    for u in c.objects() {
        let points = pts(u);
        let elems = tuples(&points)
            .iter()
            .map(|t| elem_name(&points, t))
            .collect();
        sections.insert(u.clone(), elems);
    }
    let mut restriction: BTreeMap<MorId, BTreeMap<Elem, Elem>> = BTreeMap::new();
    for m in c.morphisms() {
        let dpoints = pts(&m.dom);
        let cpoints = pts(&m.cod);
        let mut table = BTreeMap::new();
        for t in tuples(&cpoints) {
            let sub: Vec<String> = dpoints
                .iter()
                .map(|p| {
                    let idx = cpoints.iter().position(|q| q == p).expect("inclusion");
                    t[idx].clone()
                })
                .collect();
            table.insert(elem_name(&cpoints, &t), elem_name(&dpoints, &sub));
        }
        restriction.insert(m.id.clone(), table);
    }
    Presheaf::new("product_sheaf3", c, sections, restriction)
}

/// The two-object category with no arrows between the objects; base for the
/// faithfulness counterexample.
pub fn isolated_pair_category() -> FinCat {
    FinCat::builder("pair").object("d").object("z").build()
}

pub fn terminal_to_pair_functor() -> FunctorData {
    let src = terminal_cat();
    let tgt = isolated_pair_category();
    let obj_map = BTreeMap::from([(ObjId::new("pt"), ObjId::new("d"))]);
    let mor_map = BTreeMap::from([(MorId::new("1_pt"), MorId::new("1_d"))]);
    FunctorData::new("pick_d", src, tgt, obj_map, mor_map)
}

/// The (𝓢, 𝓣) pair: constant singleton into a sheaf with a two-element
/// fiber over the isolated object.
pub fn faithfulness_pair() -> (Presheaf, Presheaf) {
    let c = isolated_pair_category();
    let s = crate::sheaves::constant_presheaf("S", &c, &["*"]);
    let star = Elem::new("*");
    let mut sections = BTreeMap::new();
    sections.insert(ObjId::new("d"), vec![star.clone()]);
    sections.insert(ObjId::new("z"), vec![Elem::new("0"), Elem::new("1")]);
    let restriction = BTreeMap::from([
        (
            MorId::new("1_d"),
            BTreeMap::from([(star.clone(), star.clone())]),
        ),
        (
            MorId::new("1_z"),
            BTreeMap::from([
                (Elem::new("0"), Elem::new("0")),
                (Elem::new("1"), Elem::new("1")),
            ]),
        ),
    ]);
    let t = Presheaf::new("T", c, sections, restriction);
    (s, t)
}

/// Right regular representation of a finite group as a presheaf on B(G).
pub fn regular_gset(group: &GroupTable) -> Presheaf {
    let c = bg(group);
    let elems: Vec<Elem> = group.elems.iter().map(|g| Elem::new(format!("r{g}"))).collect();
    let sections = BTreeMap::from([(ObjId::new("pt"), elems.clone())]);
    let mut restriction = BTreeMap::new();
    for (gi, g) in group.elems.iter().enumerate() {
        let mut table = BTreeMap::new();
        for (xi, x) in group.elems.iter().enumerate() {
            let _ = x;
            // restriction along g sends x to x·g (right action).
            table.insert(elems[xi].clone(), elems[group.mul[xi][gi]].clone());
        }
        restriction.insert(MorId::new(g), table);
    }
    Presheaf::new(&format!("reg_{}", group.name), c, sections, restriction)
}

/// The G-set G/H for a subgroup given by its element indices.
pub fn coset_gset(group: &GroupTable, subgroup: &[usize], name: &str) -> Presheaf {
    let c = bg(group);
    // cosets Hx (right cosets, since the action is on the right)
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    let mut coset_of = vec![usize::MAX; group.elems.len()];
    for x in 0..group.elems.len() {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = subgroup.iter().map(|&h| group.mul[h][x]).collect();
        let idx = cosets.len();
        for &m in &members {
            coset_of[m] = idx;
        }
        cosets.push(members);
    }
    let elems: Vec<Elem> = (0..cosets.len())
        .map(|i| Elem::new(format!("c{i}")))
        .collect();
    let sections = BTreeMap::from([(ObjId::new("pt"), elems.clone())]);
    let mut restriction = BTreeMap::new();
    for (gi, g) in group.elems.iter().enumerate() {
        let mut table = BTreeMap::new();
        for (ci, coset) in cosets.iter().enumerate() {
            let image = coset_of[group.mul[coset[0]][gi]];
            table.insert(elems[ci].clone(), elems[image].clone());
        }
        restriction.insert(MorId::new(g), table);
    }
    Presheaf::new(name, c, sections, restriction)
}

// ---------------------------------------------------------------------------
// Counterexample fixtures.
// ---------------------------------------------------------------------------

/// Source of the cocontinuity counterexample: a poset with one open union
/// square (i; a, b; u) and one disjoint "closed gluing" pushout
/// (c; z1, z2; g).
pub fn cocont_source() -> FinCat {
    let le = |x: &str, y: &str| -> bool {
        let up: &[(&str, &str)] = &[
            ("i", "a"),
            ("i", "b"),
            ("i", "u"),
            ("a", "u"),
            ("b", "u"),
            ("c", "z1"),
            ("c", "z2"),
            ("c", "g"),
            ("z1", "g"),
            ("z2", "g"),
        ];
        up.contains(&(x, y))
    };
    poset_category("cocont_src", &["i", "a", "b", "u", "c", "z1", "z2", "g"], le)
}

/// Target of the cocontinuity counterexample: the closed-gluing legs are
/// collapsed to a single chain c < z < g.
pub fn cocont_target() -> FinCat {
    let le = |x: &str, y: &str| -> bool {
        let up: &[(&str, &str)] = &[
            ("i", "a"),
            ("i", "b"),
            ("i", "u"),
            ("a", "u"),
            ("b", "u"),
            ("c", "z"),
            ("c", "g"),
            ("z", "g"),
        ];
        up.contains(&(x, y))
    };
    poset_category("cocont_tgt", &["i", "a", "b", "u", "c", "z", "g"], le)
}

/// Identity on the open part, collapse z1, z2 ↦ z on the closed part:
/// preserves the designated union but not the closed-gluing pushout.
pub fn cocont_functor() -> FunctorData {
    let src = cocont_source();
    let tgt = cocont_target();
    fn on_obj(o: &str) -> &str {
        match o {
            "z1" | "z2" => "z",
            other => other,
        }
    }
    let obj_map: BTreeMap<ObjId, ObjId> = src
        .objects()
        .iter()
        .map(|o| (o.clone(), ObjId::new(on_obj(o.as_str()))))
        .collect();
    let mor_map: BTreeMap<MorId, MorId> = src
        .morphisms()
        .iter()
        .map(|m| {
            let d = on_obj(m.dom.as_str());
            let c = on_obj(m.cod.as_str());
            let img = if d == c {
                format!("1_{d}")
            } else {
                format!("{d}_{c}")
            };
            (m.id.clone(), MorId::new(img))
        })
        .collect();
    FunctorData::new("collapse_closed", src, tgt, obj_map, mor_map)
}

pub fn cocont_source_designated() -> DesignatedSquares {
    DesignatedSquares {
        unions: vec![Square {
            apex: ObjId::new("i"),
            left: MorId::new("i_a"),
            right: MorId::new("i_b"),
            co_left: MorId::new("a_u"),
            co_right: MorId::new("b_u"),
        }],
        monos: vec![
            MorId::new("i_a"),
            MorId::new("i_b"),
            MorId::new("a_u"),
            MorId::new("b_u"),
        ],
    }
}

pub fn cocont_target_designated() -> DesignatedSquares {
    cocont_source_designated()
}

/// The closed-gluing pushout square of `cocont_source`, not designated as a
/// union.
pub fn cocont_closed_square() -> Square {
    Square {
        apex: ObjId::new("c"),
        left: MorId::new("c_z1"),
        right: MorId::new("c_z2"),
        co_left: MorId::new("z1_g"),
        co_right: MorId::new("z2_g"),
    }
}

/// Source for the iso-reflection counterexample: a union square plus an
/// unrelated object x < u, whose inclusion the collapse functor sends to an
/// identity.
pub fn isoref_source() -> FinCat {
    let le = |x: &str, y: &str| -> bool {
        let up: &[(&str, &str)] = &[
            ("i", "a"),
            ("i", "b"),
            ("i", "u"),
            ("a", "u"),
            ("b", "u"),
            ("x", "u"),
        ];
        up.contains(&(x, y))
    };
    poset_category("isoref_src", &["i", "a", "b", "u", "x"], le)
}

pub fn isoref_source_designated() -> DesignatedSquares {
    DesignatedSquares {
        unions: vec![Square {
            apex: ObjId::new("i"),
            left: MorId::new("i_a"),
            right: MorId::new("i_b"),
            co_left: MorId::new("a_u"),
            co_right: MorId::new("b_u"),
        }],
        monos: vec![MorId::new("i_a"), MorId::new("i_b")],
    }
}

pub fn isoref_functor() -> FunctorData {
    let src = isoref_source();
    let tgt = terminal_cat();
    constant_functor("collapse_all", &src, &tgt, &ObjId::new("pt"))
}

pub fn terminal_designated() -> DesignatedSquares {
    DesignatedSquares {
        unions: vec![],
        monos: vec![MorId::new("1_pt")],
    }
}

/// Fullness-failure analog: two isolated objects mapping into a category
/// where their images are connected by an arrow.
pub fn notfull_source() -> FinCat {
    FinCat::builder("notfull_src").object("n1").object("n2").build()
}

pub fn notfull_target() -> FinCat {
    FinCat::builder("notfull_tgt")
        .object("m1")
        .object("m2")
        .morphism("t", "m1", "m2")
        .build()
}

pub fn notfull_functor() -> FunctorData {
    let src = notfull_source();
    let tgt = notfull_target();
    let obj_map = BTreeMap::from([
        (ObjId::new("n1"), ObjId::new("m1")),
        (ObjId::new("n2"), ObjId::new("m2")),
    ]);
    let mor_map = BTreeMap::from([
        (MorId::new("1_n1"), MorId::new("1_m1")),
        (MorId::new("1_n2"), MorId::new("1_m2")),
    ]);
    FunctorData::new("separate_points", src, tgt, obj_map, mor_map)
}

/// A functor collapsing the union square of a poset into the interval; the
/// image square keeps its pullback half but loses the pushout half.
pub fn square_collapse_functor() -> FunctorData {
    let src = poset_category("square", &["i", "p", "q", "u"], |x, y| {
        [("i", "p"), ("i", "q"), ("i", "u"), ("p", "u"), ("q", "u")].contains(&(x, y))
    });
    let tgt = interval();
    fn on_obj(o: &str) -> &str {
        if o == "u" {
            "b"
        } else {
            "a"
        }
    }
    let obj_map: BTreeMap<ObjId, ObjId> = src
        .objects()
        .iter()
        .map(|o| (o.clone(), ObjId::new(on_obj(o.as_str()))))
        .collect();
    let mor_map: BTreeMap<MorId, MorId> = src
        .morphisms()
        .iter()
        .map(|m| {
            let d = on_obj(m.dom.as_str());
            let c = on_obj(m.cod.as_str());
            let img = if d == c { format!("1_{d}") } else { "f".to_string() };
            (m.id.clone(), MorId::new(img))
        })
        .collect();
    FunctorData::new("collapse_square", src, tgt, obj_map, mor_map)
}

pub fn square_collapse_designated_src() -> DesignatedSquares {
    DesignatedSquares {
        unions: vec![Square {
            apex: ObjId::new("i"),
            left: MorId::new("i_p"),
            right: MorId::new("i_q"),
            co_left: MorId::new("p_u"),
            co_right: MorId::new("q_u"),
        }],
        monos: vec![MorId::new("i_p"), MorId::new("i_q")],
    }
}

pub fn interval_designated() -> DesignatedSquares {
    DesignatedSquares {
        unions: vec![],
        monos: vec![MorId::new("1_a"), MorId::new("1_b"), MorId::new("f")],
    }
}

/// Functor from the terminal category picking out b in the interval.
pub fn terminal_to_interval_b() -> FunctorData {
    let src = terminal_cat();
    let tgt = interval();
    let obj_map = BTreeMap::from([(ObjId::new("pt"), ObjId::new("b"))]);
    let mor_map = BTreeMap::from([(MorId::new("1_pt"), MorId::new("1_b"))]);
    FunctorData::new("pick_b", src, tgt, obj_map, mor_map)
}

/// Presheaf on the interval with explicit stalks and restriction b → a.
pub fn interval_presheaf(
    name: &str,
    a_elems: &[&str],
    b_elems: &[&str],
    restrict: &[(&str, &str)],
) -> Presheaf {
    let c = interval();
    let sections = BTreeMap::from([
        (
            ObjId::new("a"),
            a_elems.iter().map(|e| Elem::new(*e)).collect::<Vec<_>>(),
        ),
        (
            ObjId::new("b"),
            b_elems.iter().map(|e| Elem::new(*e)).collect::<Vec<_>>(),
        ),
    ]);
    let ident = |elems: &[&str]| -> BTreeMap<Elem, Elem> {
        elems
            .iter()
            .map(|e| (Elem::new(*e), Elem::new(*e)))
            .collect()
    };
    let restriction = BTreeMap::from([
        (MorId::new("1_a"), ident(a_elems)),
        (MorId::new("1_b"), ident(b_elems)),
        (
            MorId::new("f"),
            restrict
                .iter()
                .map(|(x, y)| (Elem::new(*x), Elem::new(*y)))
                .collect(),
        ),
    ]);
    Presheaf::new(name, c, sections, restriction)
}
