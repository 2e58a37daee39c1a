use std::collections::BTreeMap;

use possibility::bao::*;
use possibility::battery::battery;
use possibility::bits::StateSet;
use possibility::forcing::valid_on_frame;
use possibility::frame::{classify, FinitePoset, Frame, Relation};
use possibility::morphism::{are_isomorphic, check_morphism, compose, Flag, MorphismSpec};
use possibility::transform::{disjoint_union, powerset_possibilization};

fn one(r: Relation) -> BTreeMap<String, Relation> {
    BTreeMap::from([("i".to_string(), r)])
}

fn fan() -> Frame {
    let p = FinitePoset::new(4, &[(1, 0), (2, 0), (3, 0)]).unwrap();
    Frame::full(p, one(Relation::universal(4))).unwrap()
}

fn p3() -> Frame {
    let k = Frame::full(FinitePoset::discrete(2), one(Relation::universal(2))).unwrap();
    powerset_possibilization(&k).unwrap()
}

fn sample_algebras() -> Vec<FiniteBAO> {
    vec![
        FiniteBAO::powerset(1, &["i"], |_, x| x).unwrap(),
        FiniteBAO::powerset(2, &["i"], |_, x| x).unwrap(),
        FiniteBAO::powerset(2, &["i"], |_, _| StateSet::full(2)).unwrap(),
        FiniteBAO::complex_algebra(3, &one(Relation::from_pairs(3, &[(0, 1), (1, 2), (2, 2)]).unwrap())).unwrap(),
        FiniteBAO::complex_algebra(3, &one(Relation::universal(3))).unwrap(),
    ]
}

fn is_iso(h: &BaoMap) -> bool {
    check_bao_hom(h, true).unwrap().verdict && h.is_injective() && h.is_surjective()
}

#[test]
fn fan_algebra_is_the_eight_element_powerset() {
    let b = underlying_bao(&fan()).unwrap();
    assert_eq!(b.len(), 8);
    let pow3 = FiniteBAO::powerset(3, &["i"], |_, x| if x == StateSet::full(3) { x } else { StateSet::EMPTY }).unwrap();
    assert!(bao_isomorphism(&b, &pow3).unwrap().is_some());
    assert!(validate_bao(&b).verdict);
}

#[test]
fn algebra_round_trips_through_both_frame_constructions() {
    for b in sample_algebras() {
        assert!(is_iso(&zeta_a(&b).unwrap()));
        assert!(is_iso(&eta_a(&b).unwrap()));
        let full = underlying_bao(&full_frame(&b).unwrap()).unwrap();
        assert!(bao_isomorphism(&b, &full).unwrap().is_some());
        let ff = underlying_bao(&filter_frame(&b).unwrap()).unwrap();
        assert!(bao_isomorphism(&b, &ff).unwrap().is_some());
        assert!(classify_bao(&b).unwrap().v_condition);
        let a = principal_frame(&b).unwrap();
        let c = classify(&a).unwrap();
        assert!(c.tight && c.principal);
        let g = classify(&general_filter_frame(&b).unwrap()).unwrap();
        assert!(g.strong && g.tight && g.filter_descriptive);
    }
}

#[test]
fn zeta_is_an_isomorphism_exactly_on_tight_principal_frames() {
    let z = zeta_f(&p3()).unwrap();
    let mut iso = z.clone();
    iso.flags.insert(Flag::Isomorphism);
    assert!(check_morphism(&iso).unwrap().verdict);

    let z = zeta_f(&fan()).unwrap();
    assert!(check_morphism(&z).unwrap().verdict);
    assert_eq!(z.target.n(), 7);
    let mut emb = z.clone();
    emb.flags.insert(Flag::StrongEmbedding);
    assert!(check_morphism(&emb).unwrap().verdict);
    emb.flags.insert(Flag::Surjective);
    assert!(!check_morphism(&emb).unwrap().verdict);
    assert!(!classify(&fan()).unwrap().principal);
}

#[test]
fn eta_is_an_isomorphism_on_filter_descriptive_frames() {
    for f in [fan(), p3()] {
        let e = eta_f(&f).unwrap();
        assert!(check_morphism(&e).unwrap().verdict);
        let fd = classify(&f).unwrap().filter_descriptive;
        assert_eq!(are_isomorphic(&f, &e.target).unwrap().is_some(), fd);
    }
}

#[test]
fn algebraic_validity_matches_frame_validity() {
    for f in [fan(), p3()] {
        let b = underlying_bao(&f).unwrap();
        for phi in battery() {
            assert_eq!(
                algebraic_valid(&b, &phi).unwrap().verdict,
                valid_on_frame(&f, &phi).unwrap().verdict,
                "{phi}"
            );
        }
    }
}

fn inclusion(sub: &FiniteBAO, b: &FiniteBAO) -> BaoMap {
    let map = (0..sub.len()).map(|k| b.index_of(sub.element(k)).unwrap()).collect();
    BaoMap::new(sub.clone(), b.clone(), map).unwrap()
}

fn sample_homs() -> Vec<BaoMap> {
    let mut out = Vec::new();
    for b in sample_algebras() {
        out.push(BaoMap::identity(&b));
        for seed in 1..b.len() - 1 {
            let sub = subalgebra(&b, &[seed]).unwrap();
            out.push(inclusion(&sub, &b));
        }
    }
    out
}

#[test]
fn naturality_squares_commute() {
    for h in sample_homs() {
        assert!(check_bao_hom(&h, true).unwrap().verdict);
        let (a, b) = (&h.source, &h.target);

        // (h♭)⋆ ∘ ζ_A = ζ_B ∘ h
        let flat = dual_hom_rela(&h).unwrap();
        assert!(check_morphism(&flat).unwrap().verdict);
        let flat_star = dual_hom_under(&flat).unwrap();
        let (za, zb) = (zeta_a(a).unwrap(), zeta_a(b).unwrap());
        for x in 0..a.len() {
            assert_eq!(flat_star.map[za.map[x]], zb.map[h.map[x]]);
        }

        // (h_gff)⋆ ∘ η_A = η_B ∘ h
        let g = dual_hom_gff(&h).unwrap();
        assert!(check_morphism(&g).unwrap().verdict);
        let g_star = dual_hom_under(&g).unwrap();
        let (ea, eb) = (eta_a(a).unwrap(), eta_a(b).unwrap());
        for x in 0..a.len() {
            assert_eq!(g_star.map[ea.map[x]], eb.map[h.map[x]]);
        }
    }
}

#[test]
fn frame_side_naturality_and_reflections() {
    let f = fan();
    let z = zeta_f(&f).unwrap();
    let zbar = reflection_map(&z).unwrap();
    assert_eq!(zbar.map, (0..zbar.source.n()).collect::<Vec<_>>());

    let e = eta_f(&f).unwrap();
    let ebar = filter_reflection(&e).unwrap();
    assert_eq!(ebar.map, (0..ebar.source.n()).collect::<Vec<_>>());

    // (g⋆)_gff ∘ η_F = η_G ∘ g for g = ζ_F
    let g_star = dual_hom_under(&z).unwrap();
    let lifted = dual_hom_gff(&g_star).unwrap();
    let eg = eta_f(&z.target).unwrap();
    for x in 0..f.n() {
        assert_eq!(lifted.map[e.map[x]], eg.map[z.map[x]]);
    }
}

#[test]
fn dual_of_identity_and_composition_order() {
    let f = fan();
    let id = MorphismSpec::identity(&f, possibility::morphism::Grade::P);
    let d = dual_hom_under(&id).unwrap();
    assert_eq!(d.map, (0..d.source.len()).collect::<Vec<_>>());

    let z = zeta_f(&f).unwrap();
    let e = eta_f(&z.target).unwrap();
    let c = compose(&z, &e).unwrap();
    let lhs = dual_hom_under(&c).unwrap();
    let rhs = dual_hom_under(&e).unwrap().then(&dual_hom_under(&z).unwrap()).unwrap();
    assert_eq!(lhs.map, rhs.map);
}

#[test]
fn union_algebra_is_the_product() {
    let c = Frame::full(FinitePoset::chain(2), one(Relation::universal(2))).unwrap();
    let (u, _) = disjoint_union(&[fan(), c.clone()]).unwrap();
    let lhs = underlying_bao(&u).unwrap();
    let rhs = product(&[underlying_bao(&fan()).unwrap(), underlying_bao(&c).unwrap()]).unwrap();
    assert!(bao_isomorphism(&lhs, &rhs).unwrap().is_some());
}
