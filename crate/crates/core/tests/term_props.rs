mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;

use padp_core::term::{Defined, Position, Subst, Symbol, Term, Var};

use common::{any_term, constructor_term, rng};

fn defined() -> Defined {
    Defined(common::DEFINED.iter().map(|&(f, k)| Symbol::new(f, k)).collect())
}

/// A random subset of the defined positions of `t`.
fn some_defined_positions(r: &mut impl Rng, t: &Term) -> BTreeSet<Position> {
    t.defined_positions(&defined()).into_iter().filter(|_| r.gen_bool(0.5)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn annotate_then_flatten(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = any_term(&mut r, 4, &["x", "y"]);
        let phi = some_defined_positions(&mut r, &t);
        let a = t.annotate(&phi, &defined()).unwrap();
        prop_assert_eq!(a.flat(), t.flat());
        let got: BTreeSet<Position> = a.annotated_positions().into_iter().collect();
        prop_assert_eq!(got, phi);
    }

    #[test]
    fn substitution_commutes_with_flat(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = any_term(&mut r, 3, &["x", "y"]);
        let t = t.annotate_all_defined(&defined());
        let mut sigma = Subst::new();
        sigma.insert(Var::new("x"), any_term(&mut r, 2, &["y"]).annotate_all_defined(&defined()));
        let flat_sigma = Subst(sigma.0.iter().map(|(v, u)| (v.clone(), u.flat())).collect());
        prop_assert_eq!(t.apply(&sigma).flat(), t.flat().apply(&flat_sigma));
    }

    #[test]
    fn matching_instantiates_the_pattern(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = constructor_term(&mut r, 3, &["x", "y"]);
        let mut sigma = Subst::new();
        sigma.insert(Var::new("x"), constructor_term(&mut r, 2, &["z"]));
        sigma.insert(Var::new("y"), constructor_term(&mut r, 2, &[]));
        let t = p.apply(&sigma).annotate_all_defined(&defined());
        let m = Term::match_term(&p, &t).expect("an instance matches its pattern");
        prop_assert_eq!(p.apply(&m), t.flat());
    }

    #[test]
    fn unifiers_equate_both_sides(seed in any::<u64>()) {
        let mut r = rng(seed);
        let s = any_term(&mut r, 3, &["x", "y"]);
        let t = any_term(&mut r, 3, &["y", "z"]);
        if let Some(d) = Term::unify(&s, &t) {
            prop_assert_eq!(s.apply(&d).flat(), t.apply(&d).flat());
        }
        // A term always unifies with a renamed copy of itself.
        let u = s.rename(&|v| Var::new(&format!("{}'", v)));
        prop_assert!(Term::unify(&s, &u).is_some());
    }

    #[test]
    fn replacement_size(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = any_term(&mut r, 4, &["x"]);
        let ps = t.positions();
        let p = &ps[r.gen_range(0..ps.len())];
        let new = any_term(&mut r, 2, &["y"]);
        let out = t.replace_at(p, new.clone()).unwrap();
        prop_assert_eq!(out.size(), t.size() - t.subterm_at(p).unwrap().size() + new.size());
        prop_assert_eq!(out.subterm_at(p).unwrap(), &new);
    }

    #[test]
    fn positions_are_preorder(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = any_term(&mut r, 4, &["x"]);
        let ps = t.positions();
        prop_assert_eq!(ps.len(), t.size());
        prop_assert!(ps[0].is_root());
        for w in ps.windows(2) {
            prop_assert!(w[0] < w[1] || w[0].is_prefix_of(&w[1]));
        }
    }
}

#[test]
fn annotating_a_constructor_is_rejected() {
    let t = Term::fun("s", vec![Term::constant("0")]);
    assert!(t.annotate(&[Position::root()].into_iter().collect(), &defined()).is_err());
}

#[test]
fn occurs_check() {
    let x = Term::var("x");
    assert!(Term::unify(&x, &Term::fun("s", vec![x.clone()])).is_none());
}
