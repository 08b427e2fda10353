use proptest::prelude::*;

use itu_core::constraints::{
    pack_single, sat_to_unif, unif_to_sat, verify, Constraint, ConstraintSet, Substitution,
};
use itu_core::subtyping::selected_arrow_components;
use itu_core::tiling::{solve_spiral_game, validate_strategy, TilingSystem};
use itu_core::types::{organize, organize_deep, organized_paths, parse_type, Type};
use itu_core::{join_arrows, subtype, type_equal};

fn atom() -> impl Strategy<Value = Type> {
    prop_oneof![
        4 => prop::sample::select(vec!["a", "b", "c"]).prop_map(Type::constant),
        2 => prop::sample::select(vec!["x", "y"]).prop_map(Type::var),
        1 => Just(Type::Omega),
    ]
}

fn any_type() -> impl Strategy<Value = Type> {
    atom().prop_recursive(4, 24, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(s, t)| Type::arrow(s, t)),
            prop::collection::vec(inner, 2..4).prop_map(Type::inter),
        ]
    })
}

fn ground_type() -> impl Strategy<Value = Type> {
    any_type().prop_map(|t| {
        t.map_vars(&mut |v| Some(Type::constant(if &**v == "x" { "a" } else { "b" })))
    })
}

fn path() -> impl Strategy<Value = Type> {
    (prop::collection::vec(any_type(), 0..3), atom())
        .prop_filter("path head is an atom", |(_, h)| !h.is_omega())
        .prop_map(|(args, head)| Type::arrows(args, head))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_parse_round_trip(t in any_type()) {
        prop_assert_eq!(parse_type(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn organize_is_organized_and_equal(t in any_type()) {
        let o = organize(&t);
        prop_assert!(o.is_organized(), "{} organized to {}", t, o);
        prop_assert!(type_equal(&o, &t));
        prop_assert_eq!(organize(&o), o.clone());
        prop_assert!(type_equal(&organize_deep(&t), &t));
    }

    #[test]
    fn organized_paths_are_paths(t in any_type()) {
        for p in organized_paths(&t) {
            prop_assert!(p.is_path());
            prop_assert!(subtype(&t, &p));
        }
    }

    #[test]
    fn subtype_preorder(s in any_type(), t in any_type(), r in any_type()) {
        prop_assert!(subtype(&s, &s));
        prop_assert!(subtype(&s, &Type::Omega));
        if subtype(&s, &t) && subtype(&t, &r) {
            prop_assert!(subtype(&s, &r));
        }
    }

    #[test]
    fn meet_is_greatest_lower_bound(s in any_type(), t in any_type(), r in any_type()) {
        let st = Type::inter([s.clone(), t.clone()]);
        prop_assert!(subtype(&st, &s) && subtype(&st, &t));
        prop_assert_eq!(subtype(&r, &st), subtype(&r, &s) && subtype(&r, &t));
    }

    #[test]
    fn omega_equal_types_are_top(t in any_type()) {
        prop_assert_eq!(t.is_omega_equal(), subtype(&Type::Omega, &t));
    }

    #[test]
    fn organized_pairs_compare_pathwise(s in any_type(), t in any_type()) {
        let ps = organized_paths(&s);
        let pt = organized_paths(&t);
        let pathwise = pt.iter().all(|q| ps.iter().any(|p| subtype(p, q)));
        prop_assert_eq!(subtype(&s, &t), pathwise);
    }

    #[test]
    fn path_below_meet_is_below_a_side(s in any_type(), t in any_type(), p in path()) {
        let st = Type::inter([s.clone(), t.clone()]);
        prop_assert_eq!(subtype(&st, &p), subtype(&s, &p) || subtype(&t, &p));
    }

    #[test]
    fn selected_components_witness_arrow_subtyping(
        arrows in prop::collection::vec((any_type(), any_type()), 1..4),
        source in any_type(),
        target in any_type(),
    ) {
        let lhs = Type::inter(arrows.iter().map(|(s, t)| Type::arrow(s.clone(), t.clone())));
        let rhs = Type::arrow(source.clone(), target.clone());
        if subtype(&lhs, &rhs) && !target.is_omega_equal() {
            let parts = lhs.components();
            let chosen = selected_arrow_components(&lhs, &source);
            prop_assert!(!chosen.is_empty());
            let targets = Type::inter(chosen.iter().map(|&i| match &parts[i] {
                Type::Arrow(_, t) => (**t).clone(),
                other => other.clone(),
            }));
            prop_assert!(subtype(&targets, &target));
        }
    }

    #[test]
    fn join_is_an_upper_bound(s in any_type(), s2 in any_type(), t in any_type(), r in any_type()) {
        let left = Type::arrow(s.clone(), t.clone());
        let right = Type::arrow(s2.clone(), t.clone());
        let j = join_arrows(&left, &right).unwrap();
        prop_assert!(subtype(&left, &j) && subtype(&right, &j));
        let bound = Type::arrow(Type::inter([s, s2, r]), t);
        prop_assert!(subtype(&j, &bound));
    }

    #[test]
    fn substitution_respects_subtyping(s in any_type(), t in any_type(), x in ground_type(), y in ground_type()) {
        let sub: Substitution = [("x".into(), x), ("y".into(), y)].into_iter().collect();
        if subtype(&s, &t) {
            prop_assert!(subtype(&sub.apply(&s), &sub.apply(&t)));
        }
    }

    #[test]
    fn constraint_encodings_agree(l in any_type(), r in ground_type(), x in ground_type(), y in ground_type()) {
        let sub: Substitution = [("x".into(), x), ("y".into(), y)].into_iter().collect();
        let cs = ConstraintSet::new(vec![Constraint::leq(l.clone(), r.clone()), Constraint::leq(r, l)]);
        let holds = verify(&sub, &cs);
        prop_assert_eq!(verify(&sub, &sat_to_unif(&cs)), holds);
        prop_assert_eq!(verify(&sub, &unif_to_sat(&sat_to_unif(&cs))), holds);
        let packed = ConstraintSet::new(vec![pack_single(&cs, "bullet")]);
        prop_assert_eq!(verify(&sub, &packed), holds);
    }

    #[test]
    fn solved_strategies_validate(
        h in prop::collection::btree_set((0usize..2, 0usize..2), 1..=4),
        v in prop::collection::btree_set((0usize..2, 0usize..2), 1..=4),
        bottom in prop::collection::vec(0usize..2, 3),
        top in prop::collection::vec(0usize..2, 3),
    ) {
        let t = TilingSystem::new(vec!["a".into(), "b".into()], h, v, bottom, top).unwrap();
        if let Some(sol) = solve_spiral_game(&t, None) {
            prop_assert!(validate_strategy(&t, &sol.strategy).is_ok());
        }
    }
}
