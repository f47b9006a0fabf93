use dualforget::nnf::{is_nnf, nnf};
use dualforget::oracle::{equiv_fo_finite, equiv_prop, eval_fo, eval_prop, taut_prop, Interpretation, Valuation};
use dualforget::simplify::simplify;
use dualforget::subst::substitute_prop;
use dualforget::{forget_strong, forget_weak, print_formula, parse_formula, random, Formula, Signature, Status};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fo_equiv(f: &Formula, g: &Formula, d: usize) -> bool {
    equiv_fo_finite(f, g, &Signature::new(), d).unwrap().is_equivalent()
}

fn prop_case(seed: u64) -> (Vec<String>, Formula) {
    let mut r = rng(seed);
    let vars = random::prop_vars(6);
    let f = random::prop_formula(&mut r, &vars, 5);
    (vars, f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn nnf_and_simplify_preserve_truth_tables(seed in any::<u64>()) {
        let (_, f) = prop_case(seed);
        let n = nnf(&f);
        prop_assert!(is_nnf(&n));
        prop_assert!(equiv_prop(&f, &n).unwrap());
        let s = simplify(&f);
        prop_assert!(equiv_prop(&f, &s).unwrap());
        prop_assert_eq!(simplify(&s), s);
    }

    #[test]
    fn positive_means_monotone(seed in any::<u64>()) {
        let (vars, f) = prop_case(seed);
        let p = &vars[0];
        let lo = substitute_prop(&f, p, &Formula::Bottom).unwrap();
        let hi = substitute_prop(&f, p, &Formula::Top).unwrap();
        if f.polarity(p).is_positive() {
            prop_assert!(taut_prop(&Formula::implies(lo.clone(), hi.clone())).unwrap());
        }
        if f.polarity(p).is_negative() {
            prop_assert!(taut_prop(&Formula::implies(hi, lo)).unwrap());
        }
    }

    #[test]
    fn substitution_removes_the_symbol(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vars = random::prop_vars(4);
        let f = random::prop_formula(&mut r, &vars, 4);
        let e = random::prop_formula(&mut r, &vars[1..], 2);
        prop_assert!(!substitute_prop(&f, &vars[0], &e).unwrap().mentions(&vars[0]));
    }

    #[test]
    fn prop_oracle_agrees_with_finite_models(seed in any::<u64>()) {
        let (vars, f) = prop_case(seed);
        let mut r = rng(seed ^ 0x5eed);
        let v: Valuation = vars.iter().map(|p| (p.clone(), r.gen_bool(0.5))).collect();
        let mut m = Interpretation::new(1);
        for (p, b) in &v {
            m = m.with_prop(p, *b);
        }
        prop_assert_eq!(eval_prop(&f, &v).unwrap(), eval_fo(&f, &m).unwrap());
    }

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let f = random::any_formula(&mut rng(seed), 6);
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&text, &Signature::new()).unwrap(), f);
    }

    #[test]
    fn forgetting_matches_expansion(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vars = random::prop_vars(5);
        let th = random::prop_theory(&mut r, &vars, 4, 4);
        let forget = random::subset(&mut r, &vars);
        let strong = forget_strong(&th, &forget).unwrap();
        let weak = forget_weak(&th, &forget).unwrap();
        prop_assert_eq!(strong.status, Status::Propositional);
        for p in &forget {
            prop_assert!(!strong.formula.mentions(p) && !weak.formula.mentions(p));
        }
        let conj = th.conjunction();
        prop_assert!(equiv_prop(&strong.formula, &Formula::exists2_many(forget.clone(), conj.clone())).unwrap());
        prop_assert!(equiv_prop(&weak.formula, &Formula::forall2_many(forget.clone(), conj)).unwrap());
    }

    #[test]
    fn elimination_order_does_not_matter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vars = random::prop_vars(5);
        let th = random::prop_theory(&mut r, &vars, 3, 4);
        let forget = random::subset(&mut r, &vars);
        let mut reversed = forget.clone();
        reversed.reverse();
        let a = forget_strong(&th, &forget).unwrap().formula;
        let b = forget_strong(&th, &reversed).unwrap().formula;
        prop_assert!(equiv_prop(&a, &b).unwrap());
        let a = forget_weak(&th, &forget).unwrap().formula;
        let b = forget_weak(&th, &reversed).unwrap().formula;
        prop_assert!(equiv_prop(&a, &b).unwrap());
    }

    #[test]
    fn forgetting_is_deterministic(seed in any::<u64>()) {
        let mut r = rng(seed);
        let vars = random::prop_vars(5);
        let th = random::prop_theory(&mut r, &vars, 3, 4);
        let forget = random::subset(&mut r, &vars);
        prop_assert_eq!(forget_weak(&th, &forget).unwrap(), forget_weak(&th, &forget).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn first_order_nnf_and_simplify(seed in any::<u64>()) {
        let f = random::any_formula(&mut rng(seed), 4);
        if !f.has_fixpoint() {
            prop_assert!(fo_equiv(&f, &nnf(&f), 2));
        }
        prop_assert!(fo_equiv(&f, &simplify(&f), 2));
    }

    #[test]
    fn clause_theories_are_eliminated_soundly(seed in any::<u64>()) {
        let (th, _) = random::clause_theory(&mut rng(seed));
        let r = vec!["r".to_string()];
        let conj = th.conjunction();
        let weak = forget_weak(&th, &r).unwrap();
        prop_assert_eq!(weak.status, Status::FirstOrder);
        prop_assert!(fo_equiv(&weak.formula, &Formula::forall2("r", conj.clone()), 2));
        let strong = forget_strong(&th, &r).unwrap();
        if !strong.is_failed() {
            prop_assert!(!strong.formula.mentions("r"));
            prop_assert!(fo_equiv(&strong.formula, &Formula::exists2("r", conj.clone()), 2));
        }
        // weak result implies the theory, which implies the strong result
        let sandwich = Formula::and([
            Formula::implies(weak.formula.clone(), conj.clone()),
            Formula::implies(conj.clone(), Formula::exists2("r", conj)),
        ]);
        prop_assert!(fo_equiv(&Formula::forall2("r", sandwich), &Formula::Top, 2));
    }

    #[test]
    fn general_first_order_elimination_is_sound(seed in any::<u64>()) {
        let mut r = rng(seed);
        let f = loop {
            let f = random::any_formula(&mut r, 4);
            if !f.has_fixpoint() && !f.has_second_order_quantifier() && f.mentions("r") {
                break f;
            }
        };
        let th = dualforget::Theory::new("t", vec![f.clone()]);
        let forget = vec!["r".to_string()];
        for strong in [true, false] {
            let out = if strong { forget_strong(&th, &forget) } else { forget_weak(&th, &forget) }.unwrap();
            if out.is_failed() {
                continue;
            }
            prop_assert!(!out.formula.mentions("r"), "{}", out.formula);
            let expected = if strong { Formula::exists2("r", f.clone()) } else { Formula::forall2("r", f.clone()) };
            prop_assert!(fo_equiv(&out.formula, &expected, 2), "{} from {}", out.formula, f);
        }
    }
}
