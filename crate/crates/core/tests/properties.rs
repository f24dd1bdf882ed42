mod support;

use livehole::closures::{index_closures, Site};
use livehole::dynamics::{is_final, is_value, multi_step, step, subst, Outcome, StepOutcome};
use livehole::elaborate::{assign_type, elab_ana, elaborate, Elab};
use livehole::fill::{detect_filling, fill, fill_typed};
use livehole::surface::{int_tree, parse, print_ext};
use livehole::syntax::{alpha_equiv, ExtExpr, HoleName, IntExpr, Ty, TypingCtx};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use support::{gen_ana, nd_successors, number_holes, random_ty, Gen};

/// A well-typed gradual program and its elaboration.
fn program(seed: u64) -> (ExtExpr, Elab) {
    let mut rng = StdRng::seed_from_u64(seed);
    loop {
        let ty = random_ty(&mut rng, &Gen::GRADUAL, 2);
        let e = number_holes(&gen_ana(&mut rng, &Gen::GRADUAL, &TypingCtx::new(), &ty, 4));
        if let Ok(r) = elaborate(&e) {
            return (e, r);
        }
    }
}

fn count_closures(d: &IntExpr) -> usize {
    match d {
        IntExpr::Const | IntExpr::Var(_) | IntExpr::NumLit(_) => 0,
        IntExpr::EmptyClosure(_, env) => 1 + env.iter().map(|(_, v)| count_closures(v)).sum::<usize>(),
        IntExpr::NonEmptyClosure(a, _, env) => {
            1 + count_closures(a) + env.iter().map(|(_, v)| count_closures(v)).sum::<usize>()
        }
        IntExpr::LamAnn(_, _, a)
        | IntExpr::Cast(a, ..)
        | IntExpr::FailedCast(a, ..)
        | IntExpr::InL(_, a)
        | IntExpr::InR(_, a) => count_closures(a),
        IntExpr::Ap(a, b) | IntExpr::Plus(a, b) => count_closures(a) + count_closures(b),
        IntExpr::Case(s, _, l, _, r) => count_closures(s) + count_closures(l) + count_closures(r),
    }
}

fn tree_closures(v: &serde_json::Value, out: &mut Vec<(String, u64)>) {
    if let (Some(h), Some(k)) = (v["hole"].as_str(), v["instance"].as_u64()) {
        out.push((h.to_owned(), k));
    }
    for c in v["children"].as_array().into_iter().flatten() {
        tree_closures(c, out);
    }
    for b in v["env"].as_array().into_iter().flatten() {
        tree_closures(&b["value"], out);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let (e, _) = program(seed);
        let text = print_ext(&e);
        prop_assert_eq!(parse(&text).map_err(|e| e.to_string()), Ok(e), "{}", text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn preservation_and_finality(seed in any::<u64>()) {
        let (_, r) = program(seed);
        let mut d = r.expr.clone();
        for _ in 0..300 {
            match step(&d) {
                Ok(StepOutcome::Stepped { expr, .. }) => {
                    prop_assert_eq!(assign_type(&r.holes, &TypingCtx::new(), &expr), Ok(r.ty.clone()));
                    d = expr;
                }
                Ok(_) => {
                    prop_assert!(is_final(&d));
                    break;
                }
                Err(e) => prop_assert!(e.to_string().contains("overflow"), "{}", e),
            }
        }
    }

    #[test]
    fn deterministic_step_is_one_of_the_nondeterministic_ones(seed in any::<u64>()) {
        let (_, r) = program(seed);
        let mut d = r.expr.clone();
        for _ in 0..100 {
            let succ = nd_successors(&d);
            match step(&d) {
                Ok(StepOutcome::Stepped { expr, rule }) => {
                    prop_assert!(succ.iter().any(|(s, r)| *s == expr && *r == rule));
                    d = expr;
                }
                Ok(_) => {
                    prop_assert!(succ.is_empty(), "final term has a redex");
                    break;
                }
                Err(_) => break,
            }
        }
    }

    #[test]
    fn any_reduction_order_reaches_the_same_result(seed in any::<u64>(), order in any::<u64>()) {
        let (_, r) = program(seed);
        let Ok(det) = multi_step(&r.expr, 2000) else { return Ok(()) };
        if det.outcome == Outcome::FuelExhausted {
            return Ok(());
        }
        let mut rng = StdRng::seed_from_u64(order);
        let mut d = r.expr.clone();
        for _ in 0..2000 {
            let succ = nd_successors(&d);
            if succ.is_empty() {
                prop_assert!(alpha_equiv(&d, &det.expr));
                return Ok(());
            }
            d = succ[rng.gen_range(0..succ.len())].0.clone();
        }
    }

    #[test]
    fn substitution_of_absent_variable_is_identity(seed in any::<u64>()) {
        let (_, r) = program(seed);
        let fv = r.expr.free_vars();
        prop_assert!(fv.is_empty());
        prop_assert_eq!(subst(&IntExpr::Const, "x", &r.expr), r.expr.clone());
    }

    /// Agreement is only promised for programs of base or num type whose
    /// fresh result is a value; elsewhere a filling can land in a closure
    /// environment, which evaluation does not enter.
    #[test]
    fn resume_agrees_with_fresh_run_on_values(seed in any::<u64>(), k in 0usize..30, numeric in any::<bool>()) {
        let ty = if numeric { Ty::Num } else { Ty::Base };
        let mut rng = StdRng::seed_from_u64(seed);
        let e = number_holes(&gen_ana(&mut rng, &Gen::GRADUAL, &TypingCtx::new(), &ty, 4));
        let Ok(r) = elaborate(&e) else { return Ok(()) };
        if r.ty != ty {
            return Ok(());
        }
        let Some((u, h)) = r.holes.iter().next().map(|(u, h)| (u.clone(), h.clone())) else { return Ok(()) };
        let filler = gen_ana(&mut rng, &Gen { holes: 0.0, ..Gen::GRADUAL }, &h.ctx, &h.ty, 3);
        let Ok(f) = elab_ana(&h.ctx, &filler, &h.ty) else { return Ok(()) };
        if f.ty != h.ty {
            return Ok(());
        }
        let Ok(state) = multi_step(&r.expr, k) else { return Ok(()) };
        let (filled, rest) = fill_typed(&r.holes, &u, &f.expr, &state.expr).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(!rest.contains(&u));
        let resumed = multi_step(&filled, 3000);
        let fresh = multi_step(&fill(&f.expr, &u, &r.expr), 3000);
        if let (Ok(a), Ok(b)) = (resumed, fresh) {
            if a.outcome != Outcome::FuelExhausted && is_value(&b.expr) {
                prop_assert!(alpha_equiv(&a.expr, &b.expr));
            }
        }
    }

    #[test]
    fn detected_fillings_are_real(seed in any::<u64>()) {
        let (e, old) = program(seed);
        let Some((u, h)) = old.holes.iter().next().map(|(u, h)| (u.clone(), h.clone())) else { return Ok(()) };
        let mut rng = StdRng::seed_from_u64(seed ^ 0xf111);
        let filler = gen_ana(&mut rng, &Gen { holes: 0.0, ..Gen::GRADUAL }, &h.ctx, &h.ty, 2);
        let edited = e.replace_hole(&u, &filler);
        let Ok(new) = elaborate(&edited) else { return Ok(()) };
        if let Some(found) = detect_filling(&old, &new) {
            prop_assert_eq!(&found.hole, &u);
            prop_assert_eq!(fill(&found.filler, &found.hole, &old.expr), new.expr);
        }
        prop_assert!(detect_filling(&old, &old).is_none());
    }

    #[test]
    fn closure_index_covers_every_closure(seed in any::<u64>()) {
        let (_, r) = program(seed);
        let Ok(run) = multi_step(&r.expr, 500) else { return Ok(()) };
        let index = index_closures(&run.expr);
        prop_assert_eq!(index.len(), count_closures(&run.expr));
        for c in &index.instances {
            let same: Vec<_> = index.by_hole(&c.hole).iter().map(|c| c.instance).collect();
            prop_assert_eq!(same, (1..=index.by_hole(&c.hole).len()).collect::<Vec<_>>());
            if let Some((parent, k)) = c.path.last() {
                let p = index.get(parent, *k).unwrap();
                prop_assert_eq!(&c.path[..c.path.len() - 1], &p.path[..]);
                prop_assert!(c.site.starts_with(&p.site));
                prop_assert!(c.site.len() > p.site.len());
            }
            prop_assert!(c.site.iter().all(|s| matches!(s, Site::Child(_) | Site::Env(_))));
        }
        let mut from_tree = Vec::new();
        tree_closures(&int_tree(&run.expr), &mut from_tree);
        let from_index: Vec<_> = index.instances.iter().map(|c| (c.hole.as_str().to_owned(), c.instance as u64)).collect();
        prop_assert_eq!(from_tree, from_index);
    }

    #[test]
    fn elaboration_is_deterministic(seed in any::<u64>()) {
        let (e, r) = program(seed);
        prop_assert_eq!(elaborate(&e).unwrap(), r.clone());
        let names: Vec<HoleName> = e.hole_names();
        prop_assert_eq!(names.len(), r.holes.len());
    }
}
