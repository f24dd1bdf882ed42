//! Acceptance criteria C1 to C8. One PASS or FAIL line per criterion; exits
//! non-zero if any fails.

mod support;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use livehole::closures::{index_closures, inspect};
use livehole::dynamics::{
    is_boxed_value, is_complete_ext, is_complete_int, is_final, is_indet, is_value, multi_step, multi_step_with, step,
    Outcome, Rule, StepOutcome,
};
use livehole::elaborate::{assign_type, elab_ana, elaborate, Elab};
use livehole::fill::{fill, fill_typed};
use livehole::statics::{ana, syn};
use livehole::surface::{parse, print_ext, print_int};
use livehole::syntax::{alpha_equiv, Env, HoleCtx, HoleName, IntExpr, Ty, TypingCtx};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use support::{enumerate, gen_ana, gen_one_hole, random_ty, Gen};

type Verdict = Result<String, String>;

fn main() -> ExitCode {
    let (c1, c2) = c1_c2();
    let results: Vec<(&str, Verdict)> = vec![
        ("C1", c1),
        ("C2", c2),
        ("C3", c3()),
        ("C4", c4()),
        ("C5", c5()),
        ("C6", c6()),
        ("C7", c7()),
        ("C8", c8()),
    ];
    let mut ok = true;
    for (name, verdict) in &results {
        match verdict {
            Ok(detail) => println!("{name} PASS {detail}"),
            Err(detail) => {
                ok = false;
                println!("{name} FAIL {detail}");
            }
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn empty() -> TypingCtx {
    TypingCtx::new()
}

/// Counts failures and keeps the first few for the report.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: usize,
    examples: Vec<String>,
}

impl Tally {
    fn fail(&mut self, msg: String) {
        self.failures += 1;
        if self.examples.len() < 3 {
            self.examples.push(msg);
        }
    }

    fn verdict(self, what: &str, elapsed: Duration, limit: Option<Duration>) -> Verdict {
        let detail = format!("{} {what}, {} failures, {:.1}s", self.checked, self.failures, elapsed.as_secs_f64());
        if self.failures > 0 {
            return Err(format!("{detail}: {}", self.examples.join(" | ")));
        }
        match limit {
            Some(limit) if elapsed > limit => Err(format!("{detail} (over the {}s budget)", limit.as_secs())),
            _ => Ok(detail),
        }
    }
}

fn c1_c2() -> (Verdict, Verdict) {
    let start = Instant::now();
    let mut c1 = Tally::default();
    let mut elaborated = Vec::new();
    enumerate(7, |e| {
        c1.checked += 1;
        let s = syn(&empty(), e);
        let el = elaborate(e);
        match (&s, &el) {
            (Ok(t), Ok(r)) => {
                if *t != r.ty {
                    c1.fail(format!("{}: syn {t:?} but elab {:?}", print_ext(e), r.ty));
                }
                match assign_type(&r.holes, &empty(), &r.expr) {
                    Ok(t) if t == r.ty => {}
                    other => c1.fail(format!("{}: assign_type {other:?}", print_ext(e))),
                }
                elaborated.push(r.clone());
            }
            (Err(_), Err(_)) => {}
            _ => c1.fail(format!("{}: syn {:?} / elab {:?}", print_ext(e), s.is_ok(), el.is_ok())),
        }
        // analysis against the unknown type as well
        let a = ana(&empty(), e, &Ty::Hole);
        let ea = elab_ana(&empty(), e, &Ty::Hole);
        match (&a, &ea) {
            (Ok(()), Ok(r)) => match assign_type(&r.holes, &empty(), &r.expr) {
                Ok(t) if t == r.ty => {}
                other => c1.fail(format!("{}: ana assign_type {other:?}", print_ext(e))),
            },
            (Err(_), Err(_)) => {}
            _ => c1.fail(format!("{}: ana {:?} / elab_ana {:?}", print_ext(e), a.is_ok(), ea.is_ok())),
        }
    });
    let c1_time = start.elapsed();
    let n_elab = elaborated.len();
    let c1 = c1.verdict(&format!("terms up to size 7 ({n_elab} well-typed)"), c1_time, Some(Duration::from_secs(120)));

    let start = Instant::now();
    let mut c2 = Tally::default();
    for r in &elaborated {
        c2.checked += 1;
        if let Err(msg) = safe_run(r, 50) {
            c2.fail(format!("{}: {msg}", print_int(&r.expr)));
        }
    }
    let c2 = c2.verdict("elaborated terms run for up to 50 steps", start.elapsed(), None);
    (c1, c2)
}

/// Preservation after every step, the classifier never erroring, and
/// finality at termination.
fn safe_run(r: &Elab, steps: usize) -> Result<(), String> {
    let mut d = r.expr.clone();
    for _ in 0..steps {
        match step(&d) {
            Ok(StepOutcome::Stepped { expr, .. }) => {
                if is_final(&d) {
                    return Err("final term stepped".into());
                }
                match assign_type(&r.holes, &empty(), &expr) {
                    Ok(t) if t == r.ty => {}
                    other => return Err(format!("type changed to {other:?} at {}", print_int(&expr))),
                }
                d = expr;
            }
            Ok(StepOutcome::BoxedValue) => {
                return (is_boxed_value(&d) && is_final(&d)).then_some(()).ok_or("boxed value misclassified".into())
            }
            Ok(StepOutcome::Indeterminate) => {
                return (is_indet(&d) && is_final(&d)).then_some(()).ok_or("indet misclassified".into())
            }
            Err(e) => return Err(format!("no progress: {e}")),
        }
    }
    Ok(())
}

fn c3() -> Verdict {
    let r = elaborate(&parse("(\\x:?. x c) c").map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let want = "(\\x:?. x<? => ? -> ?> c<b => ?>)<? -> ? => ? -> ?> c<b => ?>";
    let got = print_int(&r.expr);
    if got != want {
        return Err(format!("elaborated to {got}"));
    }
    let env = Env::new().with("x", IntExpr::var("x")).with("y", IntExpr::var("y"));
    let d =
        IntExpr::ap(IntExpr::lam("x", Ty::Base, IntExpr::lam("y", Ty::Base, IntExpr::hole("u", env))), IntExpr::Const);
    let want_step = "\\y:b. ?u[c/x, y/y]";
    match step(&d) {
        Ok(StepOutcome::Stepped { expr, rule: Rule::Lam }) if print_int(&expr) == want_step => {
            Ok(format!("{got} and {} |-> {want_step}", print_int(&d)))
        }
        other => Err(format!("closure step gave {other:?}")),
    }
}

fn c4() -> Verdict {
    let via_hole = |target: Ty| IntExpr::cast(IntExpr::cast(IntExpr::Const, Ty::Base, Ty::Hole), Ty::Hole, target);
    let mut rules = Vec::new();
    let run = multi_step_with(&via_hole(Ty::Base), 10, |_, r| rules.push(r)).map_err(|e| e.to_string())?;
    if run.expr != IntExpr::Const || !rules.contains(&Rule::CastSucceed) {
        return Err(format!("c<b => ? => b> gave {} via {rules:?}", print_int(&run.expr)));
    }
    let run = multi_step(&via_hole(Ty::hole_arrow()), 10).map_err(|e| e.to_string())?;
    let failed = IntExpr::failed_cast(IntExpr::Const, Ty::Base, Ty::hole_arrow());
    if run.expr != failed || run.outcome != Outcome::Indet {
        return Err(format!("c<b => ? => ? -> ?> gave {}", print_int(&run.expr)));
    }
    // the failed cast sits in one operand while the other still computes
    let src = "((c : ?) : num) + (1 + 2)";
    let r = elaborate(&parse(src).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let run = multi_step(&r.expr, 100).map_err(|e| e.to_string())?;
    let got = print_int(&run.expr);
    if got != "c<b =/=> num> + 3" || run.outcome != Outcome::Indet {
        return Err(format!("{src} gave {got} ({})", run.outcome));
    }
    let src2 = "((c : ?) : ? -> ?) 1 + (2 + 2)";
    let r = elaborate(&parse(src2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let run2 = multi_step(&r.expr, 100).map_err(|e| e.to_string())?;
    let got2 = print_int(&run2.expr);
    if !got2.contains("=/=>") || !got2.ends_with("+ 4") || run2.outcome != Outcome::Indet {
        return Err(format!("{src2} gave {got2}"));
    }
    Ok(format!("c<b => ? => b> ->* c; {src} ->* {got}; {src2} ->* {got2}"))
}

/// Casts left in a complete result are identities.
fn only_identity_casts(d: &IntExpr) -> bool {
    match d {
        IntExpr::Cast(a, t1, t2) => t1 == t2 && only_identity_casts(a),
        IntExpr::FailedCast(..) | IntExpr::EmptyClosure(..) | IntExpr::NonEmptyClosure(..) => false,
        IntExpr::Const | IntExpr::Var(_) | IntExpr::NumLit(_) => true,
        IntExpr::LamAnn(_, _, a) | IntExpr::InL(_, a) | IntExpr::InR(_, a) => only_identity_casts(a),
        IntExpr::Ap(a, b) | IntExpr::Plus(a, b) => only_identity_casts(a) && only_identity_casts(b),
        IntExpr::Case(s, _, l, _, r) => only_identity_casts(s) && only_identity_casts(l) && only_identity_casts(r),
    }
}

fn c5() -> Verdict {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(5);
    let mut t = Tally::default();
    let mut terminated = 0;
    while t.checked < 1500 {
        let ty = random_ty(&mut rng, &Gen::COMPLETE, 2);
        let e = gen_ana(&mut rng, &Gen::COMPLETE, &empty(), &ty, 4);
        let e = support::number_holes(&e);
        let Ok(r) = elaborate(&e) else {
            // the generator analyzes; a top-level lambda need not synthesize
            continue;
        };
        t.checked += 1;
        if !is_complete_ext(&e) || !is_complete_int(&r.expr) {
            t.fail(format!("{} not complete", print_ext(&e)));
            continue;
        }
        let mut d = r.expr.clone();
        let mut done = false;
        for _ in 0..2000 {
            match step(&d) {
                Ok(StepOutcome::Stepped { expr, .. }) => {
                    if !is_complete_int(&expr) || assign_type(&r.holes, &empty(), &expr).as_ref() != Ok(&r.ty) {
                        t.fail(format!("{}: lost completeness or type at {}", print_ext(&e), print_int(&expr)));
                        done = true;
                        break;
                    }
                    d = expr;
                }
                Ok(_) => {
                    terminated += 1;
                    if !is_value(&d) || !only_identity_casts(&d) {
                        t.fail(format!("{} ended in {}", print_ext(&e), print_int(&d)));
                    }
                    done = true;
                    break;
                }
                Err(err) if err.to_string().contains("overflow") => {
                    done = true;
                    break;
                }
                Err(err) => {
                    t.fail(format!("{}: {err}", print_ext(&e)));
                    done = true;
                    break;
                }
            }
        }
        let _ = done;
    }
    if terminated < 1000 {
        t.fail(format!("only {terminated} runs terminated"));
    }
    t.verdict(&format!("complete programs ({terminated} terminated)"), start.elapsed(), None)
}

fn c6() -> Verdict {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(6);
    let mut t = Tally::default();
    let mut compared = 0;
    let u = HoleName::new("u");
    while t.checked < 1200 {
        let e = gen_one_hole(&mut rng, &Ty::Num, 4);
        let Ok(r) = elaborate(&e) else { continue };
        let Some(h) = r.holes.get(&u).cloned() else { continue };
        if h.ty != Ty::Num {
            continue;
        }
        let filler = gen_ana(&mut rng, &Gen::COMPLETE, &h.ctx, &Ty::Num, 3);
        let Ok(f) = elab_ana(&h.ctx, &filler, &Ty::Num) else { continue };
        if f.ty != Ty::Num {
            continue;
        }
        // resume from a state part way through, or from the end
        let k = if rng.gen_bool(0.5) { rng.gen_range(0..20) } else { 5000 };
        let Ok(state) = multi_step(&r.expr, k) else { continue };
        t.checked += 1;
        let holes = r.holes.clone().union(f.holes.clone()).unwrap_or_else(|_| HoleCtx::new());
        let resumed = match fill_typed(&holes, &u, &f.expr, &state.expr) {
            Ok((d, _)) => multi_step(&d, 5000),
            Err(err) => {
                t.fail(format!("{}: fill rejected: {err}", print_ext(&e)));
                continue;
            }
        };
        let fresh = multi_step(&fill(&f.expr, &u, &r.expr), 5000);
        match (resumed, fresh) {
            (Ok(a), Ok(b)) if a.outcome != Outcome::FuelExhausted && b.outcome != Outcome::FuelExhausted => {
                compared += 1;
                if !alpha_equiv(&a.expr, &b.expr) {
                    t.fail(format!(
                        "{} filled with {}: resumed {} fresh {}",
                        print_ext(&e),
                        print_ext(&filler),
                        print_int(&a.expr),
                        print_int(&b.expr)
                    ));
                }
            }
            (Ok(_), Ok(_)) | (Err(_), Err(_)) => {}
            (a, b) => t.fail(format!("{}: resumed {a:?} fresh {b:?}", print_ext(&e))),
        }
    }
    if compared < 1000 {
        t.fail(format!("only {compared} pairs completed"));
    }
    t.verdict(&format!("fill-and-resume triples ({compared} compared)"), start.elapsed(), Some(Duration::from_secs(60)))
}

fn c7() -> Verdict {
    let src = "let f : num -> num = \\x. ?1 in f 90 + (f 85 + f 72)";
    let r = elaborate(&parse(src).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let run = multi_step(&r.expr, 1000).map_err(|e| e.to_string())?;
    let index = index_closures(&run.expr);
    let one = HoleName::new("1");
    let instances = index.by_hole(&one);
    let mut seen = Vec::new();
    for (i, c) in instances.iter().enumerate() {
        if c.instance != i + 1 {
            return Err(format!("instance {} at position {}", c.instance, i + 1));
        }
        let view = inspect(&index, &one, c.instance, &r.holes).map_err(|e| e.to_string())?;
        let x: Vec<_> = view.bindings.iter().filter(|b| b.var == "x").map(|b| print_int(&b.value)).collect();
        seen.push(x.join(""));
    }
    if seen != ["90", "85", "72"] || index.len() != 3 {
        return Err(format!("{} gave {} with x = {seen:?}", src, print_int(&run.expr)));
    }
    let nested = "(\\y:num. (\\x:num. ?u) ?v) ?w";
    let r = elaborate(&parse(nested).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let run = multi_step(&r.expr, 1000).map_err(|e| e.to_string())?;
    let index = index_closures(&run.expr);
    // w:1 sits in u's environment, w:2 inside v's, which is inside u's
    let w = HoleName::new("w");
    if index.by_hole(&w).len() != 2 {
        return Err(format!("{nested} gave {}", print_int(&run.expr)));
    }
    let outer = inspect(&index, &w, 1, &r.holes).map_err(|e| e.to_string())?;
    let view = inspect(&index, &w, 2, &r.holes).map_err(|e| e.to_string())?;
    let path: Vec<String> = view.path.iter().map(|(u, k)| format!("{u}:{k}")).collect();
    if path != ["u:1", "v:1"] || outer.path.len() != 1 {
        return Err(format!("{nested} gave {} with w:2 path {path:?}", print_int(&run.expr)));
    }
    Ok(format!("1:1..1:3 bind x = {seen:?}; w:2 path {}", path.join(" > ")))
}

fn c8() -> Verdict {
    let r = elaborate(&parse("(\\x:?. x x) (\\x:?. x x)").map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    for n in [1, 2, 17, 100, 1000, 10_000] {
        let run = multi_step(&r.expr, n).map_err(|e| e.to_string())?;
        if run.outcome != Outcome::FuelExhausted || run.steps != n {
            return Err(format!("fuel {n}: {} after {} steps", run.outcome, run.steps));
        }
    }
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let file = dir.path().join("omega.lh");
    std::fs::write(&file, "(\\x:?. x x) (\\x:?. x x)\n").map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_livehole"))
        .args(["eval", "--fuel", "100"])
        .arg(&file)
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    if out.status.code() != Some(2) || !stdout.contains("fuel-exhausted (100 steps)") {
        return Err(format!("cli exit {:?}, output {stdout}", out.status.code()));
    }
    Ok("omega exhausts fuel N in exactly N steps; cli exits 2".into())
}
