use std::collections::HashMap;
use std::sync::Arc;

use super::*;
use crate::games::AgentMove;
use crate::logic::{parse_formula, Action, EnvState};

fn yx() -> Arc<VarTable> {
    Arc::new(VarTable::new(["y"], ["x"]).unwrap())
}

fn f(text: &str) -> Spec {
    Spec::Formula(parse_formula(text, &yx()).unwrap())
}

fn x_then_halt() -> AgentStrategy {
    let x = Action(1);
    AgentStrategy::new(
        yx(),
        0,
        vec![
            (AgentMove::Act(x), 1),
            (AgentMove::Act(x), 1),
            (AgentMove::Halt, 1),
            (AgentMove::Halt, 1),
        ],
    )
    .unwrap()
}

#[test]
fn counterexample_instance() {
    let p = Problem::synthesis(yx(), f("y -> x"), f("y -> !x"));
    let check = check_assumption(&p).unwrap();
    assert!(check.valid);
    assert_eq!(check.strategy.unwrap().initial_output(), EnvState(0));

    let v = synthesize(&p).unwrap();
    let s = v.strategy().expect("realizable").clone();
    assert!(verify_strategy(&p, &s).unwrap().is_accept());

    let s = x_then_halt();
    assert!(verify_strategy(&p, &s).unwrap().is_accept());
    let plain = Problem::synthesis(yx(), f("true"), f("(y -> x) -> (y -> !x)"));
    match verify_strategy(&plain, &s).unwrap() {
        Verification::Reject(w) => {
            assert_eq!(w.trace, vec![yx().symbol_of(&["y", "x"]).unwrap()]);
            assert!(matches!(w.end, WitnessEnd::Halt { .. }));
        }
        Verification::Accept => panic!("x first loses when y is played"),
    }
}

#[test]
fn assumption_on_agent_variable_is_invalid() {
    let p = Problem::synthesis(yx(), f("F x"), f("true"));
    assert!(!check_assumption(&p).unwrap().valid);
    assert_eq!(synthesize(&p).unwrap().status, Status::InvalidAssumption);
    assert_eq!(
        verify_strategy(&p, &x_then_halt()),
        Err(EngineError::InvalidAssumption)
    );
}

#[test]
fn trivial_assumption_is_plain_synthesis() {
    for goal in ["F x", "X y", "G x", "y | x", "F y", "y & !y", "X true"] {
        let p = Problem::synthesis(yx(), f("true"), f(goal));
        let plain = agent_realizable(&p.finite_automata().unwrap().goal).realizable;
        assert_eq!(synthesize(&p).unwrap().is_realizable(), plain, "{goal}");
    }
    let p = Problem::synthesis(yx(), f("true"), f("y & !y"));
    assert_eq!(synthesize(&p).unwrap().status, Status::Unrealizable);
}

#[test]
fn never_halting_strategy_is_rejected() {
    let s = AgentStrategy::positional(yx(), &[AgentMove::Act(Action(0)); 2]).unwrap();
    let p = Problem::synthesis(yx(), f("true"), f("true"));
    match verify_strategy(&p, &s).unwrap() {
        Verification::Reject(w) => match w.end {
            WitnessEnd::Cycle { loop_start } => assert!(loop_start < w.trace.len()),
            other => panic!("expected a cycle, got {other:?}"),
        },
        Verification::Accept => panic!("never halts"),
    }
    let halt = AgentStrategy::positional(yx(), &[AgentMove::Halt; 2]).unwrap();
    match verify_strategy(&p, &halt).unwrap() {
        Verification::Reject(w) => assert!(w.trace.is_empty()),
        Verification::Accept => panic!("halting before the first round is never a trace"),
    }
}

#[test]
fn universal_domain_planning_matches_synthesis() {
    let d = Domain::universal(yx()).unwrap();
    for (a, g) in [("y -> x", "y -> !x"), ("true", "F x"), ("G !y", "F y"), ("F x", "true")] {
        let s = synthesize(&Problem::synthesis(yx(), f(a), f(g))).unwrap();
        let p = plan(&Problem::planning(d.clone(), f(a), f(g))).unwrap();
        assert_eq!(
            std::mem::discriminant(&s.status),
            std::mem::discriminant(&p.status)
        );
    }
}

#[test]
fn fond_reduction() {
    let d = Domain::parse(
        "env: at\nagent: go\ninit: !at\npre: true\ntrans: (go -> at' | !at') & (!go -> (at' & at | !at' & !at))",
    )
    .unwrap();
    let g = parse_formula("at", d.vars()).unwrap();
    let p = fond_to_pua(&d, FondGoal::Reach(g.clone()), false).unwrap();
    match &p.goal {
        Spec::Formula(goal) => assert_eq!(goal.display(d.vars()).to_string(), "G true & F at"),
        other => panic!("{other:?}"),
    }
    // Moving may fail forever, so no strong plan exists.
    assert_eq!(plan(&p).unwrap().status, Status::Unrealizable);
    let err = fond_to_pua(&d, FondGoal::Reach(g.clone()), true).unwrap_err();
    assert!(err.is_unsupported());
    let mut fair = p.clone();
    fair.fair = true;
    assert!(matches!(plan(&fair).unwrap().status, Status::Unsupported(_)));
    // With a deterministic effect the plan exists.
    let d = Domain::parse(
        "env: at\nagent: go\ninit: !at\npre: true\ntrans: (go -> at') & (!go -> (at' & at | !at' & !at))",
    )
    .unwrap();
    let p = fond_to_pua(&d, FondGoal::Reach(g), false).unwrap();
    let v = plan(&p).unwrap();
    assert!(verify_strategy(&p, v.strategy().unwrap()).unwrap().is_accept());
}

#[test]
fn infinite_semantics_with_automata() {
    let v = yx();
    // Accepts iff x holds infinitely often: color 2 after x, 1 otherwise.
    let gf_x = Dpw::from_fn(v.clone(), 0, vec![1, 2], |_, s| usize::from(s.holds(1))).unwrap();
    let p = Problem::synthesis(v.clone(), Spec::Formula(Formula::True), Spec::Dpw(gf_x.clone()))
        .with_semantics(Semantics::Infinite);
    assert!(check_assumption(&p).unwrap().valid);
    assert!(synthesize(&p).unwrap().is_realizable());
    // The agent cannot force y infinitely often.
    let gf_y = Dpw::from_fn(v.clone(), 0, vec![1, 2], |_, s| usize::from(s.holds(0))).unwrap();
    let p = Problem::synthesis(v.clone(), Spec::Formula(Formula::True), Spec::Dpw(gf_y.clone()))
        .with_semantics(Semantics::Infinite);
    assert_eq!(synthesize(&p).unwrap().status, Status::Unrealizable);
    // Assuming it makes the goal trivially achievable.
    let p = Problem::synthesis(v.clone(), Spec::Dpw(gf_y.clone()), Spec::Dpw(gf_y))
        .with_semantics(Semantics::Infinite);
    assert!(synthesize(&p).unwrap().is_realizable());
    let d = Domain::universal(v.clone()).unwrap();
    let p = Problem::planning(d, Spec::Formula(Formula::True), Spec::Dpw(gf_x))
        .with_semantics(Semantics::Infinite);
    assert!(plan(&p).unwrap().is_realizable());
    let p = Problem::synthesis(v, f("true"), f("F x")).with_semantics(Semantics::Infinite);
    assert!(matches!(synthesize(&p).unwrap().status, Status::Unsupported(_)));
    assert!(verify_strategy(&p, &x_then_halt()).unwrap_err().is_unsupported());
}

#[test]
fn problem_files() {
    let files: HashMap<&str, String> = HashMap::from([
        ("univ.domain", Domain::universal(yx()).unwrap().to_text()),
        ("goal.dfa", crate::ltlf::compile(&parse_formula("F x", &yx()).unwrap(), &yx()).unwrap().to_text()),
    ]);
    let mut load = |p: &str| files.get(p).cloned().ok_or_else(|| "not found".to_string());
    let p = Problem::parse("env: y\nagent: x\nassumption: y -> x\ngoal: y -> !x\n", &mut load).unwrap();
    assert_eq!(p, Problem::synthesis(yx(), f("y -> x"), f("y -> !x")));

    let p = Problem::parse("domain: univ.domain\nassumption: true\ngoal: @goal.dfa\n", &mut load).unwrap();
    assert_eq!(p.kind(), Kind::Planning);
    assert!(matches!(p.goal, Spec::Dfa(_)));
    assert!(plan(&p).unwrap().is_realizable());

    let bad = Problem::parse("env: y\nagent: x\nassumption: y ->\ngoal: true\n", &mut load);
    assert!(matches!(bad, Err(EngineError::Formula { line: 3, .. })));
    let bad = Problem::parse("env: y\nagent: x\nassumption: true\ngoal: @nope\n", &mut load);
    assert!(matches!(bad, Err(EngineError::Load { .. })));
    let bad = Problem::parse("env: y\nagent: x\nassumption: true\n", &mut load);
    assert!(matches!(bad, Err(EngineError::Syntax { .. })));
    let bad = Problem::parse("env: z\nagent: x\ndomain: univ.domain\nassumption: true\ngoal: true\n", &mut load);
    assert_eq!(bad, Err(EngineError::VocabularyMismatch("domain")));
}
