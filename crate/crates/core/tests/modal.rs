mod common;

use common::{digraph_system, graph_signature, shape};
use proptest::prelude::*;
use robinson_core::fixtures;
use robinson_core::forcing::is_generic;
use robinson_core::logic::Budget;
use robinson_core::modal::{check_modal_principle, modal_eval, parse_modal, ModalFormula, Principle};
use robinson_core::structure::ExtensionSystem;

fn core(phi: robinson_core::logic::Formula) -> ModalFormula {
    ModalFormula::Core(phi)
}

/// MP at `node` checked directly: `<>[]φ -> φ` for every pool sentence.
fn mp_oracle(sys: &ExtensionSystem, node: usize, budget: Budget) -> bool {
    let id = sys.node_id(node);
    budget.pool(&sys.signature, sys.params(node)).into_iter().all(|phi| {
        let m = ModalFormula::implies(ModalFormula::diamond(ModalFormula::boxed(core(phi.clone()))), core(phi));
        modal_eval(sys, id, &m).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn box_and_diamond_are_dual(sys in digraph_system(), s in shape(&graph_signature(), 4)) {
        let phi = core(s.build(&[]));
        let boxed = ModalFormula::boxed(phi.clone());
        let dual = ModalFormula::not(ModalFormula::diamond(ModalFormula::not(phi)));
        for n in 0..sys.nodes().len() {
            let id = sys.node_id(n);
            prop_assert_eq!(modal_eval(&sys, id, &boxed).unwrap(), modal_eval(&sys, id, &dual).unwrap());
        }
    }

    /// Identity edges make the frame reflexive and composition makes it
    /// transitive, so T and 4 hold.
    #[test]
    fn frame_validates_s4(sys in digraph_system(), s in shape(&graph_signature(), 4)) {
        let phi = core(s.build(&[]));
        let b = ModalFormula::boxed(phi.clone());
        let t = ModalFormula::implies(b.clone(), phi);
        let four = ModalFormula::implies(b.clone(), ModalFormula::boxed(b));
        for n in 0..sys.nodes().len() {
            let id = sys.node_id(n);
            prop_assert!(modal_eval(&sys, id, &t).unwrap());
            prop_assert!(modal_eval(&sys, id, &four).unwrap());
        }
    }

    #[test]
    fn mp_report_matches_modal_oracle(sys in digraph_system()) {
        let b = Budget::new(4).with_param_size(3);
        for n in 0..sys.nodes().len() {
            let r = check_modal_principle(&sys, sys.node_id(n), Principle::Mp, b).unwrap();
            prop_assert_eq!(r.holds, mp_oracle(&sys, n, b));
            if let Some(text) = &r.sentence {
                let phi = parse_modal(text, &sys.signature).unwrap();
                let m = ModalFormula::implies(ModalFormula::diamond(ModalFormula::boxed(phi.clone())), phi);
                prop_assert!(!modal_eval(&sys, sys.node_id(n), &m).unwrap());
            }
        }
    }
}

#[test]
fn mp_holds_at_generic_nodes() {
    let b = Budget::new(5).with_param_size(4);
    for (name, sys) in fixtures::corpus() {
        for n in 0..sys.nodes().len() {
            let id = sys.node_id(n);
            if is_generic(&sys, id, b).unwrap().generic {
                assert!(check_modal_principle(&sys, id, Principle::Mp, b).unwrap().holds, "{name} {id}");
                assert!(mp_oracle(&sys, n, b), "{name} {id}");
            }
        }
    }
}

#[test]
fn mp_counterexample_at_the_bottom_of_a_chain() {
    let sys = fixtures::order_class(&[1, 2]);
    let r = check_modal_principle(&sys, "L1", Principle::Mp, Budget::new(5)).unwrap();
    assert!(!r.holds);
    assert_eq!(r.sentence.as_deref(), Some("E x0. E x1. x0 < x1"));
    assert_eq!(r.path, ["L1", "L2"]);
}
