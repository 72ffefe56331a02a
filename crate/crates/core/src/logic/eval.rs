use std::collections::HashMap;

use super::{Formula, LogicError, Structure, Term};

/// Tarski satisfaction `s ⊨ φ[assignment]`.
///
/// Free variables must be covered by `assignment` (variable name to element
/// name); parameters must name elements of `s`.
pub fn satisfies(
    s: &Structure,
    phi: &Formula,
    assignment: &HashMap<String, String>,
) -> Result<bool, LogicError> {
    let mut env: Vec<(String, usize)> = Vec::with_capacity(assignment.len());
    for (var, elem) in assignment {
        let i = s.element(elem).ok_or_else(|| LogicError::DanglingParameter {
            name: elem.clone(),
            structure: s.id.clone(),
        })?;
        env.push((var.clone(), i));
    }
    for p in phi.params() {
        if s.element(&p).is_none() {
            return Err(LogicError::DanglingParameter {
                name: p,
                structure: s.id.clone(),
            });
        }
    }
    if let Some(v) = phi
        .free_vars()
        .into_iter()
        .find(|v| !assignment.contains_key(v))
    {
        return Err(LogicError::UnassignedVariable(v));
    }
    Ok(eval(s, phi, &mut env))
}

/// Satisfaction of a sentence; shorthand for an empty assignment.
pub fn satisfies_sentence(s: &Structure, phi: &Formula) -> Result<bool, LogicError> {
    satisfies(s, phi, &HashMap::new())
}

fn term_value(s: &Structure, t: &Term, env: &[(String, usize)]) -> usize {
    match t {
        Term::Var(v) => env
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .map(|(_, e)| *e)
            .expect("free variables checked before evaluation"),
        Term::Const(c) => s.constant(*c),
        Term::Param(p) => s.element(p).expect("parameters checked before evaluation"),
    }
}

fn eval(s: &Structure, phi: &Formula, env: &mut Vec<(String, usize)>) -> bool {
    match phi {
        Formula::Atom(r, ts) => {
            let args: Vec<usize> = ts.iter().map(|t| term_value(s, t, env)).collect();
            s.holds(*r, &args)
        }
        Formula::Equal(a, b) => term_value(s, a, env) == term_value(s, b, env),
        Formula::Not(f) => !eval(s, f, env),
        Formula::And(a, b) => eval(s, a, env) && eval(s, b, env),
        Formula::Or(a, b) => eval(s, a, env) || eval(s, b, env),
        Formula::Exists(v, f) => (0..s.size()).any(|e| {
            env.push((v.clone(), e));
            let r = eval(s, f, env);
            env.pop();
            r
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, Signature};

    fn linear(n: usize) -> Structure {
        let sig = Signature::relational(&[("<", 2)]);
        let tuples = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| vec![i, j]))
            .collect();
        Structure::from_indices(&sig, format!("L{n}"), n, &[tuples], &[]).unwrap()
    }

    fn sat(s: &Structure, text: &str) -> bool {
        let sig = Signature::relational(&[("<", 2)]);
        satisfies_sentence(s, &parse_formula(text, &sig).unwrap()).unwrap()
    }

    #[test]
    fn linear_order_examples() {
        assert!(sat(&linear(2), "E x. E y. x < y"));
        assert!(!sat(&linear(1), "E x. E y. x < y"));
    }

    #[test]
    fn forall_exists_distinct_matches_brute_force() {
        // Independent check: enumerate x and search y by hand.
        let l3 = linear(3);
        let brute = (0..3).all(|x| (0..3).any(|y| x != y));
        assert_eq!(sat(&l3, "A x. E y. !(x = y)"), brute);
        assert!(brute);
        assert!(!sat(&linear(1), "A x. E y. !(x = y)"));
    }

    #[test]
    fn params_and_assignments() {
        let sig = Signature::relational(&[("<", 2)]);
        let l2 = linear(2);
        let f = parse_formula("E y. #0 < y", &sig).unwrap();
        assert!(satisfies_sentence(&l2, &f).unwrap());
        let g = parse_formula("E y. #1 < y", &sig).unwrap();
        assert!(!satisfies_sentence(&l2, &g).unwrap());
        let dangling = parse_formula("#7 < #0", &sig).unwrap();
        assert!(matches!(
            satisfies_sentence(&l2, &dangling),
            Err(LogicError::DanglingParameter { .. })
        ));
        let open = parse_formula("x < y", &sig).unwrap();
        let mut a = HashMap::new();
        a.insert("x".to_string(), "0".to_string());
        assert!(matches!(
            satisfies(&l2, &open, &a),
            Err(LogicError::UnassignedVariable(_))
        ));
        a.insert("y".to_string(), "1".to_string());
        assert!(satisfies(&l2, &open, &a).unwrap());
    }

    #[test]
    fn shadowing_uses_innermost_binding() {
        let sig = Signature::relational(&[("<", 2)]);
        let f = parse_formula("E x. (E x. x < #1) & x = #1", &sig).unwrap();
        assert!(satisfies_sentence(&linear(2), &f).unwrap());
    }
}
