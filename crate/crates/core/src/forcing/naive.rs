use super::ForcingError;
use crate::logic::{Formula, LogicError, Structure, Term};
use crate::structure::ExtensionSystem;

/// Direct recursive evaluation of the five forcing clauses, with no memo
/// and no shared sentence representation. Serves as the reference the
/// memoized engine is tested against.
///
/// Bound variables and parameters are carried as element assignments and
/// pushed through the element map of each edge examined by a negation.
pub fn naive_forces(
    sys: &ExtensionSystem,
    node: usize,
    phi: &Formula,
) -> Result<bool, ForcingError> {
    let free = phi.free_vars();
    if !free.is_empty() {
        return Err(LogicError::FreeVariables(free.into_iter().collect()).into());
    }
    let s = sys.node(node);
    let names = phi.params();
    let mut values = Vec::with_capacity(names.len());
    for p in &names {
        values.push(s.element(p).ok_or_else(|| LogicError::DanglingParameter {
            name: p.clone(),
            structure: s.id.clone(),
        })?);
    }
    let ctx = Ctx {
        sys,
        names: &names,
    };
    Ok(ctx.eval(node, phi, &[], &values))
}

struct Ctx<'a> {
    sys: &'a ExtensionSystem,
    names: &'a [String],
}

impl Ctx<'_> {
    fn term(&self, s: &Structure, t: &Term, env: &[(&str, usize)], params: &[usize]) -> usize {
        match t {
            Term::Var(v) => {
                env.iter()
                    .rev()
                    .find(|(name, _)| name == v)
                    .expect("sentence variables are bound")
                    .1
            }
            Term::Const(c) => s.constant(*c),
            Term::Param(p) => {
                let i = self.names.iter().position(|q| q == p).expect("collected");
                params[i]
            }
        }
    }

    fn eval(&self, node: usize, phi: &Formula, env: &[(&str, usize)], params: &[usize]) -> bool {
        let s = self.sys.node(node);
        match phi {
            Formula::Atom(r, ts) => {
                let args: Vec<usize> = ts.iter().map(|t| self.term(s, t, env, params)).collect();
                s.holds(*r, &args)
            }
            Formula::Equal(a, b) => self.term(s, a, env, params) == self.term(s, b, env, params),
            Formula::And(a, b) => {
                self.eval(node, a, env, params) && self.eval(node, b, env, params)
            }
            Formula::Or(a, b) => self.eval(node, a, env, params) || self.eval(node, b, env, params),
            Formula::Exists(v, body) => (0..s.size()).any(|a| {
                let mut inner = env.to_vec();
                inner.push((v.as_str(), a));
                self.eval(node, body, &inner, params)
            }),
            Formula::Not(g) => !self.sys.out_edges(node).iter().any(|&k| {
                let e = self.sys.edge(k);
                let env2: Vec<(&str, usize)> = env.iter().map(|&(v, x)| (v, e.map[x])).collect();
                let params2: Vec<usize> = params.iter().map(|&x| e.map[x]).collect();
                self.eval(e.to, g, &env2, &params2)
            }),
        }
    }
}
