use crate::logic::{Formula, LogicError, Signature};

/// A sentence with modal operators outside every quantifier. Quantified
/// subformulas are first-order cores; `[]` and `<>` range over the edges
/// leaving a node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModalFormula {
    Core(Formula),
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Box(Box<ModalFormula>),
    Diamond(Box<ModalFormula>),
}

impl ModalFormula {
    /// Negation, folded into the core when the operand has no modality.
    pub fn not(m: ModalFormula) -> Self {
        match m {
            ModalFormula::Core(f) => ModalFormula::Core(Formula::not(f)),
            other => ModalFormula::Not(Box::new(other)),
        }
    }

    pub fn and(a: ModalFormula, b: ModalFormula) -> Self {
        match (a, b) {
            (ModalFormula::Core(x), ModalFormula::Core(y)) => ModalFormula::Core(Formula::and(x, y)),
            (a, b) => ModalFormula::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: ModalFormula, b: ModalFormula) -> Self {
        match (a, b) {
            (ModalFormula::Core(x), ModalFormula::Core(y)) => ModalFormula::Core(Formula::or(x, y)),
            (a, b) => ModalFormula::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn implies(a: ModalFormula, b: ModalFormula) -> Self {
        Self::or(Self::not(a), b)
    }

    pub fn boxed(m: ModalFormula) -> Self {
        ModalFormula::Box(Box::new(m))
    }

    pub fn diamond(m: ModalFormula) -> Self {
        ModalFormula::Diamond(Box::new(m))
    }

    /// Nesting depth of `[]` and `<>`.
    pub fn modal_depth(&self) -> usize {
        match self {
            ModalFormula::Core(_) => 0,
            ModalFormula::Not(a) => a.modal_depth(),
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) => a.modal_depth().max(b.modal_depth()),
            ModalFormula::Box(a) | ModalFormula::Diamond(a) => 1 + a.modal_depth(),
        }
    }

    /// Parameters mentioned anywhere, sorted and deduplicated.
    pub fn params(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.each_core(&mut |f| out.extend(f.params()));
        out.sort();
        out.dedup();
        out
    }

    fn each_core(&self, visit: &mut impl FnMut(&Formula)) {
        match self {
            ModalFormula::Core(f) => visit(f),
            ModalFormula::Not(a) | ModalFormula::Box(a) | ModalFormula::Diamond(a) => a.each_core(visit),
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) => {
                a.each_core(visit);
                b.each_core(visit);
            }
        }
    }

    /// Every core must be a sentence.
    pub(crate) fn check_sentence(&self) -> Result<(), LogicError> {
        let mut free = Vec::new();
        self.each_core(&mut |f| free.extend(f.free_vars()));
        if free.is_empty() {
            Ok(())
        } else {
            free.sort();
            free.dedup();
            Err(LogicError::FreeVariables(free))
        }
    }

    pub fn render(&self, sig: &Signature) -> String {
        match self {
            ModalFormula::Core(f @ (Formula::Atom(..) | Formula::Equal(..))) => f.render(sig),
            ModalFormula::Core(f) => format!("({})", f.render(sig)),
            ModalFormula::Not(a) => format!("!{}", a.render(sig)),
            ModalFormula::And(a, b) => format!("({} & {})", a.render(sig), b.render(sig)),
            ModalFormula::Or(a, b) => format!("({} | {})", a.render(sig), b.render(sig)),
            ModalFormula::Box(a) => format!("[] {}", a.render(sig)),
            ModalFormula::Diamond(a) => format!("<> {}", a.render(sig)),
        }
    }
}

/// Parses a modal sentence: `[]` and `<>` prefixes over the first-order
/// syntax, for example `<> [] (E x. E y. x < y) -> E x. E y. x < y`.
pub fn parse_modal(text: &str, sig: &Signature) -> Result<ModalFormula, LogicError> {
    let m = crate::logic::parse_modal(text, sig)?;
    m.check_sentence()?;
    Ok(m)
}
