//! Exit codes: 2 for unreadable or malformed input, 3 for input that parses
//! but names something that does not exist, 4 for formulas outside the
//! supported fragment, 5 when a resource cap is hit.

use std::fmt;

use episteme::checker::CheckError;
use episteme::decision::DecisionError;
use episteme::dynamics::DynamicsError;
use episteme::models::ModelError;
use episteme::reducer::ReduceError;
use episteme::syntax::SyntaxError;

pub const PARSE: u8 = 2;
pub const SEMANTIC: u8 = 3;
pub const UNSUPPORTED: u8 = 4;
pub const CAP: u8 = 5;
pub const INTERNAL: u8 = 1;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

fn syntax_code(e: &SyntaxError) -> u8 {
    match e {
        SyntaxError::UnknownAgent(_)
        | SyntaxError::UnknownEventModel(_)
        | SyntaxError::UnknownEvent { .. } => SEMANTIC,
        _ => PARSE,
    }
}

fn model_code(e: &ModelError) -> u8 {
    match e {
        ModelError::Schema(_) | ModelError::Partition { .. } | ModelError::DuplicateState(_) => PARSE,
        ModelError::Syntax(s) => syntax_code(s),
        _ => SEMANTIC,
    }
}

fn dynamics_code(e: &DynamicsError) -> u8 {
    match e {
        DynamicsError::Schema(_)
        | DynamicsError::MissingSelfRead { .. }
        | DynamicsError::InconsistentReads { .. } => PARSE,
        DynamicsError::Model(m) => model_code(m),
        DynamicsError::Syntax(s) => syntax_code(s),
        _ => SEMANTIC,
    }
}

fn check_code(e: &CheckError) -> u8 {
    match e {
        CheckError::Model(m) => model_code(m),
        CheckError::Dynamics(d) => dynamics_code(d),
        CheckError::Syntax(s) => syntax_code(s),
        _ => SEMANTIC,
    }
}

fn reduce_code(e: &ReduceError) -> u8 {
    match e {
        ReduceError::StepLimit(_) => CAP,
        ReduceError::Syntax(s) => syntax_code(s),
        ReduceError::Dynamics(d) => dynamics_code(d),
        _ => UNSUPPORTED,
    }
}

fn decision_code(e: &DecisionError) -> u8 {
    match e {
        DecisionError::NotStatic => UNSUPPORTED,
        DecisionError::UnknownAgent(_) => SEMANTIC,
        DecisionError::ResourceCap(_) => CAP,
        DecisionError::WitnessVerificationFailed(_) => INTERNAL,
        DecisionError::Reduce(r) => reduce_code(r),
        DecisionError::Check(c) => check_code(c),
        DecisionError::Model(m) => model_code(m),
    }
}

macro_rules! failure_from {
    ($($ty:ty => $code:ident),* $(,)?) => {$(
        impl From<$ty> for Failure {
            fn from(e: $ty) -> Failure {
                Failure::new($code(&e), e.to_string())
            }
        }
    )*};
}

failure_from! {
    SyntaxError => syntax_code,
    ModelError => model_code,
    DynamicsError => dynamics_code,
    CheckError => check_code,
    ReduceError => reduce_code,
    DecisionError => decision_code,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nested_errors_keep_their_class() {
        let unknown = DecisionError::Check(CheckError::Syntax(SyntaxError::UnknownAgent("z".into())));
        assert_eq!(Failure::from(unknown).code, SEMANTIC);
        let schema = DynamicsError::Model(ModelError::Schema("bad".into()));
        assert_eq!(Failure::from(schema).code, PARSE);
        let frag = DecisionError::Reduce(ReduceError::UnsupportedFragment("Cd".into()));
        assert_eq!(Failure::from(frag).code, UNSUPPORTED);
        assert_eq!(Failure::from(DecisionError::ResourceCap("atoms".into())).code, CAP);
    }
}
