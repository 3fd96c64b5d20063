//! Coinductive proof exploration for Horn clause theories.

pub mod clj;
pub mod conv;
pub mod error;
pub mod explore;
pub mod formula;
pub mod parse;
pub mod rewriting;
pub mod subst;
pub mod term;
pub mod types;

pub use conv::{conv, Conv, DEFAULT_CONV_FUEL};
pub use error::{ParseError, ParseErrorKind, TermError};
pub use formula::{Atom, Formula, HornClause, Program};
pub use term::Term;
pub use types::{Context, Signature, Type};
