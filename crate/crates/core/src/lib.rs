pub mod cartan;
pub mod chi;
pub mod completion;
pub mod error;
pub mod monomials;
pub mod qq;
pub mod tq;
pub mod weylops;

pub use cartan::{CartanData, HeightFn, Node, Weight, WeylElem, WeylWord};
pub use error::{Error, Result};
pub use monomials::{Monomial, Poly, Term};
pub use completion::{Branch, Comp, Component, PiElement, ThetaCtx, TruncSeries};
pub use chi::{chi_extremal, RationalChar};
pub use qq::{CaseReport, QSeries, QqContext};
pub use tq::{qchar_small_rep, QCharacter};
