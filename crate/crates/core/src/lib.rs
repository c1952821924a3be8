//! Extended formulations from communication protocols and graph decompositions.

pub mod decomposition;
pub mod error;
pub mod formulation;
pub mod graph;
pub mod linalg;
pub mod lp;
pub mod pair;
pub mod protocol;
pub mod rational;
pub mod special;
pub mod unambiguous;
pub mod verify;
pub mod yannakakis;

pub use error::{Error, Result};
pub use linalg::{LinearConstraint, LinearSystem, Point, Relation, VarName};
pub use rational::Rational;
