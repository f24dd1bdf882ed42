//! Typed holes with live evaluation: a gradually typed lambda calculus whose
//! programs may contain holes, elaborated to a cast calculus and evaluated
//! around holes and failed casts.

pub mod closures;
pub mod dynamics;
pub mod elaborate;
pub mod engine;
pub mod fill;
pub mod service;
pub mod statics;
pub mod surface;
pub mod syntax;
