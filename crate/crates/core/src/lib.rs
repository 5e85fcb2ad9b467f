//! Theta functions of hyperelliptic and cyclic curves.
//!
//! The crate covers half-integer characteristic algebra ([`charspace`]),
//! numerical theta evaluation ([`theta`]), period matrices of hyperelliptic
//! curves ([`periods`]), Thomae's formula and its inversion ([`thomae`]),
//! identity suites among theta constants ([`identities`]), exact Igusa
//! invariants ([`igusa`]), genus-2 automorphism-locus tests ([`classify`]) and
//! formulas for non-hyperelliptic cyclic curves ([`cyclic`]).

pub mod charspace;
pub mod classify;
pub mod cyclic;
pub mod error;
pub mod identities;
pub mod igusa;
pub mod labels;
pub mod parallel;
pub mod periods;
pub mod theta;
pub mod thomae;

pub use charspace::{EtaAssignment, GopelGroup, GopelSystem, HalfChar};
pub use error::{Error, Result};


pub use igusa::{BinarySextic, IgusaInvariants};
pub use periods::{HyperellipticCurve, PeriodData};
pub use theta::{EvalParams, RatChar, SiegelPoint};

pub use num_complex::Complex64;
pub use num_rational::BigRational;
