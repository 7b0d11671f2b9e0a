//! Brute-force reference implementations shared by the property suites and
//! the acceptance target. Each one is written from the defining formula and
//! shares no code with the library beyond its public types.

#![allow(dead_code)]

pub mod bm25;
pub mod hungarian;
pub mod meteor;
pub mod mmr;
