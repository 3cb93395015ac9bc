//! Exact and numerical tools for the Wronski map on Grassmannians: ballot
//! counts, rational polynomials, Plücker coordinates, degree experiments and
//! output feedback pole placement.

pub mod combinatorics;
pub mod control;
pub mod degree_lab;
pub mod grassmann;
pub mod linalg;
pub mod polynomials;
pub mod rational;
