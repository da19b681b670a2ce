pub mod coeff;
pub mod diff_poisson;
pub mod element;
pub mod fixtures;
pub mod gd_models;
pub mod groebner;
pub mod hilbert;
pub mod linalg;
pub mod order;
pub mod par;
pub mod presentation;
pub mod symmetric;
pub mod tree;
