pub mod bfunction;
pub mod engine;
pub mod graph;
pub mod ledger;
pub mod linsolve;
pub mod locoh;
pub mod poly;
pub mod weyl;
