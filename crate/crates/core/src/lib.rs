pub mod corpus;
pub mod dfa;
pub mod domain;
pub mod engine;
pub mod games;
pub mod logic;
pub mod ltlf;
pub mod parity;
pub mod text;
