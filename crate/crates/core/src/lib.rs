pub mod analysis;
pub mod corpus;
pub mod derivation;
pub mod features;
pub mod grammar;
pub mod parser;
pub mod tokenizer;
pub mod tree;
