pub mod cli;
pub mod corpus;
pub mod eval;
pub mod layers;
pub mod models;
pub mod numcore;
pub mod pruning;
pub mod stg;
pub mod treeops;
