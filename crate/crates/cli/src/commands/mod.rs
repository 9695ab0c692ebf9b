pub mod agreement;
pub mod baseline;
pub mod corpus;
pub mod eval;
pub mod mlp;
pub mod pipeline;
pub mod report;
