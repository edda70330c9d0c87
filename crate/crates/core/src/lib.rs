pub mod algebra;
pub mod catalog;
pub mod cli;
pub mod curvature;
pub mod error;
pub mod linalg;
pub mod soliton;
