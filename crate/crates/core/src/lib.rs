pub mod comparators;
pub mod expr;
pub mod fracseries;
pub mod report;
pub mod solvers;
pub mod special;
