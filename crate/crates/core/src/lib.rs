pub mod linalg;
pub mod graded;
pub mod category;
pub mod functor;
pub mod fp;
pub mod complex;
pub mod datasets;
pub mod motive;
pub mod document;
pub mod suites;
pub mod report;
