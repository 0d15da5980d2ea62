pub mod behavior;
pub mod joint;
pub mod jsonfmt;
pub mod lp;
pub mod polytope;
pub mod quantum;
pub mod registers;
pub mod scenario;
pub mod verify;
