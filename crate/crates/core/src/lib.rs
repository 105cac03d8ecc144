pub mod error;
pub mod families;
pub mod inflation;
pub mod linalg;
pub mod measures;
pub mod povm;
pub mod state;
pub mod optsearch;
