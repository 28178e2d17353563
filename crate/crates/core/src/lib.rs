pub mod cli;
pub mod constructions;
pub mod format;
pub mod formcore;
pub mod gf;
pub mod spanspace;
pub mod theoremlab;
