pub mod chains;
pub mod cli;
pub mod error;
pub mod hyperspace;
pub mod mixing;
pub mod multimap;
pub mod rational;
pub mod shadowing;
pub mod space;
pub mod suite;
