//! Scenario files, the built-in catalog, batch runs with CSV and SVG
//! artifacts, and the acceptance suite.

pub mod acceptance;
pub mod build;
pub mod catalog;
pub mod config;
pub mod plot;
pub mod run;
