pub mod bits;
pub mod error;
pub mod formula;
pub mod frame;
pub mod report;
pub mod battery;
pub mod forcing;
pub mod morphism;
pub mod transform;
pub mod bao;
pub mod correspondence;
pub mod enumerate;
pub mod document;
#[cfg(feature = "cli")]
pub mod cli;
