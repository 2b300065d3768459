//! Command-line tools and HTTP sizing service for the zerog toolkit.

pub mod commands;
pub mod service;
pub mod sizing;
