pub mod certifier;
pub mod config;
pub mod enumeration;
pub mod exact;
pub mod frame;
pub mod lattice;
pub mod linalg;
pub mod report;
pub mod search;
