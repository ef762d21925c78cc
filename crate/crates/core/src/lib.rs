pub mod batch;
pub mod cli;
pub mod conic;
pub mod curve;
pub mod funcfield;
pub mod kodaira;
pub mod numfield;
pub mod points;
pub mod qpoly;
pub mod rank;
pub mod report;
pub mod selftest;
