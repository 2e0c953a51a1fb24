//! File formats, reports and the benchmark harness behind the `backpush`
//! command-line tool.

pub mod bench;
pub mod cli;
pub mod edgelist;
pub mod report;
