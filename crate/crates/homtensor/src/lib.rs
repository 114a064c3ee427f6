// SPDX-License-Identifier: Apache-2.0
//! File formats, invariant suites, flop audits and benchmarks for
//! `homtensor-core`, plus the `homtensor` command-line tool.

pub mod bench;
pub mod error;
pub mod format;
pub mod report;
pub mod suites;

pub use error::{ToolError, ToolResult};
