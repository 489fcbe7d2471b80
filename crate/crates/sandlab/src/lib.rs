//! File formats, the rule language and the `sandlab` command line tool.
//!
//! | format      | header       | contents                                   |
//! |-------------|--------------|--------------------------------------------|
//! | rule program| `sarule v1`  | guarded cases over range entries           |
//! | rule table  | `satable v1` | one output per range, in range-index order |
//! | CA table    | `carule v1`  | one state digit per neighbourhood          |
//! | config      | `sandcfg v1` | an exactly described configuration         |
//! | trajectory  | JSON lines   | one record per step                        |

pub mod cli;
pub mod dsl;
pub mod error;
pub mod formats;
mod lex;
pub mod render;
pub mod traj;

pub use error::{ParseError, ParseResult};
