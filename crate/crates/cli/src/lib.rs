//! File formats and helpers behind the `whereabouts` command-line tool.
//!
//! Everything on disk is plain CSV or flat `key=value` text so results can be
//! diffed, plotted, and re-read without special tooling. The formats are:
//!
//! * dataset: `x,y,value` rows, with empty coordinate fields marking
//!   measurements whose location is unknown (`,,12.5`);
//! * density field: `x,y,density` in row-major grid order;
//! * highest-density regions: `x,y,alpha_level`;
//! * chain: `iter,loc_index,x,y`;
//! * covariate raster: `x,y,v1,...,vp` on a regular grid of cell centers;
//! * fitted parameters and reports: `key=value` lines, `#` comments.

pub mod config;
pub mod io;

/// A problem with how the tool was invoked (bad flag value, malformed file,
/// inconsistent options). Exits with status 2, as opposed to numerical
/// failures which exit with 3.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

/// Shorthand for building a usage error.
pub fn usage(msg: impl std::fmt::Display) -> anyhow::Error {
    anyhow::Error::new(UsageError(msg.to_string()))
}

/// Exit status for an error: 2 for usage problems, 3 for numerical failures.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    if let Some(core_err) = err.downcast_ref::<whereabouts_core::Error>() {
        return match core_err {
            whereabouts_core::Error::InvalidInput(_) => 2,
            _ => 3,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 2;
    }
    2
}
