//! Coded caching with shared caches, driven by placement delivery arrays.
//!
//! A placement delivery array (PDA) compresses an entire cache-and-multicast
//! scheme into one grid of stars and symbols: stars say which subfiles each
//! cache stores, symbols say which transmissions serve several users at once.
//! This crate covers the full pipeline for systems where each cache serves a
//! different number of users:
//!
//! * [`pda`] validates the defining conditions and reports every violation;
//! * [`constructions`] builds two classic families (t-subset and q-ary);
//! * [`ordering`] assigns columns to caches: greedy, exhaustive, and a
//!   closed-form rule for the q-ary family;
//! * [`rate`] computes exact rational delivery loads;
//! * [`gpda`] expands a cache-level array into a per-user array;
//! * [`sim`] runs the delivery protocol on real bytes and decodes per user;
//! * [`report`] compares all applicable strategies side by side;
//! * [`io`] reads and writes the text and JSON file formats.
//!
//! The `examples/` directory is the guided tour, one capability per program:
//!
//! * `validate_arrays` - validation reports on healthy and broken grids;
//! * `construct_families` - the two built-in families and their parameters;
//! * `reordering_gain` - greedy and exhaustive column assignment;
//! * `q_ary_ordering` - the label-driven ordering and its closed forms;
//! * `user_level_expansion` - cache-level to user-level arrays and back;
//! * `delivery_simulation` - byte-level delivery with per-user decoding.
//!
//! # Quick start
//!
//! Reordering columns cuts the delivery load of this six-cache array from
//! 8 to 7 subfile transmissions per file:
//!
//! ```
//! use pda_caching::io::parse_pda_text;
//! use pda_caching::ordering::{greedy_order, Profile};
//! use pda_caching::rate::load_from_pda;
//!
//! let pda = parse_pda_text("* 3 5 * 1 2\n1 * 6 3 * 4\n2 4 * 5 6 *")?;
//! let profile = Profile::normalize(&[5, 4, 3, 2, 2, 1])?;
//! assert_eq!(load_from_pda(&pda, &profile)?.to_string(), "24/3");
//!
//! let (best, _trace) = greedy_order(&pda, &profile, false)?;
//! assert_eq!(load_from_pda(&best.reordered, &profile)?.to_string(), "21/3");
//! # Ok::<(), pda_caching::Error>(())
//! ```

pub mod constructions;
pub mod error;
pub mod gpda;
pub mod io;
pub mod ordering;
pub mod pda;
pub mod rate;
pub mod report;
pub mod sim;

pub use error::{Error, Result};
pub use gpda::{build_gpda, reduce_to_pda, GCell, GeneralizedPda};
pub use ordering::{exhaustive_order, greedy_order, ColumnOrdering, OrderingTrace, Profile};
pub use pda::{Cell, ConditionTag, Pda, ValidationReport, Violation};
pub use rate::{load_from_gpda, load_from_pda, tau_values, LoadValue};
pub use report::{run_compare, CompareOptions, ComparisonReport};
pub use sim::{decode, deliver, simulate, DecodeStatus, DeliveryRun, Library, Placement};
