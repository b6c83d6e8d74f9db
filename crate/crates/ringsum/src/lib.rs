//! Power sums S_k(R) = sum of r^k over all elements of a finite unital ring R,
//! computed two independent ways: symbolic closed forms driven by the structure
//! of R, and a brute-force enumeration oracle. On top of the two routes sit
//! irreducibility/maximality tests and bounded integer searches for rings with
//! S_{|R|}(R) = +-1 and for generalized-Giuga counterexamples.
//!
//! Module layout mirrors the data flow: integer plumbing ([`numtheory`]),
//! polynomial plumbing ([`poly`]), the structure-constant representation
//! ([`algebra`]), ring construction from a small spec language
//! ([`constructors`]), enumeration ([`oracle`]), symbolic evaluation
//! ([`closedform`]), structure tests ([`classify`]) and the order searches
//! ([`search`]).

pub mod algebra;
pub mod classify;
pub mod closedform;
pub mod constructors;
pub mod numtheory;
pub mod oracle;
pub mod poly;
pub mod search;

/// Default cap on the number of elements any enumeration is willing to walk.
/// Overridable per call; the CLI also reads `RINGSUM_MAX_ELEMENTS`.
pub const DEFAULT_MAX_ELEMENTS: u64 = 1 << 24;
