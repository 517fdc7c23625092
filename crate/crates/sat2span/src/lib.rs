//! Staged reductions from CNF satisfiability down to channel assignment.
//!
//! The chain has three reduction steps, each paired with an exhaustive
//! oracle so that every step can be checked for instance equivalence at
//! desk scale:
//!
//! ```text
//! CNF-SAT  ->  family intersection  ->  common matching weight  ->  channel assignment
//! ```
//!
//! * [`cnf`]: formulas, occurrence indexing, and a brute-force SAT oracle.
//! * [`family`]: selector-sum families `X_f` and the CNF encoding into a
//!   pair of families whose intersection mirrors satisfiability.
//! * [`weave`]: permutations of fixed-length words with prescribed letters
//!   at prescribed positions, the engine behind the compression step.
//! * [`matching`]: complete bipartite graphs whose perfect-matching weight
//!   set equals a given family, and the common-matching-weight oracle.
//! * [`channel`]: channel assignment instances, proper colorings, and an
//!   exact ordering-based solver used as a verification oracle.
//! * [`gadget`]: the matching-to-channel-assignment gadget plus the extend
//!   and merge combinators that splice two encoded graphs into one instance.
//! * [`formats`]: line-oriented file formats for every stage.
//! * [`pipeline`]: the staged driver behind the `sat2span` binary.

pub mod budget;
pub mod channel;
pub mod cnf;
pub mod family;
pub mod formats;
pub mod gadget;
pub mod matching;
pub mod pipeline;
pub mod weave;

pub use budget::{Budget, BudgetExceeded};
