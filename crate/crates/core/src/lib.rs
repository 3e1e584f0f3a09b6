//! Certified computations around the intersections of k-generalized
//! Fibonacci sequences: exact term generation, ball arithmetic, dominant
//! roots, linear-form bound chains, continued-fraction reduction, and the
//! k-way merge intersection search.

pub mod algnum;
pub mod ball;
pub mod bigseq;
pub mod error;
pub mod linforms;
pub mod meet;
pub mod precision;
pub mod redux;

pub use ball::{Ball, BallDoc, ComplexBall, Dyadic};
pub use bigseq::{kbonacci, term, window_at, SequenceWindow, TermIndex};
pub use error::{Error, ErrorKind, Result};
pub use linforms::{BoundChainReport, LargeKVerdict, LargeKWitness, MatveevParams};
pub use meet::{Attainer, CoincidenceHit, SearchConfig, SearchState};
pub use redux::{ContinuedFraction, ReductionCertificate};
