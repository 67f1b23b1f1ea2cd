//! Networks, the representation game Γₙ, the pebble frame game Gⁿ and the
//! σₙ sentences.

pub mod gamma;
pub mod network;
pub mod pebble;
pub mod sigma;

pub use network::{frame_consistent, term_consistent, FrameNetwork, TermNetwork};
pub use pebble::{literal_play, solve_pebble_game, verify_basis, verify_transcript, GameVerdict, MoveRecord, Winner};
pub use gamma::{decide_gamma, decide_gamma_with, GammaLimits, GammaOutcome, GammaVerdict};
pub use sigma::{emit_sigma, evaluate, parse_formula, sigma_formula, Formula, SigmaError, Term};
