//! Numerical machinery for twisted modular L-functions L(s, f⊗χ): completed
//! values, root numbers, the argument function S(t, f⊗χ), critical-line zero
//! location and rectangle counts, mollified averages, and character-averaged
//! moment statistics.

pub mod argument;
pub mod characters;
pub mod error;
pub mod forms;
pub mod lfunc;
pub mod moments;
pub mod mollifier;
pub mod primes;
pub mod special;
pub mod sweep;
pub mod util;
pub mod verify;
pub mod zeros;

pub use error::{Error, Result};
