//! Exact and brute-force computation of the objects behind the large sieve
//! with square moduli: modular square roots, (restricted) quadratic Gauss
//! sums, Cochrane-type exponential sums over prime powers, root-difference
//! counts, Farey-fraction counts, smoothing majorants, and the bound
//! expressions these quantities are compared against.

pub mod cochrane;
pub mod counting;
pub mod expsum;
pub mod modular;
pub mod prng;
pub mod report;
pub mod sequences;
pub mod smoothing;
pub mod sweep;
pub mod verify;
