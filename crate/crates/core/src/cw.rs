//! CW-pump observables.
