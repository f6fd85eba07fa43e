//! Pulsed-pump observables.
