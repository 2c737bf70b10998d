pub mod asympt;
pub mod hf;
pub mod scatter;
pub mod verify;
