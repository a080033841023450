pub mod augment;
pub mod bench;
pub mod dump;
pub mod integrate;
pub mod simulate;
pub mod split;
pub mod stats;
pub mod verify;
