pub mod bench;
pub mod gen;
pub mod profiles;
pub mod verify;
