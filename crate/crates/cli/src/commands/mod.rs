pub mod bench;
pub mod model;
pub mod run;
pub mod verify;
