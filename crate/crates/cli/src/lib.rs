pub mod run;
pub mod scenario;
pub mod verify;
