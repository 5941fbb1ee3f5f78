//! Sullivan chord diagrams, their PROP structure, and their action on the
//! normalized Hochschild cochains of a Frobenius algebra, over exact rationals.

pub mod action;
pub mod diagram;
pub mod frobenius;
pub mod hochschild;
pub mod json;
pub mod linalg;
pub mod prop;
pub mod rational;
pub mod report;
pub mod verify;

pub use rational::Q;
