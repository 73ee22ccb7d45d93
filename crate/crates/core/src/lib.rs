pub mod intmat;
pub mod cartan;
pub mod gram;
pub mod contrib;
pub mod brauer;
pub mod casebook;
