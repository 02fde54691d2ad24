pub mod cli;
pub mod dataset;
pub mod hand;
pub mod plot;
pub mod sensor;
pub mod synergy;
pub mod trial;
