pub mod cli;
pub mod extham;
pub mod linalg;
pub mod quantize;
pub mod spin;
pub mod units;
pub mod zeeman;
