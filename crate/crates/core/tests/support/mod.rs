pub mod oracle;
pub mod strategies;
