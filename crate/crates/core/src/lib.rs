pub mod cli;
pub mod colorful;
pub mod fastq;
pub mod gen;
pub mod geometry3;
pub mod gp;
pub mod instance;
pub mod linalg;
pub mod mdp;
pub mod lp;
pub mod rational;
pub mod satgen;
pub mod system;
pub mod tropical;
