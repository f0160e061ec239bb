pub mod elab;
pub mod engine;
pub mod hohh;
pub mod invert;
pub mod lf;
pub mod name;
pub mod syntax;
pub mod translate;
pub mod typecheck;
