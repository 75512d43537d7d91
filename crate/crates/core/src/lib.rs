pub mod certify;
pub mod error;
pub mod finite_dynamics;
pub mod mahler;
pub mod map;
pub mod neighborhood;
pub mod numfield;
pub mod padic;
pub mod ring;
pub mod series;

pub use error::{Error, Result};

/// The guide under `book/`, compiled so that its examples stay current.
#[cfg(doctest)]
pub mod guide {
    macro_rules! chapter {
        ($name:ident, $file:literal) => {
            #[doc = include_str!(concat!("../../../book/src/", $file))]
            pub struct $name;
        };
    }
    chapter!(Introduction, "introduction.md");
    chapter!(Padic, "padic.md");
    chapter!(Series, "series.md");
    chapter!(FiniteDynamics, "finite_dynamics.md");
    chapter!(Neighborhood, "neighborhood.md");
    chapter!(Mahler, "mahler.md");
    chapter!(Certificates, "certificates.md");
    chapter!(Cli, "cli.md");
}
