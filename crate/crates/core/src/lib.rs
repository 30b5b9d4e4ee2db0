//! Constructive near-constant partitions of polynomial phases and
//! nilsequences, Gowers norms, and a density-increment engine for
//! arithmetic progressions.

pub mod budget;
pub mod cert;
pub mod engine;
pub mod error;
pub mod exact;
pub mod format;
pub mod gowers;
pub mod nil;
pub mod oracle;
pub mod poly;
pub mod polyphase;
pub mod progression;

pub use cert::{Channel, PartitionCertificate, Source};
pub use error::{Error, Result};
pub use progression::Progression;
