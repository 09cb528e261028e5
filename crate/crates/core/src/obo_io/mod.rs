//! Text formats: the native knowledge-base grammar, an OBO subset, the
//! axiomatisation export and classification reports.

pub mod export;
pub mod native;
pub mod obo;
pub mod report;

pub use export::{export_axiomatisation, upper_scaffold, ExportError};
pub use native::{parse_native, serialize_native, LocatedKbError, NativeDocument, SyntaxError};
pub use obo::{parse_obo, serialize_obo, Clause, OboError, OntologyDocument, Stanza};
pub use report::{write_report, ReportFormat};
