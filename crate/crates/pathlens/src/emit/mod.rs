//! Deterministic renderers.

mod dot;
mod network_json;
mod reports;
mod style;

pub use dot::emit_dot;
pub use network_json::{format_pct, network_from_json, network_to_json, NetworkJsonError};
pub use reports::{comparison_from_json, comparison_to_json, theme_matrix_csv, theme_report_csv, to_json};
pub use style::{BadColor, HexColor, Palette, RenderStyle, StyleError};
