//! CSV and SVG emission.

mod csv;
mod svg;

pub use csv::{fmt_sig, parse_trajectory_csv, read_trajectory_csv, write_csv, Table, ToCsv, STABILITY_HEADER, VERDICT_HEADER};
pub use svg::{render_svg, svg_document, PlotSpec, Series};
