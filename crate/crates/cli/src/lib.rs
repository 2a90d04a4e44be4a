//! Model format, exporters and fixtures for the variable-Petri-net tool.

pub mod export;
pub mod fixtures;
pub mod model;

pub use export::{
    graph_to_dot, graph_to_json, json_to_graph, render_report_text, report_to_json, tree_to_dot,
    tree_to_json, JsonGraph,
};
pub use fixtures::{fixtures, Fixtures};
pub use model::{parse_model, serialize_document, Diagnostic, ModelDocument};
