pub mod csv_dir;
pub mod ddl;
pub mod lexer;
pub mod obda;
pub mod schema_doc;
pub mod sql;

pub use csv_dir::{load_csv_dir, parse_csv_table, LoadedData};
pub use ddl::{emit_ddl, parse_ddl};
pub use obda::{emit_obda, parse_obda, parse_target, ObdaDocument};
pub use schema_doc::{emit_schema_doc, parse_schema_auto, parse_schema_doc};
pub use sql::{parse_select, parse_source, qualify_columns, render_sql};
