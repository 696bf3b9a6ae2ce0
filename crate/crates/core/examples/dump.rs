//! Print the SSA form and cell facts of every function in a FunC file.
//!
//! cargo run -p tonscanner-core --example dump -- path/to/contract.fc

use std::path::PathBuf;

use tonscanner_core::analysis::Catalog;
use tonscanner_core::frontend::load_unit;
use tonscanner_core::ir::dump_cfg;
use tonscanner_core::pipeline::UnitAnalysis;

fn main() {
    let Some(path) = std::env::args().nth(1) else {
        eprintln!("usage: dump <file.fc>");
        std::process::exit(2);
    };
    let unit = load_unit(&PathBuf::from(path), &[]);
    for e in &unit.errors {
        eprintln!("error: {e}");
    }
    let catalog = Catalog::builtin();
    let ua = UnitAnalysis::new(&unit, &catalog);
    for (name, f) in &ua.functions {
        println!("== {name}");
        print!("{}", dump_cfg(&f.cfg));
        for (i, r) in f.cells.roots.iter().enumerate() {
            println!("root {i}: {}:{} {:?} top={} escaped={} status={:?}", r.span.start_line, r.span.start_col, r.source, r.top, r.escaped, f.cells.end_parse.get(i));
        }
        for l in &f.cells.loads {
            println!("load root={:?} at {} field {}", l.root, l.span, l.field);
        }
        for s in &f.cells.stores {
            println!("set_data at {}: {}", s.span, s.layout.as_ref().map(|l| l.to_string()).unwrap_or_else(|| "?".into()));
        }
        for s in &f.cells.sends {
            println!("send at {}: {}", s.span, s.layout.as_ref().map(|l| l.to_string()).unwrap_or_else(|| "?".into()));
        }
        for h in &f.sinks {
            println!("sink {:?} at {} taint {:?}", h.kind, h.span, h.taint);
        }
    }
}
