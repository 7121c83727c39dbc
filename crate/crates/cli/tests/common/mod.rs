#![allow(dead_code)]

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

/// A parsed CSV: metadata from `#` lines, the header, and the records.
#[derive(Debug)]
pub struct Table {
    pub meta: HashMap<String, String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse(text: &str) -> Table {
        let mut meta = HashMap::new();
        let mut lines = text.lines();
        let header = loop {
            let line = lines.next().expect("CSV has a header row");
            match line.strip_prefix("# ") {
                Some(m) => {
                    if let Some((k, v)) = m.split_once(" = ") {
                        meta.insert(k.to_string(), v.to_string());
                    }
                }
                None => break line.split(',').map(str::to_string).collect::<Vec<_>>(),
            }
        };
        let rows = lines.map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>()).collect::<Vec<_>>();
        for r in &rows {
            assert_eq!(r.len(), header.len(), "ragged row {r:?}");
        }
        Table { meta, header, rows }
    }

    pub fn read(path: &Path) -> Table {
        Table::parse(&std::fs::read_to_string(path).unwrap())
    }

    pub fn col(&self, name: &str) -> usize {
        self.header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
    }

    pub fn f(&self, row: &[String], name: &str) -> f64 {
        row[self.col(name)].parse().unwrap_or_else(|e| panic!("{name} = {:?}: {e}", row[self.col(name)]))
    }

    pub fn opt(&self, row: &[String], name: &str) -> Option<f64> {
        let v = &row[self.col(name)];
        (!v.is_empty()).then(|| v.parse().unwrap())
    }

    pub fn s<'a>(&self, row: &'a [String], name: &str) -> &'a str {
        &row[self.col(name)]
    }

    pub fn where_eq<'a>(&'a self, name: &str, value: &str) -> impl Iterator<Item = &'a Vec<String>> + 'a {
        let c = self.col(name);
        let value = value.to_string();
        self.rows.iter().filter(move |r| r[c] == value)
    }
}

pub fn gaussthermo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussthermo")).args(args).output().expect("binary runs")
}
