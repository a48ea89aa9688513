//! Distribution tables from CSV: one column per variable and a final
//! probability column. A variable header may carry its alphabet size as
//! `name:size`; otherwise the size is the largest value seen plus one.

use std::io::Read;
use std::path::Path;

use super::{EntropyError, JointDistribution};

pub fn read_distribution_csv<R: Read>(reader: R) -> Result<JointDistribution, EntropyError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(reader);
    let headers = rdr.headers().map_err(|e| EntropyError::Csv(e.to_string()))?.clone();
    if headers.len() < 2 {
        return Err(EntropyError::Csv("need at least one variable column and a probability column".into()));
    }
    let nvars = headers.len() - 1;
    let mut names = Vec::with_capacity(nvars);
    let mut declared = Vec::with_capacity(nvars);
    for h in headers.iter().take(nvars) {
        match h.split_once(':') {
            Some((name, size)) => {
                let size: u32 = size.parse().map_err(|_| EntropyError::Csv(format!("bad alphabet size in {h:?}")))?;
                names.push(name.to_string());
                declared.push(Some(size));
            }
            None => {
                names.push(h.to_string());
                declared.push(None);
            }
        }
    }
    let mut entries = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| EntropyError::Csv(e.to_string()))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let outcome = (0..nvars)
            .map(|i| field(i).parse::<u32>())
            .collect::<Result<Vec<u32>, _>>()
            .map_err(|e| EntropyError::Csv(format!("row {}: {e}", line + 1)))?;
        let p: f64 = field(nvars).parse().map_err(|e| EntropyError::Csv(format!("row {}: {e}", line + 1)))?;
        entries.push((outcome, p));
    }
    let vars = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| {
            let seen = entries.iter().map(|(o, _)| o[i] + 1).max().unwrap_or(1);
            (name, declared[i].unwrap_or(seen))
        })
        .collect();
    JointDistribution::new(vars, entries)
}

pub fn load_distribution_csv(path: impl AsRef<Path>) -> Result<JointDistribution, EntropyError> {
    read_distribution_csv(std::fs::File::open(path)?)
}
