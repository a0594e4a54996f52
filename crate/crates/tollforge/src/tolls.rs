//! Toll tables as CSV `tail,head,toll` with the node ids of the network file.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tntp::RawNetwork;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TollRow {
    pub tail: usize,
    pub head: usize,
    pub toll: f64,
}

/// Parses a toll table into a full-length toll vector for `net`.
/// Links missing from the table get toll 0; duplicates are rejected.
pub fn read_tolls<R: Read>(net: &RawNetwork, reader: R) -> Result<Vec<f64>> {
    let mut tolls = vec![0.0; net.links.len()];
    let mut seen = vec![false; net.links.len()];
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    for (i, row) in rdr.deserialize::<TollRow>().enumerate() {
        let row = row?;
        let line = i + 2;
        let a = net.find(row.tail, row.head).ok_or_else(|| Error::Parse {
            line,
            msg: format!("no link {}-{} in the network", row.tail, row.head),
        })?;
        if !(row.toll.is_finite() && row.toll >= 0.0) {
            return Err(Error::Parse {
                line,
                msg: format!("toll {} must be finite and nonnegative", row.toll),
            });
        }
        if seen[a] {
            return Err(Error::Parse {
                line,
                msg: format!("link {}-{} listed twice", row.tail, row.head),
            });
        }
        seen[a] = true;
        tolls[a] = row.toll;
    }
    Ok(tolls)
}

pub fn read_tolls_file(net: &RawNetwork, path: &Path) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_tolls(net, file)
}

/// Nonzero tolls sorted by toll descending, then by link index.
pub fn toll_rows(net: &RawNetwork, tolls: &[f64]) -> Vec<TollRow> {
    let mut idx: Vec<usize> = (0..tolls.len()).filter(|&a| tolls[a] != 0.0).collect();
    idx.sort_by(|&a, &b| tolls[b].total_cmp(&tolls[a]).then(a.cmp(&b)));
    idx.into_iter()
        .map(|a| TollRow {
            tail: net.links[a].tail,
            head: net.links[a].head,
            toll: tolls[a],
        })
        .collect()
}

pub fn write_tolls<W: Write>(net: &RawNetwork, tolls: &[f64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in toll_rows(net, tolls) {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<toll table>", e))?;
    Ok(())
}

pub fn write_tolls_file(net: &RawNetwork, tolls: &[f64], path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_tolls(net, tolls, file)
}
