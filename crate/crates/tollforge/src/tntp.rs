//! TNTP network (`_net.tntp`) and trips (`_trips.tntp`) files.
//!
//! Files start with `<KEY> value` metadata lines closed by
//! `<END OF METADATA>`. Anything after `~` is a comment and data rows may end
//! in `;`. Node ids are 1-based in files and 0-based in memory.

use std::fmt::Write as _;

use tollforge_core::{Demand, Link, Network, OdPair};

use crate::error::{Error, Result};

/// One link row, all ten standard columns.
#[derive(Debug, Clone, PartialEq)]
pub struct RawLink {
    pub tail: usize,
    pub head: usize,
    pub capacity: f64,
    pub length: f64,
    pub free_flow_time: f64,
    pub b: f64,
    pub power: f64,
    pub speed: f64,
    pub toll: f64,
    pub link_type: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawNetwork {
    pub zones: Option<usize>,
    pub node_count: usize,
    pub first_thru_node: usize,
    pub links: Vec<RawLink>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RawTrips {
    pub zones: Option<usize>,
    pub total: Option<f64>,
    /// `(origin id, destination id, demand)` with zero demands dropped.
    pub entries: Vec<(usize, usize, f64)>,
}

struct Metadata {
    entries: Vec<(String, String, usize)>,
    body_start: usize,
}

fn strip_comment(line: &str) -> &str {
    match line.find('~') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn read_metadata(text: &str) -> Result<Metadata> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('~') {
            continue;
        }
        if !line.starts_with('<') {
            // no explicit terminator; data starts here
            return Ok(Metadata { entries, body_start: i });
        }
        let close = line.find('>').ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("unterminated metadata tag `{line}`"),
        })?;
        let key = line[1..close].trim().to_ascii_uppercase();
        if key == "END OF METADATA" {
            return Ok(Metadata { entries, body_start: i + 1 });
        }
        let value = line[close + 1..].trim().to_string();
        entries.push((key, value, i + 1));
    }
    Ok(Metadata { entries, body_start: text.lines().count() })
}

impl Metadata {
    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    fn number<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some((v, _)) => v
                .trim_end_matches(';')
                .trim()
                .parse()
                .map(Some)
                .map_err(|_| Error::Header {
                    header: key.to_string(),
                    msg: format!("cannot parse `{v}`"),
                }),
        }
    }

    fn required<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.number(key)?.ok_or_else(|| Error::Header {
            header: key.to_string(),
            msg: "missing".into(),
        })
    }
}

fn field<T: std::str::FromStr>(tok: &str, name: &str, line: usize) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("bad {name} `{tok}`"),
    })
}

/// Parses a `_net.tntp` file.
pub fn parse_network(text: &str) -> Result<RawNetwork> {
    let meta = read_metadata(text)?;
    let node_count: usize = meta.required("NUMBER OF NODES")?;
    let link_count: usize = meta.required("NUMBER OF LINKS")?;
    let first_thru_node: usize = meta.number("FIRST THRU NODE")?.unwrap_or(1);
    let zones: Option<usize> = meta.number("NUMBER OF ZONES")?;

    let mut links = Vec::with_capacity(link_count);
    for (i, raw) in text.lines().enumerate().skip(meta.body_start) {
        let line = strip_comment(raw).trim();
        let line = line.strip_suffix(';').unwrap_or(line).trim();
        if line.is_empty() {
            continue;
        }
        let n = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 10 {
            return Err(Error::Parse {
                line: n,
                msg: format!("expected 10 link fields, found {}", toks.len()),
            });
        }
        let link = RawLink {
            tail: field(toks[0], "init node", n)?,
            head: field(toks[1], "term node", n)?,
            capacity: field(toks[2], "capacity", n)?,
            length: field(toks[3], "length", n)?,
            free_flow_time: field(toks[4], "free flow time", n)?,
            b: field(toks[5], "b", n)?,
            power: field(toks[6], "power", n)?,
            speed: field(toks[7], "speed", n)?,
            toll: field(toks[8], "toll", n)?,
            link_type: field(toks[9], "link type", n)?,
        };
        for id in [link.tail, link.head] {
            if id == 0 || id > node_count {
                return Err(Error::Validation(format!(
                    "line {n}: node {id} outside 1..={node_count}"
                )));
            }
        }
        if !(link.capacity > 0.0) {
            return Err(Error::Validation(format!(
                "line {n}: capacity must be positive, got {}",
                link.capacity
            )));
        }
        if !(link.free_flow_time >= 0.0) {
            return Err(Error::Validation(format!(
                "line {n}: free flow time must be nonnegative, got {}",
                link.free_flow_time
            )));
        }
        links.push(link);
    }
    if links.len() != link_count {
        return Err(Error::Validation(format!(
            "header declares {link_count} links but {} were parsed",
            links.len()
        )));
    }
    Ok(RawNetwork {
        zones,
        node_count,
        first_thru_node,
        links,
    })
}

/// Parses a `_trips.tntp` file. Node ids are checked against a network in
/// [`RawTrips::to_demand`].
pub fn parse_trips(text: &str) -> Result<RawTrips> {
    let meta = read_metadata(text)?;
    let zones: Option<usize> = meta.number("NUMBER OF ZONES")?;
    let total: Option<f64> = meta.number("TOTAL OD FLOW")?;

    let mut entries = Vec::new();
    let mut origin: Option<usize> = None;
    for (i, raw) in text.lines().enumerate().skip(meta.body_start) {
        let n = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("Origin") {
            let id = rest.trim().trim_end_matches(';').trim();
            origin = Some(field(id, "origin", n)?);
            continue;
        }
        let o = origin.ok_or_else(|| Error::Parse {
            line: n,
            msg: "demand entry before any `Origin` line".into(),
        })?;
        for entry in line.split(';') {
            let entry = entry.trim();
            if entry.is_empty() {
                continue;
            }
            let (dest, value) = entry.split_once(':').ok_or_else(|| Error::Parse {
                line: n,
                msg: format!("expected `destination : demand`, found `{entry}`"),
            })?;
            let d: usize = field(dest.trim(), "destination", n)?;
            let x: f64 = field(value.trim(), "demand", n)?;
            if !(x >= 0.0) {
                return Err(Error::Validation(format!(
                    "line {n}: negative demand {x} for pair ({o}, {d})"
                )));
            }
            if x > 0.0 {
                entries.push((o, d, x));
            }
        }
    }
    if let Some(t) = total {
        let sum: f64 = entries.iter().map(|e| e.2).sum();
        if (sum - t).abs() > 1e-6 * t.abs().max(1.0) {
            return Err(Error::Validation(format!(
                "demand total {sum} differs from header total {t}"
            )));
        }
    }
    Ok(RawTrips { zones, total, entries })
}

impl RawNetwork {
    pub fn to_network(&self) -> Result<Network> {
        let links = self
            .links
            .iter()
            .map(|l| Link {
                tail: l.tail - 1,
                head: l.head - 1,
                capacity: l.capacity,
                free_flow_time: l.free_flow_time,
                b: l.b,
                power: l.power,
            })
            .collect();
        Ok(Network::new(
            self.node_count,
            self.first_thru_node.saturating_sub(1),
            links,
        )?)
    }

    /// Link index of `(tail id, head id)`.
    pub fn find(&self, tail: usize, head: usize) -> Option<usize> {
        self.links.iter().position(|l| l.tail == tail && l.head == head)
    }

    pub fn label(&self, a: usize) -> String {
        format!("{}-{}", self.links[a].tail, self.links[a].head)
    }
}

impl RawTrips {
    pub fn to_demand(&self, net: &RawNetwork) -> Result<Demand> {
        let n = net.node_count;
        let mut pairs = Vec::with_capacity(self.entries.len());
        for &(o, d, x) in &self.entries {
            for id in [o, d] {
                if id == 0 || id > n {
                    return Err(Error::Validation(format!(
                        "trip ({o}, {d}) references node {id} outside 1..={n}"
                    )));
                }
            }
            pairs.push(OdPair {
                origin: o - 1,
                destination: d - 1,
                demand: x,
            });
        }
        Ok(Demand::new(n, pairs)?)
    }

    pub fn total_demand(&self) -> f64 {
        self.entries.iter().map(|e| e.2).sum()
    }
}

pub fn write_network(net: &RawNetwork) -> String {
    let mut s = String::new();
    if let Some(z) = net.zones {
        let _ = writeln!(s, "<NUMBER OF ZONES> {z}");
    }
    let _ = writeln!(s, "<NUMBER OF NODES> {}", net.node_count);
    let _ = writeln!(s, "<FIRST THRU NODE> {}", net.first_thru_node);
    let _ = writeln!(s, "<NUMBER OF LINKS> {}", net.links.len());
    s.push_str("<END OF METADATA>\n\n\n");
    s.push_str("~\tinit_node\tterm_node\tcapacity\tlength\tfree_flow_time\tb\tpower\tspeed\ttoll\tlink_type\t;\n");
    for l in &net.links {
        let _ = writeln!(
            s,
            "\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t;",
            l.tail, l.head, l.capacity, l.length, l.free_flow_time, l.b, l.power, l.speed, l.toll, l.link_type
        );
    }
    s
}

pub fn write_trips(trips: &RawTrips) -> String {
    let mut s = String::new();
    if let Some(z) = trips.zones {
        let _ = writeln!(s, "<NUMBER OF ZONES> {z}");
    }
    let _ = writeln!(s, "<TOTAL OD FLOW> {}", trips.total.unwrap_or_else(|| trips.total_demand()));
    s.push_str("<END OF METADATA>\n");
    let mut current = None;
    for &(o, d, x) in &trips.entries {
        if current != Some(o) {
            let _ = write!(s, "\n\nOrigin \t{o}\n");
            current = Some(o);
        }
        let _ = writeln!(s, "    {d} :    {x};");
    }
    s
}
