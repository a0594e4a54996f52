//! Benchmark instances: the bundled Hearn and Sioux-Falls files, anything
//! under `TOLLFORGE_DATA_DIR`, or explicit file paths.

use std::path::{Path, PathBuf};

use tollforge_core::{Demand, Network};

use crate::error::{Error, Result};
use crate::tntp::{parse_network, parse_trips, RawNetwork, RawTrips};

/// Link times in the benchmark files are minutes; `F` is reported in hours.
pub const DEFAULT_TIME_SCALE: f64 = 1.0 / 60.0;

pub const DATA_DIR_ENV: &str = "TOLLFORGE_DATA_DIR";

const HEARN_NET: &str = include_str!("../data/Hearn_net.tntp");
const HEARN_TRIPS: &str = include_str!("../data/Hearn_trips.tntp");
const SIOUX_NET: &str = include_str!("../data/SiouxFalls_net.tntp");
const SIOUX_TRIPS: &str = include_str!("../data/SiouxFalls_trips.tntp");

/// The minimum-toll-location scheme for Hearn's network.
pub const HEARN_MTL_TOLLS: &str = include_str!("../data/Hearn_mtl_tolls.csv");

#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    pub raw_network: RawNetwork,
    pub raw_trips: RawTrips,
    pub network: Network,
    pub demand: Demand,
}

impl Instance {
    pub fn from_text(name: &str, net: &str, trips: &str, time_scale: f64) -> Result<Self> {
        let raw_network = parse_network(net)?;
        let raw_trips = parse_trips(trips)?;
        let network = raw_network.to_network()?.with_time_scale(time_scale);
        let demand = raw_trips.to_demand(&raw_network)?;
        Ok(Instance {
            name: name.to_string(),
            raw_network,
            raw_trips,
            network,
            demand,
        })
    }

    pub fn from_files(net: &Path, trips: &Path, time_scale: f64) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let name = net
            .file_name()
            .and_then(|s| s.to_str())
            .map(|s| s.trim_end_matches(".tntp").trim_end_matches("_net"))
            .unwrap_or("network")
            .to_string();
        Self::from_text(&name, &read(net)?, &read(trips)?, time_scale)
    }

    /// `hearn`, `sioux-falls`, or `<Name>` resolved to
    /// `$TOLLFORGE_DATA_DIR/<Name>_net.tntp` and `<Name>_trips.tntp`.
    pub fn named(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "hearn" => Self::from_text("hearn", HEARN_NET, HEARN_TRIPS, DEFAULT_TIME_SCALE),
            "sioux-falls" | "siouxfalls" => {
                Self::from_text("sioux-falls", SIOUX_NET, SIOUX_TRIPS, DEFAULT_TIME_SCALE)
            }
            _ => {
                let (net, trips) =
                    data_dir_files(name).ok_or_else(|| Error::UnknownInstance(name.to_string()))?;
                let mut inst = Self::from_files(&net, &trips, DEFAULT_TIME_SCALE)?;
                inst.name = name.to_string();
                Ok(inst)
            }
        }
    }

    /// Link label `tail-head` with file node ids.
    pub fn label(&self, a: usize) -> String {
        self.raw_network.label(a)
    }
}

/// `(net, trips)` paths for `name` under the data directory, if both exist.
pub fn data_dir_files(name: &str) -> Option<(PathBuf, PathBuf)> {
    let dir = PathBuf::from(std::env::var_os(DATA_DIR_ENV)?);
    let stems = [name.to_string(), name.replace('-', ""), name.replace(['-', '_'], "")];
    for stem in stems {
        for candidate in [stem.clone(), capitalize_words(&stem)] {
            let net = dir.join(format!("{candidate}_net.tntp"));
            let trips = dir.join(format!("{candidate}_trips.tntp"));
            if net.is_file() && trips.is_file() {
                return Some((net, trips));
            }
        }
    }
    None
}

fn capitalize_words(s: &str) -> String {
    s.split(['-', '_'])
        .map(|w| {
            let mut c = w.chars();
            match c.next() {
                Some(f) => f.to_uppercase().chain(c).collect(),
                None => String::new(),
            }
        })
        .collect()
}
