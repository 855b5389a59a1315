//! Location check-in data: tab-separated
//! `user_id, timestamp, latitude, longitude, location_id` records.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckinRecord {
    pub user_id: u64,
    /// ISO 8601, kept verbatim.
    pub timestamp: String,
    pub latitude: f64,
    pub longitude: f64,
    pub location_id: u64,
}

fn parse_line(line: &str, number: usize) -> Result<CheckinRecord> {
    let bad = |reason: String| Error::MalformedCheckin {
        line: number,
        reason,
    };
    let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
    let [user, timestamp, lat, lon, loc] = fields.as_slice() else {
        return Err(bad(format!(
            "expected 5 tab-separated columns, found {}",
            fields.len()
        )));
    };
    let number_field = |name: &str, v: &str| -> Result<f64> {
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| bad(format!("{name} `{v}` is not a number")))
    };
    let id_field = |name: &str, v: &str| -> Result<u64> {
        v.parse::<u64>()
            .map_err(|_| bad(format!("{name} `{v}` is not an integer id")))
    };
    let record = CheckinRecord {
        user_id: id_field("user id", user)?,
        timestamp: timestamp.to_string(),
        latitude: number_field("latitude", lat)?,
        longitude: number_field("longitude", lon)?,
        location_id: id_field("location id", loc)?,
    };
    if !(-90.0..=90.0).contains(&record.latitude) {
        return Err(bad(format!(
            "latitude {} outside [-90, 90]",
            record.latitude
        )));
    }
    if !(-180.0..=180.0).contains(&record.longitude) {
        return Err(bad(format!(
            "longitude {} outside [-180, 180]",
            record.longitude
        )));
    }
    Ok(record)
}

/// Parses check-in lines in input order. Blank lines are skipped; line
/// numbers in errors are 1-based.
pub fn parse_checkins<I, S>(lines: I) -> Result<Vec<CheckinRecord>>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    lines
        .into_iter()
        .enumerate()
        .filter(|(_, l)| !l.as_ref().trim().is_empty())
        .map(|(i, l)| parse_line(l.as_ref(), i + 1))
        .collect()
}

pub fn load_checkins(path: &Path) -> Result<Vec<CheckinRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if !line.trim().is_empty() {
            records.push(parse_line(&line, i + 1)?);
        }
    }
    Ok(records)
}

/// Closed latitude/longitude box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub lat: (f64, f64),
    pub lon: (f64, f64),
}

impl BoundingBox {
    pub const NEW_YORK: BoundingBox = BoundingBox {
        lat: (40.4774, 40.9176),
        lon: (-74.2591, -73.7004),
    };

    pub const WORLD: BoundingBox = BoundingBox {
        lat: (-90.0, 90.0),
        lon: (-180.0, 180.0),
    };

    pub fn validate(&self) -> Result<()> {
        if self.lat.0 > self.lat.1 {
            return Err(Error::param("bbox_lat", "inverted latitude range"));
        }
        if self.lon.0 > self.lon.1 {
            return Err(Error::param("bbox_lon", "inverted longitude range"));
        }
        Ok(())
    }

    pub fn contains(&self, lat: f64, lon: f64) -> bool {
        (self.lat.0..=self.lat.1).contains(&lat) && (self.lon.0..=self.lon.1).contains(&lon)
    }
}

pub fn filter_bbox(records: &[CheckinRecord], bbox: &BoundingBox) -> Result<Vec<CheckinRecord>> {
    bbox.validate()?;
    Ok(records
        .iter()
        .filter(|r| bbox.contains(r.latitude, r.longitude))
        .cloned()
        .collect())
}
