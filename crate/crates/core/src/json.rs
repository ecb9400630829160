//! Integers above 2^53 are written as JSON strings so that consumers using
//! IEEE doubles never see a rounded value.

use serde::ser::{SerializeMap, SerializeSeq};
use serde::Serializer;
use std::collections::BTreeMap;

pub const MAX_SAFE: u64 = (1 << 53) - 1;

pub fn u64<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
    if *v <= MAX_SAFE {
        s.serialize_u64(*v)
    } else {
        s.serialize_str(&v.to_string())
    }
}

pub fn opt_u64<S: Serializer>(v: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => u64(v, s),
        None => s.serialize_none(),
    }
}

struct Safe(u64);

impl serde::Serialize for Safe {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        u64(&self.0, s)
    }
}

pub fn vec_u64<S: Serializer>(v: &[u64], s: S) -> Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for &x in v {
        seq.serialize_element(&Safe(x))?;
    }
    seq.end()
}

pub fn opt_vec_u64<S: Serializer>(v: &Option<Vec<u64>>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => vec_u64(v, s),
        None => s.serialize_none(),
    }
}

pub fn opt_map_u64<S: Serializer>(
    v: &Option<BTreeMap<u64, u64>>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match v {
        None => s.serialize_none(),
        Some(map) => {
            let mut m = s.serialize_map(Some(map.len()))?;
            for (k, c) in map {
                m.serialize_entry(&k.to_string(), &Safe(*c))?;
            }
            m.end()
        }
    }
}
