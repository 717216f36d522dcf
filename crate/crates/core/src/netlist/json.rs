// SPDX-License-Identifier: Apache-2.0

//! JSON netlist form.
//!
//! ```json
//! { "name": "m",
//!   "ports": [ { "name": "a", "direction": "input" }, ... ],
//!   "nets":  [ "a", "y", ... ],
//!   "cells": [ { "name": "b1", "kind": "BUF", "pins": { "A": "a", "Y": "y" } } ] }
//! ```
//!
//! Port names are nets too; listing them under `nets` is optional.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Netlist, NetlistError, PortDirection, RawCell, RawNetlist};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonNetlist {
    name: String,
    ports: Vec<JsonPort>,
    #[serde(default)]
    nets: Vec<String>,
    cells: Vec<JsonCell>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonPort {
    name: String,
    direction: PortDirection,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonCell {
    name: String,
    kind: String,
    pins: BTreeMap<String, String>,
}

pub fn parse(src: &str) -> Result<Netlist, NetlistError> {
    let doc: JsonNetlist =
        serde_json::from_str(src).map_err(|e| NetlistError::Json(e.to_string()))?;
    let ports: Vec<(String, PortDirection)> =
        doc.ports.into_iter().map(|p| (p.name, p.direction)).collect();
    let wires = doc
        .nets
        .into_iter()
        .filter(|n| !ports.iter().any(|(p, _)| p == n))
        .collect();
    let cells = doc
        .cells
        .into_iter()
        .map(|c| RawCell {
            name: c.name,
            kind: c.kind,
            pins: c.pins.into_iter().collect(),
        })
        .collect();
    RawNetlist {
        name: doc.name,
        ports,
        wires,
        cells,
    }
    .elaborate()
}

/// Pretty-printed JSON; byte-deterministic for a given netlist.
pub fn to_json(n: &Netlist) -> String {
    let doc = JsonNetlist {
        name: n.name.clone(),
        ports: n
            .ports
            .iter()
            .map(|p| JsonPort {
                name: p.name.clone(),
                direction: p.direction,
            })
            .collect(),
        nets: n.nets.clone(),
        cells: n
            .cells
            .iter()
            .map(|c| JsonCell {
                name: c.name.clone(),
                kind: c.kind.name().to_string(),
                pins: c
                    .kind
                    .pins()
                    .map(|pin| (pin.to_string(), n.net_name(c.pin(pin).unwrap()).to_string()))
                    .collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("netlist serializes");
    s.push('\n');
    s
}
