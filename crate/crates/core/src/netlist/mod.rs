// SPDX-License-Identifier: Apache-2.0

//! Elaborated gate-level netlists.
//!
//! A [`Netlist`] is produced by one of the two front ends ([`verilog`] or
//! [`json`]) and is immutable afterwards. Elaboration guarantees:
//!
//! - every cell pin is bound to exactly one declared net;
//! - every net has exactly one driver (an input port or a cell output);
//! - all DFF clock pins share one net, which must be an input port;
//! - `flipflops` lists DFF instances in source order.

pub mod json;
pub mod verilog;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Line/column position in a source text (both 1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetlistError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("unknown cell kind `{kind}` for instance `{instance}`")]
    UnknownCellKind { instance: String, kind: String },
    #[error("instance `{instance}` ({kind}) has unbound pin `{pin}`")]
    UnboundPin {
        instance: String,
        kind: CellKind,
        pin: String,
    },
    #[error("instance `{instance}` ({kind}) has no pin named `{pin}`")]
    UnknownPin {
        instance: String,
        kind: CellKind,
        pin: String,
    },
    #[error("instance `{instance}` binds pin `{pin}` twice")]
    DuplicatePin { instance: String, pin: String },
    #[error("net `{net}` is used but never declared")]
    UndeclaredNet { net: String },
    #[error("net `{net}` declared twice")]
    DuplicateNet { net: String },
    #[error("instance name `{instance}` declared twice")]
    DuplicateInstance { instance: String },
    #[error("net `{net}` has multiple drivers: {first} and {second}")]
    MultiplyDriven {
        net: String,
        first: String,
        second: String,
    },
    #[error("net `{net}` has no driver")]
    UndrivenNet { net: String },
    #[error("flip-flop clock pins are bound to different nets (`{first}` and `{second}`)")]
    MultipleClocks { first: String, second: String },
    #[error("clock net `{net}` must be an input port")]
    ClockNotInput { net: String },
    #[error("clock net `{net}` may only drive DFF clock pins")]
    ClockUsedAsData { net: String },
    #[error("port `{port}` listed in module header but never declared")]
    UndeclaredPort { port: String },
    #[error("invalid json netlist: {0}")]
    Json(String),
}

/// Primitive cell library.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum CellKind {
    And2,
    Or2,
    Nand2,
    Nor2,
    Xor2,
    Xnor2,
    Not,
    Buf,
    Mux2,
    Dff,
}

impl CellKind {
    pub const ALL: [CellKind; 10] = [
        CellKind::And2,
        CellKind::Or2,
        CellKind::Nand2,
        CellKind::Nor2,
        CellKind::Xor2,
        CellKind::Xnor2,
        CellKind::Not,
        CellKind::Buf,
        CellKind::Mux2,
        CellKind::Dff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CellKind::And2 => "AND2",
            CellKind::Or2 => "OR2",
            CellKind::Nand2 => "NAND2",
            CellKind::Nor2 => "NOR2",
            CellKind::Xor2 => "XOR2",
            CellKind::Xnor2 => "XNOR2",
            CellKind::Not => "NOT",
            CellKind::Buf => "BUF",
            CellKind::Mux2 => "MUX2",
            CellKind::Dff => "DFF",
        }
    }

    /// Input pins in canonical order. For `MUX2` the output is `S ? B : A`.
    /// For `DFF` the inputs are `D` and `CLK`.
    pub fn input_pins(self) -> &'static [&'static str] {
        match self {
            CellKind::Not | CellKind::Buf => &["A"],
            CellKind::Mux2 => &["A", "B", "S"],
            CellKind::Dff => &["D", "CLK"],
            _ => &["A", "B"],
        }
    }

    pub fn output_pin(self) -> &'static str {
        match self {
            CellKind::Dff => "Q",
            _ => "Y",
        }
    }

    /// Number of data inputs (the DFF clock is not counted).
    pub fn arity(self) -> usize {
        match self {
            CellKind::Dff => 1,
            k => k.input_pins().len(),
        }
    }

    pub fn is_sequential(self) -> bool {
        self == CellKind::Dff
    }

    /// All pins, inputs first, output last.
    pub fn pins(self) -> impl Iterator<Item = &'static str> {
        self.input_pins()
            .iter()
            .copied()
            .chain(std::iter::once(self.output_pin()))
    }

    /// Evaluates a combinational cell. `inputs` follows [`CellKind::input_pins`].
    pub fn eval(self, inputs: &[bool]) -> bool {
        match self {
            CellKind::And2 => inputs[0] & inputs[1],
            CellKind::Or2 => inputs[0] | inputs[1],
            CellKind::Nand2 => !(inputs[0] & inputs[1]),
            CellKind::Nor2 => !(inputs[0] | inputs[1]),
            CellKind::Xor2 => inputs[0] ^ inputs[1],
            CellKind::Xnor2 => !(inputs[0] ^ inputs[1]),
            CellKind::Not => !inputs[0],
            CellKind::Buf => inputs[0],
            CellKind::Mux2 => {
                if inputs[2] {
                    inputs[1]
                } else {
                    inputs[0]
                }
            }
            CellKind::Dff => inputs[0],
        }
    }
}

impl fmt::Display for CellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CellKind {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CellKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortDirection {
    Input,
    Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NetId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Port {
    pub name: String,
    pub direction: PortDirection,
    /// Net carrying the port value; ports and nets share a namespace.
    pub net: NetId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub name: String,
    pub kind: CellKind,
    /// Input nets in [`CellKind::input_pins`] order.
    pub inputs: Vec<NetId>,
    pub output: NetId,
}

impl Cell {
    /// Net bound to `pin`, if the pin exists on this cell kind.
    pub fn pin(&self, pin: &str) -> Option<NetId> {
        if pin == self.kind.output_pin() {
            return Some(self.output);
        }
        self.kind
            .input_pins()
            .iter()
            .position(|p| *p == pin)
            .map(|i| self.inputs[i])
    }
}

/// Who drives a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Driver {
    Port(usize),
    Cell(usize),
}

/// A reader of a net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sink {
    Port(usize),
    /// `(cell index, input pin index)`.
    CellPin(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    pub name: String,
    pub ports: Vec<Port>,
    pub nets: Vec<String>,
    pub cells: Vec<Cell>,
    /// DFF cell indices in source order.
    flipflop_cells: Vec<usize>,
    /// Shared clock net of all DFFs, if any DFF exists.
    clock: Option<NetId>,
    drivers: Vec<Driver>,
    sinks: Vec<Vec<Sink>>,
}

/// Unelaborated netlist as produced by the front ends: names only.
#[derive(Debug, Clone, Default)]
pub(crate) struct RawNetlist {
    pub name: String,
    pub ports: Vec<(String, PortDirection)>,
    pub wires: Vec<String>,
    pub cells: Vec<RawCell>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawCell {
    pub name: String,
    pub kind: String,
    pub pins: Vec<(String, String)>,
}

impl RawNetlist {
    pub(crate) fn elaborate(self) -> Result<Netlist, NetlistError> {
        let mut net_index: HashMap<String, NetId> = HashMap::new();
        let mut nets = Vec::new();
        let mut declare = |name: &str, nets: &mut Vec<String>| -> Result<NetId, NetlistError> {
            if net_index.contains_key(name) {
                return Err(NetlistError::DuplicateNet {
                    net: name.to_string(),
                });
            }
            let id = NetId(nets.len());
            nets.push(name.to_string());
            net_index.insert(name.to_string(), id);
            Ok(id)
        };

        let mut ports = Vec::with_capacity(self.ports.len());
        for (name, direction) in &self.ports {
            let net = declare(name, &mut nets)?;
            ports.push(Port {
                name: name.clone(),
                direction: *direction,
                net,
            });
        }
        for w in &self.wires {
            declare(w, &mut nets)?;
        }

        let mut seen_cells = HashMap::new();
        let mut cells = Vec::with_capacity(self.cells.len());
        for raw in self.cells {
            if seen_cells.insert(raw.name.clone(), ()).is_some() {
                return Err(NetlistError::DuplicateInstance { instance: raw.name });
            }
            let kind: CellKind =
                raw.kind
                    .parse()
                    .map_err(|_| NetlistError::UnknownCellKind {
                        instance: raw.name.clone(),
                        kind: raw.kind.clone(),
                    })?;
            let mut bound: Vec<Option<NetId>> = vec![None; kind.pins().count()];
            for (pin, net) in &raw.pins {
                let slot = kind.pins().position(|p| p == pin).ok_or_else(|| {
                    NetlistError::UnknownPin {
                        instance: raw.name.clone(),
                        kind,
                        pin: pin.clone(),
                    }
                })?;
                if bound[slot].is_some() {
                    return Err(NetlistError::DuplicatePin {
                        instance: raw.name.clone(),
                        pin: pin.clone(),
                    });
                }
                let id = *net_index
                    .get(net)
                    .ok_or_else(|| NetlistError::UndeclaredNet { net: net.clone() })?;
                bound[slot] = Some(id);
            }
            let mut resolved = Vec::with_capacity(bound.len());
            for (slot, pin) in bound.into_iter().zip(kind.pins()) {
                resolved.push(slot.ok_or_else(|| NetlistError::UnboundPin {
                    instance: raw.name.clone(),
                    kind,
                    pin: pin.to_string(),
                })?);
            }
            let output = resolved.pop().expect("every kind has an output pin");
            cells.push(Cell {
                name: raw.name,
                kind,
                inputs: resolved,
                output,
            });
        }

        Netlist::from_parts(self.name, ports, nets, cells)
    }
}

impl Netlist {
    fn from_parts(
        name: String,
        ports: Vec<Port>,
        nets: Vec<String>,
        cells: Vec<Cell>,
    ) -> Result<Netlist, NetlistError> {
        let describe = |d: Driver| match d {
            Driver::Port(i) => format!("input port `{}`", ports[i].name),
            Driver::Cell(i) => format!("cell `{}`", cells[i].name),
        };

        let mut drivers: Vec<Option<Driver>> = vec![None; nets.len()];
        let mut assign = |net: NetId, d: Driver| -> Result<(), NetlistError> {
            match drivers[net.0] {
                Some(prev) => Err(NetlistError::MultiplyDriven {
                    net: nets[net.0].clone(),
                    first: describe(prev),
                    second: describe(d),
                }),
                None => {
                    drivers[net.0] = Some(d);
                    Ok(())
                }
            }
        };
        for (i, p) in ports.iter().enumerate() {
            if p.direction == PortDirection::Input {
                assign(p.net, Driver::Port(i))?;
            }
        }
        for (i, c) in cells.iter().enumerate() {
            assign(c.output, Driver::Cell(i))?;
        }

        let mut sinks: Vec<Vec<Sink>> = vec![Vec::new(); nets.len()];
        for (i, p) in ports.iter().enumerate() {
            if p.direction == PortDirection::Output {
                sinks[p.net.0].push(Sink::Port(i));
            }
        }
        for (ci, c) in cells.iter().enumerate() {
            for (pi, n) in c.inputs.iter().enumerate() {
                sinks[n.0].push(Sink::CellPin(ci, pi));
            }
        }

        let drivers = drivers
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| NetlistError::UndrivenNet {
                    net: nets[i].clone(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;

        let flipflop_cells: Vec<usize> = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| c.kind.is_sequential())
            .map(|(i, _)| i)
            .collect();

        let mut clock: Option<NetId> = None;
        for &ci in &flipflop_cells {
            let clk = cells[ci].inputs[1];
            match clock {
                None => clock = Some(clk),
                Some(prev) if prev != clk => {
                    return Err(NetlistError::MultipleClocks {
                        first: nets[prev.0].clone(),
                        second: nets[clk.0].clone(),
                    })
                }
                _ => {}
            }
        }
        if let Some(clk) = clock {
            if !matches!(drivers[clk.0], Driver::Port(_)) {
                return Err(NetlistError::ClockNotInput {
                    net: nets[clk.0].clone(),
                });
            }
            let data_use = sinks[clk.0].iter().any(|s| match *s {
                Sink::Port(_) => true,
                Sink::CellPin(ci, pi) => !(cells[ci].kind.is_sequential() && pi == 1),
            });
            if data_use {
                return Err(NetlistError::ClockUsedAsData {
                    net: nets[clk.0].clone(),
                });
            }
        }

        Ok(Netlist {
            name,
            ports,
            nets,
            cells,
            flipflop_cells,
            clock,
            drivers,
            sinks,
        })
    }

    /// Flip-flop instance names in source order.
    pub fn list_flipflops(&self) -> Vec<&str> {
        self.flipflop_cells
            .iter()
            .map(|&i| self.cells[i].name.as_str())
            .collect()
    }

    /// Cell indices of the flip-flops, in source order.
    pub fn flipflop_cells(&self) -> &[usize] {
        &self.flipflop_cells
    }

    pub fn clock(&self) -> Option<NetId> {
        self.clock
    }

    /// Port index of the clock input, if the design has flip-flops.
    pub fn clock_port(&self) -> Option<usize> {
        self.clock.map(|n| match self.drivers[n.0] {
            Driver::Port(p) => p,
            Driver::Cell(_) => unreachable!("clock validated as input port"),
        })
    }

    pub fn driver(&self, net: NetId) -> Driver {
        self.drivers[net.0]
    }

    pub fn sinks(&self, net: NetId) -> &[Sink] {
        &self.sinks[net.0]
    }

    /// Input ports that carry data, i.e. every input except the clock, in
    /// declaration order.
    pub fn data_inputs(&self) -> Vec<usize> {
        let clk = self.clock_port();
        self.ports
            .iter()
            .enumerate()
            .filter(|(i, p)| p.direction == PortDirection::Input && Some(*i) != clk)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn outputs(&self) -> Vec<usize> {
        self.ports
            .iter()
            .enumerate()
            .filter(|(_, p)| p.direction == PortDirection::Output)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn cell_index(&self, name: &str) -> Option<usize> {
        self.cells.iter().position(|c| c.name == name)
    }

    pub fn net_name(&self, id: NetId) -> &str {
        &self.nets[id.0]
    }
}

/// Input syntax accepted by [`parse_netlist`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetlistFormat {
    Verilog,
    Json,
}

impl NetlistFormat {
    /// Picks the format from a file extension; anything but `.json` is
    /// treated as structural Verilog.
    pub fn from_path(path: &std::path::Path) -> NetlistFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => NetlistFormat::Json,
            _ => NetlistFormat::Verilog,
        }
    }
}

pub fn parse_netlist(source: &str, format: NetlistFormat) -> Result<Netlist, NetlistError> {
    match format {
        NetlistFormat::Verilog => verilog::parse(source),
        NetlistFormat::Json => json::parse(source),
    }
}
