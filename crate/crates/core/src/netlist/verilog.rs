// SPDX-License-Identifier: Apache-2.0

//! Structural Verilog subset.
//!
//! ```text
//! module   := "module" IDENT [ "(" header ")" ] ";" item* "endmodule"
//! header   := [ port { "," port } ]
//! port     := [ ("input" | "output") [ "wire" ] ] IDENT
//! item     := ("input" | "output") [ "wire" ] ident_list ";"
//!           | "wire" ident_list ";"
//!           | KIND IDENT "(" [ conn { "," conn } ] ")" ";"
//! conn     := "." PIN "(" IDENT ")"
//! ```
//!
//! `//` line comments and `/* */` block comments are skipped. Only
//! named-port instantiation of the built-in cell kinds is accepted.

use super::{Netlist, NetlistError, PortDirection, Pos, RawCell, RawNetlist};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn syntax(pos: Pos, msg: impl Into<String>) -> NetlistError {
    NetlistError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, Pos)>, NetlistError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);

    macro_rules! bump {
        () => {{
            if bytes[i] == b'\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    while i < bytes.len() {
        let c = bytes[i];
        let pos = Pos { line, col };
        if c.is_ascii_whitespace() {
            bump!();
        } else if c == b'/' && bytes.get(i + 1) == Some(&b'/') {
            while i < bytes.len() && bytes[i] != b'\n' {
                bump!();
            }
        } else if c == b'/' && bytes.get(i + 1) == Some(&b'*') {
            bump!();
            bump!();
            loop {
                if i >= bytes.len() {
                    return Err(syntax(pos, "unterminated block comment"));
                }
                if bytes[i] == b'*' && bytes.get(i + 1) == Some(&b'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$')
            {
                bump!();
            }
            out.push((Tok::Ident(src[start..i].to_string()), pos));
        } else {
            let t = match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b',' => Tok::Comma,
                b';' => Tok::Semi,
                b'.' => Tok::Dot,
                _ => {
                    let ch = src[i..].chars().next().unwrap_or('?');
                    return Err(syntax(pos, format!("unexpected character `{ch}`")));
                }
            };
            out.push((t, pos));
            bump!();
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

const KEYWORDS: [&str; 5] = ["module", "endmodule", "input", "output", "wire"];

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), NetlistError> {
        let (t, pos) = self.next();
        if t == want {
            Ok(())
        } else {
            Err(syntax(
                pos,
                format!("expected {}, found {}", want.describe(), t.describe()),
            ))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), NetlistError> {
        let (t, pos) = self.next();
        match t {
            Tok::Ident(ref s) if s == kw => Ok(()),
            other => Err(syntax(
                pos,
                format!("expected `{kw}`, found {}", other.describe()),
            )),
        }
    }

    fn ident(&mut self) -> Result<String, NetlistError> {
        let (t, pos) = self.next();
        match t {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => Ok(s),
            other => Err(syntax(
                pos,
                format!("expected identifier, found {}", other.describe()),
            )),
        }
    }

    fn at_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn direction(&self) -> Option<PortDirection> {
        if self.at_ident("input") {
            Some(PortDirection::Input)
        } else if self.at_ident("output") {
            Some(PortDirection::Output)
        } else {
            None
        }
    }

    fn ident_list(&mut self) -> Result<Vec<String>, NetlistError> {
        let mut names = vec![self.ident()?];
        while *self.peek() == Tok::Comma {
            self.next();
            names.push(self.ident()?);
        }
        self.expect(Tok::Semi)?;
        Ok(names)
    }

    fn module(&mut self) -> Result<RawNetlist, NetlistError> {
        self.keyword("module")?;
        let mut raw = RawNetlist {
            name: self.ident()?,
            ..RawNetlist::default()
        };

        let mut header: Vec<(String, Pos)> = Vec::new();
        if *self.peek() == Tok::LParen {
            self.next();
            if *self.peek() != Tok::RParen {
                let mut ansi: Option<PortDirection> = None;
                loop {
                    if let Some(d) = self.direction() {
                        self.next();
                        if self.at_ident("wire") {
                            self.next();
                        }
                        ansi = Some(d);
                    }
                    let pos = self.pos();
                    let name = self.ident()?;
                    match ansi {
                        Some(d) => raw.ports.push((name, d)),
                        None => header.push((name, pos)),
                    }
                    if *self.peek() == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen)?;
        }
        self.expect(Tok::Semi)?;

        loop {
            if self.at_ident("endmodule") {
                self.next();
                break;
            }
            if *self.peek() == Tok::Eof {
                return Err(syntax(self.pos(), "missing `endmodule`"));
            }
            if let Some(d) = self.direction() {
                self.next();
                if self.at_ident("wire") {
                    self.next();
                }
                for name in self.ident_list()? {
                    raw.ports.push((name, d));
                }
            } else if self.at_ident("wire") {
                self.next();
                for name in self.ident_list()? {
                    // `output y; wire y;` is legal Verilog; the port already
                    // declares the net.
                    if !raw.ports.iter().any(|(p, _)| *p == name) {
                        raw.wires.push(name);
                    }
                }
            } else {
                raw.cells.push(self.instance()?);
            }
        }
        if *self.peek() != Tok::Eof {
            return Err(syntax(
                self.pos(),
                format!("unexpected {} after `endmodule`", self.peek().describe()),
            ));
        }

        for (name, _) in &header {
            if !raw.ports.iter().any(|(p, _)| p == name) {
                return Err(NetlistError::UndeclaredPort { port: name.clone() });
            }
        }
        Ok(raw)
    }

    fn instance(&mut self) -> Result<RawCell, NetlistError> {
        let kind = self.ident()?;
        let name = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut pins = Vec::new();
        if *self.peek() != Tok::RParen {
            loop {
                self.expect(Tok::Dot)?;
                let pin = self.ident()?;
                self.expect(Tok::LParen)?;
                let net = self.ident()?;
                self.expect(Tok::RParen)?;
                pins.push((pin, net));
                if *self.peek() == Tok::Comma {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Semi)?;
        Ok(RawCell { name, kind, pins })
    }
}

pub fn parse(src: &str) -> Result<Netlist, NetlistError> {
    let toks = tokenize(src)?;
    let mut p = Parser { toks, at: 0 };
    p.module()?.elaborate()
}

/// Writes a netlist back as structural Verilog in the accepted subset.
pub fn to_verilog(n: &Netlist) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let names: Vec<&str> = n.ports.iter().map(|p| p.name.as_str()).collect();
    let _ = writeln!(out, "module {}({});", n.name, names.join(", "));
    for p in &n.ports {
        let dir = match p.direction {
            PortDirection::Input => "input",
            PortDirection::Output => "output",
        };
        let _ = writeln!(out, "  {dir} {};", p.name);
    }
    let port_nets: std::collections::HashSet<_> = n.ports.iter().map(|p| p.net).collect();
    for (i, net) in n.nets.iter().enumerate() {
        if !port_nets.contains(&super::NetId(i)) {
            let _ = writeln!(out, "  wire {net};");
        }
    }
    for c in &n.cells {
        let conns: Vec<String> = c
            .kind
            .pins()
            .map(|pin| format!(".{pin}({})", n.net_name(c.pin(pin).unwrap())))
            .collect();
        let _ = writeln!(out, "  {} {}({});", c.kind, c.name, conns.join(", "));
    }
    out.push_str("endmodule\n");
    out
}
