//! Spectral snapshot files.
//!
//! A snapshot is a header `(M, alpha, gamma, nu, t)` followed by one record
//! `(n1, n2, re, im)` per nonzero coefficient on the lexicographically positive
//! half-plane (`n1 > 0`, or `n1 == 0 && n2 > 0`), sorted by `(n1, n2)`.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! i32 M | f64 alpha | f64 gamma | f64 nu | f64 t | i32 count | count x (i32 n1, i32 n2, f64 re, f64 im)
//! ```
//!
//! CSV mirror:
//!
//! ```text
//! M,alpha,gamma,nu,t
//! <M>,<alpha>,<gamma>,<nu>,<t>
//! n1,n2,re,im
//! <one line per record>
//! ```

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{SpectralField, Wavenumber};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub grid_size: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub nu: f64,
    pub t: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub field: SpectralField,
}

impl Snapshot {
    pub fn new(field: SpectralField, alpha: f64, gamma: f64, nu: f64, t: f64) -> Self {
        Snapshot {
            header: SnapshotHeader {
                grid_size: field.grid_size(),
                alpha,
                gamma,
                nu,
                t,
            },
            field,
        }
    }

    pub fn write_binary(&self, mut w: impl Write) -> io::Result<()> {
        let h = &self.header;
        let records = self.field.half_spectrum();
        w.write_all(&(h.grid_size as i32).to_le_bytes())?;
        for v in [h.alpha, h.gamma, h.nu, h.t] {
            w.write_all(&v.to_le_bytes())?;
        }
        w.write_all(&(records.len() as i32).to_le_bytes())?;
        for (n, c) in records {
            w.write_all(&(n.n1 as i32).to_le_bytes())?;
            w.write_all(&(n.n2 as i32).to_le_bytes())?;
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        fn i32_le(r: &mut impl Read) -> io::Result<i32> {
            let mut b = [0u8; 4];
            r.read_exact(&mut b)?;
            Ok(i32::from_le_bytes(b))
        }
        fn f64_le(r: &mut impl Read) -> io::Result<f64> {
            let mut b = [0u8; 8];
            r.read_exact(&mut b)?;
            Ok(f64::from_le_bytes(b))
        }
        let m = i32_le(&mut r)?;
        if m <= 0 {
            return Err(Error::OddGrid(0));
        }
        let header = SnapshotHeader {
            grid_size: m as usize,
            alpha: f64_le(&mut r)?,
            gamma: f64_le(&mut r)?,
            nu: f64_le(&mut r)?,
            t: f64_le(&mut r)?,
        };
        let count = i32_le(&mut r)?.max(0) as usize;
        let mut modes = Vec::with_capacity(count);
        for _ in 0..count {
            let n1 = i32_le(&mut r)? as i64;
            let n2 = i32_le(&mut r)? as i64;
            let re = f64_le(&mut r)?;
            let im = f64_le(&mut r)?;
            modes.push((Wavenumber::new(n1, n2), Complex64::new(re, im)));
        }
        Self::assemble(header, &modes)
    }

    pub fn write_csv(&self, mut w: impl Write) -> io::Result<()> {
        let h = &self.header;
        writeln!(w, "M,alpha,gamma,nu,t")?;
        writeln!(w, "{},{},{},{},{}", h.grid_size, h.alpha, h.gamma, h.nu, h.t)?;
        writeln!(w, "n1,n2,re,im")?;
        for (n, c) in self.field.half_spectrum() {
            writeln!(w, "{},{},{},{}", n.n1, n.n2, c.re, c.im)?;
        }
        Ok(())
    }

    pub fn read_csv(text: &str) -> Result<Self> {
        let bad = |reason: String| Error::Format {
            path: "<csv>".into(),
            reason,
        };
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("M,alpha,gamma,nu,t") {
            return Err(bad("missing header line".into()));
        }
        let values: Vec<&str> = lines
            .next()
            .ok_or_else(|| bad("missing header values".into()))?
            .split(',')
            .collect();
        if values.len() != 5 {
            return Err(bad("header needs 5 values".into()));
        }
        let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(format!("{s}: {e}")));
        let header = SnapshotHeader {
            grid_size: values[0]
                .trim()
                .parse()
                .map_err(|e| bad(format!("M: {e}")))?,
            alpha: num(values[1])?,
            gamma: num(values[2])?,
            nu: num(values[3])?,
            t: num(values[4])?,
        };
        if lines.next().map(str::trim) != Some("n1,n2,re,im") {
            return Err(bad("missing record header".into()));
        }
        let mut modes = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 4 {
                return Err(bad(format!("bad record: {line}")));
            }
            let int = |s: &str| s.trim().parse::<i64>().map_err(|e| bad(format!("{s}: {e}")));
            modes.push((
                Wavenumber::new(int(f[0])?, int(f[1])?),
                Complex64::new(num(f[2])?, num(f[3])?),
            ));
        }
        Self::assemble(header, &modes)
    }

    fn assemble(header: SnapshotHeader, modes: &[(Wavenumber, Complex64)]) -> Result<Self> {
        if let Some((n, _)) = modes.iter().find(|(n, _)| !n.is_lex_positive()) {
            return Err(Error::Format {
                path: "<snapshot>".into(),
                reason: format!("record ({}, {}) is not on the positive half-plane", n.n1, n.n2),
            });
        }
        let field = SpectralField::from_modes(header.grid_size, modes)?;
        Ok(Snapshot { header, field })
    }

    pub fn save(&self, bin_path: &Path, csv_path: &Path) -> Result<()> {
        let mut bin = Vec::new();
        self.write_binary(&mut bin)?;
        fs::write(bin_path, bin)?;
        let mut csv = Vec::new();
        self.write_csv(&mut csv)?;
        fs::write(csv_path, csv)?;
        Ok(())
    }

    pub fn load_binary(path: &Path) -> Result<Self> {
        let bytes = fs::read(path)?;
        Self::read_binary(bytes.as_slice()).map_err(|e| match e {
            Error::Io(io) => Error::Format {
                path: path.to_owned(),
                reason: io.to_string(),
            },
            other => other,
        })
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        Self::read_csv(&fs::read_to_string(path)?)
    }
}
