//! File formats: box JSON, scan and curve CSV.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::boxes::{Correlators, NsBox, Table};
use crate::criteria;
use crate::error::{Error, Result};
use crate::format::{fixed12, full_precision};
use crate::slices::{Curve, SliceScan};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum BoxFile {
    Table { p: Table },
    Correlators { correlators: Correlators },
}

/// Reads either the table form `{"p": ...}` (nested `x`, `y`, `a`, `b`) or
/// the correlator form `{"correlators": {"cxy", "cx", "cy"}}`.
pub fn read_box(json: &str) -> Result<NsBox> {
    let parsed: BoxFile = serde_json::from_str(json).map_err(|e| Error::Format(e.to_string()))?;
    match parsed {
        BoxFile::Table { p } => Ok(NsBox::from_table(p)),
        BoxFile::Correlators { correlators } => NsBox::from_correlators(&correlators),
    }
}

/// Writes the table form.
pub fn write_box(bx: &NsBox) -> String {
    to_json(&BoxFile::Table { p: *bx.table() })
}

/// Pretty JSON with every float in positional notation.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, DecimalFormatter::default());
    value
        .serialize(&mut ser)
        .expect("serialising in-memory values cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

#[derive(Default)]
struct DecimalFormatter {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for DecimalFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(full_precision(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.pretty.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(writer)
    }
}

pub const SCAN_HEADER: &str =
    "alpha,beta,c00,c01,c10,c11,cx0,cy0,chsh_max,tlm_margin,npa_margin,ic_quadratic,verdict";

pub fn write_scan_csv<W: Write>(scan: &SliceScan, out: &mut W) -> io::Result<()> {
    writeln!(out, "{SCAN_HEADER}")?;
    for p in &scan.points {
        let c = &p.classification;
        let q = if scan.spec.ic_symmetries {
            criteria::ic_quadratic_symmetric(&p.cf)
        } else {
            criteria::ic_quadratic(&p.cf)
        };
        let fields = [
            p.alpha,
            p.beta,
            p.cf.cxy[0][0],
            p.cf.cxy[0][1],
            p.cf.cxy[1][0],
            p.cf.cxy[1][1],
            p.cf.cx[0],
            p.cf.cy[0],
            c.chsh_max,
            c.tlm.margin,
            c.npa.margin,
            q,
        ];
        let numbers: Vec<String> = fields.iter().map(|&v| fixed12(v)).collect();
        writeln!(out, "{},{}", numbers.join(","), c.verdict.as_str())?;
    }
    Ok(())
}

pub fn write_curves_csv<W: Write>(curves: &[Curve], out: &mut W) -> io::Result<()> {
    writeln!(out, "name,alpha,beta")?;
    for curve in curves {
        for &(a, b) in &curve.points {
            writeln!(out, "{},{},{}", curve.name, fixed12(a), fixed12(b))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slices::{scan, SliceSpec};

    #[test]
    fn box_json_roundtrip() {
        let bx = NsBox::isotropic(0.61).unwrap();
        let text = write_box(&bx);
        assert!(text.starts_with("{\n  \"p\": ["));
        assert!(!text.contains('e'));
        assert_eq!(read_box(&text).unwrap(), bx);
    }

    #[test]
    fn reads_correlator_form() {
        let text = r#"{"correlators": {"cxy": [[1, 1], [1, -1]], "cx": [0, 0], "cy": [0, 0]}}"#;
        assert_eq!(read_box(text).unwrap(), NsBox::pr());
        let bad = r#"{"correlators": {"cxy": [[1, 0], [0, 0]], "cx": [1, 0], "cy": [-1, 0]}}"#;
        assert!(matches!(
            read_box(bad),
            Err(Error::NegativeProbability { .. })
        ));
        assert!(matches!(read_box("{\"q\": 1}"), Err(Error::Format(_))));
    }

    #[test]
    fn scan_csv_layout() {
        let s = scan(&SliceSpec::figure(3, 3).unwrap()).unwrap();
        let mut buf = Vec::new();
        write_scan_csv(&s, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SCAN_HEADER);
        assert_eq!(lines.len(), 1 + 6);
        assert_eq!(lines[1], "0,0,0,0,0,0,0,0,0,2,3.14159265359,0,LOCAL");
        assert!(lines.iter().skip(1).all(|l| l.split(',').count() == 13));
    }
}
