use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::gdp::{MilpModel, Sense, VarKind};

/// Column names: `x{j}` for continuous and `y{j}` for binary column `j`.
fn column_name(model: &MilpModel, j: usize) -> String {
    match model.vars[j].kind {
        VarKind::Continuous => format!("x{j}"),
        VarKind::Binary => format!("y{j}"),
    }
}

/// Free-format MPS text. Rows are `r{i}` in model order, the objective row
/// is `obj`, and each run of binary columns sits between integer markers.
pub fn mps_string(model: &MilpModel) -> String {
    let n = model.vars.len();
    let mut column_entries: Vec<Vec<(String, f64)>> = vec![Vec::new(); n];
    for &(c, a) in &model.objective {
        column_entries[c.0].push(("obj".into(), a));
    }
    for (i, r) in model.rows.iter().enumerate() {
        for &(c, a) in r.row.terms() {
            column_entries[c.0].push((format!("r{i}"), a));
        }
    }

    let mut out = String::new();
    let name: String = model.name.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
    let _ = writeln!(out, "NAME {}", if name.is_empty() { "model" } else { &name });
    out.push_str("ROWS\n N obj\n");
    for (i, r) in model.rows.iter().enumerate() {
        let tag = match r.row.sense {
            Sense::Le => "L",
            Sense::Ge => "G",
            Sense::Eq => "E",
        };
        let _ = writeln!(out, " {tag} r{i}");
    }
    out.push_str("COLUMNS\n");
    let mut in_block = false;
    let mut markers = 0;
    for (j, entries) in column_entries.iter().enumerate() {
        let binary = model.vars[j].kind == VarKind::Binary;
        if binary != in_block {
            let kind = if binary { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, " MARKER{markers} 'MARKER' '{kind}'");
            markers += 1;
            in_block = binary;
        }
        let col = column_name(model, j);
        if entries.is_empty() {
            let _ = writeln!(out, " {col} obj 0");
        }
        for (row, a) in entries {
            let _ = writeln!(out, " {col} {row} {a}");
        }
    }
    if in_block {
        let _ = writeln!(out, " MARKER{markers} 'MARKER' 'INTEND'");
    }
    out.push_str("RHS\n");
    for (i, r) in model.rows.iter().enumerate() {
        if r.row.rhs != 0.0 {
            let _ = writeln!(out, " RHS r{i} {}", r.row.rhs);
        }
    }
    out.push_str("BOUNDS\n");
    for (j, v) in model.vars.iter().enumerate() {
        let col = column_name(model, j);
        let _ = writeln!(out, " LO BND {col} {}", v.lower);
        let _ = writeln!(out, " UP BND {col} {}", v.upper);
    }
    out.push_str("ENDATA\n");
    out
}

pub fn write_mps(model: &MilpModel, w: &mut impl io::Write) -> io::Result<()> {
    w.write_all(mps_string(model).as_bytes())
}

pub fn export_mps(model: &MilpModel, path: impl AsRef<Path>) -> io::Result<()> {
    fs::write(path, mps_string(model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gdp::{LinRow, Pass, RowOrigin};

    #[test]
    fn one_variable_lp() {
        let mut m = MilpModel::new("box", Pass::BigM);
        let x = m.add_continuous("x", 3.0, 10.0);
        m.objective = vec![(x, 1.0)];
        let text = mps_string(&m);
        assert_eq!(
            text,
            "NAME box\nROWS\n N obj\nCOLUMNS\n x0 obj 1\nRHS\nBOUNDS\n LO BND x0 3\n UP BND x0 10\nENDATA\n"
        );
    }

    #[test]
    fn binaries_are_bracketed() {
        let mut m = MilpModel::new("mixed", Pass::BigM);
        let x = m.add_continuous("x", 0.0, 5.0);
        let y = m.add_binary("y");
        m.add_row(LinRow::le([(x, 1.0), (y, -5.0)], 0.0), RowOrigin::Global { index: 0 });
        m.add_row(LinRow::ge([(x, 1.0)], 1.0), RowOrigin::Global { index: 1 });
        let text = mps_string(&m);
        assert!(text.contains(" L r0\n G r1\n"));
        assert!(text.contains(" MARKER0 'MARKER' 'INTORG'\n y1 r0 -5\n MARKER1 'MARKER' 'INTEND'\n"));
        assert!(text.contains(" RHS r1 1\n") && !text.contains(" RHS r0"));
        assert!(text.contains(" x0 r0 1\n x0 r1 1\n"));
    }
}
