//! Export in the CPLEX LP text format.
//!
//! Layout: `Minimize`, ` obj: ...`, `Subject To`, one ` name: ... op rhs` line
//! per row, `Bounds`, then `General` and `Binary` sections and `End`. Terms are
//! written as `+ c x` or `- c x` with coefficients in shortest round-trip form.
//! Names are sanitized to `[A-Za-z0-9_.]` and prefixed with `x`/`r` plus the
//! index so they stay unique.

use std::fmt::Write;

use super::model::{LinearProgram, Sense, VarKind};
use crate::scalar::Scalar;

fn sanitize(prefix: char, idx: usize, name: &str) -> String {
    let clean: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' })
        .collect();
    if clean.is_empty() {
        format!("{prefix}{idx}")
    } else {
        format!("{prefix}{idx}_{clean}")
    }
}

fn term(out: &mut String, c: f64, name: &str) {
    if c < 0.0 {
        let _ = write!(out, " - {} {}", -c, name);
    } else {
        let _ = write!(out, " + {} {}", c, name);
    }
}

pub fn write_lp_format<S: Scalar>(lp: &LinearProgram<S>) -> String {
    let names: Vec<String> = lp
        .vars
        .iter()
        .enumerate()
        .map(|(j, v)| sanitize('x', j, &v.name))
        .collect();
    let mut out = String::from("Minimize\n obj:");
    let mut any = false;
    for (j, c) in lp.objective.iter().enumerate() {
        if !c.is_zero() {
            term(&mut out, c.to_f64(), &names[j]);
            any = true;
        }
    }
    if !any {
        out.push_str(" 0");
    }
    out.push_str("\nSubject To\n");
    for (i, con) in lp.constraints.iter().enumerate() {
        let _ = write!(out, " {}:", sanitize('r', i, &con.name));
        if con.coeffs.is_empty() {
            out.push_str(" 0 x0");
        }
        for (v, c) in &con.coeffs {
            term(&mut out, c.to_f64(), &names[v.0]);
        }
        let op = match con.sense {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        };
        let _ = writeln!(out, " {} {}", op, con.rhs.to_f64());
    }
    out.push_str("Bounds\n");
    for (j, v) in lp.vars.iter().enumerate() {
        let default_binary = matches!((&v.lower, &v.upper), (Some(l), Some(u)) if l.is_zero() && u.is_one());
        if v.kind == VarKind::Binary && default_binary {
            continue;
        }
        match (&v.lower, &v.upper) {
            (None, None) => {
                let _ = writeln!(out, " {} free", names[j]);
            }
            (Some(lo), None) => {
                if !lo.is_zero() {
                    let _ = writeln!(out, " {} >= {}", names[j], lo.to_f64());
                }
            }
            (None, Some(hi)) => {
                let _ = writeln!(out, " -inf <= {} <= {}", names[j], hi.to_f64());
            }
            (Some(lo), Some(hi)) => {
                let _ = writeln!(out, " {} <= {} <= {}", lo.to_f64(), names[j], hi.to_f64());
            }
        }
    }
    let generals: Vec<&str> = lp
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Integer)
        .map(|(j, _)| names[j].as_str())
        .collect();
    if !generals.is_empty() {
        let _ = writeln!(out, "General\n {}", generals.join(" "));
    }
    let binaries: Vec<&str> = lp
        .vars
        .iter()
        .enumerate()
        .filter(|(_, v)| v.kind == VarKind::Binary)
        .map(|(j, _)| names[j].as_str())
        .collect();
    if !binaries.is_empty() {
        let _ = writeln!(out, "Binary\n {}", binaries.join(" "));
    }
    out.push_str("End\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_model_text() {
        let mut lp = LinearProgram::<f64>::new();
        let x = lp.add_integer("n", 0.0, None);
        let y = lp.add_binary("d e");
        lp.set_objective(x, 2.5);
        lp.add_constraint("cover", [(x, 1.0), (y, -1.0)], Sense::Ge, 1.0);
        let text = write_lp_format(&lp);
        assert_eq!(
            text,
            "Minimize\n obj: + 2.5 x0_n\nSubject To\n r0_cover: + 1 x0_n - 1 x1_d_e >= 1\n\
             Bounds\nGeneral\n x0_n\nBinary\n x1_d_e\nEnd\n"
        );
    }

    #[test]
    fn fixed_binary_keeps_its_bounds() {
        let mut lp = LinearProgram::<f64>::new();
        let b = lp.add_binary("b");
        lp.set_bounds(b, Some(1.0), Some(1.0));
        assert!(write_lp_format(&lp).contains("Bounds\n 1 <= x0_b <= 1\n"));
    }
}
