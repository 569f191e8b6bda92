use std::io::{self, Write};

use serde_json::{json, Value};

use super::RunTrace;
use crate::report::fmt_f64;

pub const TRACE_CSV_HEADER: &str =
    "k,phase,e_row,e_col,e_total,psi,kl_mu_row,kl_nu_col,kl_row_mu,kl_col_nu";

/// One CSV row per iteration; floats carry 17 significant digits.
pub fn write_trace_csv<W: Write>(t: &RunTrace, mut w: W) -> io::Result<()> {
    writeln!(w, "{TRACE_CSV_HEADER}")?;
    for r in &t.records {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            r.k,
            r.phase,
            fmt_f64(r.e_row),
            fmt_f64(r.e_col),
            fmt_f64(r.e_total),
            fmt_f64(r.psi),
            fmt_f64(r.kl_mu_row),
            fmt_f64(r.kl_nu_col),
            fmt_f64(r.kl_row_mu),
            fmt_f64(r.kl_col_nu),
        )?;
    }
    Ok(())
}

/// Sidecar document holding the potentials stored at the configured stride.
pub fn potentials_document(t: &RunTrace) -> Value {
    let iterates: Vec<Value> = t
        .records
        .iter()
        .filter_map(|r| {
            r.potentials
                .as_ref()
                .map(|pot| json!({"k": r.k, "f": pot.f, "g": pot.g}))
        })
        .collect();
    json!({
        "stride": t.config.record_every,
        "iterates": iterates,
        "final": {"f": t.final_potentials.f, "g": t.final_potentials.g},
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sinkhorn::{run, RunConfig};
    use crate::testing::soules;

    #[test]
    fn csv_layout() {
        let t = run(&soules(), &RunConfig::with_max_iters(3));
        let mut buf = Vec::new();
        write_trace_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], TRACE_CSV_HEADER);
        assert_eq!(lines.len(), 4);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells.len(), 10);
        assert_eq!(&cells[..2], &["1", "row-update"]);
        assert_eq!(cells[4].parse::<f64>().unwrap(), t.records[0].e_total);
    }

    #[test]
    fn sidecar_respects_stride() {
        let cfg = RunConfig {
            max_iters: 5,
            record_every: 2,
            ..RunConfig::default()
        };
        let doc = potentials_document(&run(&soules(), &cfg));
        assert_eq!(doc["iterates"].as_array().unwrap().len(), 2);
        assert_eq!(doc["iterates"][1]["k"], 4);
    }
}
