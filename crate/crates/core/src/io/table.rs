//! Sweep tables as CSV. Every rational is written twice: exactly as `p/q`
//! and as a decimal approximation in a `_dec` column.

use crate::analysis::SweepRow;
use crate::scalar::Scalar;

const DECIMALS: usize = 6;

fn push_scalar(record: &mut Vec<String>, x: &Scalar) {
    record.push(x.to_fraction_string());
    record.push(x.to_decimal_string(DECIMALS));
}

const BOUNDARY_COLUMNS: [&str; 5] =
    ["pt_threshold", "single_relay_max_dist", "wormhole_max_dist", "pt_effective_range", "pgt_threshold"];

pub fn sweep_csv(rows: &[SweepRow], swept: &[&str]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = Vec::new();
    for name in swept.iter().chain(BOUNDARY_COLUMNS.iter()) {
        header.push((*name).to_owned());
        header.push(format!("{name}_dec"));
    }
    header.extend(["pgt_vulnerable", "predicted", "attack"].map(String::from));
    w.write_record(&header).expect("in-memory write");
    for row in rows {
        let mut record = Vec::with_capacity(header.len());
        for (_, x) in &row.values {
            push_scalar(&mut record, x);
        }
        let b = &row.boundaries;
        for x in [&b.pt_threshold, &b.single_relay_max_dist, &b.wormhole_max_dist, &b.pt_effective_range, &b.pgt_threshold] {
            push_scalar(&mut record, x);
        }
        record.extend([b.pgt_vulnerable, row.predicted, row.attack].map(|f| f.to_string()));
        w.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
