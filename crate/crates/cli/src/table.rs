use std::io::Write;

use bubblescan::RollingStatistics;

/// `statistics.csv`: one row per return. Cells of invalid windows are empty.
pub fn write_statistics_csv<W: Write>(
    stats: &RollingStatistics,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(
        out,
        "date,U_raw,U_z,V_raw,V_z,C_raw,C_z,U_valid,V_valid,C_valid"
    )?;
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let (u, v, c) = (&stats.u, &stats.v, &stats.c);
    for t in 0..u.len() {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            u.dates[t],
            cell(u.raw[t]),
            cell(u.normalized[t]),
            cell(v.raw[t]),
            cell(v.normalized[t]),
            cell(c.raw[t]),
            cell(c.normalized[t]),
            u8::from(u.valid[t]),
            u8::from(v.valid[t]),
            u8::from(c.valid[t]),
        )?;
    }
    Ok(())
}
