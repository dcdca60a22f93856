//! Small text-output helpers shared by the table writers: full-precision
//! float formatting, trajectory CSV, and a grayscale PGM heatmap encoder.

use std::io::Write;

use crate::types::Trajectory;

/// Formats a float with 17 significant digits (scientific), enough to
/// round-trip any `f64` bit pattern through text.
pub fn fmt_g17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes a trajectory as CSV with header `t,x,y,z`.
pub fn write_trajectory_csv<W: Write>(traj: &Trajectory, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "t,x,y,z")?;
    for &(t, s) in &traj.samples {
        writeln!(
            out,
            "{},{},{},{}",
            fmt_g17(t),
            fmt_g17(s.x),
            fmt_g17(s.y),
            fmt_g17(s.z)
        )?;
    }
    Ok(())
}

/// Encodes a row-major grid of values as a binary 8-bit PGM (P5) image,
/// mapping each value through `clamp(128 + 2000 v, 0, 255)` so zero sits at
/// mid-gray and positive values brighten.
pub fn write_pgm<W: Write>(rows: &[Vec<f64>], out: &mut W) -> std::io::Result<()> {
    let height = rows.len();
    let width = rows.first().map_or(0, |r| r.len());
    assert!(
        rows.iter().all(|r| r.len() == width),
        "all heatmap rows must have equal length"
    );
    writeln!(out, "P5")?;
    writeln!(out, "{width} {height}")?;
    writeln!(out, "255")?;
    let mut pixels = Vec::with_capacity(width * height);
    for row in rows {
        for &v in row {
            let level = if v.is_finite() {
                (128.0 + 2000.0 * v).clamp(0.0, 255.0)
            } else {
                0.0
            };
            pixels.push(level as u8);
        }
    }
    out.write_all(&pixels)
}
