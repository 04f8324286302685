//! Confidence curves for μx, μy and the ratio μx/μy from one observation
//! (x, y) = (2, 1) of two independent unit-variance normals.
//!
//! Writes one CSV per curve into the directory named by `FIELLER_OUT`
//! (default: the system temp directory) and prints confidence sets. The
//! ratio curve is Fieller's: at 95% its set is the complement of a bounded
//! interval.

use im_core::confcurve::{linspace, two_normal_curve, Functional};
use std::fmt::Write as _;
use std::path::PathBuf;

pub fn run_example() -> im_core::Result<()> {
    let dir: PathBuf = std::env::var_os("FIELLER_OUT").map_or_else(std::env::temp_dir, PathBuf::from);
    let (x, y) = (2.0, 1.0);
    for (name, f) in [("mu_x", Functional::MuX), ("mu_y", Functional::MuY), ("ratio", Functional::Ratio)] {
        let cc = two_normal_curve(f, x, y, linspace(-10.0, 10.0, 2001))?;
        let mut csv = String::from("theta,cc\n");
        for (t, c) in cc.grid().iter().zip(cc.values()) {
            let _ = writeln!(csv, "{t},{c}");
        }
        let path = dir.join(format!("fieller_{name}.csv"));
        std::fs::write(&path, csv)?;
        println!("{name}: minimum at {:.4}, written to {}", cc.minimizer(), path.display());
        for alpha in [0.5, 0.8, 0.95] {
            println!("  {alpha:.2}: {}", cc.confidence_set(alpha)?);
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> im_core::Result<()> {
    run_example()
}
