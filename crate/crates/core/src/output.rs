//! CSV writers shared by the command-line tool: 17 significant digits,
//! `.` as decimal separator, LF line endings.

use std::io::{self, Write};

use crate::exact::RationalAngle;
use crate::sim::{CompareReport, TrajectoryBatch};
use crate::spectral::{AutocovRecord, BlockChain, Certificate, DivergenceScan};

/// A float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn write_autocov_csv<W: Write + ?Sized>(w: &mut W, records: &[AutocovRecord]) -> io::Result<()> {
    writeln!(w, "lag,value,block,r")?;
    for r in records {
        writeln!(w, "{},{},{},{}", r.lag, fmt_f64(r.value), opt(&r.block), opt(&r.r))?;
    }
    Ok(())
}

pub fn write_density_csv<W: Write + ?Sized>(w: &mut W, chain: &BlockChain, grid: &[RationalAngle]) -> io::Result<()> {
    use rayon::prelude::*;
    let values: Vec<f64> = grid.par_iter().map(|t| chain.density_eval(t)).collect();
    writeln!(w, "theta_p,theta_q,f")?;
    for (t, f) in grid.iter().zip(values) {
        writeln!(w, "{},{},{}", t.numer(), t.denom(), fmt_f64(f))?;
    }
    Ok(())
}

pub fn write_trajectory_csv<W: Write + ?Sized>(w: &mut W, batch: &TrajectoryBatch) -> io::Result<()> {
    writeln!(w, "replicate,t,value")?;
    for (i, path) in batch.samples.iter().enumerate() {
        for (t, v) in path.iter().enumerate() {
            writeln!(w, "{i},{t},{}", fmt_f64(*v))?;
        }
    }
    Ok(())
}

pub fn write_compare_csv<W: Write + ?Sized>(w: &mut W, report: &CompareReport) -> io::Result<()> {
    writeln!(w, "lag,theoretical,empirical_mean,empirical_se,z")?;
    for r in &report.rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.lag,
            fmt_f64(r.theoretical),
            fmt_f64(r.empirical_mean),
            fmt_f64(r.empirical_se),
            fmt_f64(r.z)
        )?;
    }
    Ok(())
}

pub fn write_certificate_csv<W: Write + ?Sized>(w: &mut W, scan: &DivergenceScan) -> io::Result<()> {
    writeln!(
        w,
        "sample,theta_p,theta_q,in_e,j,p,phi_sum,block_sum,lower_bound,dirichlet_part,holds"
    )?;
    for (i, (t, c)) in scan.rows.iter().enumerate() {
        match c {
            Certificate::NotInE => writeln!(w, "{i},{},{},false,,,,,,,", t.numer(), t.denom())?,
            Certificate::Certified(d) => writeln!(
                w,
                "{i},{},{},true,{},{},{},{},{},{},{}",
                t.numer(),
                t.denom(),
                d.j,
                d.p,
                fmt_f64(d.phi_sum),
                fmt_f64(d.block_sum),
                fmt_f64(d.lower_bound),
                fmt_f64(d.dirichlet_part),
                d.holds
            )?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(5.0), "5.0000000000000000e0");
        assert_eq!(fmt_f64(-0.1).parse::<f64>().unwrap(), -0.1);
        let x = std::f64::consts::PI / 7.0;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
    }

    #[test]
    fn autocov_rows() {
        let ch = crate::spectral::build_chain(&[], crate::SpacingRule::Standard).unwrap();
        let recs = vec![ch.gamma(&0u32.into()), ch.gamma(&7u32.into())];
        let mut out = Vec::new();
        write_autocov_csv(&mut out, &recs).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(s, "lag,value,block,r\n0,5.0000000000000000e0,,\n7,0.0000000000000000e0,,\n");
    }
}
