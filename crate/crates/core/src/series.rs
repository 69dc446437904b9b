//! Per-kick observable records and their CSV form.

use serde::{Deserialize, Serialize};
use std::io::{self, Write};

/// Time series of `<P>`, `<E>` and the norm, one entry per recorded kick.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ObservableSeries {
    pub times: Vec<u64>,
    pub p_mean: Vec<f64>,
    pub e_mean: Vec<f64>,
    pub norm: Vec<f64>,
}

impl ObservableSeries {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            p_mean: Vec::with_capacity(n),
            e_mean: Vec::with_capacity(n),
            norm: Vec::with_capacity(n),
        }
    }

    pub fn push(&mut self, t: u64, p: f64, e: f64, norm: f64) {
        debug_assert!(self.times.last().map_or(true, |&last| t > last), "times must increase");
        self.times.push(t);
        self.p_mean.push(p);
        self.e_mean.push(e);
        self.norm.push(norm);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Entry for kick index `t`, if recorded.
    pub fn at(&self, t: u64) -> Option<(f64, f64, f64)> {
        let i = self.times.iter().position(|&x| x == t)?;
        Some((self.p_mean[i], self.e_mean[i], self.norm[i]))
    }

    pub fn times_f64(&self) -> Vec<f64> {
        self.times.iter().map(|&t| t as f64).collect()
    }

    /// `t, p_mean, e_mean, norm` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,p_mean,e_mean,norm")?;
        for i in 0..self.len() {
            writeln!(
                w,
                "{},{:.16e},{:.16e},{:.16e}",
                self.times[i], self.p_mean[i], self.e_mean[i], self.norm[i]
            )?;
        }
        Ok(())
    }

    /// Classical-ensemble form: `t, e_mean` only.
    pub fn write_energy_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,e_mean")?;
        for i in 0..self.len() {
            writeln!(w, "{},{:.16e}", self.times[i], self.e_mean[i])?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_lookup() {
        let mut s = ObservableSeries::default();
        s.push(0, 1.0, 2.0, 1.0);
        s.push(1, 1.5, 2.5, 1.0);
        assert_eq!(s.len(), 2);
        assert_eq!(s.at(1), Some((1.5, 2.5, 1.0)));
        assert_eq!(s.at(7), None);
    }

    #[test]
    fn csv_round_trips_doubles() {
        let mut s = ObservableSeries::default();
        s.push(0, std::f64::consts::PI, 1.0 / 3.0, 1.0 - 1e-15);
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), std::f64::consts::PI);
        assert_eq!(fields[2].parse::<f64>().unwrap(), 1.0 / 3.0);
        assert_eq!(fields[3].parse::<f64>().unwrap(), 1.0 - 1e-15);
    }
}
