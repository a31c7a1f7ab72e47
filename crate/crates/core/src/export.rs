//! CSV and JSON emitters. Floats are written in shortest round-trip
//! scientific notation so identical inputs give identical bytes.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{Spectrum, SweepCell};
use crate::protocols::ProtocolTrajectory;

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("write failed: {e}"))
}

pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

/// JSON with object keys sorted, pretty-printed, newline-terminated.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json's default map is ordered by key
    let v = serde_json::to_value(value).map_err(io_err)?;
    let mut s = serde_json::to_string_pretty(&v).map_err(io_err)?;
    s.push('\n');
    Ok(s)
}

/// RFC 4180 CSV writer over any sink.
pub struct CsvSink<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> CsvSink<W> {
    pub fn new(out: W, header: &[String]) -> Result<Self> {
        let mut inner = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(out);
        inner.write_record(header).map_err(io_err)?;
        Ok(Self { inner })
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.inner.write_record(fields).map_err(io_err)
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush().map_err(io_err)
    }

    pub fn into_inner(self) -> Result<W> {
        self.inner.into_inner().map_err(io_err)
    }
}

fn to_string(sink: CsvSink<Vec<u8>>) -> Result<String> {
    String::from_utf8(sink.into_inner()?).map_err(io_err)
}

/// Trajectory table against `s = t / t_f`. `control_unit` labels the
/// control columns (`N` or `m`).
pub fn trajectory_csv(traj: &ProtocolTrajectory, control_unit: &str) -> Result<String> {
    let mut header: Vec<String> = vec![
        "s".into(),
        "t_s".into(),
        format!("lambda_{control_unit}"),
        format!("lambda_eff_{control_unit}"),
        "x0_m".into(),
        "x0_dot_m_per_s".into(),
        "x0_ddot_m_per_s2".into(),
    ];
    if traj.linear_force.is_some() {
        header.push("compensating_force_N".into());
    }
    let mut sink = CsvSink::new(Vec::new(), &header)?;
    for i in 0..traj.len() {
        let s = if traj.t_final > 0.0 { traj.times[i] / traj.t_final } else { i as f64 };
        let mut row = vec![
            fmt_f64(s),
            fmt_f64(traj.times[i]),
            fmt_f64(traj.lambda[i]),
            fmt_f64(traj.lambda_eff[i]),
            fmt_f64(traj.x0[i]),
            fmt_f64(traj.x0_dot[i]),
            fmt_f64(traj.x0_ddot[i]),
        ];
        if let Some(f) = &traj.linear_force {
            row.push(fmt_f64(f[i]));
        }
        sink.row(&row)?;
    }
    to_string(sink)
}

/// `n, energy_J, side, mass_fraction`. Delocalised states get side `both`
/// and their left-well fraction.
pub fn eigenspectrum_csv(spec: &Spectrum) -> Result<String> {
    let header: Vec<String> = ["n", "energy_J", "side", "mass_fraction"].map(String::from).to_vec();
    let mut sink = CsvSink::new(Vec::new(), &header)?;
    for (i, e) in spec.energies_si().into_iter().enumerate() {
        let (side, frac) = match &spec.labels[i] {
            Some(l) => (l.side.name(), l.mass_fraction),
            None => ("both", spec.left_fractions[i]),
        };
        sink.row([i.to_string(), fmt_f64(e), side.to_string(), fmt_f64(frac)])?;
    }
    to_string(sink)
}

/// Header for density snapshots: `t_s` then one column per position.
pub fn density_header(x_m: &[f64]) -> Vec<String> {
    std::iter::once("t_s".to_string())
        .chain(x_m.iter().map(|x| format!("x={}_m", fmt_f64(*x))))
        .collect()
}

pub fn density_row(t: f64, density_per_m: &[f64]) -> Vec<String> {
    std::iter::once(fmt_f64(t))
        .chain(density_per_m.iter().map(|d| fmt_f64(*d)))
        .collect()
}

pub const SWEEP_HEADER: [&str; 6] = [
    "protocol",
    "t_f_s",
    "fidelity",
    "excitation_energy_J",
    "excitation_energy_hbar_omega",
    "error",
];

pub fn sweep_csv(cells: &[SweepCell]) -> Result<String> {
    let header: Vec<String> = SWEEP_HEADER.map(String::from).to_vec();
    let mut sink = CsvSink::new(Vec::new(), &header)?;
    for c in cells {
        let (f, e, eh) = match &c.metrics {
            Some(m) => (
                fmt_f64(m.fidelity),
                fmt_f64(m.excitation_energy),
                fmt_f64(m.excitation_energy_hbar_omega),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        sink.row([
            c.protocol.label().to_string(),
            fmt_f64(c.t_final),
            f,
            e,
            eh,
            c.error.clone().unwrap_or_default(),
        ])?;
    }
    to_string(sink)
}

/// Gnuplot script plotting fidelity and excitation from `sweep.csv`.
pub fn sweep_gnuplot(csv_name: &str, kinds: &[&str]) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str("set logscale x\n");
    s.push_str("set xlabel 't_f (s)'\n");
    s.push_str("set multiplot layout 2,1\n");
    for (col, label) in [(3, "fidelity"), (5, "E_ex / (hbar Omega_0)")] {
        s.push_str(&format!("set ylabel '{label}'\n"));
        let parts: Vec<String> = kinds
            .iter()
            .map(|k| {
                format!(
                    "'{csv_name}' using 2:(strcol(1) eq '{k}' ? ${col} : 1/0) with linespoints title '{k}'"
                )
            })
            .collect();
        s.push_str(&format!("plot {}\n", parts.join(", \\\n     ")));
    }
    s.push_str("unset multiplot\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::RunMetrics;
    use crate::potentials::WellSide;
    use crate::protocols::ProtocolKind;
    use std::collections::BTreeMap;

    #[test]
    fn json_keys_are_sorted() {
        #[derive(Serialize)]
        struct S {
            zeta: u8,
            alpha: u8,
            mid: BTreeMap<String, u8>,
        }
        let s = to_sorted_json(&S {
            zeta: 1,
            alpha: 2,
            mid: BTreeMap::from([("b".into(), 1), ("a".into(), 2)]),
        })
        .unwrap();
        let a = s.find("alpha").unwrap();
        let m = s.find("mid").unwrap();
        let z = s.find("zeta").unwrap();
        assert!(a < m && m < z);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
    }

    #[test]
    fn csv_quotes_per_rfc4180() {
        let cells = vec![SweepCell {
            protocol: ProtocolKind::Faquad,
            t_final: 1e-7,
            metrics: None,
            error: Some("bad, \"very\" bad".into()),
        }];
        let out = sweep_csv(&cells).unwrap();
        assert!(out.starts_with("protocol,t_f_s,fidelity,"));
        assert!(out.contains("\"bad, \"\"very\"\" bad\"\r\n"));
        assert!(out.contains("faquad,1e-7,,,,"));
    }

    #[test]
    fn sweep_rows_round_trip() {
        let m = RunMetrics {
            protocol: ProtocolKind::Polynomial,
            t_final: 2.5e-7,
            fidelity: 0.987654321,
            excitation_energy: 1.25e-30,
            excitation_energy_hbar_omega: 0.03,
            sudden_fidelity_reference: 0.9,
            ratio_r: 0.65,
            well: WellSide::Left,
            max_norm_drift: 0.0,
        };
        let cells = vec![SweepCell {
            protocol: m.protocol,
            t_final: m.t_final,
            metrics: Some(m),
            error: None,
        }];
        let out = sweep_csv(&cells).unwrap();
        let mut rdr = csv::Reader::from_reader(out.as_bytes());
        let row = rdr.records().next().unwrap().unwrap();
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.987654321);
        assert_eq!(row[3].parse::<f64>().unwrap(), 1.25e-30);
    }

    #[test]
    fn density_header_carries_units() {
        let h = density_header(&[1e-6, 2e-6]);
        assert_eq!(h, vec!["t_s", "x=1e-6_m", "x=2e-6_m"]);
        assert_eq!(density_row(0.5, &[1.0]), vec!["5e-1", "1e0"]);
    }

    #[test]
    fn gnuplot_mentions_every_kind() {
        let g = sweep_gnuplot("sweep.csv", &["faquad", "compensated"]);
        assert!(g.contains("'faquad'") && g.contains("'compensated'"));
    }
}
