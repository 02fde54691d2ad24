//! One CSV file per trial: a fixed header, then one row per sample with time
//! in seconds, five fingertip forces (N) and five flex angles (degrees).

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use super::DatasetError;
use crate::hand::{Channels, GraspTrial, TrialMeta};

pub const TRIAL_CSV_HEADER: [&str; 11] = [
    "t_s", "f_thumb", "f_index", "f_middle", "f_ring", "f_pinky", "a_thumb", "a_index", "a_middle", "a_ring",
    "a_pinky",
];

/// Time stamps and channel values as read from a trial file.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialSeries {
    pub t_s: Vec<f64>,
    pub forces: Vec<Channels>,
    pub angles: Vec<Channels>,
}

impl TrialSeries {
    pub fn into_trial(self, meta: TrialMeta) -> GraspTrial {
        GraspTrial {
            meta,
            forces: self.forces,
            angles: self.angles,
        }
    }
}

fn fmt_value(x: f64) -> String {
    let s = format!("{x:.6}");
    if s == "-0.000000" {
        "0.000000".into()
    } else {
        s
    }
}

pub fn write_trial_csv_to<W: Write>(trial: &GraspTrial, out: W) -> Result<(), DatasetError> {
    let io = |e: csv::Error| DatasetError::Io {
        path: String::new(),
        message: e.to_string(),
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_CSV_HEADER).map_err(io)?;
    let dt = trial.meta.sample_period_s();
    let mut row = Vec::with_capacity(11);
    for (i, (f, a)) in trial.forces.iter().zip(&trial.angles).enumerate() {
        row.clear();
        row.push(fmt_value(i as f64 * dt));
        row.extend(f.iter().chain(a).map(|&x| fmt_value(x)));
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| DatasetError::Io {
        path: String::new(),
        message: e.to_string(),
    })
}

pub fn write_trial_csv(path: &Path, trial: &GraspTrial) -> Result<(), DatasetError> {
    let file = File::create(path).map_err(|e| DatasetError::io(path, e))?;
    write_trial_csv_to(trial, std::io::BufWriter::new(file)).map_err(|e| e.at(path))
}

pub fn read_trial_series_from<R: Read>(input: R) -> Result<TrialSeries, DatasetError> {
    let parse = |row: usize, message: String| DatasetError::Parse {
        path: String::new(),
        row,
        message,
    };
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = rdr.headers().map_err(|e| parse(0, e.to_string()))?.clone();
    if let Some(bad) = header.iter().find(|h| !TRIAL_CSV_HEADER.contains(h)) {
        return Err(parse(0, format!("unknown column '{bad}'")));
    }
    if header.iter().ne(TRIAL_CSV_HEADER) {
        return Err(parse(
            0,
            format!(
                "header must be exactly '{}', got '{}'",
                TRIAL_CSV_HEADER.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut series = TrialSeries {
        t_s: Vec::new(),
        forces: Vec::new(),
        angles: Vec::new(),
    };
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| parse(row, e.to_string()))?;
        if rec.len() != 11 {
            return Err(parse(row, format!("expected 11 fields, found {}", rec.len())));
        }
        let mut vals = [0.0; 11];
        for (k, cell) in rec.iter().enumerate() {
            vals[k] = cell.trim().parse::<f64>().map_err(|_| {
                parse(row, format!("column '{}': '{}' is not a number", TRIAL_CSV_HEADER[k], cell))
            })?;
        }
        if let Some(&prev) = series.t_s.last() {
            if !(vals[0] > prev) {
                return Err(parse(row, format!("time {} does not increase past {}", vals[0], prev)));
            }
        }
        series.t_s.push(vals[0]);
        series.forces.push(vals[1..6].try_into().unwrap());
        series.angles.push(vals[6..11].try_into().unwrap());
    }
    Ok(series)
}

pub fn read_trial_series(path: &Path) -> Result<TrialSeries, DatasetError> {
    let file = File::open(path).map_err(|e| DatasetError::io(path, e))?;
    read_trial_series_from(std::io::BufReader::new(file)).map_err(|e| e.at(path))
}

/// Read a trial file; metadata comes from the manifest.
pub fn read_trial_csv(path: &Path, meta: TrialMeta) -> Result<GraspTrial, DatasetError> {
    Ok(read_trial_series(path)?.into_trial(meta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hand::lookup_object;

    fn small_trial() -> GraspTrial {
        let meta = TrialMeta {
            duration_s: 0.1,
            ..TrialMeta::protocol("S01", lookup_object("Key").unwrap(), 1)
        };
        GraspTrial {
            meta,
            forces: vec![
                [0.0, 1.0, 2.0, 3.0, 4.0],
                [0.5, 1.25, 2.125, 3.0625, 1e-7],
                [19.6, 0.333333333, 2.0, 3.0, 4.0],
                [0.1, 0.2, 0.3, 0.4, 0.5],
            ],
            angles: vec![[10.0, 20.123456789, 30.0, 40.0, 50.0]; 4],
        }
    }

    #[test]
    fn header_is_exact() {
        let mut t = small_trial();
        t.forces.truncate(1);
        t.angles.truncate(1);
        let mut buf = Vec::new();
        write_trial_csv_to(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(
            "t_s,f_thumb,f_index,f_middle,f_ring,f_pinky,a_thumb,a_index,a_middle,a_ring,a_pinky\n"
        ));
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn round_trip_within_a_micro() {
        let t = small_trial();
        let mut buf = Vec::new();
        write_trial_csv_to(&t, &mut buf).unwrap();
        let s = read_trial_series_from(buf.as_slice()).unwrap();
        assert_eq!(s.t_s, vec![0.0, 0.025, 0.05, 0.075]);
        for (a, b) in s.forces.iter().flatten().zip(t.forces.iter().flatten()) {
            assert!((a - b).abs() <= 1e-6);
        }
        for (a, b) in s.angles.iter().flatten().zip(t.angles.iter().flatten()) {
            assert!((a - b).abs() <= 1e-6);
        }
    }

    #[test]
    fn unknown_column_is_named() {
        let text = "t_s,force_thumb,f_index,f_middle,f_ring,f_pinky,a_thumb,a_index,a_middle,a_ring,a_pinky\n";
        let err = read_trial_series_from(text.as_bytes()).unwrap_err();
        assert!(err.to_string().contains("force_thumb"), "{err}");
    }

    #[test]
    fn reordered_header_is_rejected() {
        let text = "t_s,f_index,f_thumb,f_middle,f_ring,f_pinky,a_thumb,a_index,a_middle,a_ring,a_pinky\n";
        assert!(read_trial_series_from(text.as_bytes()).is_err());
    }

    #[test]
    fn bad_cell_reports_row() {
        let h = TRIAL_CSV_HEADER.join(",");
        let text = format!("{h}\n0,0,0,0,0,0,0,0,0,0,0\n0.025,0,x,0,0,0,0,0,0,0,0\n");
        match read_trial_series_from(text.as_bytes()).unwrap_err() {
            DatasetError::Parse { row, message, .. } => {
                assert_eq!(row, 2);
                assert!(message.contains("f_index"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn time_must_increase() {
        let h = TRIAL_CSV_HEADER.join(",");
        let text = format!("{h}\n0.025,0,0,0,0,0,0,0,0,0,0\n0.025,0,0,0,0,0,0,0,0,0,0\n");
        match read_trial_series_from(text.as_bytes()).unwrap_err() {
            DatasetError::Parse { row, .. } => assert_eq!(row, 2),
            e => panic!("{e}"),
        }
    }
}
