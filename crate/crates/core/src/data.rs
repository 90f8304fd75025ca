//! Two-arm right-censored datasets, event tables and Kaplan-Meier curves.
//!
//! Conventions:
//! - a subject is at risk at `t` when its follow-up time is `>= t`;
//! - events at a time `t` are processed before censorings at the same `t`;
//! - times are kept exactly as given, without binning.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{NphError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Control,
    Treatment,
}

impl Arm {
    pub fn other(self) -> Arm {
        match self {
            Arm::Control => Arm::Treatment,
            Arm::Treatment => Arm::Control,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Arm::Control => "control",
            Arm::Treatment => "treatment",
        }
    }
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Arm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "control" => Ok(Arm::Control),
            "treatment" => Ok(Arm::Treatment),
            other => Err(format!("unknown arm `{other}` (expected control or treatment)")),
        }
    }
}

/// One subject: follow-up time, event indicator and arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub time: f64,
    pub event: bool,
    pub arm: Arm,
}

impl Observation {
    pub fn new(time: f64, event: bool, arm: Arm) -> Self {
        Observation { time, event, arm }
    }

    pub fn with_arm(self, arm: Arm) -> Self {
        Observation { arm, ..self }
    }
}

/// A validated two-arm dataset. Both arms are non-empty, all times are
/// finite and non-negative, and at least one event is present.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    obs: Vec<Observation>,
}

impl Dataset {
    pub fn new(obs: Vec<Observation>) -> Result<Self> {
        if obs.is_empty() {
            return Err(NphError::EmptyDataset);
        }
        if let Some((index, o)) = obs
            .iter()
            .enumerate()
            .find(|(_, o)| !(o.time.is_finite() && o.time >= 0.0))
        {
            return Err(NphError::NegativeTime { index, time: o.time });
        }
        for arm in [Arm::Control, Arm::Treatment] {
            if !obs.iter().any(|o| o.arm == arm) {
                return Err(NphError::EmptyArm(arm));
            }
        }
        if !obs.iter().any(|o| o.event) {
            return Err(NphError::NoEvents);
        }
        Ok(Dataset { obs })
    }

    pub fn observations(&self) -> &[Observation] {
        &self.obs
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    pub fn count(&self, arm: Arm) -> usize {
        self.obs.iter().filter(|o| o.arm == arm).count()
    }

    /// Same subjects with the arm labels exchanged.
    pub fn swap_arms(&self) -> Dataset {
        Dataset {
            obs: self.obs.iter().map(|o| o.with_arm(o.arm.other())).collect(),
        }
    }

    /// Reads the `id,time,status,arm` CSV format. Row numbers in errors are
    /// 1-based data rows (the header is row 0).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        let expected = ["id", "time", "status", "arm"];
        let got: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
        if got != expected {
            return Err(NphError::Parse {
                row: 0,
                message: format!("expected header `id,time,status,arm`, found `{}`", got.join(",")),
            });
        }
        let mut obs = Vec::new();
        for (i, record) in rdr.records().enumerate() {
            let row = i + 1;
            let record = record.map_err(|e| NphError::Parse {
                row,
                message: e.to_string(),
            })?;
            let perr = |message: String| NphError::Parse { row, message };
            let time: f64 = record[1]
                .parse()
                .map_err(|_| perr(format!("time `{}` is not a number", &record[1])))?;
            let event = match &record[2] {
                "1" => true,
                "0" => false,
                other => return Err(perr(format!("status `{other}` must be 0 or 1"))),
            };
            let arm: Arm = record[3].parse().map_err(perr)?;
            if !(time.is_finite() && time >= 0.0) {
                return Err(perr(format!("time {time} must be finite and >= 0")));
            }
            obs.push(Observation::new(time, event, arm));
        }
        Dataset::new(obs)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "id,time,status,arm")?;
        for (i, o) in self.obs.iter().enumerate() {
            writeln!(w, "{},{},{},{}", i + 1, o.time, u8::from(o.event), o.arm)?;
        }
        Ok(())
    }
}

/// One distinct event time with per-arm event and at-risk counts.
/// Arm 1 is treatment and arm 2 is control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EventRow {
    pub t: f64,
    pub d1: u32,
    pub d2: u32,
    pub n1: u32,
    pub n2: u32,
}

impl EventRow {
    pub fn d(&self) -> u32 {
        self.d1 + self.d2
    }

    pub fn n(&self) -> u32 {
        self.n1 + self.n2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventTable {
    rows: Vec<EventRow>,
}

impl EventTable {
    pub fn rows(&self) -> &[EventRow] {
        &self.rows
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.t)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Exchanges the arm roles row by row.
    pub fn swapped(&self) -> EventTable {
        EventTable {
            rows: self
                .rows
                .iter()
                .map(|r| EventRow {
                    t: r.t,
                    d1: r.d2,
                    d2: r.d1,
                    n1: r.n2,
                    n2: r.n1,
                })
                .collect(),
        }
    }
}

pub fn build_event_table(ds: &Dataset) -> EventTable {
    let mut obs: Vec<&Observation> = ds.obs.iter().collect();
    obs.sort_by(|a, b| a.time.total_cmp(&b.time));

    let mut n1 = ds.count(Arm::Treatment) as u32;
    let mut n2 = ds.count(Arm::Control) as u32;
    let mut rows = Vec::new();
    let mut i = 0;
    while i < obs.len() {
        let t = obs[i].time;
        let mut j = i;
        let (mut d1, mut d2, mut left1, mut left2) = (0, 0, 0, 0);
        while j < obs.len() && obs[j].time == t {
            let o = obs[j];
            match o.arm {
                Arm::Treatment => {
                    left1 += 1;
                    d1 += u32::from(o.event);
                }
                Arm::Control => {
                    left2 += 1;
                    d2 += u32::from(o.event);
                }
            }
            j += 1;
        }
        if d1 + d2 > 0 {
            rows.push(EventRow { t, d1, d2, n1, n2 });
        }
        n1 -= left1;
        n2 -= left2;
        i = j;
    }
    EventTable { rows }
}

/// Right-continuous step function. `values[k]` is the survival probability
/// on `[times[k], times[k + 1])`; the curve is 1 before `times[0]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl SurvivalCurve {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `S(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            1.0
        } else {
            self.values[k - 1]
        }
    }

    /// `S(t-)`, the value just before `t`.
    pub fn eval_left(&self, t: f64) -> f64 {
        let k = self.times.partition_point(|&x| x < t);
        if k == 0 {
            1.0
        } else {
            self.values[k - 1]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmScope {
    Pooled,
    Arm(Arm),
}

pub fn km_estimate(ds: &Dataset, scope: KmScope) -> SurvivalCurve {
    km_from_table(&build_event_table(ds), scope)
}

/// Product-limit estimate from an event table. For a single arm only rows
/// where that arm has events produce a jump.
pub fn km_from_table(table: &EventTable, scope: KmScope) -> SurvivalCurve {
    let mut times = Vec::with_capacity(table.len());
    let mut values = Vec::with_capacity(table.len());
    let mut s = 1.0;
    for r in table.rows() {
        let (d, n) = match scope {
            KmScope::Pooled => (r.d(), r.n()),
            KmScope::Arm(Arm::Treatment) => (r.d1, r.n1),
            KmScope::Arm(Arm::Control) => (r.d2, r.n2),
        };
        if d == 0 {
            continue;
        }
        s *= 1.0 - f64::from(d) / f64::from(n);
        times.push(r.t);
        values.push(s);
    }
    SurvivalCurve { times, values }
}
