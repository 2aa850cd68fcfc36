// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! The annealer program: `term_count(n) × steps` coupling values `f_ik`.
//!
//! Flat layout is time-major: the `m` couplings of slice 0, then the `m`
//! couplings of slice 1, and so on. Network outputs use the same layout.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::qcore::term_count;
use crate::scalar::Scalar;

/// Default annealing duration `T`.
pub const DEFAULT_TOTAL_TIME: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ControlSchedule<T: Scalar> {
    n: usize,
    steps: usize,
    total_time: T,
    /// time-major: `values[k * m + i] = f_ik`
    values: Vec<T>,
}

impl<T: Scalar> ControlSchedule<T> {
    pub fn zeros(n: usize, steps: usize, total_time: T) -> Self {
        Self {
            n,
            steps,
            total_time,
            values: vec![T::zero(); steps * term_count(n)],
        }
    }

    /// Reshapes a flat time-major vector. Non-finite entries are rejected.
    pub fn from_flat(flat: Vec<T>, n: usize, steps: usize, total_time: T) -> Result<Self> {
        let expected = steps * term_count(n);
        if flat.len() != expected {
            return Err(Error::LengthMismatch {
                what: "flat schedule",
                expected,
                got: flat.len(),
            });
        }
        if steps == 0 {
            return Err(Error::Shape("schedule needs at least one time slice".into()));
        }
        if let Some(index) = flat.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "schedule",
                index,
            });
        }
        if !(total_time.is_finite() && total_time > T::zero()) {
            return Err(Error::NonFinite {
                what: "total_time",
                index: 0,
            });
        }
        Ok(Self {
            n,
            steps,
            total_time,
            values: flat,
        })
    }

    pub fn flatten(&self) -> Vec<T> {
        self.values.clone()
    }

    pub fn as_flat(&self) -> &[T] {
        &self.values
    }

    pub(crate) fn as_flat_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn terms(&self) -> usize {
        term_count(self.n)
    }

    pub fn total_time(&self) -> T {
        self.total_time
    }

    /// `Δt = T / steps`.
    pub fn delta_t(&self) -> T {
        self.total_time / T::of(self.steps as f64)
    }

    /// `f_ik`.
    pub fn get(&self, term: usize, slice: usize) -> T {
        self.values[slice * self.terms() + term]
    }

    pub fn set(&mut self, term: usize, slice: usize, value: T) {
        let m = self.terms();
        self.values[slice * m + term] = value;
    }

    /// The `m` couplings active during slice `k`.
    pub fn slice(&self, k: usize) -> &[T] {
        let m = self.terms();
        &self.values[k * m..(k + 1) * m]
    }

    /// Writes `m` rows × `steps` columns, comma separated, no header.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for i in 0..self.terms() {
            let row: Vec<String> = (0..self.steps)
                .map(|k| format!("{:e}", self.get(i, k).as_f64()))
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }

    /// Parses the layout produced by [`ControlSchedule::write_csv`].
    pub fn read_csv<R: BufRead>(r: R, n: usize, total_time: T) -> Result<Self> {
        let m = term_count(n);
        let mut rows: Vec<Vec<T>> = Vec::with_capacity(m);
        for (ln, line) in r.lines().enumerate() {
            let line = line.map_err(|e| Error::io("<schedule csv>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split(',')
                .map(|c| {
                    c.trim().parse::<f64>().map(T::of).map_err(|e| Error::Parse {
                        path: "<schedule csv>".into(),
                        line: ln + 1,
                        msg: e.to_string(),
                    })
                })
                .collect::<Result<Vec<T>>>()?;
            rows.push(row);
        }
        if rows.len() != m {
            return Err(Error::LengthMismatch {
                what: "schedule csv rows",
                expected: m,
                got: rows.len(),
            });
        }
        let steps = rows[0].len();
        let mut flat = vec![T::zero(); m * steps];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != steps {
                return Err(Error::Parse {
                    path: "<schedule csv>".into(),
                    line: i + 1,
                    msg: format!("expected {steps} columns, got {}", row.len()),
                });
            }
            for (k, &v) in row.iter().enumerate() {
                flat[k * m + i] = v;
            }
        }
        Self::from_flat(flat, n, steps, total_time)
    }
}
