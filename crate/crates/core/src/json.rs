//! JSON documents for reports. Indices are 1-based, floats are written with
//! 17 significant digits, and infinite values become `null`.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::extray::ExtremeRaySet;
use crate::geometry::{FaceReport, NoncoverResult, PolytopeHRep};
use crate::reduction::ReductionReport;
use crate::solver::{CvResult, SolveResult};

/// Pretty formatter that prints every `f64` in `{:.16e}` form.
struct ExactFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{:.16e}", f64::from(value))
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string<S: Serialize + ?Sized>(value: &S) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Parse(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

pub fn write_json<S: Serialize + ?Sized>(path: impl AsRef<Path>, value: &S) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|i| i + 1).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalDoc {
    pub lower: f64,
    /// `None` when unbounded.
    pub upper: Option<f64>,
    pub upper_inclusive: bool,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountsDoc {
    pub rays: usize,
    pub classes: usize,
    pub kept_classes: usize,
    pub membership_calls: usize,
    pub lp_calls: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReportDoc {
    pub kept: Vec<usize>,
    pub eta: f64,
    pub interval: IntervalDoc,
    pub noncover_ok: bool,
    pub alpha: f64,
    pub valid: bool,
    pub violations: Vec<String>,
    pub eta_zero_threshold: Option<f64>,
    pub zero_solution: bool,
    pub counts: CountsDoc,
    pub wall_time_ms: f64,
}

impl From<&ReductionReport<f64>> for ReductionReportDoc {
    fn from(r: &ReductionReport<f64>) -> Self {
        ReductionReportDoc {
            kept: one_based(&r.kept),
            eta: r.eta,
            interval: IntervalDoc {
                lower: r.interval.lower,
                upper: finite(r.interval.upper),
                upper_inclusive: r.interval.upper_inclusive,
                valid: r.interval.valid,
            },
            noncover_ok: r.noncover_ok,
            alpha: r.alpha,
            valid: r.valid(),
            violations: r.violations.iter().map(|v| v.to_string()).collect(),
            eta_zero_threshold: finite(r.eta_zero_threshold),
            zero_solution: r.zero_solution,
            counts: CountsDoc {
                rays: r.ray_stats.kept.len() + r.ray_stats.discarded.len(),
                classes: r.ray_stats.classes.len(),
                kept_classes: r.ray_stats.kept_classes(),
                membership_calls: r.ray_stats.membership_calls,
                lp_calls: r.ray_stats.lp_calls,
            },
            wall_time_ms: r.wall_time.as_secs_f64() * 1e3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeRaySetDoc {
    pub kept: Vec<usize>,
    pub discarded: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    pub kept_classes: usize,
    pub membership_calls: usize,
    pub lp_calls: usize,
}

impl From<&ExtremeRaySet> for ExtremeRaySetDoc {
    fn from(e: &ExtremeRaySet) -> Self {
        ExtremeRaySetDoc {
            kept: one_based(&e.kept),
            discarded: one_based(&e.discarded),
            classes: e.classes.iter().map(|c| one_based(c)).collect(),
            kept_classes: e.kept_classes(),
            membership_calls: e.membership_calls,
            lp_calls: e.lp_calls,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResultDoc {
    pub beta: Vec<f64>,
    pub objective: f64,
    pub support: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    pub kkt_ok: bool,
}

impl From<&SolveResult<f64>> for SolveResultDoc {
    fn from(s: &SolveResult<f64>) -> Self {
        SolveResultDoc {
            beta: s.beta.to_vec(),
            objective: s.objective,
            support: one_based(&s.support),
            iterations: s.iterations,
            converged: s.converged,
            kkt_ok: s.kkt_ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResultDoc {
    pub eta_grid: Vec<f64>,
    pub cv_mse: Vec<f64>,
    pub cv_se: Vec<f64>,
    pub eta_cv: f64,
    pub eta_1se: f64,
    pub folds: usize,
}

impl From<&CvResult<f64>> for CvResultDoc {
    fn from(c: &CvResult<f64>) -> Self {
        CvResultDoc {
            eta_grid: c.eta_grid.clone(),
            cv_mse: c.cv_mse.clone(),
            cv_se: c.cv_se.clone(),
            eta_cv: c.eta_cv,
            eta_1se: c.eta_1se,
            folds: c.folds,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeDoc {
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    pub vertices: Vec<usize>,
}

impl From<&PolytopeHRep<f64>> for PolytopeDoc {
    fn from(k: &PolytopeHRep<f64>) -> Self {
        PolytopeDoc {
            normals: k.normals.iter().map(|v| v.to_vec()).collect(),
            offsets: k.offsets.clone(),
            vertices: one_based(&k.vertices),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FaceReportDoc {
    pub xi: f64,
    pub j: Vec<usize>,
    pub j1: Vec<usize>,
    pub msh: Vec<usize>,
    pub w: Vec<usize>,
    pub f_vertices: Vec<usize>,
    /// `None` when unbounded.
    pub xi_minus_y: Option<f64>,
    pub x_extreme: Vec<usize>,
    pub x_extreme_available: bool,
    pub hypotheses: bool,
}

impl From<&FaceReport<f64>> for FaceReportDoc {
    fn from(f: &FaceReport<f64>) -> Self {
        FaceReportDoc {
            xi: f.xi,
            j: one_based(&f.j),
            j1: one_based(&f.j1),
            msh: one_based(&f.msh),
            w: one_based(&f.w),
            f_vertices: one_based(&f.f_vertices),
            xi_minus_y: finite(f.xi_minus_y),
            x_extreme: one_based(&f.x_extreme),
            x_extreme_available: f.x_extreme_available,
            hypotheses: f.hypotheses,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoncoverDoc {
    pub per_index: Vec<bool>,
    pub y_vertex: bool,
    pub overall: bool,
}

impl From<&NoncoverResult> for NoncoverDoc {
    fn from(r: &NoncoverResult) -> Self {
        NoncoverDoc {
            per_index: r.per_index.clone(),
            y_vertex: r.y_vertex,
            overall: r.overall,
        }
    }
}
