//! Readers and writers for the on-disk formats.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading
//! a file this module wrote and writing it again is byte-identical.

use crate::usage;
use anyhow::Result;
use std::fmt::Write as _;
use std::path::Path;
use whereabouts_core::mcmc::McmcRun;
use whereabouts_core::prior::CovariateRaster;
use whereabouts_core::quadrature::PredictiveField;
use whereabouts_core::{
    CorrelationFamily, Grid, ModelParams, Point, Rect, SpatialDataset,
};

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)?;
        }
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn parse_f64(field: &str, what: &str, path: &Path, lineno: usize) -> Result<f64> {
    field.trim().parse::<f64>().map_err(|_| {
        usage(format!(
            "{}:{}: cannot parse {what} from {field:?}",
            path.display(),
            lineno
        ))
    })
}

// ---------------------------------------------------------------------------
// datasets: x,y,value with empty coordinates for orphans

/// Serialize a dataset: located rows first (in order), then orphan rows as
/// `,,value`.
pub fn dataset_to_string(data: &SpatialDataset) -> String {
    let mut out = String::from("x,y,value\n");
    for (p, v) in data.known_locations().iter().zip(data.known_values()) {
        let _ = writeln!(out, "{},{},{}", p.x, p.y, v);
    }
    for v in data.orphan_values() {
        let _ = writeln!(out, ",,{v}");
    }
    out
}

pub fn write_dataset(path: &Path, data: &SpatialDataset) -> Result<()> {
    write_text(path, &dataset_to_string(data))
}

/// Read a dataset. When `region` is absent, the bounding rectangle of the
/// located observations is used.
pub fn read_dataset(path: &Path, region: Option<Rect>) -> Result<SpatialDataset> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "x,y,value")) => {}
        _ => {
            return Err(usage(format!(
                "{}: expected header line `x,y,value`",
                path.display()
            )))
        }
    }
    let mut known_locations = Vec::new();
    let mut known_values = Vec::new();
    let mut orphan_values = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(usage(format!(
                "{}:{}: expected 3 fields, found {}",
                path.display(),
                lineno,
                fields.len()
            )));
        }
        let value = parse_f64(fields[2], "value", path, lineno)?;
        let x_empty = fields[0].trim().is_empty();
        let y_empty = fields[1].trim().is_empty();
        match (x_empty, y_empty) {
            (true, true) => orphan_values.push(value),
            (false, false) => {
                known_locations.push(Point::new(
                    parse_f64(fields[0], "x", path, lineno)?,
                    parse_f64(fields[1], "y", path, lineno)?,
                ));
                known_values.push(value);
            }
            _ => {
                return Err(usage(format!(
                    "{}:{}: a row must have both coordinates or neither",
                    path.display(),
                    lineno
                )))
            }
        }
    }
    let region = match region {
        Some(r) => r,
        None => Rect::bounding(&known_locations)
            .map_err(|e| usage(format!("{}: {e}", path.display())))?,
    };
    Ok(SpatialDataset::new(
        known_locations,
        known_values,
        orphan_values,
        region,
    )?)
}

// ---------------------------------------------------------------------------
// density fields and highest-density regions

/// `x,y,density` rows in row-major grid order.
pub fn field_to_string(field: &PredictiveField) -> String {
    let mut out = String::from("x,y,density\n");
    for (i, w) in field.weights().iter().enumerate() {
        let p = field.grid().node(i);
        let _ = writeln!(out, "{},{},{}", p.x, p.y, w);
    }
    out
}

pub fn write_field(path: &Path, field: &PredictiveField) -> Result<()> {
    write_text(path, &field_to_string(field))
}

/// `x,y,alpha_level` rows: every node belonging to the widest requested
/// region, labeled with the largest (most selective) alpha whose region
/// still contains it.
pub fn hdr_to_string(field: &PredictiveField, alphas: &[f64]) -> Result<String> {
    let mut sorted = alphas.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut label = vec![None::<f64>; field.grid().len()];
    // From the most selective region outward; later (wider) regions do not
    // overwrite the tighter label.
    for &alpha in &sorted {
        for i in field.hdr(alpha)? {
            label[i].get_or_insert(alpha);
        }
    }
    let mut out = String::from("x,y,alpha_level\n");
    for (i, l) in label.iter().enumerate() {
        if let Some(alpha) = l {
            let p = field.grid().node(i);
            let _ = writeln!(out, "{},{},{alpha}", p.x, p.y);
        }
    }
    Ok(out)
}

pub fn write_hdr(path: &Path, field: &PredictiveField, alphas: &[f64]) -> Result<()> {
    write_text(path, &hdr_to_string(field, alphas)?)
}

// ---------------------------------------------------------------------------
// chains

/// `iter,loc_index,x,y`, one row per missing location per retained state;
/// `iter` is the original chain iteration of the retained state.
pub fn chain_to_string(run: &McmcRun) -> String {
    let mut out = String::from("iter,loc_index,x,y\n");
    for (k, state) in run.samples.iter().enumerate() {
        let iter = run.config.burn_in + (k + 1) * run.config.thin;
        for (i, p) in state.iter().enumerate() {
            let _ = writeln!(out, "{iter},{i},{},{}", p.x, p.y);
        }
    }
    out
}

pub fn write_chain(path: &Path, run: &McmcRun) -> Result<()> {
    write_text(path, &chain_to_string(run))
}

/// Read a chain back as `samples[k][loc_index]`.
pub fn read_chain(path: &Path) -> Result<Vec<Vec<Point>>> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "iter,loc_index,x,y")) => {}
        _ => {
            return Err(usage(format!(
                "{}: expected header line `iter,loc_index,x,y`",
                path.display()
            )))
        }
    }
    let mut samples: Vec<Vec<Point>> = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(usage(format!(
                "{}:{}: expected 4 fields",
                path.display(),
                lineno
            )));
        }
        let loc_index: usize = fields[1].trim().parse().map_err(|_| {
            usage(format!("{}:{}: bad loc_index", path.display(), lineno))
        })?;
        let p = Point::new(
            parse_f64(fields[2], "x", path, lineno)?,
            parse_f64(fields[3], "y", path, lineno)?,
        );
        if loc_index == 0 {
            samples.push(vec![p]);
        } else {
            let state = samples.last_mut().ok_or_else(|| {
                usage(format!(
                    "{}:{}: loc_index {} before any loc_index 0",
                    path.display(),
                    lineno,
                    loc_index
                ))
            })?;
            if state.len() != loc_index {
                return Err(usage(format!(
                    "{}:{}: loc_index {} out of order",
                    path.display(),
                    lineno,
                    loc_index
                )));
            }
            state.push(p);
        }
    }
    if samples.is_empty() {
        return Err(usage(format!("{}: chain file has no samples", path.display())));
    }
    Ok(samples)
}

// ---------------------------------------------------------------------------
// covariate rasters: x,y,v1,...,vp on a regular grid of cell centers

pub fn raster_to_string(raster: &CovariateRaster) -> String {
    let mut header = String::from("x,y");
    for k in 1..=raster.dims() {
        let _ = write!(header, ",v{k}");
    }
    let mut out = header;
    out.push('\n');
    let grid = raster.grid();
    for i in 0..grid.len() {
        let p = grid.node(i);
        let _ = write!(out, "{},{}", p.x, p.y);
        for v in raster.cell(i) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

pub fn write_raster(path: &Path, raster: &CovariateRaster) -> Result<()> {
    write_text(path, &raster_to_string(raster))
}

/// Read a covariate raster, reconstructing the grid geometry from the
/// coordinates: they must form a complete regular lattice of cell centers.
pub fn read_raster(path: &Path) -> Result<CovariateRaster> {
    let text = read_text(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| usage(format!("{}: empty raster file", path.display())))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "x" || cols[1] != "y" {
        return Err(usage(format!(
            "{}: expected header `x,y,v1,...`, got {header:?}",
            path.display()
        )));
    }
    let dims = cols.len() - 2;

    let mut rows: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dims + 2 {
            return Err(usage(format!(
                "{}:{}: expected {} fields",
                path.display(),
                lineno,
                dims + 2
            )));
        }
        let x = parse_f64(fields[0], "x", path, lineno)?;
        let y = parse_f64(fields[1], "y", path, lineno)?;
        let vals = fields[2..]
            .iter()
            .map(|f| parse_f64(f, "covariate", path, lineno))
            .collect::<Result<Vec<f64>>>()?;
        rows.push((x, y, vals));
    }

    let axis = |coords: Vec<f64>| -> Result<Vec<f64>> {
        let mut sorted = coords;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        if sorted.len() < 1 {
            return Err(usage(format!("{}: no raster rows", path.display())));
        }
        if sorted.len() > 1 {
            let step = sorted[1] - sorted[0];
            for w in sorted.windows(2) {
                if ((w[1] - w[0]) - step).abs() > 1e-9 * step.abs().max(1.0) {
                    return Err(usage(format!(
                        "{}: raster coordinates are not on a regular grid",
                        path.display()
                    )));
                }
            }
        }
        Ok(sorted)
    };
    let xs = axis(rows.iter().map(|r| r.0).collect())?;
    let ys = axis(rows.iter().map(|r| r.1).collect())?;
    let (nx, ny) = (xs.len(), ys.len());
    if rows.len() != nx * ny {
        return Err(usage(format!(
            "{}: {} rows do not fill a {}x{} grid",
            path.display(),
            rows.len(),
            nx,
            ny
        )));
    }
    // Cell size from spacing; a single row/column cannot determine it.
    let dx = if nx > 1 { xs[1] - xs[0] } else { 1.0 };
    let dy = if ny > 1 { ys[1] - ys[0] } else { 1.0 };
    let rect = Rect::new(
        xs[0] - dx / 2.0,
        xs[nx - 1] + dx / 2.0,
        ys[0] - dy / 2.0,
        ys[ny - 1] + dy / 2.0,
    )?;
    let grid = Grid::new(rect, nx, ny)?;

    let index_on = |sorted: &[f64], v: f64| sorted.partition_point(|s| *s < v).min(sorted.len() - 1);
    let mut values = vec![f64::NAN; nx * ny * dims];
    let mut seen = vec![false; nx * ny];
    for (x, y, vals) in rows {
        let ix = index_on(&xs, x);
        let iy = index_on(&ys, y);
        let cell = grid.index_of(ix, iy);
        if seen[cell] {
            return Err(usage(format!(
                "{}: duplicate raster cell at ({x}, {y})",
                path.display()
            )));
        }
        seen[cell] = true;
        values[cell * dims..(cell + 1) * dims].copy_from_slice(&vals);
    }
    Ok(CovariateRaster::new(grid, dims, values)?)
}

// ---------------------------------------------------------------------------
// fitted parameters as key=value

pub fn params_to_string(
    params: &ModelParams,
    log_likelihood: f64,
    report: Option<&whereabouts_core::fit::FitReport>,
) -> String {
    let family = match params.family {
        CorrelationFamily::Exponential => "exponential",
        CorrelationFamily::Matern => "matern",
    };
    let mut out = String::new();
    let _ = writeln!(out, "family={family}");
    let _ = writeln!(out, "mu={}", params.mu);
    let _ = writeln!(out, "sigma2={}", params.sigma2);
    let _ = writeln!(out, "tau2={}", params.tau2);
    let _ = writeln!(out, "phi={}", params.phi);
    let _ = writeln!(out, "kappa={}", params.kappa);
    let _ = writeln!(out, "loglik={log_likelihood}");
    if let Some(r) = report {
        let _ = writeln!(out, "converged={}", r.converged);
        let _ = writeln!(out, "evaluations={}", r.evaluations);
        let _ = writeln!(out, "starts={}", r.starts);
    }
    out
}

/// Read model parameters from a `key=value` report (as written by `fit`).
pub fn read_params(path: &Path) -> Result<ModelParams> {
    let cfg = crate::config::Config::from_file(path)?;
    let family = match cfg.raw("family") {
        Some("exponential") | None => CorrelationFamily::Exponential,
        Some("matern") => CorrelationFamily::Matern,
        Some(other) => {
            return Err(usage(format!(
                "{}: unknown family {other:?}",
                path.display()
            )))
        }
    };
    let need = |key: &str| -> Result<f64> {
        cfg.get::<f64>(key)?
            .ok_or_else(|| usage(format!("{}: missing key {key}", path.display())))
    };
    Ok(ModelParams::new(
        need("mu")?,
        need("sigma2")?,
        need("tau2")?,
        need("phi")?,
        cfg.get::<f64>("kappa")?.unwrap_or(0.5),
        family,
    )?)
}
