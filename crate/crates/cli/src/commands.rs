use std::fs::{self, File};
use std::io::Write;
use std::path::Path;

use dhwt_core::codec::{compress_image, compression_loop, decompress_image};
use dhwt_core::metrics::comparison_table;
use dhwt_core::transform::max_levels;
use dhwt_core::{Image, QualityReport, ReportRow, ThresholdSchedule};

use crate::args::RunConfig;
use crate::error::{CliError, CliResult};
use crate::io::{read_container, read_image, write_container, write_image};

/// Wavelets of the comparison grid, in output order.
pub const COMPARE_WAVELETS: [&str; 4] = ["dhwt", "sym2", "coif2", "db2"];
pub const COMPARE_MAX_LEVEL: usize = 8;

type MetricFn = fn(&QualityReport) -> f64;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::user(format!("{}: {e}", path.display()))
}

fn write_csv<W: Write>(rows: &[ReportRow], sink: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(ReportRow::CSV_HEADER)?;
    for row in rows {
        w.write_record(row.csv_fields())?;
    }
    w.flush().map_err(|e| CliError::user(format!("writing CSV: {e}")))?;
    Ok(())
}

fn emit_csv(rows: &[ReportRow], path: Option<&Path>, out: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => write_csv(rows, File::create(p).map_err(|e| io_err(p, e))?),
        None => write_csv(rows, out),
    }
}

fn print_report(out: &mut dyn Write, report: &QualityReport) -> std::io::Result<()> {
    writeln!(out, "mse={}", report.mse)?;
    writeln!(out, "psnr={}", report.psnr)?;
    writeln!(out, "cr_percent={}", report.cr)?;
    writeln!(out, "bpp={}", report.bpp)?;
    writeln!(out, "energy_retained={}", report.energy_retained)?;
    writeln!(out, "zero_share={}", report.zero_share)?;
    writeln!(out, "stream_ratio={}", report.stream_ratio)
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::Internal(format!("writing output: {e}"))
}

/// Compress `cfg.input` into `cfg.output` and print the report.
pub fn cmd_compress(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<QualityReport> {
    let output = cfg
        .output
        .as_deref()
        .ok_or_else(|| CliError::user("compress needs an output path"))?;
    let img = read_image(&cfg.input)?;
    let schedule = ThresholdSchedule::fixed(cfg.threshold)?;
    let (ci, report) = compress_image(&img, &cfg.wavelet, cfg.levels, &schedule, cfg.quantizer)?;
    let bytes = write_container(&ci, output)?;
    (|| {
        writeln!(out, "wavelet={}", cfg.wavelet)?;
        writeln!(out, "levels={}", cfg.levels)?;
        writeln!(out, "threshold={}", cfg.threshold)?;
        writeln!(out, "quantizer={}", cfg.quantizer)?;
        print_report(out, &report)?;
        writeln!(out, "bytes={bytes}")
    })()
    .map_err(stdout_err)?;
    if let Some(csv) = cfg.csv.as_deref() {
        let row = ReportRow {
            wavelet: cfg.wavelet.clone(),
            level: cfg.levels,
            loop_index: 1,
            report,
        };
        emit_csv(&[row], Some(csv), out)?;
    }
    Ok(report)
}

/// Decode `cfg.input` and write the clamped 8-bit image to `cfg.output`.
pub fn cmd_decompress(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<Image> {
    let output = cfg
        .output
        .as_deref()
        .ok_or_else(|| CliError::user("decompress needs an output path"))?;
    let ci = read_container(&cfg.input)?;
    let img = decompress_image(&ci)?;
    write_image(&img, output)?;
    writeln!(
        out,
        "wrote {} ({}x{}, {} channel{})",
        output.display(),
        img.width(),
        img.height(),
        img.num_channels(),
        if img.num_channels() == 1 { "" } else { "s" }
    )
    .map_err(stdout_err)?;
    Ok(img)
}

/// One row per loop, written as CSV.
pub fn cmd_loops(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<Vec<ReportRow>> {
    let img = read_image(&cfg.input)?;
    let schedule = ThresholdSchedule::global(cfg.threshold, cfg.loop_ratio, cfg.loops)?;
    let reports = compression_loop(&img, &cfg.wavelet, cfg.levels, &schedule, cfg.quantizer)?;
    let rows: Vec<ReportRow> = reports
        .into_iter()
        .enumerate()
        .map(|(i, report)| ReportRow {
            wavelet: cfg.wavelet.clone(),
            level: cfg.levels,
            loop_index: i + 1,
            report,
        })
        .collect();
    emit_csv(&rows, cfg.csv.as_deref(), out)?;
    Ok(rows)
}

/// Plot data for one metric: a `# wavelet` block of `level value` lines per
/// wavelet, blocks separated by two blank lines.
pub fn plot_data(rows: &[ReportRow], metric: &str, value: impl Fn(&QualityReport) -> f64) -> String {
    let mut s = format!("# {metric} by decomposition level\n");
    for (i, id) in COMPARE_WAVELETS.iter().enumerate() {
        if i > 0 {
            s.push_str("\n\n");
        }
        s.push_str(&format!("# {id}\n"));
        for row in rows.iter().filter(|r| r.wavelet == *id) {
            s.push_str(&format!("{} {}\n", row.level, value(&row.report)));
        }
    }
    s
}

/// The wavelet × level grid as CSV, plus optional plot data.
pub fn cmd_compare(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<Vec<ReportRow>> {
    let img = read_image(&cfg.input)?;
    let top = max_levels(img.width(), img.height()).min(COMPARE_MAX_LEVEL);
    let schedule = ThresholdSchedule::fixed(cfg.threshold)?;
    let rows = comparison_table(&img, &COMPARE_WAVELETS, 1..=top, &schedule, cfg.quantizer)?;
    emit_csv(&rows, cfg.csv.as_deref(), out)?;
    if let Some(dir) = cfg.plot_dir.as_deref() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        let metrics: [(&str, MetricFn); 4] = [
            ("mse", |r| r.mse),
            ("psnr", |r| r.psnr),
            ("cr", |r| r.cr),
            ("bpp", |r| r.bpp),
        ];
        for (name, f) in metrics {
            let path = dir.join(format!("{name}.dat"));
            fs::write(&path, plot_data(&rows, name, f)).map_err(|e| io_err(&path, e))?;
        }
    }
    Ok(rows)
}

/// Print the container header as `key=value` lines.
pub fn cmd_inspect(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let ci = read_container(&cfg.input)?;
    let h = &ci.header;
    let thresholds: Vec<String> = h.thresholds.iter().map(f64::to_string).collect();
    (|| {
        writeln!(out, "version={}", dhwt_core::codec::VERSION)?;
        writeln!(out, "width={}", h.width)?;
        writeln!(out, "height={}", h.height)?;
        writeln!(out, "channels={}", h.channels)?;
        writeln!(out, "levels={}", h.levels)?;
        writeln!(out, "wavelet={}", h.wavelet_id)?;
        writeln!(out, "quantizer={}", h.quantizer_step)?;
        writeln!(out, "thresholds={}", thresholds.join(","))?;
        writeln!(out, "payload_bytes={}", ci.payload().len())
    })()
    .map_err(stdout_err)
}
