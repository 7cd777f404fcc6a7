//! Runs a [`ScenarioConfig`] end to end and returns provenance-stamped tables.

use std::f64::consts::{FRAC_PI_6, TAU};
use std::path::{Path, PathBuf};

use crate::analysis;
use crate::config::{ExperimentKind, ScenarioConfig, SequenceChoice};
use crate::error::{invalid, DyscoError, Result};
use crate::experiments::{self, Baseline, SpectrogramSpec};
use crate::pulse::{
    build_dysco, build_dysco_modulated, build_hahn_echo, build_xy8, rabi_period, PulseProgram,
};
use crate::signal::draw_shot;
use crate::table::{emit_table, Cell, ResultTable};

/// A result table plus the file-name suffix it is written under.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedTable {
    /// Empty for the primary table.
    pub suffix: &'static str,
    pub table: ResultTable,
}

fn primary(table: ResultTable) -> NamedTable {
    NamedTable { suffix: "", table }
}

/// Sequence described by the `[sequence]` block.
pub fn build_program(cfg: &ScenarioConfig) -> Result<PulseProgram> {
    let s = &cfg.sequence;
    let rabi = cfg.spin.rabi_rad_s;
    let tau = || {
        s.tau_s
            .ok_or_else(|| invalid("tau_s", "required for this sequence"))
    };
    match s.kind {
        SequenceChoice::Dysco => build_dysco(
            s.n_units,
            s.phi_rad
                .ok_or_else(|| invalid("phi_rad", "required for dysco"))?,
            rabi,
        ),
        SequenceChoice::DyscoModulated => {
            let f_s = s
                .f_s_hz
                .ok_or_else(|| invalid("f_s_hz", "required for dysco-modulated"))?;
            build_dysco_modulated(s.n_units, f_s, s.beta_k, s.window, rabi)
        }
        SequenceChoice::Hahn => build_hahn_echo(tau()?, rabi, true),
        SequenceChoice::Xy8 => build_xy8(s.reps, tau()?, rabi),
    }
}

fn spectrogram_spec(cfg: &ScenarioConfig) -> SpectrogramSpec {
    SpectrogramSpec {
        n_units: cfg.sequence.n_units,
        beta_steps: cfg.sequence.beta_steps,
        window: cfg.sequence.window,
        shots: cfg.shots,
        seed: cfg.seed,
    }
}

/// Default omega grid: DC to four times the highest characteristic frequency.
fn omega_grid(cfg: &ScenarioConfig, program: &PulseProgram) -> Vec<f64> {
    let g = cfg.omega_grid();
    if !g.is_empty() {
        return g;
    }
    let f_top = match cfg.sequence.kind {
        SequenceChoice::Hahn | SequenceChoice::Xy8 => {
            4.0 / cfg.sequence.tau_s.unwrap_or(program.total_time)
        }
        SequenceChoice::DyscoModulated => {
            4.0 * cfg
                .sequence
                .f_s_hz
                .unwrap_or(0.0)
                .max(1.0 / program.total_time)
        }
        SequenceChoice::Dysco => 8.0 / program.total_time,
    };
    crate::config::linspace(0.0, TAU * f_top, 2001)
}

/// Runs the configured experiment. The config is validated first.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Vec<NamedTable>> {
    cfg.validate()?;
    let setup = cfg.setup();
    let mut tables = match cfg.experiment {
        ExperimentKind::Map => {
            let r = experiments::run_p0_map(
                &setup,
                &cfg.phi_grid(),
                &cfg.field_grid(),
                cfg.sequence.n_units,
            )?;
            vec![primary(r.to_table())]
        }
        ExperimentKind::Sensitivity => {
            let r = experiments::run_sensitivity_scan(
                &setup,
                &cfg.phi_grid(),
                &cfg.field_grid(),
                cfg.sequence.n_units,
            )?;
            vec![
                primary(r.curve_table()),
                NamedTable {
                    suffix: "spectrum",
                    table: r.spectrum_table(),
                },
                NamedTable {
                    suffix: "map",
                    table: r.map.to_table(),
                },
            ]
        }
        ExperimentKind::DrRamp => {
            let r = experiments::run_dr_ramp(
                &setup,
                &cfg.beta_schedule(),
                &cfg.grid.b_rf_t,
                cfg.sequence.n_units,
            )?;
            let mut t = ResultTable::new(["b_rf_t", "beta_k", "p0", "unwrapped_rad"]);
            for (i, b) in r.sweep.axis1.values.iter().enumerate() {
                for (j, beta) in r.sweep.axis2.values.iter().enumerate() {
                    t.push_row(vec![
                        Cell::Float(*b),
                        Cell::Float(*beta),
                        Cell::Float(r.sweep.p0[i][j]),
                        Cell::Float(r.unwrapped[i][j]),
                    ]);
                }
            }
            t.meta("n_units", cfg.sequence.n_units);
            let mut counts = ResultTable::new(["b_rf_t", "oscillations", "predicted"]);
            for (b, c) in r.sweep.axis1.values.iter().zip(r.oscillation_counts()) {
                let predicted =
                    experiments::predicted_oscillations(&setup, cfg.sequence.n_units, *b, 1.0);
                counts.push_row(vec![
                    Cell::Float(*b),
                    Cell::Float(c),
                    Cell::Float(predicted),
                ]);
            }
            counts.meta(
                "dr_bound",
                analysis::theoretical_dr_bound(setup.rabi, crate::constants::T_DYSCO),
            );
            counts.meta("dr_bound_formula", "T_DYSCO * rabi / (9 pi), reconstructed");
            vec![
                primary(t),
                NamedTable {
                    suffix: "counts",
                    table: counts,
                },
            ]
        }
        ExperimentKind::Spectrogram | ExperimentKind::NoiseSpectrum => {
            let r = experiments::run_spectrogram(
                &setup,
                &cfg.f_s_grid(),
                &cfg.waveform,
                &spectrogram_spec(cfg),
            )?;
            let mut col = ResultTable::new(["f_s_hz", "response"]);
            for (f, v) in r.f_s.iter().zip(r.column_response()) {
                col.push_row(vec![Cell::Float(*f), Cell::Float(v)]);
            }
            vec![
                primary(r.to_table()),
                NamedTable {
                    suffix: "columns",
                    table: col,
                },
            ]
        }
        ExperimentKind::FilterFunction => {
            let prog = build_program(cfg)?;
            let g = prog.sensitivity_function(rabi_period(setup.rabi) / 16.0);
            let ff = analysis::filter_function(&g, &omega_grid(cfg, &prog));
            let mut t = ResultTable::new(["omega_rad_s", "f_hz", "filter"]);
            t.meta("dt_s", g.dt).meta("total_time_s", prog.total_time);
            for (w, v) in ff.omegas.iter().zip(&ff.values) {
                t.push_row(vec![Cell::Float(*w), Cell::Float(w / TAU), Cell::Float(*v)]);
            }
            vec![primary(t)]
        }
        ExperimentKind::Trace => {
            let prog = build_program(cfg)?;
            let shot = draw_shot(&cfg.waveform, cfg.seed, 0);
            let trace = experiments::run_trace(&setup, &prog, &cfg.waveform, &shot)?;
            vec![primary(experiments::trace_table(&trace))]
        }
        ExperimentKind::Baseline => {
            let baseline = match cfg.sequence.kind {
                SequenceChoice::Xy8 => Baseline::Xy8 {
                    reps: cfg.sequence.reps,
                },
                _ => Baseline::Hahn,
            };
            let r = experiments::run_baseline_comparison(
                &setup,
                baseline,
                &cfg.tau_grid(),
                cfg.sequence.phi_rad.unwrap_or(FRAC_PI_6),
                &cfg.waveform,
                cfg.shots,
                cfg.seed,
            )?;
            let mut t = ResultTable::new(["tau_s", "total_time_s", "p0_baseline", "p0_dysco"]);
            for (j, tau) in cfg.tau_grid().iter().enumerate() {
                t.push_row(vec![
                    Cell::Float(*tau),
                    Cell::Float(r.axis2.values[j]),
                    Cell::Float(r.p0[0][j]),
                    Cell::Float(r.p0[1][j]),
                ]);
            }
            t.meta("shots", r.meta.shots)
                .meta("substeps", r.meta.substeps);
            vec![primary(t)]
        }
        ExperimentKind::ExportProgram => vec![primary(build_program(cfg)?.export())],
    };
    for t in &mut tables {
        cfg.stamp(&mut t.table)?;
    }
    Ok(tables)
}

/// `out.csv` with suffix `spectrum` becomes `out.spectrum.csv`.
pub fn suffixed_path(path: &Path, suffix: &str) -> PathBuf {
    if suffix.is_empty() {
        return path.to_path_buf();
    }
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}.{suffix}.{}", ext.to_string_lossy()),
        None => format!("{stem}.{suffix}"),
    };
    path.with_file_name(name)
}

/// Writes every table next to `path`; returns the written paths.
pub fn write_tables(tables: &[NamedTable], path: &Path) -> Result<Vec<PathBuf>> {
    tables
        .iter()
        .map(|t| {
            let p = suffixed_path(path, t.suffix);
            emit_table(&t.table, &p)?;
            Ok(p)
        })
        .collect::<Result<Vec<_>>>()
        .map_err(|e: DyscoError| e)
}
