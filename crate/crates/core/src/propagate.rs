//! Piecewise-constant propagation of a spin state through a pulse program
//! under a time-dependent longitudinal field.

use crate::constants::GAMMA_NV;
use crate::error::{DyscoError, ProgramViolation, Result};
use crate::pulse::{PulseProgram, ReadoutFrame};
use crate::signal::{ShotContext, Waveform};
use crate::spin::{rotate_in_place, SpinState};

/// Spin-side parameters that are not part of the pulse program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinParams {
    /// Static detuning added to every pulse and free interval, rad/s.
    pub detuning: f64,
    /// Gyromagnetic ratio coupling the RF field to the spin, rad s^-1 T^-1.
    pub gamma_nv: f64,
}

impl Default for SpinParams {
    fn default() -> Self {
        Self {
            detuning: 0.0,
            gamma_nv: GAMMA_NV,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    /// Pulse being played when this point was recorded; the initial point uses 0.
    pub pulse_index: usize,
    pub bloch: [f64; 3],
}

fn check_durations(program: &PulseProgram) -> Result<()> {
    let bad: Vec<ProgramViolation> = program
        .pulses
        .iter()
        .enumerate()
        .filter(|(_, p)| !(p.duration > 0.0) || !p.duration.is_finite())
        .map(|(index, p)| ProgramViolation::NonPositiveDuration {
            index,
            duration: p.duration,
        })
        .collect();
    if program.pulses.is_empty() {
        return Err(DyscoError::InvalidProgram(vec![ProgramViolation::Empty]));
    }
    if !bad.is_empty() {
        return Err(DyscoError::InvalidProgram(bad));
    }
    Ok(())
}

/// Ideal pi(y) rotation, exact in the (|0>, |->) basis.
fn flip(state: SpinState) -> SpinState {
    SpinState {
        amp0: -state.ampm,
        ampm: state.amp0,
    }
}

fn finish(state: SpinState, program: &PulseProgram) -> SpinState {
    let s = state.normalized();
    match program.readout {
        ReadoutFrame::Direct => s,
        ReadoutFrame::Flipped => flip(s),
    }
}

/// Evolves `state` with precomputed field samples.
///
/// `fields[i * substeps + j]` is the RF field (tesla) during substep `j` of
/// pulse `i`, as produced by sampling a waveform at
/// [`PulseProgram::sample_times`].
pub fn propagate_sampled(
    state: SpinState,
    program: &PulseProgram,
    fields: &[f64],
    substeps: usize,
    params: &SpinParams,
) -> Result<SpinState> {
    run(state, program, fields, substeps, params, None)
}

fn run(
    state: SpinState,
    program: &PulseProgram,
    fields: &[f64],
    substeps: usize,
    params: &SpinParams,
    mut trace: Option<&mut Vec<TracePoint>>,
) -> Result<SpinState> {
    check_durations(program)?;
    if substeps == 0 {
        return Err(crate::error::invalid("substeps", "must be at least 1"));
    }
    if fields.len() != program.pulses.len() * substeps {
        return Err(crate::error::invalid(
            "fields",
            format!(
                "expected {} samples, got {}",
                program.pulses.len() * substeps,
                fields.len()
            ),
        ));
    }
    let mut s = state;
    let starts = if trace.is_some() {
        program.start_times()
    } else {
        Vec::new()
    };
    if let Some(tr) = trace.as_deref_mut() {
        tr.push(TracePoint {
            t: 0.0,
            pulse_index: 0,
            bloch: s.bloch(),
        });
    }
    for (i, p) in program.pulses.iter().enumerate() {
        let hx = p.rabi * p.phase.cos();
        let hy = -p.rabi * p.phase.sin();
        let eps0 = -(p.detuning + params.detuning);
        let dt = p.duration / substeps as f64;
        for (j, &b) in fields[i * substeps..(i + 1) * substeps].iter().enumerate() {
            rotate_in_place(&mut s, hx, hy, eps0 + params.gamma_nv * b, dt);
            if let Some(tr) = trace.as_deref_mut() {
                tr.push(TracePoint {
                    t: starts[i] + (j + 1) as f64 * dt,
                    pulse_index: i,
                    bloch: s.bloch(),
                });
            }
        }
    }
    Ok(finish(s, program))
}

/// Evolves `state` through `program` while the spin sees `waveform` for one shot.
///
/// Each pulse is split into `substeps` piecewise-constant segments with the
/// field evaluated at the segment midpoint. The returned state is normalized
/// and expressed in the program's readout frame.
pub fn propagate(
    state: SpinState,
    program: &PulseProgram,
    waveform: &Waveform,
    shot: &ShotContext,
    substeps: usize,
    params: &SpinParams,
) -> Result<SpinState> {
    check_durations(program)?;
    let fields = waveform.sample_many(&program.sample_times(substeps.max(1)), shot);
    propagate_sampled(state, program, &fields, substeps, params)
}

/// Like [`propagate`] but also records the Bloch vector after every substep.
///
/// Trace points are taken in the lab readout convention before the final
/// readout-frame change.
pub fn propagate_traced(
    state: SpinState,
    program: &PulseProgram,
    waveform: &Waveform,
    shot: &ShotContext,
    substeps: usize,
    params: &SpinParams,
) -> Result<(SpinState, Vec<TracePoint>)> {
    check_durations(program)?;
    let fields = waveform.sample_many(&program.sample_times(substeps.max(1)), shot);
    let mut trace = Vec::with_capacity(fields.len() + 1);
    let out = run(state, program, &fields, substeps, params, Some(&mut trace))?;
    Ok((out, trace))
}
