//! Alternating optimization of precoder, waveform and receive filter.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::comm::avg_rate;
use crate::error::{Error, Result};
use crate::linalg::{c, trace_re, CMat, CVec};
use crate::precoder::{design_precoder, restore_feasibility, PrecoderDesignParams, PrecoderIter};
use crate::radar::{r_of_v, radar_sinr, to_db, update_receive_filter};
use crate::scenario::ScenarioInstance;
use crate::waveform::{design_waveform, reference_waveform_lfm, similarity_value, SdpRecord, WaveformDesignParams, WaveformIter, WaveformMode};

/// Variables held at their initial values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Baseline {
    pub fixed_v: bool,
    pub fixed_s: bool,
    pub fixed_w: bool,
}

impl Baseline {
    pub const NONE: Baseline = Baseline { fixed_v: false, fixed_s: false, fixed_w: false };
    pub const FIXED_V: Baseline = Baseline { fixed_v: true, fixed_s: false, fixed_w: false };
    pub const FIXED_S: Baseline = Baseline { fixed_v: false, fixed_s: true, fixed_w: false };
    pub const FIXED_W: Baseline = Baseline { fixed_v: false, fixed_s: false, fixed_w: true };

    pub fn validate(&self) -> Result<()> {
        if self.fixed_s && self.fixed_w {
            return Err(Error::InvalidConfig("fixing both the waveform and the filter leaves nothing to raise the SINR".into()));
        }
        Ok(())
    }
}

impl FromStr for Baseline {
    type Err = Error;

    /// `none`, or a comma-separated list of `fixed_v`, `fixed_s`, `fixed_w`.
    fn from_str(text: &str) -> Result<Self> {
        let mut b = Baseline::NONE;
        for part in text.split(',').map(|p| p.trim().to_ascii_lowercase()) {
            match part.as_str() {
                "none" | "" => {}
                "fixed_v" => b.fixed_v = true,
                "fixed_s" => b.fixed_s = true,
                "fixed_w" => b.fixed_w = true,
                other => return Err(Error::InvalidConfig(format!("unknown baseline `{other}`"))),
            }
        }
        Ok(b)
    }
}

impl TryFrom<String> for Baseline {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Baseline> for String {
    fn from(b: Baseline) -> String {
        b.to_string()
    }
}

impl fmt::Display for Baseline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = [(self.fixed_v, "fixed_v"), (self.fixed_s, "fixed_s"), (self.fixed_w, "fixed_w")]
            .iter()
            .filter(|(on, _)| *on)
            .map(|(_, name)| *name)
            .collect();
        if parts.is_empty() {
            f.write_str("none")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Precoder,
    Waveform,
    Filter,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CodesignParams {
    pub mode: WaveformMode,
    pub baseline: Baseline,
    pub outer_tol: f64,
    pub outer_max: usize,
    /// Rate floor shared by the precoder and waveform steps.
    pub mi0: f64,
    pub order: Vec<Step>,
    pub precoder: PrecoderDesignParams,
    pub waveform: WaveformDesignParams,
}

impl Default for CodesignParams {
    fn default() -> Self {
        Self {
            mode: WaveformMode::Similarity,
            baseline: Baseline::NONE,
            outer_tol: 1e-3,
            outer_max: 30,
            mi0: 7.0,
            order: vec![Step::Precoder, Step::Waveform, Step::Filter],
            precoder: PrecoderDesignParams::default(),
            waveform: WaveformDesignParams::default(),
        }
    }
}

impl CodesignParams {
    pub fn validate(&self) -> Result<()> {
        self.baseline.validate()?;
        if !(self.outer_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("outer_tol = {} must be positive", self.outer_tol)));
        }
        let mut seen = self.order.clone();
        seen.sort_by_key(|s| *s as u8);
        if seen != [Step::Precoder, Step::Waveform, Step::Filter] {
            return Err(Error::InvalidConfig(format!("order {:?} must list each step once", self.order)));
        }
        self.precoder_params().validate()?;
        self.waveform_params().validate()
    }

    pub fn precoder_params(&self) -> PrecoderDesignParams {
        PrecoderDesignParams { mi0: self.mi0, ..self.precoder }
    }

    pub fn waveform_params(&self) -> WaveformDesignParams {
        WaveformDesignParams { mi0: self.mi0, ..self.waveform }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HistoryRow {
    pub outer_iter: usize,
    pub sinr_db: f64,
    pub rate_nats: f64,
    pub r_of_v: f64,
}

#[derive(Debug, Clone)]
pub struct DesignState {
    pub v: CMat,
    pub s: CVec,
    pub w: CVec,
    /// Linear SINR.
    pub sinr: f64,
    pub rate: f64,
    pub r_of_v: f64,
    pub outer_iter: usize,
    pub history: Vec<HistoryRow>,
    pub precoder_traces: Vec<Vec<PrecoderIter>>,
    pub waveform_traces: Vec<Vec<WaveformIter>>,
    /// Inner problems of the last waveform step.
    pub records: Vec<SdpRecord>,
}

impl DesignState {
    fn refresh(&mut self, inst: &ScenarioInstance) -> Result<()> {
        self.sinr = radar_sinr(inst, &self.w, &self.s, &self.v)?;
        self.rate = avg_rate(inst, &self.s, &self.v)?;
        self.r_of_v = r_of_v(inst, &self.w, &self.v)?;
        Ok(())
    }

    fn log(&mut self) {
        self.history.push(HistoryRow {
            outer_iter: self.outer_iter,
            sinr_db: to_db(self.sinr),
            rate_nats: self.rate,
            r_of_v: self.r_of_v,
        });
    }
}

/// `√(P_B/D) [I_D 0]ᵀ`.
pub fn initial_precoder(inst: &ScenarioInstance) -> CMat {
    let d = inst.dims();
    let a = (inst.params().p_b / d.d as f64).sqrt();
    let mut v = CMat::zeros(d.nt, d.d);
    for i in 0..d.d {
        v[(i, i)] = c(a, 0.0);
    }
    v
}

/// Starting point: scaled partial identity precoder, LFM waveform and the
/// matching optimal filter.
pub fn initialize(inst: &ScenarioInstance) -> Result<DesignState> {
    let v = initial_precoder(inst);
    let s = reference_waveform_lfm(inst.dims(), inst.params().p_r);
    let w = update_receive_filter(inst, &v, &s)?;
    let mut st = DesignState {
        v,
        s,
        w,
        sinr: 0.0,
        rate: 0.0,
        r_of_v: 0.0,
        outer_iter: 0,
        history: Vec::new(),
        precoder_traces: Vec::new(),
        waveform_traces: Vec::new(),
        records: Vec::new(),
    };
    st.refresh(inst)?;
    Ok(st)
}

/// [`initialize`], with the precoder moved onto the rate floor if needed
/// and the filter matched to it.
pub fn feasible_start(inst: &ScenarioInstance, pp: &PrecoderDesignParams) -> Result<DesignState> {
    let mut st = initialize(inst)?;
    if st.rate < pp.mi0 {
        // Every later step assumes a rate-feasible start.
        st.v = restore_feasibility(inst, &st.s, &st.v, pp)?;
        st.w = update_receive_filter(inst, &st.v, &st.s)?;
        st.refresh(inst)?;
    }
    Ok(st)
}

fn recoverable(e: &Error) -> bool {
    matches!(
        e,
        Error::Infeasible(_) | Error::NumericalFailure(_) | Error::DegenerateDenominator(_) | Error::NoNullspace { .. }
    )
}

/// Runs the alternating design until the SINR in dB changes by less than
/// `outer_tol` between outer iterations.
pub fn run_codesign(inst: &ScenarioInstance, params: &CodesignParams) -> Result<DesignState> {
    params.validate()?;
    let pp = params.precoder_params();
    let wp = params.waveform_params();
    let mut st = feasible_start(inst, &pp)?;
    let s0 = st.s.clone();
    st.log();

    let mut idle = 0;
    for outer in 1..=params.outer_max {
        let before = st.sinr;
        let mut accepted = false;
        for step in &params.order {
            match step {
                Step::Precoder if !params.baseline.fixed_v => {
                    let out = design_precoder(inst, &st.s, &st.w, &st.v, &pp)?;
                    accepted |= out.trace.len() > 1;
                    st.v = out.v;
                    st.precoder_traces.push(out.trace);
                }
                Step::Waveform if !params.baseline.fixed_s => {
                    match design_waveform(params.mode, inst, &st.v, &st.w, &st.s, &s0, &wp) {
                        Ok(out) => {
                            accepted |= out.accepted > 0;
                            st.s = out.s;
                            st.waveform_traces.push(out.trace);
                            st.records = out.records;
                        }
                        Err(e) if recoverable(&e) => {}
                        Err(e) => return Err(e),
                    }
                }
                Step::Filter if !params.baseline.fixed_w => {
                    let prev = radar_sinr(inst, &st.w, &st.s, &st.v)?;
                    let w = update_receive_filter(inst, &st.v, &st.s)?;
                    // The eigen-solver is optimal only to rounding; keep the
                    // old filter if it is not beaten.
                    if radar_sinr(inst, &w, &st.s, &st.v)? >= prev {
                        accepted = true;
                        st.w = w;
                    }
                }
                _ => {}
            }
        }
        st.outer_iter = outer;
        st.refresh(inst)?;
        st.log();
        if (to_db(st.sinr) - to_db(before)).abs() < params.outer_tol {
            break;
        }
        idle = if accepted { 0 } else { idle + 1 };
        if idle >= 2 {
            return Err(Error::Stalled(format!("no accepted step in outer iterations {} and {outer}", outer - 1)));
        }
    }
    Ok(st)
}

/// Constraint violations of a final design, empty when it is feasible.
pub fn audit(inst: &ScenarioInstance, params: &CodesignParams, st: &DesignState) -> Result<Vec<String>> {
    let p = inst.params();
    let mut out = Vec::new();
    let rate = avg_rate(inst, &st.s, &st.v)?;
    if !(rate >= params.mi0 - 1e-6) {
        out.push(format!("rate {rate} below {}", params.mi0));
    }
    let pow = trace_re(&(&st.v * st.v.adjoint()));
    if !(pow <= p.p_b + 1e-9) {
        out.push(format!("precoder power {pow} above {}", p.p_b));
    }
    let energy = st.s.norm_squared();
    match params.mode {
        WaveformMode::Similarity => {
            if !(energy <= p.p_r + 1e-9) {
                out.push(format!("waveform energy {energy} above {}", p.p_r));
            }
            let s0 = reference_waveform_lfm(inst.dims(), p.p_r);
            let sim = similarity_value(&st.s, &s0, p.p_r);
            let cap = params.waveform.epsilon * p.p_r;
            if !(sim <= cap + 1e-8) {
                out.push(format!("similarity {sim} above {cap}"));
            }
        }
        WaveformMode::Papr => {
            if !((energy - p.p_r).abs() <= 1e-9 * p.p_r.max(1.0)) {
                out.push(format!("waveform energy {energy} differs from {}", p.p_r));
            }
            let cap = params.waveform.eta * p.p_r / st.s.len() as f64;
            let peak = st.s.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
            if !(peak <= cap + 1e-9) {
                out.push(format!("peak power {peak} above {cap}"));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::ScenarioConfig;

    #[test]
    fn baseline_parsing() {
        assert_eq!("none".parse::<Baseline>().unwrap(), Baseline::NONE);
        assert_eq!("fixed_V".parse::<Baseline>().unwrap(), Baseline::FIXED_V);
        let both: Baseline = "fixed_s,fixed_w".parse().unwrap();
        assert!(both.validate().is_err());
        assert!("fixed_x".parse::<Baseline>().is_err());
        assert_eq!(Baseline::FIXED_W.to_string(), "fixed_w");
    }

    #[test]
    fn fixed_s_and_w_is_a_config_error() {
        let inst = ScenarioConfig::default().sample(1).unwrap();
        let params = CodesignParams { baseline: "fixed_s,fixed_w".parse().unwrap(), ..Default::default() };
        assert!(matches!(run_codesign(&inst, &params), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn order_must_be_a_permutation() {
        let params = CodesignParams { order: vec![Step::Filter, Step::Filter, Step::Waveform], ..Default::default() };
        assert!(params.validate().is_err());
    }

    #[test]
    fn initial_state() {
        let inst = ScenarioConfig::default().sample(2).unwrap();
        let st = initialize(&inst).unwrap();
        assert!((crate::linalg::trace_re(&(&st.v * st.v.adjoint())) - 1.0).abs() < 1e-12);
        assert!((st.s.norm_squared() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn joint_design_is_monotone_and_feasible() {
        let inst = ScenarioConfig::default().sample(3).unwrap();
        let params = CodesignParams::default();
        let st = run_codesign(&inst, &params).unwrap();
        for pair in st.history.windows(2) {
            assert!(pair[1].sinr_db >= pair[0].sinr_db - 1e-6);
        }
        assert!(st.rate >= params.mi0 - 1e-6);
        assert!(crate::linalg::trace_re(&(&st.v * st.v.adjoint())) <= 1.0 + 1e-9);
        assert!(st.s.norm_squared() <= 10.0 + 1e-9);
        assert!(audit(&inst, &params, &st).unwrap().is_empty());
    }
}
