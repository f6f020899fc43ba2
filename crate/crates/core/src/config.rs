//! Scenario configuration: a strict flat `key = value` format with
//! `[section]` headers. Unknown sections or keys abort with the offending
//! line number before any computation starts.

use crate::bounds::BoundKind;
use crate::error::{Error, Result};

/// Which physical scenario a run executes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    /// Gaussian classical density released from the trap (frequency
    /// switched off at t = 0); classical bounds.
    QuenchClassical,
    /// Wigner state released from the trap; quantum/semiclassical bounds.
    QuenchQuantum,
    /// Frequency held at omega0; nothing moves.
    Stationary,
    /// Sudden jump to a caller-chosen post-quench frequency.
    CustomOmega,
}

impl ScenarioKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "quench-classical" => Some(Self::QuenchClassical),
            "quench-quantum" => Some(Self::QuenchQuantum),
            "stationary" => Some(Self::Stationary),
            "custom-omega" => Some(Self::CustomOmega),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::QuenchClassical => "quench-classical",
            Self::QuenchQuantum => "quench-quantum",
            Self::Stationary => "stationary",
            Self::CustomOmega => "custom-omega",
        }
    }
}

/// Initial state of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    HoEigenstate { n: usize },
    Gaussian { sigma_q: f64, sigma_p: f64 },
    ClassicalGaussian { sigma_q: f64, sigma_p: f64 },
}

/// Parsed run configuration with defaults already applied.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub hbar: f64,
    pub mass: f64,
    pub omega0: f64,
    pub grid_n: usize,
    pub halfwidth_sigmas: f64,
    /// None selects the scenario's natural default state.
    pub state: Option<StateKind>,
    /// Simulation window in units of 1/omega0.
    pub t_max: f64,
    pub steps: usize,
    /// None selects the scenario's natural default bounds.
    pub bounds: Option<Vec<BoundKind>>,
    /// Post-quench frequency for `custom-omega`, in the config's units.
    pub omega_post: Option<f64>,
    pub series_name: String,
    pub summary_name: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioKind::QuenchClassical,
            hbar: 1.0,
            mass: 1.0,
            omega0: 1.0,
            grid_n: 512,
            halfwidth_sigmas: 8.0,
            state: None,
            t_max: 5.0,
            steps: 500,
            bounds: None,
            omega_post: None,
            series_name: "series.csv".into(),
            summary_name: "summary.txt".into(),
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .map_err(|_| err(line, format!("key '{key}' needs a number, got '{v}'")))
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| err(line, format!("key '{key}' needs a non-negative integer, got '{v}'")))
}

fn parse_state(line: usize, v: &str) -> Result<StateKind> {
    let parts: Vec<&str> = v.split_whitespace().collect();
    match parts.as_slice() {
        ["ho-eigenstate", n] => Ok(StateKind::HoEigenstate { n: parse_usize(line, "kind", n)? }),
        ["gaussian", sq, sp] => Ok(StateKind::Gaussian {
            sigma_q: parse_f64(line, "kind", sq)?,
            sigma_p: parse_f64(line, "kind", sp)?,
        }),
        ["classical-gaussian", sq, sp] => Ok(StateKind::ClassicalGaussian {
            sigma_q: parse_f64(line, "kind", sq)?,
            sigma_p: parse_f64(line, "kind", sp)?,
        }),
        _ => Err(err(
            line,
            format!(
                "state kind '{v}' not recognized; expected 'ho-eigenstate N', \
                 'gaussian SIGMA_Q SIGMA_P', or 'classical-gaussian SIGMA_Q SIGMA_P'"
            ),
        )),
    }
}

fn parse_bounds(line: usize, v: &str) -> Result<Vec<BoundKind>> {
    let mut out = Vec::new();
    for item in v.split(',') {
        let item = item.trim();
        let kind = match item {
            "qsl" => BoundKind::Qsl,
            "ssl" => BoundKind::Ssl,
            "csl" => BoundKind::Csl,
            "csl-timeavg" => BoundKind::CslTimeAvg,
            _ => {
                return Err(err(
                    line,
                    format!("unknown bound '{item}'; expected qsl, ssl, csl, csl-timeavg"),
                ))
            }
        };
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    if out.is_empty() {
        return Err(err(line, "empty bound list"));
    }
    Ok(out)
}

/// Parse a configuration file's text. Every key is validated strictly and
/// errors carry the 1-based line number.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut scenario_seen = false;
    let mut section = String::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(line_no, format!("malformed section header '{line}'")))?
                .trim();
            match name {
                "scenario" | "units" | "grid" | "state" | "time" | "bounds" | "output" => {
                    section = name.to_string();
                }
                _ => return Err(err(line_no, format!("unknown section '[{name}]'"))),
            }
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(line_no, format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(err(line_no, format!("key '{key}' has no value")));
        }

        match (section.as_str(), key) {
            ("scenario", "kind") => {
                cfg.scenario = ScenarioKind::parse(value).ok_or_else(|| {
                    err(
                        line_no,
                        format!(
                            "unknown scenario '{value}'; expected quench-classical, \
                             quench-quantum, stationary, or custom-omega"
                        ),
                    )
                })?;
                scenario_seen = true;
            }
            ("scenario", "omega_post") => {
                cfg.omega_post = Some(parse_f64(line_no, key, value)?);
            }
            ("units", "hbar") => cfg.hbar = parse_f64(line_no, key, value)?,
            ("units", "mass") => cfg.mass = parse_f64(line_no, key, value)?,
            ("units", "omega0") => cfg.omega0 = parse_f64(line_no, key, value)?,
            ("grid", "n") => cfg.grid_n = parse_usize(line_no, key, value)?,
            ("grid", "halfwidth_sigmas") => {
                cfg.halfwidth_sigmas = parse_f64(line_no, key, value)?
            }
            ("state", "kind") => cfg.state = Some(parse_state(line_no, value)?),
            ("time", "t_max") => cfg.t_max = parse_f64(line_no, key, value)?,
            ("time", "steps") => cfg.steps = parse_usize(line_no, key, value)?,
            ("bounds", "evaluate") => cfg.bounds = Some(parse_bounds(line_no, value)?),
            ("output", "series") => cfg.series_name = value.to_string(),
            ("output", "summary") => cfg.summary_name = value.to_string(),
            ("", _) => {
                return Err(err(line_no, format!("key '{key}' appears before any [section]")))
            }
            (sec, _) => {
                return Err(err(line_no, format!("unknown key '{key}' in section [{sec}]")))
            }
        }
    }

    if !scenario_seen {
        return Err(err(0, "missing required [scenario] kind"));
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &ScenarioConfig) -> Result<()> {
    let bad = |message: String| Err(err(0, message));
    if !(cfg.hbar > 0.0 && cfg.mass > 0.0 && cfg.omega0 > 0.0) {
        return bad("units must be strictly positive".into());
    }
    if cfg.steps < 100 {
        return bad(format!("time steps must be >= 100, got {}", cfg.steps));
    }
    if !(cfg.t_max > 0.0) {
        return bad(format!("t_max must be positive, got {}", cfg.t_max));
    }
    if cfg.grid_n < 16 {
        return bad(format!("grid n must be >= 16, got {}", cfg.grid_n));
    }
    if !(cfg.halfwidth_sigmas > 0.0) {
        return bad(format!(
            "halfwidth_sigmas must be positive, got {}",
            cfg.halfwidth_sigmas
        ));
    }
    if let Some(StateKind::Gaussian { sigma_q, sigma_p })
    | Some(StateKind::ClassicalGaussian { sigma_q, sigma_p }) = cfg.state
    {
        if !(sigma_q > 0.0 && sigma_p > 0.0) {
            return bad("state widths must be positive".into());
        }
    }
    if cfg.scenario == ScenarioKind::CustomOmega {
        match cfg.omega_post {
            Some(w) if w >= 0.0 => {}
            Some(w) => return bad(format!("omega_post must be >= 0, got {w}")),
            None => return bad("custom-omega needs 'omega_post' in [scenario]".into()),
        }
    } else if cfg.omega_post.is_some() {
        return bad("omega_post is only meaningful for scenario custom-omega".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let cfg = parse_config("[scenario]\nkind = quench-classical\n").unwrap();
        assert_eq!(cfg.scenario, ScenarioKind::QuenchClassical);
        assert_eq!(cfg.grid_n, 512);
        assert_eq!(cfg.steps, 500);
        assert_eq!(cfg.t_max, 5.0);
        assert_eq!((cfg.hbar, cfg.mass, cfg.omega0), (1.0, 1.0, 1.0));
        assert!(cfg.state.is_none());
        assert!(cfg.bounds.is_none());
    }

    #[test]
    fn full_config_round_trip() {
        let text = "\
# comment
[scenario]
kind = quench-quantum

[units]
hbar = 2.0
mass = 3.0
omega0 = 0.5

[grid]
n = 256
halfwidth_sigmas = 7.5

[state]
kind = ho-eigenstate 2

[time]
t_max = 2.5
steps = 150

[bounds]
evaluate = qsl, ssl

[output]
series = out.csv
summary = sum.txt
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.scenario, ScenarioKind::QuenchQuantum);
        assert_eq!((cfg.hbar, cfg.mass, cfg.omega0), (2.0, 3.0, 0.5));
        assert_eq!(cfg.grid_n, 256);
        assert_eq!(cfg.state, Some(StateKind::HoEigenstate { n: 2 }));
        assert_eq!(cfg.t_max, 2.5);
        assert_eq!(cfg.steps, 150);
        assert_eq!(cfg.bounds, Some(vec![BoundKind::Qsl, BoundKind::Ssl]));
        assert_eq!(cfg.series_name, "out.csv");
        assert_eq!(cfg.summary_name, "sum.txt");
    }

    #[test]
    fn unknown_key_reports_line_number() {
        let text = "[scenario]\nkind = stationary\n[grid]\nresolution = 12\n";
        match parse_config(text).unwrap_err() {
            Error::Config { line, message } => {
                assert_eq!(line, 4);
                assert!(message.contains("resolution"), "{message}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_section_and_malformed_lines_rejected() {
        assert!(parse_config("[scenario]\nkind = stationary\n[plotting]\nx = 1\n").is_err());
        assert!(parse_config("[scenario]\nkind stationary\n").is_err());
        assert!(parse_config("kind = stationary\n").is_err());
        assert!(parse_config("[scenario]\nkind = warp-drive\n").is_err());
    }

    #[test]
    fn numeric_validation() {
        assert!(parse_config("[scenario]\nkind = stationary\n[time]\nsteps = 50\n").is_err());
        assert!(parse_config("[scenario]\nkind = stationary\n[time]\nt_max = -1\n").is_err());
        assert!(parse_config("[scenario]\nkind = stationary\n[units]\nhbar = 0\n").is_err());
        assert!(parse_config("[scenario]\nkind = stationary\n[grid]\nn = 8\n").is_err());
    }

    #[test]
    fn gaussian_state_parsing() {
        let cfg = parse_config(
            "[scenario]\nkind = quench-classical\n[state]\nkind = classical-gaussian 0.7 0.9\n",
        )
        .unwrap();
        assert_eq!(cfg.state, Some(StateKind::ClassicalGaussian { sigma_q: 0.7, sigma_p: 0.9 }));
        assert!(parse_config("[scenario]\nkind = quench-classical\n[state]\nkind = gaussian 0.7\n")
            .is_err());
    }

    #[test]
    fn custom_omega_needs_frequency() {
        assert!(parse_config("[scenario]\nkind = custom-omega\n").is_err());
        let cfg =
            parse_config("[scenario]\nkind = custom-omega\nomega_post = 0.25\n").unwrap();
        assert_eq!(cfg.omega_post, Some(0.25));
        assert!(parse_config("[scenario]\nkind = stationary\nomega_post = 0.25\n").is_err());
    }
}
