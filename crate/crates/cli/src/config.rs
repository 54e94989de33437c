//! Config-file parsing: INI-style sections of `key = value` pairs.
//!
//! Frequencies carry a `_2pi_mhz` suffix and convert to rad/µs on load;
//! dimensionless fields are taken as written. `#` starts a comment.

use std::collections::BTreeMap;

use darkcool_core::models::PhysParams;
use darkcool_core::{two_pi_mhz, CoolError, Result, TWO_PI};

/// Parsed scenario kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    SteadySweep,
    Dynamics,
    Spectrum,
    ScatteringProfile,
    CollectiveRates,
    OptimalityScan,
    RecoilCompare,
}

impl Kind {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "steady_sweep" => Kind::SteadySweep,
            "dynamics" => Kind::Dynamics,
            "spectrum" => Kind::Spectrum,
            "scattering_profile" => Kind::ScatteringProfile,
            "collective_rates" => Kind::CollectiveRates,
            "optimality_scan" => Kind::OptimalityScan,
            "recoil_compare" => Kind::RecoilCompare,
            other => return Err(CoolError::invalid(format!("unknown scenario kind `{other}`"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Kind::SteadySweep => "steady_sweep",
            Kind::Dynamics => "dynamics",
            Kind::Spectrum => "spectrum",
            Kind::ScatteringProfile => "scattering_profile",
            Kind::CollectiveRates => "collective_rates",
            Kind::OptimalityScan => "optimality_scan",
            Kind::RecoilCompare => "recoil_compare",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelChoice {
    ThreeLevel,
    EffectiveBare,
    EffectiveDressed,
    TavisCummings,
    FullDressed,
    AnalyticWeak,
    AnalyticStrong,
}

impl ModelChoice {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "three_level" => ModelChoice::ThreeLevel,
            "effective_bare" => ModelChoice::EffectiveBare,
            "effective_dressed" => ModelChoice::EffectiveDressed,
            "tavis_cummings" => ModelChoice::TavisCummings,
            "full_dressed" => ModelChoice::FullDressed,
            "analytic_weak" => ModelChoice::AnalyticWeak,
            "analytic_strong" => ModelChoice::AnalyticStrong,
            other => return Err(CoolError::invalid(format!("unknown model `{other}`"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelChoice::ThreeLevel => "three_level",
            ModelChoice::EffectiveBare => "effective_bare",
            ModelChoice::EffectiveDressed => "effective_dressed",
            ModelChoice::TavisCummings => "tavis_cummings",
            ModelChoice::FullDressed => "full_dressed",
            ModelChoice::AnalyticWeak => "analytic_weak",
            ModelChoice::AnalyticStrong => "analytic_strong",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialChoice {
    DarkThermal,
    BrightThermal,
    DarkVacuum,
    BrightVacuum,
    BrightFock(usize),
    DarkFock(usize),
}

impl InitialChoice {
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(n) = s.strip_prefix("bright_fock:") {
            return Ok(InitialChoice::BrightFock(
                n.parse().map_err(|_| CoolError::invalid("bad fock index"))?,
            ));
        }
        if let Some(n) = s.strip_prefix("dark_fock:") {
            return Ok(InitialChoice::DarkFock(
                n.parse().map_err(|_| CoolError::invalid("bad fock index"))?,
            ));
        }
        Ok(match s {
            "dark_thermal" => InitialChoice::DarkThermal,
            "bright_thermal" => InitialChoice::BrightThermal,
            "dark_vacuum" => InitialChoice::DarkVacuum,
            "bright_vacuum" => InitialChoice::BrightVacuum,
            other => return Err(CoolError::invalid(format!("unknown initial state `{other}`"))),
        })
    }

    pub fn name(&self) -> String {
        match self {
            InitialChoice::DarkThermal => "dark_thermal".into(),
            InitialChoice::BrightThermal => "bright_thermal".into(),
            InitialChoice::DarkVacuum => "dark_vacuum".into(),
            InitialChoice::BrightVacuum => "bright_vacuum".into(),
            InitialChoice::BrightFock(n) => format!("bright_fock:{n}"),
            InitialChoice::DarkFock(n) => format!("dark_fock:{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Overlay {
    None,
    RateEquation,
    Ladder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecoilMode {
    Dynamics,
    Steady,
}

/// Where the crystal mode data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum ModesSource {
    ComOnly,
    Degenerate,
    UniformBand(f64),
    File(String),
}

impl ModesSource {
    pub fn parse(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("synth:") {
            if rest == "com_only" {
                return Ok(ModesSource::ComOnly);
            }
            if rest == "degenerate" {
                return Ok(ModesSource::Degenerate);
            }
            if let Some(bw) = rest.strip_prefix("uniform_band:") {
                let bw: f64 = bw
                    .parse()
                    .map_err(|_| CoolError::invalid("bad bandwidth (2pi MHz expected)"))?;
                return Ok(ModesSource::UniformBand(two_pi_mhz(bw)));
            }
            return Err(CoolError::invalid(format!("unknown synth kind `{rest}`")));
        }
        Ok(ModesSource::File(s.to_string()))
    }

    pub fn name(&self) -> String {
        match self {
            ModesSource::ComOnly => "synth:com_only".into(),
            ModesSource::Degenerate => "synth:degenerate".into(),
            ModesSource::UniformBand(bw) => format!("synth:uniform_band:{}", bw / TWO_PI),
            ModesSource::File(p) => p.clone(),
        }
    }
}

/// Full run description: physics + scenario + numerics + output.
#[derive(Debug, Clone)]
pub struct Config {
    pub params: PhysParams,
    pub kind: Kind,
    pub model: ModelChoice,
    pub sweep: Option<(String, Vec<f64>)>,
    pub outputs: Vec<String>,
    pub seed_figure: Option<String>,
    pub initial: InitialChoice,
    pub overlay: Overlay,
    pub n_list: Vec<usize>,
    pub table1: bool,
    pub recoil_mode: RecoilMode,
    pub quad_nodes: usize,
    pub cutoff_auto_strong: bool,
    pub modes_source: ModesSource,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub t_final_us: f64,
    pub n_out: usize,
    pub fit_window_us: (f64, f64),
    pub out_dir: String,
    pub name: String,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            params: PhysParams::default(),
            kind: Kind::Dynamics,
            model: ModelChoice::EffectiveDressed,
            sweep: None,
            outputs: vec!["mean_phonon".into()],
            seed_figure: None,
            initial: InitialChoice::DarkThermal,
            overlay: Overlay::None,
            n_list: Vec::new(),
            table1: false,
            recoil_mode: RecoilMode::Dynamics,
            quad_nodes: 16,
            cutoff_auto_strong: false,
            modes_source: ModesSource::ComOnly,
            rel_tol: 1e-8,
            abs_tol: 1e-10,
            t_final_us: 100.0,
            n_out: 101,
            fit_window_us: (0.0, 50.0),
            out_dir: "out".into(),
            name: "run".into(),
        }
    }
}

/// Set a PhysParams field by its config name; frequency-like fields take
/// values in 2π×MHz.
pub fn set_param(p: &mut PhysParams, name: &str, value: f64) -> Result<()> {
    match name {
        "Omega_g" => p.omega_g = two_pi_mhz(value),
        "Omega_e" => p.omega_e = two_pi_mhz(value),
        "Delta_g" => p.delta_g = two_pi_mhz(value),
        "Delta_e" => p.delta_e = two_pi_mhz(value),
        "gamma_g" => p.gamma_g = two_pi_mhz(value),
        "gamma_e" => p.gamma_e = two_pi_mhz(value),
        "omega_m" => p.omega_m = two_pi_mhz(value),
        "g_O" => p.g_odf = two_pi_mhz(value),
        "gamma_m" => p.gamma_m = two_pi_mhz(value),
        "eta_z" => p.eta_z = value,
        "n_th" => p.n_th = value,
        "k_ratio_g" => p.k_ratio_g = value,
        "k_ratio_e" => p.k_ratio_e = value,
        "eta_split" => p.eta_split = value,
        other => {
            return Err(CoolError::invalid(format!(
                "`{other}` is not a sweepable PhysParams field"
            )))
        }
    }
    Ok(())
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| CoolError::invalid(format!("bad grid `{s}`: {m}"));
    if let Some(rest) = s.strip_prefix("linspace:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected linspace:a:b:n"));
        }
        let a: f64 = parts[0].parse().map_err(|_| bad("a"))?;
        let b: f64 = parts[1].parse().map_err(|_| bad("b"))?;
        let n: usize = parts[2].parse().map_err(|_| bad("n"))?;
        if n < 2 {
            return Err(bad("n >= 2"));
        }
        return Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect());
    }
    if let Some(rest) = s.strip_prefix("logspace:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected logspace:a:b:n"));
        }
        let a: f64 = parts[0].parse().map_err(|_| bad("a"))?;
        let b: f64 = parts[1].parse().map_err(|_| bad("b"))?;
        let n: usize = parts[2].parse().map_err(|_| bad("n"))?;
        if n < 2 || a <= 0.0 || b <= 0.0 {
            return Err(bad("need n >= 2 and positive endpoints"));
        }
        let (la, lb) = (a.ln(), b.ln());
        return Ok((0..n)
            .map(|k| (la + (lb - la) * k as f64 / (n - 1) as f64).exp())
            .collect());
    }
    let vals: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad(t)))
        .collect::<Result<_>>()?;
    if vals.is_empty() {
        return Err(bad("empty"));
    }
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(bad("non-finite value"));
    }
    Ok(vals)
}

type Sections = BTreeMap<String, BTreeMap<String, String>>;

fn parse_sections(text: &str) -> Result<Sections> {
    let mut out: Sections = BTreeMap::new();
    let mut current = String::from("global");
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('[') && line.ends_with(']') {
            current = line[1..line.len() - 1].trim().to_string();
            out.entry(current.clone()).or_default();
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CoolError::FormatError {
                line: lineno + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            });
        };
        out.entry(current.clone())
            .or_default()
            .insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn get_f64(sec: &BTreeMap<String, String>, key: &str) -> Result<Option<f64>> {
    match sec.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<f64>()
            .map(Some)
            .map_err(|_| CoolError::invalid(format!("field `{key}`: bad number `{v}`"))),
    }
}

fn get_usize(sec: &BTreeMap<String, String>, key: &str) -> Result<Option<usize>> {
    match sec.get(key) {
        None => Ok(None),
        Some(v) => v
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CoolError::invalid(format!("field `{key}`: bad integer `{v}`"))),
    }
}

/// Parse a full config file.
pub fn parse_config(text: &str) -> Result<Config> {
    let sections = parse_sections(text)?;
    let mut cfg = Config::default();
    let empty = BTreeMap::new();

    let phys = sections.get("physics").unwrap_or(&empty);
    let p = &mut cfg.params;
    for (key, field) in [
        ("omega_g_2pi_mhz", "Omega_g"),
        ("omega_e_2pi_mhz", "Omega_e"),
        ("delta_g_2pi_mhz", "Delta_g"),
        ("delta_e_2pi_mhz", "Delta_e"),
        ("gamma_g_2pi_mhz", "gamma_g"),
        ("gamma_e_2pi_mhz", "gamma_e"),
        ("omega_m_2pi_mhz", "omega_m"),
        ("g_odf_2pi_mhz", "g_O"),
        ("gamma_m_2pi_mhz", "gamma_m"),
    ] {
        if let Some(v) = get_f64(phys, key)? {
            set_param(p, field, v)?;
        }
    }
    for key in ["eta_z", "n_th", "k_ratio_g", "k_ratio_e", "eta_split"] {
        if let Some(v) = get_f64(phys, key)? {
            set_param(p, key, v)?;
        }
    }
    if let Some(n) = get_usize(phys, "n_ions")? {
        p.n_ions = n;
    }
    if let Some(c) = phys.get("cutoff") {
        if c == "auto_strong" {
            cfg.cutoff_auto_strong = true;
        } else {
            p.cutoff = c
                .parse()
                .map_err(|_| CoolError::invalid(format!("field `cutoff`: bad value `{c}`")))?;
        }
    }
    if phys.get("omega_m_2pi_mhz").map(|s| s.as_str()) == Some("resonant") {
        return Err(CoolError::invalid("use omega_m = resonant under [scenario]"));
    }

    let scen = sections.get("scenario").unwrap_or(&empty);
    if let Some(k) = scen.get("kind") {
        cfg.kind = Kind::parse(k)?;
    }
    if let Some(m) = scen.get("model") {
        cfg.model = ModelChoice::parse(m)?;
    }
    if let Some(sweep) = scen.get("sweep") {
        let grid = scen
            .get("grid")
            .ok_or_else(|| CoolError::invalid("sweep set but no grid"))?;
        // validate the field name against PhysParams
        set_param(&mut cfg.params.clone(), sweep, 1.0)?;
        cfg.sweep = Some((sweep.clone(), parse_grid(grid)?));
    }
    if let Some(outs) = scen.get("outputs") {
        cfg.outputs = outs.split(',').map(|s| s.trim().to_string()).collect();
    }
    cfg.seed_figure = scen.get("seed_figure").cloned();
    if let Some(i) = scen.get("initial") {
        cfg.initial = InitialChoice::parse(i)?;
    }
    if let Some(o) = scen.get("overlay") {
        cfg.overlay = match o.as_str() {
            "none" => Overlay::None,
            "rate_equation" => Overlay::RateEquation,
            "ladder" => Overlay::Ladder,
            other => return Err(CoolError::invalid(format!("unknown overlay `{other}`"))),
        };
    }
    if let Some(nl) = scen.get("n_list") {
        cfg.n_list = nl
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| CoolError::invalid(format!("bad n_list entry `{t}`")))
            })
            .collect::<Result<_>>()?;
    }
    if let Some(t) = scen.get("table1") {
        cfg.table1 = t == "true";
    }
    if let Some(m) = scen.get("recoil_mode") {
        cfg.recoil_mode = match m.as_str() {
            "dynamics" => RecoilMode::Dynamics,
            "steady" => RecoilMode::Steady,
            other => return Err(CoolError::invalid(format!("unknown recoil mode `{other}`"))),
        };
    }
    if scen.get("omega_m").map(|s| s.as_str()) == Some("resonant") {
        let dc = darkcool_core::models::derive_couplings(&cfg.params)?;
        cfg.params.omega_m = dc.omega_s;
    }

    let num = sections.get("numerics").unwrap_or(&empty);
    if let Some(v) = get_f64(num, "rel_tol")? {
        cfg.rel_tol = v;
    }
    if let Some(v) = get_f64(num, "abs_tol")? {
        cfg.abs_tol = v;
    }
    if let Some(v) = get_f64(num, "t_final_us")? {
        cfg.t_final_us = v;
    }
    if let Some(v) = get_usize(num, "n_out")? {
        cfg.n_out = v.max(2);
    }
    if let Some(v) = get_usize(num, "quad_nodes")? {
        cfg.quad_nodes = v;
    }
    if let (Some(a), Some(b)) = (get_f64(num, "fit_from_us")?, get_f64(num, "fit_to_us")?) {
        cfg.fit_window_us = (a, b);
    }

    let modes = sections.get("modes").unwrap_or(&empty);
    if let Some(src) = modes.get("source") {
        cfg.modes_source = ModesSource::parse(src)?;
    }

    let out = sections.get("output").unwrap_or(&empty);
    if let Some(d) = out.get("dir") {
        cfg.out_dir = d.clone();
    }
    if let Some(n) = out.get("name") {
        cfg.name = n.clone();
    }
    Ok(cfg)
}

/// Serialize the resolved configuration (for the .meta artifact).
pub fn render_config(cfg: &Config) -> String {
    let p = &cfg.params;
    let mut s = String::new();
    s.push_str("[physics]\n");
    for (k, v) in [
        ("omega_g_2pi_mhz", p.omega_g / TWO_PI),
        ("omega_e_2pi_mhz", p.omega_e / TWO_PI),
        ("delta_g_2pi_mhz", p.delta_g / TWO_PI),
        ("delta_e_2pi_mhz", p.delta_e / TWO_PI),
        ("gamma_g_2pi_mhz", p.gamma_g / TWO_PI),
        ("gamma_e_2pi_mhz", p.gamma_e / TWO_PI),
        ("omega_m_2pi_mhz", p.omega_m / TWO_PI),
        ("g_odf_2pi_mhz", p.g_odf / TWO_PI),
        ("gamma_m_2pi_mhz", p.gamma_m / TWO_PI),
        ("eta_z", p.eta_z),
        ("n_th", p.n_th),
        ("k_ratio_g", p.k_ratio_g),
        ("k_ratio_e", p.k_ratio_e),
        ("eta_split", p.eta_split),
    ] {
        s.push_str(&format!("{k} = {v}\n"));
    }
    s.push_str(&format!("n_ions = {}\n", p.n_ions));
    s.push_str(&format!("cutoff = {}\n", p.cutoff));
    s.push_str("\n[scenario]\n");
    s.push_str(&format!("kind = {}\n", cfg.kind.name()));
    s.push_str(&format!("model = {}\n", cfg.model.name()));
    if let Some((name, grid)) = &cfg.sweep {
        s.push_str(&format!("sweep = {name}\n"));
        let cells: Vec<String> = grid.iter().map(|x| format!("{x}")).collect();
        s.push_str(&format!("grid = {}\n", cells.join(",")));
    }
    s.push_str(&format!("outputs = {}\n", cfg.outputs.join(",")));
    if let Some(f) = &cfg.seed_figure {
        s.push_str(&format!("seed_figure = {f}\n"));
    }
    s.push_str(&format!("initial = {}\n", cfg.initial.name()));
    if !cfg.n_list.is_empty() {
        let cells: Vec<String> = cfg.n_list.iter().map(|x| format!("{x}")).collect();
        s.push_str(&format!("n_list = {}\n", cells.join(",")));
    }
    s.push_str("\n[numerics]\n");
    s.push_str(&format!("rel_tol = {}\n", cfg.rel_tol));
    s.push_str(&format!("abs_tol = {}\n", cfg.abs_tol));
    s.push_str(&format!("t_final_us = {}\n", cfg.t_final_us));
    s.push_str(&format!("n_out = {}\n", cfg.n_out));
    s.push_str(&format!("quad_nodes = {}\n", cfg.quad_nodes));
    s.push_str("\n[modes]\n");
    s.push_str(&format!("source = {}\n", cfg.modes_source.name()));
    s.push_str("\n[output]\n");
    s.push_str(&format!("dir = {}\n", cfg.out_dir));
    s.push_str(&format!("name = {}\n", cfg.name));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_minimal() {
        let text = "
[physics]
omega_g_2pi_mhz = 40.0
eta_z = 0.001
n_ions = 2
cutoff = 12

[scenario]
kind = steady_sweep
model = three_level
sweep = Omega_g
grid = linspace:25:55:4
outputs = mean_phonon, rho_rr

[output]
name = demo
";
        let cfg = parse_config(text).unwrap();
        assert_eq!(cfg.kind, Kind::SteadySweep);
        assert_eq!(cfg.params.n_ions, 2);
        assert_eq!(cfg.params.cutoff, 12);
        let (name, grid) = cfg.sweep.unwrap();
        assert_eq!(name, "Omega_g");
        assert_eq!(grid, vec![25.0, 35.0, 45.0, 55.0]);
        assert_eq!(cfg.outputs, vec!["mean_phonon", "rho_rr"]);
        assert_eq!(cfg.name, "demo");
    }

    #[test]
    fn grid_forms() {
        assert_eq!(parse_grid("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
        let log = parse_grid("logspace:0.001:0.1:3").unwrap();
        assert!((log[1] - 0.01).abs() < 1e-12);
        assert!(parse_grid("linspace:1:2:1").is_err());
    }

    #[test]
    fn bad_sweep_field_rejected() {
        let text = "[scenario]\nkind = dynamics\nsweep = cutoff\ngrid = 1,2\n";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn resonant_omega_m() {
        let text = "
[physics]
omega_m_2pi_mhz = 1.0
[scenario]
omega_m = resonant
";
        let cfg = parse_config(text).unwrap();
        let dc = darkcool_core::models::derive_couplings(&cfg.params).unwrap();
        assert!((cfg.params.omega_m - dc.omega_s).abs() < 1e-12);
    }

    #[test]
    fn round_trip_render() {
        let cfg = Config::default();
        let text = render_config(&cfg);
        let back = parse_config(&text).unwrap();
        assert_eq!(back.params, cfg.params);
        assert_eq!(back.kind, cfg.kind);
    }
}
