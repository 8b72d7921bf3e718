//! Line-oriented `key = value` configuration.
//!
//! ```text
//! # comment
//! delta_p = 0.5
//! [building]
//! shape = rectangle
//! size = 20x15
//! wall_segments = 15:0.35, 10:0.30, 7:0.20, 2:0.15
//! ```
//!
//! A `[section]` header prefixes the keys below it, so `size` above is the
//! key `building.size`. Omitted keys keep their defaults.

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::montecarlo::{BuildingKind, NeighborList, SimConfig};

/// Every accepted key, with a short description.
pub const KEYS: &[(&str, &str)] = &[
    ("macro_radius", "macrocell radius r_m, m"),
    ("femto_distance", "target femtocell distance from the center macro site d_b, m"),
    ("building.shape", "circle | rectangle"),
    ("building.radius", "circular building radius r_b, m"),
    ("building.size", "rectangle footprint WxH, m"),
    ("building.wall_loss", "circular building wall loss L_p, dB"),
    ("building.wall_segments", "rectangle walls as loss:fraction, clockwise from the north-west corner"),
    ("interferer_wall_loss", "wall loss of interfering femtocells' buildings, dB"),
    ("initial_radius", "initial coverage radius r_ini, m"),
    ("min_distance", "minimum femtocell-user distance eps0, m"),
    ("intercept", "path loss at 1 m A_s, dB"),
    ("delta_p", "power control step, dB"),
    ("femto_max_power", "femtocell maximum power P_max, dBm"),
    ("macro_power", "macro pilot power P_m, dBm"),
    ("noise", "thermal noise W, dBm"),
    ("femto_exponent", "femtocell link exponent n_r"),
    ("macro_exponent", "macro link exponent"),
    ("threshold_exponent", "exponent n_e used for the threshold"),
    ("cinr_threshold", "CINR threshold gamma_th, dB"),
    ("gamma_delta", "threshold margin Gamma_delta, dB"),
    ("users", "indoor users K"),
    ("boundary_user", "place one indoor user on the wall (true | false)"),
    ("outdoor_users", "outdoor diagnostic users"),
    ("outdoor_band", "outdoor user band beyond the wall, m"),
    ("interferers", "interfering femtocells"),
    ("interferer_separation", "minimum interferer distance from the target, m"),
    ("neighbors", "neighbor list for initial power: macro | all"),
    ("shadowing.enabled", "log-normal shadowing (true | false)"),
    ("shadowing.macro_sigma", "macro shadowing sigma, dB"),
    ("shadowing.femto_sigma", "femtocell shadowing sigma, dB"),
    ("shadowing.sectors", "angular shadowing sectors around the target"),
    ("trials", "Monte-Carlo trials"),
    ("seed", "master seed"),
    ("angular_steps", "coverage rays"),
    ("radial_step", "coarse radial step, m"),
    ("radial_resolution", "boundary bisection resolution, m"),
    ("search_factor", "coverage search limit in building half-extents"),
    ("max_iterations", "controller iteration limit"),
    ("convergence_window", "iterations inspected for convergence"),
    ("power_floor", "abort power, dBm"),
];

fn num<T: FromStr>(key: &str, v: &str) -> std::result::Result<T, String> {
    v.parse().map_err(|_| format!("invalid value '{v}' for {key}"))
}

fn flag(key: &str, v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(format!("invalid value '{v}' for {key}, expected true or false")),
    }
}

fn segments(v: &str) -> std::result::Result<Vec<(f64, f64)>, String> {
    v.split(',')
        .map(|part| {
            let (loss, fraction) = part
                .trim()
                .split_once(':')
                .ok_or_else(|| format!("wall segment '{}' is not loss:fraction", part.trim()))?;
            Ok((num("wall loss", loss.trim())?, num("wall fraction", fraction.trim())?))
        })
        .collect()
}

/// Sets `key` on `cfg` from its textual value.
pub fn set_key(cfg: &mut SimConfig, key: &str, v: &str) -> std::result::Result<(), String> {
    match key {
        "macro_radius" => cfg.macro_radius = num(key, v)?,
        "femto_distance" => cfg.femto_distance = num(key, v)?,
        "building.shape" => {
            cfg.building_kind = match v {
                "circle" => BuildingKind::Circle,
                "rectangle" => BuildingKind::Rectangle,
                _ => return Err(format!("invalid value '{v}' for {key}, expected circle or rectangle")),
            }
        }
        "building.radius" => cfg.building_radius = num(key, v)?,
        "building.size" => {
            let (w, h) = v.split_once(['x', 'X']).ok_or_else(|| format!("invalid size '{v}', expected WxH"))?;
            cfg.building_width = num(key, w.trim())?;
            cfg.building_height = num(key, h.trim())?;
        }
        "building.wall_loss" => cfg.wall_loss = num(key, v)?,
        "building.wall_segments" => cfg.wall_segments = segments(v)?,
        "interferer_wall_loss" => cfg.interferer_wall_loss = num(key, v)?,
        "initial_radius" => cfg.initial_radius = num(key, v)?,
        "min_distance" => cfg.min_distance = num(key, v)?,
        "intercept" => cfg.intercept = num(key, v)?,
        "delta_p" => cfg.delta_p = num(key, v)?,
        "femto_max_power" => cfg.femto_max_power = num(key, v)?,
        "macro_power" => cfg.macro_power = num(key, v)?,
        "noise" => cfg.noise = num(key, v)?,
        "femto_exponent" => cfg.femto_exponent = num(key, v)?,
        "macro_exponent" => cfg.macro_exponent = num(key, v)?,
        "threshold_exponent" => cfg.threshold_exponent = num(key, v)?,
        "cinr_threshold" => cfg.cinr_threshold = num(key, v)?,
        "gamma_delta" => cfg.gamma_delta = num(key, v)?,
        "users" => cfg.users = num(key, v)?,
        "boundary_user" => cfg.boundary_user = flag(key, v)?,
        "outdoor_users" => cfg.outdoor_users = num(key, v)?,
        "outdoor_band" => cfg.outdoor_band = num(key, v)?,
        "interferers" => cfg.interferers = num(key, v)?,
        "interferer_separation" => cfg.interferer_separation = num(key, v)?,
        "neighbors" => {
            cfg.neighbors = match v {
                "macro" => NeighborList::Macro,
                "all" => NeighborList::All,
                _ => return Err(format!("invalid value '{v}' for {key}, expected macro or all")),
            }
        }
        "shadowing.enabled" => cfg.shadowing = flag(key, v)?,
        "shadowing.macro_sigma" => cfg.macro_shadow_sigma = num(key, v)?,
        "shadowing.femto_sigma" => cfg.femto_shadow_sigma = num(key, v)?,
        "shadowing.sectors" => cfg.shadow_sectors = num(key, v)?,
        "trials" => cfg.trials = num(key, v)?,
        "seed" => cfg.seed = num(key, v)?,
        "angular_steps" => cfg.angular_steps = num(key, v)?,
        "radial_step" => cfg.radial_step = num(key, v)?,
        "radial_resolution" => cfg.radial_resolution = num(key, v)?,
        "search_factor" => cfg.search_factor = num(key, v)?,
        "max_iterations" => cfg.max_iterations = num(key, v)?,
        "convergence_window" => cfg.convergence_window = num(key, v)?,
        "power_floor" => cfg.power_floor = num(key, v)?,
        _ => return Err(format!("unknown key '{key}'")),
    }
    Ok(())
}

/// Parses configuration text over the default (theory-verification) setup.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    parse_config_over(text, SimConfig::default())
}

/// Parses configuration text over `base`.
pub fn parse_config_over(text: &str, base: SimConfig) -> Result<SimConfig> {
    let mut cfg = base.clone();
    let mut section = String::new();
    let mut applied: Vec<(usize, String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| Error::Config { line: line_no, message: format!("malformed section header '{line}'") })?
                .trim();
            if name.is_empty() || name.contains(char::is_whitespace) {
                return Err(Error::Config { line: line_no, message: format!("malformed section header '{line}'") });
            }
            section = name.to_string();
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config { line: line_no, message: format!("expected key = value, got '{line}'") })?;
        let (k, v) = (k.trim(), v.trim());
        let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
        set_key(&mut cfg, &key, v).map_err(|message| Error::Config { line: line_no, message })?;
        applied.push((line_no, key, v.to_string()));
    }
    if let Err(e) = cfg.validate() {
        // blame the first line after which the configuration stops validating
        let mut probe = base;
        for (line_no, key, v) in &applied {
            set_key(&mut probe, key, v).expect("already parsed");
            if let Err(inner) = probe.validate() {
                return Err(Error::Config { line: *line_no, message: error_text(inner) });
            }
        }
        return Err(Error::Config { line: applied.last().map_or(0, |a| a.0), message: error_text(e) });
    }
    Ok(cfg)
}

fn error_text(e: Error) -> String {
    match e {
        Error::InvalidArgument(m) => m,
        other => other.to_string(),
    }
}
