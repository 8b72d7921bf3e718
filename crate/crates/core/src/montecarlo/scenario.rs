use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::config::{NeighborList, SimConfig};
use crate::error::{Error, Result};
use crate::geometry::{
    hex_layout, place_boundary_user, place_outdoor_users, place_users_uniform, Building, NetworkLayout, Point,
    RadioMap, ShadowField, Transmitter, UserSet,
};
use crate::interference::interference_plus_noise_dbm;
use crate::powerctrl::initial_power;
use crate::propagation::{PathLossModel, PowerDbm};

const PLACEMENT_ATTEMPTS: usize = 100_000;

/// Base stations, target building and shadowing of one drop, without users.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub layout: NetworkLayout,
    /// Target building, centered on the target femtocell.
    pub building: Building,
    /// Macro sites first, then interfering femtocells.
    pub competitors: Vec<Transmitter>,
    pub shadow: ShadowField,
    pub femto_model: PathLossModel,
    pub min_distance: f64,
    pub noise: PowerDbm,
    pub neighbors: NeighborList,
}

impl Environment {
    pub fn radio_map(&self) -> Result<RadioMap<'_>> {
        RadioMap::new(&self.building, self.femto_model, &self.competitors, &self.shadow, self.min_distance.max(1.0))
    }

    pub fn macro_count(&self) -> usize {
        self.layout.macro_bs.len()
    }

    /// Interference plus noise measured at the femtocell site, `Z_u(0)`.
    pub fn site_interference_plus_noise(&self) -> Result<PowerDbm> {
        interference_plus_noise_dbm(self.radio_map()?.interference_at_site_mw(), self.noise)
    }

    /// Strongest neighbor pilot at the site, `I_b,max`, over the configured neighbor list.
    pub fn strongest_neighbor(&self) -> Result<PowerDbm> {
        let map = self.radio_map()?;
        let n = match self.neighbors {
            NeighborList::Macro => self.macro_count(),
            NeighborList::All => self.competitors.len(),
        };
        let best = (0..n).map(|i| map.competitor_at_site_dbm(i)).fold(f64::NEG_INFINITY, f64::max);
        PowerDbm::new(best)
    }
}

/// One complete drop.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub env: Environment,
    pub users: UserSet,
}

/// Draws everything but the users. Order of draws: target azimuth,
/// interferer positions and measurement shadowing, shadow field.
pub fn generate_environment<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<Environment> {
    cfg.validate()?;
    let femto_model = cfg.femto_model()?;
    let macro_model = cfg.macro_model()?;
    let macro_power = PowerDbm::new(cfg.macro_power)?;
    let macros = hex_layout(cfg.macro_radius)?;

    let target = Point::polar(cfg.femto_distance, rng.random::<f64>() * std::f64::consts::TAU);
    let building = cfg.building()?.at(target);

    let mut competitors: Vec<Transmitter> = macros
        .iter()
        .map(|&position| Transmitter { position, power: macro_power, model: macro_model, fixed_loss_db: 0.0 })
        .collect();

    let macro_shadow = Normal::new(0.0, cfg.macro_sigma().max(f64::MIN_POSITIVE)).expect("finite sigma");
    let femto_shadow = Normal::new(0.0, cfg.femto_sigma().max(f64::MIN_POSITIVE)).expect("finite sigma");
    let draw = |n: &Normal<f64>, sigma: f64, rng: &mut R| if sigma > 0.0 { n.sample(rng) } else { 0.0 };
    let p_max = PowerDbm::new(cfg.femto_max_power)?;
    let own_wall = cfg.interferer_wall_loss;
    let mut interferers = Vec::with_capacity(cfg.interferers);
    for _ in 0..cfg.interferers {
        let position = sample_interferer_position(cfg, target, rng)?;
        // strongest neighbor heard inside the interferer's own building
        let mut best = f64::NEG_INFINITY;
        for m in &macros {
            let s = draw(&macro_shadow, cfg.macro_sigma(), rng);
            let d = position.distance(*m).max(cfg.min_distance.max(1.0));
            best = best.max(cfg.macro_power - macro_model.path_loss(d)? - own_wall - s);
        }
        if cfg.neighbors == NeighborList::All {
            for t in &interferers {
                let t: &Transmitter = t;
                let s = draw(&femto_shadow, cfg.femto_sigma(), rng);
                let d = position.distance(t.position).max(cfg.min_distance.max(1.0));
                best = best.max(t.power.dbm() - femto_model.path_loss(d)? - 2.0 * own_wall - s);
            }
        }
        let power = initial_power(PowerDbm::new(best)?, cfg.initial_radius, &femto_model, p_max)?;
        interferers.push(Transmitter { position, power, model: femto_model, fixed_loss_db: own_wall });
    }
    competitors.extend(interferers.iter().copied());

    let mut sigmas = Vec::with_capacity(competitors.len() + 1);
    sigmas.push(cfg.femto_sigma());
    sigmas.extend(std::iter::repeat_n(cfg.macro_sigma(), macros.len()));
    sigmas.extend(std::iter::repeat_n(cfg.femto_sigma(), interferers.len()));
    let shadow = if cfg.shadowing {
        ShadowField::sample(&sigmas, cfg.shadow_sectors, rng)?
    } else {
        ShadowField::none(sigmas.len())
    };

    let layout = NetworkLayout {
        macro_bs: macros.iter().map(|&p| (p, macro_power)).collect(),
        interferer_femtos: interferers.iter().map(|t| (t.position, t.power)).collect(),
        target_femto: target,
        r_m: cfg.macro_radius,
        d_b: cfg.femto_distance,
    };
    Ok(Environment {
        layout,
        building,
        competitors,
        shadow,
        femto_model,
        min_distance: cfg.min_distance,
        noise: PowerDbm::new(cfg.noise)?,
        neighbors: cfg.neighbors,
    })
}

fn sample_interferer_position<R: Rng + ?Sized>(cfg: &SimConfig, target: Point, rng: &mut R) -> Result<Point> {
    for _ in 0..PLACEMENT_ATTEMPTS {
        let r = cfg.macro_radius * rng.random::<f64>().sqrt();
        let p = Point::polar(r, rng.random::<f64>() * std::f64::consts::TAU);
        if p.distance(target) >= cfg.interferer_separation {
            return Ok(p);
        }
    }
    Err(Error::InvalidArgument(format!(
        "cannot place interferers {} m away from the target inside a {} m cell",
        cfg.interferer_separation, cfg.macro_radius
    )))
}

/// Indoor and outdoor users for `building`. With `boundary_user` set, the
/// last indoor user sits on the wall.
pub fn generate_users<R: Rng + ?Sized>(cfg: &SimConfig, users: usize, building: &Building, rng: &mut R) -> Result<UserSet> {
    let uniform = if cfg.boundary_user { users - 1 } else { users };
    let mut indoor = if uniform > 0 { place_users_uniform(building, uniform, cfg.min_distance, rng)? } else { Vec::new() };
    if cfg.boundary_user {
        indoor.push(place_boundary_user(building, rng));
    }
    let outdoor = place_outdoor_users(building, cfg.outdoor_users, cfg.outdoor_band, rng)?;
    Ok(UserSet { indoor, outdoor })
}

/// A complete drop: environment first, then users.
pub fn generate_scenario<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<Scenario> {
    let env = generate_environment(cfg, rng)?;
    let users = generate_users(cfg, cfg.users, &env.building, rng)?;
    Ok(Scenario { env, users })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_drop_shape() {
        let cfg = SimConfig::default();
        let s = generate_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(s.env.layout.macro_bs.len(), 19);
        assert_eq!(s.env.layout.interferer_femtos.len(), 50);
        assert!((s.env.layout.target_femto.norm() - 400.0).abs() < 1e-9);
        assert!(s.env.layout.interferer_femtos.iter().all(|(p, pw)| p.norm() <= 580.0 && pw.dbm() <= 23.0));
        assert_eq!(s.users.indoor.len(), 10);
        assert_eq!(s.users.outdoor.len(), 20);
        let last = *s.users.indoor.last().unwrap();
        assert!((last.distance(s.env.building.center()) - 20.0).abs() < 1e-9);
        assert!(s.users.indoor.iter().all(|&u| s.env.building.contains(u)));
    }

    #[test]
    fn same_seed_same_drop() {
        let cfg = SimConfig::real_scenario();
        let a = generate_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = generate_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        let c = generate_scenario(&cfg, &mut ChaCha8Rng::seed_from_u64(10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn interferer_powers_follow_initial_rule() {
        let cfg = SimConfig::default();
        let env = generate_environment(&cfg, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
        let model = cfg.femto_model().unwrap();
        let macro_model = cfg.macro_model().unwrap();
        for &(p, pw) in &env.layout.interferer_femtos {
            let best = env
                .layout
                .macro_bs
                .iter()
                .map(|(m, mp)| mp.dbm() - macro_model.path_loss(p.distance(*m).max(1.0)).unwrap() - 10.0)
                .fold(f64::NEG_INFINITY, f64::max);
            let want = (best + model.path_loss(15.0).unwrap()).min(23.0);
            assert!((pw.dbm() - want).abs() < 1e-9);
            assert!(p.distance(env.layout.target_femto) >= cfg.interferer_separation);
        }
    }

    #[test]
    fn neighbor_list_all_is_no_weaker() {
        let macro_only = SimConfig::default();
        let all = SimConfig { neighbors: NeighborList::All, ..SimConfig::default() };
        let a = generate_environment(&macro_only, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = generate_environment(&all, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        for (x, y) in a.layout.interferer_femtos.iter().zip(&b.layout.interferer_femtos).take(1) {
            assert_eq!(x, y);
        }
        assert!(b.strongest_neighbor().unwrap() >= a.strongest_neighbor().unwrap());
    }

    #[test]
    fn site_measurements() {
        let cfg = SimConfig { interferers: 0, ..SimConfig::default() };
        let env = generate_environment(&cfg, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let ib = env.strongest_neighbor().unwrap().dbm();
        // center macro at 400 m through a 10 dB wall
        assert!((ib - (43.0 - 37.0 - 40.0 * 400f64.log10() - 10.0)).abs() < 1e-9);
        let z = env.site_interference_plus_noise().unwrap().dbm();
        assert!(z > -96.8 && z < -95.0, "{z}");
    }
}
