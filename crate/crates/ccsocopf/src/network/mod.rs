//! Per-unit network model parsed from MATPOWER-style case files.
//!
//! All stored quantities are per-unit on the system MVA base. Buses are
//! reindexed densely (`0..n`) in file order; the original file labels are
//! kept on [`Bus::id`] and in [`NetworkCase::bus_index`].
//!
//! The branch model is a π-line with series admittance `g + jb` and a
//! charging susceptance `b_sh` split in half between the terminals.
//! Transformer taps and phase shifts present in the file are ignored
//! (taps treated as 1, shifts as 0): the lifted-variable formulation used
//! downstream models branches as plain π-lines.

mod matpower;

pub use matpower::parse_case;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CcopfError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BusKind {
    Slack,
    Pv,
    Pq,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Bus {
    /// External label from the case file.
    pub id: usize,
    pub kind: BusKind,
    /// Voltage magnitude bounds (p.u.).
    pub v_min: f64,
    pub v_max: f64,
    /// Nodal shunt conductance/susceptance (p.u.).
    pub g_shunt: f64,
    pub b_shunt: f64,
    /// Demand (p.u. on the system base).
    pub p_load: f64,
    pub q_load: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Branch {
    /// Dense internal index of the sending bus.
    pub from_bus: usize,
    /// Dense internal index of the receiving bus.
    pub to_bus: usize,
    /// Series conductance (p.u.).
    pub g: f64,
    /// Series susceptance (p.u.); negative for inductive lines.
    pub b: f64,
    /// Total line charging susceptance (p.u.), half at each terminal.
    pub b_sh: f64,
    /// Apparent-power rating (p.u.); 0 encodes an unlimited branch.
    pub s_rating: f64,
    pub status: bool,
}

impl Branch {
    /// Series reactance recovered from the admittance, x = −b / (g² + b²).
    pub fn x(&self) -> f64 {
        -self.b / (self.g * self.g + self.b * self.b)
    }

    /// True when the branch carries a finite apparent-power limit.
    pub fn is_rated(&self) -> bool {
        self.s_rating > 0.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Generator {
    /// Dense internal bus index.
    pub bus: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// €/MWh.
    pub cost_linear: f64,
    /// €/h.
    pub cost_offset: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WindFarm {
    /// Dense internal bus index.
    pub bus: usize,
    /// Forecast infeed (p.u.).
    pub p_forecast: f64,
    /// Standard deviation of the forecast error (p.u.).
    pub sigma: f64,
    /// Minimum power factor magnitude, e.g. 0.95.
    pub pf_min: f64,
}

impl WindFarm {
    /// Largest admissible |Q|/P ratio, sqrt(1 − pf²)/pf.
    pub fn lambda_max(&self) -> f64 {
        (1.0 - self.pf_min * self.pf_min).sqrt() / self.pf_min
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkCase {
    pub buses: Vec<Bus>,
    pub branches: Vec<Branch>,
    pub generators: Vec<Generator>,
    pub wind_farms: Vec<WindFarm>,
    /// System base (MVA).
    pub base_mva: f64,
    /// External label → dense internal index.
    pub bus_index: BTreeMap<usize, usize>,
}

/// Nodal and per-branch admittance aggregates for the lifted power flow
/// equations: `G_ii`/`B_ii` are the bus-admittance diagonals, the
/// off-diagonal role of a branch is carried by its series `(g, b)`.
#[derive(Debug, Clone)]
pub struct Admittances {
    /// Per-bus diagonal conductance: shunt plus incident series terms.
    pub g_diag: Vec<f64>,
    /// Per-bus diagonal susceptance: shunt, series and charging halves.
    pub b_diag: Vec<f64>,
    /// Per-branch (g, b, b_sh/2) for in-service branches; out-of-service
    /// entries are zeroed.
    pub branch: Vec<(f64, f64, f64)>,
}

impl NetworkCase {
    pub fn n_buses(&self) -> usize {
        self.buses.len()
    }

    pub fn n_branches(&self) -> usize {
        self.branches.len()
    }

    /// Dense index of the slack bus.
    pub fn slack(&self) -> usize {
        self.buses
            .iter()
            .position(|b| b.kind == BusKind::Slack)
            .expect("validated case has a slack bus")
    }

    /// Generators attached to a bus.
    pub fn generators_at(&self, bus: usize) -> impl Iterator<Item = (usize, &Generator)> {
        self.generators
            .iter()
            .enumerate()
            .filter(move |(_, g)| g.bus == bus)
    }

    /// Wind farms attached to a bus.
    pub fn wind_at(&self, bus: usize) -> impl Iterator<Item = (usize, &WindFarm)> {
        self.wind_farms
            .iter()
            .enumerate()
            .filter(move |(_, w)| w.bus == bus)
    }

    /// In-service branches with their indices.
    pub fn live_branches(&self) -> impl Iterator<Item = (usize, &Branch)> {
        self.branches
            .iter()
            .enumerate()
            .filter(|(_, br)| br.status)
    }

    /// True when the in-service graph is a spanning tree (radial network).
    pub fn is_radial(&self) -> bool {
        self.live_branches().count() == self.n_buses().saturating_sub(1)
    }

    /// Build the admittance aggregates used by the power balance equations.
    pub fn branch_admittances(&self) -> Admittances {
        let n = self.n_buses();
        let mut g_diag = vec![0.0; n];
        let mut b_diag = vec![0.0; n];
        for (i, bus) in self.buses.iter().enumerate() {
            g_diag[i] = bus.g_shunt;
            b_diag[i] = bus.b_shunt;
        }
        let mut branch = Vec::with_capacity(self.branches.len());
        for br in &self.branches {
            if !br.status {
                branch.push((0.0, 0.0, 0.0));
                continue;
            }
            let half = br.b_sh / 2.0;
            branch.push((br.g, br.b, half));
            g_diag[br.from_bus] += br.g;
            g_diag[br.to_bus] += br.g;
            b_diag[br.from_bus] += br.b + half;
            b_diag[br.to_bus] += br.b + half;
        }
        Admittances {
            g_diag,
            b_diag,
            branch,
        }
    }

    /// Scale finite branch ratings and append wind farms.
    ///
    /// `rating_scale` must lie in (0, 1]; wind buses are given as external
    /// labels and must exist in the case.
    pub fn apply_modifiers(
        &self,
        rating_scale: f64,
        wind_additions: &[(usize, WindFarm)],
    ) -> Result<NetworkCase> {
        if !(rating_scale > 0.0 && rating_scale <= 1.0) {
            return Err(CcopfError::Validation(format!(
                "rating_scale must lie in (0, 1], got {rating_scale}"
            )));
        }
        let mut out = self.clone();
        for br in &mut out.branches {
            if br.is_rated() {
                br.s_rating *= rating_scale;
            }
        }
        for (label, farm) in wind_additions {
            let Some(&idx) = self.bus_index.get(label) else {
                return Err(CcopfError::Validation(format!(
                    "wind farm references bus {label} which is not in the case"
                )));
            };
            let mut farm = farm.clone();
            farm.bus = idx;
            out.wind_farms.push(farm);
        }
        Ok(out)
    }

    /// Connectivity check over in-service branches; returns the islands
    /// (as external labels) when the network is disconnected.
    pub fn islands(&self) -> Vec<Vec<usize>> {
        let n = self.n_buses();
        let mut adj = vec![Vec::new(); n];
        for (_, br) in self.live_branches() {
            adj[br.from_bus].push(br.to_bus);
            adj[br.to_bus].push(br.from_bus);
        }
        let mut comp = vec![usize::MAX; n];
        let mut n_comp = 0;
        for start in 0..n {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = n_comp;
            while let Some(i) = stack.pop() {
                for &j in &adj[i] {
                    if comp[j] == usize::MAX {
                        comp[j] = n_comp;
                        stack.push(j);
                    }
                }
            }
            n_comp += 1;
        }
        let mut islands = vec![Vec::new(); n_comp];
        for (i, &c) in comp.iter().enumerate() {
            islands[c].push(self.buses[i].id);
        }
        islands
    }

    /// Structural validation: slack uniqueness, reference resolution and
    /// connectivity. Called by the parser; public for modified cases.
    pub fn validate(&self) -> Result<()> {
        let slacks = self
            .buses
            .iter()
            .filter(|b| b.kind == BusKind::Slack)
            .count();
        if slacks == 0 {
            return Err(CcopfError::Validation(
                "case has no slack bus (bus type 3)".into(),
            ));
        }
        if slacks > 1 {
            return Err(CcopfError::Validation(format!(
                "case has {slacks} slack buses, expected exactly one"
            )));
        }
        let n = self.n_buses();
        for (k, br) in self.branches.iter().enumerate() {
            if br.from_bus >= n || br.to_bus >= n {
                return Err(CcopfError::Validation(format!(
                    "branch {k} references an unknown bus index"
                )));
            }
            if br.from_bus == br.to_bus {
                return Err(CcopfError::Validation(format!(
                    "branch {k} is a self-loop on bus {}",
                    self.buses[br.from_bus].id
                )));
            }
        }
        for (k, g) in self.generators.iter().enumerate() {
            if g.bus >= n {
                return Err(CcopfError::Validation(format!(
                    "generator {k} references an unknown bus index"
                )));
            }
        }
        for (k, w) in self.wind_farms.iter().enumerate() {
            if w.bus >= n {
                return Err(CcopfError::Validation(format!(
                    "wind farm {k} references an unknown bus index"
                )));
            }
        }
        let islands = self.islands();
        if islands.len() > 1 {
            return Err(CcopfError::Validation(format!(
                "network is disconnected over in-service branches; islands: {islands:?}"
            )));
        }
        Ok(())
    }
}

/// Case dump with provenance metadata, used for fixture testing and by the
/// CLI `solve` artifact set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseDump {
    pub name: String,
    /// Which variant of the source data this is (cost model, rating
    /// conventions, ...). Case files circulate in several variants; record
    /// the one actually used instead of guessing.
    pub variant: String,
    pub case: NetworkCase,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::parse_case;

    pub(crate) const TWO_BUS: &str = r#"
function mpc = case2
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
    1 3 0  0 0 0 1 1 0 138 1 1.1 0.9;
    2 1 50 20 0 0 1 1 0 138 1 1.1 0.9;
];
mpc.gen = [
    1 0 0 100 -100 1.0 100 1 200 0;
];
mpc.branch = [
    1 2 0.0 0.1 0.0 100 0 0 0 0 1 -360 360;
];
mpc.gencost = [
    2 0 0 2 25 0;
];
"#;

    #[test]
    fn two_bus_parses_to_per_unit() {
        let case = parse_case(TWO_BUS).unwrap();
        assert_eq!(case.n_buses(), 2);
        assert_eq!(case.n_branches(), 1);
        assert_eq!(case.buses[0].kind, BusKind::Slack);
        assert_eq!(case.buses[1].kind, BusKind::Pq);
        assert!((case.buses[1].p_load - 0.5).abs() < 1e-15);
        assert!((case.buses[1].q_load - 0.2).abs() < 1e-15);
        assert!((case.branches[0].s_rating - 1.0).abs() < 1e-15);
    }

    #[test]
    fn series_admittance_of_pure_reactance() {
        let case = parse_case(TWO_BUS).unwrap();
        let br = &case.branches[0];
        assert!(br.g.abs() < 1e-15);
        assert!((br.b - (-10.0)).abs() < 1e-12);
        assert!((br.x() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn charging_susceptance_splits_between_terminals() {
        let text = TWO_BUS.replace("1 2 0.0 0.1 0.0", "1 2 0.0 0.1 0.02");
        let case = parse_case(&text).unwrap();
        let adm = case.branch_admittances();
        // series b = -10, plus half charging at each end
        assert!((adm.b_diag[0] - (-10.0 + 0.01)).abs() < 1e-12);
        assert!((adm.b_diag[1] - (-10.0 + 0.01)).abs() < 1e-12);
        assert!((adm.branch[0].2 - 0.01).abs() < 1e-15);
    }

    #[test]
    fn modifier_identity_and_scaling() {
        let case = parse_case(TWO_BUS).unwrap();
        let same = case.apply_modifiers(1.0, &[]).unwrap();
        assert_eq!(same.branches[0].s_rating, case.branches[0].s_rating);
        let scaled = case.apply_modifiers(0.7, &[]).unwrap();
        assert!((scaled.branches[0].s_rating - 0.7).abs() < 1e-12);
    }

    #[test]
    fn wind_addition_resolves_labels() {
        let case = parse_case(TWO_BUS).unwrap();
        let farm = WindFarm {
            bus: 0,
            p_forecast: 3.0,
            sigma: 0.3,
            pf_min: 0.95,
        };
        let with_wind = case.apply_modifiers(1.0, &[(2, farm.clone())]).unwrap();
        assert_eq!(with_wind.wind_farms.len(), 1);
        assert_eq!(with_wind.wind_farms[0].bus, 1);
        let err = case.apply_modifiers(1.0, &[(999, farm)]).unwrap_err();
        assert!(err.to_string().contains("999"));
    }

    #[test]
    fn lambda_max_for_pf_095() {
        let farm = WindFarm {
            bus: 0,
            p_forecast: 1.0,
            sigma: 0.0,
            pf_min: 0.95,
        };
        assert!((farm.lambda_max() - 0.328_684).abs() < 1e-5);
    }

    #[test]
    fn unlimited_rating_is_preserved_by_scaling() {
        let text = TWO_BUS.replace("1 2 0.0 0.1 0.0 100", "1 2 0.0 0.1 0.0 0");
        let case = parse_case(&text).unwrap();
        assert!(!case.branches[0].is_rated());
        let scaled = case.apply_modifiers(0.5, &[]).unwrap();
        assert_eq!(scaled.branches[0].s_rating, 0.0);
    }
}
