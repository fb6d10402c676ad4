//! Domain types: state labels, the physical setup, and the energy/p relation.
//!
//! Energies are in Rydberg throughout. For nuclear charges `Z1`, `Z2` at
//! separation `R` the reduced energy is `E' = E - 2 Z1 Z2 / R` and the decay
//! parameter of the separated equations is `p = (R/2) sqrt(-E')`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parity of the η factor under η → −η.
///
/// `Plus` selects the cosh branch, `Minus` the sinh branch. The gerade/ungerade
/// character of the full orbital is this parity times `(-1)^Λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub enum Parity {
    Plus,
    Minus,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Plus => 1.0,
            Parity::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Parity::Plus => '+',
            Parity::Minus => '-',
        }
    }

    /// 0 for the even branch, 1 for the odd one.
    pub fn offset(self) -> u32 {
        match self {
            Parity::Plus => 0,
            Parity::Minus => 1,
        }
    }
}

/// Quantum numbers `(n, m, Λ, parity)`: ξ-nodes, η-nodes, |m_z|, and η parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
pub struct StateLabel {
    pub n: u32,
    pub m: u32,
    pub lambda: u32,
    pub parity: Parity,
}

/// One row of the molecular-orbital / united-atom correspondence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correspondence {
    pub label: StateLabel,
    /// Spectroscopic name, e.g. `1sσg`.
    pub designation: &'static str,
    /// ASCII alias accepted on the command line, e.g. `1ssg`.
    pub ascii: &'static str,
    /// Hydrogenic orbital `(n̂, l, m)` reached as R → 0.
    pub hydrogenic: (u32, u32, u32),
    /// Node constant of the limiting polynomial where one is present.
    pub node_constant: Option<f64>,
}

const fn lbl(n: u32, m: u32, lambda: u32, parity: Parity) -> StateLabel {
    StateLabel { n, m, lambda, parity }
}

/// The full correspondence table between `(n, m, Λ, ±)` and united-atom orbitals.
pub const CORRESPONDENCE: [Correspondence; 10] = [
    Correspondence { label: lbl(0, 0, 0, Parity::Plus), designation: "1sσg", ascii: "1ssg", hydrogenic: (1, 0, 0), node_constant: None },
    Correspondence { label: lbl(0, 0, 0, Parity::Minus), designation: "2pσu", ascii: "2psu", hydrogenic: (2, 1, 0), node_constant: None },
    Correspondence { label: lbl(0, 0, 1, Parity::Plus), designation: "2pπu", ascii: "2ppu", hydrogenic: (2, 1, 1), node_constant: None },
    Correspondence { label: lbl(0, 0, 1, Parity::Minus), designation: "3dπg", ascii: "3dpg", hydrogenic: (3, 2, 1), node_constant: None },
    Correspondence { label: lbl(0, 0, 2, Parity::Plus), designation: "3dδg", ascii: "3ddg", hydrogenic: (3, 2, 2), node_constant: None },
    Correspondence { label: lbl(0, 0, 2, Parity::Minus), designation: "4fδu", ascii: "4fdu", hydrogenic: (4, 3, 2), node_constant: None },
    Correspondence { label: lbl(1, 0, 0, Parity::Plus), designation: "2sσg", ascii: "2ssg", hydrogenic: (2, 0, 0), node_constant: Some(2.0) },
    Correspondence { label: lbl(1, 0, 0, Parity::Minus), designation: "3pσu", ascii: "3psu", hydrogenic: (3, 1, 0), node_constant: Some(3.0) },
    Correspondence { label: lbl(0, 1, 0, Parity::Plus), designation: "3dσg", ascii: "3dsg", hydrogenic: (3, 2, 0), node_constant: Some(1.0 / 3.0) },
    Correspondence { label: lbl(0, 1, 0, Parity::Minus), designation: "4fσu", ascii: "4fsu", hydrogenic: (4, 3, 0), node_constant: Some(3.0 / 5.0) },
];

impl StateLabel {
    pub const fn new(n: u32, m: u32, lambda: u32, parity: Parity) -> Self {
        lbl(n, m, lambda, parity)
    }

    pub fn correspondence(&self) -> Option<&'static Correspondence> {
        CORRESPONDENCE.iter().find(|c| c.label == *self)
    }

    /// Spectroscopic name, or `None` when the label has no tabulated counterpart.
    pub fn designation(&self) -> Option<&'static str> {
        self.correspondence().map(|c| c.designation)
    }

    /// Inverse lookup from either the Greek or the ASCII spelling.
    pub fn from_designation(name: &str) -> Option<StateLabel> {
        CORRESPONDENCE
            .iter()
            .find(|c| c.designation == name || c.ascii.eq_ignore_ascii_case(name))
            .map(|c| c.label)
    }

    /// Whether variational presets exist: nodeless states with Λ ≤ 2 and the
    /// two single-ξ-node σ states.
    pub fn is_variational_supported(&self) -> bool {
        self.m == 0 && ((self.n == 0 && self.lambda <= 2) || (self.n == 1 && self.lambda == 0))
    }

    /// Gerade (+1) or ungerade (−1) character under full inversion.
    pub fn inversion_parity(&self) -> i32 {
        let y = if self.parity == Parity::Plus { 1 } else { -1 };
        if self.lambda % 2 == 0 {
            y
        } else {
            -y
        }
    }

    /// Lowest state sharing `(Λ, parity)`; the orthogonality partner of node states.
    pub fn sector_ground(&self) -> StateLabel {
        lbl(0, 0, self.lambda, self.parity)
    }

    pub fn is_sector_lowest(&self) -> bool {
        self.n == 0 && self.m == 0
    }

    /// A filesystem-safe key, e.g. `0_0_1_m`.
    pub fn key(&self) -> String {
        let s = if self.parity == Parity::Plus { "p" } else { "m" };
        format!("{}_{}_{}_{}", self.n, self.m, self.lambda, s)
    }
}

impl fmt::Display for StateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.n, self.m, self.lambda, self.parity.symbol())
    }
}

impl FromStr for StateLabel {
    type Err = Error;

    /// Accepts `1sσg`, `1ssg`, `(0,0,0,+)`, `0,0,0,+` and `0_0_0_p`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if let Some(l) = StateLabel::from_designation(t) {
            return Ok(l);
        }
        let inner = t.trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = inner.split([',', '_']).map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::InvalidLabel(s.to_string()));
        }
        let num = |x: &str| x.parse::<u32>().map_err(|_| Error::InvalidLabel(s.to_string()));
        let parity = match parts[3] {
            "+" | "p" | "plus" => Parity::Plus,
            "-" | "−" | "m" | "minus" => Parity::Minus,
            _ => return Err(Error::InvalidLabel(s.to_string())),
        };
        Ok(lbl(num(parts[0])?, num(parts[1])?, num(parts[2])?, parity))
    }
}

/// Internuclear distance and nuclear charges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalSetup {
    pub r: f64,
    pub z1: f64,
    pub z2: f64,
}

impl PhysicalSetup {
    /// The hydrogen molecular ion at separation `r`.
    pub fn h2plus(r: f64) -> Self {
        PhysicalSetup { r, z1: 1.0, z2: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r.is_finite() && self.r > 0.0) {
            return Err(Error::ParameterDomain(format!("R must be positive, got {}", self.r)));
        }
        if !(self.z1.is_finite() && self.z2.is_finite()) {
            return Err(Error::ParameterDomain("nuclear charges must be finite".into()));
        }
        Ok(())
    }

    /// Half the internuclear distance, the focal length of the coordinates.
    pub fn half_r(&self) -> f64 {
        0.5 * self.r
    }

    /// Nuclear repulsion in Ry.
    pub fn repulsion(&self) -> f64 {
        2.0 * self.z1 * self.z2 / self.r
    }

    /// Coefficient of the linear ξ term in the radial equation, `(Z1+Z2) R / 2`.
    /// Equal to `R` for the molecular ion.
    pub fn r_eff(&self) -> f64 {
        0.5 * (self.z1 + self.z2) * self.r
    }

    pub fn is_symmetric(&self) -> bool {
        self.z1 == self.z2
    }
}

/// Total energy, reduced energy and decay parameter of a bound state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPair {
    pub e_total: f64,
    pub e_prime: f64,
    pub p: f64,
}

impl EnergyPair {
    pub fn from_total(e_total: f64, setup: &PhysicalSetup) -> Result<Self> {
        let e_prime = e_total - setup.repulsion();
        let p = p_from_e_prime(e_prime, setup.r)?;
        Ok(EnergyPair { e_total, e_prime, p })
    }

    pub fn from_p(p: f64, setup: &PhysicalSetup) -> Self {
        let e_prime = e_prime_from_p(p, setup.r);
        EnergyPair { e_total: e_prime + setup.repulsion(), e_prime, p }
    }
}

/// `p = (R/2) sqrt(-E')`.
pub fn p_from_e_prime(e_prime: f64, r: f64) -> Result<f64> {
    if e_prime.is_nan() || e_prime >= 0.0 {
        return Err(Error::UnboundChannel { e_prime });
    }
    Ok(0.5 * r * (-e_prime).sqrt())
}

pub fn e_prime_from_p(p: f64, r: f64) -> f64 {
    let k = 2.0 * p / r;
    -k * k
}

pub fn p_from_energy(e_total: f64, setup: &PhysicalSetup) -> Result<f64> {
    p_from_e_prime(e_total - setup.repulsion(), setup.r)
}

pub fn energy_from_p(p: f64, setup: &PhysicalSetup) -> f64 {
    e_prime_from_p(p, setup.r) + setup.repulsion()
}

/// A solved state at fixed R.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeparatedState {
    pub label: StateLabel,
    pub setup: PhysicalSetup,
    pub energy: EnergyPair,
    /// Separation constant in the convention where the η equation reads
    /// `(η²−1)Y″ + 2(Λ+1)ηY′ + (A − p²η²)Y = 0`.
    pub a: f64,
    pub norm: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn designations_round_trip() {
        let l = StateLabel::new(0, 0, 1, Parity::Minus);
        assert_eq!(l.designation(), Some("3dπg"));
        assert_eq!(StateLabel::new(0, 0, 0, Parity::Plus).designation(), Some("1sσg"));
        assert_eq!(StateLabel::new(0, 1, 0, Parity::Plus).designation(), Some("3dσg"));
        for c in CORRESPONDENCE.iter() {
            assert_eq!(StateLabel::from_designation(c.designation), Some(c.label));
            assert_eq!(c.ascii.parse::<StateLabel>().unwrap(), c.label);
        }
        assert_eq!(StateLabel::new(2, 0, 0, Parity::Plus).designation(), None);
    }

    #[test]
    fn label_parsing() {
        let l: StateLabel = "(1,0,0,-)".parse().unwrap();
        assert_eq!(l, StateLabel::new(1, 0, 0, Parity::Minus));
        assert_eq!(l.to_string().parse::<StateLabel>().unwrap(), l);
        assert_eq!("0_0_2_p".parse::<StateLabel>().unwrap(), StateLabel::new(0, 0, 2, Parity::Plus));
        assert!("garbage".parse::<StateLabel>().is_err());
    }

    #[test]
    fn supported_set_has_eight_members() {
        let count = CORRESPONDENCE.iter().filter(|c| c.label.is_variational_supported()).count();
        assert_eq!(count, 8);
    }

    #[test]
    fn inversion_character_matches_names() {
        for c in CORRESPONDENCE.iter() {
            let g = c.designation.ends_with('g');
            assert_eq!(c.label.inversion_parity() == 1, g, "{}", c.designation);
        }
    }

    #[test]
    fn p_from_energy_examples() {
        let p = p_from_energy(-1.20526842899, &PhysicalSetup::h2plus(2.0)).unwrap();
        assert!((p - 1.485015).abs() < 1e-6);
        let p = p_from_energy(-0.9998021372, &PhysicalSetup::h2plus(10.0)).unwrap();
        assert!((p - 5.47678).abs() < 1e-5);
        assert_eq!(p_from_e_prime(-4.0, 2.0).unwrap(), 2.0);
        assert!(matches!(
            p_from_energy(1.5, &PhysicalSetup::h2plus(2.0)),
            Err(Error::UnboundChannel { .. })
        ));
    }

    #[test]
    fn energy_round_trip() {
        for &(e, r) in &[(-1.2, 2.0), (-0.5, 10.0), (0.8703727499, 1.0), (-1.0000007211, 50.0)] {
            let s = PhysicalSetup::h2plus(r);
            let back = energy_from_p(p_from_energy(e, &s).unwrap(), &s);
            assert!(((back - e) / e).abs() <= 1e-14, "{e} {back}");
        }
    }

    #[test]
    fn energy_pair_identity() {
        let s = PhysicalSetup::h2plus(3.0);
        let ep = EnergyPair::from_total(-0.9, &s).unwrap();
        assert_eq!(ep.e_prime, -0.9 - 2.0 / 3.0);
        assert!((ep.p * ep.p + ep.e_prime * 9.0 / 4.0).abs() < 1e-14);
    }
}
