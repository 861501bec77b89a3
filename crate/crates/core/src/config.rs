//! Scenario description and validation.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::geometry::{Field, Position};
use crate::radio::RadioParams;

/// The seven protocol variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProtocolVariant {
    Leach,
    LeachC,
    SLeachC,
    SLeachD,
    MultiHopLeach,
    MLeach,
    LeachSC,
}

impl ProtocolVariant {
    pub const ALL: [ProtocolVariant; 7] = [
        ProtocolVariant::Leach,
        ProtocolVariant::LeachC,
        ProtocolVariant::MLeach,
        ProtocolVariant::LeachSC,
        ProtocolVariant::MultiHopLeach,
        ProtocolVariant::SLeachC,
        ProtocolVariant::SLeachD,
    ];

    /// Stable lowercase tag used in config files, CLI flags and file names.
    pub fn tag(self) -> &'static str {
        match self {
            ProtocolVariant::Leach => "leach",
            ProtocolVariant::LeachC => "leach-c",
            ProtocolVariant::SLeachC => "sleach-c",
            ProtocolVariant::SLeachD => "sleach-d",
            ProtocolVariant::MultiHopLeach => "multihop-leach",
            ProtocolVariant::MLeach => "m-leach",
            ProtocolVariant::LeachSC => "leach-sc",
        }
    }

    /// Cluster heads are picked by the base station.
    pub fn is_centralized(self) -> bool {
        matches!(self, ProtocolVariant::LeachC | ProtocolVariant::SLeachC)
    }

    pub fn is_solar_aware(self) -> bool {
        matches!(self, ProtocolVariant::SLeachC | ProtocolVariant::SLeachD)
    }
}

impl fmt::Display for ProtocolVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown protocol `{0}` (expected one of leach, leach-c, sleach-c, sleach-d, multihop-leach, m-leach, leach-sc)")]
pub struct UnknownProtocol(pub String);

impl FromStr for ProtocolVariant {
    type Err = UnknownProtocol;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        Ok(match norm.as_str() {
            "leach" => ProtocolVariant::Leach,
            "leachc" => ProtocolVariant::LeachC,
            "sleachc" | "sleachcentralized" => ProtocolVariant::SLeachC,
            "sleachd" | "sleachdistributed" => ProtocolVariant::SLeachD,
            "multihopleach" | "mhleach" => ProtocolVariant::MultiHopLeach,
            "mleach" => ProtocolVariant::MLeach,
            "leachsc" => ProtocolVariant::LeachSC,
            _ => return Err(UnknownProtocol(s.trim().to_string())),
        })
    }
}

/// A field-level validation failure.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("`{key}` {reason}")]
pub struct ConfigError {
    pub key: &'static str,
    pub reason: String,
}

impl ConfigError {
    fn new(key: &'static str, reason: impl Into<String>) -> Self {
        Self { key, reason: reason.into() }
    }
}

/// Full experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub num_nodes: usize,
    pub field_width: f64,
    pub field_height: f64,
    pub bs_pos: Position,
    pub protocol: ProtocolVariant,
    /// Desired cluster-head fraction P.
    pub p_ch: f64,
    /// Member data packet (L_C), bits.
    pub packet_bits_data: u32,
    /// Aggregated packet (L_A), bits.
    pub packet_bits_agg: u32,
    /// Downward instruction packet (L_BS), bits.
    pub packet_bits_bs: u32,
    pub initial_energy: f64,
    pub rounds_max: u32,
    pub frames_per_round: u32,
    pub seed: u64,
    pub solar_fraction: f64,
    pub harvest_j_per_round: f64,
    pub sun_cycle_rounds: u32,
    pub sun_fraction: f64,
    /// Upper bound of node speed, m/round.
    pub v_max: f64,
    /// Cluster-head radio range: multi-hop neighbour threshold.
    pub ch_radio_range: f64,
    /// M-LEACH members pick the richest head within this distance.
    pub join_range: f64,
    /// Charge advertisement, join and BS status traffic in the setup phase.
    pub setup_costs: bool,
    /// Send one BS instruction to every node per round.
    pub downlink: bool,
    /// In a round without any cluster head, alive nodes send their reading
    /// straight to the BS instead of idling.
    pub direct_fallback: bool,
    pub radio: RadioParams,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            num_nodes: 100,
            field_width: 100.0,
            field_height: 100.0,
            bs_pos: Position::new(50.0, 175.0),
            protocol: ProtocolVariant::Leach,
            p_ch: 0.1,
            packet_bits_data: 200,
            packet_bits_agg: 200,
            packet_bits_bs: 200,
            initial_energy: 0.5,
            rounds_max: 5000,
            frames_per_round: 10,
            seed: 1,
            solar_fraction: 0.5,
            harvest_j_per_round: 0.01,
            sun_cycle_rounds: 200,
            sun_fraction: 0.5,
            v_max: 1.0,
            ch_radio_range: 100.0,
            join_range: 25.0,
            setup_costs: true,
            downlink: false,
            direct_fallback: false,
            radio: RadioParams::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn field(&self) -> Field {
        Field { width: self.field_width, height: self.field_height }
    }

    /// Rounds per epoch: the smallest whole number of rounds covering
    /// `1 / P`.
    pub fn epoch_len(&self) -> u32 {
        crate::protocol::rounds_per_epoch(self.p_ch)
    }

    pub fn with_protocol(&self, protocol: ProtocolVariant) -> Self {
        Self { protocol, ..self.clone() }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    /// Checks every field invariant, reporting the first offending key.
    pub fn validate(&self) -> Result<(), ConfigError> {
        fn positive(key: &'static str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("must be a positive number, got {v}")))
            }
        }
        fn non_negative(key: &'static str, v: f64) -> Result<(), ConfigError> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("must be non-negative, got {v}")))
            }
        }
        fn unit(key: &'static str, v: f64) -> Result<(), ConfigError> {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(ConfigError::new(key, format!("must lie in [0, 1], got {v}")))
            }
        }

        if self.num_nodes == 0 {
            return Err(ConfigError::new("num_nodes", "must be at least 1"));
        }
        positive("field_width", self.field_width)?;
        positive("field_height", self.field_height)?;
        if !(self.bs_pos.x.is_finite() && self.bs_pos.y.is_finite()) {
            return Err(ConfigError::new("bs_pos", "coordinates must be finite"));
        }
        if !(self.p_ch > 0.0 && self.p_ch < 1.0) {
            return Err(ConfigError::new(
                "p_ch",
                format!("must lie strictly between 0 and 1, got {}", self.p_ch),
            ));
        }
        if self.packet_bits_data == 0 {
            return Err(ConfigError::new("packet_bits_data", "must be at least 1"));
        }
        if self.packet_bits_agg == 0 {
            return Err(ConfigError::new("packet_bits_agg", "must be at least 1"));
        }
        positive("initial_energy", self.initial_energy)?;
        if self.rounds_max == 0 {
            return Err(ConfigError::new("rounds_max", "must be at least 1"));
        }
        if self.frames_per_round == 0 {
            return Err(ConfigError::new("frames_per_round", "must be at least 1"));
        }
        unit("solar_fraction", self.solar_fraction)?;
        non_negative("harvest_j_per_round", self.harvest_j_per_round)?;
        if self.sun_cycle_rounds == 0 {
            return Err(ConfigError::new("sun_cycle_rounds", "must be at least 1"));
        }
        unit("sun_fraction", self.sun_fraction)?;
        non_negative("v_max", self.v_max)?;
        positive("ch_radio_range", self.ch_radio_range)?;
        positive("join_range", self.join_range)?;
        positive("e_elec_tx", self.radio.e_elec_tx)?;
        positive("e_elec_rx", self.radio.e_elec_rx)?;
        positive("eps_fs", self.radio.eps_fs)?;
        positive("e_da", self.radio.e_da)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_environment() {
        let c = ScenarioConfig::default();
        assert_eq!(c.num_nodes, 100);
        assert_eq!((c.field_width, c.field_height), (100.0, 100.0));
        assert_eq!(c.initial_energy, 0.5);
        assert_eq!(c.p_ch, 0.1);
        assert_eq!(c.packet_bits_data, 200);
        assert_eq!(c.packet_bits_agg, 200);
        assert_eq!(c.radio, RadioParams::default());
        assert_eq!(c.epoch_len(), 10);
        c.validate().unwrap();
    }

    #[test]
    fn validation_names_the_key() {
        let bad = ScenarioConfig { p_ch: 1.5, ..Default::default() };
        assert_eq!(bad.validate().unwrap_err().key, "p_ch");
        let bad = ScenarioConfig { num_nodes: 0, ..Default::default() };
        assert_eq!(bad.validate().unwrap_err().key, "num_nodes");
        let bad = ScenarioConfig { sun_fraction: -0.1, ..Default::default() };
        assert_eq!(bad.validate().unwrap_err().key, "sun_fraction");
        let bad = ScenarioConfig { frames_per_round: 0, ..Default::default() };
        assert_eq!(bad.validate().unwrap_err().key, "frames_per_round");
    }

    #[test]
    fn protocol_tags_round_trip() {
        for v in ProtocolVariant::ALL {
            assert_eq!(v.tag().parse::<ProtocolVariant>().unwrap(), v);
        }
        assert_eq!("LEACH-C".parse::<ProtocolVariant>().unwrap(), ProtocolVariant::LeachC);
        assert_eq!("MultiHop_LEACH".parse::<ProtocolVariant>().unwrap(), ProtocolVariant::MultiHopLeach);
        assert!("teen".parse::<ProtocolVariant>().is_err());
    }
}
