//! First-order radio energy model.
//!
//! Transmitting `L` bits over `d` meters costs `E_elec_tx * L + eps_fs * L * d^2`,
//! receiving costs `E_elec_rx * L`, and aggregating costs `E_da` per input bit.
//! Only the free-space (d²) amplifier regime is modelled.
//!
//! The closed forms below price one cluster of `n / K` nodes under duplex
//! traffic (member uplink, cluster-head uplink, BS downlink) and the two-CH
//! linear chain that motivates multi-hop forwarding. They are used by the
//! `energy-calc` CLI command and as analytical cross-checks of the simulator.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("`{name}` must be non-negative and finite, got {value}")]
    NegativeInput { name: &'static str, value: f64 },
    #[error("invalid cluster geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid radio parameters: {0}")]
    InvalidParams(String),
}

/// Per-bit radio constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    /// Transmitter electronics, J/bit.
    pub e_elec_tx: f64,
    /// Receiver electronics, J/bit.
    pub e_elec_rx: f64,
    /// Free-space amplifier, J/bit/m².
    pub eps_fs: f64,
    /// Data aggregation, J/bit.
    pub e_da: f64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec_tx: 50e-9,
            e_elec_rx: 50e-9,
            eps_fs: 100e-12,
            e_da: 50e-12,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<(), EnergyError> {
        let fields = [
            ("e_elec_tx", self.e_elec_tx),
            ("e_elec_rx", self.e_elec_rx),
            ("eps_fs", self.eps_fs),
            ("e_da", self.e_da),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(EnergyError::InvalidParams(format!(
                    "{name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    // Unchecked forms used on the simulator hot path, where bits and
    // distances are non-negative by construction.

    #[inline]
    pub(crate) fn tx(&self, bits: f64, d: f64) -> f64 {
        self.e_elec_tx * bits + self.eps_fs * bits * d * d
    }

    #[inline]
    pub(crate) fn rx(&self, bits: f64) -> f64 {
        self.e_elec_rx * bits
    }

    #[inline]
    pub(crate) fn agg(&self, bits: f64) -> f64 {
        self.e_da * bits
    }
}

fn non_negative(name: &'static str, value: f64) -> Result<f64, EnergyError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(EnergyError::NegativeInput { name, value })
    }
}

/// Energy to transmit `bits` over `d` meters.
pub fn tx_energy(params: &RadioParams, bits: f64, d: f64) -> Result<f64, EnergyError> {
    let bits = non_negative("bits", bits)?;
    let d = non_negative("distance", d)?;
    Ok(params.tx(bits, d))
}

/// Energy to receive `bits`.
pub fn rx_energy(params: &RadioParams, bits: f64) -> Result<f64, EnergyError> {
    Ok(params.rx(non_negative("bits", bits)?))
}

/// Energy to aggregate `bits_total` input bits into one packet.
pub fn agg_energy(params: &RadioParams, bits_total: f64) -> Result<f64, EnergyError> {
    Ok(params.agg(non_negative("bits_total", bits_total)?))
}

/// Shape of one representative cluster for the duplex closed forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterGeometry {
    /// Total nodes in the network.
    pub n: u32,
    /// Number of clusters.
    pub k: u32,
    /// Member data packet, bits.
    pub l_c: f64,
    /// Aggregated packet, bits.
    pub l_a: f64,
    /// Downward instruction packet, bits.
    pub l_bs: f64,
    /// Cluster head to base station, meters.
    pub d_to_bs: f64,
    /// Member to cluster head, meters.
    pub d_to_ch: f64,
}

impl ClusterGeometry {
    pub fn validate(&self) -> Result<(), EnergyError> {
        if self.n == 0 || self.k == 0 {
            return Err(EnergyError::InvalidGeometry(format!(
                "node and cluster counts must be at least 1 (n = {}, k = {})",
                self.n, self.k
            )));
        }
        if self.k > self.n {
            return Err(EnergyError::InvalidGeometry(format!(
                "more clusters than nodes (n = {}, k = {})",
                self.n, self.k
            )));
        }
        non_negative("l_c", self.l_c)?;
        non_negative("l_a", self.l_a)?;
        non_negative("l_bs", self.l_bs)?;
        non_negative("d_to_bs", self.d_to_bs)?;
        non_negative("d_to_ch", self.d_to_ch)?;
        Ok(())
    }

    /// Nodes per cluster, `n / K`, including the head.
    pub fn cluster_size(&self) -> f64 {
        self.n as f64 / self.k as f64
    }

    /// Members per cluster, `n / K - 1`.
    pub fn members(&self) -> f64 {
        self.cluster_size() - 1.0
    }
}

/// Cluster-head uplink: receive every member packet, aggregate the whole
/// cluster's data (own reading included), send one aggregate to the BS.
pub fn ch_upward_energy(params: &RadioParams, g: &ClusterGeometry) -> Result<f64, EnergyError> {
    g.validate()?;
    Ok(g.members() * params.rx(g.l_c)
        + params.agg(g.cluster_size() * g.l_c)
        + params.tx(g.l_a, g.d_to_bs))
}

/// Uplink cost of a single member sending its reading to the head.
pub fn member_upward_energy(
    params: &RadioParams,
    l_c: f64,
    d_to_ch: f64,
) -> Result<f64, EnergyError> {
    tx_energy(params, l_c, d_to_ch)
}

/// Uplink cost of one whole cluster.
pub fn cluster_upward_energy(params: &RadioParams, g: &ClusterGeometry) -> Result<f64, EnergyError> {
    Ok(ch_upward_energy(params, g)? + g.members() * member_upward_energy(params, g.l_c, g.d_to_ch)?)
}

/// Cluster-head downlink: receive one instruction per cluster node from the
/// BS and relay each member's instruction over the intra-cluster distance.
pub fn ch_downward_energy(params: &RadioParams, g: &ClusterGeometry) -> Result<f64, EnergyError> {
    g.validate()?;
    Ok(g.cluster_size() * params.rx(g.l_bs) + g.members() * params.tx(g.l_bs, g.d_to_ch))
}

/// Downlink cost of one whole cluster (head plus member receptions).
pub fn cluster_downward_energy(
    params: &RadioParams,
    g: &ClusterGeometry,
) -> Result<f64, EnergyError> {
    Ok(ch_downward_energy(params, g)? + g.members() * params.rx(g.l_bs))
}

/// Duplex energy of one cluster.
pub fn cluster_total_energy(params: &RadioParams, g: &ClusterGeometry) -> Result<f64, EnergyError> {
    Ok(cluster_upward_energy(params, g)? + cluster_downward_energy(params, g)?)
}

/// Duplex energy of the whole network, `K` identical clusters.
pub fn network_total_energy(params: &RadioParams, g: &ClusterGeometry) -> Result<f64, EnergyError> {
    Ok(cluster_total_energy(params, g)? * g.k as f64)
}

/// Two cluster heads A and B on a line with the BS, spaced `m` meters apart:
/// `BS --m-- B --m-- A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearScenario {
    pub m: f64,
    /// Aggregate produced by A, bits.
    pub l_a: f64,
    /// Aggregate produced by B, bits.
    pub l_b: f64,
}

impl LinearScenario {
    pub fn validate(&self) -> Result<(), EnergyError> {
        non_negative("m", self.m)?;
        non_negative("l_a", self.l_a)?;
        non_negative("l_b", self.l_b)?;
        Ok(())
    }
}

/// Both heads transmit straight to the BS; A sits at `2m`.
pub fn linear_direct_cost(params: &RadioParams, s: &LinearScenario) -> Result<f64, EnergyError> {
    s.validate()?;
    Ok(params.tx(s.l_a, 2.0 * s.m) + params.tx(s.l_b, s.m))
}

/// A hands its aggregate to B, which forwards both aggregates in one packet.
pub fn linear_multihop_cost(params: &RadioParams, s: &LinearScenario) -> Result<f64, EnergyError> {
    s.validate()?;
    Ok(params.tx(s.l_a, s.m) + params.rx(s.l_a) + params.tx(s.l_a + s.l_b, s.m))
}

/// Spacing above which relaying through B is cheaper than direct delivery.
///
/// The difference `multihop - direct` reduces to
/// `l_a * (E_tx + E_rx) - 2 * eps_fs * l_a * m^2`, independent of `l_b`, so the
/// break-even point is `sqrt((E_tx + E_rx) / (2 * eps_fs))`.
pub fn multihop_breakeven_m(params: &RadioParams, l_a: f64, l_b: f64) -> Result<f64, EnergyError> {
    if !(l_a.is_finite() && l_a > 0.0) {
        return Err(EnergyError::NegativeInput { name: "l_a", value: l_a });
    }
    non_negative("l_b", l_b)?;
    Ok(((params.e_elec_tx + params.e_elec_rx) / (2.0 * params.eps_fs)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> RadioParams {
        RadioParams::default()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-9)
    }

    fn reference_geometry(d_to_bs: f64, d_to_ch: f64) -> ClusterGeometry {
        ClusterGeometry {
            n: 100,
            k: 10,
            l_c: 200.0,
            l_a: 200.0,
            l_bs: 200.0,
            d_to_bs,
            d_to_ch,
        }
    }

    #[test]
    fn tx_examples() {
        assert!(close(tx_energy(&p(), 200.0, 10.0).unwrap(), 12.0e-6));
        assert_eq!(tx_energy(&p(), 0.0, 87.0).unwrap(), 0.0);
        assert!(close(tx_energy(&p(), 200.0, 0.0).unwrap(), 10.0e-6));
    }

    #[test]
    fn rx_and_agg_examples() {
        assert!(close(rx_energy(&p(), 200.0).unwrap(), 10.0e-6));
        assert_eq!(rx_energy(&p(), 0.0).unwrap(), 0.0);
        assert!(close(rx_energy(&p(), 2000.0).unwrap(), 100.0e-6));
        assert!(close(agg_energy(&p(), 2000.0).unwrap(), 1.0e-7));
        assert_eq!(agg_energy(&p(), 0.0).unwrap(), 0.0);
        assert!(close(agg_energy(&p(), 200.0).unwrap(), 1.0e-8));
    }

    #[test]
    fn negative_inputs_rejected() {
        assert!(tx_energy(&p(), -1.0, 3.0).is_err());
        assert!(tx_energy(&p(), 1.0, -3.0).is_err());
        assert!(rx_energy(&p(), -1.0).is_err());
        assert!(agg_energy(&p(), f64::NAN).is_err());
        assert!(member_upward_energy(&p(), 200.0, -0.5).is_err());
    }

    #[test]
    fn ch_upward_examples() {
        let g = reference_geometry(100.0, 20.0);
        assert!(close(ch_upward_energy(&p(), &g).unwrap(), 3.001e-4));
        let g = reference_geometry(50.0, 20.0);
        assert!(close(ch_upward_energy(&p(), &g).unwrap(), 1.501e-4));
        let singleton = ClusterGeometry {
            n: 10,
            k: 10,
            l_c: 0.0,
            l_a: 0.0,
            l_bs: 0.0,
            d_to_bs: 0.0,
            d_to_ch: 0.0,
        };
        assert_eq!(ch_upward_energy(&p(), &singleton).unwrap(), 0.0);
    }

    #[test]
    fn member_upward_examples() {
        assert!(close(member_upward_energy(&p(), 200.0, 20.0).unwrap(), 18.0e-6));
        assert_eq!(member_upward_energy(&p(), 0.0, 20.0).unwrap(), 0.0);
        assert!(close(member_upward_energy(&p(), 200.0, 10.0).unwrap(), 12.0e-6));
    }

    #[test]
    fn cluster_upward_examples() {
        let g = reference_geometry(100.0, 20.0);
        assert!(close(cluster_upward_energy(&p(), &g).unwrap(), 4.621e-4));
        let g = reference_geometry(0.0, 0.0);
        assert!(close(cluster_upward_energy(&p(), &g).unwrap(), 1.901e-4));
        let single = ClusterGeometry { n: 5, k: 5, ..reference_geometry(60.0, 20.0) };
        assert_eq!(
            cluster_upward_energy(&p(), &single).unwrap(),
            ch_upward_energy(&p(), &single).unwrap()
        );
    }

    #[test]
    fn downward_examples() {
        let g = reference_geometry(100.0, 20.0);
        assert!(close(ch_downward_energy(&p(), &g).unwrap(), 2.62e-4));
        assert!(close(cluster_downward_energy(&p(), &g).unwrap(), 3.52e-4));
        let silent = ClusterGeometry { l_bs: 0.0, ..g };
        assert_eq!(ch_downward_energy(&p(), &silent).unwrap(), 0.0);
        assert_eq!(cluster_downward_energy(&p(), &silent).unwrap(), 0.0);
        let single = ClusterGeometry { n: 10, k: 10, ..g };
        assert!(close(ch_downward_energy(&p(), &single).unwrap(), 10e-6));
        assert!(close(cluster_downward_energy(&p(), &single).unwrap(), 10e-6));
    }

    #[test]
    fn totals_examples() {
        let g = reference_geometry(100.0, 20.0);
        assert!(close(cluster_total_energy(&p(), &g).unwrap(), 8.141e-4));
        assert!(close(network_total_energy(&p(), &g).unwrap(), 8.141e-3));
        let zero = ClusterGeometry { l_c: 0.0, l_a: 0.0, l_bs: 0.0, ..g };
        assert_eq!(network_total_energy(&p(), &zero).unwrap(), 0.0);
        let one = ClusterGeometry { k: 1, ..g };
        assert_eq!(
            network_total_energy(&p(), &one).unwrap(),
            cluster_total_energy(&p(), &one).unwrap()
        );
    }

    #[test]
    fn invalid_geometry_rejected() {
        let g = reference_geometry(100.0, 20.0);
        assert!(ch_upward_energy(&p(), &ClusterGeometry { k: 0, ..g }).is_err());
        assert!(ch_upward_energy(&p(), &ClusterGeometry { n: 5, k: 6, ..g }).is_err());
        assert!(cluster_total_energy(&p(), &ClusterGeometry { d_to_ch: -1.0, ..g }).is_err());
    }

    #[test]
    fn linear_examples() {
        let s = LinearScenario { m: 25.0, l_a: 200.0, l_b: 200.0 };
        assert!(close(linear_direct_cost(&p(), &s).unwrap(), 82.5e-6));
        assert!(close(linear_multihop_cost(&p(), &s).unwrap(), 77.5e-6));
        let zero_bits = LinearScenario { l_a: 0.0, l_b: 0.0, ..s };
        assert_eq!(linear_direct_cost(&p(), &zero_bits).unwrap(), 0.0);
        assert_eq!(linear_multihop_cost(&p(), &zero_bits).unwrap(), 0.0);
        let zero_m = LinearScenario { m: 0.0, ..s };
        assert!(close(linear_direct_cost(&p(), &zero_m).unwrap(), 20e-6));
        assert!(close(linear_multihop_cost(&p(), &zero_m).unwrap(), 40e-6));
        assert!(linear_direct_cost(&p(), &LinearScenario { m: -1.0, ..s }).is_err());
    }

    #[test]
    fn breakeven_examples() {
        let m = multihop_breakeven_m(&p(), 200.0, 200.0).unwrap();
        assert!((m - 22.36).abs() < 0.01);
        let free_electronics = RadioParams { e_elec_tx: 1e-30, e_elec_rx: 1e-30, ..p() };
        assert!(multihop_breakeven_m(&free_electronics, 200.0, 200.0).unwrap() < 1e-9);
        for (m, multihop_wins) in [(30.0, true), (15.0, false)] {
            let s = LinearScenario { m, l_a: 200.0, l_b: 200.0 };
            let direct = linear_direct_cost(&p(), &s).unwrap();
            let relay = linear_multihop_cost(&p(), &s).unwrap();
            assert_eq!(relay < direct, multihop_wins, "m = {m}");
        }
        assert!(multihop_breakeven_m(&p(), 0.0, 200.0).is_err());
    }

    #[test]
    fn default_params_are_valid() {
        p().validate().unwrap();
        assert!(RadioParams { eps_fs: 0.0, ..p() }.validate().is_err());
    }

    proptest! {
        #[test]
        fn tx_is_linear_in_bits(bits in 0.0f64..1e5, d in 0.0f64..500.0) {
            let one = tx_energy(&p(), bits, d).unwrap();
            let two = tx_energy(&p(), 2.0 * bits, d).unwrap();
            prop_assert!((two - 2.0 * one).abs() <= 1e-15 * two.abs().max(1.0));
            let r1 = rx_energy(&p(), bits).unwrap();
            let r2 = rx_energy(&p(), 2.0 * bits).unwrap();
            prop_assert!((r2 - 2.0 * r1).abs() <= 1e-15 * r2.abs().max(1.0));
        }

        #[test]
        fn tx_strictly_increasing(bits in 1.0f64..1e5, d in 0.0f64..500.0, step in 0.01f64..10.0) {
            prop_assert!(tx_energy(&p(), bits, d + step).unwrap() > tx_energy(&p(), bits, d).unwrap());
            prop_assert!(tx_energy(&p(), bits + step, d).unwrap() > tx_energy(&p(), bits, d).unwrap());
        }

        #[test]
        fn upward_decomposition_is_exact(
            k in 1u32..20, extra in 0u32..200,
            l_c in 0.0f64..4000.0, l_a in 0.0f64..4000.0,
            d_bs in 0.0f64..300.0, d_ch in 0.0f64..100.0,
        ) {
            let g = ClusterGeometry { n: k + extra, k, l_c, l_a, l_bs: l_c, d_to_bs: d_bs, d_to_ch: d_ch };
            let whole = cluster_upward_energy(&p(), &g).unwrap();
            let parts = ch_upward_energy(&p(), &g).unwrap()
                + g.members() * member_upward_energy(&p(), l_c, d_ch).unwrap();
            prop_assert_eq!(whole, parts);
            let total = network_total_energy(&p(), &g).unwrap();
            prop_assert_eq!(total, g.k as f64 * cluster_total_energy(&p(), &g).unwrap());
        }

        #[test]
        fn breakeven_splits_the_sweep(l_a in 1.0f64..5000.0, l_b in 0.0f64..5000.0) {
            let m_star = multihop_breakeven_m(&p(), l_a, l_b).unwrap();
            for i in 1..=60 {
                let m = i as f64;
                if (m - m_star).abs() < 1e-6 {
                    continue;
                }
                let s = LinearScenario { m, l_a, l_b };
                let direct = linear_direct_cost(&p(), &s).unwrap();
                let relay = linear_multihop_cost(&p(), &s).unwrap();
                if m > m_star {
                    prop_assert!(relay < direct, "m = {}", m);
                } else {
                    prop_assert!(relay > direct, "m = {}", m);
                }
            }
        }
    }
}
