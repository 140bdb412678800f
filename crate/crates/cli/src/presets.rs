//! Built-in named scenarios.

use std::fmt::Write as _;

use crate::config::{ConfigError, RawConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Preset {
    pub name: &'static str,
    pub kind: &'static str,
    pub description: &'static str,
    pub config: &'static str,
}

impl Preset {
    pub fn raw_config(&self) -> Result<RawConfig, ConfigError> {
        RawConfig::parse(self.config)
    }
}

/// Alphabetized by name.
pub const PRESETS: &[Preset] = &[
    Preset {
        name: "bch-random",
        kind: "verify-bch",
        description: "group and resolvent commutator order on three random 4x4 Hermitian pairs",
        config: "\
[verify]
pairs = 3
",
    },
    Preset {
        name: "catmap-costate",
        kind: "dynsys",
        description: "cat map with random costate and tangent, pairing and reversal checks",
        config: "\
[map]
name = catmap
[run]
steps = 50
[check]
pairing_tolerance = 1e-10
",
    },
    Preset {
        name: "commutator-order",
        kind: "convergence-commutator",
        description: "single four-factor step against the dense exponential, constant flow",
        config: "\
[grid]
bits = 6, 2
lo = -16, -1
hi = 16, 1
[flow]
name = constant(1, 0)
[sweep]
mode = single
taus = 0.02, 0.01, 0.005, 0.0025
measure = operator
expected_slope = 3
tolerance = 0.3
",
    },
    Preset {
        name: "constant-transport",
        kind: "liouville",
        description: "Gaussian blob carried by a uniform flow, compared with characteristics",
        config: "\
[flow]
name = constant(1, 0)
[state]
center = -0.5, 0
[evolution]
t_total = 1
steps = 256
[check]
min_fidelity = 0.999
",
    },
    Preset {
        name: "cubic-reversal",
        kind: "dynsys",
        description: "s -> s + s^3 run forward and inverted by Newton iteration",
        config: "\
[map]
name = cubic1d
[run]
steps = 6
s0 = 0.3
l0 = 1
tangent0 = 1
",
    },
    Preset {
        name: "free-spreading",
        kind: "quantum",
        description: "free Gaussian packet spreading, norm conserved",
        config: "\
[state]
name = gaussian(0, 1, 0.7071067811865476)
[evolution]
t_total = 1
steps = 100
[check]
norm_tolerance = 1e-10
",
    },
    Preset {
        name: "harmonic-coherent",
        kind: "quantum",
        description: "displaced ground state oscillating in a harmonic well for one period",
        config: "\
[potential]
name = harmonic(1)
[state]
name = gaussian(2, 0, 0.7071067811865476)
[evolution]
t_total = 6.283185307179586
steps = 512
[check]
norm_tolerance = 1e-10
",
    },
    Preset {
        name: "kernel-gaussian",
        kind: "verify-kernel",
        description: "kinetic kernel against DFT quadrature, real and damped imaginary a",
        config: "",
    },
    Preset {
        name: "rotation-transport",
        kind: "liouville",
        description: "blob carried a quarter turn by the rotation flow",
        config: "\
[flow]
name = rotation
[state]
center = 2, 0
[evolution]
t_total = 1.5707963267948966
steps = 1024
[check]
min_fidelity = 0.99
",
    },
    Preset {
        name: "trotter-harmonic",
        kind: "convergence-trotter",
        description: "global Trotter error in N for the harmonic oscillator",
        config: "\
[sweep]
mode = global
expected_slope = -1
tolerance = 0.15
",
    },
    Preset {
        name: "trotter-local",
        kind: "convergence-trotter",
        description: "single Trotter step error in tau for the harmonic oscillator",
        config: "\
[state]
name = gaussian(2, 0, 0.7071067811865476)
[sweep]
mode = local
expected_slope = 2
tolerance = 0.2
",
    },
];

pub fn find_preset(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// One `name  kind  description` line per preset, alphabetized.
pub fn list_scenarios() -> String {
    let mut presets: Vec<&Preset> = PRESETS.iter().collect();
    presets.sort_by_key(|p| p.name);
    let name_w = presets.iter().map(|p| p.name.len()).max().unwrap_or(0);
    let kind_w = presets.iter().map(|p| p.kind.len()).max().unwrap_or(0);
    let mut out = String::new();
    for p in presets {
        let _ = writeln!(out, "{:name_w$}  {:kind_w$}  {}", p.name, p.kind, p.description);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_sorted_and_parse() {
        assert!(PRESETS.windows(2).all(|w| w[0].name < w[1].name));
        for p in PRESETS {
            p.raw_config().unwrap();
        }
    }
}
