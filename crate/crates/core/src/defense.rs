// Copyright 2026 The AQS Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Receive-side countermeasures: a wavelength filter and a photon number
//! splitter, applied to incoming carriers before any processing.
//!
//! Detection is ideal: a flagged carrier is removed from the channel and
//! raises an alarm.

use serde::Serialize;
use thiserror::Error;

use crate::protocol::{Band, Carrier};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DefenseError {
    #[error("unknown defense `{0}` (expected wavelength-filter or pns)")]
    Unknown(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct DefenseConfig {
    pub wavelength_filter: bool,
    pub pns: bool,
}

impl DefenseConfig {
    pub const NONE: DefenseConfig = DefenseConfig {
        wavelength_filter: false,
        pns: false,
    };
    pub const ALL: DefenseConfig = DefenseConfig {
        wavelength_filter: true,
        pns: true,
    };

    /// Parses a comma-separated list such as `wavelength-filter,pns`.
    /// The empty string enables nothing.
    pub fn parse(list: &str) -> Result<Self, DefenseError> {
        let mut config = DefenseConfig::NONE;
        for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match Device::from_name(item)? {
                Device::WavelengthFilter => config.wavelength_filter = true,
                Device::PhotonNumberSplitter => config.pns = true,
            }
        }
        Ok(config)
    }

    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.wavelength_filter {
            out.push(Device::WavelengthFilter.name().to_owned());
        }
        if self.pns {
            out.push(Device::PhotonNumberSplitter.name().to_owned());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Device {
    #[serde(rename = "wavelength-filter")]
    WavelengthFilter,
    #[serde(rename = "pns")]
    PhotonNumberSplitter,
}

impl Device {
    pub fn name(self) -> &'static str {
        match self {
            Device::WavelengthFilter => "wavelength-filter",
            Device::PhotonNumberSplitter => "pns",
        }
    }

    pub fn from_name(name: &str) -> Result<Self, DefenseError> {
        match name {
            "wavelength-filter" => Ok(Device::WavelengthFilter),
            "pns" => Ok(Device::PhotonNumberSplitter),
            other => Err(DefenseError::Unknown(other.to_owned())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Alarm {
    pub device: Device,
    pub flagged: Vec<Carrier>,
}

/// Passes signal-band carriers, flags everything else.
pub fn wavelength_filter(carriers: &[Carrier]) -> (Vec<Carrier>, Vec<Carrier>) {
    carriers.iter().cloned().partition(|c| c.band == Band::Signal)
}

/// Passes the first carrier of each time slot, flags the rest.
pub fn photon_number_splitter(carriers: &[Carrier]) -> (Vec<Carrier>, Vec<Carrier>) {
    let mut seen = std::collections::BTreeSet::new();
    carriers.iter().cloned().partition(|c| seen.insert(c.time_slot))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Screening {
    pub passed: Vec<Carrier>,
    pub alarms: Vec<Alarm>,
}

impl Screening {
    pub fn is_clean(&self) -> bool {
        self.alarms.is_empty()
    }

    pub fn flagged_count(&self) -> usize {
        self.alarms.iter().map(|a| a.flagged.len()).sum()
    }
}

/// Runs the enabled devices in order: wavelength filter, then splitter.
pub fn screen(config: &DefenseConfig, carriers: &[Carrier]) -> Screening {
    let mut passed = carriers.to_vec();
    let mut alarms = Vec::new();
    if config.wavelength_filter {
        let (kept, flagged) = wavelength_filter(&passed);
        if !flagged.is_empty() {
            alarms.push(Alarm {
                device: Device::WavelengthFilter,
                flagged,
            });
        }
        passed = kept;
    }
    if config.pns {
        let (kept, flagged) = photon_number_splitter(&passed);
        if !flagged.is_empty() {
            alarms.push(Alarm {
                device: Device::PhotonNumberSplitter,
                flagged,
            });
        }
        passed = kept;
    }
    Screening { passed, alarms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{delay_photon_inject, ipe_inject, DecoySet};
    use crate::protocol::Lab;
    use crate::statevector::{Label, PureState};

    fn honest_stream(lab: &mut Lab, n: usize) -> Vec<Carrier> {
        (0..n)
            .map(|i| {
                let l = Label::indexed("p", i + 1);
                lab.pool_mut().insert(PureState::basis(l.clone(), false)).unwrap();
                lab.emit(l, Band::Signal, i as u32)
            })
            .collect()
    }

    #[test]
    fn parse_lists() {
        assert_eq!(DefenseConfig::parse("").unwrap(), DefenseConfig::NONE);
        assert_eq!(DefenseConfig::parse("pns, wavelength-filter").unwrap(), DefenseConfig::ALL);
        assert_eq!(DefenseConfig::ALL.names(), vec!["wavelength-filter", "pns"]);
        assert_eq!(
            DefenseConfig::parse("pns,laser").unwrap_err(),
            DefenseError::Unknown("laser".into())
        );
    }

    #[test]
    fn honest_stream_is_never_flagged() {
        let mut lab = Lab::new();
        let s = honest_stream(&mut lab, 8);
        assert!(wavelength_filter(&s).1.is_empty());
        assert!(photon_number_splitter(&s).1.is_empty());
        let screening = screen(&DefenseConfig::ALL, &s);
        assert!(screening.is_clean());
        assert_eq!(screening.passed, s);
    }

    #[test]
    fn filter_catches_invisible_photons() {
        let mut lab = Lab::new();
        let s = honest_stream(&mut lab, 5);
        let decoys = DecoySet::prepare(&mut lab, 5).unwrap();
        let attacked = ipe_inject(&mut lab, &s, &decoys).unwrap();
        let (passed, flagged) = wavelength_filter(&attacked);
        assert_eq!(flagged.len(), 5);
        assert_eq!(passed, s);
        // Off-band decoys share their slot, so the splitter sees them too.
        let slots: std::collections::BTreeSet<u32> = attacked.iter().map(|c| c.time_slot).collect();
        let expected_pns_flags = attacked.len() - slots.len();
        assert_eq!(photon_number_splitter(&attacked).1.len(), expected_pns_flags);
        assert_eq!(expected_pns_flags, 5);
    }

    #[test]
    fn splitter_catches_delay_photons_filter_does_not() {
        let mut lab = Lab::new();
        let s = honest_stream(&mut lab, 4);
        let decoys = DecoySet::prepare(&mut lab, 4).unwrap();
        let attacked = delay_photon_inject(&mut lab, &s, &decoys).unwrap();
        assert!(wavelength_filter(&attacked).1.is_empty());
        let (passed, flagged) = photon_number_splitter(&attacked);
        assert_eq!(flagged.len(), 4);
        assert_eq!(passed, s);
        let only_filter = screen(
            &DefenseConfig {
                wavelength_filter: true,
                pns: false,
            },
            &attacked,
        );
        assert!(only_filter.is_clean());
        let both = screen(&DefenseConfig::ALL, &attacked);
        assert_eq!(both.alarms.len(), 1);
        assert_eq!(both.alarms[0].device, Device::PhotonNumberSplitter);
    }
}
