use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::DEFAULT_G_FACTOR;

use super::SpinError;

/// Above this field magnitude (MV/cm) an input almost certainly carries a
/// unit error; 4H-SiC breaks down near 2.5–3 MV/cm.
pub const MAX_FIELD_MV_PER_CM: f64 = 10.0;

/// Parameters of the ground-state spin Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem {
    /// Twice the spin quantum number (3 for S = 3/2).
    pub twice_spin: u32,
    /// Zero-field splitting D, MHz.
    pub zfs_d: f64,
    pub g_factor: f64,
    /// d∥/h, MHz/(MV/cm). Signed.
    pub d_par_over_h: f64,
    /// d⊥/h, MHz/(MV/cm). Its sign is not observable in ODMR at zero
    /// magnetic field.
    pub d_perp_over_h: f64,
    pub label: alloc::string::String,
}

impl SpinSystem {
    pub fn new(twice_spin: u32, zfs_d: f64, d_par_over_h: f64, d_perp_over_h: f64) -> Self {
        Self {
            twice_spin,
            zfs_d,
            g_factor: DEFAULT_G_FACTOR,
            d_par_over_h,
            d_perp_over_h,
            label: alloc::string::String::from("custom"),
        }
    }

    /// V_Si with a caller-chosen D and dipoles.
    pub fn vsi_with(zfs_d: f64, d_par_over_h: f64, d_perp_over_h: f64) -> Self {
        let mut sys = Self::preset(Preset::VSi);
        sys.zfs_d = zfs_d;
        sys.d_par_over_h = d_par_over_h;
        sys.d_perp_over_h = d_perp_over_h;
        sys
    }

    pub fn preset(preset: Preset) -> Self {
        preset.entry().to_system()
    }

    /// Spin quantum number S.
    pub fn spin(&self) -> f64 {
        self.twice_spin as f64 / 2.0
    }

    /// Matrix dimension 2S + 1.
    pub fn dim(&self) -> usize {
        self.twice_spin as usize + 1
    }

    /// Same system with d⊥ set from the ratio r = |d⊥/d∥|.
    pub fn with_perp_ratio(&self, ratio: f64) -> Self {
        let mut sys = self.clone();
        sys.d_perp_over_h = ratio * self.d_par_over_h.abs();
        sys
    }

    pub fn validate(&self) -> Result<(), SpinError> {
        if self.twice_spin != 2 && self.twice_spin != 3 {
            return Err(SpinError::UnsupportedSpin {
                twice_spin: self.twice_spin,
            });
        }
        if !(self.zfs_d.is_finite()
            && self.g_factor.is_finite()
            && self.d_par_over_h.is_finite()
            && self.d_perp_over_h.is_finite())
        {
            return Err(SpinError::InvalidSystem("non-finite parameter"));
        }
        Ok(())
    }
}

/// Electric and magnetic field in the crystal frame (z′ ∥ c-axis).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CrystalField {
    /// E_z′, MV/cm.
    pub e_par: f64,
    /// E_x′, MV/cm.
    pub e_perp_x: f64,
    /// E_y′, MV/cm.
    pub e_perp_y: f64,
    /// B_z′, mT.
    pub b_par: f64,
    pub b_perp_x: f64,
    pub b_perp_y: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("field component is not finite")]
    NonFinite,
    #[error("|E| = {magnitude} MV/cm exceeds {MAX_FIELD_MV_PER_CM} MV/cm; check units")]
    TooLarge { magnitude: f64 },
}

impl CrystalField {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Pure axial electric field.
    pub fn axial(e_par: f64) -> Self {
        Self {
            e_par,
            ..Self::default()
        }
    }

    /// Electric field with a transverse part along x′.
    pub fn electric(e_par: f64, e_perp: f64) -> Self {
        Self {
            e_par,
            e_perp_x: e_perp,
            ..Self::default()
        }
    }

    pub fn with_b_par(mut self, b_par: f64) -> Self {
        self.b_par = b_par;
        self
    }

    pub fn e_perp(&self) -> f64 {
        self.e_perp_x.hypot(self.e_perp_y)
    }

    pub fn e_magnitude(&self) -> f64 {
        (self.e_par * self.e_par + self.e_perp_x * self.e_perp_x + self.e_perp_y * self.e_perp_y)
            .sqrt()
    }

    pub fn validate(&self) -> Result<(), FieldError> {
        let comps = [
            self.e_par,
            self.e_perp_x,
            self.e_perp_y,
            self.b_par,
            self.b_perp_x,
            self.b_perp_y,
        ];
        if comps.iter().any(|c| !c.is_finite()) {
            return Err(FieldError::NonFinite);
        }
        let magnitude = self.e_magnitude();
        if magnitude > MAX_FIELD_MV_PER_CM {
            return Err(FieldError::TooLarge { magnitude });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Preset {
    VSi,
    Nv,
    Pl1,
    Pl2,
    Pl3,
    Pl4,
    Pl5,
    Pl6,
}

impl Preset {
    pub const ALL: [Preset; 8] = [
        Preset::VSi,
        Preset::Nv,
        Preset::Pl1,
        Preset::Pl2,
        Preset::Pl3,
        Preset::Pl4,
        Preset::Pl5,
        Preset::Pl6,
    ];

    pub fn entry(self) -> &'static PresetEntry {
        &PRESET_TABLE[self as usize]
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.entry().label)
    }
}

impl FromStr for Preset {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        let p = match lower.as_str() {
            "vsi" | "v_si" => Preset::VSi,
            "nv" => Preset::Nv,
            "pl1" => Preset::Pl1,
            "pl2" => Preset::Pl2,
            "pl3" => Preset::Pl3,
            "pl4" => Preset::Pl4,
            "pl5" => Preset::Pl5,
            "pl6" => Preset::Pl6,
            _ => return Err(SpinError::InvalidSystem("unknown preset")),
        };
        Ok(p)
    }
}

/// A tabulated dipole magnitude, MHz/(MV/cm) (numerically Hz/(V/cm)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DipoleValue {
    Value(f64),
    /// Only an upper bound is known.
    UpperBound(f64),
    Unreported,
}

impl DipoleValue {
    /// Magnitude used when instantiating a system: bounds are taken at their
    /// limit, unreported values as zero.
    pub fn magnitude(self) -> f64 {
        match self {
            DipoleValue::Value(v) | DipoleValue::UpperBound(v) => v,
            DipoleValue::Unreported => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignAnnotation {
    /// Sign determined experimentally.
    Measured(i8),
    /// Sign only from theory.
    Theoretical(i8),
    Unknown,
}

impl SignAnnotation {
    fn factor(self) -> f64 {
        match self {
            SignAnnotation::Measured(s) | SignAnnotation::Theoretical(s) if s < 0 => -1.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PresetEntry {
    pub label: &'static str,
    pub twice_spin: u32,
    /// MHz. For V_Si this is the intercept seen on the calibration spot
    /// (2D ≈ 71 MHz); divacancy and NV values are room-temperature
    /// literature numbers.
    pub zfs_d: f64,
    pub d_par: DipoleValue,
    pub d_par_sign: SignAnnotation,
    pub d_perp: DipoleValue,
    pub d_perp_sign: SignAnnotation,
}

impl PresetEntry {
    pub fn to_system(&self) -> SpinSystem {
        SpinSystem {
            twice_spin: self.twice_spin,
            zfs_d: self.zfs_d,
            g_factor: DEFAULT_G_FACTOR,
            d_par_over_h: self.d_par_sign.factor() * self.d_par.magnitude(),
            d_perp_over_h: self.d_perp_sign.factor() * self.d_perp.magnitude(),
            label: alloc::string::String::from(self.label),
        }
    }
}

/// Ground-state electric dipole moments of common spin defects.
pub static PRESET_TABLE: [PresetEntry; 8] = [
    PresetEntry {
        label: "VSi",
        twice_spin: 3,
        zfs_d: 35.5,
        d_par: DipoleValue::Value(15.0),
        d_par_sign: SignAnnotation::Measured(-1),
        d_perp: DipoleValue::Value(16.5),
        d_perp_sign: SignAnnotation::Theoretical(1),
    },
    PresetEntry {
        label: "NV",
        twice_spin: 2,
        zfs_d: 2870.0,
        d_par: DipoleValue::Value(0.35),
        d_par_sign: SignAnnotation::Unknown,
        d_perp: DipoleValue::Value(17.0),
        d_perp_sign: SignAnnotation::Unknown,
    },
    PresetEntry {
        label: "PL1",
        twice_spin: 2,
        zfs_d: 1336.0,
        d_par: DipoleValue::Value(2.65),
        d_par_sign: SignAnnotation::Unknown,
        d_perp: DipoleValue::Unreported,
        d_perp_sign: SignAnnotation::Unknown,
    },
    PresetEntry {
        label: "PL2",
        twice_spin: 2,
        zfs_d: 1305.0,
        d_par: DipoleValue::Value(1.61),
        d_par_sign: SignAnnotation::Unknown,
        d_perp: DipoleValue::Unreported,
        d_perp_sign: SignAnnotation::Unknown,
    },
    PresetEntry {
        label: "PL3",
        twice_spin: 2,
        zfs_d: 1222.0,
        d_par: DipoleValue::UpperBound(3.0),
        d_par_sign: SignAnnotation::Unknown,
        d_perp: DipoleValue::Value(32.3),
        d_perp_sign: SignAnnotation::Unknown,
    },
    PresetEntry {
        label: "PL4",
        twice_spin: 2,
        zfs_d: 1334.0,
        d_par: DipoleValue::Value(0.44),
        d_par_sign: SignAnnotation::Unknown,
        d_perp: DipoleValue::Value(28.5),
        d_perp_sign: SignAnnotation::Unknown,
    },
    PresetEntry {
        label: "PL5",
        twice_spin: 2,
        zfs_d: 1375.0,
        d_par: DipoleValue::UpperBound(3.0),
        d_par_sign: SignAnnotation::Unknown,
        d_perp: DipoleValue::Value(32.5),
        d_perp_sign: SignAnnotation::Unknown,
    },
    PresetEntry {
        label: "PL6",
        twice_spin: 2,
        zfs_d: 1365.0,
        d_par: DipoleValue::Value(0.96),
        d_par_sign: SignAnnotation::Unknown,
        d_perp: DipoleValue::Unreported,
        d_perp_sign: SignAnnotation::Unknown,
    },
];
