//! Datasets shipped with the binary, addressable by name wherever a series
//! or device file is expected.
//!
//! | name               | contents                                          |
//! |--------------------|---------------------------------------------------|
//! | `point1`           | 6-bias low-E⊥ calibration series (E⊥/E∥ = 0.005)  |
//! | `point3`           | 16-bias high-E⊥ series (E⊥/E∥ = 0.19)             |
//! | `uniform`          | laterally uniform p⁺/n⁻ diode, no termination     |
//! | `termination`      | JTE edge termination, ε_ext = 1.89, no wire       |
//! | `termination-wire` | as above with the grounded wire 4 µm above        |
//!
//! The series are seeded draws from [`SeriesFixture`]; the device files are
//! serialized [`DeviceModel2D`] fixtures. [`generate`] rebuilds any of them.

use std::path::Path;

use serde::Serialize;
use vsi_core::device::{fixture_wire, DeviceModel2D};
use vsi_core::electrometry::BiasSeries;
use vsi_core::synthetic::SeriesFixture;

use crate::error::CliError;
use crate::formats::series::{read_series, write_series};
use crate::formats::{read_text, Header, Provenance};

/// Noise seed of the bundled series.
pub const BUNDLED_SEED: u64 = 20;

/// ε of the dielectric above the device in the termination fixtures.
pub const FIXTURE_EPS_EXT: f64 = 1.89;

pub const NAMES: [&str; 5] = ["point1", "point3", "uniform", "termination", "termination-wire"];

fn file(name: &str) -> Option<&'static str> {
    Some(match name {
        "point1" => include_str!("../data/point1_series.csv"),
        "point3" => include_str!("../data/point3_series.csv"),
        "uniform" => include_str!("../data/uniform.json"),
        "termination" => include_str!("../data/termination.json"),
        "termination-wire" => include_str!("../data/termination_wire.json"),
        _ => return None,
    })
}

/// File name under `data/`.
pub fn file_name(name: &str) -> Option<&'static str> {
    Some(match name {
        "point1" => "point1_series.csv",
        "point3" => "point3_series.csv",
        "uniform" => "uniform.json",
        "termination" => "termination.json",
        "termination-wire" => "termination_wire.json",
        _ => return None,
    })
}

#[derive(Serialize)]
struct SeriesRecipe<'a> {
    fixture: &'a SeriesFixture,
    seed: u64,
}

fn device_json(m: &DeviceModel2D) -> String {
    let mut s = serde_json::to_string_pretty(m).expect("model serializes");
    s.push('\n');
    s
}

/// Regenerates the bundled file `name` from its fixture.
pub fn generate(name: &str) -> Option<String> {
    let series = |fx: SeriesFixture| {
        let prov = Provenance::for_config(
            &SeriesRecipe {
                fixture: &fx,
                seed: BUNDLED_SEED,
            },
            BUNDLED_SEED,
        );
        let s = fx.sample(BUNDLED_SEED).expect("fixture is valid");
        write_series(&s, Header::new(&prov))
    };
    Some(match name {
        "point1" => series(SeriesFixture::point1()),
        "point3" => series(SeriesFixture::point3()),
        "uniform" => device_json(&DeviceModel2D::uniform_fixture(0.1)),
        "termination" => device_json(&DeviceModel2D::termination_fixture(FIXTURE_EPS_EXT, None)),
        "termination-wire" => device_json(&DeviceModel2D::termination_fixture(
            FIXTURE_EPS_EXT,
            Some(fixture_wire(4.0)),
        )),
        _ => return None,
    })
}

/// Contents of a bundled dataset or, failing that, of the file at `spec`.
fn text(spec: &str) -> Result<String, CliError> {
    match file(spec) {
        Some(t) => Ok(t.to_string()),
        None => read_text(Path::new(spec)).map_err(|e| CliError::Config(e.to_string())),
    }
}

pub fn load_series(spec: &str) -> Result<BiasSeries, CliError> {
    let t = text(spec)?;
    let (_, s) = read_series(&t).map_err(|e| CliError::Config(format!("{spec}: {e}")))?;
    Ok(s)
}

pub fn load_device(spec: &str) -> Result<DeviceModel2D, CliError> {
    let t = text(spec)?;
    let m: DeviceModel2D = serde_json::from_str(&t).map_err(|e| CliError::Config(format!("{spec}: {e}")))?;
    m.validate()?;
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Set VSI_REGENERATE_DATA=1 to rewrite the files instead of checking.
    #[test]
    fn bundled_files_match_fixtures() {
        let regen = std::env::var_os("VSI_REGENERATE_DATA").is_some();
        for name in NAMES {
            let fresh = generate(name).unwrap();
            if regen {
                let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(file_name(name).unwrap());
                std::fs::write(p, &fresh).unwrap();
            } else {
                assert_eq!(file(name).unwrap(), fresh, "data/{} is stale", file_name(name).unwrap());
            }
        }
    }

    #[test]
    fn bundled_inputs_load() {
        assert_eq!(load_series("point1").unwrap().len(), 6);
        assert_eq!(load_series("point3").unwrap().len(), 16);
        assert!(load_device("termination-wire").unwrap().wire.is_some());
    }
}
