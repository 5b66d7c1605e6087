use std::io::Write;

use resokit::species::{load_species, write_species, SpeciesRecord};
use resokit::units::{classify_resonance, constants::BOHR_RADIUS, vdw_length, width_radius, ResonanceClass, NARROW_THRESHOLD};
use resokit::verify::SYNTHETIC_SPECIES;
use resokit::Error;

// Independent 40-digit unit-conversion chain (CODATA 2018), in bohr.
const RSTAR_A0: [f64; 3] = [741.061_329_587_347_5, -355.954_924_356_655_5, -0.538_616_003_960_728_7];
const RVDW_A0: [f64; 3] = [138.943_042_369_806_8, 75.573_038_471_998_71, 170.000_517_047_019_4];

fn file_with(contents: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn synthetic_file_matches_hand_conversion() {
    let f = file_with(SYNTHETIC_SPECIES);
    let species = load_species(f.path()).unwrap();
    assert_eq!(species.len(), 3);
    for (i, s) in species.iter().enumerate() {
        let rstar = width_radius(&s.resonance).unwrap() / BOHR_RADIUS;
        let rvdw = vdw_length(&s.resonance).unwrap() / BOHR_RADIUS;
        assert!((rstar / RSTAR_A0[i] - 1.0).abs() < 1e-12, "{}: {rstar}", s.record.name);
        assert!((rvdw / RVDW_A0[i] - 1.0).abs() < 1e-12, "{}: {rvdw}", s.record.name);
    }
    let classes: Vec<_> = species.iter().map(|s| classify_resonance(&s.resonance, NARROW_THRESHOLD)).collect();
    assert_eq!(classes, [ResonanceClass::Narrow, ResonanceClass::Narrow, ResonanceClass::Broad]);
}

#[test]
fn round_trip_through_a_file() {
    let records = vec![SpeciesRecord {
        name: "W".into(),
        mass_amu: 39.963_998_166,
        c6_au: 3897.0 / 7.0,
        b0_g: 202.1,
        delta_b_g: 7.0e-3 / 3.0,
        abg_a0: 174.0,
        dmu_mub: 1.68,
    }];
    let f = tempfile::NamedTempFile::new().unwrap();
    write_species(std::fs::File::create(f.path()).unwrap(), &records).unwrap();
    let back = load_species(f.path()).unwrap();
    assert_eq!(back[0].record, records[0]);
}

#[test]
fn missing_file_is_an_input_error() {
    assert!(matches!(load_species("/nonexistent/species.csv"), Err(Error::InvalidInput(_))));
}
