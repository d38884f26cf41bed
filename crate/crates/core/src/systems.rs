//! Built-in molecular systems: the five small benchmark molecules, the
//! eight ligands and amantadine (Cartesian coordinates in Å).

use crate::molint::{parse_geometry, LengthUnit, Molecule};
use crate::{Error, Result};

/// A named geometry with its net charge.
#[derive(Clone, Copy, Debug)]
pub struct System {
    pub name: &'static str,
    pub geometry: &'static str,
    pub charge: i32,
}

impl System {
    pub fn molecule(&self) -> Molecule {
        parse_geometry(self.geometry, LengthUnit::Angstrom, self.charge).expect("built-in geometry")
    }
}

/// Small molecules used for FCI/CCSD/SQD benchmarks (STO-3G).
pub const BENCHMARK: [System; 5] = [
    System {
        name: "H2",
        geometry: "H -8.0563 4.7154 0.0; H -8.5983 4.7845 -0.3333",
        charge: 0,
    },
    System {
        name: "LiH",
        geometry: "Li -1.3452 3.1070 0.0; H -0.5971 2.1184 1.0889",
        charge: 0,
    },
    System {
        name: "BeH2",
        geometry: "Be -0.6141 3.0632 0.0; H -1.7489 3.2078 -0.6978; H -0.5883 3.9542 1.0005",
        charge: 0,
    },
    System {
        name: "H2O",
        geometry: "O -8.6252 5.1579 -0.0147; H -7.7020 5.4505 -0.0474; H -9.0559 5.8062 0.5626",
        charge: 0,
    },
    System {
        name: "NH3",
        geometry: "N -9.0297 4.0906 0.0167; H -8.5642 3.4395 0.6473; H -8.4095 4.1973 -0.7848; H -9.8553 3.6042 -0.3299",
        charge: 0,
    },
];

/// Ligands used for the DMET study.
pub const LIGANDS: [System; 8] = [
    System {
        name: "HOCN",
        geometry: "H -1.4586 -0.2728 0.0655; O -0.6006 0.0996 -0.3212; C 0.5444 0.0905 0.4227; N 1.5148 0.0828 1.0531",
        charge: 0,
    },
    System {
        name: "CH3NO",
        geometry: "C -0.9105 -0.0209 -0.3325; H 2.1707 -0.1169 0.6124; H -1.0055 1.0435 -0.5074; H -1.7610 -0.6672 -0.5009; N 0.2079 -0.5236 0.0747; O 1.2984 0.2851 0.2934",
        charge: 0,
    },
    System {
        name: "CH5NO",
        geometry: "C -0.9661 0.2013 0.1500; H -1.0003 0.9655 -0.6585; H -1.6672 0.5167 0.9498; H -1.3069 -0.7850 -0.2370; H 1.8825 0.4411 -0.4096; H 1.6013 -1.1638 -0.0232; N 1.1321 -0.2814 -0.3282; O 0.3246 0.1057 0.6921",
        charge: 0,
    },
    System {
        name: "C2H3NO",
        geometry: "C -0.8727 -0.0486 -0.0127; C 1.4988 0.2006 -0.1212; H -0.6585 -0.7319 0.8393; H -1.4198 -0.6122 -0.7965; H -1.5141 0.7828 0.3460; N 0.3512 0.5000 -0.5815; O 2.6150 -0.0907 0.3266",
        charge: 0,
    },
    System {
        name: "C2H5NO",
        geometry: "C -1.3220 0.0798 -0.0599; C 0.1251 0.1946 0.2783; H -1.8488 -0.4928 0.7319; H -1.7722 1.0918 -0.1346; H -1.4404 -0.4413 -1.0330; H 0.5670 1.1752 0.4092; H 2.6590 0.0768 0.8612; N 0.8453 -0.8736 0.4138; O 2.1868 -0.8104 0.7261",
        charge: 0,
    },
    System {
        name: "CH4N2O",
        geometry: "C 0.0236 0.1748 0.4750; H 2.1523 -0.0418 0.2442; H 1.1878 -0.5180 -1.1992; H -2.1229 0.2590 0.3460; H -1.3040 -0.3426 -1.1399; N -1.2432 0.0166 -0.1616; N 1.2242 -0.1571 -0.2203; O 0.0823 0.6092 1.6557",
        charge: 0,
    },
    System {
        name: "NOCl",
        geometry: "N -0.2226 0.4586 0.0000; O -1.1576 -0.2817 0.0000; Cl 1.3803 -0.1769 0.0000",
        charge: 0,
    },
    System {
        name: "HOSCN",
        geometry: "H -1.5762 0.5676 -0.3044; O -1.2722 0.4432 0.6302; S -0.4213 -1.0482 0.6165; C 1.1270 -0.2448 0.3537; N 2.1426 0.2822 0.1812",
        charge: 0,
    },
];

pub const AMANTADINE: System = System {
    name: "amantadine",
    geometry: "H -0.72057 1.14346 0.93144; H -1.53537 1.21683 -0.47761; N -0.73805 0.77679 -0.01956; C -0.92076 -0.67321 0.01059; C -2.22915 -1.03654 0.74833; H -3.09165 -0.57160 0.25272; H -2.21056 -0.65093 1.77628; C 0.26844 -1.33324 0.74228; H 0.34582 -0.95489 1.77025; H 1.21362 -1.08313 0.24234; C 0.09005 -2.86228 0.76987; H 0.93676 -3.32380 1.29009; C -0.98906 -1.22001 -1.43216; H -0.07298 -0.96728 -1.98243; H -1.82253 -0.75964 -1.97920; C -1.17095 -2.74873 -1.41062; H -1.21856 -3.12973 -2.43684; C -2.47313 -3.09321 -0.66778; H -2.62462 -4.17964 -0.66246; H -3.33092 -2.65475 -1.19237; C -2.41390 -2.56473 0.77559; H -3.34286 -2.81538 1.29977; C -1.21881 -3.20616 1.50117; H -1.34806 -4.29459 1.54495; H -1.17399 -2.84898 2.53734; C 0.01730 -3.38948 -0.67334; H 0.95170 -3.16434 -1.20199; H -0.09033 -4.48112 -0.66794",
    charge: 0,
};

/// Look up a built-in system by case-insensitive name.
pub fn find(name: &str) -> Result<System> {
    BENCHMARK
        .iter()
        .chain(LIGANDS.iter())
        .chain(std::iter::once(&AMANTADINE))
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .copied()
        .ok_or_else(|| Error::Invalid(format!("unknown built-in system `{name}`")))
}
