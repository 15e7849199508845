//! Bundled scenarios and the published flip probabilities they are compared with.

/// A bundled scenario file.
#[derive(Clone, Copy, Debug)]
pub struct Bundled {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(Bundled { name: $name, text: include_str!(concat!("../scenarios/", $name, ".cfg")) }),*]
    };
}

pub const BUNDLED: &[Bundled] = bundled![
    "toffoli2_static",
    "toffoli2_td",
    "toffoli2_by759",
    "toffoli2_by7598",
    "toffoli2_long_static",
    "toffoli2_long_td",
    "toffoli3",
    "toffoli4",
    "toffoli5",
    "select3_zz_mm",
    "select3_zz",
    "select3_zz_pm",
    "select3_zz_pp",
];

pub fn bundled(name: &str) -> Option<&'static Bundled> {
    BUNDLED.iter().find(|b| b.name == name)
}

/// Published flip probabilities for one bundled scenario.
#[derive(Clone, Copy, Debug)]
pub struct ReferenceTable {
    pub scenario: &'static str,
    pub title: &'static str,
    /// `(control pattern, P_flip)`; patterns absent here are not compared.
    pub values: &'static [(&'static str, f64)],
    /// Allowed deviation for the selected branch.
    pub tol_on: f64,
    /// Allowed deviation for every other listed branch.
    pub tol_off: f64,
}

impl ReferenceTable {
    pub fn value(&self, pattern: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(p, _)| *p == pattern)
            .map(|(_, v)| *v)
    }
}

pub const TABLES: &[ReferenceTable] = &[
    ReferenceTable {
        scenario: "toffoli2_by759",
        title: "2-control i-Toffoli, by/2π = 759.8 Hz",
        values: &[
            ("--", 0.9986),
            ("-+", 0.0373),
            ("+-", 0.0373),
            ("++", 0.0116),
        ],
        tol_on: 0.005,
        tol_off: 0.005,
    },
    ReferenceTable {
        scenario: "toffoli2_by7598",
        title: "2-control i-Toffoli, by/2π = 7598 Hz",
        values: &[
            ("--", 0.9992),
            ("-+", 0.3640),
            ("+-", 0.3640),
            ("++", 0.5952),
        ],
        tol_on: 0.01,
        tol_off: 0.01,
    },
    ReferenceTable {
        scenario: "toffoli3",
        title: "3-control i-Toffoli",
        values: &[
            ("---", 0.99582),
            ("--+", 0.00029),
            ("-+-", 0.00029),
            ("-++", 0.00004),
            ("+--", 0.00029),
            ("+-+", 0.00004),
            ("++-", 0.00004),
            ("+++", 0.00003),
        ],
        tol_on: 0.005,
        tol_off: 0.005,
    },
    ReferenceTable {
        scenario: "toffoli4",
        title: "4-control i-Toffoli",
        values: &[
            ("----", 0.99851),
            ("---+", 0.00006),
            ("--+-", 0.00006),
            ("--++", 0.00004),
            ("-+--", 0.00005),
            ("-+-+", 0.00004),
            ("-++-", 0.00004),
            ("-+++", 0.00005),
            ("+---", 0.00005),
            ("+--+", 0.00004),
            ("+-+-", 0.00004),
            ("+-++", 0.00005),
            ("++--", 0.00004),
            ("++-+", 0.00003),
            ("+++-", 0.00003),
            ("++++", 0.00009),
        ],
        tol_on: 0.005,
        tol_off: 0.005,
    },
    ReferenceTable {
        scenario: "toffoli5",
        title: "5-control i-Toffoli",
        values: &[
            ("-----", 0.99223),
            ("----+", 0.00027),
            ("---+-", 0.00025),
            ("---++", 0.00013),
            ("--+--", 0.00025),
            ("--+-+", 0.00013),
            ("--++-", 0.00015),
            ("--+++", 0.00979),
            ("-+---", 0.00025),
            ("-+--+", 0.00019),
            ("-+-+-", 0.00019),
            ("-+-++", 0.00898),
            ("-++--", 0.00019),
            ("-++-+", 0.00898),
            ("-+++-", 0.00898),
            ("-++++", 0.00002),
            ("+----", 0.00025),
            ("+---+", 0.00019),
            ("+--+-", 0.00019),
            ("+--++", 0.00898),
            ("+-+--", 0.00019),
            ("+-+-+", 0.00898),
            ("+-++-", 0.00898),
            ("+-+++", 0.00002),
            ("++---", 0.00010),
            ("++--+", 0.01366),
            ("++-+-", 0.01030),
            ("++-++", 0.00001),
            ("+++--", 0.01030),
            ("+++-+", 0.00001),
            ("++++-", 0.00002),
            ("+++++", 0.00001),
        ],
        tol_on: 0.005,
        tol_off: 0.01,
    },
    ReferenceTable {
        scenario: "select3_zz_mm",
        title: "2-control i-select, bx ≈ 4J",
        values: &[
            ("--", 0.9995),
            ("-+", 0.0007),
            ("+-", 0.0003),
            ("++", 0.0006),
        ],
        tol_on: 0.005,
        tol_off: 0.005,
    },
    ReferenceTable {
        scenario: "select3_zz",
        title: "2-control i-select, bx ≈ 12J",
        values: &[
            ("--", 0.0005),
            ("-+", 0.9997),
            ("+-", 0.0001),
            ("++", 0.0004),
        ],
        tol_on: 0.005,
        tol_off: 0.005,
    },
    ReferenceTable {
        scenario: "select3_zz_pm",
        title: "2-control i-select, bx ≈ −12J",
        values: &[
            ("--", 0.0004),
            ("-+", 0.0002),
            ("+-", 0.9945),
            ("++", 0.0007),
        ],
        tol_on: 0.005,
        tol_off: 0.005,
    },
    ReferenceTable {
        scenario: "select3_zz_pp",
        title: "2-control i-select, bx ≈ −4J",
        values: &[
            ("--", 0.0002),
            ("-+", 0.0004),
            ("+-", 0.0006),
            ("++", 0.9972),
        ],
        tol_on: 0.005,
        tol_off: 0.005,
    },
    ReferenceTable {
        scenario: "toffoli2_long_td",
        title: "2-control i-Toffoli at by·t = 21π/2, oscillating couplings",
        values: &[("--", 0.8298)],
        tol_on: 0.02,
        tol_off: 0.0,
    },
    ReferenceTable {
        scenario: "toffoli2_long_static",
        title: "2-control i-Toffoli at by·t = 21π/2, averaged couplings",
        values: &[("--", 0.9591)],
        tol_on: 0.01,
        tol_off: 0.0,
    },
];

pub fn table(scenario: &str) -> Option<&'static ReferenceTable> {
    TABLES.iter().find(|t| t.scenario == scenario)
}

/// Published `J_rms/2π` (Hz) for the center-of-mass detunings, as
/// `(n_ions, detuning ratio, J_rms)`.
pub const J_RMS_HZ: &[(usize, f64, f64)] = &[
    (3, 1.0095, 926.019),
    (4, 1.00713, 926.307),
    (5, 1.00571, 925.924),
    (6, 1.00476, 925.876),
];
