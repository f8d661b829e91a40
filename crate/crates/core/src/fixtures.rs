//! Bundled example inputs.

pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! fixture {
    ($name:literal) => {
        Fixture {
            name: $name,
            text: include_str!(concat!("../fixtures/", $name, ".json")),
        }
    };
}

/// Geometric models with published radii.
pub const TABLE: &[Fixture] = &[
    fixture!("fibonacci"),
    fixture!("dekking"),
    fixture!("kenyon_solomyak"),
    fixture!("domino"),
    fixture!("pisot_dual_cubic"),
    fixture!("afhi"),
    fixture!("chair3d"),
    fixture!("thue_morse3d"),
    fixture!("pisot_dual_quartic"),
];

/// Symbolic substitutions, suspended on load.
pub const SYMBOLIC: &[Fixture] = &[
    fixture!("period_doubling"),
    fixture!("fibonacci_symbolic"),
    fixture!("thue_morse"),
    fixture!("bbk"),
    fixture!("four_letter"),
];

pub fn all() -> impl Iterator<Item = &'static Fixture> {
    TABLE.iter().chain(SYMBOLIC)
}

pub fn get(name: &str) -> Option<&'static Fixture> {
    all().find(|f| f.name == name)
}
