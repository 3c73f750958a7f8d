//! The two lifetime datasets used to check the fitting code.

/// Nicotine content (mg) of 346 cigarette brands measured in 1998.
pub const NICOTINE: [f64; 346] = [
    1.3, 1.0, 1.2, 0.9, 1.1, 0.8, 0.5, 1.0, 0.7, 0.5, 1.7, 1.1, 0.8, 0.5,
    1.2, 0.8, 1.1, 0.9, 1.2, 0.9, 0.8, 0.6, 0.3, 0.8, 0.6, 0.4, 1.1, 1.1,
    0.2, 0.8, 0.5, 1.1, 0.1, 0.8, 1.7, 1.0, 0.8, 1.0, 0.8, 1.0, 0.2, 0.8,
    0.4, 1.0, 0.2, 0.8, 1.4, 0.8, 0.5, 1.1, 0.9, 1.3, 0.9, 0.4, 1.4, 0.9,
    0.5, 1.7, 0.9, 0.8, 0.8, 1.2, 0.9, 0.8, 0.5, 1.0, 0.6, 0.1, 0.2, 0.5,
    0.1, 0.1, 0.9, 0.6, 0.9, 0.6, 1.2, 1.5, 1.1, 1.4, 1.2, 1.7, 1.4, 1.0,
    0.7, 0.4, 0.9, 0.7, 0.8, 0.7, 0.4, 0.9, 0.6, 0.4, 1.2, 2.0, 0.7, 0.5,
    0.9, 0.5, 0.9, 0.7, 0.9, 0.7, 0.4, 1.0, 0.7, 0.9, 0.7, 0.5, 1.3, 0.9,
    0.8, 1.0, 0.7, 0.7, 0.6, 0.8, 1.1, 0.9, 0.9, 0.8, 0.8, 0.7, 0.7, 0.4,
    0.5, 0.4, 0.9, 0.9, 0.7, 1.0, 1.0, 0.7, 1.3, 1.0, 1.1, 1.1, 0.9, 1.1,
    0.8, 1.0, 0.7, 1.6, 0.8, 0.6, 0.8, 0.6, 1.2, 0.9, 0.6, 0.8, 1.0, 0.5,
    0.8, 1.0, 1.1, 0.8, 0.8, 0.5, 1.1, 0.8, 0.9, 1.1, 0.8, 1.2, 1.1, 1.2,
    1.1, 1.2, 0.2, 0.5, 0.7, 0.2, 0.5, 0.6, 0.1, 0.4, 0.6, 0.2, 0.5, 1.1,
    0.8, 0.6, 1.1, 0.9, 0.6, 0.3, 0.9, 0.8, 0.8, 0.6, 0.4, 1.2, 1.3, 1.0,
    0.6, 1.2, 0.9, 1.2, 0.9, 0.5, 0.8, 1.0, 0.7, 0.9, 1.0, 0.1, 0.2, 0.1,
    0.1, 1.1, 1.0, 1.1, 0.7, 1.1, 0.7, 1.8, 1.2, 0.9, 1.7, 1.2, 1.3, 1.2,
    0.9, 0.7, 0.7, 1.2, 1.0, 0.9, 1.6, 0.8, 0.8, 1.1, 1.1, 0.8, 0.6, 1.0,
    0.8, 1.1, 0.8, 0.5, 1.5, 1.1, 0.8, 0.6, 1.1, 0.8, 1.1, 0.8, 1.5, 1.1,
    0.8, 0.4, 1.0, 0.8, 1.4, 0.9, 0.9, 1.0, 0.9, 1.3, 0.8, 1.0, 0.5, 1.0,
    0.7, 0.5, 1.4, 1.2, 0.9, 1.1, 0.9, 1.1, 1.0, 0.9, 1.2, 0.9, 1.2, 0.9,
    0.5, 0.9, 0.7, 0.3, 1.0, 0.6, 1.0, 0.9, 1.0, 1.1, 0.8, 0.5, 1.1, 0.8,
    1.2, 0.8, 0.5, 1.5, 1.5, 1.0, 0.8, 1.0, 0.5, 1.7, 0.3, 0.6, 0.6, 0.4,
    0.5, 0.5, 0.7, 0.4, 0.5, 0.8, 0.5, 1.3, 0.9, 1.3, 0.9, 0.5, 1.2, 0.9,
    1.1, 0.9, 0.5, 0.7, 0.5, 1.1, 1.1, 0.5, 0.8, 0.6, 1.2, 0.8, 0.4, 1.3,
    0.8, 0.5, 1.2, 0.7, 0.5, 0.9, 1.3, 0.8, 1.2, 0.9,
];

/// Survival times (years) of patients given chemotherapy alone.
///
/// The source describes 46 patients but lists these 45 values.
pub const CHEMO: [f64; 45] = [
    0.047, 0.115, 0.121, 0.132, 0.164, 0.197, 0.203, 0.260, 0.282,
    0.296, 0.334, 0.395, 0.458, 0.466, 0.501, 0.507, 0.529, 0.534,
    0.540, 0.641, 0.644, 0.696, 0.841, 0.863, 1.099, 1.219, 1.271,
    1.326, 1.447, 1.485, 1.553, 1.581, 1.589, 2.178, 2.343, 2.416,
    2.444, 2.825, 2.830, 3.578, 3.658, 3.743, 3.978, 4.003, 4.033,
];

/// Bundled dataset by id (`nicotine` or `chemo`).
pub fn bundled(id: &str) -> Option<&'static [f64]> {
    match id {
        "nicotine" => Some(&NICOTINE),
        "chemo" => Some(&CHEMO),
        _ => None,
    }
}

pub const BUNDLED_IDS: [&str; 2] = ["nicotine", "chemo"];
