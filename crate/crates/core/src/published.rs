//! Printed reference values for the shipped barrier study, used to reconcile
//! reproduction runs.
//!
//! Values are transcribed at their printed four-decimal precision. The
//! interval-sum table stops after E2, so it has six rows.

/// The study bundle shipped with the crate (aggregate mode).
pub const STUDY_BUNDLE: &str = include_str!("../fixtures/barrier_study.json");

/// First respondent's raw judgments, as a CSV file.
pub const FIRST_EXPERT_CSV: &str = include_str!("../fixtures/first_expert.csv");

pub const IDS: [&str; 7] = ["I1", "I2", "I3", "I4", "E1", "E2", "E3"];

type Grid = [[f64; 7]; 7];

/// Lower bounds of the normalized rough group matrix.
pub const NORMALIZED_LOWER: Grid = [
    [0.0000, 0.0643, 0.0612, 0.0475, 0.0596, 0.0528, 0.0428],
    [0.0638, 0.0000, 0.0503, 0.0472, 0.0445, 0.0536, 0.0546],
    [0.0633, 0.0600, 0.0000, 0.0584, 0.0340, 0.0638, 0.0471],
    [0.0638, 0.0549, 0.0604, 0.0000, 0.0259, 0.0526, 0.0502],
    [0.0533, 0.0615, 0.0474, 0.0386, 0.0000, 0.0446, 0.0637],
    [0.0584, 0.0510, 0.0602, 0.0403, 0.0308, 0.0000, 0.0357],
    [0.0598, 0.0598, 0.0510, 0.0488, 0.0637, 0.0478, 0.0000],
];

/// Upper bounds of the normalized rough group matrix.
pub const NORMALIZED_UPPER: Grid = [
    [0.0000, 0.1153, 0.1135, 0.1087, 0.1178, 0.1149, 0.1015],
    [0.1250, 0.0000, 0.1059, 0.1016, 0.1020, 0.1127, 0.1200],
    [0.1101, 0.1146, 0.0000, 0.1121, 0.0864, 0.1089, 0.1082],
    [0.1250, 0.1099, 0.1193, 0.0000, 0.0814, 0.0981, 0.1008],
    [0.1161, 0.1141, 0.1029, 0.1052, 0.0000, 0.0757, 0.1249],
    [0.1136, 0.1122, 0.1171, 0.1051, 0.0959, 0.0000, 0.0987],
    [0.1143, 0.1150, 0.1086, 0.1061, 0.1118, 0.1051, 0.0000],
];

/// Lower bounds of the rough total-relation matrix.
pub const TOTAL_LOWER: Grid = [
    [0.0272, 0.0870, 0.0826, 0.0667, 0.0759, 0.0741, 0.0634],
    [0.0861, 0.0254, 0.0719, 0.0656, 0.0618, 0.0738, 0.0730],
    [0.0867, 0.0828, 0.0250, 0.0766, 0.0525, 0.0840, 0.0667],
    [0.0858, 0.0769, 0.0807, 0.0204, 0.0443, 0.0727, 0.0683],
    [0.0763, 0.0830, 0.0687, 0.0575, 0.0192, 0.0653, 0.0812],
    [0.0784, 0.0709, 0.0781, 0.0572, 0.0468, 0.0206, 0.0532],
    [0.0838, 0.0832, 0.0735, 0.0680, 0.0802, 0.0696, 0.0226],
];

/// Interval sums labelled `x` (lower, upper). They equal the column sums
/// of the total-relation matrix.
pub const SUMS_X: [[f64; 2]; 6] = [
    [0.5243, 2.0035],
    [0.5092, 1.9446],
    [0.4806, 1.9093],
    [0.4120, 1.8356],
    [0.3808, 1.7241],
    [0.4599, 1.7803],
];

/// Interval sums labelled `y` (lower, upper). They equal the row sums.
pub const SUMS_Y: [[f64; 2]; 6] = [
    [0.4769, 1.9200],
    [0.4576, 1.9100],
    [0.4743, 1.8397],
    [0.4490, 1.8255],
    [0.4512, 1.8374],
    [0.4052, 1.8452],
];

/// Final crisp values `X`, `Y` with prominence `X+Y` and relation `X-Y`.
pub const CRISP_X: [f64; 7] = [3.6135, 3.4416, 3.3429, 3.1392, 2.8362, 2.9834, 3.2453];
pub const CRISP_Y: [f64; 7] = [3.4314, 3.4031, 3.1950, 3.1560, 3.1900, 3.2142, 3.3505];
pub const PROMINENCE: [f64; 7] = [7.0448, 6.8447, 6.5379, 6.2952, 6.0262, 6.1976, 6.5958];
pub const RELATION: [f64; 7] = [0.1821, 0.0385, 0.1479, -0.0169, -0.3539, -0.2308, -0.1052];

/// Importance, normalized weight and rank.
pub const IMPORTANCE: [f64; 7] = [
    7.047184, 6.844819, 6.539578, 6.295243, 6.036575, 6.201863, 6.596673,
];
pub const WEIGHT: [f64; 7] = [0.1547, 0.1502, 0.1435, 0.1382, 0.1325, 0.1361, 0.1448];
pub const RANK: [usize; 7] = [1, 2, 4, 5, 7, 6, 3];

pub fn ids() -> Vec<String> {
    IDS.iter().map(|s| s.to_string()).collect()
}
