//! Published result tables, transcribed verbatim for oracle tests.

/// Motivational comparison: chromosome, regular accuracy, GA-trained
/// accuracy, RX count, CNOT count.
pub const MOTIVATION: [([u32; 5], f64, f64, usize, usize); 2] = [
    ([4, 4, 4, 4, 2], 0.915, 0.780, 8, 8),
    ([3, 2, 2, 1, 2], 0.320, 0.870, 5, 3),
];

/// Final inference generation: chromosome, accuracy, RX count, CNOT count,
/// highlighted as a top candidate.
pub const FINAL_INFERENCE: [([u32; 5], f64, usize, usize, bool); 10] = [
    ([3, 2, 2, 1, 2], 0.870, 5, 3, true),
    ([4, 4, 1, 1, 2], 0.825, 5, 5, true),
    ([4, 4, 1, 2, 2], 0.830, 5, 6, true),
    ([3, 1, 2, 1, 2], 0.810, 5, 2, false),
    ([3, 2, 3, 1, 2], 0.815, 6, 3, false),
    ([4, 4, 2, 1, 2], 0.815, 6, 5, false),
    ([4, 4, 2, 2, 2], 0.815, 6, 6, false),
    ([4, 4, 3, 1, 2], 0.825, 7, 5, true),
    ([4, 4, 3, 2, 2], 0.815, 7, 6, false),
    ([3, 2, 4, 4, 2], 0.600, 7, 6, false),
];

/// Training-stage chromosomes and accuracies, indexed `[generation - 1][population index]`.
pub const TRAINING_GRID: [[([u32; 5], f64); 10]; 5] = [
    [
        ([1, 1, 4, 1, 1], 0.817),
        ([2, 4, 1, 4, 1], 0.685),
        ([3, 3, 1, 4, 1], 0.686),
        ([3, 1, 3, 4, 1], 0.82),
        ([3, 4, 3, 4, 1], 0.687),
        ([2, 4, 1, 4, 2], 0.879),
        ([4, 1, 3, 4, 1], 0.814),
        ([4, 2, 3, 2, 1], 0.817),
        ([3, 3, 2, 2, 2], 0.696),
        ([3, 2, 4, 1, 2], 0.817),
    ],
    [
        ([1, 1, 4, 1, 1], 0.82),
        ([1, 1, 1, 1, 2], 0.809),
        ([2, 4, 4, 4, 1], 0.688),
        ([1, 1, 1, 4, 2], 0.656),
        ([2, 4, 1, 4, 2], 0.884),
        ([3, 1, 3, 4, 1], 0.815),
        ([3, 2, 3, 4, 1], 0.823),
        ([3, 1, 4, 4, 1], 0.813),
        ([4, 2, 3, 2, 1], 0.823),
        ([4, 1, 3, 2, 1], 0.814),
    ],
    [
        ([1, 1, 4, 1, 1], 0.82),
        ([1, 2, 4, 2, 1], 0.822),
        ([2, 2, 1, 4, 1], 0.822),
        ([2, 3, 4, 1, 1], 0.684),
        ([2, 4, 1, 4, 2], 0.88),
        ([3, 2, 3, 4, 1], 0.822),
        ([3, 1, 3, 4, 1], 0.813),
        ([4, 2, 3, 2, 1], 0.825),
        ([4, 1, 3, 1, 1], 0.813),
        ([3, 4, 3, 4, 2], 0.863),
    ],
    [
        ([1, 2, 4, 2, 1], 0.822),
        ([1, 2, 4, 4, 1], 0.82),
        ([2, 2, 1, 4, 1], 0.819),
        ([2, 4, 1, 4, 2], 0.883),
        ([3, 2, 3, 4, 1], 0.826),
        ([3, 4, 3, 4, 1], 0.697),
        ([4, 2, 3, 2, 1], 0.825),
        ([1, 4, 4, 2, 2], 0.893),
        ([3, 4, 3, 4, 2], 0.873),
        ([4, 4, 3, 2, 2], 0.911),
    ],
    [
        ([2, 4, 1, 4, 2], 0.882),
        ([2, 4, 1, 2, 2], 0.885),
        ([2, 2, 1, 3, 2], 0.692),
        ([2, 3, 1, 2, 2], 0.703),
        ([1, 4, 4, 2, 2], 0.892),
        ([1, 4, 4, 4, 2], 0.883),
        ([3, 3, 2, 2, 2], 0.759),
        ([3, 4, 3, 4, 2], 0.914),
        ([4, 4, 3, 2, 2], 0.897),
        ([4, 4, 3, 1, 2], 0.835),
    ],
];

/// Inference-stage chromosomes and accuracies, indexed `[generation - 1][population index]`.
pub const INFERENCE_GRID: [[([u32; 5], f64); 10]; 5] = [
    [
        ([2, 4, 1, 4, 2], 0.12),
        ([2, 4, 1, 2, 2], 0.36),
        ([2, 2, 1, 3, 2], 0.475),
        ([2, 3, 1, 2, 2], 0.415),
        ([1, 4, 4, 2, 2], 0.53),
        ([1, 4, 4, 4, 2], 0.535),
        ([3, 3, 2, 2, 2], 0.535),
        ([3, 4, 3, 4, 2], 0.22),
        ([4, 4, 3, 2, 2], 0.815),
        ([4, 4, 3, 1, 2], 0.815),
    ],
    [
        ([1, 3, 1, 1, 2], 0.265),
        ([1, 4, 4, 4, 2], 0.555),
        ([3, 3, 2, 2, 2], 0.535),
        ([1, 3, 4, 4, 2], 0.54),
        ([3, 4, 2, 2, 2], 0.6),
        ([3, 1, 2, 1, 2], 0.815),
        ([3, 2, 2, 4, 2], 0.64),
        ([4, 4, 3, 2, 2], 0.815),
        ([4, 4, 3, 1, 2], 0.825),
        ([4, 3, 3, 1, 2], 0.22),
    ],
    [
        ([3, 1, 2, 1, 2], 0.805),
        ([3, 2, 2, 4, 2], 0.64),
        ([3, 2, 2, 1, 2], 0.865),
        ([3, 1, 2, 4, 2], 0.515),
        ([3, 1, 2, 3, 2], 0.59),
        ([4, 4, 1, 1, 2], 0.825),
        ([4, 4, 3, 1, 2], 0.825),
        ([4, 4, 3, 2, 2], 0.815),
        ([3, 1, 4, 1, 2], 0.51),
        ([3, 2, 4, 1, 2], 0.81),
    ],
    [
        ([2, 2, 1, 2, 2], 0.565),
        ([3, 4, 1, 1, 2], 0.655),
        ([3, 2, 2, 1, 2], 0.87),
        ([4, 4, 1, 1, 2], 0.825),
        ([4, 2, 2, 1, 2], 0.27),
        ([3, 3, 3, 2, 2], 0.455),
        ([4, 4, 3, 1, 2], 0.825),
        ([4, 4, 3, 2, 2], 0.815),
        ([4, 4, 3, 4, 2], 0.785),
        ([3, 1, 4, 4, 2], 0.545),
    ],
    [
        ([3, 2, 2, 1, 2], 0.87),
        ([4, 4, 1, 1, 2], 0.825),
        ([4, 4, 1, 2, 2], 0.83),
        ([3, 1, 2, 1, 2], 0.81),
        ([3, 2, 3, 1, 2], 0.815),
        ([4, 4, 2, 1, 2], 0.815),
        ([4, 4, 2, 2, 2], 0.815),
        ([4, 4, 3, 1, 2], 0.825),
        ([4, 4, 3, 2, 2], 0.815),
        ([3, 2, 4, 4, 2], 0.6),
    ],
];
