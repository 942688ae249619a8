"""Bundled sample matrices and published reference results.

``DATASET_4_2`` is the precedence matrix of PrefLib instance ED-00004-00000002
as published, rounded to four decimals. ``FOOD`` is a toy instance: 60 voters
rank ``1,2|3,4`` and 40 voters rank ``3,4|1,2``.

The result tables hold the published figures for the PrefLib benchmark used by
``osbop reproduce-tables``. ``SMALL_RESULTS`` values carry four decimals;
``BENCHMARK_RESULTS`` values carry two.
"""

from __future__ import annotations

import numpy as np

DATASET_4_2 = np.array(
    [
        [0.5000, 0.7046, 0.4934],
        [0.2954, 0.5000, 0.3790],
        [0.5066, 0.6210, 0.5000],
    ]
)

FOOD = np.array(
    [
        [0.5, 0.5, 0.6, 0.6],
        [0.5, 0.5, 0.6, 0.6],
        [0.4, 0.4, 0.5, 0.5],
        [0.4, 0.4, 0.5, 0.5],
    ]
)

SAMPLES = {"4-2": DATASET_4_2, "food": FOOD}

# published utopia values of DATASET_4_2 for b = 1..4
UTOPIA_4_2 = {1: 0.6644, 2: 0.3460, 3: 0.1804, 4: 0.1120}

# id -> problem -> (fitness, solution sets); "osbop2" entries carry weights
SMALL_RESULTS: dict[str, dict[str, tuple[float, list]]] = {
    "2-1": {
        "obop": (1.4636, [["1,2,3|4"]]),
        "osbop2e": (0.9816, [["1|3|2,4", "2,3|1,4"]]),
        "osbop2": (0.4216, [[("1,2,3|4", 0.8328), ("3,4|1|2", 0.1672)]]),
    },
    "2-2": {
        "obop": (1.4303, [["2,3,4|1,5"]]),
        "osbop2e": (1.1754, [["3,4|2|5|1", "2|1,3,4|5"]]),
        "osbop2": (0.4586, [[("2,3,4|1,5", 0.8611), ("1|2,3,4,5", 0.1389)]]),
    },
    "4-1": {
        "obop": (0.5783, [["1,2|3"]]),
        "osbop2e": (0.4398, [["1|2,3", "2|1|3"]]),
        "osbop2": (0.1325, [[("1,2|3", 0.7188), ("1,2,3", 0.2812)]]),
        "osbop3e": (0.1606, [["1|2,3", "1,2|3", "2|1,3"], ["1|2|3", "1,2,3", "2|1|3"]]),
        "osbop4e": (
            0.1325,
            [
                ["1|2|3", "2|1|3", "1,2|3", "1,2,3"],
                ["1|2|3", "2|1|3", "2|1,3", "1|2,3"],
            ],
        ),
    },
    "4-2": {
        "obop": (0.6644, [["1,2,3"]]),
        "osbop2e": (0.3460, [["3|1,2", "1|2|3"]]),
        "osbop2": (0.1804, [[("1,2,3", 0.7460), ("1,3|2", 0.2540)]]),
        "osbop3e": (
            0.1804,
            [
                ["1,2,3", "1|2,3", "3|1,2"],
                ["1|2|3", "3|2|1", "1,3|2"],
                ["1|3|2", "2|3|1", "1,3|2"],
            ],
        ),
        "osbop4e": (
            0.1120,
            [
                ["1|2|3", "1|3|2", "3|1|2", "2,3|1"],
                ["1|2|3", "1|2,3", "3|1|2", "3|2|1"],
                ["1|2|3", "1,2,3", "1,3|2", "3|1,2"],
            ],
        ),
    },
}

BENCHMARK_COLUMNS = ("n", "u1", "u2", "obop", "osbop2e", "osbop2", "w1")

BENCHMARK_RESULTS: dict[str, tuple[int, float, float, float, float, float, float]] = {
    "2-1": (4, 1.46, 0.98, 1.46, 0.98, 0.42, 0.83),
    "2-2": (5, 1.43, 1.18, 1.43, 1.18, 0.46, 0.86),
    "4-1": (3, 0.58, 0.44, 0.58, 0.44, 0.13, 0.72),
    "4-2": (3, 0.66, 0.35, 0.66, 0.35, 0.18, 0.75),
    "6-3": (14, 5.00, 2.39, 5.67, 2.89, 2.89, 0.50),
    "6-4": (14, 2.33, 1.39, 2.67, 1.44, 1.44, 0.50),
    "6-11": (20, 12.67, 7.11, 14.22, 8.11, 6.67, 0.67),
    "6-12": (20, 5.67, 4.39, 5.67, 4.61, 4.19, 0.57),
    "6-18": (24, 7.33, 4.00, 7.67, 4.00, 3.28, 0.55),
    "6-28": (24, 24.22, 12.89, 30.33, 16.94, 15.44, 0.67),
    "6-48": (24, 10.67, 4.33, 12.11, 6.17, 5.56, 0.56),
    "14-1": (10, 11.69, 4.99, 13.09, 6.73, 5.25, 0.59),
    "15-48": (10, 9.33, 4.67, 13.00, 7.83, 4.67, 0.67),
    "15-74": (20, 26.33, 13.17, 40.00, 26.00, 14.67, 0.67),
}
