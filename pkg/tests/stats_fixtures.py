"""Frozen oracle expectations shared by the stats and acceptance suites.

Every number here was computed by tests/oracles.py (brute-force Welch +
Simpson integration of the t density, and loop-based two-way ANOVA sums of
squares) and committed verbatim.
"""

# (group1, group2, t, df, p) with direction "greater" (is group2 higher?)
T_TEST_FIXTURES = [
    ([4.0, 5.0, 4.5, 5.5, 4.0, 5.0],
     [5.5, 6.0, 5.0, 6.5, 6.0, 5.5],
     3.312706744344565, 9.8, 0.004029060196153289),
    ([3.5, 4.0, 4.5, 3.0, 5.0],
     [4.0, 4.5, 5.5, 5.0, 6.0, 5.5, 4.5],
     2.256304299271065, 8.111731843575418, 0.026795372948157203),
    ([2.0, 3.0, 2.5, 3.5],
     [2.5, 3.0, 2.0, 3.5],
     0.0, 6.0, 0.5),
    ([6.0, 5.5, 6.5, 6.0, 5.0],
     [5.0, 4.5, 5.5, 4.0, 5.0],
     -2.773500981126146, 8.0, 0.987917134690877),
    ([1.0, 2.0, 1.5, 2.5, 2.0, 1.0, 1.5],
     [6.0, 6.5, 7.0, 6.0, 6.5],
     16.90188390951892, 9.927654032480323, 6.0498413501086645e-09),
    ([4.0, 4.0, 4.5, 4.5, 5.0, 5.0, 3.5, 3.5],
     [4.5, 5.0, 4.0, 5.5, 5.0, 4.5],
     1.6622749155109215, 11.613718618946402, 0.06159352582644412),
]

# (judges x schemes matrix, pearson, icc2k)
ICC_FIXTURES = [
    ([[1, 4, 4, 4, 7, 3, 5, 7, 2, 4], [3, 2, 4, 5, 4, 7, 1, 3, 4, 3]],
     -0.19764924733942263, -0.539759036144579),
    ([[7, 7, 5, 5, 3, 1, 2, 6], [6, 5, 3, 2, 5, 3, 5, 6]],
     0.3555582895782898, 0.5261121856866539),
    ([[5, 1, 6, 6, 3, 3, 1, 4, 5, 5, 7, 2],
      [4, 1, 5, 7, 4, 3, 3, 2, 1, 3, 2, 2],
      [6, 7, 5, 3, 4, 1, 4, 6, 3, 2, 6, 3]],
     0.07172620027457943, 0.1967821782178215),
    ([[2, 4, 6, 3, 5, 7, 1, 4], [3, 4, 5, 3, 6, 6, 2, 5]],
     0.9120291854009068, 0.9353846153846154),
    ([[5, 6, 4, 7, 5, 6], [4, 6, 5, 6, 5, 7]],
     0.6363636363636362, 0.8076923076923076),
]

SCORES_CSV = """judge,scheme,strategy,novelty,completeness,feasibility
J1,S1,1,4,3,4
J2,S1,1,5,4,4
J1,S2,1,3,4,3
J2,S2,1,4,4,4
J1,S3,1,5,5,4
J2,S3,1,4,4,5
J1,S4,1,2,3,3
J2,S4,1,3,3,2
J1,S5,2,5,5,6
J2,S5,2,6,5,5
J1,S6,2,4,6,5
J2,S6,2,5,5,6
J1,S7,2,6,6,6
J2,S7,2,5,6,7
J1,S8,2,5,4,5
J2,S8,2,6,5,6
"""
