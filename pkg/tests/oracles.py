"""Independent brute-force oracles for the statistics module.

Deliberately built from primitives only (math + explicit loops + Simpson
integration of the Student t density), sharing no code path with
studiomeet.stats, so the two routes check each other. Fixture expectations in
the test files were computed with these functions and frozen.
"""

from __future__ import annotations

import math


def t_density(x: float, df: float) -> float:
    log_c = (
        math.lgamma((df + 1.0) / 2.0)
        - math.lgamma(df / 2.0)
        - 0.5 * math.log(df * math.pi)
    )
    return math.exp(log_c - ((df + 1.0) / 2.0) * math.log1p(x * x / df))


def _simpson(f, a: float, b: float, n: int = 20000) -> float:
    if n % 2:
        n += 1
    h = (b - a) / n
    total = f(a) + f(b)
    for i in range(1, n):
        total += f(a + i * h) * (4 if i % 2 else 2)
    return total * h / 3.0


def t_sf(t: float, df: float) -> float:
    """Upper-tail probability of Student's t via numerical integration.

    Integrates the density from 0 to |t| and uses symmetry; the tail beyond
    is 0.5 - integral.
    """
    if t == 0.0:
        return 0.5
    body = _simpson(lambda x: t_density(x, df), 0.0, abs(t))
    upper = 0.5 - body
    upper = min(max(upper, 0.0), 1.0)
    return upper if t > 0 else 1.0 - upper


def _mean(values) -> float:
    return sum(values) / len(values)


def _sample_var(values) -> float:
    m = _mean(values)
    return sum((v - m) ** 2 for v in values) / (len(values) - 1)


def welch_oracle(group1, group2, direction: str = "greater"):
    """Welch's unequal-variance t with Welch-Satterthwaite df, one-tailed p."""
    n1, n2 = len(group1), len(group2)
    m1, m2 = _mean(group1), _mean(group2)
    v1, v2 = _sample_var(group1), _sample_var(group2)
    if v1 == 0.0 and v2 == 0.0:
        v1 = v2 = 1e-12
    q1, q2 = v1 / n1, v2 / n2
    t = (m2 - m1) / math.sqrt(q1 + q2)
    df = (q1 + q2) ** 2 / (q1**2 / (n1 - 1) + q2**2 / (n2 - 1))
    p = t_sf(t, df)
    if direction == "less":
        p = 1.0 - p
    return t, df, p


def pearson_oracle(xs, ys) -> float:
    n = len(xs)
    mx, my = _mean(xs), _mean(ys)
    cov = sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / (n - 1)
    sx = math.sqrt(sum((x - mx) ** 2 for x in xs) / (n - 1))
    sy = math.sqrt(sum((y - my) ** 2 for y in ys) / (n - 1))
    return cov / (sx * sy)


def icc2k_parts(matrix):
    """Two-way ANOVA mean squares (MSR, MSC, MSE) from explicit loops.

    ``matrix`` is judges x schemes (each row one judge); internally treats
    schemes as the random targets (n) and judges as raters (k).
    """
    k = len(matrix)          # raters
    n = len(matrix[0])       # targets
    grand = _mean([v for row in matrix for v in row])
    target_means = [_mean([matrix[j][i] for j in range(k)]) for i in range(n)]
    judge_means = [_mean(row) for row in matrix]

    ss_total = sum((matrix[j][i] - grand) ** 2 for j in range(k) for i in range(n))
    ss_rows = k * sum((tm - grand) ** 2 for tm in target_means)       # between targets
    ss_cols = n * sum((jm - grand) ** 2 for jm in judge_means)        # between judges
    ss_error = ss_total - ss_rows - ss_cols

    ms_rows = ss_rows / (n - 1)
    ms_cols = ss_cols / (k - 1)
    ms_error = ss_error / ((n - 1) * (k - 1))
    return ms_rows, ms_cols, ms_error


def icc2k_oracle(matrix) -> float:
    """ICC(2,k) from the explicit sums-of-squares decomposition."""
    ms_rows, ms_cols, ms_error = icc2k_parts(matrix)
    n = len(matrix[0])
    return (ms_rows - ms_error) / (ms_rows + (ms_cols - ms_error) / n)
