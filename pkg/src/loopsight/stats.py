"""Classification metrics, the two-sample Kolmogorov-Smirnov test, Student-t
intervals and cross-run summaries.

Everything here is plain Python on floats and ints; no numpy is needed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

EXACT_KS_LIMIT = 10_000


# -- confusion matrix and per-class report


@dataclass(frozen=True)
class ConfusionMatrix:
    """Binary counts; class 0 is Ambiguous (undefined) and class 1 Independent."""

    tn: int
    fp: int
    fn: int
    tp: int

    def __post_init__(self):
        for name in ("tn", "fp", "fn", "tp"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    @property
    def accuracy(self) -> float:
        return (self.tn + self.tp) / self.total if self.total else 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ConfusionMatrix":
        return cls(int(d["tn"]), int(d["fp"]), int(d["fn"]), int(d["tp"]))


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y_true, y_pred = [int(v) for v in y_true], [int(v) for v in y_pred]
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} true labels vs {len(y_pred)} predictions")
    if not y_true:
        raise ValueError("confusion matrix needs at least one sample")
    counts = {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 0}
    for t, p in zip(y_true, y_pred):
        if (t, p) not in counts:
            raise ValueError(f"labels must be 0 or 1, got ({t}, {p})")
        counts[t, p] += 1
    return ConfusionMatrix(counts[0, 0], counts[0, 1], counts[1, 0], counts[1, 1])


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassReport:
    per_class: tuple[ClassMetrics, ClassMetrics]
    accuracy: float
    macro: ClassMetrics
    weighted: ClassMetrics

    def to_dict(self) -> dict:
        return {
            "0": asdict(self.per_class[0]),
            "1": asdict(self.per_class[1]),
            "accuracy": self.accuracy,
            "macro": asdict(self.macro),
            "weighted": asdict(self.weighted),
        }

    def render(self) -> str:
        """Two-decimal table in the usual precision/recall/f1/support layout."""
        head = f"{'':>14}{'precision':>10}{'recall':>10}{'f1-score':>10}{'support':>10}"
        rows = [head]
        for label, m in ((0, self.per_class[0]), (1, self.per_class[1])):
            rows.append(f"{label:>14}{fmt2(m.precision):>10}{fmt2(m.recall):>10}{fmt2(m.f1):>10}{m.support:>10}")
        total = self.macro.support
        rows.append(f"{'accuracy':>14}{'':>10}{'':>10}{fmt2(self.accuracy):>10}{total:>10}")
        for name, m in (("macro avg", self.macro), ("weighted avg", self.weighted)):
            rows.append(f"{name:>14}{fmt2(m.precision):>10}{fmt2(m.recall):>10}{fmt2(m.f1):>10}{m.support:>10}")
        return "\n".join(rows) + "\n"


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def classification_report(cm: ConfusionMatrix) -> ClassReport:
    """Precision, recall and F1 per class plus macro and support-weighted averages.

    A metric whose denominator is zero is reported as 0.
    """
    if cm.total < 1:
        raise ValueError("classification report needs a non-empty confusion matrix")
    # (correct, predicted as c, actually c) for c = 0, 1
    cells = ((cm.tn, cm.tn + cm.fn, cm.tn + cm.fp), (cm.tp, cm.tp + cm.fp, cm.tp + cm.fn))
    per_class = []
    for correct, predicted, support in cells:
        p, r = _ratio(correct, predicted), _ratio(correct, support)
        per_class.append(ClassMetrics(p, r, _ratio(2 * p * r, p + r), support))
    total = cm.total
    macro = ClassMetrics(
        sum(m.precision for m in per_class) / 2,
        sum(m.recall for m in per_class) / 2,
        sum(m.f1 for m in per_class) / 2,
        total,
    )
    weighted = ClassMetrics(
        sum(m.precision * m.support for m in per_class) / total,
        sum(m.recall * m.support for m in per_class) / total,
        sum(m.f1 * m.support for m in per_class) / total,
        total,
    )
    return ClassReport((per_class[0], per_class[1]), cm.accuracy, macro, weighted)


def fmt2(value: float) -> str:
    return f"{value:.2f}"


# -- Kolmogorov-Smirnov


@dataclass(frozen=True)
class KSResult:
    statistic: float
    p_value: float
    method: str  # "exact" or "asymptotic"

    def significant(self, alpha: float = 0.05) -> bool:
        return self.p_value < alpha


def _ks_numerator(a: list[float], b: list[float]) -> int:
    """max |i*m - j*n| over the pooled sample, i.e. D * n * m as an exact integer."""
    a, b = sorted(a), sorted(b)
    n, m = len(a), len(b)
    i = j = best = 0
    while i < n or j < m:
        if j >= m or (i < n and a[i] < b[j]):
            x = a[i]
        else:
            x = b[j]
        while i < n and a[i] == x:
            i += 1
        while j < m and b[j] == x:
            j += 1
        best = max(best, abs(i * m - j * n))
    return best


def _exact_sf(numerator: int, n: int, m: int) -> float:
    """P(D >= numerator / (n m)) under the null, by counting monotone lattice paths.

    A path from (0, 0) to (n, m) stays inside the band when every visited
    point has |i*m - j*n| < numerator; the p-value is one minus the fraction
    of the C(n+m, n) equally likely paths that stay inside.
    """
    if numerator <= 0:
        return 1.0
    row = [0] * (m + 1)
    for i in range(n + 1):
        for j in range(m + 1):
            if abs(i * m - j * n) >= numerator:
                row[j] = 0
            elif i == 0 and j == 0:
                row[j] = 1
            else:
                row[j] = (row[j] if i > 0 else 0) + (row[j - 1] if j > 0 else 0)
    inside = Fraction(row[m], math.comb(n + m, n))
    return float(1 - inside)


def kolmogorov_sf(lam: float, terms: int = 100) -> float:
    """Q(lam) = 2 * sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lam^2), clipped to [0, 1]."""
    if lam <= 0:
        return 1.0
    total = 0.0
    for k in range(1, terms + 1):
        term = 2.0 * (-1) ** (k - 1) * math.exp(-2.0 * k * k * lam * lam)
        total += term
        if abs(term) < 1e-16:
            break
    return min(1.0, max(0.0, total))


def _asymptotic_sf(d: float, n: int, m: int) -> float:
    return kolmogorov_sf(math.sqrt(n * m / (n + m)) * d)


def ks_p_value(d: float, n: int, m: int, method: str | None = None) -> KSResult:
    """p-value for a given statistic; ``method`` None picks exact when n*m <= 10^4."""
    if n < 1 or m < 1:
        raise ValueError("both samples must be non-empty")
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"KS statistic must lie in [0, 1], got {d}")
    method = method or ("exact" if n * m <= EXACT_KS_LIMIT else "asymptotic")
    if method == "exact":
        p = _exact_sf(round(d * n * m), n, m)
    elif method == "asymptotic":
        p = _asymptotic_sf(d, n, m)
    else:
        raise ValueError(f"unknown KS method {method!r}")
    return KSResult(d, p, method)


def ks_two_sample(a, b, method: str | None = None) -> KSResult:
    """Two-sided two-sample KS test of ``a`` against ``b``."""
    a, b = [float(v) for v in a], [float(v) for v in b]
    if not a or not b:
        raise ValueError("both samples must be non-empty")
    n, m = len(a), len(b)
    numerator = _ks_numerator(a, b)
    d = numerator / (n * m)
    method = method or ("exact" if n * m <= EXACT_KS_LIMIT else "asymptotic")
    if method == "exact":
        return KSResult(d, _exact_sf(numerator, n, m), method)
    return ks_p_value(d, n, m, method)


# -- Student t


def _betacf(a: float, b: float, x: float, max_iter: int = 500, tol: float = 1e-15) -> float:
    """Continued fraction for the incomplete beta function (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c, d = 1.0, 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for k in range(1, max_iter + 1):
        k2 = 2 * k
        aa = k * (b - k) * x / ((qam + k2) * (a + k2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + k) * (qab + k) * x / ((a + k2) * (qap + k2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < tol:
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    tail = 0.5 * betainc_reg(df / 2.0, 0.5, df / (df + t * t))
    return 1.0 - tail if t >= 0 else tail


def t_quantile(q: float, df: float) -> float:
    """Inverse of :func:`t_cdf` by bracketing and bisection."""
    if not 0.0 < q < 1.0:
        raise ValueError("quantile level must lie in (0, 1)")
    if q == 0.5:
        return 0.0
    if q < 0.5:
        return -t_quantile(1.0 - q, df)
    hi = 1.0
    while t_cdf(hi, df) < q:
        hi *= 2.0
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if t_cdf(mid, df) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-13 * max(1.0, hi):
            break
    return 0.5 * (lo + hi)


def sample_mean_std(xs) -> tuple[float, float]:
    xs = [float(v) for v in xs]
    n = len(xs)
    mean = math.fsum(xs) / n
    var = math.fsum((v - mean) ** 2 for v in xs) / (n - 1) if n > 1 else 0.0
    return mean, math.sqrt(var)


def t_interval_from_moments(mean: float, std: float, n: int, level: float = 0.95) -> tuple[float, float]:
    if n < 2:
        raise ValueError("a t interval needs at least two observations")
    half = t_quantile((1.0 + level) / 2.0, n - 1) * std / math.sqrt(n)
    return mean - half, mean + half


def t_confidence_interval(xs, level: float = 0.95) -> tuple[float, float]:
    """mean +/- t_{(1+level)/2, n-1} * s / sqrt(n) with the n-1 sample std."""
    xs = list(xs)
    if len(xs) < 2:
        raise ValueError("a t interval needs at least two observations")
    mean, std = sample_mean_std(xs)
    if std == 0.0:
        return mean, mean
    return t_interval_from_moments(mean, std, len(xs), level)


# -- cross-run summaries


@dataclass(frozen=True)
class RunStatistics:
    n: int
    mean: float
    std: float
    median: float
    best: float
    worst: float
    ci95: tuple[float, float]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ci95"] = list(self.ci95)
        return d

    def render(self) -> dict:
        return {
            "n": str(self.n),
            "mean": fmt2(self.mean),
            "std": fmt2(self.std),
            "median": fmt2(self.median),
            "best": fmt2(self.best),
            "worst": fmt2(self.worst),
            "ci95": f"[{fmt2(self.ci95[0])}, {fmt2(self.ci95[1])}]",
        }


def median(xs) -> float:
    s = sorted(float(v) for v in xs)
    n = len(s)
    if n == 0:
        raise ValueError("median of an empty sample")
    mid = n // 2
    return s[mid] if n % 2 else (s[mid - 1] + s[mid]) / 2.0


def summarize_runs(values, higher_is_better: bool = True) -> RunStatistics:
    """Aggregate one metric over runs.

    Best is the maximum and worst the minimum, or the reverse for metrics
    such as loss where lower is better.
    """
    values = [float(v) for v in values]
    if len(values) < 2:
        raise ValueError("summarizing runs needs at least two values")
    mean, std = sample_mean_std(values)
    return RunStatistics(
        n=len(values),
        mean=mean,
        std=std,
        median=median(values),
        best=max(values) if higher_is_better else min(values),
        worst=min(values) if higher_is_better else max(values),
        ci95=t_confidence_interval(values),
    )
