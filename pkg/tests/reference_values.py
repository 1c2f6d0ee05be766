"""Published reference numbers the statistics layer must reproduce."""

# confusion matrix (tn, fp, fn, tp) -> rows of the two-decimal report:
# class 0, class 1, macro, weighted as (precision, recall, f1, support); then accuracy.
REPORTS = {
    "dnn_best": (
        (312, 11, 8, 269),
        {
            "0": ("0.97", "0.97", "0.97", 323),
            "1": ("0.96", "0.97", "0.97", 277),
            "macro": ("0.97", "0.97", "0.97", 600),
            "weighted": ("0.97", "0.97", "0.97", 600),
            "accuracy": "0.97",
            "accuracy_pct": "96.83",
        },
    ),
    "dnn_worst": (
        (79, 244, 0, 277),
        {
            "0": ("1.00", "0.24", "0.39", 323),
            "1": ("0.53", "1.00", "0.69", 277),
            "macro": ("0.77", "0.62", "0.54", 600),
            "weighted": ("0.78", "0.59", "0.53", 600),
            "accuracy": "0.59",
            "accuracy_pct": "59.33",
        },
    ),
    "cnn_worst": (
        (322, 1, 264, 13),
        {
            "0": ("0.55", "1.00", "0.71", 323),
            "1": ("0.93", "0.05", "0.09", 277),
            "macro": ("0.74", "0.52", "0.40", 600),
            "weighted": ("0.72", "0.56", "0.42", 600),
            "accuracy": "0.56",
            "accuracy_pct": "55.83",
        },
    ),
    "cnn_best": (
        (323, 0, 14, 263),
        {
            "0": ("0.96", "1.00", "0.98", 323),
            "1": ("1.00", "0.95", "0.97", 277),
            "macro": ("0.98", "0.97", "0.98", 600),
            "weighted": ("0.98", "0.98", "0.98", 600),
            "accuracy": "0.98",
            "accuracy_pct": "97.67",
        },
    ),
}

# (mean, std, n) -> interval, each bound +/- 0.01
T_INTERVALS = [
    ((91.37, 7.41, 30), (88.59, 94.14)),
    ((92.70, 7.53, 30), (89.89, 95.51)),
]

KS_ACCURACY = (1 / 3, 30, 30, (0.069, 0.073))
KS_LOSS = (0.70, 30, 30, 1e-4)


def rendered_rows(report):
    """The same layout as REPORTS values, built from a ClassReport."""
    def row(m):
        return (f"{m.precision:.2f}", f"{m.recall:.2f}", f"{m.f1:.2f}", m.support)

    return {
        "0": row(report.per_class[0]),
        "1": row(report.per_class[1]),
        "macro": row(report.macro),
        "weighted": row(report.weighted),
        "accuracy": f"{report.accuracy:.2f}",
        "accuracy_pct": f"{100 * report.accuracy:.2f}",
    }
