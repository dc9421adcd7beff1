#!/usr/bin/env python3
"""Print predicted thresholds and optimal weights for the bundled models.

Reproduces the headline numbers: normalized optimal weights per support
fraction, the per-strategy measurement thresholds d * m_tilde for the
two-block model, and the four-block versus merged comparison.
"""

import sys

from wbp import (
    Strategy,
    apply_strategy,
    make_model,
    minimize_threshold,
    optimal_weights,
)

STRATEGIES = ("unit", "zero_one", "one_minus_alpha", "optimal")


def main() -> int:
    print("normalized optimal weights, two blocks (10, 90):")
    for alpha in ((0.3, "7/90"), (0.5, "5/90"), (0.7, "3/90")):
        model = make_model(100, (10, 90), alpha)
        weights = optimal_weights(model).normalized
        print(f"  alpha1 = {alpha[0]}: ({weights[0]:.4f}, {weights[1]:.4f})")

    print("\nmeasurement thresholds d * m_tilde, alpha1 = 0.5:")
    model = make_model(100, (10, 90), (0.5, "5/90"))
    for kind in STRATEGIES:
        applied = apply_strategy(model, Strategy(kind))
        result = minimize_threshold(applied.effective_model, applied.weights)
        print(f"  {kind:18s} {result.measurements(model.d):7.3f}"
              f"   (tau* = {result.tau_star:.4f})")

    print("\nfour blocks (5, 10, 15, 70) with alpha = (4/5, 3/10, 2/15, 1/70):")
    model4 = make_model(100, (5, 10, 15, 70), ("4/5", "3/10", "2/15", "1/70"))
    weights4 = optimal_weights(model4).normalized
    print("  optimal weights:", "(" + ", ".join(f"{w:.4f}" for w in weights4) + ")")
    for strategy, label in ((Strategy("optimal"), "4-block optimal"),
                            (Strategy("optimal", merge=(0, 1, 2)), "merged optimal")):
        applied = apply_strategy(model4, strategy)
        result = minimize_threshold(applied.effective_model, applied.weights)
        print(f"  {label:18s} {result.measurements(model4.d):7.3f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
