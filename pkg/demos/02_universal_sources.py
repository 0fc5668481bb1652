"""Universal sources from mixtures, and the four senses of domination.

A mixture over a model dominates every member's tensor powers up to a
2^(-n*eps) factor once n is large enough; the guaranteed onset is
ceil(-log2(w_min) / eps) when the member carries mixture weight w_min.
"""

from qmdl import (
    MixtureSource,
    computational_basis,
    convex_combine,
    example_state,
    universality_check,
)

thetas = (0.2, 0.5, 0.8)
weights = (0.5, 0.25, 0.25)
model = [example_state(t, c=1.0) for t in thetas]
src = MixtureSource(list(zip(weights, model)))

eps = 0.5
print(f"3-component mixture, weights {weights}, eps = {eps}")
print(f"weight bound predicts onset <= ceil(-log2({min(weights)}) / {eps}) = 4")
print()

for mode, system in [
    ("matrix", None),
    ("expected", None),
    ("q-restricted", computational_basis(2)),
    ("q-expected", computational_basis(2)),
]:
    report = universality_check(src, model, eps, range(1, 9), mode, system)
    margins = ", ".join(f"n={n}: {m:+.3f}" for n, m in report.per_level)
    print(f"{mode:12s} n0 = {report.n0}   margins: {margins}")

print()
print("== Convexity: mixing two universal sources stays universal ==")
other = MixtureSource([(0.5, model[0]), (0.25, model[1]), (0.25, model[2])])
combo = convex_combine([src, other], [0.5, 0.5])
report = universality_check(combo, model, eps, range(4, 9), "matrix")
print("50/50 combination passes:", report.passed, " onset:", report.n0)
