"""The bundled three-user benchmark, nominal and robust.

Loads the 3x6 channel shipped with the package, iterates sequential
best responses from the zero profile in both modes, and compares what
comes out against the reference tables that ship with the benchmark.

The nominal equilibrium reproduces neither reference exactly, and the
robust one keeps two shared sub-channels where the reference claims a
clean frequency split; neither reference profile is a fixed point of
the best-response map (check their residuals below). The bundled
channel data and the bundled tables simply disagree, so this demo
prints both sides and lets the numbers speak.

Run:  python3 demos/benchmark_tables.py
"""
import numpy as np

from riwfa import (
    RunConfig,
    Schedule,
    UncertaintySpec,
    fixed_point_residual,
    load_bundled_scenario,
    run,
)

# reference equilibria shipped alongside the benchmark channel data
REFERENCE_NOMINAL = np.array([
    [0.44, 0.10, 0.00, 0.45, 0.00, 0.00],
    [0.00, 0.50, 0.50, 0.00, 0.00, 0.00],
    [0.00, 0.0059, 0.3049, 0.00, 0.32, 0.37],
])
REFERENCE_ROBUST = np.array([
    [0.5, 0.0, 0.0, 0.5, 0.0, 0.0],
    [0.0, 0.5, 0.5, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.0, 0.5, 0.5],
])


def describe(label: str, report, reference: np.ndarray, scenario) -> None:
    print(f"--- {label} ---")
    print(f"converged in {report.iterations} iterations, "
          f"residual {report.residual:.2e}")
    with np.printoptions(precision=4, suppress=True):
        print("equilibrium profile:")
        print(report.profile)
    print(f"per-user utility: {np.round(report.per_user_utility, 4).tolist()}")
    print(f"orthogonality index: {report.orthogonality_index:.4f}")
    ref_res = fixed_point_residual(reference, scenario)
    print(f"reference profile residual under the same map: {ref_res:.4f} "
          "(0 would mean it is an equilibrium)")
    print()


def main() -> None:
    base = load_bundled_scenario()
    schedule = Schedule(kind="sequential")
    config = RunConfig(init="zero", tol=1e-8)

    nominal_sc = base.with_uncertainty(UncertaintySpec.nominal(3, 6))
    robust_sc = base.with_uncertainty(UncertaintySpec.uniform(3, 6, 3.0))

    describe("nominal best responses", run(nominal_sc, schedule, config),
             REFERENCE_NOMINAL, nominal_sc)
    describe("robust best responses, eps = 3", run(robust_sc, schedule, config),
             REFERENCE_ROBUST, robust_sc)

    print("what does hold: hedging against eps = 3 pushes the users toward")
    print("disjoint spectrum (index 0.71 vs 0.40 nominal) and raises every")
    print("user's utility at the true channel. The CLI preset")
    print("`riwfa reproduce table4` runs these same checks and exits 2 on")
    print("the disjointness claim.")


if __name__ == "__main__":
    main()
