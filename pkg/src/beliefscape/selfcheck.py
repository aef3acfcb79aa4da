"""Built-in checks: the worked examples plus randomized round trips.

Exposed through the ``selftest`` CLI command; returns one line per check so
an installation can be vetted without the development test suite.
"""

from __future__ import annotations

import numpy as np

from . import fixtures
from .core import DEFAULT_TOLERANCES, validate_landscape
from .forward import generate_landscape, sample_environment, signal_marginal
from .identify import (
    consistency_check,
    identify,
    identify_underdetermined,
    signal_priors_identify,
)


def _close(a, b, tol=1e-8) -> bool:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return a.shape == b.shape and float(np.max(np.abs(a - b))) <= tol


def run_selftest(seed: int = 0, trials: int = 50) -> list[tuple[str, bool, str]]:
    tol = DEFAULT_TOLERANCES
    results: list[tuple[str, bool, str]] = []

    def check(name: str, ok: bool, detail: str = "") -> None:
        results.append((name, bool(ok), detail))

    land = fixtures.truth_or_noise_landscape(0.3)
    report = validate_landscape(land.B, land.Q, tol)
    check("truth-or-noise landscape plausible", report.plausible)
    result = identify(land)
    env = fixtures.truth_or_noise_environment(0.3)
    check(
        "truth-or-noise identification",
        _close(result.structure.entries, env.structure.entries)
        and result.prior.kind == "unique"
        and _close(result.prior.unique_prior.entries, env.prior.entries),
    )

    check(
        "symmetric binary a=b=5/8 consistent",
        consistency_check(fixtures.symmetric_binary_landscape(5 / 8, 5 / 8)).consistent,
    )
    check(
        "symmetric binary a=b=9/16 inconsistent",
        not consistency_check(fixtures.symmetric_binary_landscape(9 / 16, 9 / 16)).consistent,
    )

    under = identify_underdetermined(fixtures.two_signal_three_state_landscape())
    check(
        "two-signal/three-state minimum-norm route",
        _close(under.ridge_limit, fixtures.TWO_SIGNAL_THREE_STATE_RIDGE_LIMIT)
        and under.prior.kind == "unique"
        and _close(under.prior.unique_prior.entries, fixtures.TWO_SIGNAL_THREE_STATE_PRIOR)
        and under.restored.structure is not None
        and _close(under.restored.structure, fixtures.TWO_SIGNAL_THREE_STATE_STRUCTURE),
    )

    rng = np.random.default_rng(seed)
    worst = 0.0
    ok = True
    for _ in range(trials):
        n_states = int(rng.integers(2, 6))
        n_signals = int(rng.integers(n_states, 9))
        env = sample_environment(rng, n_states, n_signals)
        res = identify(generate_landscape(env))
        err = max(
            float(np.max(np.abs(res.structure.entries - env.structure.entries))),
            float(np.max(np.abs(res.prior.unique_prior.entries - env.prior.entries))),
        )
        worst = max(worst, err)
        ok = ok and err <= 1e-8 and res.prior.kind == "unique"
    check("random regression round trips", ok, f"worst error {worst:.3g} over {trials} trials")

    worst = 0.0
    ok = True
    for _ in range(trials):
        n_states = int(rng.integers(3, 7))
        env = sample_environment(rng, n_states, n_states - 1)
        land = generate_landscape(env)
        und = identify_underdetermined(land)
        err = max(
            und.residual,
            float(np.max(np.abs(und.prior.unique_prior.entries - env.prior.entries))),
        )
        worst = max(worst, err)
        ok = ok and err <= 1e-8
    check("random minimum-norm round trips", ok, f"worst error {worst:.3g} over {trials} trials")

    worst = 0.0
    ok = True
    for _ in range(trials):
        n_states = int(rng.integers(2, 6))
        n_signals = int(rng.integers(n_states, 9))
        env = sample_environment(rng, n_states, n_signals)
        land = generate_landscape(env)
        sp = signal_priors_identify(land)
        reg = identify(land)
        err = max(
            float(np.max(np.abs(sp.structure.entries - reg.structure.entries))),
            float(np.max(np.abs(sp.prior.unique_prior.entries - reg.prior.unique_prior.entries))),
            float(np.max(np.abs(sp.marginal.entries - signal_marginal(env).entries))),
        )
        worst = max(worst, err)
        ok = ok and err <= 1e-8
    check(
        "signal-priors route agrees with regression",
        ok,
        f"worst gap {worst:.3g} over {trials} trials",
    )

    return results
