"""Long-horizon runs; deselect with -m "not slow"."""
import math

import numpy as np
import pytest

from experiments import counterexample
from geometry.euclid import max_circular_gap
from spiral import sequence
from spiral.verifier import SequenceVerifier

pytestmark = pytest.mark.slow


def test_identities_hold_to_horizon(seq_100k):
    assert sequence.check_step_identity(seq_100k) <= 1e-10
    assert sequence.check_halfangle_identity(seq_100k, scaled=True) <= 1e-12
    assert sequence.check_telescoping(seq_100k) <= 1e-10
    assert not seq_100k.stopped_early


def test_verifier_passes(seq_100k):
    result = SequenceVerifier(nearest_horizon=2000).run(seq_100k)
    assert result.passed, [c.detail for c in result.failures()]


def test_limits_and_divergence(seq_10k, seq_100k):
    summary = sequence.check_limits(seq_100k)
    assert summary.eps_tail < sequence.check_limits(seq_10k).eps_tail
    assert summary.sphere_gap_tail == pytest.approx(math.exp(-seq_100k.records[-1].alpha), abs=1e-12)
    assert seq_100k.partial_eps_sum - seq_10k.partial_eps_sum > 1.0
    assert summary.eps_tail < 1e-3
    assert sequence.check_divergence_surrogate(seq_100k) > 0


def test_even_angles_fill_the_circle(seq_10k, seq_100k):
    gap_short = max_circular_gap(seq_10k.alphas()[0::2])
    gap_long = max_circular_gap(seq_100k.alphas()[0::2])
    assert gap_long < gap_short
    assert sequence.circular_gap(seq_100k) < sequence.circular_gap(seq_10k)


def test_long_corollary_hugs_the_circle(seq_100k):
    sets = counterexample.build(100_000, report=seq_100k)
    trace = counterexample.run_corollary(sets, 2000)
    radii = np.linalg.norm(np.asarray(trace.a), axis=1)
    expected = np.exp(-seq_100k.alphas()[0:4000:2])
    assert np.max(np.abs((radii - 1.0) - expected)) <= 1e-12
    assert trace.verdict.kind == "continuum_suspected"
