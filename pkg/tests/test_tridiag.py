import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qstchain import (
    ChainConfig,
    ConvergenceError,
    build_chain,
    decompose,
    residual_norm,
    to_single_excitation,
    uniform_chain_reference,
)


def _decompose_config(**kw):
    return decompose(to_single_excitation(ChainConfig(**kw).to_chain()))


def _random_hamiltonian(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 13))
    fields = rng.uniform(-2.0, 2.0, n)  # deliberately asymmetric
    ch = build_chain(n, float(rng.uniform(0.05, 1.5)), float(rng.uniform(0.5, 1.5)), fields)
    return to_single_excitation(ch)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_agrees_with_dense_reference(seed):
    h = _random_hamiltonian(seed)
    ed = decompose(h)
    ref_vals = np.linalg.eigvalsh(h.dense())
    scale = max(1.0, float(np.max(np.abs(ref_vals))))
    assert np.max(np.abs(ed.values - ref_vals)) < 1e-12 * scale


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_residual_and_orthonormality(seed):
    h = _random_hamiltonian(seed)
    ed = decompose(h)
    scale = max(1.0, h.frobenius_norm())
    assert residual_norm(h, ed) < 1e-12 * scale
    gram = ed.vectors.T @ ed.vectors
    assert np.max(np.abs(gram - np.eye(ed.n))) < 1e-12


def test_eigenvalues_ascending():
    ed = _decompose_config(n_sites=12, a=0.5, p=0.5, j_edge=0.01)
    assert np.all(np.diff(ed.values) >= 0)


def test_sign_convention_first_large_component_positive():
    ed = _decompose_config(n_sites=9, a=1.3, p=2.4, j_edge=0.3)
    for k in range(ed.n):
        v = ed.vectors[:, k]
        lead = v[np.abs(v) > 1e-12][0]
        assert lead > 0


@pytest.mark.parametrize("n", [2, 3, 5, 16, 31])
def test_uniform_chain_closed_form(n):
    # flat chain at J=1: matrix bonds are 2, lambda_k = 4 cos(k pi / (n+1)),
    # sine eigenvectors
    ed = decompose(to_single_excitation(ChainConfig(n_sites=n).to_chain()))
    ref = uniform_chain_reference(n, 2.0)
    assert np.max(np.abs(ed.values - ref.values)) < 1e-12
    assert np.max(np.abs(ed.vectors - ref.vectors)) < 1e-10


def test_parity_labels_alternate_on_flat_chain(flat8):
    # positive bonds put the fully alternating (odd) mode at the bottom and
    # the nodeless (even) mode at the top; labels alternate in between
    assert list(flat8.parity) == ["odd", "even"] * 4


def test_parity_none_without_mirror_symmetry():
    h = to_single_excitation(build_chain(5, 1.0, 1.0, np.array([0.1, 0.0, 0.0, 0.0, 0.3])))
    ed = decompose(h)
    assert list(ed.parity) == ["none"] * 5


def test_near_degenerate_doublets_keep_definite_parity():
    # steep profile: edge doublet split below machine precision of the norm
    ed = _decompose_config(n_sites=8, a=0.5, p=30.0)
    assert "none" not in ed.parity
    flip = ed.vectors[::-1, :]
    for k, label in enumerate(ed.parity):
        sign = 1.0 if label == "even" else -1.0
        assert np.max(np.abs(ed.vectors[:, k] - sign * flip[:, k])) < 1e-8


def test_degenerate_rotation_preserves_residual():
    cfg = ChainConfig(n_sites=10, a=1.0, p=25.0)
    h = to_single_excitation(cfg.to_chain())
    ed = decompose(h)
    assert residual_norm(h, ed) < 1e-11 * max(1.0, h.frobenius_norm())


def test_convergence_budget_is_enforced():
    h = to_single_excitation(ChainConfig(n_sites=12, a=0.7, p=1.3).to_chain())
    with pytest.raises(ConvergenceError):
        decompose(h, max_sweeps=1)


def test_vectors_are_read_only():
    ed = _decompose_config(n_sites=4)
    with pytest.raises(ValueError):
        ed.vectors[0, 0] = 7.0
    with pytest.raises(ValueError):
        ed.values[0] = -99.0
