import os
import subprocess
import sys

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from mufusion import kernels
from mufusion.kernels import NUMBA_KERNELS, NUMPY_KERNELS, csr_from_edges


@st.composite
def csr_graphs(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), unique=True, max_size=n * n))
    src = np.array([a for a, _ in pairs], dtype=np.int64)
    dst = np.array([b for _, b in pairs], dtype=np.int64)
    indptr, indices = csr_from_edges(n, src, dst)
    masks = st.lists(st.booleans(), min_size=n, max_size=n).map(lambda xs: np.array(xs, dtype=np.bool_))
    return n, pairs, indptr, indices, draw(masks), draw(masks), draw(masks), draw(masks)


@given(csr_graphs())
@settings(max_examples=300, deadline=None)
def test_modal_kernels_agree_with_definition(g):
    n, pairs, indptr, indices, mask, *_ = g
    want_dia = np.array([any(mask[b] for a, b in pairs if a == v) for v in range(n)])
    want_box = np.array([all(mask[b] for a, b in pairs if a == v) for v in range(n)])
    for k in (NUMPY_KERNELS, NUMBA_KERNELS):
        assert np.array_equal(k.diamond(indptr, indices, mask), want_dia)
        assert np.array_equal(k.box(indptr, indices, mask), want_box)


@given(csr_graphs(), st.integers(0, 1))
@settings(max_examples=300, deadline=None)
def test_attractor_kernels_agree(g, player):
    n, pairs, indptr, indices, _, owner_m, alive, target = g
    owner = owner_m.astype(np.int64)
    a1, s1 = NUMPY_KERNELS.attractor(indptr, indices, owner, alive, target, player)
    a2, s2 = NUMBA_KERNELS.attractor(indptr, indices, owner, alive, target, player)
    assert np.array_equal(a1, a2)
    assert np.array_equal(s1, s2)
    # strategy edges are real, stay in the attractor, and only sit on the
    # player's own added vertices
    for v in np.flatnonzero(s1 >= 0):
        assert (v, s1[v]) in set(pairs) and a1[s1[v]] and owner[v] == player and not target[v]


def test_csr_layout():
    indptr, indices = csr_from_edges(3, np.array([2, 0, 0]), np.array([1, 2, 1]))
    assert indptr.tolist() == [0, 2, 2, 3]
    assert indices.tolist() == [1, 2, 1]


def test_env_flag_selects_numpy_path():
    code = "from mufusion import kernels; print(kernels.ACTIVE.name)"
    env = dict(os.environ, MUFUSION_PURE_NUMPY="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"
    env["MUFUSION_PURE_NUMPY"] = "0"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == ("numba" if kernels.HAVE_NUMBA else "numpy")


def test_both_paths_give_identical_reports():
    outs = []
    for flag in ("1", "0"):
        env = dict(os.environ, MUFUSION_PURE_NUMPY=flag)
        r = subprocess.run(
            [sys.executable, "-m", "mufusion", "verify", "prop3", "--trials", "20", "--json"],
            env=env, capture_output=True, text=True,
        )
        assert r.returncode == 0, r.stderr
        outs.append(r.stdout)
    assert outs[0] == outs[1]
