"""Backend parity: the compiled extension and the pure NumPy/Python kernels
must agree bit-for-bit on every function."""

import os
import subprocess
import sys

import numpy as np
import pytest

from thresholdwindow import _kernels_py as kpy
from thresholdwindow import kernels
from thresholdwindow import rng as trng
from thresholdwindow.families import edge_index_table

compiled = pytest.importorskip("thresholdwindow._ckernels",
                               reason="compiled extension not built")


@pytest.fixture(scope="module")
def gen():
    return trng.generator(123456)


class TestParity:
    def test_percolation_flip_time(self, gen):
        for _ in range(25):
            n = int(gen.integers(2, 14))
            labels = gen.random(n * n)
            order = np.argsort(labels, kind="stable").astype(np.int64)
            assert compiled.percolation_flip_time(labels, order, n) == \
                kpy.percolation_flip_time(labels, order, n)

    def test_crossing_and_bridging(self, gen):
        for _ in range(60):
            n = int(gen.integers(2, 12))
            mask = (gen.random(n * n) < gen.random()).astype(np.uint8)
            assert compiled.crossing_exists(mask, n) == \
                kpy.crossing_exists(mask, n)
            assert compiled.bridging_pivotal_count(mask, n) == \
                kpy.bridging_pivotal_count(mask, n)

    def test_dynamical_replay(self, gen):
        for _ in range(20):
            n = int(gen.integers(2, 10))
            state_a = (gen.random(n * n) < 0.5).astype(np.uint8)
            state_b = state_a.copy()
            count = int(gen.integers(1, 60))
            sites = gen.integers(0, n * n, size=count).astype(np.int64)
            opens = (gen.random(count) < 0.5).astype(np.uint8)
            ra = compiled.dynamical_first_crossing(state_a, n, sites, opens)
            rb = kpy.dynamical_first_crossing(state_b, n, sites, opens)
            assert ra == rb
            assert np.array_equal(state_a, state_b)

    def test_itermaj(self, gen):
        for m, h in ((3, 6), (5, 4), (7, 3), (9, 2)):
            labels = gen.random(m ** h)
            assert compiled.itermaj_flip_time(labels.copy(), m, h) == \
                kpy.itermaj_flip_time(labels.copy(), m, h)

    def test_graph_kernels(self, gen):
        for v in (6, 12, 20):
            eu, ew = edge_index_table(v)
            lab = gen.random(len(eu))
            order = np.argsort(lab, kind="stable")
            su, sw, sl = eu[order], ew[order], lab[order]
            assert compiled.connectivity_flip_time(su, sw, sl, v) == \
                kpy.connectivity_flip_time(su, sw, sl, v)
            assert compiled.triangle_flip_time(su, sw, sl, v) == \
                kpy.triangle_flip_time(su, sw, sl, v)

    def test_window_kernels(self, gen):
        for _ in range(40):
            n = int(gen.integers(4, 50))
            ell = int(gen.integers(1, min(n, 14)))
            bits = (gen.random(n) < 0.5).astype(np.uint8)
            assert compiled.max_window_value(bits, ell) == \
                kpy.max_window_value(bits, ell)
            labels = gen.random(n)
            order = np.argsort(labels, kind="stable").astype(np.int64)
            thr = np.sort(gen.integers(0, 2 ** ell, size=4)).astype(np.int64)
            out_c = np.empty(4)
            out_p = np.empty(4)
            compiled.window_flip_times(labels, order, ell, thr, out_c)
            kpy.window_flip_times(labels, order, ell, thr, out_p)
            same = (out_c == out_p) | (np.isnan(out_c) & np.isnan(out_p))
            assert same.all()


@pytest.mark.skipif(os.environ.get("THRESHOLDWINDOW_FORCE_PY") == "1",
                    reason="pure backend forced via environment")
def test_backend_reports_compiled():
    assert kernels.get_backend() == "compiled"


def test_force_python_backend_env():
    code = ("import thresholdwindow.kernels as k; "
            "print(k.get_backend())")
    env = dict(os.environ, THRESHOLDWINDOW_FORCE_PY="1")
    out = subprocess.run([sys.executable, "-c", code], env=env,
                         capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
