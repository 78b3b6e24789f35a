"""Backend selection and cross-backend behaviour checks."""

import json
import os
import subprocess
import sys

import pytest

from crnbound import _kernels
from crnbound.certifier import TrialSpec, certify_boundedness
from crnbound.parser import lower, parse


def test_default_backend_is_numba_when_available():
    if "numba" in _kernels.IMPLEMENTATIONS:
        assert _kernels.kernel_backend() == "numba"
    else:
        assert _kernels.kernel_backend() == "numpy"


def test_numpy_backend_selectable_via_env():
    code = (
        "import crnbound as cb\n"
        "import numpy as np\n"
        "assert cb.kernel_backend() == 'numpy'\n"
        "net, kin = cb.lower(cb.parse('S1 <-> S2'))\n"
        "traj = cb.integrate(net, kin, (2.0, 0.5), 20.0)\n"
        "print(repr(float(traj.final_state[0])))\n"
    )
    env = dict(os.environ, CRNBOUND_KERNELS="numpy")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    final = float(out.stdout.strip())
    assert final == pytest.approx(1.25, abs=1e-4)


def test_unknown_backend_value_falls_back_to_default():
    code = (
        "import crnbound as cb\n"
        "print(cb.kernel_backend())\n"
    )
    env = dict(os.environ, CRNBOUND_KERNELS="something-else")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.returncode == 0, out.stderr
    assert out.stdout.strip() in ("numba", "numpy")


def test_thread_cap_does_not_change_results():
    net, kin = lower(parse("A <-> B\nB <-> C"))
    spec = TrialSpec(trials=3, horizon=10.0, samples_per_shell=1000, seed=9)
    old = os.environ.get("CRN_BOUND_THREADS")
    try:
        os.environ["CRN_BOUND_THREADS"] = "1"
        serial = certify_boundedness(net, kin, spec).as_dict()
        os.environ["CRN_BOUND_THREADS"] = "4"
        threaded = certify_boundedness(net, kin, spec).as_dict()
    finally:
        if old is None:
            os.environ.pop("CRN_BOUND_THREADS", None)
        else:
            os.environ["CRN_BOUND_THREADS"] = old
    assert json.dumps(serial) == json.dumps(threaded)
