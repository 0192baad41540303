import json
import os
import subprocess
import sys

import numpy as np

from polyff import _backend

SCRIPT = """
import json, numpy as np
from polyff import _backend, shapes
from polyff.harness import evaluate
qs = np.array([[1e-7, 2e-7, 0.0], [0.05, 0.0, 0.02], [1.0, 2.0, 3.0], [4.0, -1.0, 0.5 + 0.2j]])
out = {}
for name, fig in [("triangle", shapes.triangle()), ("dodecahedron", shapes.dodecahedron())]:
    v = evaluate(fig, qs)[0]
    out[name] = [[z.real, z.imag] for z in v]
    out[name + "_ci"] = [[z.real, z.imag] for z in evaluate(fig, qs, symmetric=True)[0]] if name == "dodecahedron" else []
print(json.dumps({"backend": _backend.BACKEND, "values": out}))
"""


def _run(flag):
    env = dict(os.environ, POLYFF_NUMBA=flag)
    res = subprocess.run([sys.executable, "-c", SCRIPT], env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def test_flag_selects_backend_and_results_agree():
    py = _run("0")
    assert py["backend"] == "numpy"
    jit = _run("1")
    assert jit["backend"] == ("numba" if _backend.USE_NUMBA else "numpy")
    for name, vals in py["values"].items():
        a = np.array(vals).reshape(-1, 2) @ [1, 1j]
        b = np.array(jit["values"][name]).reshape(-1, 2) @ [1, 1j]
        assert np.all(np.abs(a - b) <= 1e-13 * np.abs(a))
