"""Time the dispatchable kernels on both execution lanes.

The lane is fixed at import time by HIERARCHON_NO_NUMBA, so the script
re-runs itself in a subprocess per lane and prints a comparison table.
Numbers are wall-clock medians of a few repeats; the first numba call
in each process pays the compilation cost and is reported separately.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _time(fn, repeats=5):
    first = None
    best = []
    for i in range(repeats):
        t0 = time.perf_counter()
        fn()
        dt = time.perf_counter() - t0
        if i == 0:
            first = dt
        else:
            best.append(dt)
    return first, sorted(best)[len(best) // 2]


def run_lane():
    from hierarchon import _kernels
    from hierarchon.qutrit3 import _pair_list

    rng = np.random.default_rng(0)
    results = {"lane": "numba" if _kernels.USE_NUMBA else "numpy"}

    A = rng.integers(-9, 10, size=(81, 81, 6)).astype(np.int64)
    B = rng.integers(-9, 10, size=(81, 81, 6)).astype(np.int64)
    first, med = _time(lambda: _kernels.gr_matmul(A, B, 18))
    results["gr_matmul_81x81_c18"] = {"first": first, "median": med}

    nums = rng.integers(-50, 51, size=(200000, 6)).astype(np.int64)
    powvec = np.array([pow(5, e, 10007) for e in range(6)], dtype=np.int64)
    first, med = _time(lambda: _kernels.fp_eval(nums, powvec, 10007))
    results["fp_eval_200k"] = {"first": first, "median": med}

    if _kernels.USE_NUMBA:
        builder = _kernels._semibasis_lut_nb
    else:
        builder = _kernels._semibasis_lut_np
    first, med = _time(builder, repeats=2)
    results["semibasis_lut_3^12"] = {"first": first, "median": med}

    pairs, ok0, colcode = _pair_list()
    pu = np.ascontiguousarray(pairs[:, 0])
    pv = np.ascontiguousarray(pairs[:, 1])
    stkey = colcode[pu] + 27 * colcode[pv]
    first, med = _time(
        lambda: _kernels.survey_join(pu, pv, ok0, stkey, 0, len(pairs), 500)
    )
    results["survey_join_stride500"] = {"first": first, "median": med}

    print(json.dumps(results))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--lane-run", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.lane_run:
        run_lane()
        return

    rows = {}
    for lane, env_val in (("numba", ""), ("numpy", "1")):
        env = dict(os.environ, HIERARCHON_NO_NUMBA=env_val)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--lane-run"],
            env=env,
            capture_output=True,
            text=True,
            check=True,
        )
        doc = json.loads(out.stdout.strip().splitlines()[-1])
        assert doc.pop("lane") == lane
        rows[lane] = doc

    names = list(rows["numba"])
    width = max(len(n) for n in names)
    print(
        "%-*s  %12s  %12s  %12s  %8s"
        % (width, "kernel", "numba-first", "numba", "numpy", "speedup")
    )
    for name in names:
        nb = rows["numba"][name]
        np_ = rows["numpy"][name]
        print(
            "%-*s  %11.4fs  %11.4fs  %11.4fs  %7.1fx"
            % (
                width,
                name,
                nb["first"],
                nb["median"],
                np_["median"],
                np_["median"] / nb["median"],
            )
        )


if __name__ == "__main__":
    main()
