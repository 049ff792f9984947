"""Time the hot kernels with the JIT on and off.

Runs each measurement in a fresh subprocess so the BILLZETA_NUMBA flag
is picked up at import time, which is the only moment it matters.

    python3 bench/bench_kernels.py [--nmax 10] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys
import textwrap

_WORKER = textwrap.dedent(
    """
    import json, sys, time
    import numpy as np
    from billzeta import _accel
    from billzeta.geometry import Disk, Configuration
    from billzeta.database import build_database
    from billzeta.zeta import build_determinant
    from billzeta.trace import gaussian_weight

    n_max, repeat = int(sys.argv[1]), int(sys.argv[2])
    R = 6.0 / np.sqrt(3.0)
    disks = tuple(
        Disk(
            center=(R * np.cos(np.pi / 2 + 2 * np.pi * k / 3),
                    R * np.sin(np.pi / 2 + 2 * np.pi * k / 3)),
            radius=1.0,
        )
        for k in range(3)
    )
    config = Configuration(disks)

    def best(fn):
        times = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return min(times)

    build_database(config, 4)  # warm-up triggers compilation off the clock
    results = {"jit": _accel.NUMBA_ENABLED}
    results["orbit_solve"] = best(lambda: build_database(config, n_max))
    db = build_database(config, n_max)
    exp = build_determinant(db, n_max)
    zs = (np.linspace(-0.3, 0.3, 40)[:, None] + 1j * np.linspace(0.0, 2.0, 40)[None, :]).ravel()
    results["det_eval_1600"] = best(lambda: [exp.value(z) for z in zs])
    results["gaussian_pairs"] = best(lambda: gaussian_weight(db, 12.8, 0.1))
    print(json.dumps(results))
    """
)


def run_mode(jit: bool, n_max: int, repeat: int) -> dict:
    env = dict(os.environ, BILLZETA_NUMBA="1" if jit else "0")
    out = subprocess.run(
        [sys.executable, "-c", _WORKER, str(n_max), str(repeat)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nmax", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()

    on = run_mode(True, args.nmax, args.repeat)
    off = run_mode(False, args.nmax, args.repeat)
    if not on["jit"]:
        print("note: numba unavailable; both columns ran the numpy path")
    names = [k for k in on if k != "jit"]
    print(f"{'kernel':<16s} {'numba':>10s} {'numpy':>10s} {'speedup':>8s}")
    for name in names:
        a, b = on[name], off[name]
        print(f"{name:<16s} {a:>9.4f}s {b:>9.4f}s {b / a:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
