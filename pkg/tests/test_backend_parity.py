"""The compiled and pure-numpy kernel backends must agree bit-for-bit."""

import pathlib
import subprocess
import sys

SCRIPT = pathlib.Path(__file__).resolve().parents[1] / "benchmarks" / "numba_vs_numpy.py"


def test_backends_bit_identical():
    proc = subprocess.run(
        [sys.executable, str(SCRIPT), "--grid", "12x12", "--queries", "8"],
        capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "bit-identical" in proc.stdout
