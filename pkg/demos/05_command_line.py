"""Driving the command line from Python (equivalent shell commands in comments)."""

# %%
import io
import tempfile
from pathlib import Path

from meanprop.cli import main
from meanprop.fileio import write_vector

tmp = Path(tempfile.mkdtemp())
write_vector(tmp / "x.txt", [1.0, 0.0])
write_vector(tmp / "y.txt", [0.0, 1.0])


def show(argv):
    out = io.StringIO()
    code = main(argv, out)
    print(f"$ meanprop {' '.join(argv)}   [exit {code}]")
    print(out.getvalue())


# %%
show(["test", "--x", str(tmp / "x.txt"), "--y", str(tmp / "y.txt"), "--json"])
show(["fieller", "--x", str(tmp / "x.txt"), "--y", str(tmp / "y.txt"), "--level", "0.9"])
show(["density", "--p", "3", "--kappa", "0", "--grid", "0:2:5"])
show(["simulate", "--p", "2", "--kappa", "20", "--reps", "100000", "--seed", "1"])
