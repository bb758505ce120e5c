"""Write SVG pictures of the m = 2 momentum cells for the three root patterns."""

import pathlib
import sys

import numpy as np

from bochner.cli import emit_cell_plot
from bochner.polynomial import RealPolynomial

out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "cell_plots")
out.mkdir(exist_ok=True)
examples = {
    "case1": RealPolynomial(np.polymul([1, -1, -2], [1, 0, 1])),
    "case3-1": RealPolynomial.from_roots([(1.0, 2), (0.0, 1), (-1.0, 1)]),
    "case4": RealPolynomial.from_roots([(2.0, 1), (0.5, 1), (-1.0, 1), (-2.5, 1)]),
}
for name, p_D in examples.items():
    svg, _ = emit_cell_plot(p_D)
    (out / f"{name}.svg").write_text(svg)
    print(f"{name}: {p_D.pretty()} -> {out / (name + '.svg')}")
