"""Smoke test for the `lnt` Python extension.

Build and install first:  pip install --no-build-isolation -e crates/python
"""

import math

import lnt


def main() -> None:
    water = lnt.MoleculeParams.water()
    assert water.kappa == 48.0
    w_g, w_u = water.normal_frequencies()
    assert w_g < water.omega < w_u

    well = lnt.MorseWell(water.kappa, water.omega, 9)
    assert abs(well.energy(0) - (0.5 - 0.25 / water.kappa)) < 1e-12
    y = well.matrix_y()
    assert len(y) == 9 and all(abs(y[i][j] - y[j][i]) < 1e-12 for i in range(9) for j in range(9))

    energies, vectors = lnt.spectrum(water, n_single=9)
    labels = lnt.basis_labels(n_single=9)
    assert len(energies) == len(vectors) == len(labels) == 45
    assert all(a <= b for a, b in zip(energies, energies[1:]))
    assert abs(lnt.fidelity(vectors[0], vectors[0]) - 1.0) < 1e-12
    s = lnt.entropy(vectors[26], n_single=9)
    assert 0.0 <= s <= math.log(9)

    points = lnt.scan(-0.015, -0.02, n_single=9)
    assert len(points) == 11 and points[0][0] == -0.015

    sys = lnt.ClassicalSystem.from_params(water)
    state = (0.1, -0.1, 2.0, 1.0)
    e0 = sys.energy(*state)
    later = sys.evolve(state, 0.005, steps=2000)
    assert abs(sys.energy(*later) - e0) < 1e-8 * e0
    section = sys.poincare_section(8.0, ic_grid=3, max_crossings=20)
    assert section and all(len(p) == 3 for p in section)

    try:
        lnt.MoleculeParams(0.0, 1.5, 1000.0, 50.0)
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range coupling accepted")

    print(f"ok: E0 = {energies[0]:.2f} cm-1, S(27) = {s:.3f}, {len(section)} section points")


if __name__ == "__main__":
    main()
