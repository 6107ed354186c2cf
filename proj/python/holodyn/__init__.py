"""Local holomorphic dynamics near fixed points.

Germs are truncated power-series maps; results of the analysis functions are
plain dicts mirroring the JSON output of the ``holodyn`` command-line tool.
"""

from ._core import (
    Germ,
    HolodynError,
    __version__,
    attracting_directions,
    basin_grid,
    brjuno_sum_cf,
    characteristic_directions,
    compose,
    continued_fraction,
    fatou_coordinate,
    find_resonances,
    invert,
    iterate_orbit,
    leau_fatou_asymptotics,
    lift_germ,
    linearize_formal,
    multipliers,
    petal_membership,
    petal_radius,
    poincare_dulac,
    sigma_sequence,
)


def germ(dim, trunc, terms):
    """Build a Germ from a mapping {(component, alpha): coefficient}."""
    return Germ(dim, trunc, [(j, list(alpha), complex(c)) for (j, alpha), c in terms.items()])
