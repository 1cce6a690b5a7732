import numpy as np
import pytest

from speccert.finite import (
    assemble_jacobian,
    build_pseudo_diag,
    gershgorin_disks,
    kernel_from_state,
    newton_solve,
)
from speccert.fourier import Grid, index_list
from speccert.models import sh_model


def cosine_seed(grid, N, amp, width, carrier=1.0, samples=4001):
    """Coefficients of amp*sech(width*x)*cos(carrier*x) in 'c' storage."""
    x = np.linspace(-grid.d, grid.d, samples)
    f = amp / np.cosh(width * x) * np.cos(carrier * x)
    out = []
    for n in range(N + 1):
        w = np.cos(np.pi * n * x / grid.d)
        c = np.trapezoid(f * w, x) / (2.0 * grid.d)
        out.append(c * (1.0 if n == 0 else 2.0))
    return np.array(out)


def solve_sh_toy(mu=1.5, nu1=-3.2, amp=1.8, width=0.8, d=20.0, N=32):
    model = sh_model(mu, nu1, 1.0, m=1)
    grid = Grid(1, d)
    seed = cosine_seed(grid, N, amp, width)
    u0 = newton_solve(model, grid, "c", seed, N)
    return model, grid, u0


@pytest.fixture(scope="session")
def sh_toy():
    """Localized 1D pulse with the full finite-stage output, shared."""
    model, grid, u0 = solve_sh_toy()
    w = kernel_from_state(model, u0)
    a = assemble_jacobian(model, w, "c", 32)
    idx = index_list(grid, "c", 32)
    pseudo = build_pseudo_diag(a, idx, True)
    disks = gershgorin_disks(model, w, "c", 32, pseudo, a)
    return {
        "model": model, "grid": grid, "u0": u0, "w": w, "jac": a,
        "pseudo": pseudo, "disks": disks, "N": 32,
    }
