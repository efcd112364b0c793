import math

import numpy as np
import orjson
import pytest

from couette_lab.base import SolverConfig
from couette_lab.constants import NormKind, Schema, SolverKind
from couette_lab.exceptions import FieldFormatError, GridError, InadmissibleParametersError
from couette_lab.field import (
    FieldMode,
    GridSpec,
    NormSpec,
    SpectralField,
    assemble,
    evolve_mode,
    export_physical,
    field_tasks,
    helmholtz_norms,
    read_field,
    run_field,
    sobolev_norm,
    velocity_norm,
    write_field,
)
from couette_lab.field.evolve import ModeTask
from couette_lab.field.io import field_from_document, field_to_document
from couette_lab.field.norms import quantity
from couette_lab.modes.inviscid import InviscidInit, solve_mode
from couette_lab.presets import FieldPresets
from couette_lab.symbols import FluidParams, Frequency

pytestmark = pytest.mark.unit


def test_grid_lattice():
    grid = GridSpec(2, 1.0, 0.5)
    assert grid.j_max == 2
    assert len(grid.modes()) == 20
    assert not grid.contains(0, 1)
    assert GridSpec(2, 1.0, 0.5, include_zero_mode=True).contains(0, 1)
    assert GridSpec().index_of(21.0) == 42
    with pytest.raises(GridError):
        GridSpec().index_of(0.3)
    with pytest.raises(GridError):
        GridSpec(k_max=0)
    assert GridSpec.from_header(grid.to_header()) == grid


def test_reference_presets():
    forced = assemble(FieldPresets.FIG1_FORCED)
    assert forced.keys == [(-3, -42), (3, 42)]
    assert forced.reality_defect() == 0.0
    m = forced.get(3, 42)
    assert (m.R, m.A, m.Omega) == (0j, 0j, 5 + 0j)

    transient = assemble(FieldPresets.FIG1_TRANSIENT)
    m = transient.get(3, 42)
    assert m.R + m.Omega == pytest.approx(5.0)
    assert m.A == 50.0

    assert FieldPresets.ALL == ("fig1_forced", "fig1_transient", "random_band")
    assert assemble("fig1_forced").keys == forced.keys
    assert assemble("fig1_transient").get(3, 42) == m



def _smooth_field(d_eta: float) -> SpectralField:
    grid = GridSpec(2, 12.0, d_eta)
    modes = []
    for k in (1, 2):
        for j in range(-grid.j_max, grid.j_max + 1):
            eta = grid.eta(j)
            bump = math.exp(-0.5 * eta**2)
            modes.append(FieldMode(k, j, (1 + 0.5j) * bump, eta * bump / k, math.exp(-((eta - 1.0) ** 2))))
    return assemble(modes, grid)


@pytest.mark.parametrize("t", [0.0, 3.0])
def test_norms_converge_under_eta_refinement(t):
    coarse, fine = helmholtz_norms(_smooth_field(0.1), t), helmholtz_norms(_smooth_field(0.05), t)
    for name, value in coarse.to_dict().items():
        assert getattr(fine, name) == pytest.approx(value, rel=1e-2), name
    spec = NormSpec(NormKind.ISO, s=-1.5)
    assert sobolev_norm(_smooth_field(0.05), spec, t=t, moving=True) == pytest.approx(
        sobolev_norm(_smooth_field(0.1), spec, t=t, moving=True), rel=1e-2
    )


def test_norms_ignore_mode_order():
    field = _smooth_field(0.1)
    shuffled = list(field.modes())
    np.random.default_rng(3).shuffle(shuffled)
    other = assemble(shuffled, field.grid)
    assert other.keys == field.keys
    for t in (0.0, 2.5):
        assert helmholtz_norms(other, t) == helmholtz_norms(field, t)
    assert sobolev_norm(other, NormSpec(NormKind.ISO, s=1.0)) == sobolev_norm(field, NormSpec(NormKind.ISO, s=1.0))

def test_random_band_is_seeded():
    a = assemble(FieldPresets.RANDOM_BAND, seed=11)
    b = assemble(FieldPresets.RANDOM_BAND, seed=11)
    c = assemble(FieldPresets.RANDOM_BAND, seed=12)
    assert len(a) == 2 * 2 * 33
    assert np.array_equal(a.R, b.R)
    assert not np.array_equal(a.R, c.R)
    assert a.reality_defect() == 0.0


def test_assemble_rejects():
    with pytest.raises(InadmissibleParametersError):
        assemble("no_such_preset")
    with pytest.raises(GridError):
        assemble([FieldMode(99, 0, 1.0)])
    with pytest.raises(GridError):
        assemble([FieldMode(1, 2, 1.0), FieldMode(-1, -2, 3.0)])


def test_assemble_explicit_records():
    field = assemble([{"k": 1, "j": -2, "R": 1 + 1j}, (2, 0, 0j, 1.0)])
    assert len(field) == 4
    assert field.get(-1, 2).R == 1 - 1j
    assert field.get(5, 0) == FieldMode(5, 0)
    raw = assemble([FieldMode(1, 1, 1.0)], enforce_reality=False)
    assert len(raw) == 1


def test_helmholtz_decomposition():
    field = assemble(FieldPresets.FIG1_TRANSIENT)
    for t in (0.0, 7.0, 12.5):
        n = helmholtz_norms(field, t)
        assert n.velocity**2 == pytest.approx(n.Q_norm**2 + n.Px_norm**2 + n.Py_norm**2)
    forced = assemble(FieldPresets.FIG1_FORCED)
    assert velocity_norm(forced) == pytest.approx(math.sqrt(2 * 25 / 450 * 0.5))
    empty = assemble()
    assert helmholtz_norms(empty).velocity == 0.0


def test_sobolev_norms():
    field = assemble(FieldPresets.FIG1_TRANSIENT)
    assert sobolev_norm(field, NormSpec()) == pytest.approx(helmholtz_norms(field).rho_norm)
    iso = sobolev_norm(field, NormSpec(NormKind.ISO, s=1.0))
    assert iso == pytest.approx(math.sqrt(2 * 400 * 451 * 0.5))
    # in the moving frame the weight is smallest at the critical time
    moving = sobolev_norm(field, NormSpec(NormKind.ISO, s=1.0), t=7.0, moving=True)
    assert moving == pytest.approx(math.sqrt(2 * 400 * 10 * 0.5))
    aniso = NormSpec(NormKind.ANISO, s1=1.0, s2=0.5).weight(np.array([1.0]), np.array([2.0]))
    assert aniso[0] == pytest.approx(2.0 * math.sqrt(5.0))
    assert np.allclose(quantity(field, "xi"), 5.0)
    with pytest.raises(InadmissibleParametersError):
        NormSpec("h1")
    with pytest.raises(InadmissibleParametersError):
        quantity(field, "pressure")


def test_document_round_trip(tmp_path):
    field = assemble(FieldPresets.RANDOM_BAND, GridSpec(2, 2.0, 0.5), seed=4)
    path = write_field(field, tmp_path / "field.json")
    back = read_field(path)
    assert back.keys == field.keys
    assert np.array_equal(back.Omega, field.Omega)
    assert back.grid == field.grid
    assert orjson.loads(path.read_bytes())["schema"] == Schema.FIELD


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(schema="cspec-field/0"),
        lambda d: d.pop("grid"),
        lambda d: d.update(modes="none"),
        lambda d: d["modes"][0].pop("omega_im"),
        lambda d: d["modes"][0].update(rho_re="abc"),
    ],
)
def test_document_validation(mutate):
    doc = field_to_document(assemble(FieldPresets.FIG1_FORCED))
    mutate(doc)
    with pytest.raises(FieldFormatError):
        field_from_document(doc)


def test_read_field_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(FieldFormatError):
        read_field(path)


def test_export_physical(tmp_path):
    field = assemble(FieldPresets.FIG1_FORCED)
    path = export_physical(field, tmp_path / "phys.csv", n_x=4, n_y=8)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,rho,alpha,omega"
    assert len(lines) == 1 + 4 * 8
    first = [float(v) for v in lines[1].split(",")]
    # first row is x = 0, y = -10: omega = 2 * 5 cos(21 y) d_eta
    assert first[:2] == [0.0, -10.0]
    assert first[2] == 0.0
    assert first[4] == pytest.approx(5.0 * math.cos(210.0))


def test_field_run_matches_single_mode():
    field = assemble(FieldPresets.FIG1_FORCED)
    params = FluidParams(1.0)
    times = np.linspace(0.0, 10.0, 5)
    run = run_field(field, params, 10.0, sample_times=times)
    assert run.keys == [(3, 42)]
    assert run.solvers == [SolverKind.INVISCID]

    ref = solve_mode(InviscidInit(0j, 0j, 5.0), Frequency(3, 21.0), 1.0, 10.0, sample_times=times, config=SolverConfig())
    assert np.array_equal(run.states[:, 0, 0], ref.R)
    assert np.array_equal(run.states[:, 0, 1], ref.A)

    snap = run.snapshot(4)
    assert snap.time == 10.0
    assert snap.reality_defect() == 0.0
    series = run.norm_series()
    assert series["velocity"].shape == (5,)
    assert np.allclose(run.growth_series(), series["Q_norm"] + series["rho_norm"])
    assert run.sobolev_series(NormSpec()).shape == (5,)


def test_default_samples_and_zero_horizon():
    field = assemble(FieldPresets.FIG1_FORCED)
    tasks = field_tasks(field, FluidParams(1.0), 10.0)
    assert len(tasks) == 1 and len(tasks[0].times) == 501
    assert field_tasks(field, FluidParams(1.0), 0.0)[0].times == (0.0,)

    run = run_field(field, FluidParams(1.0), 0.0)
    assert run.states.shape == (1, 1, 3)
    assert run.states[0, 0, 2] == 5.0


def test_routing():
    grid = GridSpec(2, 2.0, 0.5, include_zero_mode=True)
    times = (0.0, 1.0)
    zero = ModeTask(0, 2, 1.0, (0j, 1.0, 0j), FluidParams(1.0, 1e-2), 1.0, times)
    assert evolve_mode(zero).solver == SolverKind.ZERO
    viscous = ModeTask(1, 2, 1.0, (1.0, 0j, 0j), FluidParams(1.0, 1e-2), 1.0, times)
    assert evolve_mode(viscous).solver == SolverKind.VISCOUS
    # nu = 0, lambda > 0 goes through the reduced viscous system
    damped = ModeTask(1, 2, 1.0, (1.0, 0j, 0j), FluidParams(1.0, 0.0, 1e-2), 1.0, times)
    result = evolve_mode(damped)
    assert result.solver == SolverKind.VISCOUS
    assert result.states.shape == (2, 3)
    assert grid.contains(0, 2)
