"""Exit criteria, one test per criterion, each printing a PASS/FAIL line."""

import csv
import io
import math
import time

import numpy as np
import pytest

from magneto_casimir import cli, reference
from magneto_casimir.lifshitz import (
    _MAX_LEVEL,
    _zero_t_integral,
    material_reflectances,
    SweepSpec,
    ThermalState,
    force_sweep,
    ideal_mirror,
    pressure_finite_t,
    pressure_zero_t,
)
from magneto_casimir.material import VOIGT_FIELD, Material, dielectric_tensor, voigt_components
from magneto_casimir.reflection import (
    HALF_SPACE,
    SlabGeometry,
    kinematics,
    reflection_numeric_oracle,
    reflection_te,
    reflection_tm,
)
from magneto_casimir.validation import reflection_grid

INSB = 15.4


def test_ac1_ideal_mirror_calibration(criterion):
    start = time.perf_counter()
    worst = 0.0
    for sep in (0.5, 1.0, 2.0):
        res = pressure_zero_t(sep, Material(), reflectance=ideal_mirror)
        exact = -math.pi**2 / (240 * sep**4)
        worst = max(worst, abs(res.pressure / exact - 1))
    elapsed = time.perf_counter() - start
    criterion(
        "AC1 ideal-mirror calibration",
        worst <= 1e-6 and elapsed < 1.0,
        f"max rel dev {worst:.2e} (tol 1e-6), {elapsed:.2f} s (limit 1 s)",
    )


def test_ac2_tensor_reduction(criterion):
    rng = np.random.default_rng(2024)
    start = time.perf_counter()
    zetas = 10.0 ** rng.uniform(-2, 2, 1000)
    fields = rng.uniform(0, 2, 1000)
    worst = 0.0
    for zeta, oc in zip(zetas, fields):
        m = Material(INSB, oc)
        full = dielectric_tensor(1j * zeta, VOIGT_FIELD, m)
        closed = voigt_components(zeta, m).tensor()
        nonzero = closed != 0
        worst = max(worst, float(np.max(np.abs(full - closed)[nonzero] / np.abs(closed[nonzero]))))
        worst = max(worst, float(np.max(np.abs(full[~nonzero]), initial=0.0)))
    elapsed = time.perf_counter() - start
    criterion(
        "AC2 tensor reduction",
        worst <= 1e-12 and elapsed < 1.0,
        f"max rel dev {worst:.2e} over 1000 points (tol 1e-12), {elapsed:.2f} s",
    )


def test_ac3_permittivity_dataset(criterion, capsys):
    start = time.perf_counter()
    code = cli.main(["epsilon", "--eps-l", "15.4", "--omega-c", "0.2"])
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    elapsed = time.perf_counter() - start
    z = np.array([float(r["zeta"]) for r in rows])
    xx, yy, yz = (np.array([float(r[k]) for r in rows]) for k in ("eps_xx", "eps_yy", "eps_yz"))
    shape_ok = (
        code == 0 and z.min() == 0.02 and z.max() == 3.0
        and np.all(xx > yy) and np.all(yy > INSB) and np.all(yz <= 0)
    )
    unit = [i for i, v in enumerate(z) if v == 1.0]
    anchor = np.array([xx[unit[0]], yy[unit[0]], yz[unit[0]]]) if unit else np.full(3, np.nan)
    dev = float(np.max(np.abs(anchor - [30.8, 30.20769, -2.96154])))
    criterion(
        "AC3 permittivity dataset",
        shape_ok and dev <= 1e-5 and elapsed < 1.0,
        f"ordering ok={shape_ok}, zeta=1 anchor dev {dev:.1e} (tol 1e-5), {elapsed:.2f} s",
    )


def test_ac4_reflection_oracle(criterion):
    start = time.perf_counter()
    grid = reflection_grid()
    assert len(grid) == 100
    oracle_dev = 0.0
    fresnel_dev = 0.0
    for zeta, q, oc in grid:
        eps = voigt_components(zeta, Material(INSB, oc))
        kin = kinematics(zeta, q, eps)
        for d in (math.inf, 1.0):
            geom = SlabGeometry(d)
            r_p = reflection_tm(kin, eps, geom)
            r_s = reflection_te(kin, eps, geom)
            oracle_dev = max(
                oracle_dev,
                abs(r_p - reflection_numeric_oracle(kin, eps, geom, "p")),
                abs(r_s - reflection_numeric_oracle(kin, eps, geom, "s")),
            )
            if oc == 0:
                if math.isinf(d):
                    te, tm = reference.fresnel(zeta, q, INSB)
                else:
                    te, tm = reference.slab_fresnel(zeta, q, INSB, d)
                fresnel_dev = max(fresnel_dev, abs(r_s / te - 1), abs(r_p / tm - 1))
    elapsed = time.perf_counter() - start
    criterion(
        "AC4 reflection oracle",
        oracle_dev <= 1e-8 and fresnel_dev <= 1e-12 and elapsed < 10.0,
        f"oracle dev {oracle_dev:.1e} (tol 1e-8), Fresnel rel dev {fresnel_dev:.1e} (tol 1e-12), {elapsed:.2f} s",
    )


def test_ac5_te_field_invariance(criterion):
    identical = True
    for zeta, q, _ in reflection_grid():
        values = set()
        for oc in (0.0, 0.5, 1.0):
            eps = voigt_components(zeta, Material(INSB, oc))
            values.add(complex(reflection_te(kinematics(zeta, q, eps), eps)))
        identical &= len(values) == 1
    criterion("AC5 TE field invariance", identical, "bitwise identical r_s for Omega_c in {0, 0.5, 1}")


def test_ac6_isotropic_lifshitz_oracle(criterion):
    start = time.perf_counter()
    worst = 0.0
    m = Material(INSB, 0.0)
    for sep in (0.2, 1.0, 5.0):
        cold = pressure_zero_t(sep, m).pressure
        worst = max(worst, abs(cold / reference.pressure_zero_t(sep, INSB) - 1))
        hot = pressure_finite_t(sep, m, ThermalState(0.01)).pressure
        worst = max(worst, abs(hot / reference.pressure_finite_t(sep, INSB, 0.01) - 1))
    elapsed = time.perf_counter() - start
    criterion(
        "AC6 isotropic Lifshitz oracle",
        worst <= 1e-8 and elapsed < 10.0,
        f"max rel dev {worst:.1e} (tol 1e-8), {elapsed:.2f} s (limit 10 s)",
    )


def test_ac7_field_ordering(criterion):
    start = time.perf_counter()
    fields = (0.0, 0.2, 0.5, 1.0)
    seps = np.linspace(0.1, 2.0, 50)
    rows = force_sweep(SweepSpec(seps, fields))
    elapsed = time.perf_counter() - start
    ok_rows = all(r.result is not None for r in rows)
    ratios = np.array([r.result.ratio if r.result else np.nan for r in rows]).reshape(4, 50)
    bounded = bool(np.all((ratios > 0) & (ratios < 1)))
    ordered = bool(np.all(np.diff(ratios, axis=0) < 0))
    criterion(
        "AC7 field ordering of F/F0",
        ok_rows and bounded and ordered and elapsed < 60.0,
        f"200 points, ratios in ({ratios.min():.4f}, {ratios.max():.4f}), "
        f"strictly decreasing in Omega_c={ordered}, {elapsed:.1f} s (limit 60 s)",
    )


def test_ac8_convergence_robustness(criterion):
    worst = 0.0
    for sep in (0.1, 1.0, 2.0):
        for oc in (0.0, 1.0):
            m = Material(INSB, oc)
            a = pressure_zero_t(sep, m).pressure
            b = pressure_zero_t(sep, m, rtol=0.5e-9).pressure
            worst = max(worst, abs(b / a - 1))
    # an explicitly finer fixed grid at the hardest point of the sweep
    m = Material(INSB, 1.0)
    fine = _zero_t_integral(material_reflectances(m, HALF_SPACE), 0.1, _MAX_LEVEL - 1)
    fine = -fine / (32 * math.pi**2 * 0.1**4)
    worst = max(worst, abs(fine / pressure_zero_t(0.1, m).pressure - 1))
    hot = ThermalState(0.01)
    for sep in (0.5, 1.0):
        for oc in (0.0, 0.5):
            m = Material(INSB, oc)
            a = pressure_finite_t(sep, m, hot).pressure
            b = pressure_finite_t(sep, m, hot, rtol=0.5e-9, term_rtol=0.5e-10, cutoff_multiplier=4).pressure
            worst = max(worst, abs(b / a - 1))
    thermal_gap = 0.0
    for oc in (0.0, 0.5):
        m = Material(INSB, oc)
        cold = pressure_zero_t(1.0, m).pressure
        warm = pressure_finite_t(1.0, m, ThermalState(1e-3)).pressure
        thermal_gap = max(thermal_gap, abs(warm / cold - 1))
    criterion(
        "AC8 convergence robustness",
        worst < 1e-8 and thermal_gap < 0.01,
        f"refinement change {worst:.1e} (tol 1e-8), theta=1e-3 vs zero-T {thermal_gap:.1e} (tol 1e-2)",
    )


def test_ac9_cli_contract(criterion, tmp_path, monkeypatch, capsys):
    validate_code = cli.main(["validate"])
    capsys.readouterr()
    outputs = []
    for threads in ("1", "4"):
        monkeypatch.setenv("MAGNETO_CASIMIR_THREADS", threads)
        path = tmp_path / f"force_{threads}.csv"
        code = cli.main(["force", "--output", str(path)])
        outputs.append((code, path.read_bytes()))
    text = outputs[0][1].decode("utf-8")
    rows = list(csv.reader(io.StringIO(text)))
    header_ok = rows[0] == ["omega_c", "L", "ratio", "pressure", "terms", "err_estimate"]
    body = rows[1:]
    schema_ok = len(body) == 200 and all(
        len(r) == 6 and all(math.isfinite(float(v)) for v in r) for r in body
    )
    identical = outputs[0][1] == outputs[1][1]
    lf_only = b"\r" not in outputs[0][1]
    ok = validate_code == 0 and all(c == 0 for c, _ in outputs) and header_ok and schema_ok and identical and lf_only
    criterion(
        "AC9 CLI contract",
        ok,
        f"validate exit {validate_code}, force rows {len(body)}, header ok={header_ok}, "
        f"byte-identical across thread counts={identical}",
    )
