"""Acceptance criteria, one test per criterion.

Each test records a ``CRITERION n: PASS|FAIL`` line with the measured
quantities and wall time; the lines are repeated in the pytest terminal
summary.
"""
import time

import numpy as np
import pytest

import oracles
from resonances1d import absorber as ab
from resonances1d import cli
from resonances1d import spectral as sp
from resonances1d import transfer as tr
from resonances1d.potential import add_barrier, square_potential, zero_potential
from resonances1d.resonance import is_decreasing, q_scan

WELL = square_potential([-1], [-1, 1])
WINDOW = (0.5, 6, -2, -1e-3)
V0 = square_potential([-4], [0, 1], "halfline", "dirichlet")
BARRIER = (1.0, 2.0, 1.0)
Q_GRID = [float(q) for q in range(1, 11)]


class Criterion:
    """Collects named checks and reports a single verdict line."""

    def __init__(self, number, budget, log):
        self.number, self.budget, self.log = number, budget, log
        self.checks = []
        self.start = time.perf_counter()

    def check(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    def finish(self):
        elapsed = time.perf_counter() - self.start
        self.check("runtime", elapsed < self.budget, f"{elapsed:.2f}s < {self.budget}s")
        ok = all(c[1] for c in self.checks)
        parts = "; ".join(f"{n}={'ok' if good else 'FAIL'} ({d})" if d else
                          f"{n}={'ok' if good else 'FAIL'}" for n, good, d in self.checks)
        line = f"CRITERION {self.number}: {'PASS' if ok else 'FAIL'} | {parts}"
        print(line)
        self.log.append(line)
        failed = [n for n, good, _ in self.checks if not good]
        assert not failed, line


@pytest.fixture
def crit(criterion_log):
    def make(number, budget):
        return Criterion(number, budget, criterion_log)
    return make


def test_criterion_01_transfer_identities(crit):
    c = crit(1, 1.0)
    rng = np.random.default_rng(20240601)
    n = 1000
    cvals = rng.uniform(-10, 10, n)
    length = rng.uniform(1e-3, 1, n)
    lam = rng.uniform(-3, 3, n) + 1j * rng.uniform(-1, 1, n)
    m = tr.segment_matrix(cvals, length, lam)
    det_err = np.abs(np.linalg.det(m) - 1).max()
    split = rng.uniform(0, 1, n)
    composed = tr.segment_matrix(cvals, length * (1 - split), lam) @ \
        tr.segment_matrix(cvals, length * split, lam)
    semi_err = np.abs(composed - m).max()
    c.check("det", det_err <= 1e-10, f"max |det-1| = {det_err:.2e}")
    c.check("semigroup", semi_err <= 1e-12, f"max err = {semi_err:.2e}")
    c.finish()


def test_criterion_02_dtn_closed_form(crit):
    c = crit(2, 1.0)
    free = zero_potential((0, 1), "halfline", "dirichlet")
    worst_v = worst_dot = worst_fd = 0.0
    for k in (0.1, 1.0, 2.0, 10.0):
        v = tr.riccati_v(free, k)
        worst_v = max(worst_v, abs(v / oracles.dtn_free(k) - 1))
        dot = tr.riccati_v_dot(free, k)
        worst_dot = max(worst_dot, abs(dot / oracles.dtn_free_dot(k) - 1))
        h = 1e-4 * k
        fd = (tr.riccati_v(free, k + h) - tr.riccati_v(free, k - h)) / (2 * h)
        worst_fd = max(worst_fd, abs(dot / fd - 1))
    c.check("v", worst_v <= 1e-9, f"rel err {worst_v:.1e}")
    c.check("v_dot analytic", worst_dot <= 1e-6, f"rel err {worst_dot:.1e}")
    c.check("v_dot finite difference", worst_fd <= 1e-6, f"rel err {worst_fd:.1e}")
    c.finish()


def test_criterion_03_derivative_lower_bound(crit):
    c = crit(3, 5.0)
    p = square_potential([-9], [0, 0.5], "halfline", "dirichlet")
    ks = np.linspace(20, 60, 401)
    low = min(tr.riccati_v_dot(p, k, 1.0) for k in ks)
    c.check("min v_dot on [20,60]", low >= 0.9, f"{low:.4f} >= 0.9")
    c.finish()


def test_criterion_04_square_well_oracle(crit):
    c = crit(4, 5.0)
    w9 = square_potential([-9], [0, 1], "halfline", "dirichlet")
    b9 = [s.k for s in tr.find_axis_states(w9, 1.0, kind=tr.BOUND)]
    a9 = tr.find_axis_states(w9, 1.0, kind=tr.ANTIBOUND)
    ref = oracles.halfline_well_bound(9)
    err = abs(b9[0] - ref[0]) if len(b9) == 1 else float("inf")
    c.check("-9 well: one bound state", len(b9) == 1 and err <= 1e-8,
            f"k = {b9[0] if b9 else None}, |k - oracle| = {err:.1e}")
    c.check("-9 well: no antibound state", a9 == [], f"{len(a9)} found")
    w25 = square_potential([-25], [0, 1], "halfline", "dirichlet")
    b25 = tr.find_axis_states(w25, 1.0, kind=tr.BOUND)
    a25 = tr.find_axis_states(w25, 1.0, kind=tr.ANTIBOUND)
    c.check("-25 well", len(b25) == 2 and len(a25) >= 1,
            f"{len(b25)} bound, {len(a25)} antibound")
    c.finish()


def test_criterion_05_cross_engine(crit):
    c = crit(5, 60.0)
    rs = sp.filtered_eigenvalues(WELL, sp.default_mesh(WELL, 24))
    spec = rs.window(WINDOW).values
    ref = np.array(tr.find_resonances_secular(WELL, WINDOW))
    same = len(spec) == len(ref) > 0
    err = np.abs(np.sort_complex(spec) - np.sort_complex(ref)).max() if same else float("inf")
    c.check("match transfer zeros", same and err <= 1e-6,
            f"{len(spec)} vs {len(ref)} values, max err {err:.1e}")
    z = rs.values
    mirror = max(np.abs(z - (-np.conj(v))).min() for v in z)
    c.check("closed under -conj", mirror <= 1e-5, f"max defect {mirror:.1e}")
    c.finish()


def test_criterion_06_spectral_accuracy(crit):
    c = crit(6, 120.0)
    targets = [2.3569879824368396 - 1.9090783989378668j, 5.797696759336759 - 2.576430138077698j]
    floor = 1e-10
    for target in targets:
        errs = []
        for order in (12, 18, 24):
            ev = sp.solve_pencil(sp.assemble_pencil(WELL, sp.default_mesh(WELL, order)),
                                 vectors=False).eigenvalues
            errs.append(np.abs(ev - target).min())
        ok = all(b <= 0.1 * a or a <= floor or b <= floor for a, b in zip(errs, errs[1:]))
        c.check(f"lambda={target:.3f}", ok, " -> ".join(f"{e:.1e}" for e in errs))
    free = square_potential([0], [-1, 1])
    n_free = len(sp.filtered_eigenvalues(free, sp.default_mesh(free, 24)))
    c.check("free potential filtered", n_free == 0, f"{n_free} survivors")
    c.finish()


@pytest.fixture(scope="module")
def scans():
    t = time.perf_counter()
    with_barrier = q_scan(V0, BARRIER, Q_GRID)
    without = q_scan(V0, None, Q_GRID)
    return with_barrier, without, time.perf_counter() - t


def test_criterion_07_symmetry_under_barrier(crit, scans):
    with_barrier, without, elapsed = scans
    c = crit(7, 60.0)
    c.start -= elapsed
    late = {b: [pt for pt in s if pt[0] >= 3] for b, s in with_barrier.branches().items()}
    mono = all(is_decreasing(s) for s in late.values())
    c.check("defects decrease for q >= 3 (per state)", mono, f"{len(late)} tracked states")
    final = with_barrier.rows[-1].max_defect
    c.check("final defect", final is not None and final <= 1e-6, f"{final:.1e} <= 1e-6")
    fit = with_barrier.fit
    c.check("fit", fit.c_hat > 0 and fit.r2 >= 0.9, f"c_hat={fit.c_hat:.4f}, r2={fit.r2:.4f}")
    c.check("pinned c_hat", abs(fit.c_hat / 5.41496 - 1) <= 0.05, "5.41496 +- 5%")
    c.check("pinned r2", abs(fit.r2 / 0.99066 - 1) <= 0.05, "0.99066 +- 5%")
    control = min(d for r in without.rows for _, _, d in r.pairs)
    c.check("no-barrier control", control >= 1e-3, f"min defect {control:.2e}")
    c.finish()


def test_criterion_08_never_exact_symmetry(crit, scans):
    c = crit(8, 60.0)
    with_barrier, _, _ = scans
    p = add_barrier(V0, *BARRIER)
    worst = []
    for row in with_barrier.rows:
        other = [abs(tr.axis_secular(p, row.q, k, tr.ANTIBOUND)) for k in row.bounds]
        other += [abs(tr.axis_secular(p, row.q, k, tr.BOUND)) for k in row.antibounds]
        worst.append((row.q, min(other)))
    bad = [(q, m) for q, m in worst if m < 1e-8]
    detail = ", ".join(f"q={q:g}: {m:.1e}" for q, m in worst)
    c.check("min |other secular| >= 1e-8 at every q", not bad, detail)
    c.finish()


def test_criterion_09_absorber(crit):
    c = crit(9, 60.0)
    free_layer = ab.AbsorberSpec(0, 1, 0.0)
    lams = np.linspace(0.5, 5, 10)
    free_err = max(abs(abs(ab.rho(free_layer, lam)) - 1) for lam in lams)
    closed = max(abs(ab.rho(free_layer, lam) + np.exp(2j * lam)) for lam in lams)
    c.check("free layer", free_err <= 1e-9 and closed <= 1e-9,
            f"||rho|-1| = {free_err:.1e}, |rho + e^(2i lam)| = {closed:.1e}")
    spec = ab.AbsorberSpec()
    worst = max(abs(ab.rho(spec, lam)) for lam in np.linspace(1, 5, 81))
    c.check("default absorber on [1,5]", worst <= 1e-3, f"max |rho| = {worst:.2e}")

    exact = tr.find_resonances_secular(WELL, (0.01, 6, -3, -0.01))
    exact += tr.find_resonances_secular(WELL, (-0.5, 0.5, 0.05, 2))
    exact += tr.find_resonances_secular(WELL, (-0.5, 0.5, -2, -0.05))
    pp = ab.capped_pencil(WELL, spec, ab.capped_mesh(WELL, spec, 24))
    ev = sp.solve_pencil(pp, vectors=False).eigenvalues
    rows = []
    for lam in exact:
        r = abs(ab.rho(spec, lam))
        d = np.abs(ev - lam).min()
        rows.append((lam, d, 5 * r * abs(lam)))
    ok = all(d <= bound for _, d, bound in rows)
    c.check("capped vs outgoing", ok,
            ", ".join(f"{lam:.3f}: {d:.1e} <= {b:.1e}" for lam, d, b in rows))

    # the well's resonances sit where |rho| >> 1; a cavity with near-real
    # resonances exercises the bound where it is informative
    cavity = square_potential([20, 0, 20], [-1.5, -1, 1, 1.5])
    exact = tr.find_resonances_secular(cavity, (0.5, 6, -1, -1e-4))
    pp = ab.capped_pencil(cavity, spec, ab.capped_mesh(cavity, spec, 24))
    ev = sp.solve_pencil(pp, vectors=False).eigenvalues
    rows = [(lam, np.abs(ev - lam).min(), abs(ab.rho(spec, lam))) for lam in exact]
    ok = all(d <= 5 * r * abs(lam) for lam, d, r in rows)
    c.check("cavity capped vs outgoing", ok and len(rows) == 5,
            ", ".join(f"{lam:.3f}: {d:.1e} <= {5 * r * abs(lam):.1e}" for lam, d, r in rows))
    c.finish()


def test_criterion_10_determinism(crit, tmp_path, capsys):
    c = crit(10, 5.0)
    well = tmp_path / "well.txt"
    well.write_text("domain=fullline\nkind=squarepot\nvalues=-1\nbreaks=-1,1\n")
    half = tmp_path / "half.txt"
    half.write_text("domain=halfline\nbc=dirichlet\nkind=squarepot\nvalues=-4\nbreaks=0,1\n")
    runs = []
    for i in range(2):
        d = tmp_path / f"run{i}"
        codes = [
            cli.main(["squarepot", "--potential", str(well), "--out", str(d / "well")]),
            cli.main(["squarepot", "--potential", str(well), "--engine", "transfer",
                      "--window", "0.5,6,-3,-0.001", "--out", str(d / "well_transfer")]),
            cli.main(["scan", "--potential", str(half), "--barrier", "1,2,1",
                      "--out", str(d / "scan.csv")]),
            cli.main(["rho", "--lambda", "2,0", "--lambda", "1,-0.5", "--out", str(d / "rho.csv")]),
        ]
        runs.append((codes, {p.name: p.read_bytes() for p in sorted(d.iterdir())}))
    capsys.readouterr()
    (codes_a, files_a), (codes_b, files_b) = runs
    c.check("exit codes", codes_a == codes_b == [0, 0, 0, 0], str(codes_a))
    c.check("byte-identical files", files_a == files_b and len(files_a) == 7,
            f"{len(files_a)} files compared")
    c.finish()
