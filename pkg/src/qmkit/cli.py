"""Command-line front end: one subcommand per computation, CSV or JSON out.

Every document starts with a header recording the toolkit version, the
subcommand, the full parameter map and the seed. Floats are written with
17 significant digits, so output is byte-identical for identical input.
Exit status is 2 for bad arguments and 1 for computational failures.
"""

import argparse
import ast
import csv
import io
import json
import math
import operator
import os
import sys

import numpy as np

from . import __version__
from . import angular, dynamics, fock, networks, qc, spherical, wigner
from .errors import (DomainError, DuplicateIndex, IndexOutOfRange, InvalidG, InvalidJ,
                     NoInverse, NonUnitAxis, NotCoprime, QMKitError, TriangleViolation)

DEFAULT_SEED = 1
INPUT_ERRORS = (ValueError, InvalidJ, NonUnitAxis, TriangleViolation, InvalidG, DomainError,
                NotCoprime, NoInverse, IndexOutOfRange, DuplicateIndex)


class ArgumentError(Exception):
    pass


# ------------------------------------------------------------ value parsing

_OPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
        ast.Div: operator.truediv, ast.Pow: operator.pow,
        ast.USub: operator.neg, ast.UAdd: operator.pos}
_NAMES = {"pi": math.pi, "inf": math.inf, "e": math.e}


def _eval(node):
    if isinstance(node, ast.Expression):
        return _eval(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return node.value
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.left), _eval(node.right))
    if isinstance(node, ast.UnaryOp) and type(node.op) in _OPS:
        return _OPS[type(node.op)](_eval(node.operand))
    raise ValueError("unsupported expression")


def number(text):
    """Arithmetic expression with pi (or π), e.g. '2π/64' or '1e-3'."""
    src = str(text).strip().replace("π", "pi")
    # allow implicit multiplication such as 2pi
    for d in "0123456789.":
        src = src.replace(d + "pi", d + "*pi")
    try:
        return float(_eval(ast.parse(src, mode="eval")))
    except (SyntaxError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def integer(text):
    v = number(text)
    if v != int(v):
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(v)


def number_list(text):
    return [number(t) for t in str(text).split(",") if t.strip()]


def sweep(text):
    """'a..b/n' gives n points from a to b; 'a..b' gives the integers a..b; else a list."""
    text = str(text)
    if ".." in text:
        lo, rest = text.split("..", 1)
        if "/" in rest and not _is_expression_division(rest):
            hi, n = rest.rsplit("/", 1)
            count = integer(n)
            if count < 1:
                raise argparse.ArgumentTypeError("sweep needs at least one point")
            return list(np.linspace(number(lo), number(hi), count))
        a, b = number(lo), number(rest)
        if a != int(a) or b != int(b):
            raise argparse.ArgumentTypeError("integer range needs integer ends")
        return [float(v) for v in range(int(a), int(b) + 1)]
    return number_list(text)


def _is_expression_division(rest):
    # in 'a..b/n' the part after the last '/' must be an integer literal
    tail = rest.rsplit("/", 1)[1].strip()
    return not tail.lstrip("+").isdigit()


# ------------------------------------------------------------ output

def _fmt(x):
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    return "0" if s == "-0" else s


def to_json(obj, indent=0):
    pad = "  " * (indent + 1)
    end = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj.tolist() if isinstance(obj, np.ndarray) else obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in seq):
            return "[" + ", ".join(to_json(v) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + to_json(v, indent + 1) for v in seq) + "\n" + end + "]"
    if isinstance(obj, (complex, np.complexfloating)):
        return "[" + _fmt(obj.real) + ", " + _fmt(obj.imag) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    return _fmt(obj)


class Result:
    """Payload of a subcommand: a JSON-able dict and optionally a table."""

    def __init__(self, data=None, columns=None, rows=None):
        self.data = data or {}
        self.columns = columns
        self.rows = rows

    def table(self):
        if self.columns is not None:
            return self.columns, self.rows
        rows = []
        for k, v in self.data.items():
            if isinstance(v, (list, tuple, np.ndarray, dict)):
                v = to_json(v).replace("\n", "").replace("  ", "")
                rows.append((k, v))
            else:
                rows.append((k, v))
        return ["key", "value"], rows


def render(header, result, fmt):
    if fmt == "json":
        doc = {"header": header, "data": result.data}
        if result.columns is not None:
            doc["columns"] = list(result.columns)
            doc["rows"] = [list(r) for r in result.rows]
        return to_json(doc) + "\n"
    out = io.StringIO()
    out.write("# " + to_json(header).replace("\n", "").replace("  ", "") + "\n")
    if result.columns is not None and result.data:
        out.write("# data: " + to_json(result.data).replace("\n", "").replace("  ", "") + "\n")
    columns, rows = result.table()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([v if isinstance(v, str) else to_json(v) for v in row])
    return out.getvalue()


# ------------------------------------------------------------ subcommands

COMMANDS = {}


def command(name, topic, default_format="json"):
    def wrap(fn):
        COMMANDS[name] = (fn, topic, default_format)
        return fn
    return wrap


def _add(p, *flags, **kw):
    p.add_argument(*flags, **kw)


@command("cg", "Addition of angular momentum (Clebsch-Gordan matrix)")
def cmd_cg(a, rng):
    d = angular.add_angular_momentum(a.j1, a.j2)
    r1 = angular.build_spin_rep(a.j1)
    r2 = angular.build_spin_rep(a.j2)
    rows = []
    for col, (tj, tm) in enumerate(d.labels):
        for i, m1 in enumerate(r1.m_values):
            for k, m2 in enumerate(r2.m_values):
                c = d.T[i * r2.dim + k, col]
                if c != 0:
                    rows.append((tj / 2, tm / 2, m1, m2, c))
    data = {"j_values": d.j_values, "T": d.T,
            "J2_product_basis": angular.j_squared_product_basis(d)}
    return Result(data, ["j", "m", "m1", "m2", "coefficient"], rows)


def _cg_args(p):
    _add(p, "--j1", type=number, default=1.0)
    _add(p, "--j2", type=number, default=0.5)


@command("zeeman", "The Zeeman effect with spin-orbit coupling", "csv")
def cmd_zeeman(a, rng):
    E = angular.zeeman_spectrum(a.v, a.g, a.h)
    rows = [(h, *e) for h, e in zip(a.h, E)]
    return Result({}, ["h"] + [f"E{i}" for i in range(6)], rows)


def _zeeman_args(p):
    _add(p, "--v", type=number, default=1.0)
    _add(p, "--g", type=number, default=2.0)
    _add(p, "--h", type=sweep, default="0..2/21")


def _axis(text):
    named = {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}
    if text in named:
        return np.array(named[text], dtype=float)
    v = np.array(number_list(text))
    if v.shape != (3,) or np.linalg.norm(v) == 0:
        raise ValueError(f"bad axis {text!r}")
    return v / np.linalg.norm(v)


@command("rotate", "Spin rotations and composition of rotations")
def cmd_rotate(a, rng):
    rep = angular.build_spin_rep(a.j)
    half = angular.build_spin_rep(0.5)
    R = np.eye(rep.dim, dtype=complex)
    U = np.eye(2, dtype=complex)
    steps = []
    for item in a.sequence.split(","):
        if ":" not in item:
            raise ValueError("sequence items look like axis:angle")
        ax, ang = item.split(":", 1)
        n, phi = _axis(ax.strip()), number(ang)
        R = R @ angular.rotation_matrix(rep, n, phi)
        U = U @ angular.rotation_matrix(half, n, phi)
        steps.append({"axis": n, "angle": phi})
    n, phi = angular.su2_axis_angle(U)
    data = {"steps": steps, "axis": n, "angle": phi, "angle_degrees": np.degrees(phi),
            "matrix_real": R.real, "matrix_imag": R.imag}
    return Result(data)


def _rotate_args(p):
    _add(p, "--j", type=number, default=0.5)
    _add(p, "--sequence", default="y:pi/2,z:pi/2",
         help="comma list of axis:angle applied as a left-to-right matrix product")


@command("rabi", "Rabi oscillations of a two-level system", "csv")
def cmd_rabi(a, rng):
    tl = dynamics.TwoLevel(a.eps, a.c)
    P = dynamics.rabi_probability(tl, a.t)
    return Result({"omega": tl.omega, "theta0": tl.theta0},
                  ["t", "P_stay"], list(zip(a.t, np.atleast_1d(P))))


def _rabi_args(p):
    _add(p, "--eps", type=number, default=1.0)
    _add(p, "--c", type=number, default=0.5)
    _add(p, "--t", type=sweep, default="0..10/101")


@command("lz", "Landau-Zener transitions")
def cmd_lz(a, rng):
    sw = dynamics.LZSweep(a.alpha, a.kappa, a.T)
    num = dynamics.lz_numeric(sw)
    ref = dynamics.lz_formula(sw)
    return Result({"alpha": a.alpha, "kappa": a.kappa, "window": sw.window(),
                   "P_numeric": num, "P_formula": ref,
                   "relative_error": abs(num - ref) / ref})


def _lz_args(p):
    _add(p, "--alpha", type=number, default=1.0)
    _add(p, "--kappa", type=number, default=1.0)
    _add(p, "--T", type=number, default=None)


@command("fgr-decay", "Decay into a quasi-continuum (Wigner model)", "csv")
def cmd_fgr(a, rng):
    model = dynamics.DecayModel(0.0, a.delta, a.sigma, a.nband)
    G = model.gamma
    t = np.array(a.gamma_t) / G
    P = np.atleast_1d(dynamics.survival_probability(model, t))
    rows = [(gt, tt, p, np.exp(-gt)) for gt, tt, p in zip(a.gamma_t, t, P)]
    return Result({"Gamma": G}, ["Gamma_t", "t", "P_survival", "exp_minus_Gamma_t"], rows)


def _fgr_args(p):
    _add(p, "--nband", type=integer, default=2000)
    _add(p, "--delta", type=number, default=1.0)
    _add(p, "--sigma", type=number, default=3.0)
    _add(p, "--gamma-t", dest="gamma_t", type=sweep, default="0..2/21")


@command("gamow", "The Gamow formula for a metastable well")
def cmd_gamow(a, rng):
    pole = dynamics.gamow_pole(dynamics.GamowWell(a.a, a.u, a.m, a.n))
    return Result({"E_r": pole.E_r, "Gamma_first_order": pole.gamma_r, "g": pole.g,
                   "k_first_order": pole.k_first, "k_exact": pole.k_exact,
                   "E_exact": pole.E_exact, "Gamma_exact": pole.gamma_exact,
                   "converged": pole.converged})


def _gamow_args(p):
    _add(p, "--a", type=number, default=1.0)
    _add(p, "--u", type=number, default=20.0)
    _add(p, "--m", type=number, default=1.0)
    _add(p, "--n", type=integer, default=1)


@command("ring-spectrum", "Ring with a delta scatterer threaded by flux", "csv")
def cmd_ring(a, rng):
    E = networks.ring_with_scatterer_spectrum(a.L, a.u, a.phi, (0.0, a.emax))
    return Result({}, ["index", "E"], list(enumerate(E)))


def _ring_args(p):
    _add(p, "--L", type=number, default=1.0)
    _add(p, "--u", type=number, default=1.0)
    _add(p, "--phi", type=number, default=0.0)
    _add(p, "--emax", type=number, default=200.0)


@command("ab-flux-sweep", "The Aharonov-Bohm ring: spectrum versus flux", "csv")
def cmd_ab(a, rng):
    n = [int(v) for v in a.n]
    rows = [(f, *networks.ab_ring_spectrum(a.L, f, n)) for f in a.flux]
    return Result({}, ["flux"] + [f"E_n{v}" for v in n], rows)


def _ab_args(p):
    _add(p, "--L", type=number, default=2 * math.pi)
    _add(p, "--n", type=sweep, default="-3..3")
    _add(p, "--flux", type=sweep, default="0..2π/64")


def _bonds(text):
    bonds = []
    for item in text.split(","):
        ends, rest = item.split(":", 1)
        i, j = ends.split("-")
        parts = rest.split("@")
        L = number(parts[0])
        phi = number(parts[1]) if len(parts) > 1 else 0.0
        bonds.append((int(i), int(j), L, phi))
    return bonds


@command("network", "Spectrum of a quantum graph", "csv")
def cmd_network(a, rng):
    u = {}
    if a.u:
        for item in a.u.split(","):
            v, val = item.split(":")
            u[int(v)] = number(val)
    net = networks.Network(_bonds(a.bonds), u=u)
    E, mult = networks.network_spectrum(net, (0.0, a.emax), return_multiplicity=True)
    return Result({}, ["E", "multiplicity"], list(zip(E, mult)))


def _network_args(p):
    _add(p, "--bonds", default="0-1:1.0,1-2:1.3,2-0:0.7",
         help="comma list of i-j:L or i-j:L@phi")
    _add(p, "--u", default="", help="comma list of vertex:strength")
    _add(p, "--emax", type=number, default=50.0)


@command("fabry-perot", "Transmission through two delta barriers", "csv")
def cmd_fp(a, rng):
    rows = [(phi, float(networks.fabry_perot(a.g, phi)),
             networks.two_delta_transmission(a.g, phi)) for phi in a.phi]
    return Result({"g": a.g}, ["phi", "T_closed_form", "T_transfer_matrix"], rows)


def _fp_args(p):
    _add(p, "--g", type=number, default=0.5)
    _add(p, "--phi", type=sweep, default="0..pi/51")


def _well(a):
    return spherical.ShieldedWell(a.a, a.V, a.U, a.m)


def _well_args(p):
    _add(p, "--a", type=number, default=1.0)
    _add(p, "--V", type=number, default=math.inf, help="floor potential, inf for a hard sphere")
    _add(p, "--U", type=number, default=0.0)
    _add(p, "--m", type=number, default=1.0)


def _well_deltas(well, E, lmax):
    k = np.sqrt(2 * well.m * E)
    if lmax is None:
        lmax = spherical.default_lmax(k * well.a)
    if np.isinf(well.V):
        return spherical.hard_sphere_cross_section(well.a, E, lmax, well.m).deltas
    return np.array([spherical.well_phase_shift(well, E, l) for l in range(lmax + 1)])


@command("sphere-xsec", "Cross section of a shielded spherical well", "csv")
def cmd_xsec(a, rng):
    well = _well(a)
    rows = []
    for E in a.E:
        ps = spherical.phase_shift_set(E, _well_deltas(well, E, a.lmax), well.m)
        cs = spherical.cross_sections(ps)
        rows.append((E, ps.k * well.a, cs.total, cs.total / (np.pi * well.a ** 2)))
    return Result({}, ["E", "ka", "sigma_total", "sigma_over_pi_a2"], rows)


def _xsec_args(p):
    _well_args(p)
    _add(p, "--E", type=sweep, default="0.1..10/20")
    _add(p, "--lmax", type=integer, default=None)


@command("phase-shifts", "Partial-wave phase shifts by matching", "csv")
def cmd_phase(a, rng):
    well = _well(a)
    ps = spherical.phase_shift_set(a.E, _well_deltas(well, a.E, a.lmax), well.m)
    cs = spherical.cross_sections(ps)
    rows = [(l, d, s) for l, (d, s) in enumerate(zip(ps.deltas, cs.partial))]
    return Result({"k": ps.k, "sigma_total": cs.total,
                   "optical_theorem_residual": spherical.optical_theorem_residual(ps)},
                  ["l", "delta", "sigma_l"], rows)


def _phase_args(p):
    _well_args(p)
    _add(p, "--E", type=number, default=2.0)
    _add(p, "--lmax", type=integer, default=None)


@command("born", "Born approximation for a soft sphere", "csv")
def cmd_born(a, rng):
    U = lambda r: a.V0 if r < a.a else 0.0
    dcs = spherical.born_dcs(U, a.E, np.array(a.theta), a.m, rmax=a.a)
    total = spherical.born_total(U, a.E, a.m, rmax=a.a)
    return Result({"sigma_total": total}, ["theta", "dcs"], list(zip(a.theta, dcs)))


def _born_args(p):
    _add(p, "--V0", type=number, default=0.1)
    _add(p, "--a", type=number, default=1.0)
    _add(p, "--m", type=number, default=1.0)
    _add(p, "--E", type=number, default=1.0)
    _add(p, "--theta", type=sweep, default="0..pi/19")


@command("wigner", "Wigner function of a grid state", "csv")
def cmd_wigner(a, rng):
    N = a.N
    if a.state == "thermal":
        th = wigner.thermal_oscillator_wigner(1.0, a.omega, a.beta)
        sx, sp = th.widths()
        X = np.linspace(-8 * sx, 8 * sx, N)
        P = np.linspace(-8 * sp, 8 * sp, N)
        W = wigner.sample_on_grid(th, X, P)
    elif a.state == "two-slit":
        x = np.linspace(-a.width / 2, a.width / 2, N, endpoint=False)
        W = wigner.two_slit_wigner(a.d, a.sigma, x).wigner
    else:
        x = np.linspace(-a.width / 2, a.width / 2, N, endpoint=False)
        if a.state == "gaussian":
            psi = wigner.gaussian_wavefunction(x, a.x0, a.p0, a.sigma)
        else:
            L = a.d
            psi = np.where((x > 0) & (x < L), np.sin(a.n * np.pi * x / L), 0.0)
        W = wigner.wigner_transform(wigner.GridState.from_wavefunction(x, psi),
                                    check_edges=False)
    rows = [(X, P, w) for X, Wrow in zip(W.X, W.W) for P, w in zip(W.P, Wrow)]
    data = {"X_min": W.X[0], "dX": W.dX, "nX": len(W.X), "P_min": W.P[0], "dP": W.dP,
            "nP": len(W.P), "norm": W.norm(), "purity": wigner.purity(W)}
    return Result(data, ["X", "P", "W"], rows)


def _wigner_args(p):
    _add(p, "--state", choices=["gaussian", "box", "two-slit", "thermal"], default="gaussian")
    _add(p, "--N", type=integer, default=64)
    _add(p, "--width", type=number, default=20.0)
    _add(p, "--x0", type=number, default=0.0)
    _add(p, "--p0", type=number, default=0.0)
    _add(p, "--sigma", type=number, default=1.0)
    _add(p, "--d", type=number, default=6.0, help="slit separation or box length")
    _add(p, "--n", type=integer, default=1)
    _add(p, "--omega", type=number, default=1.0)
    _add(p, "--beta", type=number, default=1.0)


@command("dimer", "Bose-Hubbard dimer and its spin representation")
def cmd_dimer(a, rng):
    H = fock.bose_hubbard_dimer(a.N, a.U, a.K, a.eps)
    eig = np.linalg.eigh(H)
    gs = eig[1][:, 0]
    gs = gs * np.sign(gs[np.flatnonzero(np.abs(gs) > 1e-12)[0]])
    obs = fock.dimer_observables(gs, a.N)
    return Result({"spectrum": eig[0], "constant": fock.dimer_constant(a.N, a.U),
                   "ground_state_S": obs.S, "ground_state_one_body_purity": obs.purity})


def _dimer_args(p):
    _add(p, "--N", type=integer, default=10)
    _add(p, "--U", type=number, default=0.0)
    _add(p, "--K", type=number, default=1.0)
    _add(p, "--eps", type=number, default=0.0)


@command("bell", "Singlet correlations and the CHSH inequality")
def cmd_bell(a, rng):
    if len(a.angles) != 4:
        raise ValueError("need four angles: A, B, A', B' in degrees")
    A, B, A2, B2 = np.radians(a.angles)
    C = fock.singlet_correlation
    value = fock.chsh(A, B, A2, B2)
    return Result({"C_AB": C(A, B), "C_AB'": C(A, B2), "C_A'B": C(A2, B),
                   "C_A'B'": C(A2, B2), "chsh_signed": value, "chsh": abs(value),
                   "classical_bound": 2})


def _bell_args(p):
    _add(p, "--angles", type=number_list, default="0,45,90,-45")


@command("schmidt", "Schmidt decomposition and entanglement entropy")
def cmd_schmidt(a, rng):
    if a.state == "singlet":
        st = fock.SINGLET
    elif a.state == "product":
        st = fock.BipartiteState(np.outer([1, 0], [0, 1]))
    else:
        dA, dB = a.dims
        st = fock.BipartiteState(rng.normal(size=(dA, dB)) + 1j * rng.normal(size=(dA, dB)))
    sd = fock.schmidt(st)
    SA = fock.entropy(fock.reduce(st, "A"))
    SB = fock.entropy(fock.reduce(st, "B"))
    return Result({"dims": list(st.dims), "p": sd.p, "entropy_A": SA, "entropy_B": SB,
                   "log2": math.log(2)})


def _schmidt_args(p):
    _add(p, "--state", choices=["singlet", "product", "random"], default="singlet")
    _add(p, "--dims", type=lambda s: [integer(v) for v in s.split(",")], default="3,7")


@command("shor", "Shor's factoring algorithm")
def cmd_shor(a, rng):
    if a.exact:
        M = a.M if a.M is not None else next(m for m in range(2, a.N) if math.gcd(m, a.N) == 1)
        n_c = a.n_c or qc.default_control_width(a.N)
        probs = qc.period_find_distribution(a.N, M, n_c)
        k = np.flatnonzero(probs > 1e-12)
        return Result({"N": a.N, "M": M, "n_c": n_c, "order": qc.multiplicative_order(M, a.N)},
                      ["k", "probability"], list(zip(k, probs[k])))
    run = qc.shor_factor(a.N, rng=rng, seed=a.seed, n_c=a.n_c)
    return Result(run.transcript())


def _shor_args(p):
    _add(p, "N", type=integer)
    _add(p, "--exact", action="store_true", help="print the exact distribution of k")
    _add(p, "--M", type=integer, default=None)
    _add(p, "--n-c", dest="n_c", type=integer, default=None)


@command("rsa", "The RSA encryption scheme")
def cmd_rsa(a, rng):
    r = qc.rsa_roundtrip(a.p, a.q, a.a, a.A)
    return Result({"N": r.N, "a": a.a, "b": r.b, "A": a.A, "B": r.B,
                   "A_recovered": r.A_recovered})


def _rsa_args(p):
    _add(p, "--p", type=integer, default=3)
    _add(p, "--q", type=integer, default=11)
    _add(p, "--a", type=integer, default=3)
    _add(p, "--A", type=integer, default=5)


@command("qft-demo", "Quantum Fourier transform of a periodic comb", "csv")
def cmd_qft(a, rng):
    Nc = 2 ** a.n
    reg = qc.QubitRegister(a.n)
    comb = np.zeros(Nc, dtype=complex)
    comb[a.offset::a.period] = 1.0
    reg.amplitudes = comb / np.linalg.norm(comb)
    qc.qft(reg)
    probs = reg.probabilities()
    return Result({"N_c": Nc, "period": a.period}, ["k", "probability"],
                  list(zip(range(Nc), probs)))


def _qft_args(p):
    _add(p, "--n", type=integer, default=6)
    _add(p, "--period", type=integer, default=5)
    _add(p, "--offset", type=integer, default=0)


ARGS = {"cg": _cg_args, "zeeman": _zeeman_args, "rotate": _rotate_args, "rabi": _rabi_args,
        "lz": _lz_args, "fgr-decay": _fgr_args, "gamow": _gamow_args,
        "ring-spectrum": _ring_args, "ab-flux-sweep": _ab_args, "network": _network_args,
        "fabry-perot": _fp_args, "sphere-xsec": _xsec_args, "phase-shifts": _phase_args,
        "born": _born_args, "wigner": _wigner_args, "dimer": _dimer_args, "bell": _bell_args,
        "schmidt": _schmidt_args, "shor": _shor_args, "rsa": _rsa_args, "qft-demo": _qft_args}


def list_experiments():
    return [(name, topic) for name, (_, topic, _) in COMMANDS.items()]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ArgumentError(f"{self.prog}: {message}")


def build_parser():
    parser = _Parser(prog="qmkit", description="Desk-scale quantum mechanics computations.")
    parser.add_argument("--version", action="version", version=f"qmkit {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.add_parser("list", help="list subcommands")
    for name, (_, topic, _) in COMMANDS.items():
        p = sub.add_parser(name, help=topic)
        ARGS[name](p)
        p.add_argument("--format", choices=["csv", "json"], default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--seed", type=integer, default=DEFAULT_SEED)
    return parser


def _threads():
    raw = os.environ.get("QMKIT_THREADS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError:
        raise ArgumentError(f"QMKIT_THREADS must be a positive integer, got {raw!r}")
    if n < 1:
        raise ArgumentError(f"QMKIT_THREADS must be a positive integer, got {raw!r}")
    return n


def _params(args):
    skip = {"command", "format", "out", "seed"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(text, path):
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _join_negative_values(argv):
    # argparse mistakes values such as -3..3 for flags; bind them to their option
    out = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1]
                and len(tok) > 1 and tok[0] == "-" and (tok[1].isdigit() or tok[1] == ".")):
            out[-1] = out[-1] + "=" + tok
        else:
            out.append(tok)
    return out


def run(argv=None):
    """Parse argv, run the subcommand and write the document. Returns the exit code."""
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        parser = build_parser()
        args = parser.parse_args(_join_negative_values(argv))
        _threads()
    except ArgumentError as exc:
        print(str(exc).splitlines()[0], file=sys.stderr)
        return 2
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2
    if args.command == "list":
        rows = list_experiments()
        sys.stdout.write("subcommand,topic\n")
        for name, topic in rows:
            sys.stdout.write(f"{name},{json.dumps(topic)}\n")
        return 0
    fn, _, default_format = COMMANDS[args.command]
    fmt = args.format or default_format
    header = {"toolkit": "qmkit", "version": __version__, "subcommand": args.command,
              "params": _params(args), "seed": args.seed}
    rng = np.random.default_rng(args.seed)
    try:
        result = fn(args, rng)
    except INPUT_ERRORS as exc:
        print(f"qmkit {args.command}: {exc}", file=sys.stderr)
        return 2
    except QMKitError as exc:
        transcript = getattr(exc, "transcript", None)
        result = Result({"error": type(exc).__name__, "message": str(exc),
                         "transcript": transcript})
        _emit(render(header, result, "json"), args.out)
        print(f"qmkit {args.command}: {exc}", file=sys.stderr)
        return 1
    _emit(render(header, result, fmt), args.out)
    return 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
