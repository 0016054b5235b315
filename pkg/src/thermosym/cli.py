"""Command line front end.

Subcommands: weights | pressure | spectrum | gibbs | returnwords | verify.
Options may come from a JSON config file (--config) and are overridden by
explicit flags.  Exit codes: 0 success, 1 usage error, 2 numeric range
error, 3 verification failure.  Outputs are byte-identical across runs
for a fixed configuration and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import gibbs as gibbs_mod
from . import legendre, pressure, returnwords
from .errors import RangeError, ThermosymError, ValidationError
from .model import (
    BINARY_VALUES,
    ConstantWeights,
    FileWeights,
    FrequencyTable,
    FrequencyWeights,
    IIDWeights,
    MoebiusWeights,
    Potential,
    SquarefreeWeights,
    SubstitutiveWeights,
    binary_space,
    empirical_frequencies,
    xy_potential,
    affine_xy_potential,
)
from .partition import exact_partition, transfer_log_partition
from .weights import Substitution, fixed_point_prefix, thue_morse

USAGE_EXIT = 1
RANGE_EXIT = 2
VERIFY_EXIT = 3

DEFAULTS = {
    "n": 65536,
    "seed": 1,
    "format": "csv",
    "lambda_min": -8.0,
    "lambda_max": 8.0,
    "lambda_steps": 257,
    "alpha_steps": 101,
    "freq_n": 1_000_000,
    "paths": 1000,
    "length": 1024,
    "prefix_len": 8,
    "horizon": 65536,
    "potential": "xy",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def parse_letter_map(text: str) -> dict[str, float]:
    """'0=-1,1=1' inline, or the path of a JSON {"letter": value} file."""
    import os

    if os.path.exists(text):
        with open(text) as fh:
            data = json.load(fh)
        return {str(k): float(v) for k, v in data.items()}
    out = {}
    for pair in text.split(","):
        if "=" not in pair:
            raise ValidationError(f"bad letter map entry {pair!r}; expected L=V")
        letter, val = pair.split("=", 1)
        out[letter.strip()] = float(val)
    return out


def parse_value_probs(text: str):
    """'-1@0.5,1@0.5' -> (values, probs); probs optional and then uniform."""
    values, probs = [], []
    for item in text.split(","):
        if "@" in item:
            v, p = item.split("@", 1)
            values.append(float(v))
            probs.append(float(p))
        else:
            values.append(float(item))
            probs.append(None)
    if any(p is None for p in probs):
        if not all(p is None for p in probs):
            raise ValidationError("give probabilities for all values or none")
        probs = [1.0 / len(values)] * len(values)
    return tuple(values), tuple(probs)


def weight_sequence_from_spec(spec: str, seed: int = 1):
    """Build a weight sequence from an inline spec string.

    Forms: constant[:V] | moebius | squarefree | iid[:SEED[:v@p,...]] |
    subst:FILE:MAP | tm[:MAP] | file:PATH | freq:v@p,...
    """
    head, _, rest = spec.partition(":")
    if head == "constant":
        return ConstantWeights(float(rest) if rest else 1.0)
    if head == "moebius":
        return MoebiusWeights()
    if head == "squarefree":
        return SquarefreeWeights()
    if head == "iid":
        sub = rest.split(":", 1)
        use_seed = int(sub[0]) if sub[0] else seed
        if len(sub) > 1:
            values, probs = parse_value_probs(sub[1])
        else:
            values, probs = (-1.0, 1.0), (0.5, 0.5)
        return IIDWeights(seed=use_seed, values=values, probs=probs)
    if head == "subst":
        path, _, mapping = rest.partition(":")
        if not mapping:
            raise ValidationError("subst spec needs subst:FILE:MAP")
        return SubstitutiveWeights(Substitution.from_file(path),
                                   parse_letter_map(mapping))
    if head == "tm":
        mapping = parse_letter_map(rest) if rest else {"0": -1.0, "1": 1.0}
        return SubstitutiveWeights(thue_morse(), mapping)
    if head == "file":
        return FileWeights(rest)
    if head == "freq":
        values, probs = parse_value_probs(rest)
        return FrequencyWeights(values, probs)
    raise ValidationError(f"unknown weight spec {spec!r}")


def potential_from_spec(spec: str) -> Potential:
    """'xy' | 'xy01' | 'affine:a,b,c' | path to a potential JSON file."""
    if spec == "xy":
        return xy_potential()
    if spec == "xy01":
        return Potential.from_function(binary_space(), 2, lambda x, y: x * y,
                                       BINARY_VALUES)
    if spec.startswith("affine:"):
        parts = spec[len("affine:"):].split(",")
        if len(parts) != 3:
            raise ValidationError("affine spec needs affine:a,b,c")
        a, b, c = (float(x) for x in parts)
        return affine_xy_potential(a, b, c)
    return Potential.from_file(spec)


def frequency_table_from_spec(spec: str, freq_n: int, seed: int) -> FrequencyTable:
    """Exact tables for the kinds that have one, else counting proportions."""
    head = spec.partition(":")[0]
    if head == "moebius":
        return FrequencyTable.moebius()
    if head == "constant":
        w = weight_sequence_from_spec(spec, seed)
        return FrequencyTable.single(w.value)
    if head == "freq":
        values, probs = parse_value_probs(spec.partition(":")[2])
        return FrequencyTable(values, probs, source="exact")
    return empirical_frequencies(weight_sequence_from_spec(spec, seed), freq_n)


@dataclass
class ExperimentConfig:
    """Merged view of builtin defaults, config file values and flags."""

    args: argparse.Namespace
    file_values: dict

    def get(self, key: str, fallback=None):
        flag = getattr(self.args, key, None)
        if flag is not None:
            return flag
        if key in self.file_values:
            return self.file_values[key]
        if key in DEFAULTS:
            return DEFAULTS[key]
        return fallback

    def lambda_grid(self) -> np.ndarray:
        single = self.get("lam", None)
        if single is not None:
            return np.array([float(single)])
        lo = float(self.get("lambda_min"))
        hi = float(self.get("lambda_max"))
        steps = int(self.get("lambda_steps"))
        if steps < 1 or (steps > 1 and not hi > lo):
            raise ValidationError("lambda grid must be nonempty and increasing")
        return np.linspace(lo, hi, steps)

    def horizon_n(self) -> int:
        n = int(self.get("n"))
        if n < 1:
            raise RangeError("n", n, 1, None)
        return n


def _open_output(cfg: ExperimentConfig):
    path = cfg.get("output", None)
    if path is None:
        return sys.stdout, False
    return open(path, "w"), True


def _emit(cfg: ExperimentConfig, text: str) -> None:
    fh, close = _open_output(cfg)
    try:
        fh.write(text)
        if not text.endswith("\n"):
            fh.write("\n")
    finally:
        if close:
            fh.close()


# ---------------------------------------------------------------------------
# Subcommands


def cmd_weights(cfg: ExperimentConfig) -> int:
    kind = cfg.get("kind", None)
    if kind is None:
        raise ValidationError("weights needs --kind")
    if kind == "subst":
        path = cfg.get("file", None)
        mapping = cfg.get("map", None)
        if not path or not mapping:
            raise ValidationError("subst weights need --file and --map")
        w = SubstitutiveWeights(Substitution.from_file(path),
                                parse_letter_map(mapping))
    elif kind == "constant":
        w = ConstantWeights(float(cfg.get("value", 1.0) or 1.0))
    elif kind == "iid":
        values, probs = ((-1.0, 1.0), (0.5, 0.5))
        if cfg.get("values", None):
            values, probs = parse_value_probs(cfg.get("values"))
        w = IIDWeights(seed=int(cfg.get("seed")), values=values, probs=probs)
    elif kind == "file":
        path = cfg.get("file", None)
        if not path:
            raise ValidationError("file weights need --file")
        w = FileWeights(path)
    elif kind in ("moebius", "squarefree", "tm"):
        w = weight_sequence_from_spec(kind)
    else:
        raise ValidationError(f"unknown weight kind {kind!r}")
    n = cfg.horizon_n()
    vals = w.values(n)
    if cfg.get("format") == "json":
        _emit(cfg, json.dumps({"kind": w.describe(),
                               "values": [float(v) for v in vals]}, indent=1))
    else:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["n", "w_n"])
        for i, v in enumerate(vals):
            writer.writerow([i, repr(float(v))])
        _emit(cfg, out.getvalue())
    return 0


def cmd_pressure(cfg: ExperimentConfig) -> int:
    w = weight_sequence_from_spec(cfg.get("weights", "constant"),
                                  int(cfg.get("seed")))
    pot = potential_from_spec(cfg.get("potential"))
    grid = cfg.lambda_grid()
    n = cfg.horizon_n()
    if grid.size == 1:
        lam = float(grid[0])
        psi = pressure.estimate_pressure(w, pot, lam, n)
        half = max(1, n // 2)
        gap = abs(psi - pressure.estimate_pressure(w, pot, lam, half))
        rows = [[repr(lam), repr(psi), repr(gap), n, "finite_n"]]
        if cfg.get("format") == "json":
            _emit(cfg, json.dumps({"lambda": [lam], "psi": [psi],
                                   "diag_gap": [gap], "n": n,
                                   "method": "finite_n"}, indent=1))
        else:
            out = io.StringIO()
            writer = csv.writer(out, lineterminator="\n")
            writer.writerow(["lambda", "psi", "diag_gap", "n", "method"])
            writer.writerows(rows)
            _emit(cfg, out.getvalue())
        return 0
    curve = pressure.pressure_curve(w, pot, grid, n)
    _emit(cfg, curve.to_json() if cfg.get("format") == "json" else curve.to_csv())
    return 0


def _alpha_grid(cfg: ExperimentConfig, active: float) -> np.ndarray:
    steps = int(cfg.get("alpha_steps"))
    lo = cfg.get("alpha_min", None)
    hi = cfg.get("alpha_max", None)
    margin = max(1e-3 * active, 2e-9)
    lo = -active + margin if lo is None else float(lo)
    hi = active - margin if hi is None else float(hi)
    if steps < 1 or (steps > 1 and not hi > lo):
        raise ValidationError("alpha grid must be nonempty and increasing")
    return np.linspace(lo, hi, steps)


def cmd_spectrum(cfg: ExperimentConfig) -> int:
    seed = int(cfg.get("seed"))
    spec = cfg.get("weights", "moebius")
    numeric = bool(cfg.get("numeric", False))
    if numeric:
        w = weight_sequence_from_spec(spec, seed)
        pot = potential_from_spec(cfg.get("potential"))
        curve = pressure.pressure_curve(w, pot, cfg.lambda_grid(), cfg.horizon_n())
        slopes = curve.cell_slopes()
        active = min(abs(float(slopes.min())), float(slopes.max()))
        source = curve
    else:
        ft = frequency_table_from_spec(spec, int(cfg.get("freq_n")), seed)
        active = pressure.slope_range(ft)
        source = ft
    alphas = _alpha_grid(cfg, active)
    with ThreadPoolExecutor(max_workers=8) as pool:
        points = list(pool.map(lambda a: legendre.spectrum(source, float(a)),
                               alphas))
    if cfg.get("format") == "json":
        _emit(cfg, legendre.spectrum_json(points))
    else:
        _emit(cfg, legendre.write_spectrum_csv(points))
    return 0


def cmd_gibbs(cfg: ExperimentConfig) -> int:
    w = weight_sequence_from_spec(cfg.get("weights", "constant"),
                                  int(cfg.get("seed")))
    lam = float(cfg.get("lam", 1.0) or 1.0)
    length = int(cfg.get("length"))
    count = int(cfg.get("paths"))
    chain = gibbs_mod.InhomMarkov(lam, w, horizon=max(length, 2))
    sample = chain.sample_paths(length=length, count=count,
                                seed=int(cfg.get("seed")))
    if cfg.get("format") == "json":
        _emit(cfg, json.dumps(sample.summary(), indent=1))
    else:
        _emit(cfg, sample.to_csv())
    return 0


def cmd_returnwords(cfg: ExperimentConfig) -> int:
    w = weight_sequence_from_spec(cfg.get("weights", "tm"), int(cfg.get("seed")))
    horizon = int(cfg.get("horizon"))
    prefix_len = int(cfg.get("prefix_len"))
    seq = tuple(float(v) for v in w.values(horizon))
    dec = returnwords.decompose(seq, seq[:prefix_len], horizon)
    # decompositions are naturally nested; JSON unless CSV was asked for
    fmt = getattr(cfg.args, "format", None) or cfg.file_values.get("format", "json")
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["word", "length", "frequency"])
        for word, p in zip(dec.freqs.values, dec.freqs.freqs):
            writer.writerow(["|".join(repr(v) for v in word), len(word), repr(p)])
        _emit(cfg, out.getvalue())
    else:
        _emit(cfg, dec.to_json())
    return 0


# ---------------------------------------------------------------------------
# Verification suite


def _check_partition(pot: Potential) -> tuple[float, bool, str]:
    rng = np.random.default_rng(1234)
    xy = xy_potential()
    worst = 0.0
    for _ in range(30):
        r = int(rng.integers(2, 4))
        n = int(rng.integers(1, 9))
        space = xy.space
        table = {space.word_of_index(i, r): float(v)
                 for i, v in enumerate(rng.uniform(-1, 1, 2 ** r))}
        p = Potential(space, r, table)
        w = IIDWeights(seed=int(rng.integers(0, 2 ** 31)), values=(-1.0, 1.0))
        lam = float(rng.uniform(-3, 3))
        a = transfer_log_partition(w, p, lam, n).log_z
        b = exact_partition(w, p, lam, n).log_z
        worst = max(worst, abs(a - b) / max(1.0, abs(b)))
    ok = worst <= 1e-12
    # product identity on the configured potential; breaks if the table
    # deviates from f(x, y) = x*y
    ident_worst = 0.0
    for lam in (0.5, 1.5):
        got = transfer_log_partition(ConstantWeights(1.0), pot, lam, 64).log_z / 64
        want = pressure.closed_form_pressure(FrequencyTable.single(1.0), lam) \
            - math.log(2.0)
        ident_worst = max(ident_worst, abs(got - want))
    ok = ok and ident_worst <= 1e-10
    return max(worst, ident_worst), ok, "exact vs transfer + product identity"


def _check_fenchel_young() -> tuple[float, bool, str]:
    curve = pressure.closed_form_curve(FrequencyTable.moebius())
    s = pressure.slope_range(FrequencyTable.moebius())
    worst = -math.inf
    for alpha in np.linspace(-s + 1e-3, s - 1e-3, 41):
        star = legendre.conjugate(curve, float(alpha))
        worst = max(worst, float(
            (alpha * curve.lambdas - curve.psi - star).max()
        ))
    return worst, worst <= 1e-9, "max Fenchel-Young violation"


def _check_duality() -> tuple[float, bool, str]:
    ft = FrequencyTable.moebius()
    s = pressure.slope_range(ft)
    alphas = np.linspace(-s, s, 103)[1:-1]
    worst = 0.0
    for alpha in alphas:
        a = float(alpha)
        worst = max(worst, abs(legendre.mobius_spectrum(a)
                               - legendre.spectrum(ft, a).dim_lower))
    return worst, worst <= 1e-10, "generic vs closed-form spectrum"


def _check_gibbs() -> tuple[float, bool, str]:
    import itertools

    worst = 0.0
    p = xy_potential()
    for weights in (MoebiusWeights(), ConstantWeights(1.0)):
        for lam in (0.5, 1.0, 2.0):
            n = 8
            chain = gibbs_mod.InhomMarkov(lam, weights, horizon=n)
            log_z = exact_partition(weights, p, lam, n).log_z
            w = weights.values(n)
            for word in itertools.product((-1, 1), repeat=n + 1):
                x = np.array(word)
                srt = float((w * x[:-1] * x[1:]).sum())
                lhs = chain.log_cylinder_measure(word) \
                    + (n + 1) * math.log(2.0) + log_z
                worst = max(worst, abs(lhs - lam * srt) / max(1.0, abs(lam * srt)))
    return worst, worst <= 1e-12, "cylinder Gibbs identity"


def _check_thue_morse() -> tuple[float, bool, str]:
    x = fixed_point_prefix(thue_morse(), 1 << 12)
    ok = returnwords.return_words(x, "0", 1 << 12) == {"0", "01", "011"}
    ok = ok and returnwords.return_words(x, "01", 1 << 12) == {
        "01", "010", "011", "0110"
    }
    return 0.0, ok, "return-word set equalities"


def cmd_verify(cfg: ExperimentConfig) -> int:
    pot = potential_from_spec(cfg.get("potential"))
    checks = {
        "partition": lambda: _check_partition(pot),
        "fenchel-young": _check_fenchel_young,
        "duality": _check_duality,
        "gibbs": _check_gibbs,
        "thue-morse": _check_thue_morse,
    }
    only = cfg.get("only", None)
    failed = False
    lines = []
    for name, fn in checks.items():
        if only and only not in name:
            continue
        err, ok, what = fn()
        failed = failed or not ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {what} "
                     f"(measured {err:.3e})")
    if not lines:
        raise ValidationError(f"--only {only!r} matches no check")
    _emit(cfg, "\n".join(lines))
    return VERIFY_EXIT if failed else 0


# ---------------------------------------------------------------------------
# Entry point


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="thermosym",
                     description="Pressure, spectra and Gibbs measures for "
                                 "weighted averages on symbolic dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override it")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--output", help="write to file instead of stdout")
        p.add_argument("--seed", type=int)

    w = sub.add_parser("weights", help="emit the first n weights")
    common(w)
    w.add_argument("--kind",
                   choices=("constant", "moebius", "squarefree", "iid",
                            "subst", "file", "tm"))
    w.add_argument("--value", type=float, help="constant value")
    w.add_argument("--values", help="iid values, e.g. -1@0.5,1@0.5")
    w.add_argument("--file", help="substitution or weight file")
    w.add_argument("--map", help="letter map, e.g. 0=-1,1=1")
    w.add_argument("--n", type=int)

    pr = sub.add_parser("pressure", help="finite-n pressure curve")
    common(pr)
    pr.add_argument("--weights")
    pr.add_argument("--potential")
    pr.add_argument("--lambda", dest="lam", type=float)
    pr.add_argument("--lambda-min", dest="lambda_min", type=float)
    pr.add_argument("--lambda-max", dest="lambda_max", type=float)
    pr.add_argument("--lambda-steps", dest="lambda_steps", type=int)
    pr.add_argument("--n", type=int)

    spct = sub.add_parser("spectrum", help="dimension spectrum over alpha")
    common(spct)
    spct.add_argument("--weights")
    spct.add_argument("--potential")
    mode = spct.add_mutually_exclusive_group()
    mode.add_argument("--closed-form", dest="closed_form", action="store_true",
                      default=None)
    mode.add_argument("--numeric", action="store_true", default=None)
    spct.add_argument("--alpha-min", dest="alpha_min", type=float)
    spct.add_argument("--alpha-max", dest="alpha_max", type=float)
    spct.add_argument("--alpha-steps", dest="alpha_steps", type=int)
    spct.add_argument("--lambda-min", dest="lambda_min", type=float)
    spct.add_argument("--lambda-max", dest="lambda_max", type=float)
    spct.add_argument("--lambda-steps", dest="lambda_steps", type=int)
    spct.add_argument("--n", type=int)
    spct.add_argument("--freq-n", dest="freq_n", type=int)

    g = sub.add_parser("gibbs", help="sample the Markov-Gibbs chain")
    common(g)
    g.add_argument("--weights")
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--length", type=int)
    g.add_argument("--paths", type=int)

    rw = sub.add_parser("returnwords", help="return-word decomposition")
    common(rw)
    rw.add_argument("--weights")
    rw.add_argument("--prefix-len", dest="prefix_len", type=int)
    rw.add_argument("--horizon", type=int)

    v = sub.add_parser("verify", help="run the oracle verification suite")
    common(v)
    v.add_argument("--potential")
    v.add_argument("--only", help="run only checks whose name contains this")
    return parser


COMMANDS = {
    "weights": cmd_weights,
    "pressure": cmd_pressure,
    "spectrum": cmd_spectrum,
    "gibbs": cmd_gibbs,
    "returnwords": cmd_returnwords,
    "verify": cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    file_values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                file_values = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            print(f"thermosym: bad config file: {exc}", file=sys.stderr)
            return USAGE_EXIT
    cfg = ExperimentConfig(args=args, file_values=file_values)
    try:
        return COMMANDS[args.command](cfg)
    except RangeError as exc:
        print(f"thermosym: range error: {exc}", file=sys.stderr)
        return RANGE_EXIT
    except (ValidationError, OSError) as exc:
        print(f"thermosym: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except ThermosymError as exc:
        print(f"thermosym: {exc}", file=sys.stderr)
        return RANGE_EXIT


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
