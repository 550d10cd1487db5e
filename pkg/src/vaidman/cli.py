"""Command-line entry point: ``vaidman {sweep,classical,verify,qss}``.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import sys
from typing import Iterator, TextIO

import numpy as np

from . import entanglement as ent
from . import games, noise, qss, verify
from .qstate import make_ghz_general, make_w_general, make_wn

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SWEEP_TARGETS = {
    "ghz_game": "GHZ-family win probability against three-tangle",
    "w_game": "W-family win probability against concurrence sum",
    "wn_game": "W_n win probability against n and concurrence sum",
    "rulemaker_w": "rule-maker game with a W state against lambda",
    "rulemaker_ghz": "rule-maker game with a GHZ state against lambda",
    "noise": "noisy rule-maker game, simulated and closed form",
    "rulemaker_4q": "four-qubit rule-maker game against lambda",
}


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{float(x):.12g}"


@contextlib.contextmanager
def _output(path: str | None) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", newline="")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc
    with fh:
        yield fh


# --- sweep -------------------------------------------------------------------------


def sweep_rows(target: str, grid: int, n_max: int = 20) -> tuple[list[str], list[list[str]]]:
    if grid < 2:
        raise UsageError("--grid must be at least 2")
    if target == "ghz_game":
        g = games.vaidman_ghz_game()
        rows = []
        for t in np.linspace(0, np.pi / 4, grid):
            st = make_ghz_general(t)
            rows.append([fmt(t), fmt(ent.three_tangle(st).tau), fmt(games.quantum_win_probability(st, g)), fmt(0.75)])
        return ["theta", "tau", "quantum_win", "classical_bound"], rows
    if target == "w_game":
        g = games.vaidman_w_game()
        rows = []
        m = grid - 1
        # lattice on the squared amplitudes, which lie on the unit simplex
        for i in range(m + 1):
            for j in range(m + 1 - i):
                a, b, c = np.sqrt(np.array([i, j, m - i - j]) / m)
                st = make_w_general(a, b, c)
                rows.append([fmt(v) for v in (a, b, c, ent.residual_concurrence_sum(st), games.quantum_win_probability(st, g))])
        return ["a", "b", "c", "concurrence_sum", "win"], rows
    if target == "wn_game":
        if n_max < 1:
            raise UsageError("--n-max must be at least 1")
        g = games.vaidman_w_game()
        rows = []
        for n in range(1, n_max + 1):
            st = make_wn(n)
            rows.append([str(n), fmt(ent.residual_concurrence_sum(st)), fmt(games.quantum_win_probability(st, g))])
        return ["n", "concurrence_sum", "win"], rows
    if target in ("rulemaker_w", "rulemaker_ghz", "rulemaker_4q"):
        evaluate = {
            "rulemaker_w": lambda l: games.rulemaker_win_probability(games.rulemaker_w_spec(l)),
            "rulemaker_ghz": lambda l: games.rulemaker_win_probability(games.rulemaker_ghz_spec(l)),
            "rulemaker_4q": games.rulemaker_4qubit_game,
        }[target]
        return ["lambda", "win"], [[fmt(l), fmt(evaluate(l))] for l in np.linspace(0, np.pi / 2, grid)]
    if target == "noise":
        report = noise.verify_noise_formulas(grid, conventions=("affine",))
        lines = list(csv.reader(report.to_csv().splitlines()))
        return lines[0], lines[1:]
    raise UsageError(f"unknown sweep target {target!r}; see 'sweep --list'")


def cmd_sweep(args) -> int:
    if args.list:
        for name, desc in SWEEP_TARGETS.items():
            print(f"{name:14s} {desc}")
        return EXIT_OK
    if args.target is None:
        raise UsageError("sweep needs --target (or --list)")
    header, rows = sweep_rows(args.target, args.grid, args.n_max)
    with _output(args.out) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return EXIT_OK


# --- classical ----------------------------------------------------------------------


def classical_report(game_id: str) -> tuple[str, bool]:
    try:
        g = games.game_by_id(game_id)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    value, strategy = games.classical_max_win(g)
    reported = games.REFERENCE_CLASSICAL[game_id]
    match = abs(float(value) - reported) <= verify.PRINTED_DECIMAL_TOL
    lines = [
        f"game: {game_id} ({g.n_players} players, {len(g.rounds)} question tuples)",
        f"classical maximum: {value} = {float(value):.6f}",
        f"reported: {reported} -> {'MATCH' if match else 'DISCREPANCY'}",
        f"n-tangle threshold (2c-1)^2: {games.tau_threshold(value):.4f}",
        "argmax strategy:",
        strategy.table(),
    ]
    return "\n".join(lines) + "\n", match


def cmd_classical(args) -> int:
    ids = games.GAME_IDS if args.game == "all" else [args.game]
    with _output(args.out) as fh:
        for gid in ids:
            text, _ = classical_report(gid)
            fh.write(text)
            if args.spec:
                fh.write(games.format_game_spec(games.game_by_id(gid)))
            if len(ids) > 1:
                fh.write("\n")
    return EXIT_OK


# --- verify ----------------------------------------------------------------------------


def cmd_verify(args) -> int:
    try:
        checks = verify.run_checks(args.tolerance, args.grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    with _output(args.out) as fh:
        for c in checks:
            extra = f"  ({c.detail})" if c.detail else ""
            fh.write(f"{c.status:6s} {c.name:48s} max_dev={c.max_dev:.3e} tol={c.tolerance:.1e}{extra}\n")
        ok = verify.all_passed(checks)
        failed = sum(c.status == "FAIL" for c in checks)
        waived = sum(c.status == "WAIVED" for c in checks)
        fh.write(f"{len(checks)} checks, {failed} failed, {waived} waived -> {'OK' if ok else 'FAILED'}\n")
    return EXIT_OK if ok else EXIT_FAIL


# --- qss ---------------------------------------------------------------------------------


def cmd_qss(args) -> int:
    if args.rounds < 1:
        raise UsageError("--rounds must be positive")
    if args.protocol == "basic":
        if args.cheat != "honest":
            raise UsageError("the basic protocol has no cheat models")
        result = qss.run_basic_qss(args.rounds, args.seed)
    else:
        try:
            cheat = qss.CheatModel.parse(args.cheat)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        cfg = qss.SessionConfig(args.rounds, args.state, cheat, args.seed)
        result = qss.run_facilitated(cfg)
    if args.transcript:
        with _output(args.transcript) as fh:
            fh.write(result.to_csv())
    label = "inference agreement" if result.protocol == "basic" else "compliance rate"
    print(f"protocol: {result.protocol} ({result.state_kind})")
    print(f"rounds: {args.rounds}  sifted fraction: {result.sifted_fraction:.6f}")
    print(f"{label}: {result.compliance_rate:.6f} over {result.checked_rounds} rounds (threshold {result.threshold:.6f})")
    print(f"key length: {len(result.key_bits)}")
    print(f"verdict: {result.verdict}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vaidman", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sweep", help="emit plot data as CSV")
    s.add_argument("--target", choices=sorted(SWEEP_TARGETS))
    s.add_argument("--grid", type=int, default=101)
    s.add_argument("--n-max", type=int, default=20)
    s.add_argument("--out")
    s.add_argument("--list", action="store_true", help="describe every sweep target")
    s.set_defaults(func=cmd_sweep)

    c = sub.add_parser("classical", help="exhaustive classical bound of a game")
    c.add_argument("game", choices=list(games.GAME_IDS) + ["all"])
    c.add_argument("--spec", action="store_true", help="also print the game in line format")
    c.add_argument("--out")
    c.set_defaults(func=cmd_classical)

    v = sub.add_parser("verify", help="run every closed-form versus oracle check")
    v.add_argument("--tolerance", type=float, default=1e-9)
    v.add_argument("--grid", type=int, default=101)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)

    q = sub.add_parser("qss", help="simulate a secret-sharing session")
    q.add_argument("protocol", choices=["basic", "facilitated"])
    q.add_argument("--state", choices=["W", "GHZ"], default="W")
    q.add_argument("--rounds", type=int, default=10000)
    q.add_argument("--cheat", default="honest", help="honest, random:<party> or flip:<party>")
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--transcript", help="write the round transcript CSV here")
    q.set_defaults(func=cmd_qss)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"vaidman: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
