"""Command-line interface: ``strategem validate | fidelity | norm | cheat-bounds | simulate | check``.

Exit codes: 0 success, 1 invalid input or failed check, 2 parse or I/O error.
"""

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Any, List, Optional

import numpy as np

from .linalg import DimensionError
from .registers import RoundShape
from .sdp import SolverError
from .strategies import (IncompatibleError, PureCoStrategy, PureStrategy, TOL_FEAS, as_purification,
                         costrategy_choi, purification_from_choi, reduced_final_state, strategy_choi,
                         validate_costrategy, validate_strategy)

KINDS = ("pure_strategy", "pure_costrategy", "choi_strategy", "choi_costrategy")
EXIT_OK, EXIT_INVALID, EXIT_PARSE = 0, 1, 2


class ParseError(ValueError):
    pass


class InvalidError(ValueError):
    pass


# --- file format ---------------------------------------------------------------------


def encode_complex(a) -> list:
    """Nested lists with every entry as an ``[re, im]`` pair, row-major."""
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def decode_complex(obj, ndim: int, what: str = "array") -> np.ndarray:
    try:
        a = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{what}: not a rectangular numeric array ({exc})") from None
    if a.ndim != ndim + 1 or a.shape[-1] != 2:
        raise ParseError(f"{what}: expected a {ndim}-d array of [re, im] pairs, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ParseError(f"{what}: non-finite entries")
    return a[..., 0] + 1j * a[..., 1]


@dataclass
class StrategyFile:
    kind: str
    shape: RoundShape
    matrices: List[np.ndarray]
    memory_dims: Optional[tuple] = None
    initial_state: Optional[np.ndarray] = None
    metadata: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "shape": self.shape.to_dict()}
        if self.memory_dims is not None:
            out["memory_dims"] = list(self.memory_dims)
        if self.initial_state is not None:
            out["initial_state"] = encode_complex(self.initial_state)
        out["matrices"] = [encode_complex(m) for m in self.matrices]
        out["metadata"] = dict(self.metadata)
        return out

    @classmethod
    def from_json(cls, d: Any) -> "StrategyFile":
        if not isinstance(d, dict):
            raise ParseError("top level must be a JSON object")
        kind = d.get("kind")
        if kind not in KINDS:
            raise ParseError(f"kind must be one of {KINDS}, got {kind!r}")
        try:
            shape = RoundShape.from_dict(d["shape"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad shape: {exc}") from None
        mats = d.get("matrices")
        if not isinstance(mats, list) or not mats:
            raise ParseError("matrices must be a non-empty list")
        matrices = [decode_complex(m, 2, f"matrices[{i}]") for i, m in enumerate(mats)]
        mem = d.get("memory_dims")
        if kind.startswith("pure"):
            if not isinstance(mem, list) or not all(isinstance(z, int) and z > 0 for z in mem):
                raise ParseError("pure kinds need memory_dims as a list of positive integers")
            mem = tuple(mem)
        init = None
        if kind == "pure_costrategy":
            if "initial_state" not in d:
                raise ParseError("pure_costrategy needs initial_state")
            init = decode_complex(d["initial_state"], 1, "initial_state")
        meta = d.get("metadata", {})
        if not isinstance(meta, dict):
            raise ParseError("metadata must be an object")
        return cls(kind, shape, matrices, mem, init, meta)

    def build(self):
        """The represented object; raises :class:`InvalidError` if it is not well formed."""
        try:
            if self.kind == "pure_strategy":
                return PureStrategy(self.shape, self.memory_dims, tuple(self.matrices))
            if self.kind == "pure_costrategy":
                return PureCoStrategy(self.shape, self.memory_dims, self.initial_state,
                                      tuple(self.matrices))
            if len(self.matrices) != 1:
                raise InvalidError("Choi kinds carry exactly one matrix")
            m = self.matrices[0]
            if m.shape != (self.shape.choi_dim,) * 2:
                raise InvalidError(f"Choi matrix of shape {m.shape} does not match {self.shape}")
            return m
        except (ValueError, DimensionError) as exc:
            if isinstance(exc, InvalidError):
                raise
            raise InvalidError(str(exc)) from None


def load_strategy_file(path: str) -> StrategyFile:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from None
    return StrategyFile.from_json(d)


def save_strategy_file(sf: StrategyFile, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(sf.to_json(), fh, indent=1)
        fh.write("\n")


def strategy_to_file(a, metadata: dict = None) -> StrategyFile:
    if isinstance(a, PureStrategy):
        return StrategyFile("pure_strategy", a.shape, list(a.isometries), tuple(a.memory_dims),
                            metadata=metadata or {})
    if isinstance(a, PureCoStrategy):
        return StrategyFile("pure_costrategy", a.shape, list(a.isometries), tuple(a.memory_dims),
                            a.initial_state, metadata or {})
    raise TypeError(f"cannot encode {type(a).__name__}")


def _load_strategy(path: str):
    """A purification from a strategy file, after validation."""
    sf = load_strategy_file(path)
    obj = sf.build()
    if sf.kind == "pure_strategy":
        return as_purification(obj)
    if sf.kind == "choi_strategy":
        rep = validate_strategy(obj, sf.shape)
        if not rep.valid:
            raise InvalidError(f"{path}: not a valid strategy (worst residual {rep.worst():.2e})")
        return purification_from_choi(obj, sf.shape)
    raise InvalidError(f"{path}: expected a strategy, found {sf.kind}")


# --- output --------------------------------------------------------------------------


def _emit(args, data: dict, lines: List[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(data, sort_keys=True))
    else:
        for line in lines:
            print(line)


# --- commands ------------------------------------------------------------------------


def cmd_validate(args) -> int:
    sf = load_strategy_file(args.path)
    try:
        obj = sf.build()
    except InvalidError as exc:
        _emit(args, {"kind": sf.kind, "valid": False, "error": str(exc)},
              [f"{sf.kind}: INVALID ({exc})"])
        return EXIT_INVALID
    if sf.kind == "pure_strategy":
        rep = validate_strategy(strategy_choi(obj).matrix, sf.shape, args.tol)
    elif sf.kind == "pure_costrategy":
        rep = validate_costrategy(costrategy_choi(obj).matrix, sf.shape, args.tol)
    elif sf.kind == "choi_strategy":
        rep = validate_strategy(obj, sf.shape, args.tol)
    else:
        rep = validate_costrategy(obj, sf.shape, args.tol)
    _emit(args, {"kind": sf.kind, "valid": rep.valid, "tol": rep.tol,
                 "residuals": {k: float(v) for k, v in rep.residuals.items()}}, rep.lines())
    return EXIT_OK if rep.valid else EXIT_INVALID


def cmd_fidelity(args) -> int:
    from .fidelity import strategy_fidelity, strategy_fidelity_oracle

    s, t = _load_strategy(args.s), _load_strategy(args.t)
    res = strategy_fidelity(s, t)
    data = {"fidelity": res.value, "fidelity_squared": res.value ** 2, "k_norm": res.k_norm,
            "duality_gap": res.solver.gap, "status": res.solver.status, "backend": res.solver.backend}
    lines = [f"F      = {res.value:.6f}", f"F^2    = {res.value ** 2:.6f}",
             f"||K||  = {res.k_norm:.6f}", f"gap    = {res.solver.gap:.3e} ({res.solver.backend})"]
    code = EXIT_OK
    if args.oracle:
        br = strategy_fidelity_oracle(s, t, budget=args.budget, seed=args.seed)
        agree = br.contains(res.value, args.tol)
        data.update({"oracle_lower": br.lower, "oracle_upper": br.upper, "oracle_width": br.width,
                     "oracle_agrees": agree})
        lines += [f"oracle = [{br.lower:.6f}, {br.upper:.6f}] width {max(br.width, 0.0):.2e}",
                  f"verdict: {'SDP value inside bracket' if agree else 'SDP value OUTSIDE bracket'}"]
        code = EXIT_OK if agree else EXIT_INVALID
    _emit(args, data, lines)
    return code


def cmd_norm(args) -> int:
    from .norm import strategy_distance

    s, t = _load_strategy(args.s), _load_strategy(args.t)
    res = strategy_distance(s, t)
    _emit(args, {"norm": res.value, "bias": res.bias, "duality_gap": res.solver.gap,
                 "backend": res.solver.backend},
          [f"||S - T|| = {res.value:.6f}", f"bias      = {res.bias:.6f}",
           f"gap       = {res.solver.gap:.3e} ({res.solver.backend})"])
    return EXIT_OK


def cmd_cheat_bounds(args) -> int:
    from .crypto import cheat_bounds

    a0, a1 = _load_strategy(args.a0), _load_strategy(args.a1)
    rep = cheat_bounds(a0, a1, args.task, slack=args.tol)
    lines = [f"task                 {rep.task.upper()}",
             f"fidelity             {rep.fidelity:.6f}",
             f"Alice cheat >=       {rep.alice_lower_bound:.6f}",
             f"Bob cheat >=         {rep.bob_cheat:.6f}",
             f"trade-off lhs        {rep.tradeoff_lhs:.6f}  (>= 2: {'yes' if rep.tradeoff_holds else 'NO'})",
             f"max cheater          {rep.max_cheater:.6f}  (>= {rep.constant_bound:.6f}: "
             f"{'yes' if rep.constant_holds else 'NO'})"]
    _emit(args, rep.to_dict(), lines)
    return EXIT_OK if rep.tradeoff_holds and rep.constant_holds else EXIT_INVALID


def cmd_simulate(args) -> int:
    sa = load_strategy_file(args.a)
    sb = load_strategy_file(args.b)
    if sb.kind != "pure_costrategy":
        raise InvalidError(f"{args.b}: expected a pure_costrategy, found {sb.kind}")
    a = _load_strategy(args.a) if sa.kind != "pure_strategy" else sa.build()
    b = sb.build()
    if as_purification(a).shape != b.shape:
        raise IncompatibleError(f"shapes differ: {as_purification(a).shape} vs {b.shape}")
    rho = reduced_final_state(a, b)
    overlap = float(np.real(np.trace(costrategy_choi(b).matrix @ strategy_choi(a).matrix)))
    data = {"dimension": int(rho.shape[0]), "trace": float(np.real(np.trace(rho))),
            "choi_pairing": overlap, "state": encode_complex(rho)}
    lines = [f"reduced final state on W ({rho.shape[0]}x{rho.shape[0]}), trace {np.real(np.trace(rho)):.6f}"]
    with np.printoptions(precision=6, suppress=True, linewidth=120):
        lines += str(rho).splitlines()
    lines.append(f"<B, S> = {overlap:.6f}")
    _emit(args, data, lines)
    return EXIT_OK


def _random_pair(shape, rng):
    from .strategies import random_pure_strategy

    return random_pure_strategy(shape, seed=rng), random_pure_strategy(shape, seed=rng)


def _random_shape(rng) -> RoundShape:
    r = int(rng.integers(1, 3))
    return RoundShape(tuple(int(v) for v in rng.integers(1, 3, r)),
                      tuple(int(v) for v in rng.integers(1, 3, r)))


def cmd_check(args) -> int:
    from .fidelity import fvdg_check, joint_concavity_check
    from .supermaps import (monotonicity_check_fidelity, monotonicity_check_norm,
                            random_composition_supermap)

    suites = ["fvdg", "monotonicity", "concavity"] if args.suite == "all" else [args.suite]
    rng = np.random.default_rng(args.seed)
    results, lines = {}, []
    for suite in suites:
        passed, failures = 0, []
        for trial in range(args.trials):
            shape = _random_shape(rng)
            try:
                if suite == "fvdg":
                    s, t = _random_pair(shape, rng)
                    fvdg_check(s, t, slack=args.tol)
                elif suite == "monotonicity":
                    s, t = _random_pair(shape, rng)
                    u = random_composition_supermap(shape, seed=rng)
                    monotonicity_check_fidelity(u, s, t, slack=max(args.tol, 1e-5))
                    h = strategy_choi(s).matrix - strategy_choi(t).matrix
                    monotonicity_check_norm(u, h, slack=max(args.tol, 1e-5))
                else:
                    pairs = [_random_pair(shape, rng) for _ in range(2)]
                    w = float(rng.uniform(0.1, 0.9))
                    joint_concavity_check(pairs, [w, 1 - w], slack=args.tol)
                passed += 1
            except (AssertionError, SolverError) as exc:
                failures.append(f"trial {trial} {shape.x_dims}/{shape.y_dims}: {exc}")
        results[suite] = {"trials": args.trials, "passed": passed, "failures": failures}
        lines.append(f"{suite:<13s} {passed}/{args.trials} {'PASS' if passed == args.trials else 'FAIL'}")
        lines += ["  " + f for f in failures]
    ok = all(r["passed"] == r["trials"] for r in results.values())
    _emit(args, {"seed": args.seed, "ok": ok, "suites": results}, lines)
    return EXIT_OK if ok else EXIT_INVALID


# --- entry point ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="strategem", description="Strategy fidelity and norm toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, tol=True):
        sp.add_argument("--json", action="store_true", help="emit one JSON object")
        if tol:
            sp.add_argument("--tol", type=float, default=1e-6, help="tolerance for verdicts")

    v = sub.add_parser("validate", help="check a strategy or co-strategy file")
    v.add_argument("path")
    v.add_argument("--json", action="store_true")
    v.add_argument("--tol", type=float, default=TOL_FEAS, help="feasibility tolerance")
    v.set_defaults(func=cmd_validate)

    f = sub.add_parser("fidelity", help="strategy fidelity of two strategies")
    f.add_argument("s")
    f.add_argument("t")
    f.add_argument("--seed", type=int, default=0)
    f.add_argument("--oracle", action="store_true", help="also bracket the value independently")
    f.add_argument("--budget", type=int, default=40, help="oracle evaluations of phi(K)")
    common(f)
    f.set_defaults(func=cmd_fidelity)

    n = sub.add_parser("norm", help="strategy norm of the difference of two strategies")
    n.add_argument("s")
    n.add_argument("t")
    common(n, tol=False)
    n.set_defaults(func=cmd_norm)

    c = sub.add_parser("cheat-bounds", help="bit-commitment / oblivious-transfer cheating bounds")
    c.add_argument("a0")
    c.add_argument("a1")
    c.add_argument("--task", choices=["bc", "ot"], default="bc")
    common(c)
    c.set_defaults(func=cmd_cheat_bounds)

    s = sub.add_parser("simulate", help="play a strategy against a co-strategy")
    s.add_argument("a")
    s.add_argument("b")
    common(s, tol=False)
    s.set_defaults(func=cmd_simulate)

    k = sub.add_parser("check", help="randomized property suites")
    k.add_argument("--suite", choices=["fvdg", "monotonicity", "concavity", "all"], default="all")
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--trials", type=int, default=10)
    common(k)
    k.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidError, IncompatibleError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
