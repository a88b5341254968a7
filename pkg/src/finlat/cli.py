"""File-based command line front door.

Lattices travel as JSON objects {"name": str, "elements": [str, ...],
"covers": [[lower, upper], ...]}, optionally carrying {"sub": [str, ...]}
for sublattice-bearing commands.  Reports are JSON on stdout; human
progress lines go to stderr.  Exit codes: 0 success, 1 domain error,
2 refuted verification.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass

from . import chains, core, grids, oracle, retractions, slim

__all__ = ["ParseError", "LatticeFile", "parse_lattice_file", "run", "main"]


class ParseError(core.LatticeError):
    pass


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # keep argparse from exiting the process
        raise _CliError(message)


@dataclass
class LatticeFile:
    """A named lattice presentation, optionally with a marked subset."""

    name: str
    lattice: core.FiniteLattice
    sub: tuple[str, ...] | None = None

    @classmethod
    def parse(cls, data: bytes) -> "LatticeFile":
        try:
            obj = json.loads(data.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise ParseError(f"not UTF-8: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise ParseError("top level must be an object")
        name = obj.get("name", "")
        if not isinstance(name, str):
            raise ParseError("name must be a string")
        elements = obj.get("elements")
        covers = obj.get("covers")
        if not isinstance(elements, list) or not all(isinstance(e, str) for e in elements):
            raise ParseError("elements must be a list of strings")
        if not isinstance(covers, list) or not all(
            isinstance(c, list) and len(c) == 2 and all(isinstance(e, str) for e in c)
            for c in covers
        ):
            raise ParseError("covers must be a list of [lower, upper] string pairs")
        sub = obj.get("sub")
        if sub is not None:
            if not isinstance(sub, list) or not all(isinstance(e, str) for e in sub):
                raise ParseError("sub must be a list of strings")
            sub = tuple(sub)
        lattice = core.build_lattice(elements, [tuple(c) for c in covers])
        return cls(name=name, lattice=lattice, sub=sub)


def parse_lattice_file(data: bytes) -> core.FiniteLattice:
    """Parse a lattice file, preserving identifiers."""
    return LatticeFile.parse(data).lattice


def lattice_to_jsonable(name: str, lattice: core.FiniteLattice, sub=None) -> dict:
    out = {
        "name": name,
        "elements": list(lattice.elements),
        "covers": sorted([lo, hi] for lo, hi in lattice.covers),
    }
    if sub is not None:
        out["sub"] = sorted(sub)
    return out


def _read_file(path: str) -> bytes:
    try:
        with open(path, "rb") as handle:
            return handle.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _read_json(path: str):
    try:
        return json.loads(_read_file(path).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def _load(path: str) -> LatticeFile:
    return LatticeFile.parse(_read_file(path))


def _load_sub(args, main: LatticeFile) -> tuple[str, ...]:
    if getattr(args, "sub", None):
        obj = _read_json(args.sub)
        if isinstance(obj, list):
            return tuple(str(x) for x in obj)
        if isinstance(obj, dict) and isinstance(obj.get("sub"), list):
            return tuple(str(x) for x in obj["sub"])
        raise ParseError("sub file must be a JSON list or an object with a sub field")
    if main.sub is not None:
        return main.sub
    raise ParseError("no sublattice given: pass --sub or embed a sub field")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_analyze(args) -> tuple[dict, int]:
    lf = _load(args.file)
    report = core.classify_properties(lf.lattice)
    return (
        {
            "command": "analyze",
            "name": lf.name,
            "properties": {
                "distributive": report.distributive,
                "semimodular": report.semimodular,
                "boolean": report.boolean,
                "slim": report.slim,
                "length": report.length,
                "join_irreducible_count": report.join_irreducible_count,
            },
        },
        0,
    )


def _cmd_dim(args) -> tuple[dict, int]:
    lf = _load(args.file)
    return (
        {"command": "dim", "name": lf.name, "dimension": chains.order_dimension(lf.lattice)},
        0,
    )


def _cmd_embed_grid(args) -> tuple[dict, int]:
    lf = _load(args.file)
    emb = chains.grid_embed(lf.lattice)
    target_name = "grid-" + "x".join(str(s) for s in emb.target.factor_sizes)
    return (
        {
            "command": "embed-grid",
            "name": lf.name,
            "factor_sizes": list(emb.target.factor_sizes),
            "target": lattice_to_jsonable(target_name, emb.target.lattice),
            "map": dict(sorted(emb.mapping.items())),
            "coordinate_chains": [list(c) for c in emb.coordinate_chains],
        },
        0,
    )


def _cmd_retract(args) -> tuple[dict, int]:
    lf = _load(args.file)
    sub = _load_sub(args, lf)
    if not core.check_sublattice(lf.lattice, sub):
        raise core.NotASublattice(f"{sorted(sub)!r} is not a sublattice")
    hom, nodes = oracle.search_retraction(lf.lattice, sub)
    if hom is None:
        return (
            {
                "command": "retract",
                "name": lf.name,
                "retraction_exists": False,
                "search_nodes": nodes,
            },
            2,
        )
    return (
        {
            "command": "retract",
            "name": lf.name,
            "retraction_exists": True,
            "map": dict(sorted(hom.mapping.items())),
            "search_nodes": nodes,
        },
        0,
    )


def _cmd_classify(args) -> tuple[dict, int]:
    lf = _load(args.file)
    cls = retractions.ClassId.parse(args.klass)
    verdict = retractions.classify_absolute_retract(lf.lattice, cls)
    payload: dict = {
        "command": "classify",
        "name": lf.name,
        "class": str(cls),
        "verdict": "absolute-retract" if verdict.is_absolute_retract else "not-absolute-retract",
    }
    if not verdict.is_absolute_retract:
        witness: dict = {
            "case": verdict.case,
            "lattice": lattice_to_jsonable(f"{lf.name}-witness", verdict.witness),
            "embedding": dict(sorted(verdict.embedding.items())),
        }
        if verdict.certificate is not None:
            witness["certificate"] = {
                "proper": verdict.certificate.proper,
                "is_cover01": verdict.certificate.cover01.is_cover01,
                "is_embedding": verdict.certificate.cover01.is_embedding,
                "lengths_equal": verdict.certificate.cover01.lengths_equal,
                "oracle_confirmed": verdict.certificate.oracle_confirmed,
            }
        if verdict.search_nodes is not None:
            witness["search_nodes"] = verdict.search_nodes
        payload["witness"] = witness
    return payload, 0


def _cmd_witness_sps(args) -> tuple[dict, int]:
    lf = _load(args.file)
    script = None
    if args.forks:
        script = slim.ForkScript.from_jsonable(_read_json(args.forks))
    report = slim.build_witness(lf.lattice, script=script, max_size=args.max_size)
    return (
        {
            "command": "witness-sps",
            "name": lf.name,
            "m": report.m,
            "n": report.n,
            "t": report.t,
            "script": report.script.to_jsonable(),
            "rectangular": lattice_to_jsonable(f"{lf.name}-rect", report.rectangular.lattice),
            "extension": lattice_to_jsonable(f"{lf.name}-ext", report.extension.lattice),
            "embedded_copy": dict(sorted(report.embedded_copy.items())),
            "inner_coatoms": list(report.inner_coatoms),
            "coatom_meet": report.coatom_meet,
            "retraction_found": report.retraction_found,
            "search_nodes": report.search_nodes,
            "congruence_pairs_checked": len(report.congruence_trace),
        },
        0,
    )


def _cmd_gen_slim(args) -> tuple[dict, int]:
    try:
        m_text, n_text = args.grid.lower().split("x")
        m, n = int(m_text), int(n_text)
    except ValueError:
        raise ParseError(f"bad --grid {args.grid!r}, expected MxN") from None
    steps: tuple[tuple[str, str], ...] = ()
    if args.forks:
        script = slim.ForkScript.from_jsonable(_read_json(args.forks))
        if tuple(script.base_sizes) != (m + 1, n + 1):
            raise ParseError("fork script base sizes disagree with --grid")
        steps = script.steps
    script = slim.ForkScript((m + 1, n + 1), steps)
    built = slim.build_slim_rectangular(script)
    name = f"slim-{m}x{n}" + (f"+{len(steps)}forks" if steps else "")
    return (
        {
            "command": "gen-slim",
            "lattice": lattice_to_jsonable(name, built.lattice),
            "script": script.to_jsonable(),
        },
        0,
    )


# ---------------------------------------------------------------------------
# oracle-verify suites
# ---------------------------------------------------------------------------


def _check(checks: list, name: str, passed: bool, detail: str):
    checks.append({"name": name, "passed": bool(passed), "detail": detail})
    print(f"{'PASS' if passed else 'FAIL'} {name}: {detail}", file=sys.stderr)


def _suite_proposition(checks, max_size, rng):
    size = min(max_size, 6)
    mismatches = 0
    pairs = 0
    for big in oracle.enumerate_small_lattices(size):
        for sub in oracle.all_sublattices(big):
            if sub == frozenset(big.elements):
                continue
            pairs += 1
            system = oracle.build_equation_system(big, sub)
            solved = oracle.solve_equation_system(system)
            hom = oracle.exists_retraction(big, sub)
            if (solved is None) != (hom is None):
                mismatches += 1
            elif solved is not None:
                induced = oracle.induced_homomorphism(system, solved)
                if not induced.is_retraction():
                    mismatches += 1
    _check(
        checks,
        "equation-system-vs-retraction",
        mismatches == 0,
        f"{pairs} proper sublattice pairs up to size {size}, {mismatches} disagreements",
    )


def _suite_grid_facts(checks, max_size, rng):
    bad = []
    for m in range(1, 5):
        for n in range(1, 5):
            grid = grids.make_grid((m + 1, n + 1))
            if len(core.four_cells(grid.lattice)) != m * n:
                bad.append((m, n))
    _check(checks, "grid-cell-count", not bad, f"m*n cells on all grids up to 4x4 {bad or ''}")
    off = 0
    total = 0
    for lat in oracle.enumerate_small_lattices(min(max_size, 7), filters=("distributive",)):
        total += 1
        if core.lattice_length(lat) != len(core.join_irreducibles(lat)):
            off += 1
    _check(
        checks,
        "distributive-length-law",
        off == 0,
        f"length equals join-irreducible count on {total} lattices, {off} violations",
    )


def _suite_embedding(checks, max_size, rng):
    failures = 0
    total = 0
    for lat in oracle.enumerate_small_lattices(min(max_size, 6), filters=("distributive",)):
        if len(lat) < 2:
            continue
        total += 1
        emb = chains.grid_embed(lat)
        inclusion = retractions.Homomorphism(
            lat, emb.target.lattice, emb.mapping
        )
        report = retractions.check_cover01(inclusion)
        if not (report.is_cover01 and report.is_embedding and report.lengths_equal):
            failures += 1
    _check(
        checks,
        "grid-embedding-cover01",
        failures == 0,
        f"{total} distributive lattices embedded, {failures} failures",
    )


def _suite_cover01(checks, max_size, rng):
    bad = 0
    searched = 0
    for big in oracle.enumerate_small_lattices(min(max_size, 6), filters=("semimodular",)):
        for sub in oracle.all_sublattices(big):
            sub_lat = core.induced_lattice(big, sub)
            if not core.is_semimodular(sub_lat):
                continue
            inclusion = retractions.Homomorphism(sub_lat, big, {x: x for x in sub})
            report = retractions.check_cover01(inclusion)
            if report.is_cover01 != (report.is_embedding and report.lengths_equal):
                bad += 1
            if report.is_cover01 and len(sub) < len(big):
                searched += 1
                if oracle.exists_retraction(big, sub) is not None:
                    bad += 1
    _check(
        checks,
        "cover01-lemma",
        bad == 0,
        f"inclusion flags consistent; {searched} proper cover-01 extensions admit no retraction",
    )


def _suite_forks(checks, max_size, rng):
    first = slim.add_fork(slim.oriented_grid(1, 1), slim.oriented_grid(1, 1).cells()[0])
    s7 = core.build_lattice(
        ["0", "u", "v", "l", "m", "r", "1"],
        [("0", "u"), ("0", "v"), ("u", "l"), ("u", "m"), ("v", "m"), ("v", "r"),
         ("l", "1"), ("m", "1"), ("r", "1")],
    )
    _check(
        checks,
        "fork-on-boolean-square",
        oracle.is_isomorphic(first.lattice, s7),
        "forking the 4-element boolean lattice gives the 7-element S7",
    )
    replays = 0
    ok = True
    for _ in range(100):
        m = rng.randint(1, 2)
        n = rng.randint(1, 2)
        ol = slim.oriented_grid(m, n)
        for _ in range(rng.randint(1, 3)):
            cells = ol.cells()
            before = core.lattice_length(ol.lattice)
            ol = slim.add_fork(ol, cells[rng.randrange(len(cells))])
            replays += 1
            if core.lattice_length(ol.lattice) != before + 1:
                ok = False
    _check(checks, "fork-replays", ok, f"{replays} fork steps revalidated")


def _suite_swing(checks, max_size, rng):
    bad = 0
    for t in range(1, 5):
        member = slim.s7_family(t)
        coats = slim.inner_coatoms(member)
        top = member.lattice.top
        for i in range(t):
            for j in range(i + 1, t):
                theta = oracle.congruence_generated_by(
                    member.lattice, [(coats[i], coats[j])]
                )
                if not set(coats) <= theta.block_of(top):
                    bad += 1
    _check(
        checks,
        "swing-congruence-step",
        bad == 0,
        "collapsing two inner coatoms collapses all of them into the top block (t <= 4)",
    )


def _suite_subgrid(checks, max_size, rng):
    failures = 0
    tested = 0
    sizes = [(2, 2), (2, 3), (3, 3), (2, 2, 2), (2, 4), (2, 2, 3)]
    for factor_sizes in sizes:
        grid = grids.make_grid(factor_sizes)
        if len(grid.lattice) > 12:
            continue
        for sub in oracle.all_sublattices(grid.lattice):
            sub_lat = core.induced_lattice(grid.lattice, sub)
            factors = core.grid_factor_sizes(sub_lat)
            if factors is None or len(factors) != grid.dimension:
                continue
            tested += 1
            try:
                recovered = grids.recover_subgrid_chains(grid, sub)
            except grids.NotASubgrid:
                failures += 1
                continue
            members = {
                x
                for x in grid.lattice.elements
                if all(
                    grids.canonical_joinands(grid, x)[j] in set(recovered[j])
                    for j in range(grid.dimension)
                )
            }
            if members != set(sub):
                failures += 1
    _check(
        checks,
        "subgrid-recovery",
        failures == 0,
        f"{tested} full-dimension grid sublattices recovered, {failures} failures",
    )


def _suite_generation(checks, max_size, rng):
    size = min(max_size, 6)
    counts_a = [0] * (size + 1)
    for lat in oracle.enumerate_small_lattices(size):
        counts_a[len(lat)] += 1
    counts_b = [0] * (size + 1)
    for lat in oracle.bruteforce_lattices(size):
        counts_b[len(lat)] += 1
    _check(
        checks,
        "generation-strategies-agree",
        counts_a == counts_b,
        f"per-size counts {counts_a[1:]} from both strategies",
    )
    dist_a = sum(
        1 for _ in oracle.enumerate_small_lattices(size, filters=("distributive",))
    )
    dist_b = sum(1 for lat in oracle.enumerate_distributive_lattices(size))
    _check(
        checks,
        "distributive-enumerators-agree",
        dist_a == dist_b,
        f"{dist_a} distributive lattices up to size {size} from both routes",
    )


def _suite_kernels(checks, max_size, rng):
    bad = 0
    total = 0
    for big in oracle.enumerate_small_lattices(min(max_size, 5)):
        for sub in oracle.all_sublattices(big):
            hom = oracle.exists_retraction(big, sub)
            if hom is None:
                continue
            total += 1
            kernel = hom.kernel()
            if not kernel.is_diagonal_on(sub):
                bad += 1
    _check(
        checks,
        "retraction-kernels",
        bad == 0,
        f"{total} retraction kernels are congruences with diagonal restriction",
    )


def _suite_congruence_bound(checks, max_size, rng):
    lattices = list(oracle.enumerate_small_lattices(min(max_size, 6)))
    bad = 0
    for _ in range(50):
        lat = lattices[rng.randrange(len(lattices))]
        elems = lat.elements
        pair1 = (elems[rng.randrange(len(elems))], elems[rng.randrange(len(elems))])
        pair2 = (elems[rng.randrange(len(elems))], elems[rng.randrange(len(elems))])
        theta1 = oracle.congruence_generated_by(lat, [pair1])
        theta2 = oracle.congruence_generated_by(lat, [pair2])
        meet = theta1.intersect(theta2)
        if meet.block_count() > theta1.block_count() * theta2.block_count():
            bad += 1
    _check(
        checks,
        "congruence-intersection-bound",
        bad == 0,
        "intersections stay within the product of the block counts (50 samples)",
    )


_SUITES = {
    "proposition": _suite_proposition,
    "grid-facts": _suite_grid_facts,
    "embedding": _suite_embedding,
    "cover01": _suite_cover01,
    "forks": _suite_forks,
    "swing": _suite_swing,
    "subgrid": _suite_subgrid,
    "generation": _suite_generation,
    "retraction-kernels": _suite_kernels,
    "congruence-bound": _suite_congruence_bound,
}


def _cmd_oracle_verify(args) -> tuple[dict, int]:
    if args.suite != "all" and args.suite not in _SUITES:
        raise ParseError(
            f"unknown suite {args.suite!r}; choose from {', '.join(sorted(_SUITES))}, all"
        )
    names = sorted(_SUITES) if args.suite == "all" else [args.suite]
    rng = random.Random(args.seed)
    checks: list[dict] = []
    for name in names:
        _SUITES[name](checks, args.max_size, rng)
    passed = all(c["passed"] for c in checks)
    return (
        {
            "command": "oracle-verify",
            "suite": args.suite,
            "checks": checks,
            "passed": passed,
        },
        0 if passed else 2,
    )


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="finlat", description="finite lattice computations")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("analyze", help="structural predicates of a lattice file")
    p.add_argument("file")
    p.set_defaults(func=_cmd_analyze)

    p = commands.add_parser("dim", help="order dimension of a distributive lattice")
    p.add_argument("file")
    p.set_defaults(func=_cmd_dim)

    p = commands.add_parser("embed-grid", help="cover-preserving {0,1} grid embedding")
    p.add_argument("file")
    p.set_defaults(func=_cmd_embed_grid)

    p = commands.add_parser("retract", help="find or refute a retraction onto a sublattice")
    p.add_argument("file")
    p.add_argument("--sub", help="JSON file naming the sublattice")
    p.set_defaults(func=_cmd_retract)

    p = commands.add_parser("classify", help="absolute-retract classification")
    p.add_argument("file")
    p.add_argument("--class", dest="klass", required=True,
                   help="dfin:<n>, dfin:omega, or dcov:<n>")
    p.set_defaults(func=_cmd_classify)

    p = commands.add_parser("witness-sps", help="non-retract witness for a slim semimodular lattice")
    p.add_argument("file")
    p.add_argument("--forks", help="optional fork script for the rectangular extension")
    p.add_argument("--max-size", type=int, default=None,
                   help="bound for the rectangular extension search")
    p.set_defaults(func=_cmd_witness_sps)

    p = commands.add_parser("gen-slim", help="replay a fork script over a grid")
    p.add_argument("--grid", required=True, help="MxN base grid")
    p.add_argument("--forks", help="JSON fork script")
    p.set_defaults(func=_cmd_gen_slim)

    p = commands.add_parser("oracle-verify", help="run brute-force invariant suites")
    p.add_argument("--suite", required=True,
                   help=f"one of: {', '.join(sorted(_SUITES))}, all")
    p.add_argument("--max-size", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_oracle_verify)

    return parser


def run(argv: list[str]) -> tuple[dict, int]:
    """Parse arguments, execute one command, and return (report, exit code)."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _CliError as exc:
        return {"error": str(exc)}, 1
    try:
        return args.func(args)
    except core.LatticeError as exc:
        return {
            "command": args.command,
            "error": f"{type(exc).__name__}: {exc}",
        }, 1


def main(argv=None) -> None:
    report, code = run(sys.argv[1:] if argv is None else argv)
    json.dump(report, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    sys.exit(code)


if __name__ == "__main__":
    main()
