"""``diracbench`` command line: validate, build and evaluate spec files.

Exit codes: 0 when every check passes, 1 when some check fails, 2 for usage,
file or parse errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import specfile as sf
from .checks import Checks, witness_json
from .homsp import (
    ClassificationError,
    RobinsonDatum,
    check_comparison_map,
    check_exact_case,
    check_F_n,
    check_transitive,
    robinson_build,
    search_coisotropic,
    validate_classification,
    validate_robinson,
)
from .liealg import MetrizedLieAlgebra, check_jacobi, check_rep
from .lingpd import (
    check_metrized,
    dual_module_verified,
    dualize_verified,
    from_manin_pair,
    gamma_g,
    validate_groupoid,
    validate_module,
)
from .manin import (
    ManinError,
    build_double,
    build_q_pair,
    check_double,
    check_q_pair,
    fq_is_bijective,
    is_exact,
    reduce_coisotropic,
    validate_triple,
)
from .ratlin import Subspace, coisotropy_witness, span, to_fraction


class UsageError(Exception):
    pass


@dataclass
class Report:
    command: str
    inputs: list = field(default_factory=list)
    checks: Checks = field(default_factory=Checks)
    outputs: list = field(default_factory=list)
    results: dict = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 0 if self.checks.ok else 1

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "checks": [c.to_json() for c in self.checks.items],
            "outputs": self.outputs,
            "results": witness_json(self.results),
            "exit_code": self.exit_code,
        }


def _color_enabled(stream) -> bool:
    if os.environ.get("DIRAC_COLOR", "") == "0":
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def render_report(report: Report, fmt: str = "text", color: bool = False) -> str:
    if fmt == "json":
        return json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n"
    green, red, reset = ("\033[32m", "\033[31m", "\033[0m") if color else ("", "", "")
    items = report.checks.items
    status = f"{green}PASS{reset}" if report.exit_code == 0 else f"{red}FAIL{reset}"
    lines = [f"{report.command}: {status} ({sum(c.passed for c in items)}/{len(items)} checks)"]
    for c in items:
        if c.passed:
            lines.append(f"{green}PASS{reset} {c.name}")
        else:
            w = json.dumps(witness_json(c.witness), sort_keys=True)
            lines.append(f"{red}FAIL{reset} {c.name}  witness={w}")
    for k in sorted(report.results):
        lines.append(f"  {k} = {json.dumps(witness_json(report.results[k]), sort_keys=True)}")
    for p in report.outputs:
        lines.append(f"  wrote {p}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------ input helpers


def _read(path: str, report: Report) -> tuple[sf.SpecFile, object]:
    if path == "-":
        data = sys.stdin.buffer.read()
        name = "-"
    else:
        try:
            data = Path(path).read_bytes()
        except OSError as e:
            raise UsageError(f"cannot read {path}: {e.strerror}") from None
        name = os.path.basename(path)
    report.inputs.append({"path": name, "sha256": hashlib.sha256(data).hexdigest()})
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError:
        raise UsageError(f"{name} is not UTF-8") from None
    spec = sf.parse_spec(text)
    return spec, sf.decode(spec)


def _expect(spec: sf.SpecFile, *kinds):
    if spec.kind not in kinds:
        raise UsageError(f"expected a spec of kind {' or '.join(kinds)}, got {spec.kind}")


def _write(report: Report, path: str | None, spec: sf.SpecFile):
    if path is None:
        return
    text = sf.write_spec(spec)
    if path == "-":
        sys.stderr.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")
    report.outputs.append(os.path.basename(path))


def parse_vectors(text: str, n: int | None = None) -> list[tuple]:
    """'1,0,2;0,1,1/2' -> list of vectors (an empty string gives no vectors)."""
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            v = tuple(to_fraction(a.strip()) for a in chunk.split(","))
        except (ValueError, ZeroDivisionError) as e:
            raise UsageError(f"bad vector {chunk!r}: {e}") from None
        if n is not None and len(v) != n:
            raise UsageError(f"vector {chunk!r} has length {len(v)}, expected {n}")
        out.append(v)
    return out


def _subspace_arg(text: str | None, n: int) -> Subspace | None:
    if text is None:
        return None
    return span(n, parse_vectors(text, n))


def _triple_arg(args, report: Report, embedded):
    if getattr(args, "triple", None):
        spec, ts = _read(args.triple, report)
        _expect(spec, "triple")
        return ts
    if embedded is None:
        raise UsageError("this spec needs a triple: embed one or pass --triple")
    return embedded


# ----------------------------------------------------------------- commands


def cmd_validate(args, report: Report):
    spec, obj = _read(args.file, report)
    c = report.checks
    if spec.kind == "triple":
        rep = validate_triple(obj.triple)
        c.extend(rep)
        report.results["exact"] = rep.info["exact"]
        if obj.rep is not None:
            r = check_rep(obj.rep)
            c.add("rep is a homomorphism", r.homomorphism, r.failing_pair)
            c.add("rep is faithful", r.faithful)
    elif spec.kind == "groupoid":
        c.extend(validate_groupoid(obj.groupoid))
        if obj.metric is not None:
            from .lingpd import multiplicativity_witness

            w = multiplicativity_witness(obj.groupoid, obj.metric)
            c.add("metric is multiplicative", w is None, w)
    elif spec.kind == "module":
        c.extend(validate_module(obj))
    elif spec.kind == "classification":
        data, ts = obj
        ts = _triple_arg(args, report, ts)
        c.extend(validate_classification(data, ts.triple))
    elif spec.kind == "robinson":
        datum, ts = obj
        c.extend(validate_robinson(datum, ts.triple))
    elif spec.kind == "rep":
        r = check_rep(obj)
        c.add("rep is a homomorphism", r.homomorphism, r.failing_pair)
        c.add("rep is faithful", r.faithful)
    elif spec.kind == "algebra":
        L, metric = obj
        if metric is None:
            j = check_jacobi(L)
            c.add("jacobi", j.ok, j.first_failing_triple)
        else:
            c.extend(MetrizedLieAlgebra(L, metric).validate())


def cmd_double(args, report: Report):
    spec, ts = _read(args.file, report)
    _expect(spec, "triple")
    t = ts.triple
    try:
        D = build_double(t.d, t.beta)
    except ManinError as e:
        report.checks.add("beta ad-invariant", False, str(e))
        return
    report.checks.extend(check_double(D))
    report.results.update({"dim": D.dtilde.dim, "s": D.s_map, "t": D.t_map, "beta_tilde": D.beta_tilde.gram})
    _write(report, args.output, sf.encode("algebra", (D.dtilde.algebra, D.dtilde.metric)))


def cmd_qpair(args, report: Report):
    spec, ts = _read(args.file, report)
    _expect(spec, "triple")
    t = ts.triple
    P = build_q_pair(t)
    report.checks.extend(check_q_pair(t, P))
    MG = from_manin_pair(P)
    report.checks.extend(check_metrized(MG), "groupoid: ")
    report.results.update({
        "dim_q": P.q.dim,
        "f_q": P.fq.matrix,
        "f_q_bijective": fq_is_bijective(P),
        "gamma_g": gamma_g(MG).gram,
    })
    G = MG.groupoid
    _write(report, args.output, sf.encode("groupoid", sf.GroupoidSpec(G, MG.metric, MG.r, P.q.algebra)))


def cmd_reduce(args, report: Report):
    spec, (L, metric) = _read(args.file, report)
    _expect(spec, "algebra")
    if metric is None:
        raise UsageError("reduce needs an algebra with a metric")
    M = MetrizedLieAlgebra(L, metric)
    c = _subspace_arg(args.c, L.dim)
    try:
        red = reduce_coisotropic(M, c)
    except ManinError as e:
        report.checks.add("c is a coisotropic subalgebra", False, str(e))
        return
    report.checks.extend(red.reduced.validate(), "reduced: ")
    report.results.update({"dim": red.reduced.dim, "projection": red.projection, "lift": red.lift})
    _write(report, args.output, sf.encode("algebra", (red.reduced.algebra, red.reduced.metric)))


def cmd_dualize(args, report: Report):
    spec, obj = _read(args.file, report)
    _expect(spec, "groupoid", "module")
    if spec.kind == "groupoid":
        G = obj.groupoid
        report.checks.extend(validate_groupoid(G), "input: ")
        if not report.checks.ok:
            return
        Dg = dualize_verified(G)
        report.checks.extend(Dg.pairing_checks)
        report.checks.extend(validate_groupoid(Dg.groupoid), "dual: ")
        report.results.update({"vacant": G.is_vacant(), "dual_is_group": Dg.groupoid.units.dim == 0})
        _write(report, args.output, sf.encode("groupoid", sf.GroupoidSpec(Dg.groupoid)))
    else:
        report.checks.extend(validate_module(obj), "input: ")
        if not report.checks.ok:
            return
        Dm = dual_module_verified(obj)
        report.checks.extend(Dm.pairing_checks)
        report.checks.extend(validate_module(Dm.module), "dual: ")
        _write(report, args.output, sf.encode("module", Dm.module))


def _classification_checks(report: Report, data, t):
    c = report.checks
    c.extend(validate_classification(data, t))
    if not c.ok:
        return
    c.add("transitive", check_transitive(data, t))
    c.extend(check_F_n(data, t), "F_n: ")
    try:
        c.extend(check_comparison_map(data, t))
    except ClassificationError as e:
        c.add("comparison map exists", False, str(e))
    exact = is_exact(t)
    report.results["exact"] = exact
    if exact:
        ok, cc = check_exact_case(data, t)
        c.add("exact case: f_n is an isomorphism", ok)
        report.results["c"] = cc


def _robinson(report: Report, datum, ts):
    rep = validate_robinson(datum, ts.triple)
    report.checks.extend(rep, "datum: ")
    if not rep.ok:
        return None
    rb = robinson_build(datum, ts.triple)
    _classification_checks(report, rb.data, ts.triple)
    if "c" in report.results:
        report.checks.add("exact case recovers c", report.results["c"] == datum.c, report.results["c"])
    report.results["dim_n"] = rb.data.n.dim
    return rb


def cmd_classify(args, report: Report):
    spec, obj = _read(args.file, report)
    _expect(spec, "classification", "robinson")
    if spec.kind == "robinson":
        datum, ts = obj
        ts = _triple_arg(args, report, ts)
        rb = _robinson(report, datum, ts)
        if rb is not None:
            _write(report, args.output, sf.encode("classification", (rb.data, ts)))
    else:
        data, ts = obj
        ts = _triple_arg(args, report, ts)
        _classification_checks(report, data, ts.triple)
        _write(report, args.output, sf.encode("classification", (data, ts)))


def cmd_robinson(args, report: Report):
    spec, obj = _read(args.file, report)
    _expect(spec, "robinson")
    datum, ts = obj
    rb = _robinson(report, datum, ts)
    if rb is not None:
        _write(report, args.output, sf.encode("classification", (rb.data, ts)))


def cmd_search(args, report: Report):
    spec, ts = _read(args.file, report)
    _expect(spec, "triple")
    t = ts.triple
    cands = parse_vectors(args.candidates, t.dim)
    if not cands:
        raise UsageError("search needs at least one candidate vector")
    k = _subspace_arg(args.k, t.dim)
    found = search_coisotropic(t, cands, k=k, lagrangian=args.lagrangian, dim=args.dim)
    for i, c in enumerate(found):
        w = coisotropy_witness(c, t.beta)
        report.checks.add(f"result {i}: beta-coisotropic", w is None, w)
    report.results["subspaces"] = found
    report.results["count"] = len(found)


def cmd_dress(args, report: Report):
    from .dressing import (
        check_bullet_on_q,
        check_exact_splitting,
        check_group_element,
        dressing_field,
        dressing_matrix,
        stabilizer_kernel,
    )

    spec, ts = _read(args.file, report)
    _expect(spec, "triple")
    t = ts.triple
    if ts.rep is None or not ts.elements:
        raise UsageError("dress needs a triple with a rep and group elements")
    idx = range(len(ts.elements)) if args.element is None else [args.element]
    for i in idx:
        if not 0 <= i < len(ts.elements):
            raise UsageError(f"no group element {i}")
    exact = is_exact(t)
    for i in idx:
        h = ts.elements[i]
        gc = check_group_element(t, h)
        report.checks.extend(gc, f"element {i}: ")
        if not gc.ok:
            continue
        st = stabilizer_kernel(t, h)
        report.checks.add(f"element {i}: stabilizer is beta-coisotropic", st.coisotropic, st.kernel)
        report.results[f"element {i}"] = {
            "dressing": dressing_matrix(t, h),
            "stabilizer": st.kernel,
            "stabilizer = Ad_(h^-1) g": st.equals_ad_hinv_g,
            "stabilizer = Ad_h g": st.equals_ad_h_g,
        }
        if args.lam is not None:
            (lam,) = parse_vectors(args.lam, t.dim) or [None]
            report.results[f"element {i}"]["field"] = dressing_field(t, h, lam)
        if exact:
            report.checks.extend(check_exact_splitting(t, h), f"element {i}: ")
    if report.checks.ok:
        report.checks.extend(check_bullet_on_q(t, [ts.elements[i] for i in idx]), "bullet: ")


def cmd_exactness(args, report: Report):
    spec, ts = _read(args.file, report)
    _expect(spec, "triple")
    t = ts.triple
    v = validate_triple(t)
    report.checks.extend(v)
    if not v.ok:
        return
    exact = is_exact(t)
    P = build_q_pair(t)
    bij = fq_is_bijective(P)
    report.checks.add("exact iff f_q is bijective", exact == bij, {"exact": exact, "f_q_bijective": bij})
    report.results.update({"exact": exact, "f_q_bijective": bij, "beta_nondegenerate": t.beta.is_nondegenerate()})


COMMANDS = {
    "validate": cmd_validate,
    "double": cmd_double,
    "qpair": cmd_qpair,
    "reduce": cmd_reduce,
    "dualize": cmd_dualize,
    "classify": cmd_classify,
    "robinson": cmd_robinson,
    "search": cmd_search,
    "dress": cmd_dress,
    "exactness": cmd_exactness,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="diracbench", description="Exact checks for Dirac-Manin triples and friends.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_, output=True):
        s = sub.add_parser(name, help=help_)
        s.add_argument("file", help="spec file, or - for stdin")
        s.add_argument("--format", choices=("json", "text"), default="text")
        if output:
            s.add_argument("-o", "--output", help="write the resulting spec file here")
        return s

    s = add("validate", "run the validator for the file's kind", output=False)
    s.add_argument("--triple", help="triple spec for classification files")
    add("double", "build the double of a triple")
    add("qpair", "build the Manin pair q and the groupoid q => g")
    s = add("reduce", "coisotropic reduction of a metrized algebra")
    s.add_argument("--c", required=True, help="spanning vectors, e.g. '1,0,0;0,1,0'")
    add("dualize", "Pradines dual of a groupoid or module")
    s = add("classify", "check classification data (or build it from a Robinson spec)")
    s.add_argument("--triple", help="triple spec when the file does not embed one")
    add("robinson", "build classification data from a Robinson spec")
    s = add("search", "enumerate coisotropic subalgebras spanned by candidates", output=False)
    s.add_argument("--candidates", required=True, help="candidate vectors, e.g. '1,1;1,-1'")
    s.add_argument("--k", help="required intersection with h")
    s.add_argument("--lagrangian", action="store_true")
    s.add_argument("--dim", type=int)
    s = add("dress", "dressing action at the triple's group elements", output=False)
    s.add_argument("--element", type=int, help="index of a single group element")
    s.add_argument("--lam", help="evaluate the dressing field at this vector")
    add("exactness", "compare exactness with bijectivity of f_q", output=False)
    return p


def execute(argv) -> tuple[Report | None, str, int]:
    """Run a command; returns (report, rendered text, exit code)."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return None, "", int(e.code or 0)
    report = Report(args.command)
    try:
        COMMANDS[args.command](args, report)
    except (UsageError, sf.SpecError) as e:
        return None, f"diracbench {args.command}: error: {e}\n", 2
    except ValueError as e:
        # library errors (invalid inputs detected while building)
        return None, f"diracbench {args.command}: error: {e}\n", 2
    return report, render_report(report, args.format, _color_enabled(sys.stdout)), report.exit_code


def main(argv=None) -> int:
    report, text, code = execute(sys.argv[1:] if argv is None else argv)
    if report is None:
        sys.stderr.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
