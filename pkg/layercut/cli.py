# Copyright (C) 2018-2026 The layercut developers
# See the AUTHORS file at the top-level directory of this distribution
# License: GNU General Public License version 3, or any later version
# See top-level LICENSE file for more information

import json
import logging
import os
import sys
import time
from typing import Any, Dict, List, Optional

# WARNING: do not import unnecessary things here to keep cli startup time under
# control
try:
    import click
except ImportError:
    print(
        "Cannot run layercut; the Click package is not installed."
        "Please install 'layercut[cli]' for full functionality.",
        file=sys.stderr,
    )
    exit(1)

from layercut.exceptions import (
    DomainError,
    LayercutError,
    ParameterError,
    PreconditionError,
    ValidationError,
)

CONTEXT_SETTINGS = dict(help_option_names=["-h", "--help"])

USAGE_EXIT_CODE = 64
"""Exit code of command line usage errors."""

SCHEMES = ["td", "baker", "geo", "crossing"]
RATIO_SCHEMES = ["baker", "min", "geo", "crossing", "product"]
ENCODINGS = ["maxcut", "dicut", "csp", "ea", "vision", "geometric"]


class KRangeParamType(click.ParamType):
    """Click argument that accepts an inclusive range ``a..b`` of positive
    integers and returns it as a :class:`range`"""

    name = "A..B"

    def convert(self, value, param, ctx) -> range:
        if isinstance(value, range):
            return value
        low, sep, high = value.partition("..")
        try:
            if not sep:
                raise ValueError
            bounds = int(low), int(high)
        except ValueError:
            self.fail(f'"{value}" is not a range of the form A..B', param, ctx)
        if not 1 <= bounds[0] <= bounds[1]:
            self.fail(f'"{value}" must satisfy 1 <= A <= B', param, ctx)
        return range(bounds[0], bounds[1] + 1)


def load_json(path: str) -> Any:
    try:
        with click.open_file(path) as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ValidationError(
            "%(path)s is not valid JSON: %(reason)s",
            code="json",
            params={"path": path, "reason": str(e)},
        )
    except OSError as e:
        raise ValidationError(
            "Cannot read %(path)s: %(reason)s",
            code="file",
            params={"path": path, "reason": e.strerror or str(e)},
        )


def _from_document(cls, document, path: str):
    if not isinstance(document, dict):
        raise ValidationError(
            "%(path)s does not hold a JSON object", code="document", params={"path": path}
        )
    try:
        return cls.from_dict(document)
    except (TypeError, ValueError) as e:
        raise ValidationError(
            "%(path)s is not a valid %(kind)s document: %(reason)s",
            code="document",
            params={"path": path, "kind": cls.__name__, "reason": str(e)},
        )


def load_instance(path: str):
    """Reads an instance file, and the crossings it lists verbatim if any."""
    from layercut.model import Instance

    document = load_json(path)
    crossings = None
    if isinstance(document, dict):
        document = dict(document)
        crossings = document.pop("crossings", None)
    return _from_document(Instance, document, path), crossings


def load_partition(value: str):
    from layercut.model import Partition

    if value == "uniform":
        return None
    return _from_document(Partition, load_json(value), value)


def dump_json(document, output: str = "-") -> None:
    with click.open_file(output, "w") as f:
        json.dump(document, f, sort_keys=True)
        f.write("\n")


def _number(value) -> str:
    return repr(float(value))


def _shift(shift) -> str:
    if shift is None:
        return "-"
    if isinstance(shift, tuple):
        return ",".join(str(s) for s in shift)
    return str(shift)


def report_lines(result) -> List[str]:
    """Text report of an :class:`~layercut.shifting.ApproxResult`; identical
    results give identical reports."""
    lines = [
        "scheme=%s objective=%s k=%d" % (result.scheme, result.objective.value, result.k),
        "value=%s" % _number(result.value),
        "energy=%s" % _number(result.energy),
        "dp_bound=%s" % _number(result.dp_bound),
        "ratio_guarantee=%s" % _number(result.ratio_guarantee),
    ]
    if result.guarantee_kind != "ratio":
        lines.append("guarantee_kind=%s" % result.guarantee_kind)
    lines += [
        "winning_shift=%s" % _shift(result.winning_shift),
        "widths=%s" % ",".join(str(w) for w in result.widths),
        "interior_size=%d" % result.interior_size,
        "configuration=%s" % " ".join(str(a) for a in result.cfg.labels),
    ]
    lines += [
        "shift %s value=%s" % (_shift(shift), _number(value))
        for shift, value in result.shift_values
    ]
    return lines


@click.group(name="layercut", context_settings=CONTEXT_SETTINGS)
@click.option(
    "--log-level",
    default="WARNING",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    help="logging level, messages go to stderr (default: WARNING)",
)
def layercut(log_level):
    """Approximation schemes for vertex and edge energies on graphs with
    layered structure."""
    logging.basicConfig(level=log_level.upper(), stream=sys.stderr)


@layercut.command(context_settings=CONTEXT_SETTINGS)
@click.argument("instance_file", metavar="FILE")
@click.option("--td", "td_file", metavar="FILE", help="tree decomposition to check")
@click.option(
    "--config", "config_file", metavar="FILE", help="configuration to evaluate"
)
@click.option(
    "--scheme",
    type=click.Choice(SCHEMES + ["product"]),
    help="check the preconditions of a scheme",
)
@click.option("--min", "minimize", is_flag=True, help="check min-sum preconditions")
def validate(instance_file, td_file, config_file, scheme, minimize):
    """Check an instance file, and optionally a decomposition, a
    configuration or the preconditions of a scheme on it.

    Examples::

      $ layercut validate grid.json --td grid-td.json
      valid instance: n=9 m=12 q=2 directed=False
      valid decomposition: bags=7 width=3
    """
    from layercut.model import (
        balance_report,
        energy,
        graph_of,
        require_nonnegative,
    )
    from layercut.treedecomp import TreeDecomposition, validate_td

    instance, _ = load_instance(instance_file)
    click.echo(
        "valid instance: n=%d m=%d q=%d directed=%s"
        % (instance.n, instance.m, instance.q, instance.directed)
    )
    if td_file:
        td = _from_document(TreeDecomposition, load_json(td_file), td_file)
        violation = validate_td(graph_of(instance), td)
        if violation is not None:
            raise PreconditionError(
                "Invalid tree decomposition (%(violation)s)",
                code=violation.condition.value,
                params={"violation": str(violation)},
            )
        click.echo("valid decomposition: bags=%d width=%d" % (len(td.bags), td.width))
    if config_file:
        document = load_json(config_file)
        labels = document.get("labels") if isinstance(document, dict) else document
        if not isinstance(labels, list):
            raise ValidationError(
                "%(path)s holds no label list",
                code="document",
                params={"path": config_file},
            )
        click.echo("energy=%s" % _number(energy(instance, labels)))
    if scheme and scheme != "td":
        require_nonnegative(instance, "solve --scheme %s" % scheme)
        if minimize or scheme == "product":
            report = balance_report(instance)
            if minimize and not report.balanced:
                raise DomainError(
                    "Instance is unbalanced: some f_i has a zero minimum without "
                    "vanishing",
                    code="unbalanced",
                )
            click.echo("alpha_star=%s" % _number(report.alpha_star))
        click.echo("scheme %s: preconditions hold" % scheme)


@layercut.command(context_settings=CONTEXT_SETTINGS)
@click.argument("instance_file", metavar="FILE")
@click.option("--min", "minimize", is_flag=True, help="minimize instead of maximize")
@click.option("--json", "as_json", is_flag=True, help="emit a JSON document")
@click.option(
    "--cap",
    type=click.IntRange(min=1),
    default=None,
    help="largest number of configurations to enumerate",
)
def oracle(instance_file, minimize, as_json, cap):
    """Exact optimum by exhaustive enumeration (small instances only)."""
    from layercut.model import Objective
    from layercut.oracle import DEFAULT_ORACLE_CAP, exact_opt

    instance, _ = load_instance(instance_file)
    objective = Objective.MIN if minimize else Objective.MAX
    value, cfg = exact_opt(instance, objective, cap=cap or DEFAULT_ORACLE_CAP)
    if as_json:
        dump_json(
            {"objective": objective.value, "value": value, "cfg": cfg.to_dict()}
        )
    else:
        click.echo("value=%s" % _number(value))
        click.echo("configuration=%s" % " ".join(str(a) for a in cfg.labels))


def _resolve_k(scheme: str, k: Optional[int], epsilon: Optional[float], d: int) -> int:
    from layercut.geometry import geo_k_for_epsilon
    from layercut.shifting import k_for_epsilon

    if scheme == "td":
        return 0
    if (k is None) == (epsilon is None):
        raise click.UsageError("exactly one of --k and --epsilon is required")
    if k is not None:
        return k
    if scheme == "crossing":
        raise ParameterError(
            "The crossing scheme has no epsilon mode: its guarantee depends on "
            "phi, pass --k",
            code="epsilon-unsupported",
        )
    if scheme == "geo":
        return geo_k_for_epsilon(epsilon, d)
    return k_for_epsilon(epsilon)


@layercut.command(context_settings=CONTEXT_SETTINGS)
@click.argument("instance_file", metavar="FILE")
@click.option("--scheme", type=click.Choice(SCHEMES), help="approximation scheme")
@click.option("--k", type=int, default=None, help="shifting parameter")
@click.option(
    "--epsilon", type=float, default=None, help="target error, chooses k"
)
@click.option(
    "--exact-td",
    is_flag=True,
    help="solve exactly on one tree decomposition (same as --scheme td)",
)
@click.option("--min", "minimize", is_flag=True, help="min-sum of balanced f_i")
@click.option(
    "--product", is_flag=True, help="maximize the product of the f_i (baker only)"
)
@click.option(
    "--partition",
    default="uniform",
    show_default=True,
    help="'uniform' or a partition file",
)
@click.option(
    "--balls", "balls_file", metavar="FILE", help="ball set file (geo scheme)"
)
@click.option(
    "--best-origin",
    is_flag=True,
    help="search the grid origin of smallest density (geo scheme)",
)
@click.option(
    "--improve/--no-improve",
    default=True,
    help="relabel removed vertices greedily (crossing scheme, default: on)",
)
@click.option(
    "--threads",
    type=click.IntRange(min=1),
    default=lambda: os.cpu_count() or 1,
    help="worker threads (default: machine parallelism)",
)
@click.option(
    "--table-cap",
    type=click.IntRange(min=1),
    default=None,
    envvar="LAYERCUT_TABLE_CAP",
    help="largest total dynamic programming table size",
)
@click.option("--json", "as_json", is_flag=True, help="emit a JSON document")
@click.option("--timing", is_flag=True, help="report the wall time")
def solve(
    instance_file,
    scheme,
    k,
    epsilon,
    exact_td,
    minimize,
    product,
    partition,
    balls_file,
    best_origin,
    improve,
    threads,
    table_cap,
    as_json,
    timing,
):
    """Run an approximation scheme on an instance file.

    Examples::

      $ layercut solve grid.json --scheme baker --epsilon 0.1
      scheme=baker objective=max k=18
      ...
      ratio_guarantee=0.9
    """
    from layercut.crossing import crossing_solve, drawing_of
    from layercut.dp import DEFAULT_TABLE_CAP
    from layercut.geometry import AUTO_ORIGIN, ball_set_from_dict, geo_solve
    from layercut.model import Objective
    from layercut.shifting import (
        baker_max,
        baker_min_balanced,
        max_product,
        td_exact,
    )

    if exact_td:
        scheme = "td"
    if scheme is None:
        raise click.UsageError("--scheme or --exact-td is required")
    if product and (scheme != "baker" or minimize):
        raise click.UsageError("--product needs --scheme baker without --min")
    if balls_file is None and scheme == "geo":
        raise click.UsageError("--scheme geo needs --balls")
    if best_origin and scheme != "geo":
        raise click.UsageError("--best-origin needs --scheme geo")
    if minimize and scheme == "crossing":
        raise click.UsageError("the crossing scheme only maximizes")

    instance, crossings = load_instance(instance_file)
    part = load_partition(partition)
    objective = Objective.MIN if minimize else Objective.MAX
    cap = table_cap or DEFAULT_TABLE_CAP
    balls = mode = origin = None
    if balls_file:
        balls, mode, origin = ball_set_from_dict(load_json(balls_file))
        if best_origin:
            origin = AUTO_ORIGIN
    k = _resolve_k(scheme, k, epsilon, balls.d if balls else 2)

    start = time.perf_counter()
    if scheme == "td":
        result = td_exact(instance, part, objective, cap=cap)
    elif scheme == "geo":
        result = geo_solve(
            instance,
            balls,
            part,
            k,
            objective,
            mode=mode,
            origin=origin,
            cap=cap,
            threads=threads,
        )
    elif scheme == "crossing":
        result = crossing_solve(
            instance,
            drawing_of(instance, crossings),
            part,
            k,
            improve=improve,
            cap=cap,
            threads=threads,
        )
    elif product:
        result = max_product(instance, part, k, cap=cap, threads=threads)
    elif minimize:
        result = baker_min_balanced(instance, part, k, cap=cap, threads=threads)
    else:
        result = baker_max(instance, part, k, cap=cap, threads=threads)
    elapsed = time.perf_counter() - start

    if as_json:
        document = result.to_dict()
        if timing:
            document["wall_time"] = elapsed
        dump_json(document)
    else:
        for line in report_lines(result):
            click.echo(line)
        if timing:
            click.echo("wall_time=%.6f" % elapsed)


def _graph_from_document(document: Dict[str, Any], directed: bool):
    import networkx as nx

    graph = nx.DiGraph() if directed else nx.Graph()
    graph.add_nodes_from(range(int(document["num_vertices"])))
    for edge in document["edges"]:
        u, v, *rest = edge
        graph.add_edge(int(u), int(v), weight=float(rest[0]) if rest else 1.0)
    return graph


def encode_document(kind: str, document: Dict[str, Any]):
    """Instance encoded from an input document of the given kind."""
    from layercut import problems
    from layercut.geometry import ball_set_from_dict

    if kind == "maxcut":
        return problems.encode_maxcut(_graph_from_document(document, False))
    if kind == "dicut":
        return problems.encode_maxdicut(_graph_from_document(document, True))
    if kind == "csp":
        constraints = [problems.Constraint.from_dict(c) for c in document["constraints"]]
        instance = problems.encode_max2csp(
            int(document["q"]), int(document["num_vertices"]), constraints
        )
        return instance
    if kind == "ea":
        instance, _ = problems.encode_edwards_anderson(
            document["dims"],
            document.get("couplings", 1.0),
            document.get("field", 0.0),
        )
        return instance
    if kind == "vision":
        instance = problems.encode_vision(
            document["image"],
            int(document["q"]),
            document.get("pairwise", "potts"),
            document.get("parameter", 1.0),
            data_weight=document.get("data_weight", 1.0),
        )
        return instance
    balls, mode, _ = ball_set_from_dict(document)
    return problems.encode_geometric(balls, mode)


@layercut.command(context_settings=CONTEXT_SETTINGS)
@click.argument("kind", type=click.Choice(ENCODINGS))
@click.argument("input_file", metavar="INPUT")
@click.option(
    "--output", "-o", default="-", metavar="FILE", help="instance file (default: stdout)"
)
def encode(kind, input_file, output):
    """Encode a problem as an instance file.

    INPUT is an edge list (``num_vertices``, ``edges`` of ``[u, v]`` or
    ``[u, v, weight]``) for maxcut and dicut; ``q``, ``num_vertices`` and
    ``constraints`` for csp; ``dims``, ``couplings`` and ``field`` for ea;
    ``image``, ``q``, ``pairwise``, ``parameter`` and ``data_weight`` for
    vision; a ball set for geometric.
    """
    document = load_json(input_file)
    try:
        instance = encode_document(kind, document)
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(
            "%(path)s is not a valid %(kind)s input: %(reason)s",
            code="document",
            params={"path": input_file, "kind": kind, "reason": repr(e)},
        )
    dump_json(instance.to_dict(), output)


@layercut.command(name="ratio-table", context_settings=CONTEXT_SETTINGS)
@click.option("--scheme", type=click.Choice(RATIO_SCHEMES), required=True)
@click.option("--d", "dimension", type=click.IntRange(min=1), default=2, show_default=True)
@click.option("--k-range", "k_range", type=KRangeParamType(), default=None)
@click.option("--epsilon", type=float, default=None, help="report the k it selects")
@click.option("--alpha", type=float, default=1.0, show_default=True)
@click.option("--phi", type=click.IntRange(min=0), default=0, show_default=True)
@click.option(
    "--opt", type=float, default=None, help="optimal product (product scheme)"
)
def ratio_table(scheme, dimension, k_range, epsilon, alpha, phi, opt):
    """Print the guarantee of a scheme for a range of k.

    Examples::

      $ layercut ratio-table --scheme baker --k-range 18..18
      k=18 ratio=0.9
    """
    from layercut.crossing import crossing_ratio
    from layercut.geometry import geo_k_for_epsilon, geo_min_ratio, geo_ratio
    from layercut.shifting import (
        baker_ratio,
        k_for_epsilon,
        min_sum_ratio,
        product_exponent,
    )

    if (k_range is None) == (epsilon is None):
        raise click.UsageError("exactly one of --k-range and --epsilon is required")
    if epsilon is not None:
        if scheme == "crossing":
            raise ParameterError(
                "The crossing scheme has no epsilon mode", code="epsilon-unsupported"
            )
        if scheme == "geo":
            k = geo_k_for_epsilon(epsilon, dimension)
        else:
            k = k_for_epsilon(epsilon)
        prefix = "epsilon=%s " % epsilon
        ks = [k]
    else:
        prefix = ""
        ks = list(k_range)

    for k in ks:
        if scheme == "baker":
            row = "ratio=%s" % baker_ratio(k)
        elif scheme == "min":
            if dimension == 2:
                row = "ratio=%s" % min_sum_ratio(alpha, k)
            else:
                row = "ratio=%s" % geo_min_ratio(alpha, k, dimension)
        elif scheme == "geo":
            row = "ratio=%s" % geo_ratio(k, dimension)
        elif scheme == "crossing":
            row = "ratio=%s" % crossing_ratio(k, phi)
        else:
            exponent = product_exponent(k)
            row = "exponent=%s" % exponent
            if opt is not None:
                row += " ratio=%s" % (opt ** (exponent - 1))
        click.echo("%sk=%d %s" % (prefix, k, row))


def run(argv: Optional[List[str]] = None) -> int:
    """Runs the command line on ``argv`` and returns its exit code: 0 on
    success, the ``exit_code`` of a :class:`~layercut.exceptions.LayercutError`,
    and 64 on usage errors."""
    try:
        status = layercut.main(
            args=argv, prog_name="layercut", standalone_mode=False
        )
    except click.UsageError as e:
        e.show()
        return USAGE_EXIT_CODE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except LayercutError as e:
        click.echo("error [%s]: %s" % (e.code, e), err=True)
        return e.exit_code
    return status if isinstance(status, int) else 0


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
