###############################################################################################
#
# The graph file datasource: one JSON document holding a graph and, optionally, its partition.
#
# INFO: Values are the final matrix elements of H (no sign convention is applied on load):
#
#   {"n_nodes": 15,
#    "hoppings": [{"i": 0, "j": 1, "re": -1.0, "im": 0.0}, ...],
#    "onsites":  [{"i": 0, "re": 0.5}, ...],
#    "partition": {"center": [5, 6, 7, 8],
#                  "branches": [{"sites": [0, 1, 2, 3, 4], "root": 5,
#                                "couplings": [{"site": 4, "re": -1.0}]}, ...]}}
#
#       "im" defaults to 0. A branch without "couplings" takes them from H.
#
###############################################################################################

import json
import math
import numbers
from pathlib import Path
from typing import Optional, Tuple, Union

from core.graph import Branch, GraphSpec, Partition, build_hamiltonian, make_branch, validate_partition
from helpers.errors import ParseError, ValidationError

SAMPLES_DIR = Path(__file__).parent / "samples"


def _field(obj, key, path, kind, required=True, default=None):
    if not isinstance(obj, dict):
        raise ParseError("Expected an object", path=path)
    if key not in obj:
        if required:
            raise ParseError("Missing field '{}'".format(key), path=path)
        return default
    value = obj[key]
    where = "{}.{}".format(path, key) if path else key
    # bool is an int subclass; reject it explicitly
    if isinstance(value, bool) or not isinstance(value, kind):
        raise ParseError("Field '{}' has the wrong type ({})".format(key, type(value).__name__), path=where)
    return value


def _complex(obj, path) -> complex:
    re = _field(obj, "re", path, numbers.Real)
    im = _field(obj, "im", path, numbers.Real, required=False, default=0.0)
    for key, value in (("re", re), ("im", im)):
        # json accepts NaN and Infinity literals
        if not math.isfinite(value):
            raise ParseError("Field '{}' is not finite ({})".format(key, value),
                             path="{}.{}".format(path, key) if path else key)
    return complex(re, im)


def _index_list(values, path):
    if not isinstance(values, list):
        raise ParseError("Expected a list of node indices", path=path)
    for n, value in enumerate(values):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ParseError("Expected an integer node index", path="{}[{}]".format(path, n))
    return values


def _partition(doc, spec: GraphSpec) -> Partition:
    center = _index_list(_field(doc, "center", "partition", list), "partition.center")
    branches = []
    for b, entry in enumerate(_field(doc, "branches", "partition", list, required=False, default=[])):
        path = "partition.branches[{}]".format(b)
        sites = _index_list(_field(entry, "sites", path, list), path + ".sites")
        root = _field(entry, "root", path, int)
        if "couplings" not in entry:
            branches.append(make_branch(spec, sites, root))
            continue
        couplings = []
        for c, coupling in enumerate(_field(entry, "couplings", path, list)):
            cpath = "{}.couplings[{}]".format(path, c)
            couplings.append((_field(coupling, "site", cpath, int), _complex(coupling, cpath)))
        branches.append(Branch(sites=sites, root=root, couplings=couplings))
    return Partition(center=center, branches=branches)


def parse_graph_file(text: Union[bytes, str]) -> Tuple[GraphSpec, Optional[Partition]]:
    """
    Decode a graph file.

    Returns
    -------
    spec : GraphSpec
    partition : Partition or None

    Raises
    ------
    ParseError
        Malformed UTF-8 or JSON (with line and column), or a missing, mistyped or non-finite field (with its path).
    GraphError
        Index out of range, duplicate edge or self loop in the graph itself.
    ValidationError
        The partition breaks the single-root structure.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError("Graph file is not valid UTF-8: {}".format(e))
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError("Invalid JSON: {}".format(e.msg), line=e.lineno, column=e.colno)

    n_nodes = _field(doc, "n_nodes", "", int)
    if n_nodes < 1:
        raise ParseError("n_nodes must be positive, got {}".format(n_nodes), path="n_nodes")

    hoppings = []
    for n, entry in enumerate(_field(doc, "hoppings", "", list, required=False, default=[])):
        path = "hoppings[{}]".format(n)
        hoppings.append((_field(entry, "i", path, int), _field(entry, "j", path, int), _complex(entry, path)))

    onsites = []
    for n, entry in enumerate(_field(doc, "onsites", "", list, required=False, default=[])):
        path = "onsites[{}]".format(n)
        onsites.append((_field(entry, "i", path, int), _complex(entry, path)))

    spec = GraphSpec(n_nodes=n_nodes, hoppings=hoppings, onsites=onsites)
    build_hamiltonian(spec)

    if doc.get("partition") is None:
        return spec, None
    partition = _partition(_field(doc, "partition", "", dict), spec)
    report = validate_partition(spec, partition)
    if not report.valid:
        raise ValidationError(report)
    return spec, partition


def load_graph_file(path: Union[str, Path]) -> Tuple[GraphSpec, Optional[Partition]]:
    with open(path, "rb") as f:
        return parse_graph_file(f.read())


def _value(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def dump_graph_file(spec: GraphSpec, partition: Optional[Partition] = None) -> str:
    """Serialize a graph (and partition) in the format parse_graph_file reads."""
    doc = {
        "n_nodes": spec.n_nodes,
        "hoppings": [dict(i=i, j=j, **_value(t)) for i, j, t in spec.hoppings],
        "onsites": [dict(i=i, **_value(v)) for i, v in spec.onsites],
    }
    if partition is not None:
        doc["partition"] = {
            "center": list(partition.center),
            "branches": [{"sites": list(b.sites), "root": b.root,
                          "couplings": [dict(site=j, **_value(g)) for j, g in b.couplings]}
                         for b in partition.branches],
        }
    return json.dumps(doc, indent=2)
