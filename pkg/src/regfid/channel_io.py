"""Channel description files.

YAML documents of one of two kinds::

    kind: pauli
    p: [0.1, 0.2, 0.3, 0.4]

    kind: kraus
    dim: 2
    kraus:
      - [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]

Each Kraus operator is a row-major list of ``[real, imag]`` pairs.  Floats
are written with ``repr`` precision, so write -> read is value-identical.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
import yaml

from .channel import Channel, make_channel
from .errors import ChannelFileError, InvalidProbabilities
from .pauli import PauliChannel


def _line_of(node: yaml.Node | None, key: str) -> int | None:
    if not isinstance(node, yaml.MappingNode):
        return None
    for k, _ in node.value:
        if getattr(k, "value", None) == key:
            return k.start_mark.line + 1
    return None


def _number(value, field: str, line: int | None) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ChannelFileError(f"expected a number, got {value!r}", field, line)
    return float(value)


def parse_channel(text: str) -> PauliChannel | Channel:
    """Parse a channel description; returns a :class:`PauliChannel` or a :class:`Channel`."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ChannelFileError(f"not valid YAML: {getattr(exc, 'problem', exc)}",
                               line=None if mark is None else mark.line + 1) from exc
    if not isinstance(doc, dict):
        raise ChannelFileError("expected a mapping at top level")
    kind = doc.get("kind")
    if kind == "pauli":
        line = _line_of(node, "p")
        p = doc.get("p")
        if not isinstance(p, list) or len(p) != 4:
            raise ChannelFileError("expected a list of four probabilities", "p", line)
        try:
            return PauliChannel(tuple(_number(v, "p", line) for v in p))
        except InvalidProbabilities as exc:
            raise ChannelFileError(str(exc), "p", line) from exc
    if kind == "kraus":
        dim = doc.get("dim")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise ChannelFileError("expected a positive integer", "dim", _line_of(node, "dim"))
        line = _line_of(node, "kraus")
        ops = doc.get("kraus")
        if not isinstance(ops, list) or not ops:
            raise ChannelFileError("expected a non-empty list of Kraus operators", "kraus", line)
        mats = []
        for i, op in enumerate(ops):
            if not isinstance(op, list) or len(op) != dim * dim:
                raise ChannelFileError(f"operator {i} needs {dim * dim} [re, im] entries", "kraus", line)
            entries = []
            for pair in op:
                if not isinstance(pair, list) or len(pair) != 2:
                    raise ChannelFileError(f"operator {i}: entries must be [re, im] pairs", "kraus", line)
                entries.append(complex(_number(pair[0], "kraus", line), _number(pair[1], "kraus", line)))
            mats.append(np.array(entries).reshape(dim, dim))
        return make_channel(mats)
    raise ChannelFileError(f"unknown kind {kind!r} (expected 'pauli' or 'kraus')", "kind", _line_of(node, "kind"))


def read_channel(path: str | Path) -> PauliChannel | Channel:
    return parse_channel(Path(path).read_text())


def dump_channel(channel: PauliChannel | Channel) -> str:
    if isinstance(channel, PauliChannel):
        doc = {"kind": "pauli", "p": list(channel.p)}
    else:
        ops = [[[float(z.real), float(z.imag)] for z in k.ravel()] for k in channel.kraus]
        doc = {"kind": "kraus", "dim": channel.dim, "kraus": ops}
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def write_channel(channel: PauliChannel | Channel, path: str | Path) -> None:
    Path(path).write_text(dump_channel(channel))
