"""Term files with their expected verdicts in structured comments.

A corpus file holds one term. Leading comment lines of the form
``# key: value`` attach metadata::

    # name: Mask:Read
    # env: a=ref
    # expect.oracle: pure
    let x = ref true in !x

``env`` lists the ambient variables, ``hole`` overrides the simple type used
by the purity oracle (needed for terms without one), and every
``expect.<check>`` key is an expected outcome that
:func:`purelab.suites.compare_entry` checks.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional

from .environment import EMPTY_ENV, EnvSpec
from .simple import read_annot_simple
from .syntax import ParseError, Term, parse, parse_type
from .types import SimpleType

GOLDEN_SETS = ("terms", "functions", "annotated", "crosscheck")
SUFFIX = ".lam"

_HEADER = re.compile(r"#\s*([\w.-]+)\s*:\s*(.*?)\s*$")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    source: str
    term: Term
    env: EnvSpec = EMPTY_ENV
    hole: Optional[SimpleType] = None
    expect: dict[str, str] = field(default_factory=dict, hash=False, compare=False)
    path: str = ""


def read_entry(text: str, path: str = "") -> CorpusEntry:
    """Parse one corpus file; raises ``ParseError`` on a malformed term."""
    meta: dict[str, str] = {}
    for line in text.splitlines():
        m = _HEADER.match(line.strip())
        if m:
            meta.setdefault(m.group(1), m.group(2))
    term = parse(text)
    hole = read_annot_simple(*parse_type(meta["hole"])) if "hole" in meta else None
    expect = {k[len("expect."):]: v for k, v in meta.items() if k.startswith("expect.")}
    return CorpusEntry(
        name=meta.get("name", Path(path).stem),
        source=text,
        term=term,
        env=EnvSpec.parse(meta.get("env", "")),
        hole=hole,
        expect=expect,
        path=path,
    )


def load_dir(directory: Path | str, errors: Optional[list[dict]] = None) -> list[CorpusEntry]:
    """Every ``*.lam`` file under ``directory``, in path order.

    A file that does not parse raises, unless ``errors`` is given; then it is
    skipped and noted there.
    """
    out = []
    for p in sorted(Path(directory).rglob("*" + SUFFIX)):
        try:
            out.append(read_entry(p.read_text(encoding="utf-8"), str(p)))
        except ParseError as exc:
            if errors is None:
                raise
            errors.append({"path": str(p), "error": str(exc)})
    return out


def golden(*sets: str) -> list[CorpusEntry]:
    """The bundled golden corpus, optionally restricted to some of its sets."""
    chosen = sets or GOLDEN_SETS
    unknown = set(chosen) - set(GOLDEN_SETS)
    if unknown:
        raise ValueError(f"unknown golden sets: {sorted(unknown)}")
    base = resources.files("purelab") / "golden"
    out = []
    for name in chosen:
        files = sorted((f for f in (base / name).iterdir() if f.name.endswith(SUFFIX)), key=lambda f: f.name)
        out += [read_entry(f.read_text(encoding="utf-8"), f"{name}/{f.name}") for f in files]
    return out


def terms(entries: Iterable[CorpusEntry]) -> list[Term]:
    return [e.term for e in entries]
