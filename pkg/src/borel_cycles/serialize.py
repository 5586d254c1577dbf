"""Text chain files with exact rational coefficient strings and a content digest."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .cyclo import make_field
from .foxbar import Chain
from .matrices import ExactMatrix, MatrixGroup

FORMAT = "borel-chain"
VERSION = 1


class IntegrityError(ValueError):
    pass


class FormatError(ValueError):
    pass


def _canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


@dataclass
class ChainFile:
    chain: Chain
    group: MatrixGroup
    named: dict = field(default_factory=dict)      # label -> group id
    meta: dict = field(default_factory=dict)
    boundary: Chain | None = None

    def _body(self) -> dict:
        g = self.group
        ids = sorted(self.chain.matrix_ids() | set(self.named.values())
                     | (self.boundary.matrix_ids() if self.boundary else set()),
                     key=lambda i: g[i].key)
        index = {gid: k for k, gid in enumerate(ids)}

        def terms(ch):
            rows = [[c, [index[x] for x in t]] for t, c in ch.terms.items()]
            rows.sort(key=lambda r: (r[1], r[0]))
            return rows

        arities = sorted(self.chain.arities())
        body = {
            "header": {
                "format": FORMAT,
                "version": VERSION,
                "kind": self.chain.kind,
                "arity": (arities[0] - (1 if self.chain.kind == "std" else 0)) if len(arities) == 1 else None,
                "dimension": g.dim,
                "conductor": g.field.n,
            },
            "matrices": [[[str(c) for c in e.coeffs] for e in g[i].entries] for i in ids],
            "terms": terms(self.chain),
            "named": {k: index[v] for k, v in sorted(self.named.items())},
            "meta": self.meta,
        }
        if self.boundary is not None:
            body["boundary"] = terms(self.boundary)
        return body

    def to_json(self) -> dict:
        body = self._body()
        body["digest"] = hashlib.sha256(_canonical({k: v for k, v in body.items() if k != "meta"}).encode()).hexdigest()
        return body

    def write(self, path) -> str:
        obj = self.to_json()
        Path(path).write_text(json.dumps(obj, indent=1, sort_keys=True))
        return obj["digest"]

    @classmethod
    def from_json(cls, obj: dict, group: MatrixGroup | None = None, check: bool = True) -> "ChainFile":
        try:
            head = obj["header"]
            if head["format"] != FORMAT or head["version"] != VERSION:
                raise FormatError("unsupported chain file format")
            if check:
                body = {k: v for k, v in obj.items() if k not in ("digest", "meta")}
                if hashlib.sha256(_canonical(body).encode()).hexdigest() != obj.get("digest"):
                    raise IntegrityError("chain file digest does not match its content")
            F = make_field(int(head["conductor"]))
            dim = int(head["dimension"])
            if group is None:
                group = MatrixGroup(F, dim)
            elif group.dim != dim or group.field.n != F.n:
                raise FormatError("group does not match the file header")
            ids = []
            for ent in obj["matrices"]:
                m = ExactMatrix(F, dim, [F.from_coeffs([Fraction(s) for s in e]) for e in ent])
                ids.append(group.intern(m))

            def chain_of(rows, kind):
                ch = Chain(kind)
                for c, t in rows:
                    ch.add_term(tuple(ids[k] for k in t), int(c))
                return ch

            chain = chain_of(obj["terms"], head["kind"])
            boundary = chain_of(obj["boundary"], "bar") if "boundary" in obj else None
            named = {k: ids[v] for k, v in obj.get("named", {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, (IntegrityError, FormatError)):
                raise
            raise FormatError(f"malformed chain file: {exc}") from exc
        return cls(chain, group, named, obj.get("meta", {}), boundary)

    @classmethod
    def read(cls, path, group: MatrixGroup | None = None, check: bool = True) -> "ChainFile":
        try:
            obj = json.loads(Path(path).read_text())
        except ValueError as exc:
            raise FormatError(f"not a JSON chain file: {exc}") from exc
        return cls.from_json(obj, group, check)
