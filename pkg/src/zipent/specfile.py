"""Reading and writing zip shift spec files (JSON)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .alphabets import AlphabetPair, ProbabilityVector, induce_z_distribution, parse_word
from .measure import MeasureSpec
from .space import ForbiddenWord, SubZipShift

SHIPPED = (
    "ex31",
    "ex31_perturbed",
    "ex2",
    "golden_mean",
    "fibers21",
    "identity2",
    "bad",
)


@dataclass(frozen=True)
class ZipSpec:
    pair: AlphabetPair
    p_s: ProbabilityVector
    p_z: ProbabilityVector
    sub: SubZipShift
    p_z_given: bool = False

    @property
    def measure(self) -> MeasureSpec:
        return MeasureSpec(self.pair, self.p_s, self.p_z)

    def to_json(self) -> dict:
        out = {
            "s_symbols": list(self.pair.s_symbols),
            "z_symbols": list(self.pair.z_symbols),
            "tau": dict(self.pair.tau),
            "p_s": self.p_s.to_json(),
        }
        if self.p_z_given:
            out["p_z"] = self.p_z.to_json()
        if self.sub.forbidden:
            sides = {f.side for f in self.sub.forbidden}
            if len(sides) > 1:
                out["forbidden"] = [
                    {"side": side, "words": ["".join(f.word) for f in self.sub.forbidden if f.side == side]}
                    for side in sorted(sides)
                ]
            else:
                out["forbidden"] = {"side": sides.pop(), "words": ["".join(f.word) for f in self.sub.forbidden]}
        return out


def _forbidden(entry, pair: AlphabetPair) -> tuple:
    blocks = entry if isinstance(entry, list) else [entry]
    out = []
    for block in blocks:
        side = str(block["side"]).upper()
        alphabet = pair.alphabet(side)
        out.extend(ForbiddenWord(side, parse_word(w, alphabet)) for w in block.get("words", []))
    return tuple(out)


def spec_from_dict(data: dict) -> ZipSpec:
    """Build a :class:`ZipSpec`; a missing ``p_s`` means uniform, a missing ``p_z`` means the induced one."""
    missing = [k for k in ("s_symbols", "z_symbols", "tau") if k not in data]
    if missing:
        raise ValueError(f"spec is missing {missing}")
    pair = AlphabetPair(tuple(data["s_symbols"]), tuple(data["z_symbols"]), data["tau"])
    if "p_s" in data:
        p_s = ProbabilityVector(pair.s_symbols, tuple(data["p_s"]))
    else:
        p_s = ProbabilityVector.uniform(pair.s_symbols)
    given = data.get("p_z") is not None
    p_z = ProbabilityVector(pair.z_symbols, tuple(data["p_z"])) if given else None
    sub = SubZipShift(pair, _forbidden(data["forbidden"], pair) if data.get("forbidden") else ())
    if p_z is None:
        p_z = induce_z_distribution(p_s, pair)
    return ZipSpec(pair, p_s, p_z, sub, given)


def load_spec(source) -> ZipSpec:
    """Load from a path, a JSON string, a dict, or the name of a shipped example."""
    if isinstance(source, dict):
        return spec_from_dict(source)
    text = str(source)
    if text in SHIPPED:
        return spec_from_dict(json.loads(shipped_path(text).read_text()))
    if text.lstrip().startswith("{"):
        return spec_from_dict(json.loads(text))
    return spec_from_dict(json.loads(Path(text).read_text()))


def dump_spec(spec: ZipSpec, path=None) -> str:
    text = json.dumps(spec.to_json(), indent=2)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def shipped_path(name: str) -> Path:
    return Path(str(resources.files("zipent") / "data" / f"{name}.json"))
