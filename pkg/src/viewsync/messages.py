"""Protocol payloads.

Signatures are modelled by :class:`SignedRecord`: the network stamps the
sender on every delivery and refuses to carry embedded records whose signer
never emitted them, so a record is exactly as unforgeable as a signature.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union


@dataclass(frozen=True)
class Value:
    id: str
    valid: bool = True

    def __str__(self):
        return self.id if self.valid else f"{self.id}!"


HashDigest = str


def digest(x: Optional[Value]) -> HashDigest:
    """Idealized collision-free hash: injective on values."""
    if x is None:
        return "#_"
    return f"#{x.id}" if x.valid else f"#{x.id}!"


def _val(x: Optional[Value]) -> str:
    return "_" if x is None else str(x)


@dataclass(frozen=True)
class Wish:
    v: int
    kind = "WISH"

    def __str__(self):
        return f"WISH({self.v})"


@dataclass(frozen=True)
class SignedRecord:
    signer: int
    body: object

    def __str__(self):
        return f"<{self.body}>{self.signer}"


Cert = frozenset  # frozenset[SignedRecord] of PREPARED records


@dataclass(frozen=True)
class NewLeader:
    """``vview`` is the prepared view (HotStuff) or the locked view (PBFT, SBFT).

    ``pre_view`` and ``cur_val`` are only meaningful for SBFT.
    """

    view: int
    vview: int
    val: Optional[Value]
    cert: Optional[Cert]
    pre_view: int = 0
    cur_val: Optional[Value] = None
    kind = "NEWLEADER"

    def __str__(self):
        extra = f",{self.pre_view},{_val(self.cur_val)}" if self.pre_view or self.cur_val else ""
        return f"NEWLEADER({self.view},{self.vview},{_val(self.val)},{cert_str(self.cert)}{extra})"


@dataclass(frozen=True)
class Propose:
    """``just`` is a prepared certificate (HotStuff), the NEWLEADER set M
    (PBFT, SBFT) or the proposer's prepared view (Tendermint)."""

    view: int
    value: Value
    just: Union[None, Cert, tuple, int] = None
    kind = "PROPOSE"

    def __str__(self):
        j = self.just
        if isinstance(j, tuple):
            js = f"M[{','.join(str(r.signer) for r in j)}]"
        elif isinstance(j, frozenset):
            js = cert_str(j)
        else:
            js = "_" if j is None else str(j)
        return f"PROPOSE({self.view},{_val(self.value)},{js})"


@dataclass(frozen=True)
class Prepared:
    view: int
    h: HashDigest
    kind = "PREPARED"

    def __str__(self):
        return f"PREPARED({self.view},{self.h})"


@dataclass(frozen=True)
class PreCommitted:
    view: int
    h: HashDigest
    kind = "PRECOMMITTED"

    def __str__(self):
        return f"PRECOMMITTED({self.view},{self.h})"


@dataclass(frozen=True)
class Committed:
    view: int
    h: HashDigest
    kind = "COMMITTED"

    def __str__(self):
        return f"COMMITTED({self.view},{self.h})"


def cert_str(cert) -> str:
    if not cert:
        return "_"
    rec = next(iter(cert))
    return f"C{rec.body.view}[{','.join(str(s) for s in sorted(r.signer for r in cert))}]"


def embedded_records(msg) -> list[SignedRecord]:
    """Signed records carried inside ``msg`` (certificates and NEWLEADER sets)."""
    out: list[SignedRecord] = []
    if isinstance(msg, NewLeader):
        if msg.cert:
            out.extend(msg.cert)
    elif isinstance(msg, Propose):
        j = msg.just
        if isinstance(j, frozenset):
            out.extend(j)
        elif isinstance(j, tuple):
            for rec in j:
                out.append(rec)
                out.extend(embedded_records(rec.body))
    return out
