"""Pay-level domain derivation via public-suffix rules.

Implements the standard matching algorithm over a rule file in the usual
format: one rule per line, ``//`` comments, ``*`` wildcard labels, and ``!``
exception rules. Among matching rules an exception wins outright (its
effective suffix drops the leading label); otherwise the rule with the most
labels wins; when nothing matches, the implicit ``*`` rule makes the last
label the suffix. The pay-level domain is the matched suffix plus exactly
one more label.

Rules are indexed both as written and in IDNA form, so Unicode rules match
punycoded hostnames and vice versa.

The bundled rule file is a trimmed subset sufficient for the suffix classes
this toolkit meets in practice; point ``PublicSuffixList`` at a full
downloaded list for production-scale domain analytics.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ProbekitError


@dataclass(frozen=True)
class DomainKey:
    pld: str

    def __str__(self) -> str:
        return self.pld


def _idna(label: str) -> str | None:
    if label == "*" or label.isascii():
        return None
    try:
        return label.encode("idna").decode("ascii")
    except UnicodeError:
        return None


class PublicSuffixList:
    def __init__(self, rules: list[str]):
        self._exact: set[tuple[str, ...]] = set()
        self._wildcard: set[tuple[str, ...]] = set()
        self._exception: set[tuple[str, ...]] = set()
        for rule in rules:
            exception = rule.startswith("!")
            if exception:
                rule = rule[1:]
            variants = [tuple(rule.split("."))]
            ascii_labels = tuple(_idna(lbl) or lbl for lbl in variants[0])
            if ascii_labels != variants[0]:
                variants.append(ascii_labels)
            for labels in variants:
                if exception:
                    self._exception.add(labels)
                elif labels[0] == "*":
                    self._wildcard.add(labels)
                else:
                    self._exact.add(labels)

    @classmethod
    def from_file(cls, path: str | Path) -> "PublicSuffixList":
        rules = []
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("//"):
                continue
            rules.append(line.lower())
        return cls(rules)

    @classmethod
    def load_default(cls) -> "PublicSuffixList":
        return cls.from_file(str(resources.files("probekit").joinpath("data", "public_suffix_list.dat")))

    def _suffix_length(self, labels: tuple[str, ...]) -> int:
        """Number of labels in the public suffix of ``labels``."""
        n = len(labels)
        for i in range(n):  # longest suffix first
            if labels[i:] in self._exception:
                return n - i - 1
        for i in range(n):
            suffix = labels[i:]
            if suffix in self._exact:
                return n - i
            if ("*",) + suffix[1:] in self._wildcard:
                return n - i
        return 1  # implicit "*" rule

    def registrable_domain(self, host: str) -> str | None:
        """The pay-level domain of ``host``, or None when host is itself a
        public suffix or malformed."""
        if not host:
            return None
        host = host.strip().rstrip(".").lower()
        if not host or host.startswith("."):
            return None
        labels = tuple(host.split("."))
        if any(not label for label in labels):
            return None
        suffix_len = self._suffix_length(labels)
        if len(labels) <= suffix_len:
            return None
        return ".".join(labels[-(suffix_len + 1):])


_DEFAULT: PublicSuffixList | None = None


def default_list() -> PublicSuffixList:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = PublicSuffixList.load_default()
    return _DEFAULT


def pld(host: str, rules: PublicSuffixList | None = None) -> DomainKey:
    """DomainKey for a hostname; raises when no registrable domain exists."""
    rules = rules or default_list()
    domain = rules.registrable_domain(host)
    if domain is None:
        raise ProbekitError(f"no registrable domain for {host!r}")
    return DomainKey(pld=domain)


def pld_of_url(url: str, rules: PublicSuffixList | None = None) -> DomainKey:
    from urllib.parse import urlparse

    host = urlparse(url).hostname or ""
    return pld(host, rules)
