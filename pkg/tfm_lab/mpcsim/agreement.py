"""Identity agreement by majority over the miners' candidate sets."""

from collections import Counter
from typing import Collection, Iterable, Optional, Sequence


def identity_agreement(reports: Sequence[Collection[str]], m: Optional[int] = None) -> set[str]:
    """
    Identities present in more than m/2 candidate sets.

    Args:
        reports: One candidate set per reporting miner
        m: Number of miners; silent miners count against inclusion
           (defaults to the number of reports)

    Returns:
        Agreed identity set
    """
    m = len(reports) if m is None else m
    votes = Counter(identity for report in reports for identity in set(report))
    return {identity for identity, count in votes.items() if 2 * count > m}


def ordered(identities: Iterable[str], agreed: Collection[str]) -> list[str]:
    """Agreed identities in submission order."""
    return [i for i in identities if i in agreed]


__all__ = ["identity_agreement", "ordered"]
