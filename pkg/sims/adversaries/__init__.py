# Adversaries Package
from .adversaries import (
    ADVERSARY, ADVERSARY_MAP, Adversary, AdversaryDecision, EventKind, LinkEvent, OffAction, OffQueue,
    make_adversary,
)

__all__ = [
    'ADVERSARY', 'ADVERSARY_MAP', 'Adversary', 'AdversaryDecision', 'EventKind', 'LinkEvent', 'OffAction',
    'OffQueue', 'make_adversary',
]
