"""Shared builders for hand-made and randomized datasets."""
from __future__ import annotations

import numpy as np

from patentflow import PatentMeta, assemble_dataset


def make_dataset(edges, metas):
    """Dataset from (citing_id, cited_id) string pairs and meta tuples.

    Each meta tuple is (patent_id, class, year, assignee); year may be None.
    """
    records = [
        PatentMeta(patent_id=pid, primary_class=cls, grant_year=year, assignee=asg)
        for pid, cls, year, asg in metas
    ]
    return assemble_dataset(edges, records)


def random_dataset(
    seed: int,
    n: int = 120,
    edge_factor: float = 3.0,
    classes=("100", "200", "300", "400"),
    assignees=("acme", "globex", "initech", ""),
    years=(1995, 2005),
    unknown_frac: float = 0.12,
    placeholder_frac: float = 0.08,
):
    """Messy random dataset: unknown years/classes and metadata-less citers."""
    rng = np.random.default_rng(seed)
    ids = [f"p{i:04d}" for i in range(n)]
    metas = []
    n_meta = int(n * (1.0 - placeholder_frac))
    for i in range(n_meta):
        cls = "" if rng.random() < unknown_frac / 2 else str(rng.choice(classes))
        year = None if rng.random() < unknown_frac else int(rng.integers(years[0], years[1] + 1))
        metas.append((ids[i], cls, year, str(rng.choice(assignees))))
    m = int(n * edge_factor)
    src = rng.integers(0, n, size=m)
    dst = rng.integers(0, n, size=m)
    edges = [(ids[int(a)], ids[int(b)]) for a, b in zip(src, dst)]
    return make_dataset(edges, metas)
