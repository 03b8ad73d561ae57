from __future__ import annotations

import pytest

from dpcover.catalog import load_catalog
from dpcover.chargroup import GroupElement
from dpcover.cover import BuildingData
from dpcover.documents import solve_character_classes
from dpcover.picard import NamedCurve, surface_context, template_class


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


@pytest.fixture(scope="session")
def by_name(catalog):
    return {entry.name: entry for entry in catalog}


def make_data(k: int, branch_spec: dict, L=None) -> BuildingData:
    """Build data from {"sigma": [(label, template, member), ...]}; L solved if omitted."""
    ctx = surface_context(k)
    branch = {}
    for key, curves in branch_spec.items():
        branch[GroupElement.of(key)] = tuple(
            NamedCurve(label=lbl, cls=template_class(k, tpl), member=mem) for lbl, tpl, mem in curves
        )
    if L is None:
        L = solve_character_classes(ctx, branch)
    return BuildingData(ctx=ctx, branch=branch, L=L)
