import json
import math

import pytest

from sieve_bounds import bounds as bd
from sieve_bounds.buchstab import BuchstabKind
from sieve_bounds.integrals import (
    LOWER,
    LOWER_NAMES,
    SAVINGS,
    UPPER,
    UPPER_NAMES,
    catalog,
    find_spec,
    full_a_spec,
    specs_json,
    weight_eval,
)
from sieve_bounds.regions import COMPOSITE_ARITY, RegionConfig

DOUBLE = {"UA5", "UC04", "UC06", "UC07", "UC08", "UC09", "UC10", "UC11", "UC12", "UC13",
          "VC4", "VC6", "VC7"}
SIMPLE = {"UC05", "UC06", "UC07", "VC5", "VC6", "VC7"}


@pytest.fixture(scope="module")
def lower():
    return catalog(0.52, LOWER)


@pytest.fixture(scope="module")
def upper():
    return catalog(0.52, UPPER)


def test_counts_and_names(lower, upper):
    assert [s.name for s in lower] == list(LOWER_NAMES)
    assert [s.name for s in upper] == list(UPPER_NAMES)
    assert len(lower) == 18 and len(upper) == 16


def test_lower_side_shapes(lower):
    by = {s.name: s for s in lower}
    assert by["UA1"].dim == 2
    assert by["UA2"].dim == 4
    assert by["UA3"].dim == 5 and by["UA3"].sign == -1
    assert by["UA4"].dim == 6
    assert by["UA5"].dim == 4 and by["UA5"].weight.variant == "DoubleBuchstab"


def test_upper_side_shapes(upper):
    by = {s.name: s for s in upper}
    assert by["H"].dim == 1
    for n in ("VA1", "VA4", "VA7", "VA8", "VC1"):
        assert by[n].dim == 3


def test_signs_kinds_variants(lower, upper):
    # the six listed savings plus VA5 (the A1' analogue of VA2)
    assert SAVINGS == {"UA3", "UC02", "UC09", "UC10", "VA2", "VA5", "VC2"}
    for s in lower + upper:
        assert s.sign == (-1 if s.name in SAVINGS else 1)
        kinds = set(s.kind_per_factor)
        if s.sign < 0:
            assert kinds == {BuchstabKind.LOWER}
        elif s.name in SIMPLE:
            assert kinds == {BuchstabKind.SIMPLE_UPPER}
        else:
            assert kinds == {BuchstabKind.UPPER}
        assert s.weight.variant == ("DoubleBuchstab" if s.name in DOUBLE else "SingleBuchstab")
        assert s.dim == COMPOSITE_ARITY[s.name]


def test_denominator_powers(lower, upper):
    # each Buchstab argument variable squared, every other variable to the first power
    for s in lower + upper:
        dens = {f.denom for f in s.weight.factors}
        for i, p in enumerate(s.weight.powers, start=1):
            if i in dens:
                assert p == 2, s.name
            else:
                assert p in (0, 1), s.name


def test_weight_eval_ua1():
    spec = find_spec(0.52, "UA1")
    want = (0.26 / 0.44) / (0.30 * 0.26**2)
    assert weight_eval(spec, (0.30, 0.26)) == pytest.approx(want, rel=1e-14)


def test_weight_eval_predicate_false():
    spec = find_spec(0.52, "UA1")
    # A' point (alpha1 >= 0.38, alpha1 + 3 alpha2 < 1.005) is excluded from U_A1
    assert weight_eval(spec, (0.39, 0.2)) == 0.0


def test_weight_eval_h():
    spec = find_spec(0.52, "H")
    u = 0.67 / 0.33
    want = (1 + math.log(u - 1)) / u / 0.33**2
    assert weight_eval(spec, (0.33,)) == pytest.approx(want, rel=1e-14)


def test_weight_eval_guards():
    spec = find_spec(0.52, "UA1")
    with pytest.raises(ValueError):
        weight_eval(spec, (0.3,))
    with pytest.raises(ValueError):
        weight_eval(spec, (0.3, 0.0))


def test_h_domain_empty_at_0524():
    spec = find_spec(0.524, "H")
    lo, hi = spec.bounds[0].lower, spec.bounds[0].upper
    a = max(r[0] for r in lo)
    b = min(r[0] for r in hi)
    assert not b > a


def test_find_spec_unknown():
    with pytest.raises(ValueError):
        find_spec(0.52, "BOGUS")
    assert full_a_spec(0.52).dim == 2


def test_json_roundtrip(lower):
    doc = json.loads(specs_json(lower))
    assert [d["name"] for d in doc] == list(LOWER_NAMES)
    assert all({"dim", "sign", "kinds", "bounds", "predicate", "weight"} <= d.keys() for d in doc)


def test_eq13_flag_changes_only_uc13():
    a = {s.name: s.to_dict()["bounds"] for s in catalog(0.52, LOWER)}
    b = {s.name: s.to_dict()["bounds"] for s in catalog(0.52, LOWER, RegionConfig(eq13_bound_as_printed=False))}
    assert [n for n in a if a[n] != b[n]] == ["UC13"]


def test_consistency_sums():
    vals = {n: bd.REFERENCE_VALUES[n][0] for n in LOWER_NAMES + UPPER_NAMES}
    losses, total, _ = bd.assemble(LOWER, vals)
    assert round(losses["C"], 6) == 0.491533
    losses, total, _ = bd.assemble(UPPER, vals)
    assert round(losses["A1"], 6) == 0.218374
    assert round(losses["C"], 6) == 0.70461
    assert round(total, 6) == 1.762543
