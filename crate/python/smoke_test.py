#!/usr/bin/env python3
"""Smoke test for the hamloc_py extension module.

Build the module first, then run this script from anywhere:

    cargo build -p hamloc-py
    python3 python/smoke_test.py
"""

import json
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def locate_extension():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("debug", "release")
        for name in ("libhamloc_py.so", "libhamloc_py.dylib")
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("extension not built; run: cargo build -p hamloc-py")
    return max(built, key=lambda p: p.stat().st_mtime)


def main():
    staging = Path(tempfile.mkdtemp(prefix="hamloc_py."))
    shutil.copy2(locate_extension(), staging / "hamloc_py.so")
    sys.path.insert(0, str(staging))
    import hamloc_py as hl

    # CP^3: profile, volume, validation, certification.
    data, model = hl.gen_cpn([0, 1, 2, 3])
    assert data.n == 3 and data.point_count == 4
    assert data.ids() == ["e0", "e1", "e2", "e3"]
    assert data.weights("e0") == [1, 2, 3] and data.morse_index("e3") == 6
    assert data.betti() == [1, 1, 1, 1] and data.unimodal_mode() == 0
    assert data.volume() == "1"
    assert data.duality_violation() is None and data.index_violation() is None
    assert hl.validate(data, model) == []
    cert = json.loads(hl.certify(data, model))
    assert cert["verdict"] == "profile-unimodal" and cert["mode"] == 0

    # JSON round trips through the canonical serializers.
    again = hl.Dataset.from_json(data.to_json())
    assert again.to_json() == data.to_json()
    model_again = hl.Model.from_json(data, model.to_json(data))
    assert model_again.to_json(data) == model.to_json(data)
    assert model.degrees() == [0, 2, 4] and model.dim(2) == 2
    assert model.basis(0) == [["1", "1", "1", "1"]]

    # CP^2 x CP^1 carries the convolution profile and verifies cleanly.
    left, left_model = hl.gen_cpn([0, 1, 2])
    right, right_model = hl.gen_cpn([0, 1])
    prod, prod_model = hl.gen_product(left, left_model, right, right_model)
    assert prod.betti() == [1, 2, 2, 1] and prod.unimodal_mode() == 1
    assert hl.validate(prod, prod_model) == []
    verified = json.loads(hl.verify_mechanism(prod, prod_model))
    assert verified["verdict"] == "mechanism-verified" and verified["checked"] == [0]

    # Localization integrals are exact: the degree rule and a unit check.
    scalar, u_exp, rendered = hl.integrate(prod, 0, ["1"] * prod.point_count)
    assert (scalar, u_exp, rendered) == ("0", -3, "0 * u^-3")
    scalar, u_exp, rendered = hl.integrate(right, 2, ["0", "1"])
    assert (scalar, u_exp, rendered) == ("-1", 0, "-1 * u^0")

    # The synthetic fixture yields the worked inconsistency certificate.
    syn, syn_model = hl.synthetic_n5()
    assert syn.betti() == [1, 2, 1, 1, 2, 1]
    found = hl.find_class(syn, syn_model, 2, ["p0", "p4"])
    assert found == ["0", "1", "0", "0", "0", "0", "0", "0"]
    assert hl.find_class(data, model, 2, ["e0", "e1"]) is None
    cert = json.loads(hl.certify(syn, syn_model))
    assert cert["verdict"] == "inconsistent" and cert["k"] == 1
    assert cert["separators"] == ["7/4", "19/4"] and cert["total"] == "-45/16"
    assert cert == json.loads(hl.verify_mechanism(syn, syn_model))

    # Corruptions are caught with named identities.
    broken = hl.corrupt_weight(left, "e0", 1, 3)
    failures = hl.validate(broken)
    assert any("moment identity at e = 0: residual -1/6" in f for f in failures)
    tilted = hl.corrupt_moment(left, "e1", "5/2")
    assert any("not index-increasing" in f for f in hl.validate(tilted))

    # A violation window that is too narrow is refused, not certified.
    thin, thin_model = hl.degenerate_n4()
    try:
        hl.certify(thin, thin_model)
    except ValueError as err:
        assert "degenerate" in str(err)
    else:
        sys.exit("degenerate dataset must be refused")

    print("hamloc_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
