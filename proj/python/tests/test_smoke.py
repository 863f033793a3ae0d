import pytest

import abehg

POLICY_T = (
    "Position: Doctor Position: Researcher Position: Professor 1of3 Department: Radiology 2of2 "
    "Position: PhD Position: Postdoc 1of3 University: AMU 2of2"
)
POLICY_T_BOOLEAN = (
    "[[[[position = Doctor OR position = Researcher OR position = Professor] AND Department = "
    "Radiology] OR position = PhD OR position = Postdoc] AND University = AMU]"
)


def test_policy_forms_agree():
    assert abehg.parse_policy(POLICY_T) == abehg.parse_infix(POLICY_T_BOOLEAN)
    assert abehg.normalize_attribute("Position = Doctor") == "position:doctor"


def test_satisfies():
    assert abehg.satisfies(POLICY_T, ["Position: PhD", "University: AMU"])
    assert not abehg.satisfies(POLICY_T, ["Position: Doctor"])


def test_parse_error():
    with pytest.raises(abehg.ParseError) as info:
        abehg.parse_policy("a 2of2")
    assert info.value.code == "parse_error"
    assert isinstance(info.value, abehg.Error)


def test_seal_and_open():
    pk, msk = abehg.setup()
    doctor = abehg.keygen(pk, msk, ["Position: Doctor", "Department: Radiology", "University: AMU"])
    student = abehg.keygen(pk, msk, ["Position: Student", "University: AMU"])
    env = abehg.seal(pk, POLICY_T, b"\x00scan\xff", content_type="image/raw", owner_id="o1")
    assert abehg.open_envelope(pk, doctor, env) == b"\x00scan\xff"
    with pytest.raises(abehg.PolicyNotSatisfiedError):
        abehg.open_envelope(pk, student, env)


def test_fit_linear():
    rows = [(p, n, t, 100.0 * n + t) for p in ("keygen", "decrypt") for n in (1, 2, 3) for t in (1, 2)]
    fits = {f["phase"]: f for f in abehg.fit_linear(rows)}
    assert fits["keygen"]["slope"] == pytest.approx(100.0)
    assert fits["decrypt"]["r_squared"] == pytest.approx(1.0)
