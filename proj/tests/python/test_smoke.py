def test_pending():
    assert False, "smoke suite not yet implemented"
