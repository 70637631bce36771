from x0plus import modsym
from x0plus.cache import OperatorCache


def test_store_and_load_round_trip(tmp_path):
    store = OperatorCache(str(tmp_path))
    s = modsym.build_space(37)
    t2 = s.hecke_matrix(2)
    w = s.atkin_lehner_matrix(37)
    path = store.store(s)
    assert path is not None

    fresh = modsym.build_space(37)
    assert not fresh._operators
    adopted = store.load_into(fresh)
    assert adopted == 2
    assert fresh.hecke_matrix(2) == t2
    assert fresh.atkin_lehner_matrix(37) == w


def test_missing_and_corrupt_files_ignored(tmp_path):
    store = OperatorCache(str(tmp_path))
    s = modsym.build_space(37)
    assert store.load_into(s) == 0
    (tmp_path / "level37.ops").write_text("not a cache file")
    assert store.load_into(s) == 0
    records = store.inspect()
    assert records and records[0]["status"] == "stale"


def test_version_header_invalidates(tmp_path):
    store = OperatorCache(str(tmp_path))
    s = modsym.build_space(37)
    s.hecke_matrix(2)
    path = store.store(s)
    text = open(path).read()
    open(path, "w").write(text.replace("modsym v", "modsym v9"))
    fresh = modsym.build_space(37)
    assert store.load_into(fresh) == 0


def test_inspect_and_clear(tmp_path):
    store = OperatorCache(str(tmp_path))
    for n in (11, 37):
        s = modsym.build_space(n)
        s.hecke_matrix(2)
        store.store(s)
    records = store.inspect()
    assert [r["level"] for r in records] == [11, 37]
    assert records[0]["operators"] == ["T2"]
    assert store.clear() == 2
    assert store.inspect() == []


def test_store_writes_are_deterministic(tmp_path):
    a = OperatorCache(str(tmp_path / "a"))
    b = OperatorCache(str(tmp_path / "b"))
    for store in (a, b):
        s = modsym.build_space(59)
        s.hecke_matrix(2)
        s.atkin_lehner_matrix(59)
        store.store(s)
    assert (
        open(a.path_for(59)).read() == open(b.path_for(59)).read()
    )
