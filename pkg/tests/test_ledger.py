from sqlalchemy import inspect

from ledger import RunRecord, get_database_url, init_db, list_runs, record_run


def test_database_url_from_environment(ledger_url):
    assert get_database_url() == ledger_url


def test_legacy_postgres_scheme(monkeypatch):
    monkeypatch.setenv("DATABASE_URL", "postgres://user@host/db")
    assert get_database_url() == "postgresql://user@host/db"


def test_init_creates_table(ledger_url):
    engine = init_db(ledger_url)
    assert "runs" in inspect(engine).get_table_names()


def test_record_and_list(ledger_url):
    engine = init_db(ledger_url)
    first = record_run("analytic", "aaaa", 0, engine=engine, config_path="configs/a.json")
    second = record_run("compare", "bbbb", 3, engine=engine, seed=5, trials=100,
                        sup_deviation=0.08, tolerance=0.05, runtime_s=1.5)
    assert isinstance(second, RunRecord)
    assert second.id > first.id

    runs = list_runs(engine=engine)
    assert [r.command for r in runs[:2]] == ["compare", "analytic"]
    latest = runs[0].to_dict()
    assert latest["exit_status"] == 3
    assert latest["sup_deviation"] == 0.08
    assert latest["created_at"] is not None
    assert "compare" in repr(runs[0])


def test_list_limit(ledger_url):
    engine = init_db(ledger_url)
    for i in range(5):
        record_run("simulate", f"hash{i}", 0, engine=engine, seed=i)
    runs = list_runs(limit=3, engine=engine)
    assert [r.seed for r in runs] == [4, 3, 2]


def test_default_engine_uses_environment(ledger_url):
    record_run("analytic", "cccc", 0)
    assert list_runs()[0].config_hash == "cccc"
