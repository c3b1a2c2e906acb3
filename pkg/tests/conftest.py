from datetime import datetime, timedelta, timezone

import pytest

from polartrack.geo import load_gazetteer
from polartrack.ingest import TweetRecord

T0 = datetime(2015, 9, 1, tzinfo=timezone.utc)


@pytest.fixture(scope="session")
def gz():
    return load_gazetteer()


def tweet(tid, author, tags=(), day=0, sec=0, text="", **kw):
    return TweetRecord(str(tid), str(author), T0 + timedelta(days=day, seconds=sec),
                       text=text, hashtags=tuple(tags), **kw)


def pytest_terminal_summary(terminalreporter):
    module = __import__("sys").modules.get("test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
