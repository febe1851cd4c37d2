import pathlib

import pytest

FIXTURES = pathlib.Path(__file__).parent / 'fixtures'

# criterion number -> (title, outcome); filled in as acceptance tests report
_acceptance = {}


def pytest_configure(config):
    config.addinivalue_line(
        'markers', 'acceptance(number, title): one acceptance criterion of the build')


def pytest_collection_finish(session):
    # runs after -k/-m deselection, so only selected criteria are listed
    for item in session.items:
        marker = item.get_closest_marker('acceptance')
        if marker is not None:
            number, title = marker.args
            _acceptance.setdefault(number, [title, 'NOT RUN'])


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker('acceptance')
    if marker is None or call.when != 'call':
        return
    number, title = marker.args
    entry = _acceptance.setdefault(number, [title, 'NOT RUN'])
    failed = call.excinfo is not None
    # several tests may share a criterion; any failure sinks it
    if failed:
        entry[1] = 'FAIL'
    elif entry[1] != 'FAIL':
        entry[1] = 'PASS'


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section('acceptance criteria')
    for number in sorted(_acceptance):
        title, outcome = _acceptance[number]
        terminalreporter.write_line('%-7s criterion %d: %s' % (outcome, number, title))


@pytest.fixture
def fixture_text():
    def read(name):
        return (FIXTURES / name).read_bytes()
    return read
