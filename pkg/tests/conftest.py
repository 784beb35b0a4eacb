from hypothesis import HealthCheck, settings

settings.register_profile(
    "carasolve", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("carasolve")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
