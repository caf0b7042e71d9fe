def pytest_terminal_summary(terminalreporter):
    """Collect the acceptance verdict lines, which are otherwise captured."""
    lines = []
    for key in ("passed", "failed"):
        for rep in terminalreporter.stats.get(key, []):
            if rep.when == "call":
                lines += [l for l in rep.capstdout.splitlines() if l.startswith("criterion ")]
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
