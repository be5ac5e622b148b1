"""Re-emit the acceptance verdict lines after the run.

The acceptance tests print one ``criterion N (<label>): PASS|FAIL`` line
each, which default capture would otherwise hide on success.  This hook
pulls those lines out of the captured output and prints them as a closing
checklist, so a plain ``pytest`` log always ends with the seven verdicts.
"""


def pytest_terminal_summary(terminalreporter):
    lines = []
    for reports in terminalreporter.stats.values():
        for report in reports:
            if getattr(report, "when", None) != "call":
                continue
            for line in getattr(report, "capstdout", "").splitlines():
                if line.startswith("criterion "):
                    lines.append(line)
    if not lines:
        return
    lines.sort(key=lambda line: int(line.split()[1]))
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.line(line)
