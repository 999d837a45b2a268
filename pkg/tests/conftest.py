ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, note in sorted(ACCEPTANCE):
        mark = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{mark}] {number}. {title}{'  ' + note if note else ''}")
