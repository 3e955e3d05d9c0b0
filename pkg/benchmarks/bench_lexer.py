"""Compare the compiled scanner with the pure-Python fallback.

    python benchmarks/bench_lexer.py [--repeat N]

Scans every lexable C file under --root (default: the test fixtures) plus a generated corpus, checks that both
scanners agree, and prints throughput for each.
"""
import argparse
import statistics
import sys
import time
from pathlib import Path

from ompadvisor.frontend import LexError, _scan
from ompadvisor.frontend.lexer import lex
from ompadvisor.synthetic import SynthConfig, generate_corpus

try:
    from ompadvisor.frontend import _cscan
except ImportError:
    _cscan = None


def sources(root):
    texts = [p.read_text(encoding="utf-8", errors="replace") for p in sorted(root.rglob("*.c"))]
    texts += [r.code_text for r in generate_corpus(SynthConfig(n=500))]
    ok = []
    for s in texts:
        try:
            _scan.scan(s)
        except LexError:
            continue
        ok.append(s)
    return ok


def timed(fn, texts, repeat):
    runs = []
    for _ in range(repeat):
        t = time.perf_counter()
        for s in texts:
            fn(s)
        runs.append(time.perf_counter() - t)
    return statistics.median(runs)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--root", default=str(Path(__file__).resolve().parents[1] / "tests" / "fixtures"))
    args = ap.parse_args()
    texts = sources(Path(args.root))
    nbytes = sum(len(s) for s in texts)
    print(f"{len(texts)} sources, {nbytes / 1e6:.2f} MB")
    if _cscan is None:
        print("compiled scanner not built; only the fallback is timed")
    else:
        mismatched = sum(lex(s, scanner=_scan.scan) != lex(s, scanner=_cscan.scan) for s in texts)
        if mismatched:
            print(f"scanners disagree on {mismatched} sources", file=sys.stderr)
            return 1
    scanners = {"python": _scan.scan}
    if _cscan is not None:
        scanners["cython"] = _cscan.scan
    # raw scan is the kernel; full lex adds Token construction on top
    for stage in ("scan", "lex"):
        results = {}
        for name, scan in scanners.items():
            fn = scan if stage == "scan" else (lambda s, scan=scan: lex(s, scanner=scan))
            results[name] = timed(fn, texts, args.repeat)
            sec = results[name]
            print(f"{stage:<5}{name:<8}{sec * 1e3:>10.1f} ms{nbytes / sec / 1e6:>10.2f} MB/s")
        if len(results) == 2:
            print(f"{stage:<5}speedup {results['python'] / results['cython']:.2f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
