#!/usr/bin/env python3
"""Smoke test for the sentinet_py module.

Install the bindings first:

    pip install maturin
    pip install --no-build-isolation ./crates/py

Then run this script from anywhere inside the repository.
"""

from pathlib import Path

import sentinet_py

ROOT = Path(__file__).resolve().parent.parent


def main() -> None:
    scenario = sentinet_py.Scenario.load(str(ROOT / "scenarios" / "baseline.toml"))
    print(scenario)

    first = scenario.run()
    second = scenario.run()
    assert first.log_hash == second.log_hash, "same seed must replay identically"
    assert first.conservation_holds(), "packet accounting out of balance"

    report = first.report()
    assert report["alarms"] == 0, "clean traffic must not alarm"
    assert report["rules_installed"] == 0
    assert report["false_positive_rate"] == 0.0
    print(f"baseline: injected={first.injected} delivered={first.delivered} "
          f"goodput_before={report['goodput_before']:.4f}")

    kinds = {row["kind"] for row in sentinet_py.list_attacks()}
    assert {"udp_flood", "smurf", "ping_of_death", "land", "shrew"} <= kinds
    print(f"attack catalogue: {len(kinds)} kinds")

    # Feed a trust model bad feedback until it condemns the cluster.
    model = sentinet_py.TrustModel()
    cluster = model.observe([5.0, 6.2, 1.0, 0.0], 1, 2, "udp", 0.0)
    trust = None
    for _ in range(12):
        trust = model.update_trust(cluster, 0.0)
    assert model.classify(cluster) == "malicious"
    print(f"trust model: cluster {cluster} trust={trust:.4f} -> malicious")

    print("smoke test ok")


if __name__ == "__main__":
    main()
