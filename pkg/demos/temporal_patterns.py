# Trajectory detection: the same protocol can look clean in every static
# snapshot while its recent state transitions carry the whole signal.

from ninedim import StateTransitionEvent, build_timeline, detect_signals

# Window compression: threshold cut and timelock removal in one transaction.
migration = build_timeline(
    "governed-protocol",
    [
        StateTransitionEvent(
            "governed-protocol", "2026-03-27T12:00:00Z", "ThresholdChange",
            before="4-of-7", after="2-of-5", quality="verified-onchain",
        ),
        StateTransitionEvent(
            "governed-protocol", "2026-03-27T12:00:00Z", "TimelockChange",
            before=172800, after=0, quality="verified-onchain",
        ),
    ],
)
for signal in detect_signals(migration):
    print(f"{signal.pattern}: {signal.severity.label} - {signal.explanation}")

# Attacker staging: slow accumulation toward a supply-cap share.
staging = build_timeline(
    "target-market",
    [
        StateTransitionEvent("target-market", "2025-06-15", "SupplyAccumulation", after=0.10),
        StateTransitionEvent("target-market", "2025-12-15", "SupplyAccumulation", after=0.55),
        StateTransitionEvent("target-market", "2026-03-10", "SupplyAccumulation", after=0.84),
    ],
)
for signal in detect_signals(staging):
    print(f"{signal.pattern}: {signal.severity.label} - {signal.explanation}")

# Ignored warning: a public flag, no remediation, then an incident.
warned = build_timeline(
    "warned-protocol",
    [
        StateTransitionEvent("warned-protocol", "2025-01-15", "PublicWarning", quality="audited-doc"),
        StateTransitionEvent("warned-protocol", "2026-04-02", "Incident"),
    ],
)
for signal in detect_signals(warned):
    print(f"{signal.pattern}: {signal.severity.label} - {signal.explanation}")

# The direction matters: raising a timelock is not a signal.
hardened = build_timeline(
    "hardening-protocol",
    [
        StateTransitionEvent(
            "hardening-protocol", "2026-01-01", "TimelockChange", before=0, after=172800,
            quality="verified-onchain",
        )
    ],
)
print("signals after raising a timelock:", detect_signals(hardened))
