# Score dimensions from the declarative rubric, then watch the transparency
# modifier move reliability (and, in the dismissed-negative case, risk).

from ninedim import (
    Dimension,
    EvidenceLedger,
    Observation,
    TransparencyRecord,
    apply_transparency,
    default_rubric,
    evaluate_dimension,
)

rubric = default_rubric()
ledger = EvidenceLedger()

# A one-of-one attestation config observed on-chain: the worst oracle band.
oracle = evaluate_dimension(
    Dimension.ORACLE,
    [
        Observation("verifier_threshold", 1, quality="verified-onchain"),
        Observation("operator_count", 1, quality="verified-onchain"),
    ],
    rubric,
    ledger,
)
print(f"oracle dimension: {oracle.risk.label} / {oracle.reliability.label}")

# No governance evidence at all: risk floors at Low, reliability at VeryLow.
governance = evaluate_dimension(Dimension.GOVERNANCE, [], rubric, ledger)
print(f"governance (no evidence): {governance.risk.label} / {governance.reliability.label}")

# A disclosed, dismissed audit finding: the team has confirmed the weakness
# is real and unaddressed, so risk floors at High and reliability at VeryHigh.
contract = evaluate_dimension(
    Dimension.SMART_CONTRACT,
    [Observation("dismissed_finding_severity", "high", quality="audited-doc")],
    rubric,
    ledger,
)
dismissal = TransparencyRecord(
    Dimension.SMART_CONTRACT,
    disclosure_quality="Full",
    disclosed_attribute_quality="Negative",
    dismissed_by_team=True,
)
after = apply_transparency(contract, dismissal, ledger)
print(
    f"dismissed finding: ({contract.risk.label}, {contract.reliability.label})"
    f" -> ({after.risk.label}, {after.reliability.label})"
)

# Opacity goes the other way: an undisclosed dimension loses two reliability steps.
opaque = apply_transparency(
    oracle, TransparencyRecord(Dimension.ORACLE, "None", "Unknown", False), ledger
)
print(f"undisclosed oracle config: reliability {oracle.reliability.label} -> {opaque.reliability.label}")
