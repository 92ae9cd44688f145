# Replay the bundled incident corpus and print the aggregate report.

from ninedim import corpus_stats, load_corpus, replay_incident

records = load_corpus()

print(f"{'incident':18s} {'date':8s} {'primary':14s} {'flagged':26s} match tmod")
for record in records:
    result = replay_incident(record)
    primary = ",".join(sorted(d.code for d in record.primary_dims))
    flagged = ",".join(sorted(d.code for d in result.flagged_dims))
    print(
        f"{record.id:18s} {record.date:8s} {primary:14s} {flagged:26s} "
        f"{str(result.matched_primary):5s} {result.matched_tmod}"
    )

stats = corpus_stats(records)
print()
print(f"midpoint loss total: {stats['midpoint_total_usd'] / 1e9:.2f}B USD")
print(f"two largest incidents' share: {stats['bybit_kelp_share']:.1%}")
print(f"incidents needing a novel dimension: {stats['novel_primary_count']} of {stats['incident_count']}")
print(f"incidents where the transparency modifier mattered: {stats['t_mod_count']} of {stats['incident_count']}")
