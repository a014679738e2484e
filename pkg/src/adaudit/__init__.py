"""Ad-transparency auditing toolkit.

Crawls ads.txt and sellers.json files, persists dated snapshots,
detects identifier pooling, dark pools, specification violations and
hidden intermediaries, and serves the results through investigative
query tools (HTTP API + CLI).
"""

__version__ = "0.1.0"
