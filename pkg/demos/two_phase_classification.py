"""Telling two stream classes apart by the ORDER of their hot phases.

Both classes heat up letter 1 and letter 2 for a quarter of the stream each,
then mix; class A heats 1 before 2, class B the reverse.  Letter counts are
nearly identical, so depth-1 features (frequencies) barely separate the
classes when the phase probabilities are close.  Depth-2 features see the
order: the coordinate of "1 then 2" is large exactly for class A.

This is a scaled-down run of the classification study harness; it mines
consensus heavy letters per stream from sketches, trains a logistic model on
the surviving coordinates, and prints held-out accuracy per feature depth.
"""

from ordersketch.experiments import ExperimentTwoConfig, run_experiment_2

config = ExperimentTwoConfig(
    alphabet_size=300,
    total_length=4000,
    p=0.1,
    q_values=(0.103, 0.11, 0.14),
    streams_per_class=40,
    rho=60.0,
    splits=3,
    epochs=200,
    base_seed=0,
    chunk_size=1024,
)

print("class A: letter 1 hot, then letter 2; class B swapped; then both mix")
print(f"{config.streams_per_class} streams per class, {config.total_length} events each\n")
print(f"{'q - p':>7} {'letters':>9} {'depth-1 acc':>12} {'depth-2 acc':>12}")

for row in run_experiment_2(config):
    letters = ",".join(str(a) for a in row.feature_letters)
    print(
        f"{row.q_minus_p:>7.3f} {letters:>9} {row.accuracy_by_depth[1]:>12.3f}"
        f" {row.accuracy_by_depth[2]:>12.3f}"
    )

print("\nfrequencies alone recover the gap only when q - p is large;")
print("the ordered depth-2 coordinates separate the classes even when it is tiny")
