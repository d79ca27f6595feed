from prometheus_client import Counter


prompt_encoder_forwards = Counter(
    "crossprompt_prompt_encoder_forwards",
    "count of prompt encoder forward applications"
)

optimizer_steps = Counter(
    "crossprompt_optimizer_steps",
    "count of optimizer steps",
    ["phase"]
)

early_stops = Counter(
    "crossprompt_early_stops",
    "count of runs halted by early stopping",
    ["phase"]
)

dataset_split_reads = Counter(
    "crossprompt_dataset_split_reads",
    "count of dataset split reads",
    ["language", "split"]
)

seed_failures = Counter(
    "crossprompt_seed_failures",
    "count of campaign seeds aborted by an error"
)

run_result_records_skipped = Counter(
    "crossprompt_run_result_records_skipped",
    "count of result files skipped as invalid run results"
)
