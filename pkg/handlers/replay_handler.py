"""
`replay` command - re-simulate the recorded best episode and compare bit-exactly
"""

import logging
from pathlib import Path

from handlers.common import EXIT_ERROR, EXIT_OK, HANDLED_ERRORS, read_track, report_failure
from sim_logic.episode import run_episode, replay_controls
from sim_logic.exceptions import ReplayMismatchError
from storage.experiment_config import config_hash
from storage.replay_store import read_replay

logger = logging.getLogger(__name__)


def replay_command(replay_path: str, track_path: str) -> int:
    try:
        replay = read_replay(Path(replay_path))
        experiment = replay.experiment
        track, track_bytes = read_track(Path(track_path))
        if config_hash(experiment, track_bytes) != replay.config_hash:
            raise ReplayMismatchError(
                f"config hash differs: {replay_path} was not recorded with track {track_path}"
            )

        params, episode = experiment.params, experiment.episode
        by_genome = run_episode(replay.final_genome, track, params, experiment.rays, episode)
        by_controls = replay_controls(replay.controls, track, params, episode)
    except HANDLED_ERRORS as e:
        return report_failure(e)

    print(f"recorded : score {replay.score!r} outcome {replay.outcome.value} frames {replay.frames}")
    print(f"genome   : score {by_genome.score!r} outcome {by_genome.outcome.value} frames {by_genome.frames}")
    print(f"controls : score {by_controls.score!r} outcome {by_controls.outcome.value} frames {by_controls.frames}")

    matches = all(
        r.score == replay.score and r.outcome == replay.outcome and r.frames == replay.frames
        for r in (by_genome, by_controls)
    )
    if matches:
        logger.info("Replay reproduced bit-exactly")
        return EXIT_OK
    logger.error("Replay diverged from the recorded episode")
    return EXIT_ERROR
