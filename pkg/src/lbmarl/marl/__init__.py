from .adaptive import AdaptiveExecutor, MaddpgAp, split_episodes, train_maddpg_ap
from .checkpoint import CheckpointMismatch, load_maddpg_ap, save_maddpg_ap
from .maddpg import (Actor, CentralCritic, Maddpg, MaddpgConfig, actor_update, critic_target,
                     critic_update, select_action)
from .noise import OuProcess
from .predictor import PredictorConfig, train_predictor
from .ranked import (RankedSequenceBuffer, build_ranked_buffer, keep_count, rank_sequences,
                     sliding_windows)
from .replay import ReplayBuffer
from .training import phase_seed, train_maddpg

__all__ = [
    "Actor", "AdaptiveExecutor", "CentralCritic", "CheckpointMismatch", "Maddpg", "MaddpgAp",
    "MaddpgConfig", "OuProcess", "PredictorConfig", "RankedSequenceBuffer", "ReplayBuffer",
    "actor_update", "build_ranked_buffer", "critic_target", "critic_update", "keep_count",
    "load_maddpg_ap", "phase_seed", "rank_sequences", "save_maddpg_ap", "select_action",
    "sliding_windows", "split_episodes", "train_maddpg", "train_maddpg_ap", "train_predictor",
]
