"""Score the four packaged benchmark scenes with their shipped trajectories.

Each scene replays its scripted operator session headlessly at 50 Hz and
reports the 100/50/0 score plus completion time. The whole sweep runs in a
few seconds of wall time.
"""

from importlib.resources import files

from teleosim import SCENE_IDS, builtin_scene, default_chain, load_trajectory, run_bench


def main():
    chain = default_chain()
    print(f"{'task':<12} {'score':>5} {'checkpoints':>12} {'sim time':>9} {'ticks':>6}")
    for sid in SCENE_IDS:
        scene = builtin_scene(sid)
        traj = load_trajectory(
            files("teleosim").joinpath(f"data/trajectories/{sid.lower()}.jsonl")
        )
        r = run_bench(chain, scene, traj)
        cp = f"{r['checkpoints_cleared']}/{r['checkpoints_total']}"
        print(f"{r['task']:<12} {r['score']:>5} {cp:>12} {r['elapsed']:>8.2f}s {r['ticks']:>6}")


if __name__ == "__main__":
    main()
