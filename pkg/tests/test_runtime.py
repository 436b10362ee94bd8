import concurrent.futures
import json
import subprocess
import sys

from paradox.embedding import build_embedding, eval_embedding
from paradox.engine import doubling_matching
from paradox.groups import DyadicAffineGroup, ball, group_from_string
from paradox.sets import SemigroupSet
from paradox.witness import free_semigroup_witness, semigroup_window

BS = group_from_string("bs12")
S_GEN = BS.parse("(2,0)")
T_GEN = BS.parse("(2,1)")


class TestLayerCache:
    def test_cache_dir_round_trip(self, tmp_path):
        env_script = f"""
import os
os.environ["PARADOX_CACHE_DIR"] = {str(tmp_path)!r}
from paradox.groups import group_from_string
group = group_from_string("bs12")
print(len(group.ball_elements(4)))
"""
        first = subprocess.run(
            [sys.executable, "-c", env_script], capture_output=True, text=True
        )
        assert first.returncode == 0
        cached = list(tmp_path.glob("bs12.layer*.json"))
        assert cached
        second = subprocess.run(
            [sys.executable, "-c", env_script], capture_output=True, text=True
        )
        assert second.stdout == first.stdout

    def test_corrupt_cache_is_ignored(self, tmp_path):
        (tmp_path / "bs12.layer1.json").write_text("{broken")
        env_script = f"""
import os
os.environ["PARADOX_CACHE_DIR"] = {str(tmp_path)!r}
from paradox.groups import group_from_string
print(len(group_from_string("bs12").ball_elements(2)))
"""
        proc = subprocess.run(
            [sys.executable, "-c", env_script], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == "17"


class TestConcurrency:
    def test_parallel_ball_extension(self):
        group = DyadicAffineGroup()  # fresh instance, empty layer cache
        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
            sizes = list(pool.map(lambda r: len(group.ball_elements(r)), [5] * 16))
        assert len(set(sizes)) == 1
        assert sizes[0] == len(BS.ball_elements(5))

    def test_parallel_embedding_evaluation(self):
        witness = free_semigroup_witness(BS, S_GEN, T_GEN, 6)
        data = build_embedding(witness, semigroup_window(BS, S_GEN, T_GEN, 5))
        words = [w.letters for w in group_from_string("free:2").ball_elements(4)]
        with concurrent.futures.ThreadPoolExecutor(max_workers=8) as pool:
            values = list(pool.map(lambda w: eval_embedding(data, w), words))
        assert len(set(values)) == len(words)

    def test_parallel_matching_queries(self):
        semi = SemigroupSet((S_GEN, T_GEN), True)
        window = semigroup_window(BS, S_GEN, T_GEN, 3)

        def run(_):
            cert = doubling_matching(semi, [S_GEN, T_GEN], window)
            return tuple(cert.assignment)

        with concurrent.futures.ThreadPoolExecutor(max_workers=6) as pool:
            results = set(pool.map(run, range(12)))
        assert len(results) == 1
