import pytest

from paradox.embedding import (
    EmbeddingData,
    build_embedding,
    check_injective_lipschitz,
    eval_embedding,
    transported_pwt,
)
from paradox.groups import IntVec, ball, group_from_string
from paradox.pwt import PwT, pwt_apply
from paradox.sets import AllSet, EmptySet, FiniteSet, SetContext
from paradox.witness import (
    ParadoxWitness,
    free_semigroup_witness,
    semigroup_window,
)

BS = group_from_string("bs12")
F2 = group_from_string("free:2")
Z1 = group_from_string("zn:1")

S_GEN = BS.parse("(2,0)")
T_GEN = BS.parse("(2,1)")


@pytest.fixture(scope="module")
def embedding():
    w = free_semigroup_witness(BS, S_GEN, T_GEN, 6)
    return build_embedding(w, semigroup_window(BS, S_GEN, T_GEN, 6))


class TestBuild:
    def test_branch_translators_and_base_point(self, embedding):
        translators = [m.displacement for m in embedding.branch_maps()]
        assert translators == [
            (BS.parse("(8,0)"),),
            (BS.parse("(8,4)"),),
            (BS.parse("(8,2)"),),
            (BS.parse("(8,6)"),),
        ]
        assert BS.show(embedding.base_point) == "(2,1)"

    def test_empty_set_rejected(self):
        empty = ParadoxWitness(EmptySet(), (), 0)
        with pytest.raises(ValueError):
            build_embedding(empty, ball(BS, 2))

    def test_images_and_base_point_disjoint(self, embedding):
        # build_embedding verifies this internally; re-check a sample here
        ctx = embedding.ctx
        window = semigroup_window(BS, S_GEN, T_GEN, 4)
        from paradox.sets import materialize

        pts = materialize(embedding.sigma_plus.domain, window, ctx).elements
        image_sets = [
            {pwt_apply(m, g, ctx) for g in pts} for m in embedding.branch_maps()
        ]
        image_sets.append({embedding.base_point})
        for i in range(len(image_sets)):
            for j in range(i + 1, len(image_sets)):
                assert not image_sets[i] & image_sets[j]


class TestEval:
    def test_identity_and_single_letters(self, embedding):
        assert BS.show(eval_embedding(embedding, ())) == "(2,1)"
        assert BS.show(eval_embedding(embedding, (1,))) == "(16,8)"

    def test_recursion_matches_map_application(self, embedding):
        ctx = embedding.ctx
        inner = eval_embedding(embedding, (2, -1))
        outer = eval_embedding(embedding, (1, 2, -1))
        assert pwt_apply(embedding.sigma_plus, inner, ctx) == outer

    def test_unreduced_word_rejected(self, embedding):
        with pytest.raises(ValueError):
            eval_embedding(embedding, (-1, 1))
        with pytest.raises(ValueError):
            eval_embedding(embedding, (3,))

    def test_accepts_free_words(self, embedding):
        w = F2.parse("a b^-1")
        assert eval_embedding(embedding, w) == eval_embedding(embedding, (1, -2))

    def test_window_scoped_witness_names_required_growth(self):
        from paradox.embedding import EmbeddingWindowError
        from paradox.engine import doubling_matching, witness_from_matching
        from paradox.sets import SemigroupSet

        semi = SemigroupSet((S_GEN, T_GEN), True)
        window = semigroup_window(BS, S_GEN, T_GEN, 4)
        finite_witness = witness_from_matching(
            doubling_matching(semi, [S_GEN, T_GEN], window)
        )
        data = build_embedding(finite_witness, window)
        with pytest.raises(EmbeddingWindowError, match="larger window"):
            for radius in (1, 2, 3):
                for w in F2.ball_elements(radius):
                    eval_embedding(data, w.letters)


class TestLipschitz:
    def test_depth_six_injective_with_eight_displacements(self, embedding):
        report = check_injective_lipschitz(embedding, 6)
        assert report.injective
        assert report.value_count == 1457  # the whole rank-2 ball
        assert len(report.displacement_set) == 8
        assert not report.violations

    def test_depth_one_displacements_inside_branch_sets(self, embedding):
        report = check_injective_lipschitz(embedding, 1)
        branch = {d for m in embedding.branch_maps() for d in m.displacement}
        observed = {
            d for d in report.displacement_set
        }
        assert {d for d in observed if d.a_exp > 0} <= branch

    def test_tampered_embedding_detected(self, embedding):
        broken = EmbeddingData(
            embedding.group,
            embedding.sigma_plus,
            embedding.sigma_plus,  # minus branch duplicated
            embedding.tau_plus,
            embedding.tau_minus,
            embedding.base_point,
            embedding.ctx,
        )
        report = check_injective_lipschitz(broken, 2)
        assert not report.injective
        assert report.collisions
        first = report.collisions[0]
        assert all(len(w) <= 2 for w in first)


class TestTransport:
    def test_transport_along_embedding(self, embedding):
        f_map = {
            w: eval_embedding(embedding, w.letters) for w in F2.ball_elements(3)
        }
        left_a = PwT.single(AllSet(), F2.parse("a"))
        window = semigroup_window(BS, S_GEN, T_GEN, 4)
        tau = transported_pwt(
            f_map, left_a, window, ctx=SetContext(F2, 8),
            target_ctx=embedding.ctx,
        )
        # transported displacements are embedding displacements
        report = check_injective_lipschitz(embedding, 4)
        assert set(tau.displacement) <= set(report.displacement_set)
        ctx = embedding.ctx
        for x in F2.ball_elements(2):
            fx = f_map[x]
            assert pwt_apply(tau, fx, ctx) == f_map[F2.mul(F2.parse("a"), x)]

    def test_identity_transport(self):
        pts = [IntVec((i,)) for i in range(-3, 4)]
        f_map = {g: g for g in pts}
        sigma = PwT.single(FiniteSet(tuple(pts[:-1])), IntVec((1,)))
        tau = transported_pwt(f_map, sigma, ball(Z1, 3), ctx=SetContext(Z1, 8))
        ctx = SetContext(Z1, 8)
        for g in pts[:-1]:
            assert pwt_apply(tau, g, ctx) == pwt_apply(sigma, g, ctx)

    def test_disjoint_images_stay_disjoint(self, embedding):
        f_map = {
            w: eval_embedding(embedding, w.letters) for w in F2.ball_elements(3)
        }
        window = semigroup_window(BS, S_GEN, T_GEN, 4)
        src_ctx = SetContext(F2, 8)
        # restrict each left multiplication so the source images (words
        # starting with a, resp. b) are already disjoint
        dom_a = FiniteSet(
            tuple(w for w in F2.ball_elements(2) if not w.letters or w.letters[0] != -1)
        )
        dom_b = FiniteSet(
            tuple(w for w in F2.ball_elements(2) if not w.letters or w.letters[0] != -2)
        )
        plus = PwT.single(dom_a, F2.parse("a"))
        minus = PwT.single(dom_b, F2.parse("b"))
        tau_p = transported_pwt(f_map, plus, window, ctx=src_ctx, target_ctx=embedding.ctx)
        tau_m = transported_pwt(f_map, minus, window, ctx=src_ctx, target_ctx=embedding.ctx)
        ctx = embedding.ctx
        img_p = {pwt_apply(tau_p, g, ctx) for piece, _ in tau_p.pieces for g in piece.elems}
        img_m = {pwt_apply(tau_m, g, ctx) for piece, _ in tau_m.pieces for g in piece.elems}
        assert not img_p & img_m

    def test_non_injective_map_rejected(self):
        f_map = {IntVec((0,)): IntVec((0,)), IntVec((1,)): IntVec((0,))}
        sigma = PwT.single(AllSet(), IntVec((1,)))
        with pytest.raises(ValueError):
            transported_pwt(f_map, sigma, ball(Z1, 2), ctx=SetContext(Z1, 8))
