import itertools
import math
import random
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from hyperwalls.arrangement import (
    ELL_PAIRS,
    EXTENDED_LABELS,
    THETA_PAIRS,
    Arrangement,
    EdgeKind,
    Parameter,
    builtin,
    convexity_witness,
    coxeter_diagram,
    ell_cosh,
    ideal_vertices,
    l_matrix,
    m_matrix,
    n_matrix,
    nu_cos_sq,
    nu_of_t,
    octet_of,
    reflection_matrix,
    relation_matrix,
    roll_matrix,
    sigma_matrix,
    symmetry_census,
    symmetry_group_order,
    t_for_n,
    theta_cos,
    verify_symmetry,
)
from hyperwalls.errors import PreconditionError, SymmetryError
from hyperwalls.minkowski import MinkVector, RelationKind, float_gram, float_relation_code
from hyperwalls.scalar import ONE, PI_OVER_COS_SQ, FieldElem, LaurentParam, Sign, parse_exact


class TestBuiltins:
    @pytest.mark.parametrize(
        "name, size",
        [("P24", 24), ("Gamma22", 22), ("Family22", 22), ("ExtendedGenerators", 8), ("L6", 10),
         ("Cuboctahedron", 14)],
    )
    def test_sizes(self, name, size):
        assert len(builtin(name)) == size

    def test_aliases(self):
        assert builtin("extended").labels == EXTENDED_LABELS
        assert builtin("p24").name == "P24"

    def test_unknown_name(self):
        with pytest.raises(PreconditionError):
            builtin("P120")

    def test_fixed_parameter_arrangements(self):
        with pytest.raises(PreconditionError):
            builtin("L6", Parameter.exact(Fraction(1, 3)))
        with pytest.raises(PreconditionError):
            builtin("P24", Parameter.exact(Fraction(16, 25)))

    def test_duplicate_labels(self):
        arr = builtin("P24")
        with pytest.raises(PreconditionError):
            Arrangement("dup", ("A", "A"), (arr.wall("A"), arr.wall("B")), arr.parameter)

    def test_time_like_wall_rejected(self):
        arr = builtin("P24")
        time_like = MinkVector((ONE, FieldElem(0), FieldElem(0), FieldElem(0), FieldElem(0)))
        with pytest.raises(PreconditionError):
            Arrangement("bad", ("A", "X"), (arr.wall("A"), time_like), arr.parameter)

    def test_positive_walls_scale_with_inverse_t(self, family):
        norm = family.norm("+0")
        # -2 + 3 + 1/t^2
        assert norm.coefficient(0) == 1 and norm.coefficient(-2) == 1


class TestRelations:
    def test_right_angled_24_cell(self, p24):
        counts = relation_matrix(p24).counts()
        assert counts["O"] == 96
        assert counts["T"] == 72
        assert set(counts) <= {"O", "T", "U"}

    def test_eight_orthogonal_neighbours(self, p24):
        matrix = relation_matrix(p24)
        for label in p24.labels:
            neighbours = [b for b in p24.labels if b != label and matrix.get(label, b).kind is RelationKind.ORTHOGONAL]
            assert len(neighbours) == 8

    def test_formally_orthogonal_pairs(self, family):
        zero = [(a, b) for i, a in enumerate(family.labels) for b in family.labels[i + 1:]
                if family.pairing(a, b).is_zero()]
        assert len(zero) == 80

    def test_theta_and_ell_pairs_at_random_parameters(self, family_at):
        rng = random.Random(7)
        for _ in range(20):
            t2 = Fraction(rng.randint(37, 99), 100)
            arr = family_at(t2)
            for a, b in THETA_PAIRS:
                rel = arr.relation(a, b)
                assert rel.intersecting
                assert rel.sign is Sign.POSITIVE
                assert rel.c_sq == theta_cos(FieldElem(t2)) ** 2
            for a, b in ELL_PAIRS:
                rel = arr.relation(a, b)
                assert rel.kind is RelationKind.ULTRAPARALLEL
                assert rel.c_sq == ell_cosh(FieldElem(t2)) ** 2

    def test_theta_angle_at_four_fifths(self):
        arr = builtin("Family22", Parameter.numeric(0.8))
        assert arr.relation("+1", "+3").angle_degrees == pytest.approx(55.88, abs=0.01)

    def test_theta_is_pi_over_three_at_three_fifths(self, family_at):
        arr = family_at(Fraction(3, 5))
        assert arr.relation("+1", "+3").code == "P3"

    @pytest.mark.parametrize("name", ["Family22", "ExtendedGenerators"])
    @pytest.mark.parametrize(
        "t_squared",
        [1, Fraction(16, 25), Fraction(3, 5), Fraction(1, 3), Fraction(1, 7)],
    )
    def test_float_gram_matches_exact(self, family, extended, name, t_squared):
        formal = family if name == "Family22" else extended
        exact = builtin(name, Parameter.exact(Fraction(t_squared))).gram_matrix()
        expected = np.array([[float(x) for x in row] for row in exact])
        g = float_gram(list(formal.vectors), math.sqrt(t_squared))
        assert np.allclose(g, expected, rtol=1e-9, atol=1e-12)

    @pytest.mark.parametrize("name", ["Family22", "ExtendedGenerators"])
    def test_relations_agree_with_floats(self, family, extended, name):
        formal = family if name == "Family22" else extended
        to_code = {
            RelationKind.ORTHOGONAL: "O",
            RelationKind.ANGLE_PI_OVER: "I",
            RelationKind.GENERIC_ANGLE: "I",
            RelationKind.TANGENT_AT_INFINITY: "T",
            RelationKind.ULTRAPARALLEL: "U",
            RelationKind.DIVERGING: "D",
        }
        rng = random.Random(41)
        for _ in range(20):
            t2 = Fraction(rng.randint(10, 100), 100)
            arr = builtin(name, Parameter.exact(t2))
            g = float_gram(list(formal.vectors), math.sqrt(t2))
            for i, j in itertools.combinations(range(len(arr)), 2):
                rel = arr.relation(arr.labels[i], arr.labels[j])
                assert float_relation_code(g[i, i], g[j, j], g[i, j]) == to_code[rel.kind]

    def test_relation_table_frame(self, p24):
        frame = relation_matrix(p24).to_frame()
        assert frame.shape == (24, 24)
        assert frame.loc["A", "F"] == "U"
        assert frame.loc["A", "A"] == "-"

    def test_formal_relations_rejected(self, family):
        with pytest.raises(PreconditionError):
            relation_matrix(family)


class TestParameter:
    @pytest.mark.parametrize(
        "n, t_squared",
        [(3, Fraction(1, 7)), (4, Fraction(1, 3)), (6, Fraction(3, 5))],
    )
    def test_rational_t_n(self, n, t_squared):
        assert t_for_n(n) == t_squared

    def test_t5(self):
        assert t_for_n(5) == parse_exact("(11+4*sqrt5)/41")
        assert float(t_for_n(5)) == pytest.approx(t_for_n(5, exact=False), rel=1e-12)

    def test_t8(self):
        c = FieldElem(Fraction(1, 2), Fraction(1, 4))
        assert t_for_n(8) == c / (2 - c)

    def test_nu_inverts_t_n(self):
        for n in (3, 4, 5, 6, 7, 9):
            assert nu_of_t(math.sqrt(t_for_n(n, exact=False))) == pytest.approx(n)

    @pytest.mark.parametrize("n", [2, 7])
    def test_unsupported_exact_n(self, n):
        with pytest.raises(PreconditionError):
            t_for_n(n)

    def test_parameter_must_be_positive(self):
        with pytest.raises(PreconditionError):
            Parameter.exact(0)
        with pytest.raises(PreconditionError):
            Parameter.numeric(-1.0)

    def test_half_angle_identity(self):
        rng = random.Random(13)
        for _ in range(20):
            t2 = FieldElem(Fraction(rng.randint(1, 200), rng.randint(1, 200)))
            assert theta_cos(t2) == 2 * nu_cos_sq(t2) - 1

    @pytest.mark.parametrize("n", [3, 4, 5, 6, 8])
    def test_nu_edge_at_t_n(self, n):
        assert nu_cos_sq(t_for_n(n)) == PI_OVER_COS_SQ[n]

    def test_square_parameter_gives_field_elements(self):
        kit = Parameter.exact(Fraction(16, 25)).kit
        assert kit.t == FieldElem(Fraction(4, 5))


class TestDiagram:
    def test_extended_diagram_at_t4(self, extended_at_n):
        diagram = coxeter_diagram(extended_at_n(4))
        assert not diagram.flagged
        assert diagram.label("L", "M") == "3"
        assert diagram.label("+3", "M") == "4"
        assert diagram.label("A", "L") == "tangent"
        assert diagram.graph.has_edge("+0", "+3")
        kinds = Counter(data["kind"] for _, _, data in diagram.graph.edges(data=True))
        assert kinds[EdgeKind.TANGENT] == 3
        assert kinds[EdgeKind.ULTRAPARALLEL] == 2

    def test_extended_diagram_at_t_one(self):
        diagram = coxeter_diagram(builtin("ExtendedGenerators", Parameter.exact(1)))
        assert not diagram.flagged
        assert diagram.edge_multiset() == Counter({"tangent": 7, "3": 2})
        assert diagram.label("+3", "M") == diagram.label("+0", "N") == "tangent"

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_nu_edges_carry_n(self, extended_at_n, n):
        diagram = coxeter_diagram(extended_at_n(n))
        assert diagram.label("+3", "M") == diagram.label("+0", "N") == str(n)

    def test_generic_angles_are_flagged(self):
        arr = builtin("ExtendedGenerators", Parameter.exact(Fraction(11, 20)))
        diagram = coxeter_diagram(arr)
        assert {frozenset(pair) for pair in diagram.flagged} == {frozenset(("+0", "N")), frozenset(("+3", "M"))}


class TestIdealVertices:
    def test_gamma22_cusp_ranks(self, gamma22):
        ranks = Counter(record.cusp_rank for record in ideal_vertices(gamma22))
        assert ranks == Counter({3: 12, 2: 12})

    def test_p24_cusps(self, p24):
        records = ideal_vertices(p24)
        assert len(records) == 24
        assert all(r.cusp_rank == 3 and len(r.incident) == 6 for r in records)

    def test_rank_three_cusps_persist(self, family_at):
        def rank_three(arr):
            return {frozenset(r.incident) for r in ideal_vertices(arr) if r.cusp_rank == 3}
        persistent = rank_three(family_at(Fraction(1, 3)))
        assert len(persistent) == 12
        assert persistent == rank_three(family_at(1))

    def test_cuboctahedron_vertices(self):
        records = ideal_vertices(builtin("Cuboctahedron"))
        assert len(records) == 12
        assert all(r.cusp_rank == 2 for r in records)


class TestSymmetries:
    def test_letter_images(self, family):
        assert verify_symmetry(family, l_matrix())["A"] == "B"
        assert verify_symmetry(family, m_matrix())["B"] == "C"
        n_perm = verify_symmetry(family, n_matrix())
        assert n_perm["B"] == "D" and n_perm["C"] == "E"

    @pytest.mark.parametrize("matrix", [l_matrix, m_matrix, n_matrix, roll_matrix])
    def test_symmetries_preserve_octets(self, family, matrix):
        permutation = verify_symmetry(family, matrix())
        assert permutation is not None
        assert sorted(permutation.values()) == sorted(family.labels)
        assert all(octet_of(a) == octet_of(b) for a, b in permutation.items())

    @pytest.mark.parametrize("matrix", [l_matrix, m_matrix, n_matrix])
    def test_reflections_have_order_two(self, family, matrix):
        g = matrix()
        size = len(g)
        square = [[sum(g[i][k] * g[k][j] for k in range(size)) for j in range(size)] for i in range(size)]
        assert square == [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
        permutation = verify_symmetry(family, g)
        assert all(permutation[permutation[label]] == label for label in family.labels)
        assert any(permutation[label] != label for label in family.labels)

    def test_sigma_swaps_octets_and_inverts_t(self, family):
        permutation = verify_symmetry(family, sigma_matrix(), reparametrize="inverse")
        assert permutation is not None
        assert permutation["+0"] == "-3"
        assert permutation["C"] == "D"
        for a, b in permutation.items():
            if octet_of(a) == "positive":
                assert octet_of(b) == "negative"

    def test_sigma_without_inversion_fails(self, family):
        assert verify_symmetry(family, sigma_matrix()) is None

    def test_non_isometry_rejected(self, family):
        g = roll_matrix()
        g[1][1] = Fraction(2)
        with pytest.raises(SymmetryError):
            verify_symmetry(family, g)

    def test_reflection_in_a_wall_of_p24(self, p24):
        # reflecting in +-e1 +-e2 type roots of the spatial D4 fixes the arrangement
        g = reflection_matrix((0, 1, -1, 0, 0))
        assert verify_symmetry(p24, g) is not None

    def test_census(self, p24):
        census = symmetry_census(p24)
        assert census.order == 1152
        assert census.integer_entries == 384
        assert census.octet_preserving == 192
        assert census.gh_stabilizer == 48
        assert symmetry_group_order(p24) == census.order


class TestConvexity:
    def test_witness_inside_extended_polytope(self, extended):
        v = MinkVector((ONE, FieldElem(Fraction(1, 10)), FieldElem(Fraction(1, 100)), FieldElem(0), FieldElem(0)))
        assert convexity_witness(extended, v)

    def test_witness_outside(self, extended):
        v = MinkVector((ONE, FieldElem(Fraction(-1, 2)), FieldElem(0), FieldElem(0), FieldElem(0)))
        assert not convexity_witness(extended, v)

    def test_past_pointing_witness_rejected(self, extended):
        v = MinkVector((-ONE, FieldElem(0), FieldElem(0), FieldElem(0), FieldElem(0)))
        with pytest.raises(PreconditionError):
            convexity_witness(extended, v)


def test_json_round_trip_keeps_relations(p24):
    restored = Arrangement.from_json(p24.to_json())
    assert restored.labels == p24.labels
    assert restored.vectors == p24.vectors
    assert relation_matrix(restored).counts() == relation_matrix(p24).counts()


def formal_wall(*coords) -> MinkVector:
    return MinkVector(tuple(LaurentParam.constant(0) + c for c in coords))


class TestFormalWalls:
    def test_norm_without_real_roots_is_space_like(self):
        t = LaurentParam.t()
        arr = Arrangement("bent", ("X",), (formal_wall(0, t - 1, 1, 0, 0),), Parameter.formal())
        assert arr.norm("X") == t * t - 2 * t + 2

    def test_norm_with_a_double_root_is_rejected(self):
        # (t - 1)^2 vanishes at t = 1
        t = LaurentParam.t()
        with pytest.raises(PreconditionError):
            Arrangement("bent", ("X",), (formal_wall(0, t - 1, 0, 0, 0),), Parameter.formal())

    @pytest.mark.parametrize(
        "time_part, witnessed",
        [
            ({0: 1, 1: -1, 2: 1}, True),
            ({0: 1, 1: -2, 2: 1}, False),
        ],
    )
    def test_convexity_witness_is_exact(self, time_part, witnessed):
        # q = (a, a + 1, 0, 0, 0) has norm 2a + 1 and (e0, q) = -a
        a = LaurentParam({e: FieldElem(c) for e, c in time_part.items()})
        arr = Arrangement("bent", ("X",), (formal_wall(a, a + 1, 0, 0, 0),), Parameter.formal())
        e0 = MinkVector((ONE, FieldElem(0), FieldElem(0), FieldElem(0), FieldElem(0)))
        assert convexity_witness(arr, e0) is witnessed
