"""Parser, printer, closure graph, and priority assignment."""

import pytest

from amcheck import (
    Allows,
    And,
    Atom,
    Bot,
    Enforce,
    Mu,
    NegAtom,
    Nu,
    Or,
    Top,
    Var,
    build_closure,
    parse_formula,
)
from amcheck.errors import FormulaError, ParseError
from amcheck.formula import (
    coalitions_in,
    connective_count,
    fixpoint_priorities,
    format_formula,
    free_vars,
    syntactic_size,
)
from amcheck.benchgen import gen_random_formula


class TestParse:
    def test_reach_shape(self):
        f = parse_formula("mu X. p | [{1,2}] X")
        assert f == Mu("X", Or(Atom("p"), Enforce((1, 2), Var("X"))))

    def test_survive_shape(self):
        f = parse_formula("nu X. ~lost1 & [{1}] X")
        assert f == Nu("X", And(NegAtom("lost1"), Enforce((1,), Var("X"))))

    def test_degenerate_fixpoint(self):
        assert parse_formula("mu X. X") == Mu("X", Var("X"))

    def test_constants_and_literals(self):
        assert parse_formula("true") == Top()
        assert parse_formula("false") == Bot()
        assert parse_formula("p") == Atom("p")
        assert parse_formula("~p") == NegAtom("p")

    def test_and_binds_tighter_than_or(self):
        f = parse_formula("p & q | r")
        assert f == Or(And(Atom("p"), Atom("q")), Atom("r"))
        g = parse_formula("p | q & r")
        assert g == Or(Atom("p"), And(Atom("q"), Atom("r")))

    def test_binary_operators_associate_left(self):
        f = parse_formula("p & q & r")
        assert f == And(And(Atom("p"), Atom("q")), Atom("r"))

    def test_modality_extends_maximally_right(self):
        f = parse_formula("[{1}] p | q")
        assert f == Enforce((1,), Or(Atom("p"), Atom("q")))

    def test_binder_extends_maximally_right(self):
        f = parse_formula("mu X. X & p | q")
        assert f == Mu("X", Or(And(Var("X"), Atom("p")), Atom("q")))

    def test_parentheses_override(self):
        f = parse_formula("([{1}] p) | q")
        assert f == Or(Enforce((1,), Atom("p")), Atom("q"))

    def test_dual_modality(self):
        f = parse_formula("<{2,3}> q")
        assert f == Allows((2, 3), Atom("q"))

    def test_empty_coalition(self):
        assert parse_formula("[{}] p") == Enforce((), Atom("p"))

    def test_coalition_set_semantics(self):
        # coalitions are sets of agent ids: order and repetition are ignored
        assert parse_formula("[{2,1}] p") == parse_formula("[{1,2}] p")
        assert parse_formula("<{3,3}> p") == Allows((3,), Atom("p"))

    def test_identifier_lexing(self):
        f = parse_formula("mu Xlong. atom_1 | [{1}] Xlong")
        assert f == Mu("Xlong", Or(Atom("atom_1"), Enforce((1,), Var("Xlong"))))


class TestParseErrors:
    def test_unexpected_character_position(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("p @ q")
        assert exc.value.line == 1
        assert exc.value.column == 3

    def test_position_counts_lines(self):
        with pytest.raises(ParseError) as exc:
            parse_formula("p |\n  $")
        assert exc.value.line == 2
        assert exc.value.column == 3

    def test_truncated_input(self):
        with pytest.raises(ParseError, match="unexpected end of input"):
            parse_formula("p &")

    def test_trailing_input(self):
        with pytest.raises(ParseError, match="trailing input"):
            parse_formula("p q")

    def test_missing_close_bracket(self):
        with pytest.raises(ParseError, match="expected"):
            parse_formula("[{1} p")

    def test_lowercase_fixpoint_variable(self):
        with pytest.raises(ParseError, match="uppercase"):
            parse_formula("mu x. x")

    def test_negated_compound(self):
        with pytest.raises(ParseError, match="atom"):
            parse_formula("~X")
        with pytest.raises(ParseError, match="atom"):
            parse_formula("~true")

    def test_agent_id_expected(self):
        with pytest.raises(ParseError, match="agent id"):
            parse_formula("[{a}] p")

    def test_unbound_variable(self):
        with pytest.raises(FormulaError, match="unbound variable X"):
            parse_formula("p | X")

    def test_variable_bound_twice(self):
        with pytest.raises(FormulaError, match="bound twice"):
            parse_formula("mu X. (nu X. X & p) | X")

    def test_zero_agent_id(self):
        with pytest.raises(FormulaError, match="positive"):
            parse_formula("[{0}] p")


class TestFormat:
    def test_round_trip_examples(self):
        for text in [
            "mu X. p | [{1,2}] X",
            "nu X. ~lost1 & [{1}] X",
            "<{}> (p & q | true)",
            "nu X. mu Y. (X & p) | [{1}] Y",
            "(mu X. X) & false",
        ]:
            f = parse_formula(text)
            assert parse_formula(format_formula(f)) == f

    def test_round_trip_random(self):
        atoms = ("p", "q", "r")
        for seed in range(60):
            f = gen_random_formula(1 + seed % 12, 3, atoms, seed=seed)
            assert parse_formula(format_formula(f)) == f

    def test_prefix_left_of_binary_is_parenthesized(self):
        f = Or(Enforce((1,), Atom("p")), Atom("q"))
        assert format_formula(f) == "(([{1}] p) | q)"


class TestHelpers:
    def test_free_vars(self):
        f = Mu("X", Or(Var("X"), Var("Y")))
        assert free_vars(f) == frozenset({"Y"})

    def test_connective_count(self):
        assert connective_count(parse_formula("p")) == 0
        assert connective_count(parse_formula("p & q")) == 1
        assert connective_count(parse_formula("mu X. p | [{1,2}] X")) == 3

    def test_syntactic_size(self):
        assert syntactic_size(parse_formula("p")) == 1
        assert syntactic_size(parse_formula("p & q")) == 3
        assert syntactic_size(parse_formula("mu X. p | [{1,2}] X")) == 5

    def test_coalitions_in(self):
        f = parse_formula("mu X. ([{1,3}] X | <{}> p) & [{1,3}] q")
        assert coalitions_in(f) == {(1, 3), ()}


class TestClosure:
    def test_reach_closure_backedge(self):
        g = build_closure(parse_formula("mu X. p | [{1}] X"))
        assert len(g) == 4
        root = g.nodes[g.root]
        assert root.kind == "mu"
        (body,) = root.children
        assert g.nodes[body].kind == "or"
        left, right = g.nodes[body].children
        assert g.nodes[left].kind == "atom"
        assert g.nodes[left].atom == "p"
        assert g.nodes[right].kind == "enforce"
        assert g.nodes[right].coalition == (1,)
        # variable occurrence became an edge back to the binder
        assert g.nodes[right].children == (g.root,)

    def test_top_closure(self):
        assert len(build_closure(Top())) == 1

    def test_shared_subterms(self):
        g = build_closure(parse_formula("(p & q) | (p & q)"))
        assert len(g) == 4  # or, and, p, q

    def test_shared_leaves(self):
        g = build_closure(parse_formula("p & p"))
        assert len(g) == 2

    def test_node_count_bounded_by_syntactic_size(self):
        atoms = ("p", "q", "r", "s")
        for seed in range(120):
            f = gen_random_formula(1 + seed % 14, 3, atoms, seed=seed)
            assert len(build_closure(f)) <= syntactic_size(f)

    def test_unfold_returns_body(self):
        g = build_closure(parse_formula("mu X. p | [{1}] X"))
        body = g.unfold(g.root)
        assert g.nodes[body].kind == "or"

    def test_unfold_self_loop(self):
        g = build_closure(parse_formula("mu X. X"))
        assert g.unfold(g.root) == g.root

    def test_unfold_rejects_non_fixpoint(self):
        g = build_closure(parse_formula("p & q"))
        with pytest.raises(FormulaError, match="not a fixpoint"):
            g.unfold(g.root)

    def test_open_formula_rejected(self):
        with pytest.raises(FormulaError):
            build_closure(Or(Atom("p"), Var("X")))

    def test_labels_render_subterms(self):
        g = build_closure(parse_formula("mu X. p | [{1,3}] X"))
        labels = {n.label for n in g.nodes}
        assert "p" in labels
        assert "mu X. (p | [{1,3}] X)" in labels


class TestPriorities:
    def test_reach_is_odd(self):
        g = build_closure(parse_formula("mu X. p | [{1}] X"))
        assert g.nodes[g.root].priority == 1
        assert g.max_priority == 1

    def test_safety_is_even(self):
        g = build_closure(parse_formula("nu X. q & [{1}] X"))
        assert g.nodes[g.root].priority == 0
        assert g.max_priority == 0

    def test_buchi_nesting(self):
        f = parse_formula("nu X. mu Y. (X & (p0 | [{1}] Y)) & (p5 | [{1}] Y)")
        prios = fixpoint_priorities(f)
        assert prios == {"Y": 1, "X": 2}
        assert build_closure(f).max_priority == 2

    def test_outer_mu_dominating_inner_mu(self):
        # the inner variable is what forces the outer priority up
        prios = fixpoint_priorities(parse_formula("nu X. mu Y. (X & p) | [{1}] Y"))
        assert prios == {"Y": 1, "X": 2}

    def test_independent_fixpoints_do_not_stack(self):
        f = parse_formula("(mu X. p | [{1}] X) & (mu Y. q | [{1}] Y)")
        assert fixpoint_priorities(f) == {"X": 1, "Y": 1}

    def test_inner_without_outer_variable_does_not_dominate(self):
        # Y's body never mentions X, so X only needs to beat nothing
        f = parse_formula("nu X. (mu Y. p | [{1}] Y) & [{1}] X")
        assert fixpoint_priorities(f) == {"Y": 1, "X": 0}

    def test_parity_matches_binder_everywhere(self):
        atoms = ("p", "q")
        for seed in range(120):
            f = gen_random_formula(2 + seed % 12, 2, atoms, seed=seed + 300)
            g = build_closure(f)
            for node in g.nodes:
                if node.kind == "mu":
                    assert node.priority % 2 == 1
                elif node.kind == "nu":
                    assert node.priority % 2 == 0
                else:
                    assert node.priority == 0

    def test_outer_dominates_dependent_inner(self):
        atoms = ("p", "q")

        def dependent_pairs(t, binders):
            # yields (outer_var, inner_var) when outer's variable is free in
            # the inner fixpoint subformula
            if isinstance(t, (And, Or)):
                yield from dependent_pairs(t.left, binders)
                yield from dependent_pairs(t.right, binders)
            elif isinstance(t, (Enforce, Allows)):
                yield from dependent_pairs(t.arg, binders)
            elif isinstance(t, (Mu, Nu)):
                for outer in binders:
                    if outer in free_vars(t):
                        yield outer, t.var
                yield from dependent_pairs(t.body, binders + [t.var])

        for seed in range(120):
            f = gen_random_formula(3 + seed % 10, 2, atoms, seed=seed + 900)
            prios = fixpoint_priorities(f)
            for outer, inner in dependent_pairs(f, []):
                assert prios[outer] >= prios[inner]
