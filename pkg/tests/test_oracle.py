import numpy as np
import pytest

from causalprune import corpus, oracle
from causalprune.expression import Atom, Product, Sum, Var, parse
from causalprune.graph import Smg, latent_project_smg
from causalprune.identify import identify
from causalprune.oracle import (
    EPSILON,
    DiscreteScm,
    OracleError,
    ProbTable,
    check_expression,
    compare_tables,
    eval_expression,
    interventional_table,
    interventional_truncated,
    observational_joint,
    random_latent_dag,
    random_smg,
    sample_scm,
)

X, Y = Var("X"), Var("Y")


def _model_arrays_equal(a: DiscreteScm, b: DiscreteScm) -> bool:
    return all(np.array_equal(a.cpts[v], b.cpts[v]) for v in a.cpts) and all(
        np.array_equal(a.priors[u], b.priors[u]) for u in a.priors
    )


# -- models ---------------------------------------------------------------


def test_sampling_is_deterministic():
    g = corpus.graph("showcase")
    a, b = sample_scm(g, 5, 2), sample_scm(g, 5, 2)
    assert _model_arrays_equal(a, b)
    assert not _model_arrays_equal(a, sample_scm(g, 6, 2))
    assert np.array_equal(observational_joint(a).values, observational_joint(b).values)


def test_one_latent_per_bidirected_edge():
    assert len(sample_scm(corpus.graph("interceptor-front-door"), 1, 2).latents) == 3
    assert sample_scm(corpus.graph("order-sensitive"), 1, 2).latents == ()


@pytest.mark.parametrize("card", [2, 3])
def test_cpts_are_positive_and_normalized(card):
    m = sample_scm(corpus.graph("showcase"), 0, card)
    for table in [*m.cpts.values(), *m.priors.values()]:
        assert np.all(table >= EPSILON - 1e-15)
        assert np.allclose(table.sum(axis=-1), 1, atol=1e-12)
    assert m.cpts["Z1"].shape == (card,) * 5  # X, Z2, Z4, one hidden parent, Z1


def test_card_must_be_at_least_two():
    with pytest.raises(OracleError):
        sample_scm(corpus.graph("bow"), 0, 1)


def test_uniform_single_variable():
    g = Smg(("A",))
    m = DiscreteScm(g, {"A": 2}, (), {}, {"A": ()}, {"A": np.array([0.5, 0.5])}, {})
    assert np.allclose(observational_joint(m).values, [0.5, 0.5])


def test_hidden_confounding_creates_dependence():
    g = Smg.from_edges(bidirected=[("X", "Y")])
    m = sample_scm(g, 3)
    # make the hidden parent nearly decide both children
    assert len(m.latents) == 1
    m.cpts["X"][:] = [[0.95, 0.05], [0.05, 0.95]]
    m.cpts["Y"][:] = [[0.95, 0.05], [0.05, 0.95]]
    joint = observational_joint(m).values
    independent = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    assert np.max(np.abs(joint - independent)) > 0.1


@pytest.mark.parametrize("name", sorted(corpus.EXAMPLES))
def test_joint_is_normalized(name):
    assert observational_joint(sample_scm(corpus.graph(name), 1)).total() == pytest.approx(1, abs=1e-9)


def test_guard(monkeypatch):
    monkeypatch.setattr(oracle, "MAX_CELLS", 100)
    with pytest.raises(OracleError, match="exceeds"):
        observational_joint(sample_scm(corpus.graph("showcase"), 0))


# -- interventions --------------------------------------------------------


def test_chain_intervention_reads_the_cpt():
    m = sample_scm(Smg.from_edges([("X", "Y")]), 2)
    for x in range(2):
        t = interventional_truncated(m, {"X": x}, {"Y"})
        assert np.allclose(t.values, m.cpts["Y"][x], atol=1e-12)


def test_confounded_pair_without_edge_ignores_the_intervention():
    m = sample_scm(Smg.from_edges(bidirected=[("X", "Y")]), 2)
    py = observational_joint(m).marginal({"Y"}).values
    for x in range(2):
        assert np.allclose(interventional_truncated(m, {"X": x}, {"Y"}).values, py, atol=1e-12)


def test_bow_effect_differs_from_conditional():
    m = sample_scm(corpus.graph("bow"), 1)
    truth = interventional_table(m, {"X"}, {"Y"}).reorder(["X", "Y"]).values
    joint = observational_joint(m).reorder(["X", "Y"]).values
    conditional = joint / joint.sum(axis=1, keepdims=True)
    assert np.max(np.abs(truth - conditional)) > 1e-6


def test_interventional_slices_are_distributions():
    m = sample_scm(corpus.graph("showcase"), 4)
    t = interventional_table(m, {"X", "Z2"}, {"Y", "Z1"})
    assert t.variables == ("X", "Z2", "Z1", "Y")  # graph vertex order
    assert np.allclose(t.values.sum(axis=(2, 3)), 1, atol=1e-12)


def test_intervening_on_a_source_is_conditioning():
    m = sample_scm(corpus.graph("order-sensitive"), 4)
    joint = observational_joint(m)
    pw = joint.marginal({"W"}).values
    t = interventional_table(m, {"W"}, {"X"}).reorder(["W", "X"]).values
    wx = joint.marginal({"W", "X"}).reorder(["W", "X"]).values
    assert np.allclose(t, wx / pw[:, None], atol=1e-12)


@pytest.mark.parametrize(
    "x, y",
    [({"X": 2}, {"Y"}), ({"Q": 0}, {"Y"}), ({"X": 0}, {"X"}), ({"X": 0}, set())],
)
def test_invalid_interventions(x, y):
    m = sample_scm(corpus.graph("bow"), 0)
    with pytest.raises((OracleError, ValueError)):
        interventional_truncated(m, x, y)


# -- expression evaluation -----------------------------------------------


def test_atom_matches_cpt():
    m = sample_scm(Smg.from_edges([("X", "Y")]), 9)
    joint = observational_joint(m)
    for x in range(2):
        for y in range(2):
            got = eval_expression(Atom((Y,), (X,)), joint, {"X": x, "Y": y})
            assert got == pytest.approx(m.cpts["Y"][x, y], abs=1e-12)


def test_sum_of_marginal_is_one():
    joint = observational_joint(sample_scm(corpus.graph("bow"), 0))
    assert eval_expression(Sum((X,), Atom((X,))), joint) == pytest.approx(1, abs=1e-12)


def test_sum_over_absent_variable_multiplies_by_cardinality():
    joint = observational_joint(sample_scm(corpus.graph("bow"), 0, card=3))
    e = Sum((X,), Sum((Y,), Atom((Y,))))
    assert eval_expression(e, joint) == pytest.approx(3, abs=1e-12)


def test_primed_assignments_and_missing_values():
    joint = observational_joint(sample_scm(corpus.graph("bow"), 0))
    e = Product((Atom((Var("X", 1),)), Atom((Y,), (X,))))
    assert eval_expression(e, joint, {Var("X", 1): 0, "X": 1, "Y": 0}) > 0
    with pytest.raises(OracleError, match="no value"):
        eval_expression(e, joint, {"X": 1, "Y": 0})


def test_zero_denominator_is_reported():
    joint = ProbTable(("X", "Y"), (2, 2), np.array([[0.5, 0.5], [0.0, 0.0]]))
    with pytest.raises(OracleError, match="zero denominator"):
        eval_expression(Atom((Y,), (X,)), joint, {"X": 1, "Y": 0})


def test_atom_with_repeated_variable_is_rejected():
    joint = observational_joint(sample_scm(corpus.graph("bow"), 0))
    with pytest.raises(OracleError):
        eval_expression(Atom((X,), (Var("X", 1),)), joint, {"X": 0, Var("X", 1): 0})


@pytest.mark.parametrize("seed", range(5))
def test_showcase_pruned_formula_matches_ground_truth(seed):
    ex = corpus.example("showcase")
    m = sample_scm(ex.graph, seed)
    assert check_expression(ex.expected("pid"), m, ex.y, ex.x) <= 1e-9


def test_check_expression_detects_wrong_formula():
    ex = corpus.example("bow")
    m = sample_scm(ex.graph, 1)
    assert check_expression(parse("P(Y|X)"), m, {"Y"}, {"X"}) > 1e-6


# -- tables ---------------------------------------------------------------


def test_compare_tables():
    a = ProbTable(("A",), (2,), np.array([0.5, 0.5]))
    b = ProbTable(("A",), (2,), np.array([1.0, 0.0]))
    assert compare_tables(a, a) == 0
    assert compare_tables(a, b) == 0.5
    with pytest.raises(OracleError):
        compare_tables(a, ProbTable(("B",), (2,), np.array([0.5, 0.5])))
    with pytest.raises(OracleError):
        compare_tables(a, ProbTable(("A",), (3,), np.full(3, 1 / 3)))


def test_compare_tables_aligns_variable_order():
    v = np.arange(6.0).reshape(2, 3)
    a = ProbTable(("A", "B"), (2, 3), v)
    assert compare_tables(a, ProbTable(("B", "A"), (3, 2), v.T)) == 0


def test_table_validation():
    with pytest.raises(OracleError):
        ProbTable(("A", "A"), (2, 2), np.zeros((2, 2)))
    with pytest.raises(OracleError):
        ProbTable(("A",), (3,), np.zeros(2))
    t = ProbTable(("A",), (2,), np.array([0.5, 0.5]))
    with pytest.raises(OracleError):
        t.marginal({"B"})
    with pytest.raises(OracleError):
        t.reorder(["B"])


def test_csv_dump():
    t = ProbTable(("A", "B"), (2, 2), np.array([[0.1, 0.2], [0.3, 0.4]]))
    lines = t.to_csv().splitlines()
    assert lines[0] == "A,B,p"
    assert lines[1:] == ["0,0,0.1", "0,1,0.2", "1,0,0.3", "1,1,0.4"]
    assert t[{"A": 1, "B": 0}] == 0.3


# -- pruning keeps the effect (numerically) ----------------------------------


@pytest.mark.parametrize("seed", range(3))
def test_interceptor_removal_keeps_the_effect(seed):
    # the effect in the full graph equals the effect computed from the reduced joint
    m = sample_scm(corpus.graph("interceptor-front-door"), seed)
    reduced = observational_joint(m).marginal({"X", "Z", "Y"})
    formula = corpus.example("front-door").expected("id")
    assert check_expression(formula, m, {"Y"}, {"X"}, joint=reduced) <= 1e-9


@pytest.mark.parametrize("seed", range(3))
def test_connector_removal_keeps_the_effect(seed):
    m = sample_scm(corpus.graph("connector-front-door"), seed)
    reduced = observational_joint(m).marginal({"X", "Z", "Y"})
    formula = corpus.example("front-door").expected("id")
    assert check_expression(formula, m, {"Y"}, {"X"}, joint=reduced) <= 1e-9


@pytest.mark.parametrize("name, hidden", [("latent", {"Z3"}), ("showcase", {"W1", "W2", "Z3", "Z4"})])
def test_formula_from_projection_holds_in_the_original_model(name, hidden):
    g = corpus.graph(name)
    projected = latent_project_smg(g, set(g.vertices) - hidden)
    result = identify(projected, {"Y"}, {"X"}, "id")
    assert result.identified
    for seed in range(3):
        m = sample_scm(g, seed)
        reduced = observational_joint(m).marginal(projected.vertices)
        assert check_expression(result.expression, m, {"Y"}, {"X"}, joint=reduced) <= 1e-9


# -- random graphs --------------------------------------------------------


def test_random_graphs_are_seeded():
    assert random_smg(3, 6) == random_smg(3, 6)
    assert random_latent_dag(3) == random_latent_dag(3)
    g = random_smg(3, 7)
    assert g.vertices == tuple(f"V{i}" for i in range(1, 8))
